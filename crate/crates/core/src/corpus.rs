//! Seeded random instances for property tests, acceptance runs and benches.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::means::{FunctionKind, FunctionSpec};
use crate::measures::{random_weight, ProbabilityVector};
use crate::refine::{JensenInstance, Objective, PointSet};

/// One representative of every catalog entry (`powp` with `p = 2`).
pub fn catalog() -> Vec<FunctionSpec> {
    vec![
        FunctionSpec::square(),
        FunctionSpec::neg_square(),
        FunctionSpec::exp(),
        FunctionSpec::neglog(),
        FunctionSpec::kyfan(),
        FunctionSpec::powp(2.0).expect("valid exponent"),
        FunctionSpec::xlogx(),
        FunctionSpec::harmonic_frac(),
    ]
}

/// Interval from which corpus points are drawn; always inside the domain.
pub fn sampling_interval(f: &FunctionSpec) -> (f64, f64) {
    match f.kind() {
        FunctionKind::Square | FunctionKind::NegSquare => (-5.0, 5.0),
        FunctionKind::Exp => (-3.0, 3.0),
        FunctionKind::NegLog | FunctionKind::XLogX | FunctionKind::HarmonicFrac => (0.0, 10.0),
        FunctionKind::KyFan => (0.0, 0.5),
        FunctionKind::PowP { .. } => (0.0, 5.0),
    }
}

/// Uniform draw from `(lo, hi]`.
pub fn draw_point(f: &FunctionSpec, rng: &mut impl Rng) -> f64 {
    let (lo, hi) = sampling_interval(f);
    hi - (hi - lo) * rng.random::<f64>()
}

/// A scalar instance with `n` points, `m` rows, random measures and two
/// independent random weights.
pub fn random_instance(f: FunctionSpec, n: usize, m: usize, seed: u64) -> JensenInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let lambda = ProbabilityVector::random(n, rng.random());
    let mu = ProbabilityVector::random(m, rng.random());
    let x: Vec<f64> = (0..n).map(|_| draw_point(&f, &mut rng)).collect();
    let w1 = random_weight(&mu, &lambda, rng.random());
    let w2 = random_weight(&mu, &lambda, rng.random());
    JensenInstance::new(
        PointSet::scalars(x).expect("finite points"),
        Objective::Scalar(f),
        w1,
        w2,
    )
    .expect("corpus instance is valid by construction")
}

/// [`random_instance`] with `n` and `m` themselves drawn from `1..=max_dim`.
pub fn random_sized_instance(f: FunctionSpec, max_dim: usize, seed: u64) -> JensenInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let n = rng.random_range(1..=max_dim);
    let m = rng.random_range(1..=max_dim);
    random_instance(f, n, m, seed)
}
