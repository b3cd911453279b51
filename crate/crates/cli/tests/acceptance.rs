//! End-to-end acceptance run: twelve criteria, one PASS/FAIL line each.
//!
//! Runs without the libtest harness so the verdict lines are always printed.

use std::f64::consts::E;
use std::time::{Duration, Instant};

use jensen_refine::apps::{
    agm_chain, harmonic_chain, kyfan_chain, lp_chain, matrix_power_bounds, power_sum_chain,
    AppChain, FiniteMeasureSpace, FunctionVector,
};
use jensen_refine::corpus;
use jensen_refine::means::{
    self, branches, identric, integral_mean, integral_mean_by_quadrature, logarithmic,
    p_logarithmic, p_logarithmic_pow, EPS_DEG,
};
use jensen_refine::measures::{
    embed_doubly_stochastic, random_doubly_stochastic, random_weight, rank_one_weight,
    validate_weight, SINKHORN_TOL,
};
use jensen_refine::refine::{
    chain_hadamard, phi_convexity_check, rel_err, scalar_instance, verify_batch, HadamardWeights,
    DEFAULT_GRID,
};
use jensen_refine::{
    DoublyStochasticMatrix, FunctionSpec, Grid, Middle, ProbabilityVector, WeightFunction,
};
use jensen_refine_cli::format::to_json;
use jensen_refine_cli::instance::{InstanceFile, Points, WeightSpec, WeightsField};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

const PER_FUNCTION: u64 = 1000;
const MAX_DIM: usize = 8;
const TIME_LIMIT: Duration = Duration::from_secs(60);

type Verdict = Result<String, String>;
type Criterion = (&'static str, fn() -> Verdict);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn middle(c: &jensen_refine::RefinementChain) -> f64 {
    match c.middle {
        Middle::Value(v) => v,
        _ => f64::NAN,
    }
}

fn corpus_instances(f: FunctionSpec, salt: u64) -> Vec<jensen_refine::JensenInstance> {
    (0..PER_FUNCTION)
        .into_par_iter()
        .map(|s| corpus::random_sized_instance(f, MAX_DIM, s.wrapping_mul(0x1000_0001) ^ salt))
        .collect()
}

fn whole_corpus(salt: u64) -> Vec<jensen_refine::JensenInstance> {
    corpus::catalog()
        .into_iter()
        .flat_map(|f| corpus_instances(f, salt))
        .collect()
}

fn sandwich() -> Verdict {
    let instances = whole_corpus(1);
    let out = verify_batch(&instances, &DEFAULT_GRID);
    let mut bad = 0;
    for (k, r) in out.iter().enumerate() {
        match r {
            Ok(o) if o.at_t.pass => {}
            Ok(o) => {
                bad += 1;
                eprintln!("  instance {k}: {:?}", o.at_t.witnesses);
            }
            Err(e) => return Err(format!("instance {k}: {e}")),
        }
    }
    ensure(bad == 0, || {
        format!("{bad} instances violated the sandwich")
    })?;
    Ok(format!(
        "{} instances x {} grid points, 0 violations",
        instances.len(),
        DEFAULT_GRID.len()
    ))
}

fn integral_chain() -> Verdict {
    let instances = whole_corpus(1);
    let out = verify_batch(&instances, &DEFAULT_GRID);
    let mut worst: f64 = 0.0;
    for (k, r) in out.into_iter().enumerate() {
        let c = r.map_err(|e| format!("instance {k}: {e}"))?.integral;
        let check = c
            .identity_checks
            .first()
            .ok_or("missing closed-form check")?;
        worst = worst.max(check.rel_err);
        ensure(c.pass, || {
            format!("instance {k}: {:?} {:?}", c.witnesses, c.identity_checks)
        })?;
        let quad = check.rhs;
        ensure(quad >= c.lower - c.tol && quad <= c.upper + c.tol, || {
            format!(
                "instance {k}: quadrature {quad} outside [{}, {}]",
                c.lower, c.upper
            )
        })?;
    }
    Ok(format!(
        "{} instances, max closed-form vs quadrature rel err {worst:.2e}",
        instances.len()
    ))
}

fn convexity() -> Verdict {
    let instances = whole_corpus(3);
    let failures: Vec<String> = instances
        .par_iter()
        .enumerate()
        .filter_map(|(k, inst)| match phi_convexity_check(inst, 100, k as u64) {
            Ok(r) if r.pass => None,
            Ok(r) => Some(format!("instance {k}: {:?}", r.witnesses.first())),
            Err(e) => Some(format!("instance {k}: {e}")),
        })
        .collect();
    ensure(failures.is_empty(), || failures.join("; "))?;
    Ok(format!("{} instances x 100 triples", instances.len()))
}

fn half() -> ProbabilityVector {
    ProbabilityVector::new(vec![0.5, 0.5]).unwrap()
}

fn tilted() -> WeightFunction {
    validate_weight(
        Grid::from_rows(&[vec![1.5, 0.5], vec![0.5, 1.5]]).unwrap(),
        &half(),
        &half(),
    )
    .unwrap()
}

fn hadamard() -> Verdict {
    let instances = whole_corpus(4);
    let failures: Vec<String> = instances
        .par_iter()
        .enumerate()
        .filter_map(|(k, inst)| {
            let mut rng = ChaCha8Rng::seed_from_u64(k as u64);
            let len = rng.random_range(1..=5);
            let p: Vec<f64> = (0..len).map(|_| 1.0 - rng.random::<f64>()).collect();
            let t: Vec<f64> = (0..len).map(|_| rng.random::<f64>()).collect();
            let hw = HadamardWeights::new(p, t).unwrap();
            match chain_hadamard(inst, &hw) {
                Ok(c) if c.pass => None,
                Ok(c) => Some(format!("instance {k}: {:?}", c.witnesses)),
                Err(e) => Some(format!("instance {k}: {e}")),
            }
        })
        .collect();
    ensure(failures.is_empty(), || failures.join("; "))?;

    let ones = WeightFunction::ones(&half(), &half());
    let inst = scalar_instance(vec![0.0, 1.0], FunctionSpec::square(), ones, tilted()).unwrap();
    let c = chain_hadamard(
        &inst,
        &HadamardWeights::new(vec![1.0, 1.0], vec![0.0, 1.0]).unwrap(),
    )
    .unwrap();
    let Middle::Hadamard {
        phi_at_mean,
        mean_of_phi,
    } = c.middle
    else {
        return Err("unexpected middle".into());
    };
    ensure(
        phi_at_mean == 0.265625 && mean_of_phi == 0.28125 && c.pass,
        || format!("anchor gave {phi_at_mean} <= {mean_of_phi}"),
    )?;
    Ok(format!(
        "{} instances; anchor 0.265625 <= 0.28125",
        instances.len()
    ))
}

fn app_corpus<F>(f: FunctionSpec, salt: u64, run: F) -> Result<usize, String>
where
    F: Fn(&[f64], &WeightFunction, &WeightFunction) -> jensen_refine::Result<AppChain> + Sync,
{
    let instances = corpus_instances(f, salt);
    let failures: Vec<String> = instances
        .par_iter()
        .enumerate()
        .filter_map(|(k, inst)| {
            let x: Vec<f64> = inst.points().iter().map(|p| p[0]).collect();
            match run(&x, inst.w1(), inst.w2()) {
                Ok(a) if a.chain.pass => None,
                Ok(a) => Some(format!(
                    "instance {k}: {:?} {:?}",
                    a.chain.witnesses, a.chain.identity_checks
                )),
                Err(e) => Some(format!("instance {k}: {e}")),
            }
        })
        .collect();
    ensure(failures.is_empty(), || failures.join("; "))?;
    Ok(instances.len())
}

fn id_anti(n: usize) -> (WeightFunction, WeightFunction) {
    (
        embed_doubly_stochastic(&DoublyStochasticMatrix::identity(n)),
        embed_doubly_stochastic(&DoublyStochasticMatrix::antidiagonal(n)),
    )
}

fn members(a: &AppChain) -> (f64, f64, f64) {
    (a.chain.lower, middle(&a.chain), a.chain.upper)
}

fn agm() -> Verdict {
    let count = app_corpus(FunctionSpec::neglog(), 5, agm_chain)?;
    let (b, c) = id_anti(2);
    let (lo, mid, hi) = members(&agm_chain(&[1.0, 2.0], &b, &c).map_err(|e| e.to_string())?);
    ensure(
        rel_err(lo, 2f64.sqrt()) <= 1e-12
            && rel_err(mid, 4.0 / E) <= 1e-12
            && rel_err(hi, 1.5) <= 1e-12,
        || format!("anchor gave {lo} <= {mid} <= {hi}"),
    )?;
    let mut rng = ChaCha8Rng::seed_from_u64(55);
    for k in 0..200 {
        let inst = corpus::random_sized_instance(FunctionSpec::neglog(), MAX_DIM, 7000 + k);
        let c_val = 10.0 * (1.0 - rng.random::<f64>());
        let x = vec![c_val; inst.n()];
        let (lo, mid, hi) =
            members(&agm_chain(&x, inst.w1(), inst.w2()).map_err(|e| e.to_string())?);
        ensure(
            rel_err(lo, c_val) <= 1e-12
                && rel_err(mid, c_val) <= 1e-12
                && rel_err(hi, c_val) <= 1e-12,
            || format!("equal inputs {c_val}: {lo} {mid} {hi}"),
        )?;
    }
    Ok(format!(
        "{count} instances; anchor sqrt2 <= 4/e <= 1.5; equality case x200"
    ))
}

fn kyfan() -> Verdict {
    let count = app_corpus(FunctionSpec::kyfan(), 6, kyfan_chain)?;
    let (b, c) = id_anti(2);
    let (lo, mid, hi) = members(&kyfan_chain(&[0.2, 0.4], &b, &c).map_err(|e| e.to_string())?);
    ensure(
        rel_err(lo, 7.0 / 3.0) <= 1e-12
            && (mid - 2.3703).abs() <= 1e-3
            && rel_err(hi, 6f64.sqrt()) <= 1e-12,
        || format!("anchor gave {lo} <= {mid} <= {hi}"),
    )?;
    Ok(format!(
        "{count} instances; anchor 7/3 <= {mid:.6} <= sqrt6"
    ))
}

struct FvCase {
    fv: FunctionVector,
    space: FiniteMeasureSpace,
    w1: WeightFunction,
    w2: WeightFunction,
}

fn random_fv_case(seed: u64, lo: f64, hi: f64) -> FvCase {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(1..=MAX_DIM);
    let m = rng.random_range(1..=MAX_DIM);
    let k = rng.random_range(1..=6);
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..k).map(|_| rng.random_range(lo..hi)).collect())
        .collect();
    let masses: Vec<f64> = (0..k).map(|_| rng.random_range(0.1..2.0)).collect();
    let lambda = ProbabilityVector::random(n, rng.random());
    let mu = ProbabilityVector::random(m, rng.random());
    FvCase {
        fv: FunctionVector::from_rows(&rows).unwrap(),
        space: FiniteMeasureSpace::new(masses).unwrap(),
        w1: random_weight(&mu, &lambda, rng.random()),
        w2: random_weight(&mu, &lambda, rng.random()),
    }
}

fn lp() -> Verdict {
    let exponents = [1.0, 1.5, 2.0, 3.0];
    let results: Vec<Result<f64, String>> = (0..PER_FUNCTION)
        .into_par_iter()
        .map(|s| {
            let case = random_fv_case(s, -5.0, 5.0);
            let p = exponents[(s % 4) as usize];
            let a = lp_chain(&case.fv, &case.space, p, &case.w1, &case.w2)
                .map_err(|e| format!("case {s}: {e}"))?;
            let check = &a.chain.identity_checks[0];
            if a.chain.pass && check.rel_err <= 1e-8 {
                Ok(check.rel_err)
            } else {
                Err(format!(
                    "case {s} p={p}: {:?} {:?}",
                    a.chain.witnesses, check
                ))
            }
        })
        .collect();
    let mut worst: f64 = 0.0;
    for r in results {
        worst = worst.max(r?);
    }
    let (b, c) = id_anti(2);
    let fv = FunctionVector::from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
    let (lo, mid, hi) = members(
        &lp_chain(&fv, &FiniteMeasureSpace::counting(2), 2.0, &b, &c).map_err(|e| e.to_string())?,
    );
    ensure(
        rel_err(lo, 0.5) <= 1e-12 && rel_err(mid, 2.0 / 3.0) <= 1e-12 && rel_err(hi, 1.0) <= 1e-12,
        || format!("anchor gave {lo} <= {mid} <= {hi}"),
    )?;
    Ok(format!(
        "{PER_FUNCTION} function vectors, p in {{1, 1.5, 2, 3}}; max middle vs t-quadrature rel err {worst:.2e}; anchor 0.5 <= 2/3 <= 1"
    ))
}

fn matrix_bounds() -> Verdict {
    let mut count = 0;
    let mut worst: f64 = 0.0;
    for n in 1..=6 {
        for p in 1..=6u32 {
            for seed in 0..40u64 {
                let b = random_doubly_stochastic(n, seed * 131 + n as u64)
                    .map_err(|e| e.to_string())?;
                let c = random_doubly_stochastic(n, seed * 137 + 7 + n as u64)
                    .map_err(|e| e.to_string())?;
                let general = matrix_power_bounds(&b, &c, p).map_err(|e| e.to_string())?;
                ensure(general.chain.pass, || {
                    format!("n={n} p={p} seed={seed}: {:?}", general.chain.witnesses)
                })?;
                let special = matrix_power_bounds(&b, &DoublyStochasticMatrix::identity(n), p)
                    .map_err(|e| e.to_string())?;
                let check = &special.chain.identity_checks[0];
                worst = worst.max(check.rel_err);
                ensure(special.chain.pass && check.rel_err <= 1e-12, || {
                    format!("n={n} p={p} seed={seed}: {check:?}")
                })?;
                // The power-sum form with unit inputs is the same bound scaled by 1/n.
                let ps = power_sum_chain(
                    &vec![1.0; n],
                    p as f64,
                    &embed_doubly_stochastic(&b),
                    &embed_doubly_stochastic(&c),
                )
                .map_err(|e| e.to_string())?;
                ensure(
                    ps.chain.pass
                        && rel_err(n as f64 * middle(&ps.chain), middle(&general.chain)) <= 1e-12,
                    || format!("n={n} p={p} seed={seed}: power sums disagree"),
                )?;
                count += 1;
            }
        }
    }
    let id = DoublyStochasticMatrix::identity(2);
    let anchor = members(&matrix_power_bounds(&id, &id, 2).map_err(|e| e.to_string())?);
    ensure(anchor == (1.0, 2.0, 2.0), || {
        format!("anchor gave {anchor:?}")
    })?;
    Ok(format!("{count} matrix pairs, n <= 6, p <= 6; identity form max rel err {worst:.2e}; anchor (1, 2, 2)"))
}

fn harmonic() -> Verdict {
    let failures: Vec<String> = (0..PER_FUNCTION)
        .into_par_iter()
        .filter_map(|s| {
            let case = random_fv_case(s ^ 0xabcd, 0.0, 10.0);
            match harmonic_chain(&case.fv, &case.space, &case.w1, &case.w2) {
                Ok(a) if a.chain.pass => None,
                Ok(a) => Some(format!(
                    "case {s}: {:?} {:?}",
                    a.chain.witnesses, a.chain.identity_checks
                )),
                Err(e) => Some(format!("case {s}: {e}")),
            }
        })
        .collect();
    ensure(failures.is_empty(), || failures.join("; "))?;
    let ones = WeightFunction::ones(&half(), &half());
    let fv = FunctionVector::from_rows(&[vec![0.0], vec![1.0]]).unwrap();
    let (lo, mid, hi) = members(
        &harmonic_chain(&fv, &FiniteMeasureSpace::counting(1), &ones, &tilted())
            .map_err(|e| e.to_string())?,
    );
    ensure(
        rel_err(lo, 0.25) <= 1e-12
            && (mid - 0.32705).abs() <= 1e-4
            && rel_err(hi, 1.0 / 3.0) <= 1e-12,
        || format!("anchor gave {lo} <= {mid} <= {hi}"),
    )?;
    Ok(format!(
        "{PER_FUNCTION} nonnegative function vectors; anchor 0.25 <= {mid:.6} <= 1/3"
    ))
}

/// `(1/n) sum_i ‖L_p^p(|f_i|, |f_{n+1-i}|)‖_1` for `f_k = f + g / k`.
fn cesaro_average(f: &[f64], g: &[f64], p: f64, n: usize) -> f64 {
    let fk = |k: usize, x: usize| (f[x] + g[x] / k as f64).abs();
    let mut total = 0.0;
    for i in 1..=n {
        for x in 0..f.len() {
            total += p_logarithmic_pow(fk(i, x), fk(n + 1 - i, x), p).unwrap();
        }
    }
    total / n as f64
}

fn cesaro() -> Verdict {
    let f = [1.0, 0.5, 2.0, 1.5];
    let g = [0.01; 4];
    let p = 2.0;
    let target: f64 = f.iter().map(|v: &f64| v.abs().powf(p)).sum();
    let errors: Vec<(usize, f64)> = [10, 100, 1000]
        .into_iter()
        .map(|n| (n, (cesaro_average(&f, &g, p, n) - target).abs()))
        .collect();

    // The direct average is the identity/antidiagonal middle of the norm chain.
    let n = 10;
    let rows: Vec<Vec<f64>> = (1..=n)
        .map(|k| f.iter().zip(&g).map(|(a, b)| a + b / k as f64).collect())
        .collect();
    let (w1, w2) = id_anti(n);
    let chain = lp_chain(
        &FunctionVector::from_rows(&rows).unwrap(),
        &FiniteMeasureSpace::counting(4),
        p,
        &w1,
        &w2,
    )
    .map_err(|e| e.to_string())?;
    ensure(
        rel_err(middle(&chain.chain), cesaro_average(&f, &g, p, n)) <= 1e-12,
        || "direct average disagrees with the norm chain".into(),
    )?;

    ensure(errors[2].1 <= 1e-3, || {
        format!("error at n=1000 is {:.3e}", errors[2].1)
    })?;
    ensure(errors.windows(2).all(|w| w[1].1 < w[0].1), || {
        format!("not decreasing: {errors:?}")
    })?;
    Ok(format!(
        "|error| {:.3e} (n=10), {:.3e} (n=100), {:.3e} (n=1000)",
        errors[0].1, errors[1].1, errors[2].1
    ))
}

fn means_suite() -> Verdict {
    let sq = FunctionSpec::square();
    let nl = FunctionSpec::neglog();
    let closed: [(&str, f64, f64); 13] = [
        (
            "A(square; 0, 1)",
            integral_mean(&sq, 0.0, 1.0).unwrap(),
            1.0 / 3.0,
        ),
        (
            "A(square; 2, 2)",
            integral_mean(&sq, 2.0, 2.0).unwrap(),
            4.0,
        ),
        (
            "A(neglog; 1, e)",
            integral_mean(&nl, 1.0, E).unwrap(),
            -1.0 / (E - 1.0),
        ),
        ("I(3, 3)", identric(3.0, 3.0).unwrap(), 3.0),
        ("I(1, 2)", identric(1.0, 2.0).unwrap(), 4.0 / E),
        (
            "I(1, e)",
            identric(1.0, E).unwrap(),
            E.powf(1.0 / (E - 1.0)),
        ),
        ("L(5, 5)", logarithmic(5.0, 5.0).unwrap(), 5.0),
        ("L(1, e)", logarithmic(1.0, E).unwrap(), E - 1.0),
        ("L(1, 2)", logarithmic(1.0, 2.0).unwrap(), 1.0 / 2f64.ln()),
        (
            "Lp(0.7, 0.7, 2.5)",
            p_logarithmic(0.7, 0.7, 2.5).unwrap(),
            0.7,
        ),
        ("Lp(0, 0, 3)", p_logarithmic(0.0, 0.0, 3.0).unwrap(), 0.0),
        ("Lp(0, 2, 1)", p_logarithmic(0.0, 2.0, 1.0).unwrap(), 1.0),
        (
            "Lp(0, 1, 2)",
            p_logarithmic(0.0, 1.0, 2.0).unwrap(),
            1.0 / 3f64.sqrt(),
        ),
    ];
    for (name, got, want) in closed {
        ensure(rel_err(got, want) <= 1e-12, || {
            format!("{name} = {got}, expected {want}")
        })?;
    }

    let ln = FunctionSpec::neglog().quadrature_only();
    let quad: [(&str, f64, f64); 4] = [
        (
            "quad A(square; 0, 1)",
            integral_mean_by_quadrature(&sq, 0.0, 1.0).unwrap(),
            1.0 / 3.0,
        ),
        (
            "quad A(neglog; 1, e)",
            integral_mean_by_quadrature(&nl, 1.0, E).unwrap(),
            -1.0 / (E - 1.0),
        ),
        (
            "exp(-quad A(neglog; 1, 2))",
            (-integral_mean(&ln, 1.0, 2.0).unwrap()).exp(),
            4.0 / E,
        ),
        (
            "exp(-quad A(neglog; 1, e))",
            (-integral_mean(&ln, 1.0, E).unwrap()).exp(),
            E.powf(1.0 / (E - 1.0)),
        ),
    ];
    for (name, got, want) in quad {
        ensure(rel_err(got, want) <= 1e-8, || {
            format!("{name} = {got}, expected {want}")
        })?;
    }

    // Closed forms against quadrature on random in-domain pairs.
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut pairs = 0;
    for f in corpus::catalog() {
        for _ in 0..1000 {
            let a = corpus::draw_point(&f, &mut rng);
            let b = corpus::draw_point(&f, &mut rng);
            let c = integral_mean(&f, a, b).unwrap();
            let q = integral_mean_by_quadrature(&f, a, b).unwrap();
            ensure(rel_err(c, q) <= 1e-8, || {
                format!("{} on [{a}, {b}]: {c} vs {q}", f.name())
            })?;
            pairs += 1;
        }
    }

    // Naive and series branches agree across the switch-over band.
    let mut worst: f64 = 0.0;
    for _ in 0..2000 {
        let a = 10f64.powf(rng.random_range(-3.0..3.0));
        let delta = EPS_DEG * rng.random_range(1.0..10.0);
        let b = a * (1.0 + delta);
        let p = rng.random_range(1.0..6.0);
        let diffs = [
            rel_err(
                branches::ln_identric_separated(a, b).exp(),
                branches::ln_identric_near(a, b).exp(),
            ),
            rel_err(
                branches::logarithmic_separated(a, b),
                branches::logarithmic_near(a, b),
            ),
            rel_err(
                branches::p_logarithmic_pow_separated(a, b, p),
                branches::p_logarithmic_pow_near(a, b, p),
            ),
        ];
        for d in diffs {
            worst = worst.max(d);
        }
    }
    ensure(worst <= 1e-10, || {
        format!("branch band disagreement {worst:.2e}")
    })?;
    ensure(means::near_equal(1.0, 1.0 + 0.5 * EPS_DEG), || {
        "near_equal band".into()
    })?;
    Ok(format!(
        "{} closed-form and {} quadrature anchors; {pairs} random pairs; band max rel diff {worst:.2e}",
        closed.len(),
        quad.len()
    ))
}

fn generators() -> Verdict {
    let mut worst: f64 = 0.0;
    let mut files = 0;
    for seed in 0..500u64 {
        let n = 1 + (seed % 8) as usize;
        let ds = random_doubly_stochastic(n, seed).map_err(|e| format!("seed {seed}: {e}"))?;
        let again = DoublyStochasticMatrix::new(ds.values().clone())
            .map_err(|e| format!("seed {seed}: {e}"))?;
        worst = worst.max(again.max_residual());
        ensure(again.max_residual() <= SINKHORN_TOL, || {
            format!("seed {seed}: residual {}", again.max_residual())
        })?;

        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        let m = rng.random_range(1..=MAX_DIM);
        let mu = ProbabilityVector::random(m, rng.random());
        let lambda = ProbabilityVector::random(n, rng.random());
        let u: Vec<f64> = (0..m).map(|_| rng.random_range(-2.0..2.0)).collect();
        let v: Vec<f64> = (0..n).map(|_| rng.random_range(-2.0..2.0)).collect();
        let w = rank_one_weight(&u, &v, &mu, &lambda).map_err(|e| format!("seed {seed}: {e}"))?;
        validate_weight(w.values().clone(), &mu, &lambda)
            .map_err(|e| format!("seed {seed}: {e}"))?;

        // Round trip through the instance file format.
        let file = InstanceFile {
            lambda: Some(lambda.weights().to_vec()),
            mu: Some(mu.weights().to_vec()),
            points: Some(Points::Scalars(
                (0..n).map(|_| rng.random_range(-3.0..3.0)).collect(),
            )),
            weights: Some(WeightsField {
                omega1: Some(WeightSpec::Matrix {
                    values: w.values().to_rows(),
                }),
                omega2: Some(WeightSpec::RankOne {
                    u: u.clone(),
                    v: v.clone(),
                }),
                ..Default::default()
            }),
            function: Some(jensen_refine_cli::instance::FunctionField {
                name: "exp".into(),
                params: Default::default(),
                direction: None,
            }),
            ..Default::default()
        };
        let back = InstanceFile::parse(&to_json(&file)).map_err(|e| format!("seed {seed}: {e}"))?;
        ensure(back == file, || {
            format!("seed {seed}: weight file changed in round trip")
        })?;
        back.jensen_instance()
            .map_err(|e| format!("seed {seed}: {e}"))?;

        let ds_file = InstanceFile {
            weights: Some(WeightsField {
                b: Some(ds.values().to_rows()),
                c: Some(ds.values().to_rows()),
                ..Default::default()
            }),
            ..Default::default()
        };
        let back =
            InstanceFile::parse(&to_json(&ds_file)).map_err(|e| format!("seed {seed}: {e}"))?;
        ensure(back == ds_file, || {
            format!("seed {seed}: matrix file changed in round trip")
        })?;
        back.matrices().map_err(|e| format!("seed {seed}: {e}"))?;
        files += 2;
    }
    Ok(format!(
        "500 Sinkhorn matrices (max residual {worst:.2e}), 500 rank-one weights; {files} files round-tripped bit-exactly"
    ))
}

fn main() {
    // libtest-style flags (e.g. --nocapture) are accepted and ignored; a
    // filter argument restricts the run to matching criterion names.
    let filter: Option<String> = std::env::args().skip(1).find(|a| !a.starts_with('-'));
    let criteria: [Criterion; 12] = [
        ("chain sandwich", sandwich),
        ("integral chain and closed form", integral_chain),
        ("phi convexity", convexity),
        ("hadamard chain", hadamard),
        ("agm", agm),
        ("ky fan", kyfan),
        ("lp norms", lp),
        ("power sums and matrix bounds", matrix_bounds),
        ("harmonic concave chain", harmonic),
        ("cesaro demonstration", cesaro),
        ("means unit suite", means_suite),
        ("generators", generators),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        if filter.as_ref().is_some_and(|f| !name.contains(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let mut verdict = run();
        let elapsed = start.elapsed();
        if verdict.is_ok() && elapsed > TIME_LIMIT {
            verdict = Err(format!("took {elapsed:.1?}, limit {TIME_LIMIT:?}"));
        }
        match verdict {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} [{elapsed:.2?}]", k + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {detail} [{elapsed:.2?}]", k + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
