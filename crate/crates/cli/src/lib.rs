//! Library side of the `jensen-refine` command: instance files, reports and
//! the three subcommands. `main.rs` only parses arguments and maps outcomes to
//! exit codes.

pub mod format;
pub mod instance;
pub mod report;

use std::fmt;
use std::fs;
use std::path::Path;

use jensen_refine::apps;
use jensen_refine::measures::{
    random_doubly_stochastic, random_weight, random_weight_with_amplitude,
};
use jensen_refine::refine::{
    chain_at_t, chain_hadamard, chain_integral, phi_convexity_check_with_tol, tighten, Tightened,
    DEFAULT_REL_TOL,
};
use jensen_refine::{ProbabilityVector, RefinementChain};
use serde::Serialize;

use instance::{Application, InstanceFile, WeightSpec};
use report::{NamedChain, Report};

/// Random `(t1, t2, alpha)` triples drawn by the convexity check in `verify`.
pub const CONVEXITY_TRIALS: usize = 100;

/// Process exit status: 0 all chains pass, 1 a chain violated tolerance,
/// 2 input or validation error.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exit {
    Pass = 0,
    Violation = 1,
    Input = 2,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub message: String,
}

impl CliError {
    pub fn input(message: impl Into<String>) -> Self {
        Self {
            message: message.into(),
        }
    }

    /// Prefix a core error with the file field it came from.
    pub fn context(field: &str) -> impl Fn(jensen_refine::Error) -> CliError + '_ {
        move |e| CliError::input(format!("{field}: {e}"))
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

impl From<jensen_refine::Error> for CliError {
    fn from(e: jensen_refine::Error) -> Self {
        CliError::input(e.to_string())
    }
}

#[derive(Debug, Clone, Default)]
pub struct VerifyOptions {
    pub rel_tol: Option<f64>,
    pub grid: Option<Vec<f64>>,
    pub seed: Option<u64>,
}

fn check_tol(tol: f64, flag: &str) -> Result<f64, CliError> {
    if tol.is_finite() && tol > 0.0 {
        Ok(tol)
    } else {
        Err(CliError::input(format!(
            "{flag}: must be a positive number, got {tol}"
        )))
    }
}

fn named(name: &str, chain: RefinementChain, rel_tol: f64) -> NamedChain {
    NamedChain {
        name: name.to_string(),
        chain: chain.with_rel_tol(rel_tol),
    }
}

/// Evaluate every chain the instance file asks for.
pub fn verify(file: &InstanceFile, opts: &VerifyOptions) -> Result<Report, CliError> {
    let rel_tol = check_tol(opts.rel_tol.unwrap_or(DEFAULT_REL_TOL), "--tol")?;
    let app = file.application();
    let single = |chain: apps::AppChain| {
        Report::new(app.name(), vec![named(app.name(), chain.chain, rel_tol)])
            .with_labels(chain.labels)
    };
    let report = match app {
        Application::Jensen => {
            let inst = file.jensen_instance()?;
            let grid = opts.grid.clone().unwrap_or_else(|| file.t_grid());
            let mut chains = vec![
                named("at_t", chain_at_t(&inst, &grid)?, rel_tol),
                named("integral", chain_integral(&inst)?, rel_tol),
            ];
            if let Some(hw) = file.hadamard()? {
                chains.push(named("hadamard", chain_hadamard(&inst, &hw)?, rel_tol));
            }
            let seed = opts.seed.or(file.seed).unwrap_or(0);
            let convexity = phi_convexity_check_with_tol(&inst, CONVEXITY_TRIALS, seed, rel_tol)?;
            Report::new(app.name(), chains).with_convexity(convexity)
        }
        Application::Agm => {
            let (w1, w2) = file.weight_pair()?;
            single(apps::agm_chain(&file.scalar_points()?, &w1, &w2)?)
        }
        Application::Kyfan => {
            let (w1, w2) = file.weight_pair()?;
            single(apps::kyfan_chain(&file.scalar_points()?, &w1, &w2)?)
        }
        Application::Powersum => {
            let (w1, w2) = file.weight_pair()?;
            single(apps::power_sum_chain(
                &file.scalar_points()?,
                file.exponent()?,
                &w1,
                &w2,
            )?)
        }
        Application::Lp => {
            let (w1, w2) = file.weight_pair()?;
            let fv = file.function_vector()?;
            let space = file.space(fv.space_len())?;
            single(apps::lp_chain(&fv, &space, file.exponent()?, &w1, &w2)?)
        }
        Application::Harmonic => {
            let (w1, w2) = file.weight_pair()?;
            let fv = file.function_vector()?;
            let space = file.space(fv.space_len())?;
            single(apps::harmonic_chain(&fv, &space, &w1, &w2)?)
        }
        Application::Matrixpower => {
            let p = file.exponent()?;
            if !(p >= 1.0 && p.fract() == 0.0 && p <= u32::MAX as f64) {
                return Err(CliError::input(format!(
                    "p: matrixpower needs a positive integer, got {p}"
                )));
            }
            let (b, c) = file.matrices()?;
            single(apps::matrix_power_bounds(&b, &c, p as u32)?)
        }
    };
    Ok(report)
}

/// Best `t` for a generic instance file.
pub fn tighten_file(file: &InstanceFile, tol_t: f64) -> Result<Tightened, CliError> {
    if file.application() != Application::Jensen {
        return Err(CliError::input(format!(
            "application: tighten works on generic instances, got {}",
            file.application().name()
        )));
    }
    let tol_t = check_tol(tol_t, "--tol-t")?;
    Ok(tighten(&file.jensen_instance()?, tol_t)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GenerateKind {
    /// Doubly stochastic matrix of order `n`.
    Ds,
    /// Weight function over `(mu, lambda)` of shape `m x n`.
    Weight,
}

#[derive(Debug, Clone)]
pub struct GenerateOptions {
    pub kind: GenerateKind,
    pub n: usize,
    pub m: Option<usize>,
    pub seed: u64,
    pub amplitude: Option<f64>,
    pub mu: Option<Vec<f64>>,
    pub lambda: Option<Vec<f64>>,
}

/// A block that pastes directly into an instance file: a matrix for `B`/`C`
/// or a `{kind: "matrix", values}` weight for `omega1`/`omega2`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Generated {
    Matrix(Vec<Vec<f64>>),
    Weight(WeightSpec),
}

pub fn generate(opts: &GenerateOptions) -> Result<Generated, CliError> {
    if opts.n == 0 {
        return Err(CliError::input("--n: must be positive"));
    }
    match opts.kind {
        GenerateKind::Ds => Ok(Generated::Matrix(
            random_doubly_stochastic(opts.n, opts.seed)?
                .values()
                .to_rows(),
        )),
        GenerateKind::Weight => {
            let m = opts.m.unwrap_or(opts.n);
            if m == 0 {
                return Err(CliError::input("--m: must be positive"));
            }
            let measure = |name: &str, given: &Option<Vec<f64>>, len: usize| match given {
                Some(v) if v.len() != len => Err(CliError::input(format!(
                    "--{name}: has {} entries, expected {len}",
                    v.len()
                ))),
                Some(v) => Ok(ProbabilityVector::named(&format!("--{name}"), v.clone())?),
                None => Ok(ProbabilityVector::uniform(len)),
            };
            let mu = measure("mu", &opts.mu, m)?;
            let lambda = measure("lambda", &opts.lambda, opts.n)?;
            let w = match opts.amplitude {
                Some(a) => random_weight_with_amplitude(&mu, &lambda, opts.seed, a)
                    .map_err(CliError::context("--amplitude"))?,
                None => random_weight(&mu, &lambda, opts.seed),
            };
            Ok(Generated::Weight(WeightSpec::Matrix {
                values: w.values().to_rows(),
            }))
        }
    }
}

/// Write `text` to `path` via a sibling temporary file and a rename, or to
/// standard output when `path` is `None`.
pub fn emit(text: &str, path: Option<&Path>) -> Result<(), CliError> {
    let Some(path) = path else {
        print!("{text}");
        return Ok(());
    };
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let fail =
        |e: std::io::Error| CliError::input(format!("--out: cannot write {}: {e}", path.display()));
    fs::write(&tmp, text).map_err(fail)?;
    fs::rename(&tmp, path).map_err(|e| {
        let _ = fs::remove_file(&tmp);
        fail(e)
    })
}

pub fn read_instance(path: &Path) -> Result<InstanceFile, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::input(format!("cannot read {}: {e}", path.display())))?;
    InstanceFile::parse(&text).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}
