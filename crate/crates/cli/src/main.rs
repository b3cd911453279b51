use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use jensen_refine_cli::format::to_json;
use jensen_refine_cli::{
    emit, generate, read_instance, tighten_file, verify, CliError, Exit, GenerateKind,
    GenerateOptions, VerifyOptions,
};

#[derive(Parser)]
#[command(
    name = "jensen-refine",
    version,
    about = "Verify weighted refinements of Jensen's inequality"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    /// Doubly stochastic matrix (Sinkhorn-normalized random start)
    Ds,
    /// Weight function over (mu, lambda)
    Weight,
}

#[derive(Subcommand)]
enum Command {
    /// Check every chain the instance file describes and print a report.
    Verify {
        file: PathBuf,
        /// Relative chain tolerance
        #[arg(long)]
        tol: Option<f64>,
        /// Comma-separated t values, overriding the file's t_grid
        #[arg(long, value_delimiter = ',')]
        grid: Option<Vec<f64>>,
        /// Seed for the convexity trials, overriding the file's seed
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print a random doubly stochastic matrix or weight block.
    Generate {
        kind: Kind,
        #[arg(long)]
        n: usize,
        /// Rows of a weight (defaults to n)
        #[arg(long)]
        m: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Distance from the all-ones weight in [0, 1]; drawn from the seed when absent
        #[arg(long)]
        amplitude: Option<f64>,
        #[arg(long, value_delimiter = ',')]
        mu: Option<Vec<f64>>,
        #[arg(long, value_delimiter = ',')]
        lambda: Option<Vec<f64>>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Find the t giving the tightest middle member.
    Tighten {
        file: PathBuf,
        /// Width of the final t bracket
        #[arg(long = "tol-t", default_value_t = 1e-9)]
        tol_t: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> Result<Exit, CliError> {
    match cli.command {
        Command::Verify {
            file,
            tol,
            grid,
            seed,
            out,
        } => {
            let instance = read_instance(&file)?;
            let report = verify(
                &instance,
                &VerifyOptions {
                    rel_tol: tol,
                    grid,
                    seed,
                },
            )?;
            emit(&to_json(&report), out.as_deref())?;
            if !report.pass {
                for w in &report.witnesses {
                    let at = w
                        .witness
                        .t
                        .map(|t| format!(" at t = {t}"))
                        .unwrap_or_default();
                    eprintln!(
                        "violation in {}: {}{at}, slack {:e}",
                        w.chain, w.witness.relation, w.witness.slack
                    );
                }
                for c in report.identity_checks.iter().filter(|c| !c.check.ok) {
                    eprintln!(
                        "identity {}.{} off by {:e}",
                        c.chain, c.check.name, c.check.rel_err
                    );
                }
                if let Some(conv) = report.convexity.as_ref().filter(|c| !c.pass) {
                    eprintln!(
                        "phi convexity failed on {} of {} trials",
                        conv.witnesses.len(),
                        conv.trials
                    );
                }
                return Ok(Exit::Violation);
            }
            Ok(Exit::Pass)
        }
        Command::Generate {
            kind,
            n,
            m,
            seed,
            amplitude,
            mu,
            lambda,
            out,
        } => {
            let block = generate(&GenerateOptions {
                kind: match kind {
                    Kind::Ds => GenerateKind::Ds,
                    Kind::Weight => GenerateKind::Weight,
                },
                n,
                m,
                seed,
                amplitude,
                mu,
                lambda,
            })?;
            emit(&to_json(&block), out.as_deref())?;
            Ok(Exit::Pass)
        }
        Command::Tighten { file, tol_t, out } => {
            let best = tighten_file(&read_instance(&file)?, tol_t)?;
            emit(&to_json(&best), out.as_deref())?;
            Ok(Exit::Pass)
        }
    }
}

fn main() -> ExitCode {
    // clap exits with status 2 on usage errors and 0 for --help/--version.
    let cli = Cli::parse();
    let code = match run(cli) {
        Ok(exit) => exit,
        Err(e) => {
            eprintln!("error: {e}");
            Exit::Input
        }
    };
    ExitCode::from(code as u8)
}
