use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use alpha_mi::cli::{self, CliError, Context, Units};
use alpha_mi::leakage::Representation;
use alpha_mi::verify::{self, Fault, VerifyOptions};
use alpha_mi::{Measure, SolverConfig};

#[derive(Parser)]
#[command(name = "alpha-mi", version, about = "α-mutual informations and leakage representations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Report units; values are computed in nats.
    #[arg(long, default_value = "nats")]
    units: Units,
    /// Reject inputs whose entries do not sum to one within 1e-9.
    #[arg(long)]
    strict_normalization: bool,
    #[arg(long, default_value_t = 10_000)]
    max_iter: usize,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    /// Seed for randomized solver restarts and verification ensembles.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl Common {
    fn context(&self) -> Result<Context, CliError> {
        if self.max_iter == 0 {
            return Err(CliError::Usage("--max-iter must be at least 1".into()));
        }
        if !(self.tol > 0.0) {
            return Err(CliError::Usage("--tol must be positive".into()));
        }
        Ok(Context {
            cfg: SolverConfig {
                max_iterations: self.max_iter,
                objective_tolerance: self.tol,
                seed: self.seed,
                ..SolverConfig::default()
            },
            units: self.units,
            strict_normalization: self.strict_normalization,
        })
    }
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the measures at one order.
    Measure {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        alpha: f64,
        /// Comma-separated: shannon,sibson,arimoto,ac,hayashi,lp (default all).
        #[arg(long, default_value = "all")]
        measures: String,
        #[command(flatten)]
        common: Common,
    },
    /// Evaluate the measures on a geometric grid of orders, one JSON line each.
    Sweep {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        alpha_start: f64,
        #[arg(long)]
        alpha_end: f64,
        #[arg(long)]
        steps: usize,
        #[arg(long, default_value = "all")]
        measures: String,
        #[command(flatten)]
        common: Common,
    },
    /// Leakage representations and their residuals against the matched measure.
    Leakage {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        alpha: f64,
        /// Comma-separated representation ids (default all).
        #[arg(long, default_value = "all")]
        representations: String,
        #[command(flatten)]
        common: Common,
    },
    /// Run the randomized self-verification suite.
    Verify {
        #[arg(long, default_value_t = 100)]
        trials: usize,
        /// Comma-separated alphabet sizes.
        #[arg(long, default_value = "2,3,4,5")]
        sizes: String,
        /// Comma-separated orders.
        #[arg(long, default_value = "0.3,0.55,0.9,0.99,1.01,1.5,2,5,20")]
        alphas: String,
        #[arg(long, hide = true)]
        inject_fault: Option<Fault>,
        #[command(flatten)]
        common: Common,
    },
}

fn numbers<T: std::str::FromStr>(s: &str, flag: &str) -> Result<Vec<T>, CliError> {
    let v: Vec<T> = s
        .split(',')
        .map(|t| t.trim().parse().map_err(|_| CliError::Usage(format!("bad value `{t}` in --{flag}"))))
        .collect::<Result<_, _>>()?;
    if v.is_empty() {
        return Err(CliError::Usage(format!("--{flag} is empty")));
    }
    Ok(v)
}

fn emit<T: serde::Serialize>(value: &T, pretty: bool) -> Result<(), CliError> {
    let text = if pretty {
        serde_json::to_string_pretty(value)
    } else {
        serde_json::to_string(value)
    }
    .map_err(|e| CliError::Parse(e.to_string()))?;
    let mut out = std::io::stdout().lock();
    writeln!(out, "{text}").map_err(|e| CliError::Io {
        path: "stdout".into(),
        message: e.to_string(),
    })
}

fn run(command: Command) -> Result<ExitCode, CliError> {
    match command {
        Command::Measure {
            input,
            alpha,
            measures,
            common,
        } => {
            let ctx = common.context()?;
            let spec = cli::parse_input(&input, ctx.policy())?;
            let measures: Vec<Measure> = cli::parse_list(&measures)?;
            emit(&cli::cmd_measure(&spec, alpha, &measures, &ctx)?, true)?;
        }
        Command::Sweep {
            input,
            alpha_start,
            alpha_end,
            steps,
            measures,
            common,
        } => {
            let ctx = common.context()?;
            let spec = cli::parse_input(&input, ctx.policy())?;
            let measures: Vec<Measure> = cli::parse_list(&measures)?;
            for report in cli::cmd_sweep(&spec, alpha_start, alpha_end, steps, &measures, &ctx)? {
                emit(&report, false)?;
            }
        }
        Command::Leakage {
            input,
            alpha,
            representations,
            common,
        } => {
            let ctx = common.context()?;
            let spec = cli::parse_input(&input, ctx.policy())?;
            let reps: Vec<Representation> = cli::parse_list(&representations)?;
            emit(&cli::cmd_leakage(&spec, alpha, &reps, &ctx)?, true)?;
        }
        Command::Verify {
            trials,
            sizes,
            alphas,
            inject_fault,
            common,
        } => {
            if trials == 0 {
                return Err(CliError::Usage("--trials must be at least 1".into()));
            }
            let ctx = common.context()?;
            let sizes: Vec<usize> = numbers(&sizes, "sizes")?;
            if sizes.iter().any(|&n| n == 0) {
                return Err(CliError::Usage("--sizes entries must be positive".into()));
            }
            let alphas: Vec<f64> = numbers(&alphas, "alphas")?;
            if alphas.iter().any(|&a| !(a > 0.0) || !a.is_finite()) {
                return Err(CliError::Usage("--alphas entries must be positive and finite".into()));
            }
            let report = verify::run(&VerifyOptions {
                trials,
                seed: common.seed,
                sizes,
                alphas,
                cfg: ctx.cfg,
                fault: inject_fault,
            });
            emit(&report, true)?;
            if !report.passed {
                for f in &report.failures {
                    eprintln!(
                        "verification failed: {} (trial {}); replay with --seed {} --trials 1",
                        f.check, f.trial, f.replay_seed
                    );
                }
                return Ok(ExitCode::from(1));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(64),
            };
        }
    };
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
