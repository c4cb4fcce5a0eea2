use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use splitchain::commands::{
    self, raw_drift, write_json, BoundsInput, PerfectAlgo, RunOutput, Start,
};
use splitchain::spec_file::ModelSpecFile;
use splitchain::{Error, Result, Strategy};

#[derive(Parser)]
#[command(name = "splitchain", version, about = "Stationary sampling through split-chain regeneration")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Model specification file (JSON).
    #[arg(long)]
    spec: Option<PathBuf>,
    /// Master seed; overrides the spec's "seed".
    #[arg(long)]
    seed: Option<u64>,
    /// Samples (or trajectory) output path.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Report output path.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Algo {
    Multigamma,
    ReadOnce,
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    Forward,
    Retrospective,
}

impl From<StrategyArg> for Strategy {
    fn from(s: StrategyArg) -> Self {
        match s {
            StrategyArg::Forward => Strategy::Forward,
            StrategyArg::Retrospective => Strategy::Retrospective,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Exact draws from the stationary law.
    Perfect {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value = "multigamma")]
        algo: Algo,
        #[arg(long, default_value_t = 10_000)]
        n: usize,
    },
    /// Draws from the truncated mixture within TV gamma of the stationary law.
    Approx {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        gamma: f64,
        #[arg(long, default_value_t = 10_000)]
        n: usize,
        #[arg(long, value_enum, default_value = "forward")]
        strategy: StrategyArg,
    },
    /// Plan the truncation level M from drift constants.
    Bounds {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        gamma: f64,
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long)]
        lambda: Option<f64>,
        #[arg(long)]
        b: Option<f64>,
        #[arg(long)]
        d: Option<f64>,
        #[arg(long)]
        a: Option<f64>,
        #[arg(long)]
        nu_v: Option<f64>,
        /// Last t of the (t, bound) curve.
        #[arg(long, default_value_t = 100)]
        t_max: u64,
    },
    /// Run the plain chain from a point or from a truncated-mixture draw.
    McmcRun {
        #[command(flatten)]
        common: Common,
        /// Start at this state instead of drawing from the truncated mixture.
        #[arg(long, conflicts_with = "gamma")]
        start: Option<String>,
        /// Budget for the truncated-mixture start.
        #[arg(long)]
        gamma: Option<f64>,
        #[arg(long, default_value_t = 1_000)]
        steps: usize,
        #[arg(long, value_enum, default_value = "forward")]
        strategy: StrategyArg,
    },
    /// Run the oracle-backed checks on a shipped fixture.
    Verify {
        #[command(flatten)]
        common: Common,
        /// One of figure1, drift5, figure1-corrupted.
        #[arg(long, default_value = "figure1")]
        fixture: String,
    },
}

struct Loaded {
    spec: ModelSpecFile,
    seed: u64,
    out: Option<PathBuf>,
    report: Option<PathBuf>,
}

fn load(common: &Common) -> Result<Loaded> {
    let path = common
        .spec
        .as_ref()
        .ok_or_else(|| Error::InvalidArgument("--spec is required".into()))?;
    let spec = ModelSpecFile::load(path)?;
    Ok(Loaded {
        seed: common.seed.or(spec.seed).unwrap_or(0),
        out: common.out.clone().or_else(|| spec.output.samples.as_ref().map(PathBuf::from)),
        report: common.report.clone().or_else(|| spec.output.report.as_ref().map(PathBuf::from)),
        spec,
    })
}

fn emit_text(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => Ok(std::fs::write(p, text)?),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn emit_json(path: Option<&Path>, value: &impl serde::Serialize) -> Result<()> {
    match path {
        Some(p) => write_json(p, value),
        None => {
            println!("{}", serde_json::to_string_pretty(value)?);
            Ok(())
        }
    }
}

fn emit_run(l: &Loaded, run: &RunOutput) -> Result<()> {
    emit_text(l.out.as_deref(), &run.samples.to_text())?;
    emit_json(l.report.as_deref(), &run.report)
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Perfect { common, algo, n } => {
            let l = load(&common)?;
            let algo = match algo {
                Algo::Multigamma => PerfectAlgo::Multigamma,
                Algo::ReadOnce => PerfectAlgo::ReadOnce,
            };
            emit_run(&l, &commands::cmd_perfect(&l.spec.model, algo, n, l.seed)?)?;
        }
        Command::Approx { common, gamma, n, strategy } => {
            let l = load(&common)?;
            emit_run(&l, &commands::cmd_approx(&l.spec.model, gamma, n, strategy.into(), l.seed)?)?;
        }
        Command::Bounds { common, gamma, epsilon, lambda, b, d, a, nu_v, t_max } => {
            let input = match (&common.spec, epsilon, lambda, b, a) {
                (Some(path), None, None, None, None) => BoundsInput::Spec(ModelSpecFile::load(path)?.model),
                (None, Some(epsilon), Some(lambda), Some(b), Some(a)) => BoundsInput::Raw {
                    epsilon,
                    drift: raw_drift(lambda, b, d.unwrap_or(f64::NAN), a, nu_v),
                },
                _ => {
                    return Err(Error::InvalidArgument(
                        "give --spec, or all of --epsilon --lambda --b --a".into(),
                    ))
                }
            };
            let out = commands::cmd_bounds(&input, gamma, t_max)?;
            emit_text(common.out.as_deref(), &out.curve_csv())?;
            emit_json(common.report.as_deref(), &out.document)?;
        }
        Command::McmcRun { common, start, gamma, steps, strategy } => {
            let l = load(&common)?;
            let start = match (start, gamma) {
                (Some(x), _) => Start::Point(x),
                (None, Some(gamma)) => Start::PiTilde { gamma },
                (None, None) => return Err(Error::InvalidArgument("give --start or --gamma".into())),
            };
            emit_run(&l, &commands::cmd_mcmc_run(&l.spec.model, &start, steps, strategy.into(), l.seed)?)?;
        }
        Command::Verify { common, fixture } => {
            let report = commands::cmd_verify(&fixture, common.seed.unwrap_or(0))?;
            emit_json(common.report.as_deref(), &report)?;
            return Ok(report.passed);
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    let started = Instant::now();
    let outcome = run(Cli::parse());
    eprintln!("wall-clock: {:.3} s", started.elapsed().as_secs_f64());
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("verification failed");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
