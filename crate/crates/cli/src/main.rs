//! `qfef`: analyze, sweep and verify bipartite states from the command line.

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qfef::fef::{OptimizeOptions, DEFAULT_MAX_ITERS, DEFAULT_RESTARTS, DEFAULT_SEED, DEFAULT_TOL};
use qfef::report::{analyze, fef_section, sweep, AnalyzeOptions};
use qfef::spec::parse_list;
use qfef::verify::{run, Suite, VerifyConfig};
use qfef::workcost::ThermoContext;
use qfef::{make_state, Error, Family, StateSpec};

const EXIT_INVALID_STATE: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_VERIFY_FAILED: u8 = 3;

#[derive(Parser)]
#[command(
    name = "qfef",
    version,
    about = "Conditional entropies and fully entangled fraction of bipartite states"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Report entropies, FEF, bounds, k-copy and work-cost quantities for one state.
    Analyze {
        #[command(flatten)]
        state: StateArgs,
        #[command(flatten)]
        opt: OptArgs,
        #[command(flatten)]
        thermo: ThermoArgs,
        /// Rényi/Tsallis order.
        #[arg(long, default_value_t = 2.0)]
        alpha: f64,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        /// Write to this file instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sweep one parameter and emit a CSV table.
    Sweep {
        #[command(flatten)]
        state: StateArgs,
        #[command(flatten)]
        opt: OptArgs,
        /// Parameter name (e.g. p, F, x, t1) or index.
        #[arg(long)]
        param: String,
        #[arg(long)]
        from: f64,
        #[arg(long)]
        to: f64,
        #[arg(long, default_value_t = 101)]
        steps: usize,
        #[arg(long, default_value_t = 2.0)]
        alpha: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run verification suites; exits 3 if any check fails.
    Verify {
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Random draws per theorem.
        #[arg(long, default_value_t = VerifyConfig::default().draws)]
        draws: usize,
        #[arg(long, default_value_t = DEFAULT_RESTARTS)]
        restarts: usize,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fully entangled fraction: closed forms and the optimizer.
    Fef {
        #[command(flatten)]
        state: StateArgs,
        #[command(flatten)]
        opt: OptArgs,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct StateArgs {
    #[arg(long)]
    family: String,
    /// Local dimension; inferred where the family or parameter count fixes it.
    #[arg(long)]
    d: Option<usize>,
    /// Comma-separated parameters.
    #[arg(long, allow_hyphen_values = true)]
    params: String,
}

#[derive(Args)]
struct OptArgs {
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_RESTARTS)]
    restarts: usize,
    #[arg(long, default_value_t = DEFAULT_MAX_ITERS)]
    max_iters: usize,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
}

#[derive(Args)]
struct ThermoArgs {
    #[arg(long, value_enum, default_value_t = Units::Si)]
    units: Units,
    /// Temperature in kelvin (SI units only).
    #[arg(long, default_value_t = qfef::workcost::ROOM_TEMPERATURE)]
    temperature: f64,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum Units {
    Si,
    Natural,
}

/// A failure carrying its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(e: impl ToString) -> Self {
        Self {
            code: EXIT_USAGE,
            message: e.to_string(),
        }
    }

    fn state(e: Error) -> Self {
        Self {
            code: EXIT_INVALID_STATE,
            message: e.to_string(),
        }
    }
}

impl OptArgs {
    fn options(&self) -> Result<OptimizeOptions, Failure> {
        if self.restarts == 0 {
            return Err(Failure::usage("--restarts must be at least 1"));
        }
        Ok(OptimizeOptions {
            restarts: self.restarts,
            max_iters: self.max_iters,
            tol: self.tol,
            seed: self.seed,
        })
    }
}

impl ThermoArgs {
    fn context(&self) -> Result<ThermoContext, Failure> {
        let ctx = match self.units {
            Units::Si => ThermoContext::si(self.temperature),
            Units::Natural => ThermoContext::natural(),
        };
        ctx.validate().map_err(Failure::usage)?;
        Ok(ctx)
    }
}

fn infer_dimension(family: Family, d: Option<usize>, n: usize) -> Result<usize, Failure> {
    if let Some(d) = d.or(family.fixed_dimension()) {
        return Ok(d);
    }
    let root = |m: usize| (1..=m).find(|k| k * k >= m).filter(|k| k * k == m);
    let guess = match family {
        Family::GenBell => root(n),
        Family::WeylD => root(n + 1),
        Family::NoisySchmidt => n.checked_sub(1),
        _ => None,
    };
    guess.ok_or_else(|| Failure::usage(format!("{family} needs --d")))
}

fn parse_spec(args: &StateArgs) -> Result<StateSpec, Failure> {
    let family: Family = args.family.parse().map_err(Failure::usage)?;
    let params = parse_list(&args.params).map_err(Failure::usage)?;
    let d = infer_dimension(family, args.d, params.len())?;
    StateSpec::new(family, d, params).map_err(Failure::usage)
}

fn emit(text: &str, out: &Option<PathBuf>) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, text)
            .map_err(|e| Failure::usage(format!("cannot write {}: {e}", path.display()))),
        None => io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Failure::usage(e.to_string())),
    }
}

fn with_newline(mut s: String) -> String {
    if !s.ends_with('\n') {
        s.push('\n');
    }
    s
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(raw) = std::env::var("QFEF_THREADS") else {
        return Ok(());
    };
    let n: usize = raw.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
        Failure::usage(format!(
            "QFEF_THREADS must be a positive integer, got '{raw}'"
        ))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(Failure::usage)
}

fn execute(cli: Cli) -> Result<(), Failure> {
    configure_threads()?;
    match cli.command {
        Command::Analyze {
            state,
            opt,
            thermo,
            alpha,
            format,
            out,
        } => {
            let spec = parse_spec(&state)?;
            let opts = AnalyzeOptions {
                alpha,
                optimize: opt.options()?,
                thermo: thermo.context()?,
            };
            let report = analyze(&spec, &opts).map_err(|e| match e {
                Error::InvalidAlpha(_) => Failure::usage(e),
                other => Failure::state(other),
            })?;
            let text = match format {
                Format::Json => report.to_json(),
                Format::Text => report.to_text(),
            };
            emit(&with_newline(text), &out)
        }
        Command::Sweep {
            state,
            opt,
            param,
            from,
            to,
            steps,
            alpha,
            out,
        } => {
            let spec = parse_spec(&state)?;
            spec.param_index(&param).map_err(Failure::usage)?;
            if steps < 2 || !(from < to) {
                return Err(Failure::usage("sweep needs --steps >= 2 and --from < --to"));
            }
            let opts = AnalyzeOptions {
                alpha,
                optimize: opt.options()?,
                ..AnalyzeOptions::default()
            };
            let table = sweep(&spec, &param, from, to, steps, &opts).map_err(|e| match e {
                Error::InvalidAlpha(_) => Failure::usage(e),
                other => Failure::state(other),
            })?;
            emit(&table.to_csv().map_err(Failure::usage)?, &out)
        }
        Command::Verify {
            suite,
            seed,
            draws,
            restarts,
            format,
            out,
        } => {
            let suite: Suite = suite.parse().map_err(Failure::usage)?;
            if restarts == 0 {
                return Err(Failure::usage("--restarts must be at least 1"));
            }
            let report = run(
                suite,
                &VerifyConfig {
                    seed,
                    draws,
                    restarts,
                },
            );
            let text = match format {
                Format::Json => report.to_json(),
                Format::Text => report.to_text(),
            };
            emit(&with_newline(text), &out)?;
            if report.passed {
                Ok(())
            } else {
                Err(Failure {
                    code: EXIT_VERIFY_FAILED,
                    message: "verification failed".into(),
                })
            }
        }
        Command::Fef {
            state,
            opt,
            format,
            out,
        } => {
            let spec = parse_spec(&state)?;
            let rho = make_state::<f64>(&spec).map_err(Failure::state)?;
            let section = fef_section(&rho, &spec, &opt.options()?).map_err(Failure::state)?;
            let text = match format {
                Format::Json => serde_json::to_string_pretty(&section).map_err(Failure::usage)?,
                Format::Text => {
                    let mut s = format!("state: {spec}\n");
                    for (name, r) in [
                        ("closed", &section.closed),
                        ("corr_tensor", &section.corr_tensor),
                        ("trace_norm", &section.trace_norm),
                    ] {
                        if let Some(r) = r {
                            s.push_str(&format!("{name:<12} {:.12}\n", r.value));
                        }
                    }
                    s.push_str(&format!(
                        "{:<12} {:.12} (restarts {}, converged {})\n",
                        "optimized",
                        section.optimized.value,
                        section.optimized.restarts_used,
                        section.optimized.converged
                    ));
                    s
                }
            };
            emit(&with_newline(text), &out)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
