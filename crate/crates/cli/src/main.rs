//! `gravloop`: loop sweeps, COW evaluation, Deutsch-Jozsa corruption maps
//! and the invariant suite.
//!
//! Exit codes: 0 success, 1 verification failure, 2 input or config error,
//! 3 numerical error (pole, or a loop series that does not converge).

mod commands;
mod parse;
mod report;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use commands::{
    cmd_cow, cmd_dj, cmd_loop, cmd_verify, CliError, CowParams, DjParams, FunctionSpec, LoopParams,
    LoopU, NamedFunction, Outcome, PhiSweep, VerifyParams,
};
use report::Format;

#[derive(Parser, Debug)]
#[command(
    name = "gravloop",
    version,
    about = "Gravitational phases in a looped interferometer"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,

    /// Worker threads for sweeps (default: available cores).
    #[arg(long, global = true)]
    workers: Option<usize>,

    /// Override the pass mark of tolerance-based checks.
    #[arg(long, global = true, value_parser = positive)]
    tolerance: Option<f64>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FunctionArg {
    Constant0,
    Constant1,
    FirstBit,
    Parity,
}

#[derive(Clone, Copy, Debug)]
struct Pair(f64, f64);

fn pair(s: &str) -> Result<Pair, String> {
    parse::complex_pair(s).map(|(re, im)| Pair(re, im))
}

fn positive(s: &str) -> Result<f64, String> {
    let x = parse::finite_f64(s)?;
    if x > 0.0 {
        Ok(x)
    } else {
        Err(format!("expected a positive number, got {s:?}"))
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Partial sums of the loop series and their approach to the limit.
    Loop {
        #[arg(long, value_parser = parse::finite_f64)]
        alpha: f64,
        /// Loop phase in radians (`pi/4` style accepted).
        #[arg(long, value_parser = parse::angle, allow_hyphen_values = true,
              required_unless_present = "u_complex", conflicts_with = "u_complex")]
        u_angle: Option<f64>,
        /// Raw loop factor `re,im`.
        #[arg(long, value_parser = pair, allow_hyphen_values = true)]
        u_complex: Option<Pair>,
        #[arg(long, default_value_t = 30)]
        n_max: u32,
    },
    /// Arm phases and output amplitude of a mass particle in the loop.
    Cow {
        #[arg(long)]
        config: PathBuf,
    },
    /// Deutsch-Jozsa success probability over a range of perturbing phases.
    Dj {
        #[arg(long, requires = "function")]
        n: Option<usize>,
        #[arg(long, value_enum, requires = "n")]
        function: Option<FunctionArg>,
        /// Truth table file `{"n": .., "table": "<hex>"}`.
        #[arg(long, conflicts_with_all = ["n", "function"], required_unless_present = "function")]
        table: Option<PathBuf>,
        #[arg(long, value_parser = parse::angle, allow_hyphen_values = true,
              conflicts_with_all = ["phi_start", "phi_end", "phi_step"])]
        phi: Option<f64>,
        #[arg(long, value_parser = parse::angle, allow_hyphen_values = true, default_value = "0")]
        phi_start: f64,
        #[arg(long, value_parser = parse::angle, allow_hyphen_values = true, default_value = "pi")]
        phi_end: f64,
        #[arg(long, value_parser = parse::angle, default_value = "pi/8")]
        phi_step: f64,
    },
    /// Run every module invariant; exit 1 if any fails.
    Verify {
        /// Extra loop factor `re,im` fed to the unitarity check.
        #[arg(long, value_parser = pair, allow_hyphen_values = true)]
        inject_u: Option<Pair>,
    },
}

fn dispatch(cli: &Cli) -> Result<Outcome, CliError> {
    let tolerance = cli.tolerance;
    match &cli.command {
        Command::Loop {
            alpha,
            u_angle,
            u_complex,
            n_max,
        } => {
            let u = match (u_angle, u_complex) {
                (Some(phi), _) => LoopU::Angle(*phi),
                (None, Some(Pair(re, im))) => LoopU::Complex(*re, *im),
                (None, None) => {
                    return Err(CliError::Config(
                        "one of --u-angle or --u-complex is required".into(),
                    ))
                }
            };
            cmd_loop(&LoopParams {
                alpha: *alpha,
                u,
                n_max: *n_max,
                tolerance,
            })
        }
        Command::Cow { config } => cmd_cow(&CowParams {
            config: config.clone(),
            tolerance,
        }),
        Command::Dj {
            n,
            function,
            table,
            phi,
            phi_start,
            phi_end,
            phi_step,
        } => {
            let function = match (table, n, function) {
                (Some(path), _, _) => FunctionSpec::Table(path.clone()),
                (None, Some(n), Some(f)) => FunctionSpec::Named {
                    n: *n,
                    function: match f {
                        FunctionArg::Constant0 => NamedFunction::Constant0,
                        FunctionArg::Constant1 => NamedFunction::Constant1,
                        FunctionArg::FirstBit => NamedFunction::FirstBit,
                        FunctionArg::Parity => NamedFunction::Parity,
                    },
                },
                _ => {
                    return Err(CliError::Config(
                        "give --table, or both --n and --function".into(),
                    ))
                }
            };
            let sweep = match phi {
                Some(p) => PhiSweep::Single(*p),
                None => PhiSweep::Range {
                    start: *phi_start,
                    end: *phi_end,
                    step: *phi_step,
                },
            };
            let workers = match cli.workers {
                Some(0) => return Err(CliError::Config("--workers must be at least 1".into())),
                Some(k) => k,
                None => std::thread::available_parallelism().map_or(1, |n| n.get()),
            };
            cmd_dj(&DjParams {
                function,
                sweep,
                workers,
                tolerance,
            })
        }
        Command::Verify { inject_u } => cmd_verify(&VerifyParams {
            inject_u: inject_u.map(|Pair(re, im)| (re, im)),
            tolerance,
        }),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match dispatch(&cli) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let format = match cli.format {
        FormatArg::Csv => Format::Csv,
        FormatArg::Json => Format::Json,
    };
    let text = outcome.report.render(format);
    let written = match &cli.output {
        Some(path) => {
            fs::write(path, &text).map_err(|e| format!("cannot write {}: {e}", path.display()))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    };
    if let Err(msg) = written {
        eprintln!("error: {msg}");
        return ExitCode::from(2);
    }
    match outcome.failure {
        Some(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
        None => ExitCode::SUCCESS,
    }
}
