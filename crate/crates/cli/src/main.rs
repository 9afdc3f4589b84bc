use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use cslab::logic::{countermodel_search, parse, GMode, LogicError};
use cslab::subject::session::Session;
use cslab_cli::omega_csv::{MAX_NU, MAX_SAMPLES};
use cslab_cli::scenario::{trace_validity, ScenarioError};

#[derive(Parser)]
#[command(name = "cslab", version, about = "Creating-subject construction laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a scenario file.
    Run { file: PathBuf },
    /// Sample the omega family and its tangents into a CSV file.
    OmegaCsv {
        #[arg(long)]
        nu_max: u32,
        #[arg(long)]
        samples: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Interactive stage stepper on stdin/stdout.
    Repl,
    #[command(subcommand)]
    Logic(LogicCmd),
}

#[derive(Subcommand)]
enum LogicCmd {
    /// Validity over all schedules (trace) or forcing at the root of the evidence tree (branching).
    Check {
        formula: String,
        #[arg(long, value_enum, default_value_t = Mode::Trace)]
        mode: Mode,
        #[arg(long, default_value_t = 4)]
        horizon: usize,
        #[arg(long, default_value = "all")]
        g_mode: String,
    },
    /// Search finite evidence trees for a world refusing the formula.
    Countermodel {
        formula: String,
        #[arg(long, default_value_t = 31)]
        max_worlds: usize,
        #[arg(long, default_value = "all")]
        g_mode: String,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Trace,
    Branching,
}

fn usage(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(2)
}

fn verdict(pass: bool) -> ExitCode {
    ExitCode::from(if pass { 0 } else { 1 })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Cmd::Run { file } => match cslab_cli::run_scenario(&file) {
            Ok(report) => {
                println!("{report}");
                verdict(report.passed())
            }
            Err(e @ (ScenarioError::Io(_) | ScenarioError::Json(_) | ScenarioError::Schema(_))) => usage(e),
        },
        Cmd::OmegaCsv { nu_max, samples, out } => {
            if nu_max == 0 || nu_max > MAX_NU || samples == 0 || samples > MAX_SAMPLES {
                return usage(format!("need 1 <= nu-max <= {MAX_NU} and 1 <= samples <= {MAX_SAMPLES}"));
            }
            match cslab_cli::emit_omega_csv(nu_max, samples, &out) {
                Ok(()) => ExitCode::SUCCESS,
                Err(e) => usage(e),
            }
        }
        Cmd::Repl => {
            let stdin = std::io::stdin();
            match cslab_cli::repl::run_repl(stdin.lock(), std::io::stdout(), &mut Session::default()) {
                Ok(()) => ExitCode::SUCCESS,
                Err(e) => usage(e),
            }
        }
        Cmd::Logic(cmd) => logic(cmd),
    }
}

fn logic(cmd: LogicCmd) -> ExitCode {
    let (text, g_mode) = match &cmd {
        LogicCmd::Check { formula, g_mode, .. } | LogicCmd::Countermodel { formula, g_mode, .. } => (formula, g_mode),
    };
    let phi = match parse(text) {
        Ok(phi) => phi,
        Err(e) => return usage(e),
    };
    let g_mode: GMode = match g_mode.parse() {
        Ok(m) => m,
        Err(e) => return usage(e),
    };
    match cmd {
        LogicCmd::Check { mode: Mode::Trace, horizon, .. } => match trace_validity(&phi, horizon) {
            Ok(None) => {
                println!("valid: {phi} holds on every schedule up to horizon {horizon}");
                verdict(true)
            }
            Ok(Some(trace)) => {
                println!("invalid: {phi} fails on schedule {:?}", trace.schedule().to_raw().events);
                verdict(false)
            }
            Err(e) => usage(e),
        },
        LogicCmd::Check { mode: Mode::Branching, horizon, .. } => {
            let atoms: Vec<String> = phi.atoms().into_iter().collect();
            let model = cslab::logic::BranchModel::evidence_tree(&atoms, horizon);
            match model.forces(0, &phi, g_mode) {
                Ok(v) => {
                    println!("{} at the root of the depth-{horizon} evidence tree ({g_mode})", if v { "forced" } else { "not forced" });
                    verdict(v)
                }
                Err(e) => usage(e),
            }
        }
        LogicCmd::Countermodel { max_worlds, .. } => match countermodel_search(&phi, max_worlds, g_mode) {
            Ok(cm) => {
                println!("countermodel: {} worlds, refused at world {} ({g_mode})", cm.model.len(), cm.world);
                for (i, w) in cm.model.worlds().iter().enumerate() {
                    let affirmed: Vec<String> = w.affirmed.iter().map(|(a, s)| format!("{a}@{s}")).collect();
                    println!("  w{i} depth {} children {:?} affirmed [{}]", w.depth, w.children, affirmed.join(", "));
                }
                verdict(false)
            }
            Err(e @ LogicError::Exhausted { .. }) => {
                println!("none: {e}");
                verdict(true)
            }
            Err(e) => usage(e),
        },
    }
}
