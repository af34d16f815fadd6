//! Command-line front end: config-driven runs, named scenarios, and output
//! serialization. Exit codes: 0 pass/converged, 1 verdict failure, 2
//! configuration error, 3 numerical error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use maflow::config::{instantiate, parse_config};
use maflow::flow::{Problem, RunStatus};
use maflow::output::{write_outputs, OutputLayout};
use maflow::scenarios::{list_scenarios, run_scenario, Overrides};
use maflow::Error;

#[derive(Parser)]
#[command(name = "maflow", about = "Parabolic complex Monge-Ampere flow laboratory")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run the flow described by a TOML configuration file.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Output directory (overrides the config's output.dir).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a named scenario with optional overrides.
    Scenario {
        name: String,
        #[arg(long)]
        grid: Option<usize>,
        #[arg(long = "dt-safety")]
        dt_safety: Option<f64>,
        #[arg(long = "t-max")]
        t_max: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List the available scenario names.
    ListScenarios,
}

const EXIT_VERDICT: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_NUMERIC: u8 = 3;

fn error_code(e: &Error) -> u8 {
    match e {
        Error::DegenerateMetric { .. }
        | Error::NumericBlowup { .. }
        | Error::SingularMetric { .. }
        | Error::NotExact { .. }
        | Error::ShapeMismatch { .. } => EXIT_NUMERIC,
        _ => EXIT_CONFIG,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.cmd {
        Cmd::Run { config, out } => cmd_run(&config, out),
        Cmd::Scenario { name, grid, dt_safety, t_max, out } => {
            cmd_scenario(&name, Overrides { grid, dt_safety, t_max, tol_w: None }, out)
        }
        Cmd::ListScenarios => {
            for name in list_scenarios() {
                println!("{name}");
            }
            0
        }
    };
    ExitCode::from(code)
}

fn cmd_run(config_path: &PathBuf, out: Option<PathBuf>) -> u8 {
    let text = match std::fs::read_to_string(config_path) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", config_path.display());
            return EXIT_CONFIG;
        }
    };
    let cfg = match parse_config(&text) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_CONFIG;
        }
    };
    let inst = match instantiate(&cfg) {
        Ok(i) => i,
        Err(e) => {
            eprintln!("error: {e}");
            return error_code(&e);
        }
    };
    let prob = Problem::new(&inst.model, &inst.path, &inst.forcing);
    let v0 = maflow::grid::GridField::zeros(&inst.model.desc);
    let outcome = match prob.run(v0, &inst.settings, inst.omega.as_ref()) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return error_code(&e);
        }
    };
    let terminal = &outcome.traj.terminal;
    println!(
        "status {} at t = {} after {} steps (sup|w| = {:e})",
        outcome.traj.status,
        terminal.t,
        terminal.steps,
        terminal.w.sup_abs()
    );
    if let Some(msg) = &outcome.traj.error {
        eprintln!("error: {msg}");
    }
    let out_dir = out.or_else(|| inst.out_dir.clone().map(PathBuf::from));
    if let Some(dir) = out_dir {
        if let Err(e) = OutputLayout::new(&dir)
            .and_then(|layout| write_outputs(&outcome.report, &outcome.traj, &inst.model.desc, &layout))
        {
            eprintln!("error: {e}");
            return error_code(&e);
        }
        println!("wrote outputs to {}", dir.display());
    }
    match outcome.traj.status {
        RunStatus::Converged | RunStatus::HorizonReached => 0,
        RunStatus::Degenerate | RunStatus::Blowup => EXIT_NUMERIC,
    }
}

fn cmd_scenario(name: &str, ov: Overrides, out: Option<PathBuf>) -> u8 {
    let (traj, report, verdict) = match run_scenario(name, &ov) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return error_code(&e);
        }
    };
    for c in &verdict.checks {
        println!("{name}: {} {} ({})", c.name, if c.pass { "pass" } else { "FAIL" }, c.detail);
    }
    println!("{name}: verdict {}", if verdict.pass { "pass" } else { "FAIL" });
    if let Some(dir) = out {
        if let Err(e) = OutputLayout::new(&dir)
            .and_then(|layout| write_outputs(&report, &traj, &traj.terminal.v.desc, &layout))
        {
            eprintln!("error: {e}");
            return error_code(&e);
        }
        println!("wrote outputs to {}", dir.display());
    }
    if verdict.pass {
        0
    } else {
        EXIT_VERDICT
    }
}
