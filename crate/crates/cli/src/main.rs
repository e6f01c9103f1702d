use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use pshlab::function_model::catalog;
use pshlab::harness::{
    output_dir, plot_from_report, read_report, reproduce, run_scenario, write_outcome, HarnessError, Outcome,
    ScenarioConfig, CASES,
};

/// Numerical laboratory for plurisubharmonic functions.
///
/// Exit status: 0 when every check passes, 1 when a check fails or an
/// analysis errors, 2 for unreadable or inconsistent input.
#[derive(Parser)]
#[command(name = "pshlab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario config (flat TOML).
    Run {
        config: PathBuf,
        /// Output root; overrides the config and PSHLAB_OUT.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a pinned reproduction case.
    Reproduce {
        #[arg(value_parser = clap::builder::PossibleValuesParser::new(CASES))]
        case: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List the reference functions.
    Catalog {
        #[arg(long)]
        json: bool,
    },
    /// Re-render the plot of one run of a report.
    Plot {
        report: PathBuf,
        /// Run name, optionally with `.svg`.
        artifact: String,
        /// Defaults to `<artifact>.svg` next to the report.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn finish(outcome: &Outcome, dir: &Path) -> Result<ExitCode, HarnessError> {
    write_outcome(outcome, dir)?;
    let r = &outcome.report;
    for run in &r.runs {
        println!("{:<28} {:<15} {}", run.name, run.analysis, if run.pass { "pass" } else { "FAIL" });
    }
    for f in r.failures() {
        eprintln!("failed: {f}");
    }
    println!("report: {}", dir.join("report.json").display());
    Ok(if r.pass { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn execute(cmd: Command) -> Result<ExitCode, HarnessError> {
    match cmd {
        Command::Run { config, out } => {
            let src = fs::read_to_string(&config).map_err(|e| HarnessError::Config(format!("{}: {e}", config.display())))?;
            let cfg = ScenarioConfig::from_toml(&src)?;
            let outcome = run_scenario(&cfg)?;
            let dir = output_dir(out.as_deref(), cfg.output.as_deref(), &cfg.run_name());
            finish(&outcome, &dir)
        }
        Command::Reproduce { case, out } => {
            let outcome = reproduce(&case)?;
            finish(&outcome, &output_dir(out.as_deref(), None, &case))
        }
        Command::Catalog { json } => {
            let entries = catalog();
            if json {
                println!("{}", serde_json::to_string_pretty(&entries).expect("catalog serializes"));
            } else {
                let show = |v: Option<f64>| v.map_or("-".to_string(), |v| format!("{v}"));
                println!("{:<22} {:>3} {:>5} {:>5}  expression", "name", "n", "ν", "ι");
                for e in entries {
                    println!("{:<22} {:>3} {:>5} {:>5}  {}", e.name, e.dim, show(e.nu), show(e.iota), e.text);
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Plot { report, artifact, out } => {
            let r = read_report(&report)?;
            let svg = plot_from_report(&r, &artifact)?;
            let name = artifact.strip_suffix(".svg").unwrap_or(&artifact);
            let path = out.unwrap_or_else(|| report.with_file_name(format!("{name}.svg")));
            fs::write(&path, svg)?;
            println!("{}", path.display());
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
