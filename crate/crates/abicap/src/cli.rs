//! Command-line front end: run a built-in scenario or a config file and
//! emit CSV (and optionally SVG) reports.

use std::fs;
use std::path::{Path, PathBuf};

use abicap_core::engine::{aggregate, run_experiment};
use abicap_core::{RunConfig, ScenarioId};
use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use crate::config::{apply_override, load_config_file};
use crate::report;

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "ABICAP_OUT_DIR";

pub const EXIT_OK: i32 = 0;
pub const EXIT_RUNTIME: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "abicap", about = "Agent-based simulator of procedural learning", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a built-in scenario (by id) or a TOML config file (by path).
    Run {
        /// Scenario id or config file path.
        target: String,
        /// Master seed for all random streams.
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Output directory for emitted files.
        #[arg(long, env = OUT_DIR_ENV, default_value = ".")]
        out: PathBuf,
        /// Parameter overrides as key=value; may repeat.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
        /// Also render an SVG line chart of mean knowledge per condition.
        #[arg(long)]
        plot: bool,
    },
    /// Print the available scenario ids, one per line.
    ListScenarios,
}

/// Execute a parsed invocation; returns the process exit code.
pub fn dispatch(cli: Cli) -> i32 {
    match cli.command {
        Command::ListScenarios => {
            for id in ScenarioId::ALL {
                println!("{}", id.as_str());
            }
            EXIT_OK
        }
        Command::Run {
            target,
            seed,
            out,
            set,
            plot,
        } => match build_config(&target, seed, &set) {
            Err(message) => {
                eprintln!("error: {message}");
                EXIT_USAGE
            }
            Ok(config) => match execute_run(&config, &out, plot) {
                Ok(files) => {
                    for file in files {
                        println!("wrote {}", file.display());
                    }
                    EXIT_OK
                }
                Err(e) => {
                    eprintln!("error: {e:#}");
                    EXIT_RUNTIME
                }
            },
        },
    }
}

/// Resolve the run target and apply overrides. All failures here are usage
/// errors: bad scenario id, unreadable config, bad override, or a
/// configuration that fails validation.
pub fn build_config(target: &str, seed: u64, overrides: &[String]) -> Result<RunConfig, String> {
    let mut config = match ScenarioId::parse(target) {
        Ok(id) => id.config(seed),
        Err(_) => {
            let path = Path::new(target);
            if !path.exists() {
                let ids: Vec<&str> = ScenarioId::ALL.iter().map(|id| id.as_str()).collect();
                return Err(format!(
                    "'{target}' is neither a scenario id nor a config file; \
                     valid scenarios: {}",
                    ids.join(", ")
                ));
            }
            load_config_file(path, seed).map_err(|e| format!("{e:#}"))?
        }
    };
    for spec in overrides {
        apply_override(&mut config, spec).map_err(|e| format!("{e:#}"))?;
    }
    config.validate().map_err(|e| e.to_string())?;
    Ok(config)
}

/// Run the experiment and write output files; returns the paths written.
pub fn execute_run(config: &RunConfig, out_dir: &Path, plot: bool) -> Result<Vec<PathBuf>> {
    let result = run_experiment(config).context("running experiment")?;
    fs::create_dir_all(out_dir)
        .with_context(|| format!("creating output directory {}", out_dir.display()))?;

    let mut written = Vec::new();

    let timeseries = out_dir.join(format!("{}_timeseries.csv", config.name));
    let mut buf = Vec::new();
    report::write_timeseries_csv(&result, &mut buf)?;
    fs::write(&timeseries, &buf).with_context(|| format!("writing {}", timeseries.display()))?;
    written.push(timeseries);

    if config.record_mastery {
        let mastery = out_dir.join(format!("{}_mastery.csv", config.name));
        let mut buf = Vec::new();
        report::write_mastery_csv(&result, &mut buf)?;
        fs::write(&mastery, &buf).with_context(|| format!("writing {}", mastery.display()))?;
        written.push(mastery);
    }

    if plot {
        let chart = out_dir.join(format!("{}_chart.svg", config.name));
        let rows = aggregate(&result)?;
        let mut buf = Vec::new();
        report::render_line_chart(&rows, &mut buf, &config.name)?;
        fs::write(&chart, &buf).with_context(|| format!("writing {}", chart.display()))?;
        written.push(chart);
    }

    Ok(written)
}
