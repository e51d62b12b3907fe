use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use hebm_cli::{sweep, verify_table_fixture, ExperimentConfig, ExperimentError, TableId};
use hebm_core::BitOrder;
use serde_json::json;

#[derive(Parser)]
#[command(
    name = "hebm",
    version,
    about = "Hamiltonian-engineering Born machine experiments"
)]
struct Cli {
    /// Base seed for every sample (optimizer and noise).
    #[arg(long, global = true)]
    seed: Option<u64>,

    #[arg(long, global = true, env = "HEBM_OUTPUT_DIR")]
    output_dir: Option<PathBuf>,

    /// msb-first or lsb-first.
    #[arg(long, global = true, value_parser = parse_bit_order)]
    bit_order: Option<BitOrder>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train every sample of a config and write the report.
    Run { config: PathBuf },
    /// Check a config without running it.
    Validate { config: PathBuf },
    /// Loss of the reference coefficient tables; both bit orders unless
    /// --bit-order is given.
    VerifyTables {
        #[arg(long = "table", value_delimiter = ',')]
        tables: Vec<TableId>,
    },
    /// Wall time to reach the loss threshold for each n_dt.
    SweepTiming {
        config: PathBuf,
        #[arg(long, value_delimiter = ',')]
        n_dt: Vec<usize>,
        #[arg(long)]
        threshold: Option<f64>,
    },
    /// Best final loss over a grid of phase and pole variances.
    SweepNoise {
        config: PathBuf,
        #[arg(long, value_delimiter = ',')]
        phase: Vec<f64>,
        #[arg(long, value_delimiter = ',')]
        pole: Vec<f64>,
    },
    /// Best final loss against Gaussian width and noise variance.
    SweepKl {
        config: PathBuf,
        #[arg(long, value_delimiter = ',')]
        b: Vec<f64>,
        #[arg(long, value_delimiter = ',')]
        noise: Vec<f64>,
    },
}

fn parse_bit_order(s: &str) -> Result<BitOrder, String> {
    match s {
        "msb-first" => Ok(BitOrder::MsbFirst),
        "lsb-first" => Ok(BitOrder::LsbFirst),
        _ => Err(format!("expected msb-first or lsb-first, got {s:?}")),
    }
}

fn or_default<T: Clone>(given: Vec<T>, default: Vec<T>) -> Vec<T> {
    if given.is_empty() {
        default
    } else {
        given
    }
}

impl Cli {
    fn load(&self, path: &std::path::Path) -> Result<ExperimentConfig, ExperimentError> {
        let mut cfg = ExperimentConfig::load(path)?;
        if let Some(seed) = self.seed {
            cfg.set_seed(seed);
        }
        if let Some(dir) = &self.output_dir {
            cfg.output_dir = dir.clone();
        }
        if let Some(order) = self.bit_order {
            cfg.bit_order = order;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn execute(&self) -> Result<serde_json::Value, ExperimentError> {
        match &self.command {
            Command::Run { config } => {
                let cfg = self.load(config)?;
                let (report, dir) = hebm_cli::run_experiment(&cfg)?;
                Ok(json!({
                    "name": cfg.name,
                    "output": dir,
                    "final_losses": report.final_losses(),
                    "best_sample": report.best_sample,
                    "best_final_loss": report.best_final_loss(),
                    "seconds": report.timing.total_seconds,
                }))
            }
            Command::Validate { config } => {
                let cfg = self.load(config)?;
                Ok(json!({ "name": cfg.name, "valid": true, "config": cfg }))
            }
            Command::VerifyTables { tables } => {
                let tables = or_default(tables.clone(), TableId::ALL.to_vec());
                let orders = match self.bit_order {
                    Some(o) => vec![o],
                    None => vec![BitOrder::MsbFirst, BitOrder::LsbFirst],
                };
                let mut rows = Vec::new();
                for t in tables {
                    for &o in &orders {
                        rows.push(json!({ "table": t, "bit_order": o, "loss": verify_table_fixture(t, o)? }));
                    }
                }
                Ok(json!(rows))
            }
            Command::SweepTiming {
                config,
                n_dt,
                threshold,
            } => {
                let cfg = self.load(config)?;
                let defaults = cfg.sweep();
                let n_dt = or_default(n_dt.clone(), defaults.n_dt_values);
                let rows = sweep::timing_sweep(&cfg, &n_dt, threshold.unwrap_or(defaults.threshold))?;
                let path = sweep::write_timing_csv(&cfg, &rows)?;
                Ok(json!({ "output": path, "rows": rows }))
            }
            Command::SweepNoise { config, phase, pole } => {
                let cfg = self.load(config)?;
                let defaults = cfg.sweep();
                let phase = or_default(phase.clone(), defaults.phase_variances);
                let pole = or_default(pole.clone(), defaults.pole_variances);
                let cells = sweep::noise_sweep(&cfg, &phase, &pole)?;
                let path = sweep::write_noise_csv(&cfg, &cells)?;
                Ok(json!({ "output": path, "cells": cells }))
            }
            Command::SweepKl { config, b, noise } => {
                let cfg = self.load(config)?;
                let defaults = cfg.sweep();
                let b = or_default(b.clone(), defaults.b_values);
                let noise = or_default(noise.clone(), defaults.noise_variances);
                let rows = sweep::kl_sweep(&cfg, &b, &noise)?;
                let path = sweep::write_kl_csv(&cfg, &noise, &rows)?;
                Ok(json!({ "output": path, "noise_variances": noise, "rows": rows }))
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprintln!("{}", json!({ "error": "usage", "message": e.to_string() }));
            return ExitCode::from(2);
        }
    };
    match cli.execute() {
        Ok(out) => {
            println!(
                "{}",
                serde_json::to_string_pretty(&out).expect("json value serializes")
            );
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::FAILURE
        }
    }
}
