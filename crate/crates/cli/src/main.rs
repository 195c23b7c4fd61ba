//! `obslab`: batch experiments on observability constants.
//!
//! Every experiment reads an optional TOML config, applies flag overrides,
//! validates the result and writes `<command>.json` and `<command>.csv` to
//! the output directory.

mod catalog;
mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::commands::Outcome;
use crate::config::ExperimentConfig;
use crate::error::{exit, CliError};
use crate::output::{output_dir, write_reports, Table, OUTPUT_DIR_ENV};

#[derive(Parser)]
#[command(name = "obslab", version, about = "Numerical laboratory for observability of fractional Schroedinger equations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    overrides: Overrides,
}

#[derive(Subcommand, Clone, Copy, PartialEq, Eq)]
enum Command {
    /// Certify a direction covering by comb and GCC checks.
    Certify,
    /// Build and verify an effective direction covering.
    Cover,
    /// Uncertainty constants on frequency masks.
    Uncertainty,
    /// Resolvent constants over a frequency sweep.
    Resolvent,
    /// Observability Gramian cost curve.
    Observe,
    /// Random smooth minorant and almost periodic transfer function.
    ConstructDemo,
    /// Run the experiment named by `run.experiment` in the config.
    Run,
    /// Print the built-in observation families.
    ListFamilies,
}

/// Flags overriding config values.
#[derive(Args, Default)]
struct Overrides {
    /// TOML config with sections [field], [sweep], [spectral], [run].
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, env = OUTPUT_DIR_ENV)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    family: Option<String>,
    #[arg(long, global = true)]
    dim: Option<usize>,
    #[arg(long, global = true)]
    period: Option<f64>,
    #[arg(long, global = true)]
    n: Option<usize>,
    #[arg(long, global = true)]
    delta: Option<f64>,
    #[arg(long, global = true)]
    value: Option<f64>,
    /// Exponent of the e-beta family.
    #[arg(long, global = true)]
    field_beta: Option<f64>,
    #[arg(long, global = true)]
    mollify: Option<f64>,
    #[arg(long, global = true)]
    grid_file: Option<PathBuf>,
    /// Comma separated frequencies.
    #[arg(long, global = true, value_delimiter = ',', allow_negative_numbers = true)]
    lambda: Option<Vec<f64>>,
    /// Comma separated observation times.
    #[arg(long, global = true, value_delimiter = ',')]
    t: Option<Vec<f64>>,
    #[arg(long, global = true)]
    l: Option<f64>,
    #[arg(long, global = true)]
    m: Option<f64>,
    #[arg(long, global = true)]
    rho: Option<f64>,
    /// Propagator exponent in [0,1].
    #[arg(long, global = true)]
    beta: Option<f64>,
    #[arg(long, global = true)]
    gamma: Option<f64>,
    #[arg(long, global = true)]
    cutoff: Option<f64>,
    #[arg(long, global = true)]
    eps_decay: Option<f64>,
    #[arg(long, global = true)]
    mask: Option<String>,
    #[arg(long, global = true)]
    weight: Option<String>,
    #[arg(long, global = true)]
    symbol_gamma: Option<f64>,
    /// Observation weight of the resolvent operator.
    #[arg(long, global = true)]
    obs_m: Option<f64>,
    #[arg(long, global = true)]
    lambda0: Option<f64>,
    /// Add a wall-time column to CSV tables.
    #[arg(long, global = true)]
    timing: bool,
}

impl Overrides {
    fn resolve(self) -> Result<ExperimentConfig, CliError> {
        let mut c = match &self.config {
            Some(path) => ExperimentConfig::load(path)?,
            None => ExperimentConfig::default(),
        };
        fn set<T>(slot: &mut T, v: Option<T>) {
            if let Some(v) = v {
                *slot = v;
            }
        }
        set(&mut c.field.family, self.family);
        set(&mut c.field.dim, self.dim);
        set(&mut c.field.period, self.period);
        set(&mut c.field.n, self.n);
        set(&mut c.field.delta, self.delta);
        set(&mut c.field.value, self.value);
        set(&mut c.field.beta, self.field_beta);
        set(&mut c.field.mollify, self.mollify);
        set(&mut c.sweep.lambda, self.lambda);
        set(&mut c.sweep.t, self.t);
        set(&mut c.sweep.l, self.l);
        set(&mut c.sweep.m, self.m);
        set(&mut c.sweep.rho, self.rho);
        set(&mut c.sweep.beta, self.beta);
        set(&mut c.sweep.gamma, self.gamma);
        set(&mut c.spectral.symbol_gamma, self.symbol_gamma);
        set(&mut c.spectral.lambda0, self.lambda0);
        set(&mut c.run.seed, self.seed);
        if let Some(mask) = self.mask {
            c.spectral.mask = mask;
        }
        if let Some(weight) = self.weight {
            c.spectral.weight = weight;
        }
        c.field.grid_file = self.grid_file.or(c.field.grid_file);
        c.sweep.cutoff = self.cutoff.or(c.sweep.cutoff);
        c.sweep.eps_decay = self.eps_decay.or(c.sweep.eps_decay);
        c.spectral.m = self.obs_m.or(c.spectral.m);
        c.run.output_dir = self.out.or(c.run.output_dir);
        c.run.timing |= self.timing;
        c.validate()?;
        Ok(c)
    }
}

fn emit<R: Serialize>(command: &str, config: &ExperimentConfig, outcome: Outcome<R>) -> Result<bool, CliError> {
    for line in &outcome.summary {
        println!("{command}: {line}");
    }
    let (json, csv) = write_reports(
        &output_dir(config),
        command,
        config,
        outcome.pass,
        &outcome.result,
        &outcome.table,
    )?;
    println!(
        "{command}: {} -> {}, {}",
        if outcome.pass { "pass" } else { "FAIL" },
        json.display(),
        csv.display()
    );
    Ok(outcome.pass)
}

fn list_families(config: &ExperimentConfig) -> Result<bool, CliError> {
    let entries = catalog::families();
    let mut table = Table::new(&["name", "parameters", "anchor", "notes"]);
    for e in &entries {
        println!("{:<16} {}", e.name, e.parameters);
        println!("{:<16} anchor: {}", "", e.anchor);
        println!("{:<16} {}", "", e.notes);
        table.push(vec![e.name.into(), e.parameters.into(), e.anchor.into(), e.notes.into()]);
    }
    let outcome = Outcome {
        result: entries,
        table,
        pass: true,
        summary: Vec::new(),
    };
    if config.run.output_dir.is_some() {
        emit("list-families", config, outcome)
    } else {
        Ok(true)
    }
}

fn dispatch(command: Command, config: &ExperimentConfig) -> Result<bool, CliError> {
    match command {
        Command::Certify => emit("certify", config, commands::certify(config)?),
        Command::Cover => emit("cover", config, commands::cover(config)?),
        Command::Uncertainty => emit("uncertainty", config, commands::uncertainty(config)?),
        Command::Resolvent => emit("resolvent", config, commands::resolvent(config)?),
        Command::Observe => emit("observe", config, commands::observe(config)?),
        Command::ConstructDemo => emit("construct-demo", config, commands::construct_demo(config)?),
        Command::ListFamilies => list_families(config),
        Command::Run => {
            let name = config
                .run
                .experiment
                .as_deref()
                .ok_or_else(|| CliError::usage("`obslab run` needs run.experiment in the config"))?;
            let command = match name {
                "certify" => Command::Certify,
                "cover" => Command::Cover,
                "uncertainty" => Command::Uncertainty,
                "resolvent" => Command::Resolvent,
                "observe" => Command::Observe,
                "construct-demo" => Command::ConstructDemo,
                other => {
                    return Err(CliError::usage(format!(
                        "run.experiment = {other} is not one of certify, cover, uncertainty, resolvent, observe, construct-demo"
                    )))
                }
            };
            dispatch(command, config)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = cli.overrides.resolve().and_then(|config| dispatch(cli.command, &config));
    let code = match result {
        Ok(true) => exit::SUCCESS,
        Ok(false) => exit::CHECK_FAILED,
        Err(e) => {
            eprintln!("obslab: error: {e}");
            e.code
        }
    };
    ExitCode::from(code as u8)
}
