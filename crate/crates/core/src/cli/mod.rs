//! Command-line surface: configuration files, overrides, sweeps and writers.
//!
//! Every command reads an optional config file, applies flag overrides and
//! writes one table. CSV output gets a `.meta.json` sidecar holding the
//! resolved parameters; JSON output embeds them. Failures print an error
//! object on stderr and exit with 2 (config), 3 (numerical) or 4 (I/O).

mod commands;
mod config;
mod error;
mod output;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::Parser;

pub use commands::{execute, Command, Failure};
pub use config::{parse_config, AnalysisSettings, Format, OutputSpec, RunConfig, Sweep, SweepTarget};
pub use error::CliError;
pub use output::{read_record, record_output, sidecar_path, write_curve, write_output, write_record, Cell, Output, Table};

#[derive(Debug, Parser)]
#[command(name = "neurofield", version, about = "Delayed neural field analysis and simulation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub options: Options,
}

#[derive(Debug, Default, clap::Args)]
pub struct Options {
    /// Config file with [model], [simulation], [sweep], [analysis], [output].
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// `name=start:stop:step`.
    #[arg(long, global = true)]
    pub sweep: Option<String>,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// csv or json.
    #[arg(long, global = true)]
    pub format: Option<String>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Curve plane, e.g. alpha-nu or r-k.
    #[arg(long, global = true)]
    pub plane: Option<String>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub tau: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub nu: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub r: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub k: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub omega: Option<f64>,
    /// Keep a_i = a_e / r during sweeps.
    #[arg(long, global = true)]
    pub tie_inhibition: bool,
}

impl Options {
    /// Config file (if any) with flag overrides applied, validated.
    pub fn resolve(&self) -> Result<RunConfig, CliError> {
        let mut cfg = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
                parse_config(&text)?
            }
            None => RunConfig::default(),
        };
        let m = &mut cfg.model;
        for (slot, value) in [
            (&mut m.alpha, self.alpha),
            (&mut m.tau, self.tau),
            (&mut m.nu, self.nu),
            (&mut m.r, self.r),
        ] {
            if let Some(v) = value {
                *slot = v;
            }
        }
        if let Some(s) = self.seed {
            cfg.simulation.seed = s;
        }
        let a = &mut cfg.analysis;
        a.plane = self.plane.clone().or(a.plane.take());
        a.k = self.k.or(a.k);
        a.omega = self.omega.or(a.omega);
        a.tie_inhibition |= self.tie_inhibition;
        if let Some(s) = &self.sweep {
            cfg.sweep = Some(Sweep::parse(s)?);
        }
        if let Some(path) = &self.out {
            cfg.output.path = Some(path.clone());
        }
        if let Some(f) = &self.format {
            cfg.output.format =
                Format::parse(f).ok_or_else(|| CliError::config(format!("format must be csv or json, got {f:?}")))?;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn report(err: &CliError) -> i32 {
    eprintln!("{}", err.to_json());
    err.exit_code()
}

/// Runs the command line and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let cfg = match cli.options.resolve() {
        Ok(c) => c,
        Err(e) => return report(&e),
    };
    match execute(cli.command, &cfg) {
        Ok(out) => match write_output(&out, &cfg.output) {
            Ok(Some(doc)) => {
                println!("{doc}");
                0
            }
            Ok(None) => 0,
            Err(e) => report(&e),
        },
        Err(Failure { error, partial }) => {
            if let Some(out) = partial {
                if let Err(e) = write_output(&out, &cfg.output) {
                    eprintln!("{}", e.to_json());
                }
            }
            report(&error)
        }
    }
}
