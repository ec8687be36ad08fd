//! Experiment plumbing: signal generators, seeded sweeps, per-command runners,
//! reports and the command-line front end.
//!
//! Every report is a pure function of its configuration and the crate
//! version. Wall time is the one exception and is only recorded on request.

pub mod cli;
pub mod commands;
pub mod phase;
pub mod signals;

use std::io::Write;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use commands::*;
pub use phase::{run_phase_sweep, PhaseConfig, PhasePoint, PhaseSweep, PhaseTrial, PHASE_CSV_HEADER};
pub use signals::{add_noise, generate_signal, read_signal_file, write_signal_file, SignalSpec};

pub const CODE_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
}

impl std::str::FromStr for OutputFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Self::Json),
            "csv" => Ok(Self::Csv),
            other => Err(Error::Parse(format!("unknown format `{other}`, expected json or csv"))),
        }
    }
}

/// A result that can be written as CSV. The default flattens the JSON form
/// into one header row and one value row, with dotted keys for nested fields
/// and JSON text for arrays.
pub trait Tabular: Serialize {
    fn write_csv(&self, out: &mut dyn Write) -> Result<()> {
        let value = serde_json::to_value(self).map_err(|e| Error::Parse(e.to_string()))?;
        let mut cells = Vec::new();
        flatten("", &value, &mut cells);
        let mut w = csv::Writer::from_writer(out);
        w.write_record(cells.iter().map(|(k, _)| k)).map_err(phase::csv_error)?;
        w.write_record(cells.iter().map(|(_, v)| v)).map_err(phase::csv_error)?;
        w.flush()?;
        Ok(())
    }
}

fn flatten(prefix: &str, value: &serde_json::Value, out: &mut Vec<(String, String)>) {
    use serde_json::Value;
    match value {
        Value::Object(map) => {
            for (k, v) in map {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, v, out);
            }
        }
        Value::String(s) => out.push((prefix.to_string(), s.clone())),
        Value::Null => out.push((prefix.to_string(), String::new())),
        other => out.push((prefix.to_string(), other.to_string())),
    }
}

impl Tabular for PhaseSweep {
    fn write_csv(&self, out: &mut dyn Write) -> Result<()> {
        PhaseSweep::write_csv(self, out)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport<C, R> {
    pub command: String,
    pub code_version: String,
    pub config: C,
    pub result: R,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub wall_time_seconds: Option<f64>,
}

impl<C: Serialize, R: Tabular> ExperimentReport<C, R> {
    /// Runs `f` and wraps its result; `timed` records wall time.
    pub fn run(command: &str, config: C, timed: bool, f: impl FnOnce(&C) -> Result<R>) -> Result<Self> {
        let start = Instant::now();
        let result = f(&config)?;
        Ok(Self {
            command: command.to_string(),
            code_version: CODE_VERSION.to_string(),
            config,
            result,
            wall_time_seconds: timed.then(|| start.elapsed().as_secs_f64()),
        })
    }

    /// JSON is the whole report; CSV is the result table only.
    pub fn render(&self, format: OutputFormat) -> Result<Vec<u8>> {
        let mut out = Vec::new();
        match format {
            OutputFormat::Json => {
                serde_json::to_writer_pretty(&mut out, self).map_err(|e| Error::Parse(e.to_string()))?;
                out.push(b'\n');
            }
            OutputFormat::Csv => self.result.write_csv(&mut out)?,
        }
        Ok(out)
    }
}
