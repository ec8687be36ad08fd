//! Success-rate sweeps of l1 recovery over a grid of signal classes and
//! sampling probabilities.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::signals::SignalSpec;
use crate::error::{invalid, Result};
use crate::random::derive_seed;
use crate::ratio::fourier_ratio;
use crate::recovery::{recover_from_truth, RecoveryConfig, SampleSet, ERROR_CONSTANT};
use crate::system::{OrthonormalSystem, SystemSpec};

/// Fixed column order of the sweep CSV.
pub const PHASE_CSV_HEADER: [&str; 7] = ["system", "M", "r", "p", "trials", "success_rate", "mean_relative_error"];

/// Signal seeds live in their own stream so that every `p` of a grid row sees
/// the same signals.
const SIGNAL_STREAM: u64 = 1 << 63;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseConfig {
    pub system: SystemSpec,
    pub signals: Vec<SignalSpec>,
    pub p: Vec<f64>,
    /// Fidelity radius as a fraction of `||f||_2`.
    pub eps: f64,
    /// Success means relative error at most this; defaults to
    /// `max(11.47 eps, 1e-5)`.
    pub threshold: Option<f64>,
    pub solver: RecoveryConfig,
    pub trials: usize,
    pub seed: u64,
}

impl PhaseConfig {
    pub fn new(system: SystemSpec, signals: Vec<SignalSpec>, p: Vec<f64>, trials: usize, seed: u64) -> Self {
        Self {
            system,
            signals,
            p,
            eps: 0.0,
            threshold: None,
            solver: RecoveryConfig::default(),
            trials,
            seed,
        }
    }

    pub fn success_threshold(&self) -> f64 {
        self.threshold.unwrap_or((ERROR_CONSTANT * self.eps).max(1e-5))
    }

    fn validate(&self) -> Result<()> {
        if self.signals.is_empty() {
            return Err(invalid("signals", "the grid needs at least one signal class"));
        }
        if self.p.is_empty() {
            return Err(invalid("p", "the grid needs at least one sampling probability"));
        }
        if let Some(p) = self.p.iter().find(|&&p| !(p > 0.0 && p <= 1.0)) {
            return Err(invalid("p", format!("{p} is outside (0, 1]")));
        }
        if self.trials == 0 {
            return Err(invalid("trials", "must be >= 1"));
        }
        if !(self.eps >= 0.0 && self.eps < 1.0) {
            return Err(invalid("eps", format!("{} is outside [0, 1)", self.eps)));
        }
        if let Some(t) = self.threshold {
            if !(t > 0.0) {
                return Err(invalid("threshold", format!("{t} must be > 0")));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseTrial {
    pub signal_index: usize,
    pub p_index: usize,
    pub trial: usize,
    pub signal_seed: u64,
    pub sample_seed: u64,
    pub ratio: f64,
    pub samples: usize,
    pub relative_error: f64,
    pub iterations: usize,
    pub converged: bool,
    pub success: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint {
    pub system: String,
    #[serde(rename = "M")]
    pub m: usize,
    pub signal: String,
    /// Mean Fourier ratio of the trial signals.
    pub r: f64,
    pub p: f64,
    pub trials: usize,
    pub success_rate: f64,
    pub mean_relative_error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseSweep {
    pub threshold: f64,
    pub points: Vec<PhasePoint>,
    pub records: Vec<PhaseTrial>,
}

impl PhaseSweep {
    /// Recomputes the grid aggregates from the per-trial records.
    pub fn aggregate(config: &PhaseConfig, records: &[PhaseTrial]) -> Vec<PhasePoint> {
        let m = config.system.group().map(|g| g.size()).unwrap_or(0);
        let mut points = Vec::with_capacity(config.signals.len() * config.p.len());
        for (si, signal) in config.signals.iter().enumerate() {
            for (pi, &p) in config.p.iter().enumerate() {
                let cell: Vec<&PhaseTrial> = records
                    .iter()
                    .filter(|t| t.signal_index == si && t.p_index == pi)
                    .collect();
                let n = cell.len() as f64;
                let mean = |f: &dyn Fn(&PhaseTrial) -> f64| cell.iter().map(|t| f(t)).sum::<f64>() / n;
                points.push(PhasePoint {
                    system: config.system.to_string(),
                    m,
                    signal: signal.to_string(),
                    r: mean(&|t| t.ratio),
                    p,
                    trials: cell.len(),
                    success_rate: mean(&|t| f64::from(u8::from(t.success))),
                    mean_relative_error: mean(&|t| t.relative_error),
                });
            }
        }
        points
    }

    pub fn write_csv<W: std::io::Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(PHASE_CSV_HEADER).map_err(csv_error)?;
        for pt in &self.points {
            w.write_record([
                pt.system.clone(),
                pt.m.to_string(),
                pt.r.to_string(),
                pt.p.to_string(),
                pt.trials.to_string(),
                pt.success_rate.to_string(),
                pt.mean_relative_error.to_string(),
            ])
            .map_err(csv_error)?;
        }
        w.flush()?;
        Ok(())
    }
}

pub(crate) fn csv_error(e: csv::Error) -> crate::Error {
    crate::Error::Parse(format!("csv: {e}"))
}

/// Runs `trials` recoveries at every `(signal class, p)` grid point.
///
/// Trial `t` of signal class `i` uses the signal seed
/// `derive_seed(seed, 2^63 + i, t)` at every `p`, and the sample seed
/// `derive_seed(seed, grid_index, t)`. Results do not depend on thread count.
pub fn run_phase_sweep(config: &PhaseConfig) -> Result<PhaseSweep> {
    config.validate()?;
    let system = OrthonormalSystem::from_spec(&config.system)?;
    let threshold = config.success_threshold();
    let np = config.p.len();
    let jobs: Vec<(usize, usize, usize)> = (0..config.signals.len())
        .flat_map(|si| (0..np).flat_map(move |pi| (0..config.trials).map(move |t| (si, pi, t))))
        .collect();
    let records = jobs
        .into_par_iter()
        .map(|(si, pi, trial)| -> Result<PhaseTrial> {
            let signal_seed = derive_seed(config.seed, SIGNAL_STREAM + si as u64, trial as u64);
            let sample_seed = derive_seed(config.seed, (si * np + pi) as u64, trial as u64);
            let f = config.signals[si].generate(&system, signal_seed)?;
            let ratio = fourier_ratio(&system.analyze(&f)?)?;
            let samples = SampleSet::bernoulli(system.group(), config.p[pi], sample_seed)?;
            let result = recover_from_truth(&system, &f, &samples, config.eps, &config.solver)?;
            let relative_error = result.relative_error.unwrap_or(f64::NAN);
            Ok(PhaseTrial {
                signal_index: si,
                p_index: pi,
                trial,
                signal_seed,
                sample_seed,
                ratio,
                samples: samples.len(),
                relative_error,
                iterations: result.iterations,
                converged: result.converged,
                success: relative_error <= threshold,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PhaseSweep {
        threshold,
        points: PhaseSweep::aggregate(config, &records),
        records,
    })
}
