//! One runner per subcommand. Each takes a fully resolved configuration and
//! returns a serializable result.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use super::signals::{add_noise, write_signal_file, SignalSpec};
use super::Tabular;
use crate::codec::{
    rd_bit_bound, rd_bit_bound_gabor, rd_decode, rd_encode, BitAccount, Descriptor, RdBound,
};
use crate::error::{invalid, Result};
use crate::group::FiniteAbelianGroup;
use crate::localization::{localization_check, LocalizationReport, ProductDecomposition, TransformReading};
use crate::random::derive_seed;
use crate::ratio::{fourier_ratio, soft_sparsify, sorted_decay_check};
use crate::recovery::{
    erasure_row_statistics, recover_l1, sample_complexity, ErasureStats, RecoveryConfig, SampleSet, ERROR_CONSTANT,
};
use crate::sq::{covering_params, sq_dim_log2, sq_mse, uniform_distribution, CoveringParams, MseReport};
use crate::system::{OrthonormalSystem, SystemSpec};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrConfig {
    pub system: SystemSpec,
    pub signal: SignalSpec,
    pub eta: f64,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrReport {
    #[serde(rename = "M")]
    pub m: usize,
    pub l1: f64,
    pub l2: f64,
    pub ratio: f64,
    pub eta: f64,
    /// `min(M, ceil(r^2 / eta^2))`.
    pub s: usize,
    pub tail_l2: f64,
    pub tail_l1: f64,
    /// `eta ||c||_2`, the guaranteed ceiling on `tail_l2`.
    pub tail_bound: f64,
    pub sorted_decay_holds: bool,
}

impl Tabular for FrReport {}

pub fn run_fr(cfg: &FrConfig) -> Result<FrReport> {
    let system = OrthonormalSystem::from_spec(&cfg.system)?;
    let f = cfg.signal.generate(&system, cfg.seed)?;
    let c = system.analyze(&f)?;
    let sparse = soft_sparsify(&c, cfg.eta)?;
    Ok(FrReport {
        m: system.size(),
        l1: c.l1_norm(),
        l2: c.l2_norm(),
        ratio: sparse.ratio,
        eta: cfg.eta,
        s: sparse.s,
        tail_l2: sparse.tail_l2,
        tail_l1: sparse.tail_l1,
        tail_bound: cfg.eta * c.l2_norm(),
        sorted_decay_holds: sorted_decay_check(&c)?,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RecoverConfig {
    pub system: SystemSpec,
    pub signal: SignalSpec,
    pub p: f64,
    pub eps: f64,
    /// Constant in the sampling threshold.
    pub c: f64,
    /// Additive Gaussian noise on the observed samples, relative to `||f||_2`.
    pub noise: f64,
    pub seed: u64,
    pub solver: RecoveryConfig,
    /// Where to write the recovered signal, if anywhere.
    pub recovered_out: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RecoverReport {
    #[serde(rename = "M")]
    pub m: usize,
    pub tau: f64,
    pub bounded: bool,
    pub ratio: f64,
    pub samples: usize,
    /// `C (tau sqrt M)^2 (r/eps)^2 log(r/eps)^2 log M`; absent when `eps = 0`.
    pub sample_complexity: Option<f64>,
    pub sigma: f64,
    pub iterations: usize,
    pub converged: bool,
    pub coefficient_l1: f64,
    pub fidelity_residual: f64,
    pub relative_error: f64,
    /// `11.47 eps`.
    pub error_bound: f64,
    pub within_error_bound: bool,
}

impl Tabular for RecoverReport {}

/// The signal uses `seed` (unless its spec fixes one); samples and noise use
/// `derive_seed(seed, 1, 0)` and `derive_seed(seed, 2, 0)`.
pub fn run_recover(cfg: &RecoverConfig) -> Result<RecoverReport> {
    if !(cfg.eps >= 0.0 && cfg.eps < 1.0) {
        return Err(invalid("eps", format!("{} is outside [0, 1)", cfg.eps)));
    }
    let system = OrthonormalSystem::from_spec(&cfg.system)?;
    let f = cfg.signal.generate(&system, cfg.seed)?;
    let ratio = fourier_ratio(&system.analyze(&f)?)?;
    let samples = SampleSet::bernoulli(system.group(), cfg.p, derive_seed(cfg.seed, 1, 0))?;
    let observed_signal = if cfg.noise > 0.0 {
        add_noise(&f, cfg.noise, derive_seed(cfg.seed, 2, 0))?
    } else {
        f.clone()
    };
    let observed = samples.restrict(&observed_signal)?;
    let sigma = cfg.eps * f.l2_norm();
    let solver = RecoveryConfig {
        fidelity_radius: sigma,
        ..cfg.solver.clone()
    };
    let result = recover_l1(&system, &samples, &observed, &solver)?.with_truth(&f);
    if let Some(path) = &cfg.recovered_out {
        write_signal_file(&result.recovered, path)?;
    }
    let relative_error = result.relative_error.unwrap_or(f64::NAN);
    let error_bound = ERROR_CONSTANT * cfg.eps;
    Ok(RecoverReport {
        m: system.size(),
        tau: result.tau,
        bounded: result.bounded,
        ratio,
        samples: samples.len(),
        sample_complexity: if cfg.eps > 0.0 {
            Some(sample_complexity(ratio, cfg.eps, system.size(), system.tau(), cfg.c)?)
        } else {
            None
        },
        sigma,
        iterations: result.iterations,
        converged: result.converged,
        coefficient_l1: result.coefficient_l1,
        fidelity_residual: result.fidelity_residual,
        relative_error,
        error_bound,
        within_error_bound: relative_error <= error_bound.max(1e-5),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocalizeConfig {
    pub group: FiniteAbelianGroup,
    /// `split=1|2,3`: 1-based factor positions of `H`, then of `K`.
    pub split: String,
    pub signal: SignalSpec,
    pub reading: TransformReading,
    pub seed: u64,
}

impl Tabular for LocalizationReport {}

/// Signals are generated against the DFT on the group.
pub fn run_localize(cfg: &LocalizeConfig) -> Result<LocalizationReport> {
    let d = ProductDecomposition::parse(&cfg.group, &cfg.split)?;
    let system = OrthonormalSystem::dft(cfg.group.clone());
    let f = cfg.signal.generate(&system, cfg.seed)?;
    localization_check(&f, &d, cfg.reading)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EncodeConfig {
    pub system: SystemSpec,
    pub signal: SignalSpec,
    pub eps: f64,
    pub seed: u64,
    pub output: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EncodeReport {
    pub account: BitAccount,
    pub bytes: usize,
    /// Main terms of the description-length bound with unit constants.
    pub bound: RdBound,
    /// The Gabor variant, for Gabor systems.
    pub gabor_bound: Option<RdBound>,
}

impl Tabular for EncodeReport {}

fn encode_signal(cfg: &EncodeConfig) -> Result<(OrthonormalSystem, crate::Signal, Descriptor, BitAccount, Vec<u8>)> {
    let system = OrthonormalSystem::from_spec(&cfg.system)?;
    let f = cfg.signal.generate(&system, cfg.seed)?;
    let (descriptor, account) = rd_encode(&system, &f, cfg.eps)?;
    let (bytes, _) = descriptor.encode()?;
    Ok((system, f, descriptor, account, bytes))
}

fn bounds(spec: &SystemSpec, r: f64, eps: f64, m: usize) -> Result<(RdBound, Option<RdBound>)> {
    let bound = rd_bit_bound(r, eps, m, 1.0, 1.0)?;
    let gabor = match spec {
        SystemSpec::GaborBlock { n, t } => Some(rd_bit_bound_gabor(r, eps, *n, *t, 1.0, 1.0)?),
        _ => None,
    };
    Ok((bound, gabor))
}

pub fn run_encode(cfg: &EncodeConfig) -> Result<EncodeReport> {
    let (system, _, _, account, bytes) = encode_signal(cfg)?;
    if let Some(path) = &cfg.output {
        std::fs::write(path, &bytes)?;
    }
    let (bound, gabor_bound) = bounds(&cfg.system, account.ratio, cfg.eps, system.size())?;
    Ok(EncodeReport {
        bytes: bytes.len(),
        account,
        bound,
        gabor_bound,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecodeConfig {
    pub input: PathBuf,
    pub output: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecodeReport {
    pub system: SystemSpec,
    pub k: usize,
    pub eps: f64,
    pub coefficient_norm: f64,
    pub bytes: usize,
    pub decoded_l2: f64,
}

impl Tabular for DecodeReport {}

pub fn run_decode(cfg: &DecodeConfig) -> Result<DecodeReport> {
    let bytes = std::fs::read(&cfg.input)?;
    let d = Descriptor::decode(&bytes)?;
    let f = rd_decode(&d)?;
    if let Some(path) = &cfg.output {
        write_signal_file(&f, path)?;
    }
    Ok(DecodeReport {
        system: d.system.clone(),
        k: d.k(),
        eps: d.eps,
        coefficient_norm: d.coefficient_norm,
        bytes: bytes.len(),
        decoded_l2: f.l2_norm(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoundtripReport {
    pub account: BitAccount,
    pub bytes: usize,
    pub bound: RdBound,
    pub gabor_bound: Option<RdBound>,
    /// `||f - decode(encode(f))||_2 / ||f||_2`.
    pub relative_distortion: f64,
    pub eps: f64,
    pub within_eps: bool,
}

impl Tabular for RoundtripReport {}

pub fn run_roundtrip(cfg: &EncodeConfig) -> Result<RoundtripReport> {
    let (system, f, _, account, bytes) = encode_signal(cfg)?;
    let g = rd_decode(&Descriptor::decode(&bytes)?)?;
    if let Some(path) = &cfg.output {
        std::fs::write(path, &bytes)?;
    }
    let relative_distortion = f.distance(&g) / f.l2_norm();
    let (bound, gabor_bound) = bounds(&cfg.system, account.ratio, cfg.eps, system.size())?;
    Ok(RoundtripReport {
        bytes: bytes.len(),
        account,
        bound,
        gabor_bound,
        relative_distortion,
        eps: cfg.eps,
        within_eps: relative_distortion <= cfg.eps * (1.0 + 1e-9),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SqdimConfig {
    /// Where `M` and `tau` come from unless given explicitly.
    pub system: Option<SystemSpec>,
    /// Where `r` comes from unless given explicitly.
    pub signal: Option<SignalSpec>,
    pub m: Option<usize>,
    pub tau: Option<f64>,
    pub r: Option<f64>,
    /// Runs the MSE experiment with this many draws per functional.
    pub mse_k: Option<usize>,
    pub trials: usize,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SqdimReport {
    pub covering: CoveringParams,
    pub log2_bound: f64,
    pub mse: Option<MseReport>,
}

impl Tabular for SqdimReport {}

pub fn run_sqdim(cfg: &SqdimConfig) -> Result<SqdimReport> {
    let system = cfg.system.as_ref().map(OrthonormalSystem::from_spec).transpose()?;
    let signal = match (&system, &cfg.signal) {
        (Some(sys), Some(spec)) => Some(spec.generate(sys, cfg.seed)?),
        (None, Some(_)) => return Err(invalid("signal", "a signal needs a system")),
        _ => None,
    };
    let m = cfg
        .m
        .or(system.as_ref().map(|s| s.size()))
        .ok_or_else(|| invalid("m", "give M or a system"))?;
    let tau = cfg
        .tau
        .or(system.as_ref().map(|s| s.tau()))
        .ok_or_else(|| invalid("tau", "give tau or a system"))?;
    let r = match (cfg.r, &system, &signal) {
        (Some(r), _, _) => r,
        (None, Some(sys), Some(f)) => fourier_ratio(&sys.analyze(f)?)?,
        _ => return Err(invalid("r", "give r or a system with a signal")),
    };
    let covering = covering_params(m, tau, r)?;
    let log2_bound = sq_dim_log2(m, tau, r)?;
    let mse = match cfg.mse_k {
        Some(k) => {
            let (Some(sys), Some(f)) = (&system, &signal) else {
                return Err(invalid("mse_k", "the MSE experiment needs a system and a signal"));
            };
            Some(sq_mse(sys, f, k, cfg.trials, cfg.seed, &uniform_distribution(sys.size()))?)
        }
        None => None,
    };
    Ok(SqdimReport {
        covering,
        log2_bound,
        mse,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErasureConfig {
    pub n: u64,
    pub t: u64,
    pub theta: f64,
    pub e_max: u64,
    pub trials: usize,
    pub seed: u64,
}

impl Tabular for ErasureStats {}

pub fn run_erasure(cfg: &ErasureConfig) -> Result<ErasureStats> {
    erasure_row_statistics(cfg.n, cfg.t, cfg.theta, cfg.e_max, cfg.trials, cfg.seed)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fr_of_harmonic_signal() {
        let cfg = FrConfig {
            system: "dft:256".parse().unwrap(),
            signal: SignalSpec::Harmonic,
            eta: 0.5,
            seed: 0,
        };
        let rep = run_fr(&cfg).unwrap();
        assert!(rep.ratio >= crate::ratio::harmonic_ratio_lower_bound(256));
        assert!(rep.tail_l2 <= rep.tail_bound);
        assert!(rep.sorted_decay_holds);
    }

    #[test]
    fn recover_full_observation_is_exact() {
        let cfg = RecoverConfig {
            system: "wht:5".parse().unwrap(),
            signal: "sparse:s=3".parse().unwrap(),
            p: 1.0,
            eps: 0.0,
            c: 1.0,
            noise: 0.0,
            seed: 4,
            solver: RecoveryConfig::default(),
            recovered_out: None,
        };
        let rep = run_recover(&cfg).unwrap();
        assert!(rep.relative_error < 1e-8);
        assert!(rep.within_error_bound);
        assert!(rep.sample_complexity.is_none());
    }

    #[test]
    fn noisy_recovery_reports_threshold() {
        let cfg = RecoverConfig {
            system: "dft:64".parse().unwrap(),
            signal: "sparse:s=3".parse().unwrap(),
            p: 0.6,
            eps: 0.1,
            c: 1.0,
            noise: 0.05,
            seed: 1,
            solver: RecoveryConfig::default(),
            recovered_out: None,
        };
        let rep = run_recover(&cfg).unwrap();
        assert!((rep.error_bound - 1.147).abs() < 1e-12);
        assert!(rep.sample_complexity.unwrap() > 0.0);
    }

    #[test]
    fn localize_row_delta_is_tight() {
        let cfg = LocalizeConfig {
            group: "8x4".parse().unwrap(),
            split: "split=1|2".into(),
            signal: "row-delta:a0=1".parse().unwrap(),
            reading: TransformReading::Full,
            seed: 3,
        };
        // the full 2-D transform spreads the delta column flat: equality
        let rep = run_localize(&cfg).unwrap();
        assert!(rep.holds);
        assert!((rep.max_slice_fr - rep.lower_bound).abs() < 1e-9 * rep.lower_bound);
        let row = run_localize(&LocalizeConfig {
            reading: TransformReading::RowWise,
            ..cfg
        })
        .unwrap();
        assert!((row.global_fr - row.max_slice_fr).abs() < 1e-9 * row.global_fr);
    }

    #[test]
    fn codec_commands_roundtrip_through_files() {
        let dir = tempfile::tempdir().unwrap();
        let frrd = dir.path().join("f.frrd");
        let cfg = EncodeConfig {
            system: "gabor:N=8,T=4".parse().unwrap(),
            signal: "sparse:s=4".parse().unwrap(),
            eps: 0.2,
            seed: 2,
            output: Some(frrd.clone()),
        };
        let enc = run_encode(&cfg).unwrap();
        assert_eq!(enc.account.total, 8 * enc.bytes as u64);
        assert!(enc.gabor_bound.is_some());
        let out = dir.path().join("g.txt");
        let dec = run_decode(&DecodeConfig {
            input: frrd,
            output: Some(out.clone()),
        })
        .unwrap();
        assert_eq!(dec.k, enc.account.k);
        let g = crate::harness::read_signal_file(&out).unwrap();
        let rt = run_roundtrip(&EncodeConfig { output: None, ..cfg }).unwrap();
        assert!(rt.within_eps);
        assert!((g.l2_norm() - dec.decoded_l2).abs() < 1e-12);
    }

    #[test]
    fn sqdim_from_explicit_parameters() {
        let cfg = SqdimConfig {
            system: None,
            signal: None,
            m: Some(4),
            tau: Some(0.5),
            r: Some(1.0),
            mse_k: None,
            trials: 1,
            seed: 0,
        };
        let rep = run_sqdim(&cfg).unwrap();
        assert_eq!(rep.covering.k, 256);
        assert!((rep.log2_bound - 1547.0007).abs() < 1e-3);
        assert!(run_sqdim(&SqdimConfig { m: None, ..cfg.clone() }).is_err());
        assert!(run_sqdim(&SqdimConfig { mse_k: Some(4), ..cfg }).is_err());
    }

    #[test]
    fn sqdim_with_mse() {
        let cfg = SqdimConfig {
            system: Some("wht:4".parse().unwrap()),
            signal: Some("rademacher".parse().unwrap()),
            m: None,
            tau: None,
            r: None,
            mse_k: Some(16),
            trials: 500,
            seed: 1,
        };
        let rep = run_sqdim(&cfg).unwrap();
        assert!(rep.mse.unwrap().within_bound(5.0));
        assert_eq!(rep.covering.m, 16);
    }

    #[test]
    fn erasure_runner_forwards() {
        let cfg = ErasureConfig {
            n: 100,
            t: 4,
            theta: 0.1,
            e_max: 2,
            trials: 1000,
            seed: 0,
        };
        let s = run_erasure(&cfg).unwrap();
        assert!((s.empirical_prob - s.exact_prob).abs() < 0.05);
    }
}
