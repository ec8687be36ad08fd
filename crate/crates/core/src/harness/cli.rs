//! Command-line front end. Every flag can also come from a TOML file passed
//! with `--config`; flags on the command line win.
//!
//! ```toml
//! seed = 7
//! trials = 50
//! format = "csv"
//!
//! [phase]
//! system = "dft:64"
//! signal = ["sparse:s=3"]
//! p = [0.25, 0.5, 0.75]
//! ```

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use super::commands::*;
use super::phase::{run_phase_sweep, PhaseConfig};
use super::signals::SignalSpec;
use super::{ExperimentReport, OutputFormat, Tabular};
use crate::error::{invalid, Error, Result};
use crate::group::FiniteAbelianGroup;
use crate::localization::TransformReading;
use crate::recovery::RecoveryConfig;
use crate::system::SystemSpec;

#[derive(Parser, Debug)]
#[command(name = "fourier-ratio", version, about = "Fourier ratio experiments on finite abelian groups")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone, Default)]
pub struct GlobalArgs {
    /// Master seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Monte Carlo trials per grid point.
    #[arg(long, global = true)]
    pub trials: Option<usize>,
    /// Worker threads (defaults to all cores; results do not depend on it).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Output file (defaults to stdout).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<OutputFormat>,
    /// TOML file with the same keys as the flags.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Record wall time in the report (makes reports non-reproducible).
    #[arg(long, global = true)]
    pub timing: bool,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Fourier ratio, sparsity level and truncation tails of one signal.
    Fr(FrArgs),
    /// l1 recovery of one signal from Bernoulli samples.
    Recover(RecoverArgs),
    /// Success rate over a grid of signal classes and sampling probabilities.
    Phase(PhaseArgs),
    /// Localization check along a product decomposition.
    Localize(LocalizeArgs),
    /// Rate-distortion descriptors.
    Rdcodec {
        #[command(subcommand)]
        op: CodecOp,
    },
    /// Covering parameters and the SQ-dimension bound.
    Sqdim(SqdimArgs),
    /// Row-wise erasure statistics.
    Erasure(ErasureArgs),
}

#[derive(Subcommand, Debug)]
pub enum CodecOp {
    /// Encode a signal to a descriptor file.
    Encode(EncodeArgs),
    /// Decode a descriptor file.
    Decode(DecodeArgs),
    /// Encode and decode in memory and measure distortion.
    Roundtrip(EncodeArgs),
}

/// Solver flags shared by `recover` and `phase`.
#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverArgs {
    #[arg(long)]
    pub max_iterations: Option<usize>,
    #[arg(long)]
    pub step: Option<f64>,
    #[arg(long)]
    pub relaxation: Option<f64>,
    #[arg(long)]
    pub tolerance: Option<f64>,
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrArgs {
    /// e.g. `dft:4x6`, `wht:5`, `gabor:N=16,T=8`, `haar:64`.
    #[arg(long)]
    pub system: Option<SystemSpec>,
    /// e.g. `sparse:s=3`, `harmonic`, `rademacher`, `row-delta:a0=0`, `file:f.txt`.
    #[arg(long)]
    pub signal: Option<SignalSpec>,
    #[arg(long)]
    pub eta: Option<f64>,
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RecoverArgs {
    #[arg(long)]
    pub system: Option<SystemSpec>,
    #[arg(long)]
    pub signal: Option<SignalSpec>,
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub eps: Option<f64>,
    /// Constant in the sampling threshold.
    #[arg(long)]
    pub c: Option<f64>,
    /// Additive noise on the samples, relative to `||f||_2`.
    #[arg(long)]
    pub noise: Option<f64>,
    /// Write the recovered signal here.
    #[arg(long)]
    pub recovered_out: Option<PathBuf>,
    #[command(flatten)]
    #[serde(flatten)]
    pub solver: SolverArgs,
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhaseArgs {
    #[arg(long)]
    pub system: Option<SystemSpec>,
    /// Signal class; repeat for several.
    #[arg(long)]
    pub signal: Option<Vec<SignalSpec>>,
    /// Comma-separated sampling probabilities.
    #[arg(long, value_delimiter = ',')]
    pub p: Option<Vec<f64>>,
    #[arg(long)]
    pub eps: Option<f64>,
    /// Success threshold on relative error.
    #[arg(long)]
    pub threshold: Option<f64>,
    #[command(flatten)]
    #[serde(flatten)]
    pub solver: SolverArgs,
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LocalizeArgs {
    /// The group, e.g. `8x8`.
    #[arg(long)]
    pub group: Option<FiniteAbelianGroup>,
    /// Alternatively a system spec, whose group is used.
    #[arg(long)]
    pub system: Option<SystemSpec>,
    /// 1-based factor positions, `split=1|2`.
    #[arg(long)]
    pub split: Option<String>,
    #[arg(long)]
    pub signal: Option<SignalSpec>,
    /// `row-wise` (default) or `full`.
    #[arg(long)]
    pub reading: Option<TransformReading>,
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EncodeArgs {
    #[arg(long)]
    pub system: Option<SystemSpec>,
    #[arg(long)]
    pub signal: Option<SignalSpec>,
    #[arg(long)]
    pub eps: Option<f64>,
    /// Descriptor file to write.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecodeArgs {
    /// Descriptor file to read.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Signal file to write.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SqdimArgs {
    #[arg(long)]
    pub system: Option<SystemSpec>,
    #[arg(long)]
    pub signal: Option<SignalSpec>,
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long)]
    pub tau: Option<f64>,
    #[arg(long)]
    pub r: Option<f64>,
    /// Run the MSE experiment with this many draws per functional.
    #[arg(long)]
    pub mse_k: Option<usize>,
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ErasureArgs {
    #[arg(long)]
    pub n: Option<u64>,
    #[arg(long)]
    pub t: Option<u64>,
    #[arg(long)]
    pub theta: Option<f64>,
    #[arg(long)]
    pub e_max: Option<u64>,
}

/// Contents of a `--config` file.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub seed: Option<u64>,
    pub trials: Option<usize>,
    pub jobs: Option<usize>,
    pub out: Option<PathBuf>,
    pub format: Option<OutputFormat>,
    pub timing: Option<bool>,
    #[serde(default)]
    pub fr: FrArgs,
    #[serde(default)]
    pub recover: RecoverArgs,
    #[serde(default)]
    pub phase: PhaseArgs,
    #[serde(default)]
    pub localize: LocalizeArgs,
    #[serde(default)]
    pub rdcodec: RdcodecSection,
    #[serde(default)]
    pub sqdim: SqdimArgs,
    #[serde(default)]
    pub erasure: ErasureArgs,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RdcodecSection {
    #[serde(flatten)]
    pub encode: EncodeArgs,
    pub input: Option<PathBuf>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        toml::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
    }
}

/// Flag, else config value, else default.
fn pick<T>(flag: Option<T>, file: Option<T>, default: T) -> T {
    flag.or(file).unwrap_or(default)
}

fn require<T>(flag: Option<T>, file: Option<T>, name: &'static str) -> Result<T> {
    flag.or(file)
        .ok_or_else(|| invalid(name, format!("missing; pass --{} or set it in the config file", name.replace('_', "-"))))
}

fn solver(flag: SolverArgs, file: SolverArgs) -> RecoveryConfig {
    let d = RecoveryConfig::default();
    RecoveryConfig {
        max_iterations: pick(flag.max_iterations, file.max_iterations, d.max_iterations),
        step: pick(flag.step, file.step, d.step),
        relaxation: pick(flag.relaxation, file.relaxation, d.relaxation),
        tolerance: pick(flag.tolerance, file.tolerance, d.tolerance),
        fidelity_radius: 0.0,
    }
}

/// Globals after merging.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub seed: u64,
    pub trials: Option<usize>,
    pub jobs: Option<usize>,
    pub out: Option<PathBuf>,
    pub format: OutputFormat,
    pub timing: bool,
}

fn report<C: Serialize, R: Tabular>(
    name: &str,
    cfg: C,
    g: &Resolved,
    f: impl FnOnce(&C) -> Result<R>,
) -> Result<Vec<u8>> {
    ExperimentReport::run(name, cfg, g.timing, f)?.render(g.format)
}

/// Runs a parsed command line and returns the rendered report.
pub fn execute(cli: Cli) -> Result<(Resolved, Vec<u8>)> {
    let file = match &cli.global.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    let g = Resolved {
        seed: pick(cli.global.seed, file.seed, 0),
        trials: cli.global.trials.or(file.trials),
        jobs: cli.global.jobs.or(file.jobs),
        out: cli.global.out.clone().or(file.out.clone()),
        format: pick(cli.global.format, file.format, OutputFormat::Json),
        timing: cli.global.timing || file.timing.unwrap_or(false),
    };
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(j) = g.jobs {
        if j == 0 {
            return Err(invalid("jobs", "must be >= 1"));
        }
        pool = pool.num_threads(j);
    }
    let pool = pool.build().map_err(|e| invalid("jobs", e.to_string()))?;
    let bytes = pool.install(|| dispatch(cli.command, file, &g))?;
    Ok((g, bytes))
}

fn dispatch(command: Command, file: FileConfig, g: &Resolved) -> Result<Vec<u8>> {
    match command {
        Command::Fr(a) => {
            let f = file.fr;
            let cfg = FrConfig {
                system: require(a.system, f.system, "system")?,
                signal: require(a.signal, f.signal, "signal")?,
                eta: pick(a.eta, f.eta, 0.5),
                seed: g.seed,
            };
            report("fr", cfg, g, run_fr)
        }
        Command::Recover(a) => {
            let f = file.recover;
            let cfg = RecoverConfig {
                system: require(a.system, f.system, "system")?,
                signal: require(a.signal, f.signal, "signal")?,
                p: pick(a.p, f.p, 0.5),
                eps: pick(a.eps, f.eps, 0.0),
                c: pick(a.c, f.c, 1.0),
                noise: pick(a.noise, f.noise, 0.0),
                seed: g.seed,
                solver: solver(a.solver, f.solver),
                recovered_out: a.recovered_out.or(f.recovered_out),
            };
            report("recover", cfg, g, run_recover)
        }
        Command::Phase(a) => {
            let f = file.phase;
            let cfg = PhaseConfig {
                system: pick(a.system, f.system, SystemSpec::Dft { group: FiniteAbelianGroup::cyclic(64)? }),
                signals: pick(a.signal, f.signal, vec![SignalSpec::Sparse { s: 3, seed: None }]),
                p: pick(a.p, f.p, (1..10).map(|i| i as f64 / 10.0).collect()),
                eps: pick(a.eps, f.eps, 0.0),
                threshold: a.threshold.or(f.threshold),
                solver: solver(a.solver, f.solver),
                trials: g.trials.unwrap_or(50),
                seed: g.seed,
            };
            report("phase", cfg, g, run_phase_sweep)
        }
        Command::Localize(a) => {
            let f = file.localize;
            let group = match (a.group.or(f.group), a.system.or(f.system)) {
                (Some(group), _) => group,
                (None, Some(spec)) => spec.group()?,
                (None, None) => return Err(invalid("group", "missing; pass --group or --system")),
            };
            let cfg = LocalizeConfig {
                group,
                split: require(a.split, f.split, "split")?,
                signal: pick(a.signal, f.signal, SignalSpec::Rademacher { seed: None }),
                reading: pick(a.reading, f.reading, TransformReading::RowWise),
                seed: g.seed,
            };
            report("localize", cfg, g, run_localize)
        }
        Command::Rdcodec { op } => {
            let f = file.rdcodec;
            match op {
                CodecOp::Encode(a) => report("rdcodec encode", encode_config(a, f.encode, g)?, g, run_encode),
                CodecOp::Roundtrip(a) => {
                    report("rdcodec roundtrip", encode_config(a, f.encode, g)?, g, run_roundtrip)
                }
                CodecOp::Decode(a) => {
                    let cfg = DecodeConfig {
                        input: require(a.input, f.input, "input")?,
                        output: a.output,
                    };
                    report("rdcodec decode", cfg, g, run_decode)
                }
            }
        }
        Command::Sqdim(a) => {
            let f = file.sqdim;
            let cfg = SqdimConfig {
                system: a.system.or(f.system),
                signal: a.signal.or(f.signal),
                m: a.m.or(f.m),
                tau: a.tau.or(f.tau),
                r: a.r.or(f.r),
                mse_k: a.mse_k.or(f.mse_k),
                trials: g.trials.unwrap_or(10_000),
                seed: g.seed,
            };
            report("sqdim", cfg, g, run_sqdim)
        }
        Command::Erasure(a) => {
            let f = file.erasure;
            let cfg = ErasureConfig {
                n: pick(a.n, f.n, 100),
                t: pick(a.t, f.t, 8),
                theta: pick(a.theta, f.theta, 0.05),
                e_max: pick(a.e_max, f.e_max, 2),
                trials: g.trials.unwrap_or(10_000),
                seed: g.seed,
            };
            report("erasure", cfg, g, run_erasure)
        }
    }
}

fn encode_config(a: EncodeArgs, f: EncodeArgs, g: &Resolved) -> Result<EncodeConfig> {
    Ok(EncodeConfig {
        system: require(a.system, f.system, "system")?,
        signal: require(a.signal, f.signal, "signal")?,
        eps: pick(a.eps, f.eps, 0.1),
        seed: g.seed,
        output: a.output.or(f.output),
    })
}

/// Entry point of the binary; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(cli).and_then(|(g, bytes)| emit(&g, &bytes)) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn emit(g: &Resolved, bytes: &[u8]) -> Result<()> {
    match &g.out {
        Some(path) => std::fs::write(path, bytes)?,
        None => std::io::stdout().lock().write_all(bytes)?,
    }
    Ok(())
}
