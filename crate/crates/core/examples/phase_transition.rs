//! Success rate of exact l1 recovery as the sampling probability grows.
//! Writes the plot-ready CSV to stdout.

use fourier_ratio::harness::{run_phase_sweep, PhaseConfig};

fn main() -> fourier_ratio::Result<()> {
    let cfg = PhaseConfig::new(
        "dft:64".parse()?,
        vec!["sparse:s=3".parse()?, "sparse:s=8".parse()?],
        vec![0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.75, 0.9],
        20,
        2024,
    );
    let sweep = run_phase_sweep(&cfg)?;
    sweep.write_csv(std::io::stdout().lock())?;
    Ok(())
}
