//! Slice FR against global FR along G = H + K, for both transform readings.

use fourier_ratio::harness::SignalSpec;
use fourier_ratio::localization::{localization_check, ProductDecomposition, TransformReading};
use fourier_ratio::{FiniteAbelianGroup, OrthonormalSystem, Signal};
use num_complex::Complex64;

fn main() -> fourier_ratio::Result<()> {
    let g: FiniteAbelianGroup = "8x8".parse()?;
    let d = ProductDecomposition::parse(&g, "split=1|2")?;
    let dft = OrthonormalSystem::dft(g.clone());

    let chirp = Signal::new(
        g.clone(),
        (0..64)
            .map(|i| Complex64::from_polar(1.0, std::f64::consts::TAU * ((i / 8) * (i % 8)) as f64 / 8.0))
            .collect(),
    )?;
    let signals = [
        ("rademacher", SignalSpec::Rademacher { seed: Some(3) }.generate(&dft, 0)?),
        ("row-delta", SignalSpec::RowDelta { a0: 2, seed: Some(3) }.generate(&dft, 0)?),
        ("chirp", chirp),
    ];
    for (name, f) in &signals {
        for reading in [TransformReading::RowWise, TransformReading::Full] {
            let rep = localization_check(f, &d, reading)?;
            println!(
                "{name:<10} {reading:<8} max slice FR {:>7.3} >= global FR / sqrt|K| {:>7.3}: {}",
                rep.max_slice_fr, rep.lower_bound, rep.holds
            );
        }
    }
    Ok(())
}
