//! Fourier ratio of a few signals and how far soft sparsification truncates them.

use fourier_ratio::harness::SignalSpec;
use fourier_ratio::ratio::{harmonic_ratio_lower_bound, soft_sparsify};
use fourier_ratio::{FiniteAbelianGroup, OrthonormalSystem};

fn main() -> fourier_ratio::Result<()> {
    let sys = OrthonormalSystem::dft(FiniteAbelianGroup::cyclic(256)?);
    let eta = 0.3;
    println!("{:<18} {:>8} {:>6} {:>10} {:>10}", "signal", "FR", "s", "tail", "eta*|c|");
    for spec in ["sparse:s=1,seed=1", "sparse:s=8,seed=1", "harmonic", "rademacher:seed=1"] {
        let spec: SignalSpec = spec.parse()?;
        let c = sys.analyze(&spec.generate(&sys, 0)?)?;
        let t = soft_sparsify(&c, eta)?;
        println!(
            "{:<18} {:>8.3} {:>6} {:>10.3e} {:>10.3e}",
            spec.to_string(),
            t.ratio,
            t.s,
            t.tail_l2,
            eta * c.l2_norm()
        );
    }
    println!("harmonic lower bound (sqrt 6 / pi) ln 256 = {:.3}", harmonic_ratio_lower_bound(256));
    Ok(())
}
