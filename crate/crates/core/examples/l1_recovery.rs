//! Recover a 3-sparse signal on Z_64 from roughly half of its samples.

use fourier_ratio::harness::SignalSpec;
use fourier_ratio::ratio::fourier_ratio;
use fourier_ratio::recovery::{recover_from_truth, sample_complexity, RecoveryConfig, SampleSet};
use fourier_ratio::{FiniteAbelianGroup, OrthonormalSystem};

fn main() -> fourier_ratio::Result<()> {
    let sys = OrthonormalSystem::dft(FiniteAbelianGroup::cyclic(64)?);
    let f = SignalSpec::Sparse { s: 3, seed: Some(5) }.generate(&sys, 0)?;
    let r = fourier_ratio(&sys.analyze(&f)?)?;
    for (p, eps) in [(0.5, 0.0), (0.5, 0.1), (0.25, 0.0)] {
        let x = SampleSet::bernoulli(sys.group(), p, 11)?;
        let res = recover_from_truth(&sys, &f, &x, eps, &RecoveryConfig::default())?;
        println!(
            "p={p:<5} eps={eps:<4} |X|={:<3} iterations={:<5} converged={} relative error={:.2e}",
            x.len(),
            res.iterations,
            res.converged,
            res.relative_error.unwrap_or(f64::NAN)
        );
    }
    println!("FR = {r:.3}; sampling threshold at eps = 0.1, C = 1: {:.0}", sample_complexity(r, 0.1, 64, sys.tau(), 1.0)?);
    Ok(())
}
