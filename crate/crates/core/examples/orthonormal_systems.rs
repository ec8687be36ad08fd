//! The four orthonormal systems: Parseval, roundtrip and the boundedness constant.

use fourier_ratio::random::{complex_gaussian, rng};
use fourier_ratio::{OrthonormalSystem, Signal, SystemSpec};

fn main() -> fourier_ratio::Result<()> {
    for spec in ["dft:4x6", "wht:5", "gabor:N=16,T=8", "haar:64"] {
        let spec: SystemSpec = spec.parse()?;
        let sys = OrthonormalSystem::from_spec(&spec)?;
        let f = Signal::new(sys.group().clone(), complex_gaussian(&mut rng(1), sys.size()))?;
        let c = sys.analyze(&f)?;
        let back = sys.synthesize(&c)?;
        let b = sys.check_boundedness();
        println!(
            "{spec:<16} M={:<4} |c|-|f|={:+.1e} roundtrip={:.1e} tau={:.4} bound={:.4} bounded={}",
            sys.size(),
            c.l2_norm() - f.l2_norm(),
            back.relative_error(&f),
            b.tau,
            b.bound,
            b.passes
        );
    }
    Ok(())
}
