//! The sampling estimator on a random Boolean function, then the covering
//! parameters and the log2 SQ-dimension bound they imply.

use fourier_ratio::harness::SignalSpec;
use fourier_ratio::sq::{covering_params, sq_dim_log2, sq_mse, uniform_distribution};
use fourier_ratio::OrthonormalSystem;

fn main() -> fourier_ratio::Result<()> {
    let sys = OrthonormalSystem::wht(4)?;
    let f = SignalSpec::Rademacher { seed: Some(8) }.generate(&sys, 0)?;
    for k in [16, 32, 64, 128] {
        let rep = sq_mse(&sys, &f, k, 10_000, 1, &uniform_distribution(16))?;
        println!(
            "k={k:<4} mse={:.4} (+- {:.4})  exact {:.4}  bound {:.4}",
            rep.empirical_mse, rep.standard_error, rep.expected_mse, rep.bound
        );
    }
    for (m, tau, r) in [(4, 0.5, 1.0), (64, 0.125, 2.0), (1024, 1.0 / 32.0, 3.0)] {
        let p = covering_params(m, tau, r)?;
        println!(
            "M={m:<5} tau={tau:<8} r={r}: k={} N1={} N2={} log2 bound={:.1}",
            p.k,
            p.n1,
            p.n2,
            sq_dim_log2(m, tau, r)?
        );
    }
    Ok(())
}
