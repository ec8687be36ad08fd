//! Encode a harmonic signal at several distortions and compare the measured
//! length with the bound's main terms.

use fourier_ratio::codec::{rd_bit_bound, rd_decode_bytes, rd_encode_bytes};
use fourier_ratio::harness::SignalSpec;
use fourier_ratio::{FiniteAbelianGroup, OrthonormalSystem};

fn main() -> fourier_ratio::Result<()> {
    let sys = OrthonormalSystem::dft(FiniteAbelianGroup::cyclic(1024)?);
    let f = SignalSpec::Harmonic.generate(&sys, 0)?;
    println!("{:>5} {:>5} {:>7} {:>7} {:>10} {:>12}", "eps", "k", "bytes", "bits", "distortion", "bound terms");
    for eps in [0.5, 0.2, 0.1, 0.05] {
        let (bytes, account) = rd_encode_bytes(&sys, &f, eps)?;
        let g = rd_decode_bytes(&bytes)?;
        let bound = rd_bit_bound(account.ratio, eps, sys.size(), 1.0, 1.0)?;
        println!(
            "{eps:>5} {:>5} {:>7} {:>7} {:>10.4} {:>12.0}",
            account.k,
            bytes.len(),
            account.total,
            f.distance(&g) / f.l2_norm(),
            bound.total
        );
    }
    Ok(())
}
