//! Frequency-erasure statistics for row-wise transmission on `Z_N x Z_T`.
//!
//! Each of the `N T` row-wise coefficients is lost independently with
//! probability `theta`. The event of interest is that every row loses fewer
//! than `N / (2 E_max)` coefficients.

use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{Binomial as BinomialLaw, DiscreteCDF};

use crate::error::{invalid, Result};
use crate::random::{derive_seed, rng};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErasureStats {
    pub empirical_prob: f64,
    pub exact_prob: f64,
    /// Largest per-row loss count that still satisfies `< N / (2 E_max)`.
    pub max_allowed_losses: u64,
    pub trials: usize,
}

pub fn erasure_row_statistics(
    n: u64,
    t: u64,
    theta: f64,
    e_max: u64,
    trials: usize,
    seed: u64,
) -> Result<ErasureStats> {
    if n == 0 || t == 0 {
        return Err(invalid("n", "N and T must be >= 1"));
    }
    if e_max == 0 {
        return Err(invalid("e_max", "E_max must be >= 1"));
    }
    let upper = 1.0 / (2.0 * e_max as f64);
    if !(theta > 0.0 && theta < upper) {
        return Err(invalid(
            "theta",
            format!("{theta} violates the hypothesis 0 < theta < 1/(2 E_max) = {upper}"),
        ));
    }
    // M_max < N / (2 E) <=> M_max <= ceil(N / (2 E)) - 1
    let max_allowed = (n as f64 / (2.0 * e_max as f64)).ceil() as u64 - 1;

    let law = BinomialLaw::new(theta, n).map_err(|e| invalid("theta", e.to_string()))?;
    let row_prob = law.cdf(max_allowed);
    let exact_prob = row_prob.powf(t as f64);

    let sampler = Binomial::new(n, theta).map_err(|e| invalid("theta", e.to_string()))?;
    let successes: usize = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut r = rng(derive_seed(seed, 0, trial as u64));
            let ok = (0..t).all(|_| sampler.sample(&mut r) <= max_allowed);
            usize::from(ok)
        })
        .sum();
    let empirical_prob = if trials == 0 {
        f64::NAN
    } else {
        successes as f64 / trials as f64
    };
    Ok(ErasureStats {
        empirical_prob,
        exact_prob,
        max_allowed_losses: max_allowed,
        trials,
    })
}
