//! Recovery of a signal from random point samples by l1 minimization over its
//! coefficients in an orthonormal system:
//!
//! ```text
//! minimize ||c||_1  subject to  ||R_X synth(c) - y||_2 <= sigma
//! ```
//!
//! `R_X synth` has orthonormal rows, so both proximal maps are closed form and
//! the program is solved by plain Douglas-Rachford splitting.

mod erasure;
mod prox;
mod sampling;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use erasure::{erasure_row_statistics, ErasureStats};
pub use prox::{project_fidelity, soft_threshold, FidelityProjector};
pub use sampling::{bernoulli_sample, SampleSet};

use crate::error::{invalid, Result};
use crate::ratio::floored_ln;
use crate::signal::{l1_norm, l2_distance, l2_norm, Signal};
use crate::system::OrthonormalSystem;

/// Error constant of the recovery guarantee `||f* - f|| <= 11.47 eps ||f||`.
pub const ERROR_CONSTANT: f64 = 11.47;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RecoveryConfig {
    pub max_iterations: usize,
    /// Threshold of the l1 prox, in units of `||y||_2 / sqrt(|X|)`.
    pub step: f64,
    /// Douglas-Rachford relaxation in `(0, 2)`.
    pub relaxation: f64,
    /// Stop when the fixed-point residual drops below `tolerance * ||y||_2`.
    pub tolerance: f64,
    /// `sigma = eps ||f||_2`.
    pub fidelity_radius: f64,
}

impl Default for RecoveryConfig {
    fn default() -> Self {
        Self {
            max_iterations: 5000,
            step: 1.0,
            relaxation: 1.0,
            tolerance: 1e-9,
            fidelity_radius: 0.0,
        }
    }
}

impl RecoveryConfig {
    pub fn with_radius(sigma: f64) -> Self {
        Self {
            fidelity_radius: sigma,
            ..Self::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if self.max_iterations == 0 {
            return Err(invalid("max_iterations", "must be >= 1"));
        }
        if !(self.step > 0.0) {
            return Err(invalid("step", format!("{} must be > 0", self.step)));
        }
        if !(self.relaxation > 0.0 && self.relaxation < 2.0) {
            return Err(invalid("relaxation", format!("{} is outside (0, 2)", self.relaxation)));
        }
        if !(self.tolerance > 0.0) {
            return Err(invalid("tolerance", format!("{} must be > 0", self.tolerance)));
        }
        if !(self.fidelity_radius >= 0.0) {
            return Err(invalid("fidelity_radius", format!("{} must be >= 0", self.fidelity_radius)));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RecoveryResult {
    pub recovered: Signal,
    pub coefficient_l1: f64,
    pub fidelity_residual: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Incoherence constant of the system used.
    pub tau: f64,
    pub bounded: bool,
    pub relative_error: Option<f64>,
}

impl RecoveryResult {
    /// Fills `relative_error` against the true signal.
    pub fn with_truth(mut self, truth: &Signal) -> Self {
        self.relative_error = Some(self.recovered.relative_error(truth));
        self
    }
}

/// Solves the l1 program by Douglas-Rachford splitting:
///
/// ```text
/// x_k     = soft(z_k, lambda)
/// w_k     = proj(2 x_k - z_k)
/// z_{k+1} = z_k + relaxation (w_k - x_k)
/// ```
///
/// The returned signal is the synthesis of `proj(x)` for the final (or, on
/// failure, the best) iterate, so it is feasible.
pub fn recover_l1(
    system: &OrthonormalSystem,
    samples: &SampleSet,
    observed: &[Complex64],
    config: &RecoveryConfig,
) -> Result<RecoveryResult> {
    config.validate()?;
    let sigma = config.fidelity_radius;
    let mut proj = FidelityProjector::new(system, samples, observed, sigma)?;
    let bounded = system.check_boundedness().passes;
    let m = system.size();
    let zero = Complex64::new(0.0, 0.0);

    let data_norm = l2_norm(observed);
    if data_norm <= sigma {
        // zero is feasible and has the smallest possible l1 norm
        return Ok(RecoveryResult {
            recovered: Signal::zeros(system.group().clone()),
            coefficient_l1: 0.0,
            fidelity_residual: data_norm,
            iterations: 0,
            converged: true,
            tau: system.tau(),
            bounded,
            relative_error: None,
        });
    }

    let lambda = config.step * data_norm / (samples.len() as f64).sqrt();
    let stop = config.tolerance * data_norm;

    let mut z = vec![zero; m];
    proj.project_in_place(&mut z);
    let mut x = vec![zero; m];
    let mut w = vec![zero; m];
    let mut best = (f64::INFINITY, x.clone());
    let mut converged = false;
    let mut iterations = 0;

    for k in 1..=config.max_iterations {
        iterations = k;
        x.copy_from_slice(&z);
        prox::soft_threshold_in_place(&mut x, lambda);
        for ((wi, xi), zi) in w.iter_mut().zip(&x).zip(&z) {
            *wi = 2.0 * xi - zi;
        }
        proj.project_in_place(&mut w);
        let residual = l2_distance(&w, &x);
        for ((zi, wi), xi) in z.iter_mut().zip(&w).zip(&x) {
            *zi += config.relaxation * (wi - xi);
        }
        if residual < best.0 {
            best.0 = residual;
            best.1.copy_from_slice(&x);
        }
        if residual <= stop {
            converged = true;
            break;
        }
    }

    let mut coeffs = if converged { x } else { best.1 };
    proj.project_in_place(&mut coeffs);
    let fidelity_residual = proj.residual_norm(&coeffs);
    let coefficient_l1 = l1_norm(&coeffs);
    system.synthesize_in_place(&mut coeffs);
    Ok(RecoveryResult {
        recovered: Signal::new(system.group().clone(), coeffs)?,
        coefficient_l1,
        fidelity_residual,
        iterations,
        converged,
        tau: system.tau(),
        bounded,
        relative_error: None,
    })
}

/// Observes `f` on `samples` and recovers it with `sigma = eps ||f||_2`.
pub fn recover_from_truth(
    system: &OrthonormalSystem,
    f: &Signal,
    samples: &SampleSet,
    eps: f64,
    config: &RecoveryConfig,
) -> Result<RecoveryResult> {
    let observed = samples.restrict(f)?;
    let config = RecoveryConfig {
        fidelity_radius: eps * f.l2_norm(),
        ..config.clone()
    };
    Ok(recover_l1(system, samples, &observed, &config)?.with_truth(f))
}

/// Sampling threshold `C (tau sqrt M)^2 (r/eps)^2 log(r/eps)^2 log M` with the
/// log factor floored at 1. `(tau sqrt M)^2 = 1` for constant-modulus systems.
pub fn sample_complexity(r: f64, eps: f64, m: usize, tau: f64, c: f64) -> Result<f64> {
    if !(r >= 1.0) {
        return Err(invalid("r", format!("{r} must be >= 1")));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(invalid("eps", format!("{eps} is outside (0, 1)")));
    }
    if m < 2 {
        return Err(invalid("m", format!("{m} must be >= 2")));
    }
    if !(tau > 0.0) {
        return Err(invalid("tau", format!("{tau} must be > 0")));
    }
    if !(c > 0.0) {
        return Err(invalid("c", format!("{c} must be > 0")));
    }
    let coherence = tau * tau * m as f64;
    let l = floored_ln(r / eps);
    Ok(c * coherence * (r * r) / (eps * eps) * l * l * (m as f64).ln())
}
