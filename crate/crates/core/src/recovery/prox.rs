//! The two proximal maps of the l1 recovery program.

use num_complex::Complex64;

use super::SampleSet;
use crate::error::{invalid, Error, Result};
use crate::signal::{l2_norm, CoefficientVector};
use crate::system::OrthonormalSystem;

/// Complex soft thresholding `z -> z max(0, 1 - lambda/|z|)`.
pub fn soft_threshold(c: &CoefficientVector, lambda: f64) -> Result<CoefficientVector> {
    if !(lambda >= 0.0) {
        return Err(invalid("lambda", format!("{lambda} must be >= 0")));
    }
    let mut entries = c.entries().to_vec();
    soft_threshold_in_place(&mut entries, lambda);
    Ok(CoefficientVector::new(c.system().cloned(), entries))
}

pub(crate) fn soft_threshold_in_place(v: &mut [Complex64], lambda: f64) {
    if lambda == 0.0 {
        return;
    }
    for z in v.iter_mut() {
        let m = z.norm();
        *z = if m <= lambda {
            Complex64::new(0.0, 0.0)
        } else {
            *z * (1.0 - lambda / m)
        };
    }
}

/// Euclidean projection onto `{c : ||R_X synth(c) - y||_2 <= sigma}`.
///
/// `R_X synth` has orthonormal rows, so the projection is
/// `c - analyze(E_X((1 - sigma/||rho||) rho))` with `rho = R_X synth(c) - y`.
pub struct FidelityProjector<'a> {
    system: &'a OrthonormalSystem,
    samples: &'a SampleSet,
    observed: &'a [Complex64],
    sigma: f64,
    work: Vec<Complex64>,
    restricted: Vec<Complex64>,
}

impl<'a> FidelityProjector<'a> {
    pub fn new(
        system: &'a OrthonormalSystem,
        samples: &'a SampleSet,
        observed: &'a [Complex64],
        sigma: f64,
    ) -> Result<Self> {
        if samples.group() != system.group() {
            return Err(Error::DomainMismatch {
                expected: system.group().clone(),
                found: samples.group().clone(),
            });
        }
        if observed.len() != samples.len() {
            return Err(Error::DimensionMismatch {
                expected: samples.len(),
                found: observed.len(),
            });
        }
        if !(sigma >= 0.0) {
            return Err(invalid("sigma", format!("{sigma} must be >= 0")));
        }
        Ok(Self {
            system,
            samples,
            observed,
            sigma,
            work: vec![Complex64::new(0.0, 0.0); system.size()],
            restricted: vec![Complex64::new(0.0, 0.0); samples.len()],
        })
    }

    /// `||R_X synth(c) - y||_2`.
    pub fn residual_norm(&mut self, c: &[Complex64]) -> f64 {
        self.load_residual(c);
        l2_norm(&self.restricted)
    }

    // work <- E_X(R_X synth(c) - y)
    fn load_residual(&mut self, c: &[Complex64]) {
        self.work.copy_from_slice(c);
        self.system.synthesize_in_place(&mut self.work);
        for ((r, &i), &y) in self.restricted.iter_mut().zip(self.samples.indices()).zip(self.observed) {
            *r = self.work[i] - y;
        }
        self.work.fill(Complex64::new(0.0, 0.0));
        for (&r, &i) in self.restricted.iter().zip(self.samples.indices()) {
            self.work[i] = r;
        }
    }

    /// Projects `c` in place; returns the residual norm before projecting.
    pub fn project_in_place(&mut self, c: &mut [Complex64]) -> f64 {
        self.load_residual(c);
        let rho = l2_norm(&self.work);
        if rho <= self.sigma {
            return rho;
        }
        let shrink = 1.0 - self.sigma / rho;
        for z in self.work.iter_mut() {
            *z *= shrink;
        }
        self.system.analyze_in_place(&mut self.work);
        for (ci, wi) in c.iter_mut().zip(&self.work) {
            *ci -= wi;
        }
        rho
    }
}

pub fn project_fidelity(
    system: &OrthonormalSystem,
    c: &CoefficientVector,
    samples: &SampleSet,
    observed: &[Complex64],
    sigma: f64,
) -> Result<CoefficientVector> {
    if c.len() != system.size() {
        return Err(Error::DimensionMismatch {
            expected: system.size(),
            found: c.len(),
        });
    }
    let mut proj = FidelityProjector::new(system, samples, observed, sigma)?;
    let mut entries = c.entries().to_vec();
    proj.project_in_place(&mut entries);
    Ok(CoefficientVector::new(Some(system.spec().clone()), entries))
}
