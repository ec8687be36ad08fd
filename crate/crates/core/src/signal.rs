//! Complex sequences over a group (spatial side) and over a basis index set
//! (coefficient side).

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::FiniteAbelianGroup;
use crate::system::SystemSpec;

pub fn l1_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm()).sum()
}

pub fn l2_norm(v: &[Complex64]) -> f64 {
    // hypot-style accumulation is not needed at these sizes
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn linf_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// `||a - b||_2`.
pub fn l2_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Signal {
    group: FiniteAbelianGroup,
    values: Vec<Complex64>,
}

impl Signal {
    pub fn new(group: FiniteAbelianGroup, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != group.size() {
            return Err(Error::DimensionMismatch {
                expected: group.size(),
                found: values.len(),
            });
        }
        Ok(Self { group, values })
    }

    pub fn zeros(group: FiniteAbelianGroup) -> Self {
        let values = vec![Complex64::new(0.0, 0.0); group.size()];
        Self { group, values }
    }

    pub fn from_real(group: FiniteAbelianGroup, values: &[f64]) -> Result<Self> {
        Self::new(group, values.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    /// Delta at `index`.
    pub fn delta(group: FiniteAbelianGroup, index: usize) -> Self {
        let mut s = Self::zeros(group);
        s.values[index] = Complex64::new(1.0, 0.0);
        s
    }

    pub fn group(&self) -> &FiniteAbelianGroup {
        &self.group
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn l1_norm(&self) -> f64 {
        l1_norm(&self.values)
    }

    pub fn l2_norm(&self) -> f64 {
        l2_norm(&self.values)
    }

    pub fn linf_norm(&self) -> f64 {
        linf_norm(&self.values)
    }

    pub fn is_nonzero(&self) -> bool {
        self.l2_norm() > 0.0
    }

    pub fn distance(&self, other: &Signal) -> f64 {
        l2_distance(&self.values, &other.values)
    }

    /// `||self - truth||_2 / ||truth||_2`.
    pub fn relative_error(&self, truth: &Signal) -> f64 {
        self.distance(truth) / truth.l2_norm()
    }

    pub fn scaled(&self, factor: Complex64) -> Signal {
        Signal {
            group: self.group.clone(),
            values: self.values.iter().map(|z| z * factor).collect(),
        }
    }
}

/// Coefficients of a signal in an orthonormal system. `system` is `None` for
/// vectors built directly on the coefficient side (e.g. generators).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoefficientVector {
    system: Option<SystemSpec>,
    entries: Vec<Complex64>,
}

impl CoefficientVector {
    pub fn new(system: Option<SystemSpec>, entries: Vec<Complex64>) -> Self {
        Self { system, entries }
    }

    pub fn raw(entries: Vec<Complex64>) -> Self {
        Self::new(None, entries)
    }

    pub fn from_real(values: &[f64]) -> Self {
        Self::raw(values.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    /// Unit vector `e_j` of length `len`.
    pub fn unit(len: usize, j: usize) -> Self {
        let mut entries = vec![Complex64::new(0.0, 0.0); len];
        entries[j] = Complex64::new(1.0, 0.0);
        Self::raw(entries)
    }

    pub fn system(&self) -> Option<&SystemSpec> {
        self.system.as_ref()
    }

    pub fn with_system(mut self, system: Option<SystemSpec>) -> Self {
        self.system = system;
        self
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn entries_mut(&mut self) -> &mut [Complex64] {
        &mut self.entries
    }

    pub fn into_entries(self) -> Vec<Complex64> {
        self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn l1_norm(&self) -> f64 {
        l1_norm(&self.entries)
    }

    pub fn l2_norm(&self) -> f64 {
        l2_norm(&self.entries)
    }

    pub fn linf_norm(&self) -> f64 {
        linf_norm(&self.entries)
    }

    pub fn nnz(&self) -> usize {
        self.entries.iter().filter(|z| z.norm_sqr() > 0.0).count()
    }

    pub fn is_nonzero(&self) -> bool {
        self.entries.iter().any(|z| z.norm_sqr() > 0.0)
    }
}
