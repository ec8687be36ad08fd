//! Finite abelian groups written as products of cyclic factors.
//!
//! Elements are addressed by a flat index in `0..M` using mixed-radix order
//! with the last factor varying fastest, so `Z_4 x Z_3` stores `(x1, x2)` at
//! `3 * x1 + x2`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct FiniteAbelianGroup {
    factors: Vec<usize>,
    size: usize,
}

impl FiniteAbelianGroup {
    pub fn new(factors: Vec<usize>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::InvalidGroup("at least one cyclic factor is required".into()));
        }
        if let Some(pos) = factors.iter().position(|&n| n == 0) {
            return Err(Error::InvalidGroup(format!("factor {pos} has order 0")));
        }
        let size = factors
            .iter()
            .try_fold(1usize, |acc, &n| acc.checked_mul(n))
            .ok_or_else(|| Error::InvalidGroup("group order overflows usize".into()))?;
        Ok(Self { factors, size })
    }

    pub fn cyclic(n: usize) -> Result<Self> {
        Self::new(vec![n])
    }

    /// `Z_2^n`.
    pub fn boolean_cube(n: u32) -> Result<Self> {
        Self::new(vec![2; n as usize])
    }

    pub fn factors(&self) -> &[usize] {
        &self.factors
    }

    pub fn rank(&self) -> usize {
        self.factors.len()
    }

    /// Group order `M`.
    pub fn size(&self) -> usize {
        self.size
    }

    /// Flat-index stride of each factor.
    pub fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.factors.len()];
        for i in (0..self.factors.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * self.factors[i + 1];
        }
        strides
    }

    pub fn coords(&self, mut index: usize) -> Vec<usize> {
        debug_assert!(index < self.size);
        let mut out = vec![0; self.factors.len()];
        for (slot, &n) in out.iter_mut().zip(&self.factors).rev() {
            *slot = index % n;
            index /= n;
        }
        out
    }

    pub fn index_of(&self, coords: &[usize]) -> usize {
        debug_assert_eq!(coords.len(), self.factors.len());
        coords
            .iter()
            .zip(&self.factors)
            .fold(0, |acc, (&x, &n)| acc * n + x % n)
    }

    /// The pairing `<gamma, x> = sum_i gamma_i x_i / n_i` reduced mod 1.
    pub fn pairing(&self, gamma: usize, x: usize) -> f64 {
        let g = self.coords(gamma);
        let y = self.coords(x);
        let mut acc = 0.0;
        for ((&gi, &xi), &n) in g.iter().zip(&y).zip(&self.factors) {
            acc += ((gi * xi) % n) as f64 / n as f64;
        }
        acc.fract()
    }
}

impl TryFrom<Vec<usize>> for FiniteAbelianGroup {
    type Error = Error;

    fn try_from(factors: Vec<usize>) -> Result<Self> {
        Self::new(factors)
    }
}

impl From<FiniteAbelianGroup> for Vec<usize> {
    fn from(g: FiniteAbelianGroup) -> Self {
        g.factors
    }
}

impl fmt::Display for FiniteAbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, n) in self.factors.iter().enumerate() {
            if i > 0 {
                f.write_str(" x ")?;
            }
            write!(f, "Z_{n}")?;
        }
        Ok(())
    }
}

/// Parses `"4x6"` or `"16"`.
impl FromStr for FiniteAbelianGroup {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let factors = s
            .split(['x', 'X', ','])
            .map(|t| {
                t.trim()
                    .parse::<usize>()
                    .map_err(|e| Error::Parse(format!("bad group factor `{t}`: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(factors)
    }
}
