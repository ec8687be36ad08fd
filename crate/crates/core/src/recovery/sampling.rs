use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::group::FiniteAbelianGroup;
use crate::random::rng;
use crate::signal::Signal;

/// Observed subset `X` of the domain.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleSet {
    group: FiniteAbelianGroup,
    kept: Vec<usize>,
    p: f64,
    seed: Option<u64>,
}

impl SampleSet {
    /// Keeps each index independently with probability `p`.
    pub fn bernoulli(group: &FiniteAbelianGroup, p: f64, seed: u64) -> Result<Self> {
        if !(p > 0.0 && p <= 1.0) {
            return Err(invalid("p", format!("{p} is outside (0, 1]")));
        }
        let mut r = rng(seed);
        let kept = (0..group.size()).filter(|_| r.random::<f64>() < p).collect();
        Ok(Self {
            group: group.clone(),
            kept,
            p,
            seed: Some(seed),
        })
    }

    /// An explicit subset; `p` is recorded as `|X| / M`.
    pub fn from_indices(group: &FiniteAbelianGroup, mut kept: Vec<usize>) -> Result<Self> {
        kept.sort_unstable();
        kept.dedup();
        if let Some(&last) = kept.last() {
            if last >= group.size() {
                return Err(invalid("kept", format!("index {last} is outside {group}")));
            }
        }
        let p = kept.len() as f64 / group.size() as f64;
        Ok(Self {
            group: group.clone(),
            kept,
            p,
            seed: None,
        })
    }

    pub fn full(group: &FiniteAbelianGroup) -> Self {
        Self {
            group: group.clone(),
            kept: (0..group.size()).collect(),
            p: 1.0,
            seed: None,
        }
    }

    pub fn group(&self) -> &FiniteAbelianGroup {
        &self.group
    }

    /// Sorted kept indices.
    pub fn indices(&self) -> &[usize] {
        &self.kept
    }

    pub fn len(&self) -> usize {
        self.kept.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kept.is_empty()
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    /// `f` restricted to `X`, in index order.
    pub fn restrict(&self, f: &Signal) -> Result<Vec<Complex64>> {
        if f.group() != &self.group {
            return Err(Error::DomainMismatch {
                expected: self.group.clone(),
                found: f.group().clone(),
            });
        }
        Ok(self.restrict_slice(f.values()))
    }

    pub(crate) fn restrict_slice(&self, values: &[Complex64]) -> Vec<Complex64> {
        self.kept.iter().map(|&i| values[i]).collect()
    }

    /// Places `y` on `X` and zeros elsewhere.
    pub fn extend_by_zero(&self, y: &[Complex64]) -> Result<Vec<Complex64>> {
        if y.len() != self.kept.len() {
            return Err(Error::DimensionMismatch {
                expected: self.kept.len(),
                found: y.len(),
            });
        }
        let mut out = vec![Complex64::new(0.0, 0.0); self.group.size()];
        for (&i, &v) in self.kept.iter().zip(y) {
            out[i] = v;
        }
        Ok(out)
    }
}

pub fn bernoulli_sample(group: &FiniteAbelianGroup, p: f64, seed: u64) -> Result<SampleSet> {
    SampleSet::bernoulli(group, p, seed)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn p_one_keeps_everything() {
        let g = FiniteAbelianGroup::new(vec![5, 7]).unwrap();
        let x = bernoulli_sample(&g, 1.0, 3).unwrap();
        assert_eq!(x.indices(), SampleSet::full(&g).indices());
    }

    #[test]
    fn p_out_of_range() {
        let g = FiniteAbelianGroup::cyclic(8).unwrap();
        for p in [0.0, -0.5, 1.0001, f64::NAN] {
            assert!(bernoulli_sample(&g, p, 0).is_err());
        }
    }

    #[test]
    fn same_seed_same_set() {
        let g = FiniteAbelianGroup::cyclic(1000).unwrap();
        let a = bernoulli_sample(&g, 0.3, 11).unwrap();
        let b = bernoulli_sample(&g, 0.3, 11).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.indices(), bernoulli_sample(&g, 0.3, 12).unwrap().indices());
    }

    #[test]
    fn size_is_binomial() {
        let g = FiniteAbelianGroup::cyclic(10_000).unwrap();
        let mean = (0..100)
            .map(|seed| bernoulli_sample(&g, 0.5, seed).unwrap().len() as f64)
            .sum::<f64>()
            / 100.0;
        // sd of a single count is 50; the 3-sigma band from the single-count sd
        assert!((mean - 5000.0).abs() <= 150.0, "mean {mean}");
        // and the tighter band for the mean of 100 draws
        assert!((mean - 5000.0).abs() <= 3.0 * 50.0 / 10.0, "mean {mean}");
    }

    #[test]
    fn explicit_indices_are_validated() {
        let g = FiniteAbelianGroup::cyclic(4).unwrap();
        assert!(SampleSet::from_indices(&g, vec![0, 4]).is_err());
        let x = SampleSet::from_indices(&g, vec![3, 1, 1]).unwrap();
        assert_eq!(x.indices(), &[1, 3]);
        assert_eq!(x.p(), 0.5);
    }
}
