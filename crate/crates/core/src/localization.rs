//! Slicing along a product decomposition `G = H + K` and the localization
//! bound `max_k FR_H(f_k) >= FR(f) / sqrt(|K|)`.
//!
//! Two readings of the global ratio are supported. [`TransformReading::RowWise`]
//! transforms along `H` only, so `f^(m, k) = f_k^(m)`; for it the bound is a
//! theorem (Cauchy-Schwarz across `k` plus Parseval). [`TransformReading::Full`]
//! uses the DFT on all of `G`; it is reported for comparison but the bound can
//! fail for it (see the tests for a witness).

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::group::FiniteAbelianGroup;
use crate::ratio::fourier_ratio_of;
use crate::signal::{l1_norm, l2_norm, Signal};
use crate::system::OrthonormalSystem;

/// Relative slack when asserting the bound.
pub const LOCALIZATION_SLACK: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProductDecomposition {
    group: FiniteAbelianGroup,
    h_factors: Vec<usize>,
    k_factors: Vec<usize>,
    h_group: FiniteAbelianGroup,
    k_group: FiniteAbelianGroup,
    h_offsets: Vec<usize>,
    k_offsets: Vec<usize>,
}

impl ProductDecomposition {
    /// `h_factors` are 0-based positions of the factors forming `H`; the rest form `K`.
    pub fn new(group: &FiniteAbelianGroup, h_factors: &[usize]) -> Result<Self> {
        let rank = group.rank();
        let mut h: Vec<usize> = h_factors.to_vec();
        h.sort_unstable();
        h.dedup();
        if h.iter().any(|&i| i >= rank) {
            return Err(invalid("split", format!("factor index out of range for {group}")));
        }
        let k: Vec<usize> = (0..rank).filter(|i| !h.contains(i)).collect();
        if h.is_empty() || k.is_empty() {
            return Err(invalid("split", "both H and K must contain at least one factor"));
        }
        let pick = |idx: &[usize]| -> Result<FiniteAbelianGroup> {
            FiniteAbelianGroup::new(idx.iter().map(|&i| group.factors()[i]).collect())
        };
        let h_group = pick(&h)?;
        let k_group = pick(&k)?;
        let strides = group.strides();
        let offsets = |sub: &FiniteAbelianGroup, idx: &[usize]| -> Vec<usize> {
            (0..sub.size())
                .map(|e| {
                    sub.coords(e)
                        .iter()
                        .zip(idx)
                        .map(|(&x, &i)| x * strides[i])
                        .sum()
                })
                .collect()
        };
        let h_offsets = offsets(&h_group, &h);
        let k_offsets = offsets(&k_group, &k);
        Ok(Self {
            group: group.clone(),
            h_factors: h,
            k_factors: k,
            h_group,
            k_group,
            h_offsets,
            k_offsets,
        })
    }

    /// Parses `"1|2,3"`: 1-based factor positions of `H`, then of `K`.
    pub fn parse(group: &FiniteAbelianGroup, split: &str) -> Result<Self> {
        let split = split.trim().trim_start_matches("split=");
        let (h, k) = split
            .split_once('|')
            .ok_or_else(|| Error::Parse(format!("split `{split}` needs the form H|K")))?;
        let list = |s: &str| -> Result<Vec<usize>> {
            s.split(',')
                .filter(|t| !t.trim().is_empty())
                .map(|t| match t.trim().parse::<usize>() {
                    Ok(i) if i >= 1 => Ok(i - 1),
                    _ => Err(Error::Parse(format!("bad factor position `{t}` (1-based)"))),
                })
                .collect()
        };
        let h = list(h)?;
        let k = list(k)?;
        let d = Self::new(group, &h)?;
        let mut k_sorted = k.clone();
        k_sorted.sort_unstable();
        if k_sorted != d.k_factors {
            return Err(Error::Parse(format!(
                "split `{split}` must list every factor exactly once"
            )));
        }
        Ok(d)
    }

    pub fn group(&self) -> &FiniteAbelianGroup {
        &self.group
    }

    pub fn h_group(&self) -> &FiniteAbelianGroup {
        &self.h_group
    }

    pub fn k_group(&self) -> &FiniteAbelianGroup {
        &self.k_group
    }

    pub fn h_factors(&self) -> &[usize] {
        &self.h_factors
    }

    pub fn k_factors(&self) -> &[usize] {
        &self.k_factors
    }

    /// Flat index in `G` of `(h, k)`.
    pub fn element(&self, h: usize, k: usize) -> usize {
        self.h_offsets[h] + self.k_offsets[k]
    }
}

/// `f_k(h) = f(h, k)` for every `k` in `K`.
pub fn slice(f: &Signal, d: &ProductDecomposition) -> Result<Vec<Signal>> {
    if f.group() != d.group() {
        return Err(Error::DomainMismatch {
            expected: d.group().clone(),
            found: f.group().clone(),
        });
    }
    let values = f.values();
    (0..d.k_group.size())
        .map(|k| {
            let row = (0..d.h_group.size()).map(|h| values[d.element(h, k)]).collect();
            Signal::new(d.h_group.clone(), row)
        })
        .collect()
}

/// Inverse of [`slice`].
pub fn reassemble(slices: &[Signal], d: &ProductDecomposition) -> Result<Signal> {
    if slices.len() != d.k_group.size() {
        return Err(Error::DimensionMismatch {
            expected: d.k_group.size(),
            found: slices.len(),
        });
    }
    let mut out = vec![Complex64::new(0.0, 0.0); d.group.size()];
    for (k, s) in slices.iter().enumerate() {
        if s.group() != d.h_group() {
            return Err(Error::DomainMismatch {
                expected: d.h_group.clone(),
                found: s.group().clone(),
            });
        }
        for (h, &v) in s.values().iter().enumerate() {
            out[d.element(h, k)] = v;
        }
    }
    Signal::new(d.group.clone(), out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TransformReading {
    /// DFT along the `H` factors only.
    RowWise,
    /// DFT on the whole group.
    Full,
}

impl fmt::Display for TransformReading {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TransformReading::RowWise => "row-wise",
            TransformReading::Full => "full",
        })
    }
}

impl FromStr for TransformReading {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "row-wise" | "rowwise" | "row" => Ok(TransformReading::RowWise),
            "full" | "2d" => Ok(TransformReading::Full),
            other => Err(Error::Parse(format!("unknown transform reading `{other}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocalizationReport {
    pub reading: TransformReading,
    pub max_slice_fr: f64,
    pub global_fr: f64,
    /// `global_fr / sqrt(|K|)`.
    pub lower_bound: f64,
    pub holds: bool,
    /// Slice index (flat, in `K`) attaining `max_slice_fr`.
    pub achieving_k: usize,
    /// `None` for identically zero slices.
    pub slice_frs: Vec<Option<f64>>,
}

struct SliceNorms {
    l1: f64,
    l2_sq: f64,
    fr: Option<f64>,
}

pub fn localization_check(
    f: &Signal,
    d: &ProductDecomposition,
    reading: TransformReading,
) -> Result<LocalizationReport> {
    if !f.is_nonzero() {
        return Err(Error::ZeroVector("the localization check"));
    }
    let slices = slice(f, d)?;
    let h_dft = OrthonormalSystem::dft(d.h_group.clone());
    let norms: Vec<SliceNorms> = slices
        .par_iter()
        .map(|s| {
            let mut buf = s.values().to_vec();
            h_dft.analyze_in_place(&mut buf);
            SliceNorms {
                l1: l1_norm(&buf),
                l2_sq: buf.iter().map(|z| z.norm_sqr()).sum(),
                fr: fourier_ratio_of(&buf).ok(),
            }
        })
        .collect();

    let global_fr = match reading {
        TransformReading::RowWise => {
            let l1: f64 = norms.iter().map(|n| n.l1).sum();
            let l2 = norms.iter().map(|n| n.l2_sq).sum::<f64>().sqrt();
            l1 / l2
        }
        TransformReading::Full => {
            let mut buf = f.values().to_vec();
            OrthonormalSystem::dft(d.group.clone()).analyze_in_place(&mut buf);
            l1_norm(&buf) / l2_norm(&buf)
        }
    };

    let (achieving_k, max_slice_fr) = norms
        .iter()
        .enumerate()
        .filter_map(|(k, n)| n.fr.map(|r| (k, r)))
        .fold((0, f64::NEG_INFINITY), |best, cur| if cur.1 > best.1 { cur } else { best });
    let lower_bound = global_fr / (d.k_group.size() as f64).sqrt();
    Ok(LocalizationReport {
        reading,
        max_slice_fr,
        global_fr,
        lower_bound,
        holds: max_slice_fr >= lower_bound * (1.0 - LOCALIZATION_SLACK),
        achieving_k,
        slice_frs: norms.into_iter().map(|n| n.fr).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{complex_gaussian, rng};
    use crate::signal::l2_distance;
    use std::f64::consts::PI;

    fn random_signal(g: &FiniteAbelianGroup, seed: u64) -> Signal {
        let mut r = rng(seed);
        Signal::new(g.clone(), complex_gaussian(&mut r, g.size())).unwrap()
    }

    fn row_delta(n: usize, t: usize, a0: usize, seed: u64) -> (Signal, Signal) {
        let zn = FiniteAbelianGroup::cyclic(n).unwrap();
        let g = random_signal(&zn, seed);
        let mut values = vec![Complex64::new(0.0, 0.0); n * t];
        for time in 0..n {
            values[time * t + a0] = g.values()[time];
        }
        (Signal::new(FiniteAbelianGroup::new(vec![n, t]).unwrap(), values).unwrap(), g)
    }

    #[test]
    fn both_parts_must_be_nonempty() {
        let g = FiniteAbelianGroup::new(vec![4, 3]).unwrap();
        assert!(ProductDecomposition::new(&g, &[]).is_err());
        assert!(ProductDecomposition::new(&g, &[0, 1]).is_err());
        assert!(ProductDecomposition::new(&g, &[2]).is_err());
        let d = ProductDecomposition::new(&g, &[0]).unwrap();
        assert_eq!(d.h_group().size() * d.k_group().size(), g.size());
    }

    #[test]
    fn parse_split() {
        let g = FiniteAbelianGroup::new(vec![2, 2, 3]).unwrap();
        let d = ProductDecomposition::parse(&g, "split=1|2,3").unwrap();
        assert_eq!(d.h_factors(), &[0]);
        assert_eq!(d.k_factors(), &[1, 2]);
        assert!(ProductDecomposition::parse(&g, "1|2").is_err());
        assert!(ProductDecomposition::parse(&g, "0|1,2").is_err());
        assert!(ProductDecomposition::parse(&g, "1,2,3").is_err());
    }

    #[test]
    fn row_delta_slices() {
        let (f, g) = row_delta(6, 4, 2, 1);
        let d = ProductDecomposition::new(f.group(), &[0]).unwrap();
        let slices = slice(&f, &d).unwrap();
        assert_eq!(slices.len(), 4);
        for (k, s) in slices.iter().enumerate() {
            if k == 2 {
                assert_eq!(s.values(), g.values());
            } else {
                assert!(!s.is_nonzero());
            }
        }
    }

    #[test]
    fn slice_then_reassemble_is_identity() {
        for (factors, h) in [(vec![4, 3], vec![0]), (vec![2, 3, 2], vec![1]), (vec![2, 3, 4], vec![0, 2])] {
            let g = FiniteAbelianGroup::new(factors).unwrap();
            let d = ProductDecomposition::new(&g, &h).unwrap();
            let f = random_signal(&g, 3);
            let back = reassemble(&slice(&f, &d).unwrap(), &d).unwrap();
            assert_eq!(back, f);
        }
    }

    #[test]
    fn slice_rejects_wrong_group() {
        let g = FiniteAbelianGroup::new(vec![4, 3]).unwrap();
        let d = ProductDecomposition::new(&g, &[0]).unwrap();
        let other = Signal::zeros(FiniteAbelianGroup::new(vec![3, 4]).unwrap());
        assert!(slice(&other, &d).is_err());
    }

    #[test]
    fn constant_signal() {
        let g = FiniteAbelianGroup::new(vec![8, 5]).unwrap();
        let d = ProductDecomposition::new(&g, &[0]).unwrap();
        let f = Signal::from_real(g, &[2.0; 40]).unwrap();
        for reading in [TransformReading::RowWise, TransformReading::Full] {
            let rep = localization_check(&f, &d, reading).unwrap();
            assert!((rep.max_slice_fr - 1.0).abs() < 1e-12);
            assert!(rep.holds);
            assert!(rep.slice_frs.iter().all(|r| (r.unwrap() - 1.0).abs() < 1e-12));
        }
        let full = localization_check(&f, &d, TransformReading::Full).unwrap();
        assert!((full.global_fr - 1.0).abs() < 1e-12);
    }

    #[test]
    fn row_delta_attains_equality() {
        let (n, t) = (16, 4);
        let (f, g) = row_delta(n, t, 1, 7);
        let d = ProductDecomposition::new(f.group(), &[0]).unwrap();
        let fr_g = fourier_ratio_of(
            OrthonormalSystem::dft(g.group().clone()).analyze(&g).unwrap().entries(),
        )
        .unwrap();
        for reading in [TransformReading::RowWise, TransformReading::Full] {
            let rep = localization_check(&f, &d, reading).unwrap();
            assert_eq!(rep.achieving_k, 1);
            assert!((rep.max_slice_fr - fr_g).abs() < 1e-12);
            assert!(rep.slice_frs.iter().filter(|r| r.is_some()).count() == 1);
            let expected_global = match reading {
                TransformReading::RowWise => fr_g,
                TransformReading::Full => (t as f64).sqrt() * fr_g,
            };
            assert!((rep.global_fr - expected_global).abs() < 1e-9 * expected_global);
            if reading == TransformReading::Full {
                assert!((rep.max_slice_fr / rep.lower_bound - 1.0).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn zero_signal_is_rejected() {
        let g = FiniteAbelianGroup::new(vec![4, 4]).unwrap();
        let d = ProductDecomposition::new(&g, &[0]).unwrap();
        assert!(localization_check(&Signal::zeros(g), &d, TransformReading::RowWise).is_err());
    }

    #[test]
    fn row_wise_bound_on_random_signals() {
        let cases: [(Vec<usize>, Vec<usize>); 3] = [(vec![8, 8], vec![0]), (vec![16, 4], vec![0]), (vec![2, 2, 3], vec![0])];
        for (factors, h) in cases {
            let g = FiniteAbelianGroup::new(factors).unwrap();
            let d = ProductDecomposition::new(&g, &h).unwrap();
            for seed in 0..200 {
                let rep = localization_check(&random_signal(&g, seed), &d, TransformReading::RowWise).unwrap();
                assert!(rep.holds, "{g} seed {seed}: {rep:?}");
            }
        }
    }

    #[test]
    fn row_wise_identities() {
        let g = FiniteAbelianGroup::new(vec![6, 5]).unwrap();
        let d = ProductDecomposition::new(&g, &[0]).unwrap();
        let f = random_signal(&g, 11);
        let h_dft = OrthonormalSystem::dft(d.h_group().clone());
        let row_hats: Vec<Vec<Complex64>> = slice(&f, &d)
            .unwrap()
            .iter()
            .map(|s| h_dft.analyze(s).unwrap().into_entries())
            .collect();
        // the row-wise transform of f is the Gabor-block analysis on Z_6 x Z_5
        let gabor = OrthonormalSystem::gabor_block(6, 5).unwrap();
        let partial = gabor.analyze(&f).unwrap();
        let l1_rows: f64 = row_hats.iter().map(|r| l1_norm(r)).sum();
        assert!((partial.l1_norm() - l1_rows).abs() < 1e-12 * l1_rows);
        let l2_rows_sq: f64 = row_hats.iter().map(|r| l2_norm(r).powi(2)).sum();
        let full = OrthonormalSystem::dft(g.clone()).analyze(&f).unwrap();
        assert!((full.l2_norm().powi(2) - l2_rows_sq).abs() < 1e-10 * l2_rows_sq);
        for (k, r) in row_hats.iter().enumerate() {
            for (m, z) in r.iter().enumerate() {
                assert!((partial.entries()[m * 5 + k] - z).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn full_reading_can_violate_the_bound() {
        // f(h, k) = e^{2 pi i h k / 8}: every slice is one character (FR 1),
        // while the full 2-D transform spreads evenly, FR = |K| = 8.
        let g = FiniteAbelianGroup::new(vec![8, 8]).unwrap();
        let d = ProductDecomposition::new(&g, &[0]).unwrap();
        let values = (0..64)
            .map(|i| Complex64::from_polar(1.0, 2.0 * PI * ((i / 8) * (i % 8)) as f64 / 8.0))
            .collect();
        let f = Signal::new(g, values).unwrap();
        let full = localization_check(&f, &d, TransformReading::Full).unwrap();
        assert!((full.max_slice_fr - 1.0).abs() < 1e-9);
        assert!((full.global_fr - 8.0).abs() < 1e-9);
        assert!(!full.holds);
        let row = localization_check(&f, &d, TransformReading::RowWise).unwrap();
        // row-wise: every row is a spike of height sqrt 8, FR = sqrt 8, bound met with equality
        assert!(row.holds);
        assert!((row.global_fr - 8f64.sqrt()).abs() < 1e-9);
        assert!((row.lower_bound - 1.0).abs() < 1e-9);
        let _ = l2_distance(&[], &[]);
    }
}
