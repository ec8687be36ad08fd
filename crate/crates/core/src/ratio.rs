//! The Fourier ratio and the soft sparsification it controls.
//!
//! For a nonzero coefficient vector `c`, `FR(c) = ||c||_1 / ||c||_2` lies in
//! `[1, sqrt(nnz(c))]`. Keeping the `s = ceil(FR^2 / eta^2)` largest entries
//! leaves an l2 tail of at most `eta ||c||_2`, because the `j`-th largest
//! magnitude is at most `FR ||c||_2 / j`.

use std::cmp::Ordering;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::signal::{l1_norm, l2_norm, CoefficientVector};

/// Relative slack for inequalities that are exact in real arithmetic.
const EXACT_SLACK: f64 = 1e-12;

pub fn fourier_ratio(c: &CoefficientVector) -> Result<f64> {
    fourier_ratio_of(c.entries())
}

pub fn fourier_ratio_of(entries: &[Complex64]) -> Result<f64> {
    let l2 = l2_norm(entries);
    if l2 == 0.0 {
        return Err(Error::ZeroVector("the Fourier ratio"));
    }
    Ok(l1_norm(entries) / l2)
}

/// `ln(max(e, x))`: a log factor floored at 1.
pub fn floored_ln(x: f64) -> f64 {
    x.max(std::f64::consts::E).ln()
}

/// `min(len, ceil(r^2 / eta^2))`.
pub fn sparsity_level(r: f64, eta: f64, len: usize) -> usize {
    let s = (r * r / (eta * eta)).ceil();
    if s >= len as f64 {
        len
    } else {
        s as usize
    }
}

/// Support size of the refined sparsifier, `C0 (r/eps)^2 log(r/eps)^2 log M`,
/// with the same floored log. Reported next to the elementary `s`; the constant
/// is not known so callers pick it.
pub fn refined_support_size(r: f64, eps: f64, m: usize, c0: f64) -> f64 {
    let l = floored_ln(r / eps);
    c0 * (r * r) / (eps * eps) * l * l * (m as f64).ln()
}

/// Indices ordered by decreasing magnitude; equal magnitudes keep the lower
/// index first.
pub fn magnitude_order(entries: &[Complex64]) -> Vec<usize> {
    let mags: Vec<f64> = entries.iter().map(|z| z.norm()).collect();
    let mut idx: Vec<usize> = (0..entries.len()).collect();
    idx.sort_by(|&a, &b| {
        mags[b]
            .partial_cmp(&mags[a])
            .unwrap_or(Ordering::Equal)
            .then(a.cmp(&b))
    });
    idx
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SparsifyResult {
    /// Retained indices in decreasing magnitude order.
    pub support: Vec<usize>,
    pub truncation: CoefficientVector,
    pub s: usize,
    pub ratio: f64,
    pub tail_l2: f64,
    pub tail_l1: f64,
}

/// Keeps the `s` largest entries of `c`.
pub fn truncate_to_top(c: &CoefficientVector, s: usize) -> SparsifyResult {
    let entries = c.entries();
    let order = magnitude_order(entries);
    let s = s.min(entries.len());
    let support = order[..s].to_vec();
    let mut kept = vec![Complex64::new(0.0, 0.0); entries.len()];
    for &j in &support {
        kept[j] = entries[j];
    }
    let tail = &order[s..];
    // fold from +0.0: an empty float `sum` is -0.0
    let tail_l2 = tail.iter().fold(0.0, |acc, &j| acc + entries[j].norm_sqr()).sqrt();
    let tail_l1 = tail.iter().fold(0.0, |acc, &j| acc + entries[j].norm());
    SparsifyResult {
        support,
        truncation: CoefficientVector::new(c.system().cloned(), kept),
        s,
        ratio: fourier_ratio_of(entries).unwrap_or(f64::NAN),
        tail_l2,
        tail_l1,
    }
}

/// Truncates `c` to its `min(M, ceil(FR(c)^2 / eta^2))` largest entries.
pub fn soft_sparsify(c: &CoefficientVector, eta: f64) -> Result<SparsifyResult> {
    if !(eta > 0.0 && eta < 1.0) {
        return Err(invalid("eta", format!("{eta} is outside (0, 1)")));
    }
    let r = fourier_ratio(c)?;
    Ok(truncate_to_top(c, sparsity_level(r, eta, c.len())))
}

/// Checks `|c|_(j) <= FR(c) ||c||_2 / j` for every rank `j` (1-based).
pub fn sorted_decay_check(c: &CoefficientVector) -> Result<bool> {
    let r = fourier_ratio(c)?;
    let scale = r * c.l2_norm();
    let mut mags: Vec<f64> = c.entries().iter().map(|z| z.norm()).collect();
    mags.sort_by(|a, b| b.partial_cmp(a).unwrap_or(Ordering::Equal));
    Ok(mags
        .iter()
        .enumerate()
        .all(|(i, &m)| m <= scale / (i + 1) as f64 * (1.0 + EXACT_SLACK)))
}

/// The coefficient model `c_j = 1/j`, `j = 1..M`.
pub fn harmonic_model(m: usize) -> Result<CoefficientVector> {
    if m < 3 {
        return Err(invalid("m", format!("harmonic model needs M >= 3, got {m}")));
    }
    Ok(CoefficientVector::raw(
        (1..=m).map(|j| Complex64::new(1.0 / j as f64, 0.0)).collect(),
    ))
}

/// `(sqrt 6 / pi) ln M`, the lower bound on `FR` of the harmonic model.
pub fn harmonic_ratio_lower_bound(m: usize) -> f64 {
    6f64.sqrt() / std::f64::consts::PI * (m as f64).ln()
}

/// `ln((M+1)/(S+1))`, a lower bound on `sum_{j=S+1}^{M} 1/j`.
pub fn harmonic_tail_lower_bound(m: usize, s: usize) -> f64 {
    ((m as f64 + 1.0) / (s as f64 + 1.0)).ln()
}
