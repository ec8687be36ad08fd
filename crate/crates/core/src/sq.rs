//! Random coefficient-sampling estimator and the SQ-dimension bound built on it.
//!
//! For `g = analyze(f)`, draw indices `m_1..m_k` with `Pr(m) = |g(m)| / ||g||_1`
//! and set `P(x) = (||g||_1 / k) sum_i phi_{m_i}(x) g(m_i)/|g(m_i)|`. Each term is
//! an unbiased estimate of `f(x)`, so `E |f(x) - P(x)|^2 = Var Z(x) / k`.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{invalid, Error, Result};
use crate::random::{derive_seed, rng};
use crate::ratio::fourier_ratio;
use crate::signal::{l1_norm, Signal};
use crate::system::{OrthonormalSystem, SystemSpec};

/// The budget each of the three covering terms is held under.
pub const COVERING_EPS: f64 = 1.0 / 16.0;

const CEIL_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RandomFunctional {
    pub system: SystemSpec,
    /// `m_1..m_k`, with multiplicity, in draw order.
    pub draws: Vec<usize>,
    /// `||g||_1 / k`.
    pub amplitude: f64,
    /// `g(m_i) / |g(m_i)|`.
    pub phases: Vec<Complex64>,
    pub seed: u64,
}

impl RandomFunctional {
    pub fn k(&self) -> usize {
        self.draws.len()
    }

    /// Coefficients `A sum_i u_i e_{m_i}` of `P` in the system.
    pub fn coefficients(&self, m: usize) -> Vec<Complex64> {
        let mut c = vec![Complex64::new(0.0, 0.0); m];
        for (&j, &u) in self.draws.iter().zip(&self.phases) {
            c[j] += self.amplitude * u;
        }
        c
    }

    /// `P` on every point of the domain.
    pub fn evaluate(&self, system: &OrthonormalSystem) -> Result<Signal> {
        if system.spec() != &self.system {
            return Err(invalid("system", format!("functional was drawn for {}", self.system)));
        }
        let mut c = self.coefficients(system.size());
        system.synthesize_in_place(&mut c);
        Signal::new(system.group().clone(), c)
    }

    /// `P(x)` at one point, straight from the sum over draws.
    pub fn evaluate_at(&self, system: &OrthonormalSystem, x: usize) -> Complex64 {
        self.draws
            .iter()
            .zip(&self.phases)
            .map(|(&j, &u)| system.basis_value(j, x) * u)
            .sum::<Complex64>()
            * self.amplitude
    }
}

/// Sampling weights `|g(m)| / ||g||_1` of the estimator.
pub fn sampling_weights(system: &OrthonormalSystem, f: &Signal) -> Result<Vec<f64>> {
    let g = system.analyze(f)?;
    let total = g.l1_norm();
    if total == 0.0 {
        return Err(Error::ZeroVector("the sampled signal"));
    }
    Ok(g.entries().iter().map(|z| z.norm() / total).collect())
}

pub fn sq_sample(system: &OrthonormalSystem, f: &Signal, k: usize, seed: u64) -> Result<RandomFunctional> {
    if k == 0 {
        return Err(invalid("k", "must be at least 1"));
    }
    let g = system.analyze(f)?;
    let total = l1_norm(g.entries());
    if total == 0.0 {
        return Err(Error::ZeroVector("the sampled signal"));
    }
    let weights: Vec<f64> = g.entries().iter().map(|z| z.norm()).collect();
    let dist = WeightedIndex::new(&weights).map_err(|e| invalid("f", e.to_string()))?;
    let mut r = rng(seed);
    let draws: Vec<usize> = (0..k).map(|_| dist.sample(&mut r)).collect();
    let phases = draws.iter().map(|&j| g.entries()[j] / weights[j]).collect();
    Ok(RandomFunctional {
        system: system.spec().clone(),
        draws,
        amplitude: total / k as f64,
        phases,
        seed,
    })
}

/// `Var Z(x) = ||g||_1 sum_m |g(m)| |phi_m(x)|^2 - |f(x)|^2` for every `x`; the
/// variance of one draw of the estimator.
pub fn estimator_variance(system: &OrthonormalSystem, f: &Signal) -> Result<Vec<f64>> {
    let g = system.analyze(f)?;
    let total = g.l1_norm();
    if total == 0.0 {
        return Err(Error::ZeroVector("the sampled signal"));
    }
    let support: Vec<(usize, f64)> = g
        .entries()
        .iter()
        .enumerate()
        .filter(|(_, z)| z.norm() > 0.0)
        .map(|(j, z)| (j, z.norm()))
        .collect();
    Ok((0..system.size())
        .into_par_iter()
        .map(|x| {
            let second: f64 = support
                .iter()
                .map(|&(j, w)| w * system.basis_value(j, x).norm_sqr())
                .sum();
            (total * second - f.values()[x].norm_sqr()).max(0.0)
        })
        .collect())
}

/// Checks a probability vector over the domain.
pub fn validate_distribution(weights: &[f64], m: usize) -> Result<()> {
    if weights.len() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            found: weights.len(),
        });
    }
    if weights.iter().any(|&w| !(w.is_finite() && w >= 0.0)) {
        return Err(invalid("distribution", "weights must be finite and nonnegative"));
    }
    let sum: f64 = weights.iter().sum();
    if (sum - 1.0).abs() > 1e-9 {
        return Err(invalid("distribution", format!("weights sum to {sum}, not 1")));
    }
    Ok(())
}

pub fn uniform_distribution(m: usize) -> Vec<f64> {
    vec![1.0 / m as f64; m]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MseReport {
    pub k: usize,
    pub trials: usize,
    pub empirical_mse: f64,
    /// Standard error of `empirical_mse` across trials.
    pub standard_error: f64,
    /// `sum_x p(x) Var Z(x) / k`, the exact mean of the per-trial loss.
    pub expected_mse: f64,
    /// `tau^2 r^2 ||f||_2^2 / k`; for `+-1`-valued `f` this is `M tau^2 r^2 / k`.
    pub bound: f64,
    pub ratio: f64,
    pub tau: f64,
}

impl MseReport {
    /// Whether the empirical value sits below the bound plus `sigmas` standard errors.
    pub fn within_bound(&self, sigmas: f64) -> bool {
        self.empirical_mse <= self.bound + sigmas * self.standard_error
    }
}

/// Average of `sum_x p(x) |f(x) - P(x)|^2` over `trials` fresh functionals.
/// Trial `t` uses seed `derive_seed(seed, k, t)`.
pub fn sq_mse(
    system: &OrthonormalSystem,
    f: &Signal,
    k: usize,
    trials: usize,
    seed: u64,
    distribution: &[f64],
) -> Result<MseReport> {
    validate_distribution(distribution, system.size())?;
    if trials == 0 {
        return Err(invalid("trials", "must be at least 1"));
    }
    let g = system.analyze(f)?;
    let r = fourier_ratio(&g)?;
    let variance = estimator_variance(system, f)?;
    let losses = (0..trials)
        .into_par_iter()
        .map(|t| -> Result<f64> {
            let p = sq_sample(system, f, k, derive_seed(seed, k as u64, t as u64))?;
            let values = p.evaluate(system)?;
            Ok(values
                .values()
                .iter()
                .zip(f.values())
                .zip(distribution)
                .map(|((a, b), w)| w * (a - b).norm_sqr())
                .sum())
        })
        .collect::<Result<Vec<f64>>>()?;
    let n = trials as f64;
    let mean = losses.iter().sum::<f64>() / n;
    let spread = if trials > 1 {
        losses.iter().map(|l| (l - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    let tau = system.tau();
    Ok(MseReport {
        k,
        trials,
        empirical_mse: mean,
        standard_error: (spread / n).sqrt(),
        expected_mse: variance.iter().zip(distribution).map(|(v, w)| v * w).sum::<f64>() / k as f64,
        bound: tau * tau * r * r * f.l2_norm().powi(2) / k as f64,
        ratio: r,
        tau,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoveringParams {
    pub m: usize,
    pub tau: f64,
    pub r: f64,
    /// `>= 16^2 M tau^2 r^2`.
    pub k: u64,
    /// `>= 16 tau k`.
    pub n1: u64,
    /// `>= 16 tau r sqrt M`.
    pub n2: u64,
    pub eps: f64,
}

impl CoveringParams {
    /// `r sqrt M / k`, the largest admissible amplitude.
    pub fn amplitude_cap(&self) -> f64 {
        self.r * (self.m as f64).sqrt() / self.k as f64
    }

    pub fn amplitude_step(&self) -> f64 {
        self.amplitude_cap() / self.n1 as f64
    }
}

/// `ceil`, except that values within `1e-12` relative of an integer round to it.
fn ceil_tolerant(x: f64) -> f64 {
    let n = x.round();
    if (x - n).abs() <= CEIL_TOLERANCE * x.abs().max(1.0) {
        n
    } else {
        x.ceil()
    }
}

fn check_sq_domain(m: usize, tau: f64, r: f64) -> Result<()> {
    if m < 1 {
        return Err(invalid("m", "must be >= 1"));
    }
    let floor = 1.0 / (m as f64).sqrt();
    if !(tau.is_finite() && tau >= floor * (1.0 - CEIL_TOLERANCE)) {
        return Err(invalid("tau", format!("{tau} is below M^(-1/2) = {floor}")));
    }
    if !(r.is_finite() && r >= 1.0) {
        return Err(invalid("r", format!("{r} must be >= 1")));
    }
    Ok(())
}

/// Smallest integers meeting the three covering constraints.
pub fn covering_params(m: usize, tau: f64, r: f64) -> Result<CoveringParams> {
    check_sq_domain(m, tau, r)?;
    let mf = m as f64;
    let k = ceil_tolerant(256.0 * mf * tau * tau * r * r).max(1.0);
    let n2 = ceil_tolerant(16.0 * tau * r * mf.sqrt()).max(1.0);
    let n1 = ceil_tolerant(16.0 * tau * k).max(1.0);
    if k > u64::MAX as f64 / 2.0 || n1 > u64::MAX as f64 / 2.0 {
        return Err(invalid("m", "covering parameters overflow"));
    }
    Ok(CoveringParams {
        m,
        tau,
        r,
        k: k as u64,
        n1: n1 as u64,
        n2: n2 as u64,
        eps: COVERING_EPS,
    })
}

/// Snaps the amplitude to `{0, cap/N1, ..., cap}` and each phase to the nearest
/// `N2`-th root of unity.
pub fn quantize_functional(p: &RandomFunctional, params: &CoveringParams) -> Result<RandomFunctional> {
    let cap = params.amplitude_cap();
    if p.amplitude > cap * (1.0 + CEIL_TOLERANCE) {
        return Err(invalid(
            "amplitude",
            format!("{} exceeds r sqrt(M) / k = {cap}; the ratio r is underestimated", p.amplitude),
        ));
    }
    let step = params.amplitude_step();
    let level = (p.amplitude / step).round().min(params.n1 as f64);
    let n2 = params.n2 as f64;
    let phases = p
        .phases
        .iter()
        .map(|u| {
            let j = (u.arg() / TAU * n2).round().rem_euclid(n2);
            Complex64::from_polar(1.0, TAU * j / n2)
        })
        .collect();
    Ok(RandomFunctional {
        system: p.system.clone(),
        draws: p.draws.clone(),
        amplitude: level * step,
        phases,
        seed: p.seed,
    })
}

/// Three-term sup-norm deviation bound in the form
/// `tau k ((r sqrt M / k) / N2 + 1/N1 + 1/(N1 N2))`.
pub fn quantization_bound(params: &CoveringParams, k: usize) -> f64 {
    let (n1, n2) = (params.n1 as f64, params.n2 as f64);
    params.tau * k as f64 * (params.amplitude_cap() / n2 + 1.0 / n1 + 1.0 / (n1 * n2))
}

/// A bound that holds for every functional: amplitude error at most half a
/// grid step, phase error at most the chord `2 sin(pi / (2 N2))`.
pub fn quantization_bound_rigorous(params: &CoveringParams, k: usize, amplitude: f64) -> f64 {
    let da = params.amplitude_step() / 2.0;
    let du = 2.0 * (std::f64::consts::PI / (2.0 * params.n2 as f64)).sin();
    params.tau * k as f64 * (da + amplitude * du + da * du)
}

/// `max_x |P(x) - Q(x)|`.
pub fn sup_deviation(system: &OrthonormalSystem, p: &RandomFunctional, q: &RandomFunctional) -> Result<f64> {
    let a = p.evaluate(system)?;
    let b = q.evaluate(system)?;
    Ok(a.values()
        .iter()
        .zip(b.values())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max))
}

/// `log2` of `M^K (16^3 tau^3 M r^2 + 1) (16 tau r sqrt M)^K`, `K = 16^2 M tau^2 r^2`.
pub fn sq_dim_log2(m: usize, tau: f64, r: f64) -> Result<f64> {
    check_sq_domain(m, tau, r)?;
    let mf = m as f64;
    let k = 256.0 * mf * tau * tau * r * r;
    let middle = (4096.0 * tau.powi(3) * mf * r * r + 1.0).log2();
    Ok(k * mf.log2() + middle + k * (16.0 * tau * r * mf.sqrt()).log2())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChiSquareReport {
    pub draws: usize,
    pub statistic: f64,
    pub degrees_of_freedom: usize,
    pub p_value: f64,
}

/// Pearson goodness of fit of the sampler's index frequencies against
/// `|g(m)| / ||g||_1`.
pub fn sampler_chi_square(system: &OrthonormalSystem, f: &Signal, draws: usize, seed: u64) -> Result<ChiSquareReport> {
    let weights = sampling_weights(system, f)?;
    let p = sq_sample(system, f, draws, seed)?;
    let mut counts = vec![0usize; weights.len()];
    for &j in &p.draws {
        counts[j] += 1;
    }
    let n = draws as f64;
    let mut statistic = 0.0;
    let mut cells = 0usize;
    for (&w, &c) in weights.iter().zip(&counts) {
        if w > 0.0 {
            let e = n * w;
            statistic += (c as f64 - e).powi(2) / e;
            cells += 1;
        }
    }
    let dof = cells.saturating_sub(1);
    let p_value = if dof == 0 {
        1.0
    } else {
        let dist = ChiSquared::new(dof as f64).map_err(|e| invalid("dof", e.to_string()))?;
        dist.sf(statistic)
    };
    Ok(ChiSquareReport {
        draws,
        statistic,
        degrees_of_freedom: dof,
        p_value,
    })
}
