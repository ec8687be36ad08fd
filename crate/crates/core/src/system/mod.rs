//! Orthonormal systems on finite abelian groups.
//!
//! Every system exposes an analysis map `f -> (<f, phi_j>)_j` and its inverse.
//! The inner product is `<f, g> = sum_x f(x) conj(g(x))`. Four families are
//! provided:
//!
//! * `dft` - characters `phi_gamma(x) = M^{-1/2} e^{2 pi i <gamma, x>}`,
//! * `wht` - Walsh characters on `Z_2^n`,
//! * `gabor-block` - modulated rectangular windows, one row of `Z_N x Z_T` each,
//! * `haar` - the orthonormal Haar wavelets on a dyadic `Z_M`.
//!
//! Each system reports its incoherence constant `tau = max_{j,x} |phi_j(x)|`.

mod transforms;

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::group::FiniteAbelianGroup;
use crate::signal::{CoefficientVector, Signal};
use transforms::AxisPlan;

/// Relative slack used when comparing `tau` against `M^{-1/2}`.
pub const BOUNDEDNESS_SLACK: f64 = 1e-12;

/// Label plus parameters of a system, e.g. `dft:4x6`, `wht:5`,
/// `gabor:N=16,T=8` or `haar:64`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum SystemSpec {
    Dft { group: FiniteAbelianGroup },
    Wht { n: u32 },
    GaborBlock { n: usize, t: usize },
    Haar { m: usize },
}

impl SystemSpec {
    pub fn label(&self) -> &'static str {
        match self {
            SystemSpec::Dft { .. } => "dft",
            SystemSpec::Wht { .. } => "wht",
            SystemSpec::GaborBlock { .. } => "gabor-block",
            SystemSpec::Haar { .. } => "haar",
        }
    }

    pub fn group(&self) -> Result<FiniteAbelianGroup> {
        match self {
            SystemSpec::Dft { group } => Ok(group.clone()),
            SystemSpec::Wht { n } => FiniteAbelianGroup::boolean_cube(*n),
            SystemSpec::GaborBlock { n, t } => FiniteAbelianGroup::new(vec![*n, *t]),
            SystemSpec::Haar { m } => FiniteAbelianGroup::cyclic(*m),
        }
    }
}

impl fmt::Display for SystemSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SystemSpec::Dft { group } => {
                let dims: Vec<String> = group.factors().iter().map(|n| n.to_string()).collect();
                write!(f, "dft:{}", dims.join("x"))
            }
            SystemSpec::Wht { n } => write!(f, "wht:{n}"),
            SystemSpec::GaborBlock { n, t } => write!(f, "gabor:N={n},T={t}"),
            SystemSpec::Haar { m } => write!(f, "haar:{m}"),
        }
    }
}

impl FromStr for SystemSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (label, params) = s
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("system spec `{s}` needs the form label:params")))?;
        let num = |t: &str| {
            t.trim()
                .parse::<usize>()
                .map_err(|e| Error::Parse(format!("bad number `{t}` in `{s}`: {e}")))
        };
        match label.trim() {
            "dft" => Ok(SystemSpec::Dft {
                group: params.parse()?,
            }),
            "wht" => Ok(SystemSpec::Wht {
                n: num(params)? as u32,
            }),
            "haar" => Ok(SystemSpec::Haar { m: num(params)? }),
            "gabor" | "gabor-block" => {
                let (mut n, mut t) = (None, None);
                for kv in params.split(',') {
                    let (k, v) = kv
                        .split_once('=')
                        .ok_or_else(|| Error::Parse(format!("expected N=..,T=.. in `{s}`")))?;
                    match k.trim() {
                        "N" | "n" => n = Some(num(v)?),
                        "T" | "t" => t = Some(num(v)?),
                        other => return Err(Error::Parse(format!("unknown gabor parameter `{other}`"))),
                    }
                }
                match (n, t) {
                    (Some(n), Some(t)) => Ok(SystemSpec::GaborBlock { n, t }),
                    _ => Err(Error::Parse(format!("gabor spec `{s}` needs both N and T"))),
                }
            }
            other => Err(Error::UnknownSystem(other.to_string())),
        }
    }
}

impl TryFrom<String> for SystemSpec {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<SystemSpec> for String {
    fn from(s: SystemSpec) -> Self {
        s.to_string()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Boundedness {
    pub tau: f64,
    pub bound: f64,
    pub passes: bool,
}

/// An orthonormal basis of `C^G` with fast analysis and synthesis.
#[derive(Clone)]
pub struct OrthonormalSystem {
    spec: SystemSpec,
    group: FiniteAbelianGroup,
    tau: f64,
    axes: Vec<AxisPlan>,
}

impl fmt::Debug for OrthonormalSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("OrthonormalSystem")
            .field("spec", &self.spec.to_string())
            .field("tau", &self.tau)
            .finish()
    }
}

impl OrthonormalSystem {
    /// Character basis of `group`; `tau = M^{-1/2}`.
    pub fn dft(group: FiniteAbelianGroup) -> Self {
        let mut planner = FftPlanner::new();
        let strides = group.strides();
        let axes = group
            .factors()
            .iter()
            .zip(&strides)
            .map(|(&len, &stride)| AxisPlan::new(&mut planner, len, stride))
            .collect();
        let tau = (group.size() as f64).sqrt().recip();
        Self {
            spec: SystemSpec::Dft {
                group: group.clone(),
            },
            group,
            tau,
            axes,
        }
    }

    /// Walsh-Hadamard system on `Z_2^n` with entries `+-2^{-n/2}`.
    pub fn wht(n: u32) -> Result<Self> {
        if n == 0 {
            return Err(invalid("n", "the Walsh-Hadamard system needs n >= 1"));
        }
        if n >= usize::BITS {
            return Err(invalid("n", format!("2^{n} does not fit in memory")));
        }
        let group = FiniteAbelianGroup::boolean_cube(n)?;
        Ok(Self {
            spec: SystemSpec::Wht { n },
            group,
            tau: 2f64.powf(-(n as f64) / 2.0),
            axes: Vec::new(),
        })
    }

    /// Block Gabor system on `Z_N x Z_T`: `g_{m,a}(t,b) = N^{-1/2} e^{2 pi i m t / N} [b = a]`.
    ///
    /// Analysis is the row-wise transform
    /// `Gf(m,a) = N^{-1/2} sum_t f(t,a) e^{-2 pi i m t / N}`. `tau = N^{-1/2}`.
    pub fn gabor_block(n: usize, t: usize) -> Result<Self> {
        let group = FiniteAbelianGroup::new(vec![n, t])?;
        let mut planner = FftPlanner::new();
        let axes = vec![AxisPlan::new(&mut planner, n, t)];
        Ok(Self {
            spec: SystemSpec::GaborBlock { n, t },
            group,
            tau: (n as f64).sqrt().recip(),
            axes,
        })
    }

    /// Orthonormal Haar system on `Z_M`, `M` a power of two. `tau` is
    /// measured from the synthesized scaling and finest-scale functions.
    pub fn haar(m: usize) -> Result<Self> {
        if !m.is_power_of_two() {
            return Err(invalid("m", format!("{m} is not a power of two")));
        }
        let group = FiniteAbelianGroup::cyclic(m)?;
        let mut sys = Self {
            spec: SystemSpec::Haar { m },
            group,
            tau: f64::NAN,
            axes: Vec::new(),
        };
        let mut tau: f64 = 0.0;
        for j in [0, m - 1] {
            let mut e = vec![Complex64::new(0.0, 0.0); m];
            e[j] = Complex64::new(1.0, 0.0);
            sys.synthesize_in_place(&mut e);
            tau = tau.max(crate::signal::linf_norm(&e));
        }
        sys.tau = tau;
        Ok(sys)
    }

    pub fn from_spec(spec: &SystemSpec) -> Result<Self> {
        match spec {
            SystemSpec::Dft { group } => Ok(Self::dft(group.clone())),
            SystemSpec::Wht { n } => Self::wht(*n),
            SystemSpec::GaborBlock { n, t } => Self::gabor_block(*n, *t),
            SystemSpec::Haar { m } => Self::haar(*m),
        }
    }

    pub fn spec(&self) -> &SystemSpec {
        &self.spec
    }

    pub fn label(&self) -> &'static str {
        self.spec.label()
    }

    pub fn group(&self) -> &FiniteAbelianGroup {
        &self.group
    }

    pub fn size(&self) -> usize {
        self.group.size()
    }

    /// Incoherence constant `max_{j,x} |phi_j(x)|`.
    pub fn tau(&self) -> f64 {
        self.tau
    }

    /// Compares `tau` against the bounded-system threshold `M^{-1/2}`.
    pub fn check_boundedness(&self) -> Boundedness {
        let bound = (self.size() as f64).sqrt().recip();
        Boundedness {
            tau: self.tau,
            bound,
            passes: self.tau <= bound * (1.0 + BOUNDEDNESS_SLACK),
        }
    }

    pub fn analyze(&self, f: &Signal) -> Result<CoefficientVector> {
        if f.group() != &self.group {
            return Err(Error::DomainMismatch {
                expected: self.group.clone(),
                found: f.group().clone(),
            });
        }
        let mut buf = f.values().to_vec();
        self.analyze_in_place(&mut buf);
        Ok(CoefficientVector::new(Some(self.spec.clone()), buf))
    }

    pub fn synthesize(&self, c: &CoefficientVector) -> Result<Signal> {
        if let Some(spec) = c.system() {
            if spec != &self.spec {
                return Err(Error::UnknownSystem(format!(
                    "coefficients belong to {spec}, not {}",
                    self.spec
                )));
            }
        }
        if c.len() != self.size() {
            return Err(Error::DimensionMismatch {
                expected: self.size(),
                found: c.len(),
            });
        }
        let mut buf = c.entries().to_vec();
        self.synthesize_in_place(&mut buf);
        Signal::new(self.group.clone(), buf)
    }

    /// Analysis on a raw buffer of length `M`.
    pub fn analyze_in_place(&self, buf: &mut [Complex64]) {
        assert_eq!(buf.len(), self.size(), "buffer length must equal the group order");
        match self.spec {
            SystemSpec::Dft { .. } | SystemSpec::GaborBlock { .. } => {
                transforms::dft_axes(buf, &self.axes, true)
            }
            SystemSpec::Wht { .. } => transforms::fwht(buf),
            SystemSpec::Haar { .. } => transforms::haar_forward(buf),
        }
    }

    /// Synthesis on a raw buffer of length `M`.
    pub fn synthesize_in_place(&self, buf: &mut [Complex64]) {
        assert_eq!(buf.len(), self.size(), "buffer length must equal the group order");
        match self.spec {
            SystemSpec::Dft { .. } | SystemSpec::GaborBlock { .. } => {
                transforms::dft_axes(buf, &self.axes, false)
            }
            SystemSpec::Wht { .. } => transforms::fwht(buf),
            SystemSpec::Haar { .. } => transforms::haar_inverse(buf),
        }
    }

    /// `phi_j(x)` from the closed form of each family.
    pub fn basis_value(&self, j: usize, x: usize) -> Complex64 {
        let m = self.size();
        match &self.spec {
            SystemSpec::Dft { group } => {
                let phase = 2.0 * PI * group.pairing(j, x);
                Complex64::from_polar((m as f64).sqrt().recip(), phase)
            }
            SystemSpec::Wht { .. } => {
                let sign = if (j & x).count_ones().is_multiple_of(2) { 1.0 } else { -1.0 };
                Complex64::new(sign * self.tau, 0.0)
            }
            SystemSpec::GaborBlock { n, t } => {
                let (freq, row) = (j / t, j % t);
                let (time, b) = (x / t, x % t);
                if b != row {
                    return Complex64::new(0.0, 0.0);
                }
                let phase = 2.0 * PI * ((freq * time) % n) as f64 / *n as f64;
                Complex64::from_polar((*n as f64).sqrt().recip(), phase)
            }
            SystemSpec::Haar { .. } => haar_value(m, j, x),
        }
    }

    /// The basis function `phi_j` as a signal.
    pub fn basis_function(&self, j: usize) -> Signal {
        let mut e = vec![Complex64::new(0.0, 0.0); self.size()];
        e[j] = Complex64::new(1.0, 0.0);
        self.synthesize_in_place(&mut e);
        Signal::new(self.group.clone(), e).expect("length matches group")
    }
}

fn haar_value(m: usize, j: usize, x: usize) -> Complex64 {
    let base = (m as f64).sqrt().recip();
    if j == 0 {
        return Complex64::new(base, 0.0);
    }
    let scale = usize::BITS - 1 - j.leading_zeros();
    let shift = j - (1 << scale);
    let width = m >> scale;
    let start = shift * width;
    if x < start || x >= start + width {
        return Complex64::new(0.0, 0.0);
    }
    let amp = base * FRAC_1_SQRT_2.powi(-(scale as i32));
    if x < start + width / 2 {
        Complex64::new(amp, 0.0)
    } else {
        Complex64::new(-amp, 0.0)
    }
}

pub fn make_dft(group: FiniteAbelianGroup) -> OrthonormalSystem {
    OrthonormalSystem::dft(group)
}

pub fn make_wht(n: u32) -> Result<OrthonormalSystem> {
    OrthonormalSystem::wht(n)
}

pub fn make_gabor_block(n: usize, t: usize) -> Result<OrthonormalSystem> {
    OrthonormalSystem::gabor_block(n, t)
}

pub fn make_haar(m: usize) -> Result<OrthonormalSystem> {
    OrthonormalSystem::haar(m)
}

#[cfg(test)]
mod tests;
