//! Rate-distortion descriptors: an explicit, self-delimiting bit string whose
//! decoding is within `eps ||f||_2` of `f`.
//!
//! Encoding keeps the `s = ceil(16 FR^2 / eps^2)` largest coefficients (tail at
//! most `eps/4 ||f||`), rounds the real and imaginary parts of each to the
//! nearest multiple of `delta = eps ||f^||_2 / (4 sqrt k)` (error at most
//! `eps/2 ||f||` in total), and serializes.
//!
//! Layout, version 1:
//!
//! ```text
//! "FRRD" | version u8 | factor count, factors (LEB128) | system label u8
//!        | k (LEB128) | ||f^||_2 f64 LE | eps f64 LE
//!        | k support indices, ceil(log2 M) bits each, ascending
//!        | 2k quantized integers (unary width prefix + two's complement)
//!        | zero padding to a byte boundary
//! ```

pub mod bits;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::group::FiniteAbelianGroup;
use crate::ratio::{floored_ln, soft_sparsify};
use crate::signal::Signal;
use crate::system::{OrthonormalSystem, SystemSpec};
use bits::{signed_code_len, BitReader, BitWriter};

pub const MAGIC: [u8; 4] = *b"FRRD";
pub const VERSION: u8 = 1;

const NEGLIGIBLE: f64 = 1e-14;

const LABEL_DFT: u8 = 0;
const LABEL_WHT: u8 = 1;
const LABEL_GABOR: u8 = 2;
const LABEL_HAAR: u8 = 3;

/// A decoded (or about to be encoded) descriptor.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Descriptor {
    pub system: SystemSpec,
    /// `||f^||_2`, shared by encoder and decoder to derive `delta`.
    pub coefficient_norm: f64,
    pub eps: f64,
    /// Ascending coefficient indices.
    pub support: Vec<usize>,
    /// `(a, b)` with the coefficient reconstructed as `(a + i b) delta`.
    pub quantized: Vec<(i64, i64)>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundTerms {
    /// `(r/eps)^2 log(r/eps)^2 log M`.
    pub c0_term: f64,
    /// `(r/eps)^2 log(r/eps)^3`.
    pub c1_term: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BitAccount {
    pub header_bits: u64,
    pub support_bits: u64,
    pub coefficient_bits: u64,
    pub padding_bits: u64,
    pub total: u64,
    pub k: usize,
    pub ratio: f64,
    pub bound_terms: BoundTerms,
}

impl Descriptor {
    pub fn k(&self) -> usize {
        self.support.len()
    }

    /// `eps ||f^||_2 / (4 sqrt k)`.
    pub fn delta(&self) -> f64 {
        quantization_step(self.eps, self.coefficient_norm, self.k())
    }

    /// Serializes and returns the bytes together with the per-section sizes.
    pub fn encode(&self) -> Result<(Vec<u8>, BitAccount)> {
        let group = self.system.group()?;
        let label = match self.system {
            SystemSpec::Dft { .. } => LABEL_DFT,
            SystemSpec::Wht { .. } => LABEL_WHT,
            SystemSpec::GaborBlock { .. } => LABEL_GABOR,
            SystemSpec::Haar { .. } => LABEL_HAAR,
        };
        if self.support.len() != self.quantized.len() {
            return Err(Error::DimensionMismatch {
                expected: self.support.len(),
                found: self.quantized.len(),
            });
        }
        let index_width = index_bits(group.size());
        let mut w = BitWriter::new();
        w.write_bytes(&MAGIC);
        w.write_bits(VERSION as u64, 8);
        w.write_varint(group.rank() as u64);
        for &n in group.factors() {
            w.write_varint(n as u64);
        }
        w.write_bits(label as u64, 8);
        w.write_varint(self.k() as u64);
        w.write_bytes(&self.coefficient_norm.to_le_bytes());
        w.write_bytes(&self.eps.to_le_bytes());
        let header_bits = w.bit_len();

        for &j in &self.support {
            if j >= group.size() {
                return Err(invalid("support", format!("index {j} outside {group}")));
            }
            w.write_bits(j as u64, index_width);
        }
        let support_bits = w.bit_len() - header_bits;

        for &(a, b) in &self.quantized {
            w.write_signed(a);
            w.write_signed(b);
        }
        let coefficient_bits = w.bit_len() - header_bits - support_bits;
        let padding_bits = w.align();
        let total = w.bit_len();
        let bytes = w.into_bytes();
        debug_assert_eq!(total, 8 * bytes.len() as u64);
        Ok((
            bytes,
            BitAccount {
                header_bits,
                support_bits,
                coefficient_bits,
                padding_bits,
                total,
                k: self.k(),
                ratio: f64::NAN,
                bound_terms: BoundTerms {
                    c0_term: f64::NAN,
                    c1_term: f64::NAN,
                },
            },
        ))
    }

    /// Reads one descriptor from the front of `data`; returns it with the
    /// number of bytes consumed.
    pub fn decode_prefix(data: &[u8]) -> Result<(Self, usize)> {
        let mut r = BitReader::new(data);
        if r.read_bytes::<4>()? != MAGIC {
            return Err(Error::MalformedDescriptor("bad magic".into()));
        }
        let version = r.read_bits(8)? as u8;
        if version != VERSION {
            return Err(Error::UnsupportedVersion(version));
        }
        let rank = r.read_varint()?;
        if rank == 0 || rank > 64 {
            return Err(Error::MalformedDescriptor(format!("implausible factor count {rank}")));
        }
        let factors = (0..rank)
            .map(|_| r.read_varint().map(|n| n as usize))
            .collect::<Result<Vec<_>>>()?;
        let group = FiniteAbelianGroup::new(factors)
            .map_err(|e| Error::MalformedDescriptor(e.to_string()))?;
        let label = r.read_bits(8)? as u8;
        let system = system_from_label(label, &group)?;
        let k = r.read_varint()? as usize;
        if k > group.size() {
            return Err(Error::MalformedDescriptor(format!("k = {k} exceeds |G| = {}", group.size())));
        }
        let coefficient_norm = f64::from_le_bytes(r.read_bytes::<8>()?);
        let eps = f64::from_le_bytes(r.read_bytes::<8>()?);
        if !(coefficient_norm.is_finite() && coefficient_norm >= 0.0) || !(eps > 0.0 && eps < 1.0) {
            return Err(Error::MalformedDescriptor("invalid norm or eps".into()));
        }
        let index_width = index_bits(group.size());
        let mut support = Vec::with_capacity(k);
        for _ in 0..k {
            let j = r.read_bits(index_width)? as usize;
            if j >= group.size() || support.last().is_some_and(|&prev| prev >= j) {
                return Err(Error::MalformedDescriptor(format!("bad support index {j}")));
            }
            support.push(j);
        }
        let mut quantized = Vec::with_capacity(k);
        for _ in 0..k {
            quantized.push((r.read_signed()?, r.read_signed()?));
        }
        r.finish_byte()?;
        let consumed = (r.bit_pos() / 8) as usize;
        Ok((
            Self {
                system,
                coefficient_norm,
                eps,
                support,
                quantized,
            },
            consumed,
        ))
    }

    /// Decodes a buffer that must hold exactly one descriptor.
    pub fn decode(data: &[u8]) -> Result<Self> {
        let (d, used) = Self::decode_prefix(data)?;
        if used != data.len() {
            return Err(Error::MalformedDescriptor(format!(
                "{} trailing bytes after descriptor",
                data.len() - used
            )));
        }
        Ok(d)
    }
}

fn system_from_label(label: u8, group: &FiniteAbelianGroup) -> Result<SystemSpec> {
    let f = group.factors();
    let bad = || Error::MalformedDescriptor(format!("group {group} does not fit system label {label}"));
    match label {
        LABEL_DFT => Ok(SystemSpec::Dft { group: group.clone() }),
        LABEL_WHT if f.iter().all(|&n| n == 2) => Ok(SystemSpec::Wht { n: f.len() as u32 }),
        LABEL_GABOR if f.len() == 2 => Ok(SystemSpec::GaborBlock { n: f[0], t: f[1] }),
        LABEL_HAAR if f.len() == 1 && f[0].is_power_of_two() => Ok(SystemSpec::Haar { m: f[0] }),
        LABEL_WHT | LABEL_GABOR | LABEL_HAAR => Err(bad()),
        other => Err(Error::UnknownSystem(format!("descriptor label byte {other}"))),
    }
}

/// `ceil(log2 M)`.
pub fn index_bits(m: usize) -> u32 {
    if m <= 1 {
        0
    } else {
        usize::BITS - (m - 1).leading_zeros()
    }
}

pub fn quantization_step(eps: f64, coefficient_norm: f64, k: usize) -> f64 {
    eps / (4.0 * (k as f64).sqrt()) * coefficient_norm
}

/// Nearest integer, ties toward zero.
pub fn round_ties_toward_zero(x: f64) -> i64 {
    let q = (x.abs() - 0.5).ceil().max(0.0);
    (q.copysign(x)) as i64
}

pub fn rd_encode(system: &OrthonormalSystem, f: &Signal, eps: f64) -> Result<(Descriptor, BitAccount)> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(invalid("eps", format!("{eps} is outside (0, 1)")));
    }
    if !f.is_nonzero() {
        return Err(Error::ZeroVector("a rate-distortion descriptor"));
    }
    let coeffs = system.analyze(f)?;
    let coefficient_norm = coeffs.l2_norm();
    let sparse = soft_sparsify(&coeffs, eps / 4.0)?;
    // Entries at rounding-noise level inside the top `s` cost bits and carry
    // nothing; dropping them moves the error by at most sqrt(M) 1e-14 relative.
    let negligible = NEGLIGIBLE * coefficient_norm;
    let mut support: Vec<usize> = sparse
        .support
        .iter()
        .copied()
        .filter(|&j| coeffs.entries()[j].norm() > negligible)
        .collect();
    support.sort_unstable();
    let k = support.len();
    let delta = quantization_step(eps, coefficient_norm, k);
    let quantized = support
        .iter()
        .map(|&j| {
            let z = coeffs.entries()[j];
            (round_ties_toward_zero(z.re / delta), round_ties_toward_zero(z.im / delta))
        })
        .collect();
    let descriptor = Descriptor {
        system: system.spec().clone(),
        coefficient_norm,
        eps,
        support,
        quantized,
    };
    let (_, mut account) = descriptor.encode()?;
    let m = system.size();
    let r = sparse.ratio;
    account.ratio = r;
    let bound = rd_bit_bound(r.max(1.0), eps, m, 1.0, 1.0)?;
    account.bound_terms = BoundTerms {
        c0_term: bound.c0_term,
        c1_term: bound.c1_term,
    };
    Ok((descriptor, account))
}

/// Encodes straight to bytes.
pub fn rd_encode_bytes(system: &OrthonormalSystem, f: &Signal, eps: f64) -> Result<(Vec<u8>, BitAccount)> {
    let (d, account) = rd_encode(system, f, eps)?;
    let (bytes, _) = d.encode()?;
    Ok((bytes, account))
}

pub fn rd_decode(d: &Descriptor) -> Result<Signal> {
    let system = OrthonormalSystem::from_spec(&d.system)?;
    if d.support.len() != d.quantized.len() {
        return Err(Error::MalformedDescriptor("support and payload lengths differ".into()));
    }
    let mut coeffs = vec![Complex64::new(0.0, 0.0); system.size()];
    if d.k() > 0 {
        let delta = d.delta();
        for (&j, &(a, b)) in d.support.iter().zip(&d.quantized) {
            let slot = coeffs
                .get_mut(j)
                .ok_or_else(|| Error::MalformedDescriptor(format!("support index {j} out of range")))?;
            *slot = Complex64::new(a as f64 * delta, b as f64 * delta);
        }
    }
    system.synthesize_in_place(&mut coeffs);
    Signal::new(system.group().clone(), coeffs)
}

pub fn rd_decode_bytes(data: &[u8]) -> Result<Signal> {
    rd_decode(&Descriptor::decode(data)?)
}

/// Bits the quantized payload of `d` occupies.
pub fn payload_bits(d: &Descriptor) -> u64 {
    d.quantized
        .iter()
        .map(|&(a, b)| signed_code_len(a) + signed_code_len(b))
        .sum()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RdBound {
    pub c0_term: f64,
    pub c1_term: f64,
    pub total: f64,
}

/// `C0 (r/eps)^2 L^2 ln M + C1 (r/eps)^2 L^3`, `L = ln(max(e, r/eps))`. The
/// machine-dependent constant is the fixed header size, reported separately.
pub fn rd_bit_bound(r: f64, eps: f64, m: usize, c0: f64, c1: f64) -> Result<RdBound> {
    check_bound_domain(r, eps, m)?;
    let l = floored_ln(r / eps);
    let base = (r * r) / (eps * eps);
    let c0_term = c0 * base * l * l * (m as f64).ln();
    let c1_term = c1 * base * l * l * l;
    Ok(RdBound {
        c0_term,
        c1_term,
        total: c0_term + c1_term,
    })
}

/// Variant for a Gabor basis on `Z_N x Z_T`:
/// `C0 (r/eps)^2 L^2 ln(NT) + C1 (r/eps)^2 L^2 ln(1/eps)`.
pub fn rd_bit_bound_gabor(r: f64, eps: f64, n: usize, t: usize, c0: f64, c1: f64) -> Result<RdBound> {
    let m = n
        .checked_mul(t)
        .ok_or_else(|| invalid("n", "N T overflows"))?;
    check_bound_domain(r, eps, m)?;
    let l = floored_ln(r / eps);
    let base = (r * r) / (eps * eps);
    let c0_term = c0 * base * l * l * (m as f64).ln();
    let c1_term = c1 * base * l * l * (1.0 / eps).ln();
    Ok(RdBound {
        c0_term,
        c1_term,
        total: c0_term + c1_term,
    })
}

fn check_bound_domain(r: f64, eps: f64, m: usize) -> Result<()> {
    if !(r >= 1.0) {
        return Err(invalid("r", format!("{r} must be >= 1")));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(invalid("eps", format!("{eps} is outside (0, 1)")));
    }
    if m < 1 {
        return Err(invalid("m", "must be >= 1"));
    }
    Ok(())
}

/// One encoded signal in a bit-count sweep.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingSample {
    pub k_log2_m: f64,
    pub k: f64,
    pub bits: f64,
}

/// Least-squares fit of `bits = A k log2 M + B k + H`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingFit {
    pub a: f64,
    pub b: f64,
    pub h: f64,
    /// Root mean square of `(bits - fit) / bits`.
    pub rms_relative_residual: f64,
    pub max_relative_residual: f64,
}

pub fn fit_scaling_law(rows: &[ScalingSample]) -> Result<ScalingFit> {
    if rows.len() < 3 {
        return Err(invalid("rows", "need at least three samples"));
    }
    let mut m = [[0.0f64; 4]; 3];
    for row in rows {
        let v = [row.k_log2_m, row.k, 1.0];
        for i in 0..3 {
            for j in 0..3 {
                m[i][j] += v[i] * v[j];
            }
            m[i][3] += v[i] * row.bits;
        }
    }
    for col in 0..3 {
        let pivot = (col..3)
            .max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs()))
            .unwrap_or(col);
        m.swap(col, pivot);
        if m[col][col].abs() < 1e-12 {
            return Err(invalid("rows", "degenerate sweep, the normal equations are singular"));
        }
        for r in 0..3 {
            if r != col {
                let factor = m[r][col] / m[col][col];
                let pivot_row = m[col];
                for (dst, src) in m[r][col..].iter_mut().zip(&pivot_row[col..]) {
                    *dst -= factor * src;
                }
            }
        }
    }
    let (a, b, h) = (m[0][3] / m[0][0], m[1][3] / m[1][1], m[2][3] / m[2][2]);
    let rel: Vec<f64> = rows
        .iter()
        .map(|r| (r.bits - (a * r.k_log2_m + b * r.k + h)).abs() / r.bits)
        .collect();
    Ok(ScalingFit {
        a,
        b,
        h,
        rms_relative_residual: (rel.iter().map(|e| e * e).sum::<f64>() / rel.len() as f64).sqrt(),
        max_relative_residual: rel.iter().copied().fold(0.0, f64::max),
    })
}

/// Encodes `s`-sparse DFT signals on `Z_M` with random phases and magnitudes
/// in `[1/2, 1]` for every `(M, s)` pair and returns the bit counts.
pub fn scaling_sweep(
    sizes: &[usize],
    sparsities: &[usize],
    repeats: usize,
    eps: f64,
    seed: u64,
) -> Result<Vec<ScalingSample>> {
    use rand::Rng;
    let mut rows = Vec::new();
    for (gi, &m) in sizes.iter().enumerate() {
        let sys = OrthonormalSystem::dft(FiniteAbelianGroup::cyclic(m)?);
        for (si, &s) in sparsities.iter().enumerate() {
            if s > m {
                return Err(invalid("sparsities", format!("s = {s} exceeds M = {m}")));
            }
            for rep in 0..repeats {
                let trial = (si * repeats + rep) as u64;
                let mut rng = crate::random::rng(crate::random::derive_seed(seed, gi as u64, trial));
                let mut c = vec![Complex64::new(0.0, 0.0); m];
                for j in rand::seq::index::sample(&mut rng, m, s) {
                    let mag = rng.random_range(0.5..=1.0);
                    c[j] = crate::random::unit_phase(&mut rng) * mag;
                }
                let f = sys.synthesize(&crate::signal::CoefficientVector::raw(c))?;
                let (_, account) = rd_encode(&sys, &f, eps)?;
                let k = account.k as f64;
                rows.push(ScalingSample {
                    k_log2_m: k * (m as f64).log2(),
                    k,
                    bits: account.total as f64,
                });
            }
        }
    }
    Ok(rows)
}
