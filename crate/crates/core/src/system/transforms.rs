//! In-place fast kernels. All of them are unitary.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

/// Forward and inverse plans for one axis of a mixed-radix array.
#[derive(Clone)]
pub(crate) struct AxisPlan {
    len: usize,
    stride: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl AxisPlan {
    pub(crate) fn new(planner: &mut FftPlanner<f64>, len: usize, stride: usize) -> Self {
        Self {
            len,
            stride,
            forward: planner.plan_fft_forward(len),
            inverse: planner.plan_fft_inverse(len),
        }
    }
}

/// Unitary DFT along the given axes: sign `-1` for `forward`, `+1` otherwise.
pub(crate) fn dft_axes(values: &mut [Complex64], axes: &[AxisPlan], forward: bool) {
    let total = values.len();
    let mut scale = 1.0;
    for axis in axes {
        let (len, stride) = (axis.len, axis.stride);
        if len == 1 {
            continue;
        }
        scale *= len as f64;
        let fft = if forward { &axis.forward } else { &axis.inverse };
        let mut line = vec![Complex64::new(0.0, 0.0); len];
        let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
        let block = len * stride;
        for outer in (0..total).step_by(block) {
            for inner in 0..stride {
                let base = outer + inner;
                for (i, slot) in line.iter_mut().enumerate() {
                    *slot = values[base + i * stride];
                }
                fft.process_with_scratch(&mut line, &mut scratch);
                for (i, z) in line.iter().enumerate() {
                    values[base + i * stride] = *z;
                }
            }
        }
    }
    if scale != 1.0 {
        let norm = scale.sqrt().recip();
        for z in values.iter_mut() {
            *z *= norm;
        }
    }
}

/// Orthonormal Walsh-Hadamard transform; self-inverse.
pub(crate) fn fwht(values: &mut [Complex64]) {
    let n = values.len();
    debug_assert!(n.is_power_of_two());
    let mut h = 1;
    while h < n {
        for i in (0..n).step_by(2 * h) {
            for j in i..i + h {
                let a = values[j];
                let b = values[j + h];
                values[j] = a + b;
                values[j + h] = a - b;
            }
        }
        h *= 2;
    }
    let norm = (n as f64).sqrt().recip();
    for z in values.iter_mut() {
        *z *= norm;
    }
}

/// Haar analysis. Output layout: index 0 is the scaling coefficient,
/// index `2^j + k` the detail at scale `j` and shift `k`.
pub(crate) fn haar_forward(values: &mut [Complex64]) {
    let n = values.len();
    debug_assert!(n.is_power_of_two());
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut tmp = vec![Complex64::new(0.0, 0.0); n];
    let mut len = n;
    while len > 1 {
        let half = len / 2;
        for i in 0..half {
            let a = values[2 * i];
            let b = values[2 * i + 1];
            tmp[i] = (a + b) * s;
            tmp[half + i] = (a - b) * s;
        }
        values[..len].copy_from_slice(&tmp[..len]);
        len = half;
    }
}

pub(crate) fn haar_inverse(values: &mut [Complex64]) {
    let n = values.len();
    debug_assert!(n.is_power_of_two());
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut tmp = vec![Complex64::new(0.0, 0.0); n];
    let mut len = 2;
    while len <= n {
        let half = len / 2;
        for i in 0..half {
            let avg = values[i];
            let det = values[half + i];
            tmp[2 * i] = (avg + det) * s;
            tmp[2 * i + 1] = (avg - det) * s;
        }
        values[..len].copy_from_slice(&tmp[..len]);
        len *= 2;
    }
}
