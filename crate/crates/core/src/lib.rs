//! Fourier ratio `FR(f) = ||c(f)||_1 / ||c(f)||_2` as a complexity measure on
//! finite abelian groups, together with the procedures built on it.
//!
//! | module | purpose |
//! |---|---|
//! | [`group`], [`signal`], [`system`] | groups, signals, orthonormal systems |
//! | [`ratio`] | Fourier ratio, soft sparsification, harmonic coefficient model |
//! | [`recovery`] | Bernoulli sampling, l1 recovery by Douglas-Rachford, erasure statistics |
//! | [`localization`] | slicing along `G = H + K` and the localization bound |
//! | [`codec`] | rate-distortion descriptor encoder/decoder with bit accounting |
//! | [`sq`] | random coefficient-sampling estimator and SQ-dimension bounds |
//! | [`harness`] | signal generators, seeded experiments, reports |

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod codec;
pub mod error;
pub mod group;
pub mod harness;
pub mod localization;
pub mod random;
pub mod ratio;
pub mod recovery;
pub mod signal;
pub mod sq;
pub mod system;

pub use error::{Error, Result};
pub use group::FiniteAbelianGroup;
pub use signal::{CoefficientVector, Signal};
pub use system::{Boundedness, OrthonormalSystem, SystemSpec};
