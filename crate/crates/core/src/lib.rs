//! Multiplicative rating relativities by the loss-ratio method, with
//! fixed-point iteration, uniqueness certificates, and the Leslie-Gower and
//! minimum-bias models used as reference points.
//!
//! `no_std`; needs `alloc`. File formats and the command-line tool live in the
//! `relfix` crate.

#![no_std]

extern crate alloc;

pub mod bailey;
pub mod criteria;
pub mod error;
pub mod factors;
pub mod iteration;
pub mod leslie_gower;
pub mod linalg;
pub mod norms;
pub mod rating;
pub mod rerate;
pub mod sampling;
pub mod tensor;

pub use criteria::{certify, compute_box, jacobian, BoxU, ConvergenceCertificate, JacobianConvention, Verdict};
pub use error::{Error, Result};
pub use factors::FactorState;
pub use iteration::{IterationSettings, IterationTrace};
pub use linalg::Matrix;
pub use norms::{MatrixNorm, Norm};
pub use rating::RatingProblem;
pub use tensor::RiskTensor;
