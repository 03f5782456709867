#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::too_many_arguments)]

pub mod error;
pub mod fourier;
pub mod harness;
pub mod kinetic;
pub mod metrics;
pub mod particle;
pub mod smooth;

pub use error::{Error, Result};
