#![allow(clippy::neg_cmp_op_on_partial_ord)]

//! Numerical toolkit for weighted Fourier inequalities with values in
//! `ℓ^r` spaces: rearrangement norms, vector-valued transforms, region
//! classification, sharpness experiments and limiting interpolation.

mod error;
pub mod fourier;
pub mod inequalities;
pub mod interpolation;
pub mod quad;
pub mod rearrange;
pub mod sharpness;
pub mod values;

pub use error::{Error, Result};
