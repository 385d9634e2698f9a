//! Morse-index spectra of Fraser-Sargent minimal surfaces in R^4.
// NaN must fail these comparisons, and index loops read better in the stencils.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod error;
pub mod geometry;
pub mod index;
pub mod inequality;
mod roots;
pub mod steklov;
pub mod sturm_liouville;

pub use error::{Error, Result};
