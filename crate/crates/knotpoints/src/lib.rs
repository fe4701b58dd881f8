//! Exact and certified computation of N-sets, bump perturbations and the
//! Banach–Mazur game strategy for generic continuous functions on `[0,1]`.

// `!(x > 0.0)` is the NaN-rejecting form used throughout.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bmgame;
pub mod bump;
pub mod cli;
pub mod enclosure;
pub mod error;
pub mod indexcomb;
pub mod intervalsets;
pub mod nsets;
pub mod pcw;
pub mod rational;
pub mod realfn;
pub mod report;

pub use error::{Error, Result};
