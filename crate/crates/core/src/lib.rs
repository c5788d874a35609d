// `!(x > 0.0)` guards also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod functionals;
pub mod geometry;
pub mod inverse;
pub mod quadrature;
pub mod solver;
pub mod stochastic;
pub mod verify;
pub mod weights;

pub use error::{Error, Result};
