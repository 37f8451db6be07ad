//! Numerical laboratory for the fidelity product `a*b = (b^½ a b^½)^½` on positive
//! matrices and the self-distributive structures built around it.

pub mod error;
pub mod fidelity;
pub mod homology;
pub mod lab;
pub mod bures;
pub mod cli;
pub mod model;
pub mod operator;
pub mod wy;

pub use error::{Error, Result};
pub use operator::{
    CMatrix, DensityOperator, HermitianMatrix, PositiveOperator, StrictlyPositiveOperator,
    ToleranceProfile, C64,
};
