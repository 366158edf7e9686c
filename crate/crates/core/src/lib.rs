//! Numerical solver for the multi-time integral equation ψ = ψ_free + Aψ of two
//! directly interacting Dirac particles on the Minkowski half-space t ≥ 0.

pub mod error;
pub mod flrw;
pub mod freedirac;
pub mod kernels;
pub mod operator;
pub mod quadrature;
pub mod solver;
pub mod specialfun;
pub mod spinor;

pub use error::{Error, Result};
