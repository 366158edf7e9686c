//! Gamma matrices, the discretized two-particle field, Dirac operators and norms.

pub mod dirac;
pub mod field;
pub mod gamma;
pub mod grid;
pub mod io;
pub mod norms;

pub use dirac::{apply_dirac, dirac_general, DerivativeSet, TimeStencil};
pub use field::{interpolate, MultiTimeField, Particle, Spin16};
pub use gamma::GammaSet;
pub use grid::{GridSpec, SPIN};
pub use norms::{bracket_table, spatial_norm_bracket, weighted_norm, BracketTable};
