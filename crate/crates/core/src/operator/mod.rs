//! The retarded integral operator A.
//!
//! In one particle's variables the retarded convolution is assembled from
//! four pieces,
//!
//! ```text
//! conv f = A⁽¹⁾(D⁺f) + A⁽²⁾(D⁺f) + A⁽³⁾f + A⁽⁴⁾f,   D⁺ = iγ^μ∂_μ + m,
//! ```
//!
//! where A⁽¹⁾, A⁽²⁾ integrate over the past light cone and its interior and
//! A⁽³⁾, A⁽⁴⁾ integrate the t = 0 slice. The two-particle operator is
//! A = conv₁ ∘ conv₂ applied to Kψ.
//!
//! Each piece is a real linear map between particle-local nodes (n, i),
//! stored as sparse rows; A⁽³⁾ and A⁽⁴⁾ carry an extra iγ⁰ on the spinor.

mod pair;
mod rows;
pub mod single;

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::quadrature::{GaussLegendre, SphereRule, SphereRuleSpec};
use crate::specialfun::j1_over_x;

pub use pair::{
    apply_a1, apply_a2, apply_a3, apply_a4, apply_a_full, apply_piece_rows, conv_retarded,
    kernel_times, PairOperator, ParticleOperator,
};
pub use rows::{OperatorDiagnostics, RowOperator};

/// Quadrature resolution for the light-cone integrals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    /// Gauss–Legendre nodes in the radial variable.
    pub radial_nodes: usize,
    pub sphere: SphereRuleSpec,
    /// Gauss–Legendre nodes in the time-layer variable of A⁽²⁾.
    pub time_layers: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            radial_nodes: 12,
            sphere: SphereRuleSpec {
                polar: 8,
                azimuthal: 16,
            },
            time_layers: 12,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        if self.radial_nodes < 8 {
            return Err(Error::Config(format!(
                "radial nodes {} must be >= 8",
                self.radial_nodes
            )));
        }
        if self.time_layers == 0 || self.sphere.polar == 0 || self.sphere.azimuthal == 0 {
            return Err(Error::Config("quadrature orders must be positive".into()));
        }
        Ok(())
    }

    /// Every node count doubled.
    pub fn refined(&self) -> Self {
        Self {
            radial_nodes: 2 * self.radial_nodes,
            sphere: SphereRuleSpec {
                polar: 2 * self.sphere.polar,
                azimuthal: 2 * self.sphere.azimuthal,
            },
            time_layers: 2 * self.time_layers,
        }
    }
}

/// The four single-variable pieces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Piece {
    A1,
    A2,
    A3,
    A4,
}

impl Piece {
    /// Whether the piece carries the iγ⁰ factor and reads only the t = 0 slice.
    pub fn is_boundary(self) -> bool {
        matches!(self, Piece::A3 | Piece::A4)
    }
}

/// Prepared rules shared by every output point.
pub(crate) struct Rules {
    radial: GaussLegendre,
    layers: GaussLegendre,
    sphere: SphereRule,
}

impl Rules {
    pub(crate) fn new(q: &QuadratureConfig) -> Result<Self> {
        q.validate()?;
        Ok(Self {
            radial: GaussLegendre::new(q.radial_nodes),
            layers: GaussLegendre::new(q.time_layers),
            sphere: SphereRule::new(q.sphere)?,
        })
    }

    /// Calls `emit(τ, y, w)` for every quadrature node of the given piece at
    /// output event (t, x). The iγ⁰ of the boundary pieces is not included.
    pub(crate) fn for_each_node(
        &self,
        piece: Piece,
        t: f64,
        x: [f64; 3],
        m: f64,
        mut emit: impl FnMut(f64, [f64; 3], f64),
    ) -> Result<()> {
        if t <= 0.0 {
            return Ok(());
        }
        let inv4pi = 1.0 / (4.0 * PI);
        let shell = |tau: f64, r: f64, w: f64, emit: &mut dyn FnMut(f64, [f64; 3], f64)| {
            for (d, wo) in self.sphere.directions.iter().zip(&self.sphere.weights) {
                let y = [x[0] + r * d[0], x[1] + r * d[1], x[2] + r * d[2]];
                emit(tau, y, w * wo);
            }
        };
        match piece {
            Piece::A1 => {
                for (r, wr) in self.radial.on_interval(0.0, t) {
                    shell(t - r, r, inv4pi * wr * r, &mut emit);
                }
            }
            Piece::A2 => {
                if m == 0.0 {
                    return Ok(());
                }
                for (s, ws) in self.layers.on_interval(0.0, t) {
                    for (r, wr) in self.radial.on_interval(0.0, s) {
                        let u = (s * s - r * r).max(0.0).sqrt();
                        let bessel = m * j1_over_x(m * u)?;
                        shell(t - s, r, -m * inv4pi * ws * wr * r * r * bessel, &mut emit);
                    }
                }
            }
            Piece::A3 => {
                shell(0.0, t, inv4pi * t, &mut emit);
            }
            Piece::A4 => {
                if m == 0.0 {
                    return Ok(());
                }
                for (r, wr) in self.radial.on_interval(0.0, t) {
                    let u = (t * t - r * r).max(0.0).sqrt();
                    let bessel = m * j1_over_x(m * u)?;
                    shell(0.0, r, -m * inv4pi * wr * r * r * bessel, &mut emit);
                }
            }
        }
        Ok(())
    }
}

/// Scalar part of a piece evaluated on a function instead of a grid field:
/// Σ w f(τ, y) over the quadrature nodes at (t, x). Multiply by iγ⁰ for
/// the boundary pieces.
pub fn piece_point_eval<F>(
    piece: Piece,
    quad: &QuadratureConfig,
    m: f64,
    t: f64,
    x: [f64; 3],
    f: F,
) -> Result<f64>
where
    F: Fn(f64, [f64; 3]) -> f64,
{
    let rules = Rules::new(quad)?;
    let mut acc = 0.0;
    rules.for_each_node(piece, t, x, m, |tau, y, w| acc += w * f(tau, y))?;
    Ok(acc)
}
