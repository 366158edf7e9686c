//! Finite-difference Dirac operators acting on one tensor factor of ℂ⁴⊗ℂ⁴.

use num_complex::Complex64;
use rayon::prelude::*;

use super::field::{MultiTimeField, Particle};
use super::gamma::GammaSet;
use super::grid::SPIN;
use crate::error::{Error, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Difference stencil for the time axis. Spatial axes always use the
/// centered second-order rule with one-sided second-order rules on the faces.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TimeStencil {
    /// Centered interior, one-sided second order at both ends.
    Centered,
    /// Uses only the current and earlier time layers: first-order forward
    /// difference on the first two layers, BDF2 afterwards.
    Causal,
}

/// Up to three (offset, weight) taps, in units of 1/h.
#[derive(Clone, Copy)]
pub(crate) struct Taps {
    pub off: [isize; 3],
    pub w: [f64; 3],
    pub len: usize,
}

pub(crate) fn centered_taps(k: usize, n: usize) -> Taps {
    if k == 0 {
        Taps {
            off: [0, 1, 2],
            w: [-1.5, 2.0, -0.5],
            len: 3,
        }
    } else if k == n - 1 {
        Taps {
            off: [0, -1, -2],
            w: [1.5, -2.0, 0.5],
            len: 3,
        }
    } else {
        Taps {
            off: [-1, 1, 0],
            w: [-0.5, 0.5, 0.0],
            len: 2,
        }
    }
}

pub(crate) fn causal_taps(k: usize) -> Taps {
    match k {
        0 => Taps {
            off: [0, 1, 0],
            w: [-1.0, 1.0, 0.0],
            len: 2,
        },
        1 => Taps {
            off: [-1, 0, 0],
            w: [-1.0, 1.0, 0.0],
            len: 2,
        },
        _ => Taps {
            off: [0, -1, -2],
            w: [1.5, -2.0, 0.5],
            len: 3,
        },
    }
}

/// Returns `iγ^μ∂_μ ψ + mass_term·ψ` in the chosen particle's variables.
///
/// `mass_term = −m` gives the Dirac operator D, `+m` its conjugate D⁺ used
/// inside the retarded convolution.
pub fn dirac_general(
    field: &MultiTimeField,
    particle: Particle,
    mass_term: f64,
    stencil: TimeStencil,
) -> Result<MultiTimeField> {
    let g = field.grid;
    let nt = g.time_steps;
    let ns = g.spatial_points;
    if stencil == TimeStencil::Centered && nt < 3 {
        return Err(Error::Config(format!(
            "centered time differences need >= 3 time steps, grid has {nt}"
        )));
    }
    let s = g.spatial_count();
    let gamma = GammaSet::standard();
    let inv = [1.0 / g.dt(), 1.0 / g.dx(), 1.0 / g.dx(), 1.0 / g.dx()];

    // strides (in spin blocks) of the four axes of each particle
    let p2 = [s, ns * ns, ns, 1];
    let p1 = [nt * s * s, ns * ns * nt * s, ns * nt * s, nt * s];
    let strides = match particle {
        Particle::One => p1,
        Particle::Two => p2,
    };

    let block = nt * s;
    let src = &field.values;
    let mut out = MultiTimeField::zeros(g, field.masses);
    out.values
        .par_chunks_mut(block * SPIN)
        .enumerate()
        .for_each(|(outer, chunk)| {
            let (n1, i1) = (outer / s, outer % s);
            let m1 = g.spatial_multi(i1);
            let mut d = [[Complex64::new(0.0, 0.0); SPIN]; 4];
            for inner in 0..block {
                let (n2, i2) = (inner / s, inner % s);
                let point = outer * block + inner;
                let coords = match particle {
                    Particle::One => [n1, m1[0], m1[1], m1[2]],
                    Particle::Two => {
                        let m2 = g.spatial_multi(i2);
                        [n2, m2[0], m2[1], m2[2]]
                    }
                };
                for mu in 0..4 {
                    let taps = if mu == 0 {
                        match stencil {
                            TimeStencil::Centered => centered_taps(coords[0], nt),
                            TimeStencil::Causal => causal_taps(coords[0]),
                        }
                    } else {
                        centered_taps(coords[mu], ns)
                    };
                    let dm = &mut d[mu];
                    dm.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
                    for t in 0..taps.len {
                        let q = (point as isize + taps.off[t] * strides[mu] as isize) as usize;
                        let w = taps.w[t] * inv[mu];
                        let vals = &src[q * SPIN..q * SPIN + SPIN];
                        for (a, v) in dm.iter_mut().zip(vals) {
                            *a += w * v;
                        }
                    }
                }
                let here = &src[point * SPIN..point * SPIN + SPIN];
                let o = &mut chunk[inner * SPIN..inner * SPIN + SPIN];
                for a in 0..4 {
                    for b in 0..4 {
                        let mut acc = mass_term * here[4 * a + b];
                        for (mu, dm) in d.iter().enumerate() {
                            acc += match particle {
                                Particle::One => {
                                    let (c, gv) = gamma.entry(mu, a);
                                    gv * dm[4 * c + b]
                                }
                                Particle::Two => {
                                    let (c, gv) = gamma.entry(mu, b);
                                    gv * dm[4 * a + c]
                                }
                            } * I;
                        }
                        o[4 * a + b] = acc;
                    }
                }
            }
        });
    Ok(out)
}

/// D_k ψ = (iγ_k^μ ∂_{k,μ} − m_k) ψ with second-order differences.
pub fn apply_dirac(field: &MultiTimeField, particle: Particle) -> Result<MultiTimeField> {
    let m = match particle {
        Particle::One => field.masses.0,
        Particle::Two => field.masses.1,
    };
    dirac_general(field, particle, -m, TimeStencil::Centered)
}

/// The four fields 𝒟_k ψ = ψ, D₁ψ, D₂ψ, D₁D₂ψ.
#[derive(Debug, Clone)]
pub struct DerivativeSet {
    pub fields: [MultiTimeField; 4],
}

impl DerivativeSet {
    pub fn new(field: &MultiTimeField) -> Result<Self> {
        let d1 = apply_dirac(field, Particle::One)?;
        let d2 = apply_dirac(field, Particle::Two)?;
        let d12 = apply_dirac(&d2, Particle::One)?;
        Ok(Self {
            fields: [field.clone(), d1, d2, d12],
        })
    }
}
