//! One-particle spinor fields f(t, x) ∈ ℂ⁴ on the particle-local grid.
//!
//! The two-particle operator acts on each tensor factor separately, so on
//! product fields it factorizes into these one-particle maps. They are cheap
//! enough to refine far further than full two-particle fields.

use num_complex::Complex64;
use rayon::prelude::*;

use super::pair::ParticleOperator;
use super::QuadratureConfig;
use crate::error::{Error, Result};
use crate::spinor::dirac::{causal_taps, centered_taps};
use crate::spinor::{GammaSet, GridSpec, TimeStencil};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

pub type Spinor = [Complex64; 4];

#[derive(Debug, Clone, PartialEq)]
pub struct ParticleField {
    pub grid: GridSpec,
    pub mass: f64,
    /// One spinor per node q = n·Ns³ + i.
    pub values: Vec<Spinor>,
}

impl ParticleField {
    pub fn from_fn(grid: GridSpec, mass: f64, f: impl Fn([f64; 4]) -> Spinor + Sync) -> Self {
        let s = grid.spatial_count();
        let values = (0..grid.particle_count())
            .into_par_iter()
            .map(|q| f(grid.event(q / s, q % s)))
            .collect();
        Self { grid, mass, values }
    }

    pub fn zeros(grid: GridSpec, mass: f64) -> Self {
        Self {
            grid,
            mass,
            values: vec![[ZERO; 4]; grid.particle_count()],
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.values
            .iter()
            .flatten()
            .map(|v| v.norm())
            .fold(0.0, f64::max)
    }
}

/// iγ^μ∂_μ f + mass_term·f.
pub fn dirac_particle(f: &ParticleField, mass_term: f64, stencil: TimeStencil) -> Result<ParticleField> {
    let g = f.grid;
    let nt = g.time_steps;
    let ns = g.spatial_points;
    if stencil == TimeStencil::Centered && nt < 3 {
        return Err(Error::Config(format!(
            "centered time differences need >= 3 time steps, grid has {nt}"
        )));
    }
    let s = g.spatial_count();
    let strides = [s, ns * ns, ns, 1];
    let inv = [1.0 / g.dt(), 1.0 / g.dx(), 1.0 / g.dx(), 1.0 / g.dx()];
    let gamma = GammaSet::standard();
    let values = (0..g.particle_count())
        .into_par_iter()
        .map(|q| {
            let (n, i) = (q / s, q % s);
            let m = g.spatial_multi(i);
            let coords = [n, m[0], m[1], m[2]];
            let mut out = f.values[q].map(|v| v * mass_term);
            for mu in 0..4 {
                let taps = if mu == 0 {
                    match stencil {
                        TimeStencil::Centered => centered_taps(n, nt),
                        TimeStencil::Causal => causal_taps(n),
                    }
                } else {
                    centered_taps(coords[mu], ns)
                };
                let mut d = [ZERO; 4];
                for t in 0..taps.len {
                    let src = (q as isize + taps.off[t] * strides[mu] as isize) as usize;
                    for (a, v) in d.iter_mut().zip(&f.values[src]) {
                        *a += taps.w[t] * inv[mu] * v;
                    }
                }
                for (a, o) in out.iter_mut().enumerate() {
                    let (c, gv) = gamma.entry(mu, a);
                    *o += I * gv * d[c];
                }
            }
            out
        })
        .collect();
    Ok(ParticleField {
        grid: g,
        mass: f.mass,
        values,
    })
}

/// D f = (iγ^μ∂_μ − m) f with the centered stencil.
pub fn apply_dirac_particle(f: &ParticleField) -> Result<ParticleField> {
    dirac_particle(f, -f.mass, TimeStencil::Centered)
}

impl ParticleOperator {
    /// conv f for a one-particle field.
    pub fn conv_particle(&self, f: &ParticleField) -> Result<ParticleField> {
        let dplus = dirac_particle(f, self.mass, TimeStencil::Causal)?;
        let nodes = f.grid.particle_count();
        let values = (0..nodes)
            .into_par_iter()
            .map(|q| {
                let mut out = [ZERO; 4];
                let (c, w) = self.r12.row(q);
                for (&c, &w) in c.iter().zip(w) {
                    for (o, v) in out.iter_mut().zip(&dplus.values[c as usize]) {
                        *o += w * v;
                    }
                }
                let mut b = [ZERO; 4];
                let (c, w) = self.r34.row(q);
                for (&c, &w) in c.iter().zip(w) {
                    for (o, v) in b.iter_mut().zip(&f.values[c as usize]) {
                        *o += w * v;
                    }
                }
                for (a, o) in out.iter_mut().enumerate() {
                    let sign = if a < 2 { 1.0 } else { -1.0 };
                    *o += I * sign * b[a];
                }
                out
            })
            .collect();
        Ok(ParticleField {
            grid: f.grid,
            mass: f.mass,
            values,
        })
    }
}

/// conv f for a one-particle field with its own mass.
pub fn conv_particle(f: &ParticleField, quad: &QuadratureConfig) -> Result<ParticleField> {
    ParticleOperator::new(&f.grid, f.mass, quad)?.conv_particle(f)
}

/// max |D(conv f) + f| over nodes whose time index lies in `times` and whose
/// spatial indices stay at least `margin` nodes away from every face.
pub fn green_identity_residual(
    f: &ParticleField,
    quad: &QuadratureConfig,
    times: std::ops::RangeInclusive<usize>,
    margin: usize,
) -> Result<f64> {
    let c = conv_particle(f, quad)?;
    let dc = apply_dirac_particle(&c)?;
    let g = f.grid;
    let s = g.spatial_count();
    let ns = g.spatial_points;
    let mut worst = 0.0f64;
    for q in 0..g.particle_count() {
        let (n, i) = (q / s, q % s);
        if !times.contains(&n) {
            continue;
        }
        if g.spatial_multi(i).iter().any(|&k| k < margin || k + margin >= ns) {
            continue;
        }
        for a in 0..4 {
            worst = worst.max((dc.values[q][a] + f.values[q][a]).norm());
        }
    }
    Ok(worst)
}

/// D⁺f at one node, with f evaluated only on grid nodes.
fn dplus_at(g: &GridSpec, m: f64, f: &impl Fn([f64; 4]) -> Spinor, n: usize, idx: [usize; 3]) -> Spinor {
    let ns = g.spatial_points;
    let inv = [1.0 / g.dt(), 1.0 / g.dx(), 1.0 / g.dx(), 1.0 / g.dx()];
    let gamma = GammaSet::standard();
    let at = |n: usize, k: [usize; 3]| f(g.event(n, g.spatial_index(k[0], k[1], k[2])));
    let mut out = at(n, idx).map(|v| v * m);
    for mu in 0..4 {
        let taps = if mu == 0 {
            causal_taps(n)
        } else {
            centered_taps(idx[mu - 1], ns)
        };
        let mut d = [ZERO; 4];
        for t in 0..taps.len {
            let (mut nn, mut kk) = (n as isize, idx.map(|v| v as isize));
            if mu == 0 {
                nn += taps.off[t];
            } else {
                kk[mu - 1] += taps.off[t];
            }
            let v = at(nn as usize, kk.map(|v| v as usize));
            for (a, v) in d.iter_mut().zip(&v) {
                *a += taps.w[t] * inv[mu] * v;
            }
        }
        for (a, o) in out.iter_mut().enumerate() {
            let (c, gv) = gamma.entry(mu, a);
            *o += I * gv * d[c];
        }
    }
    out
}

/// conv f at a single node, evaluating f lazily. Matches
/// [`ParticleOperator::conv_particle`] at that node without storing fields.
pub fn conv_at(
    g: &GridSpec,
    m: f64,
    quad: &QuadratureConfig,
    f: &impl Fn([f64; 4]) -> Spinor,
    n: usize,
    idx: [usize; 3],
) -> Result<Spinor> {
    use super::rows::row_entries;
    use super::{Piece, Rules};
    let rules = Rules::new(quad)?;
    let s = g.spatial_count();
    let q = n * s + g.spatial_index(idx[0], idx[1], idx[2]);
    let split = |col: usize| {
        let m3 = g.spatial_multi(col % s);
        (col / s, m3)
    };
    let mut out = [ZERO; 4];
    row_entries(&rules, g, &[Piece::A1, Piece::A2], m, q, |col, w| {
        let (nn, kk) = split(col);
        let v = dplus_at(g, m, f, nn, kk);
        for (o, v) in out.iter_mut().zip(&v) {
            *o += w * v;
        }
    })?;
    let mut b = [ZERO; 4];
    row_entries(&rules, g, &[Piece::A3, Piece::A4], m, q, |col, w| {
        let v = f(g.event(col / s, col % s));
        for (o, v) in b.iter_mut().zip(&v) {
            *o += w * v;
        }
    })?;
    for (a, o) in out.iter_mut().enumerate() {
        let sign = if a < 2 { 1.0 } else { -1.0 };
        *o += I * sign * b[a];
    }
    Ok(out)
}

/// D(conv f) at one interior node, with centered differences of conv f
/// taken from its values at the neighbouring nodes. Approximates −f.
pub fn dirac_conv_at(
    g: &GridSpec,
    m: f64,
    quad: &QuadratureConfig,
    f: &(impl Fn([f64; 4]) -> Spinor + Sync),
    n: usize,
    idx: [usize; 3],
) -> Result<Spinor> {
    let ns = g.spatial_points;
    if n == 0 || n + 1 >= g.time_steps || idx.iter().any(|&k| k == 0 || k + 1 >= ns) {
        return Err(Error::Config("residual node must be interior".into()));
    }
    let gamma = GammaSet::standard();
    let inv = [1.0 / g.dt(), 1.0 / g.dx(), 1.0 / g.dx(), 1.0 / g.dx()];
    let mut points = vec![(n, idx)];
    for mu in 0..4 {
        for sgn in [-1isize, 1] {
            let (mut nn, mut kk) = (n as isize, idx.map(|v| v as isize));
            if mu == 0 {
                nn += sgn;
            } else {
                kk[mu - 1] += sgn;
            }
            points.push((nn as usize, kk.map(|v| v as usize)));
        }
    }
    let vals = points
        .par_iter()
        .map(|&(nn, kk)| conv_at(g, m, quad, f, nn, kk))
        .collect::<Result<Vec<_>>>()?;
    let mut dc = vals[0].map(|v| -m * v);
    for mu in 0..4 {
        let (lo, hi) = (&vals[1 + 2 * mu], &vals[2 + 2 * mu]);
        for (a, o) in dc.iter_mut().enumerate() {
            let (c, gv) = gamma.entry(mu, a);
            *o += I * gv * 0.5 * inv[mu] * (hi[c] - lo[c]);
        }
    }
    Ok(dc)
}

/// max |D(conv f) + f| over the components at one interior node.
pub fn green_identity_residual_at(
    g: &GridSpec,
    m: f64,
    quad: &QuadratureConfig,
    f: &(impl Fn([f64; 4]) -> Spinor + Sync),
    n: usize,
    idx: [usize; 3],
) -> Result<f64> {
    let dc = dirac_conv_at(g, m, quad, f, n, idx)?;
    let fx = f(g.event(n, g.spatial_index(idx[0], idx[1], idx[2])));
    Ok(dc.iter().zip(&fx).map(|(a, b)| (a + b).norm()).fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bump(x: [f64; 4]) -> Spinor {
        let r2 = x[1] * x[1] + x[2] * x[2] + (x[3] - 0.2) * (x[3] - 0.2);
        let e = (-2.0 * r2).exp() * (1.0 + x[0]);
        [
            Complex64::new(e, 0.0),
            Complex64::new(0.0, e),
            Complex64::new(0.3 * e, 0.1 * e),
            ZERO,
        ]
    }

    #[test]
    fn pointwise_conv_matches_field_conv() {
        let g = GridSpec::new(1.0, 4, 1.5, 7).unwrap();
        let quad = QuadratureConfig::default();
        for m in [0.0, 0.7] {
            let f = ParticleField::from_fn(g, m, bump);
            let full = conv_particle(&f, &quad).unwrap();
            for (n, idx) in [(3, [3, 3, 3]), (2, [1, 4, 5]), (1, [0, 6, 2])] {
                let q = n * g.spatial_count() + g.spatial_index(idx[0], idx[1], idx[2]);
                let v = conv_at(&g, m, &quad, &bump, n, idx).unwrap();
                for a in 0..4 {
                    assert!((v[a] - full.values[q][a]).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn pointwise_residual_matches_field_residual() {
        let g = GridSpec::new(1.0, 5, 1.5, 7).unwrap();
        let quad = QuadratureConfig::default();
        let f = ParticleField::from_fn(g, 0.5, bump);
        let whole = green_identity_residual(&f, &quad, 2..=2, 3).unwrap();
        let point = green_identity_residual_at(&g, 0.5, &quad, &bump, 2, [3, 3, 3]).unwrap();
        assert!((whole - point).abs() < 1e-12);
    }
}
