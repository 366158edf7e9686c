//! The discretized two-particle wave function.
//!
//! Values are stored in one flat buffer with index layout
//! `(n₁, i₁, n₂, i₂, s)`, row-major: particle-1 time outermost, then the
//! particle-1 spatial multi-index `i = (ix·N + iy)·N + iz`, particle-2 time,
//! particle-2 spatial index, and finally the spin index `s = 4a + b` with `a`
//! the particle-1 spinor component. A block with fixed `(n₁, i₁)` is
//! contiguous, which the operators use to stream particle-2 work.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::grid::{GridSpec, SPIN};
use crate::error::{Error, Result};

pub type Spin16 = [Complex64; SPIN];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Particle {
    One,
    Two,
}

impl Particle {
    pub fn other(self) -> Particle {
        match self {
            Particle::One => Particle::Two,
            Particle::Two => Particle::One,
        }
    }

    pub fn index(self) -> usize {
        match self {
            Particle::One => 0,
            Particle::Two => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MultiTimeField {
    pub grid: GridSpec,
    pub masses: (f64, f64),
    pub values: Vec<Complex64>,
}

impl MultiTimeField {
    pub fn zeros(grid: GridSpec, masses: (f64, f64)) -> Self {
        Self {
            grid,
            masses,
            values: vec![Complex64::new(0.0, 0.0); grid.len()],
        }
    }

    pub fn from_values(grid: GridSpec, masses: (f64, f64), values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Config(format!(
                "expected {} values, got {}",
                grid.len(),
                values.len()
            )));
        }
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::Domain("field values must be finite".into()));
        }
        Ok(Self {
            grid,
            masses,
            values,
        })
    }

    /// Samples `f(x₁, x₂)` at every node.
    pub fn from_fn<F>(grid: GridSpec, masses: (f64, f64), f: F) -> Self
    where
        F: Fn([f64; 4], [f64; 4]) -> Spin16 + Sync,
    {
        let mut field = Self::zeros(grid, masses);
        let s = grid.spatial_count();
        let nt = grid.time_steps;
        let block = nt * s * SPIN;
        field
            .values
            .par_chunks_mut(block)
            .enumerate()
            .for_each(|(outer, chunk)| {
                let (n1, i1) = (outer / s, outer % s);
                let x1 = grid.event(n1, i1);
                for n2 in 0..nt {
                    for i2 in 0..s {
                        let v = f(x1, grid.event(n2, i2));
                        let off = (n2 * s + i2) * SPIN;
                        chunk[off..off + SPIN].copy_from_slice(&v);
                    }
                }
            });
        field
    }

    #[inline]
    pub fn index(&self, n1: usize, i1: usize, n2: usize, i2: usize) -> usize {
        let s = self.grid.spatial_count();
        let nt = self.grid.time_steps;
        (((n1 * s + i1) * nt + n2) * s + i2) * SPIN
    }

    #[inline]
    pub fn at(&self, n1: usize, i1: usize, n2: usize, i2: usize) -> &[Complex64] {
        let k = self.index(n1, i1, n2, i2);
        &self.values[k..k + SPIN]
    }

    #[inline]
    pub fn at_mut(&mut self, n1: usize, i1: usize, n2: usize, i2: usize) -> &mut [Complex64] {
        let k = self.index(n1, i1, n2, i2);
        &mut self.values[k..k + SPIN]
    }

    /// Copy of the (n₁, n₂) slice in `(i₁, i₂, s)` layout.
    pub fn slice(&self, n1: usize, n2: usize) -> Vec<Complex64> {
        let s = self.grid.spatial_count();
        let chunk = s * SPIN;
        let mut out = Vec::with_capacity(self.grid.slice_len());
        for i1 in 0..s {
            let k = self.index(n1, i1, n2, 0);
            out.extend_from_slice(&self.values[k..k + chunk]);
        }
        out
    }

    pub fn set_slice(&mut self, n1: usize, n2: usize, data: &[Complex64]) {
        let s = self.grid.spatial_count();
        let chunk = s * SPIN;
        assert_eq!(data.len(), self.grid.slice_len());
        for i1 in 0..s {
            let k = self.index(n1, i1, n2, 0);
            self.values[k..k + chunk].copy_from_slice(&data[i1 * chunk..(i1 + 1) * chunk]);
        }
    }

    pub fn same_shape(&self, other: &Self) -> bool {
        self.grid == other.grid
    }

    fn check_shape(&self, other: &Self) {
        assert!(self.same_shape(other), "fields live on different grids");
    }

    pub fn scale(&mut self, c: Complex64) {
        self.values.par_iter_mut().for_each(|v| *v *= c);
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        let mut out = self.clone();
        out.scale(c);
        out
    }

    /// self += c · other
    pub fn axpy(&mut self, c: Complex64, other: &Self) {
        self.check_shape(other);
        self.values
            .par_iter_mut()
            .zip(other.values.par_iter())
            .for_each(|(a, b)| *a += c * b);
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.axpy(Complex64::new(1.0, 0.0), other);
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.axpy(Complex64::new(-1.0, 0.0), other);
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.values
            .par_iter()
            .map(|v| v.norm())
            .reduce(|| 0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.check_shape(other);
        self.values
            .par_iter()
            .zip(other.values.par_iter())
            .map(|(a, b)| (a - b).norm())
            .reduce(|| 0.0, f64::max)
    }

    /// Max |ψ| over the (n₁, n₂) slice.
    pub fn slice_max_abs(&self, n1: usize, n2: usize) -> f64 {
        let s = self.grid.spatial_count();
        (0..s)
            .flat_map(|i1| {
                let k = self.index(n1, i1, n2, 0);
                self.values[k..k + s * SPIN].iter().map(|v| v.norm())
            })
            .fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.values
            .par_iter()
            .all(|v| v.re.is_finite() && v.im.is_finite())
    }

    /// Max |ψ| over nodes where the given particle sits on a box face.
    pub fn boundary_max_abs(&self, particle: Particle) -> f64 {
        let g = &self.grid;
        let s = g.spatial_count();
        let nt = g.time_steps;
        let mut best = 0.0f64;
        for n1 in 0..nt {
            for i1 in 0..s {
                for n2 in 0..nt {
                    for i2 in 0..s {
                        let on_face = match particle {
                            Particle::One => g.is_boundary(i1),
                            Particle::Two => g.is_boundary(i2),
                        };
                        if on_face {
                            for v in self.at(n1, i1, n2, i2) {
                                best = best.max(v.norm());
                            }
                        }
                    }
                }
            }
        }
        best
    }
}

/// Sum of squares of the discrete field over a slice with trapezoid weights.
pub fn slice_l2_sq(grid: &GridSpec, slice: &[Complex64]) -> f64 {
    let s = grid.spatial_count();
    let weights: Vec<f64> = (0..s).map(|i| grid.trapezoid_weight(i)).collect();
    (0..s)
        .into_par_iter()
        .map(|i1| {
            let mut acc = 0.0;
            for i2 in 0..s {
                let off = (i1 * s + i2) * SPIN;
                let block: f64 = slice[off..off + SPIN].iter().map(|v| v.norm_sqr()).sum();
                acc += weights[i2] * block;
            }
            weights[i1] * acc
        })
        .sum()
}

/// Plain Riemann sum Σ|ψ|² Δx⁶ over a slice (exactly conserved by unitary mode evolution).
pub fn slice_discrete_l2_sq(grid: &GridSpec, slice: &[Complex64]) -> f64 {
    let cell = grid.dx().powi(6);
    slice.iter().map(|v| v.norm_sqr()).sum::<f64>() * cell
}

struct AxisLocator {
    lo: usize,
    frac: f64,
}

fn locate(x: f64, origin: f64, h: f64, n: usize, what: &str) -> Result<AxisLocator> {
    let r = (x - origin) / h;
    let last = (n - 1) as f64;
    let tol = 1e-10;
    if !(r >= -tol && r <= last + tol) {
        return Err(Error::OutOfDomain(format!("{what} = {x} outside grid")));
    }
    let r = r.clamp(0.0, last);
    let mut lo = r.floor() as usize;
    if lo >= n - 1 {
        lo = n - 2;
    }
    let mut frac = r - lo as f64;
    // snap so that queries at nodes return stored values exactly
    if frac.abs() < 1e-12 {
        frac = 0.0;
    } else if (1.0 - frac).abs() < 1e-12 {
        frac = 1.0;
    }
    Ok(AxisLocator { lo, frac })
}

/// Multilinear interpolation across the 2⁸ corners of the surrounding cell.
pub fn interpolate(field: &MultiTimeField, x1: [f64; 4], x2: [f64; 4]) -> Result<Spin16> {
    let g = &field.grid;
    let mut loc = Vec::with_capacity(8);
    for (p, x) in [x1, x2].iter().enumerate() {
        loc.push(locate(x[0], 0.0, g.dt(), g.time_steps, &format!("t{}", p + 1))?);
        for (a, name) in ["x", "y", "z"].iter().enumerate() {
            loc.push(locate(
                x[a + 1],
                -g.spatial_half_width,
                g.dx(),
                g.spatial_points,
                &format!("{name}{}", p + 1),
            )?);
        }
    }
    let mut out = [Complex64::new(0.0, 0.0); SPIN];
    for corner in 0..256usize {
        let mut w = 1.0;
        let mut idx = [0usize; 8];
        for d in 0..8 {
            let bit = (corner >> d) & 1;
            let l = &loc[d];
            w *= if bit == 1 { l.frac } else { 1.0 - l.frac };
            idx[d] = l.lo + bit;
        }
        if w == 0.0 {
            continue;
        }
        let i1 = g.spatial_index(idx[1], idx[2], idx[3]);
        let i2 = g.spatial_index(idx[5], idx[6], idx[7]);
        for (o, v) in out.iter_mut().zip(field.at(idx[0], i1, idx[4], i2)) {
            *o += w * v;
        }
    }
    Ok(out)
}
