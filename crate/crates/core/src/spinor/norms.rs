//! The spatial bracket norm [ψ](t₁,t₂) and the weighted sup norm ‖ψ‖_g.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::dirac::{apply_dirac, DerivativeSet};
use super::field::{MultiTimeField, Particle};
use super::grid::{GridSpec, SPIN};
use crate::error::Result;
use crate::specialfun::{weight_g, WeightSpec};

/// [ψ]² on every grid time pair, row-major in (n₁, n₂).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BracketTable {
    pub time_steps: usize,
    pub squared: Vec<f64>,
}

impl BracketTable {
    pub fn zeros(time_steps: usize) -> Self {
        Self {
            time_steps,
            squared: vec![0.0; time_steps * time_steps],
        }
    }

    #[inline]
    pub fn sq(&self, n1: usize, n2: usize) -> f64 {
        self.squared[n1 * self.time_steps + n2]
    }

    /// [ψ](t₁,t₂), the square root.
    #[inline]
    pub fn get(&self, n1: usize, n2: usize) -> f64 {
        self.sq(n1, n2).sqrt()
    }

    fn accumulate(&mut self, other: &[f64]) {
        for (a, b) in self.squared.iter_mut().zip(other) {
            *a += b;
        }
    }

    pub fn max_sq(&self) -> f64 {
        self.squared.iter().cloned().fold(0.0, f64::max)
    }
}

/// Trapezoid-rule ‖ψ(t₁,·,t₂,·)‖²_{L²} for every time pair.
pub fn slice_l2_table(field: &MultiTimeField) -> Vec<f64> {
    let g = field.grid;
    let nt = g.time_steps;
    let s = g.spatial_count();
    let w: Vec<f64> = (0..s).map(|i| g.trapezoid_weight(i)).collect();
    let block = nt * s * SPIN;
    // one partial table per (n₁, i₁) block, summed in fixed order afterwards
    let partial: Vec<(usize, Vec<f64>)> = field
        .values
        .par_chunks(block)
        .enumerate()
        .map(|(outer, chunk)| {
            let (n1, i1) = (outer / s, outer % s);
            let mut row = vec![0.0; nt];
            for (n2, r) in row.iter_mut().enumerate() {
                let mut acc = 0.0;
                for i2 in 0..s {
                    let off = (n2 * s + i2) * SPIN;
                    let v: f64 = chunk[off..off + SPIN].iter().map(|z| z.norm_sqr()).sum();
                    acc += w[i2] * v;
                }
                *r = w[i1] * acc;
            }
            (n1, row)
        })
        .collect();
    let mut table = vec![0.0; nt * nt];
    for (n1, row) in partial {
        for (n2, v) in row.into_iter().enumerate() {
            table[n1 * nt + n2] += v;
        }
    }
    table
}

/// [ψ]² from a precomputed derivative set.
pub fn spatial_norm_bracket(d: &DerivativeSet) -> BracketTable {
    let nt = d.fields[0].grid.time_steps;
    let mut t = BracketTable::zeros(nt);
    for f in &d.fields {
        t.accumulate(&slice_l2_table(f));
    }
    t
}

/// [ψ]² computed one derivative at a time, keeping at most two extra fields alive.
pub fn bracket_table(field: &MultiTimeField) -> Result<BracketTable> {
    let nt = field.grid.time_steps;
    let mut t = BracketTable::zeros(nt);
    t.accumulate(&slice_l2_table(field));
    {
        let d1 = apply_dirac(field, Particle::One)?;
        t.accumulate(&slice_l2_table(&d1));
    }
    let d2 = apply_dirac(field, Particle::Two)?;
    t.accumulate(&slice_l2_table(&d2));
    let d12 = apply_dirac(&d2, Particle::One)?;
    drop(d2);
    t.accumulate(&slice_l2_table(&d12));
    Ok(t)
}

/// ln g at every grid time; errors if any grid time saturates the weight.
pub fn ln_weights(grid: &GridSpec, spec: &WeightSpec) -> Result<Vec<f64>> {
    (0..grid.time_steps)
        .map(|n| {
            let t = grid.time(n);
            weight_g(t, spec)?;
            Ok(spec.ln_g(t))
        })
        .collect()
}

/// max over grid time pairs of [ψ](t₁,t₂)/(g(t₁)g(t₂)).
pub fn weighted_norm_from_table(
    table: &BracketTable,
    grid: &GridSpec,
    spec: &WeightSpec,
) -> Result<f64> {
    let lg = ln_weights(grid, spec)?;
    let nt = table.time_steps;
    let mut best = 0.0f64;
    for n1 in 0..nt {
        for n2 in 0..nt {
            let b = table.sq(n1, n2);
            if b > 0.0 {
                let v = (0.5 * b.ln() - lg[n1] - lg[n2]).exp();
                best = best.max(v);
            }
        }
    }
    Ok(best)
}

/// ‖ψ‖_g over the grid.
pub fn weighted_norm(field: &MultiTimeField, spec: &WeightSpec) -> Result<f64> {
    ln_weights(&field.grid, spec)?;
    let table = bracket_table(field)?;
    weighted_norm_from_table(&table, &field.grid, spec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use num_complex::Complex64;

    #[test]
    fn zero_field_has_zero_norms() {
        let g = GridSpec::new(0.5, 3, 1.0, 4).unwrap();
        let f = MultiTimeField::zeros(g, (1.0, 1.0));
        let t = bracket_table(&f).unwrap();
        assert!(t.squared.iter().all(|&v| v == 0.0));
        let spec = WeightSpec::new(0.5, 0.0).unwrap();
        assert_eq!(weighted_norm(&f, &spec).unwrap(), 0.0);
    }

    #[test]
    fn constant_field_bracket_closed_form() {
        let g = GridSpec::new(0.5, 3, 1.0, 4).unwrap();
        let (m1, m2) = (0.5, 1.5);
        let c = Complex64::new(0.3, 0.4);
        let f = MultiTimeField::from_fn(g, (m1, m2), |_, _| [c; SPIN]);
        let t = bracket_table(&f).unwrap();
        let v = g.box_volume();
        let expect = (1.0 + m1 * m1 + m2 * m2 + m1 * m1 * m2 * m2) * c.norm_sqr() * 16.0 * v * v;
        for &x in &t.squared {
            assert!((x / expect - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn streaming_matches_derivative_set() {
        let g = GridSpec::new(0.5, 3, 1.0, 4).unwrap();
        let f = MultiTimeField::from_fn(g, (0.3, 0.0), |x1, x2| {
            let mut v = [Complex64::new(0.0, 0.0); SPIN];
            for (s, o) in v.iter_mut().enumerate() {
                *o = Complex64::new(x1[1] * x2[2] + s as f64, x1[0] - x2[0]);
            }
            v
        });
        let a = bracket_table(&f).unwrap();
        let b = spatial_norm_bracket(&DerivativeSet::new(&f).unwrap());
        for (x, y) in a.squared.iter().zip(&b.squared) {
            assert!((x - y).abs() <= 1e-12 * y.abs().max(1.0));
        }
    }

    #[test]
    fn saturation_is_reported() {
        let g = GridSpec::new(2.0, 3, 1.0, 4).unwrap();
        let f = MultiTimeField::zeros(g, (0.0, 0.0));
        let spec = WeightSpec::new(0.5, 0.0).unwrap();
        assert!(matches!(
            weighted_norm(&f, &spec),
            Err(Error::WeightSaturated { .. })
        ));
    }
}
