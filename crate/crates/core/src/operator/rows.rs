//! Sparse real row operators over particle-local nodes (n, i).

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{Piece, QuadratureConfig, Rules};
use crate::error::Result;
use crate::spinor::GridSpec;

const SNAP: f64 = 1e-12;

/// One row per output node q = n·Ns³ + i; columns index input nodes the
/// same way. Columns are sorted, so sums run in a fixed order.
#[derive(Debug, Clone, PartialEq)]
pub struct RowOperator {
    pub nodes: usize,
    offsets: Vec<usize>,
    cols: Vec<u32>,
    weights: Vec<f64>,
    /// Σ|w| of quadrature nodes that fell outside the spatial box, per row.
    dropped: Vec<f64>,
    max_nodes_per_row: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct OperatorDiagnostics {
    pub quadrature_nodes_per_row: usize,
    pub nonzeros: usize,
    pub max_dropped_weight: f64,
    /// max dropped weight × max |input| on the box faces; 0 when nothing
    /// leaves the box or the input vanishes there.
    pub clipped_mass: f64,
}

impl OperatorDiagnostics {
    pub fn merge(self, other: Self) -> Self {
        Self {
            quadrature_nodes_per_row: self
                .quadrature_nodes_per_row
                .max(other.quadrature_nodes_per_row),
            nonzeros: self.nonzeros + other.nonzeros,
            max_dropped_weight: self.max_dropped_weight.max(other.max_dropped_weight),
            clipped_mass: self.clipped_mass.max(other.clipped_mass),
        }
    }
}

struct Corner {
    lo: usize,
    frac: f64,
}

fn locate(r: f64, n: usize) -> Corner {
    let last = (n - 1) as f64;
    let r = r.clamp(0.0, last);
    let mut lo = r.floor() as usize;
    if lo >= n - 1 {
        lo = n - 2;
    }
    let mut frac = r - lo as f64;
    if frac < SNAP {
        frac = 0.0;
    } else if frac > 1.0 - SNAP {
        lo += 1;
        frac = 0.0;
    }
    Corner { lo, frac }
}

/// Streams the interpolation-weighted entries (column, weight) of row `q`,
/// unmerged. Returns the dropped weight and the number of quadrature nodes.
pub(crate) fn row_entries(
    rules: &Rules,
    grid: &GridSpec,
    pieces: &[Piece],
    m: f64,
    q: usize,
    mut emit: impl FnMut(usize, f64),
) -> Result<(f64, usize)> {
    let s = grid.spatial_count();
    let ns = grid.spatial_points;
    let (dt, dx, l) = (grid.dt(), grid.dx(), grid.spatial_half_width);
    let tol = 1e-9 * dx;
    let (n, i) = (q / s, q % s);
    let t = grid.time(n);
    let x = grid.spatial_point(i);
    let mut dropped = 0.0;
    let mut count = 0usize;
    for &piece in pieces {
        rules.for_each_node(piece, t, x, m, |tau, y, w| {
            count += 1;
            if w == 0.0 {
                return;
            }
            if y.iter().any(|&c| c < -l - tol || c > l + tol) {
                dropped += w.abs();
                return;
            }
            let ct = locate(tau / dt, grid.time_steps);
            let cs = [
                locate((y[0] + l) / dx, ns),
                locate((y[1] + l) / dx, ns),
                locate((y[2] + l) / dx, ns),
            ];
            for corner in 0..16usize {
                let mut wc = w;
                let mut idx = [0usize; 4];
                for (d, c) in std::iter::once(&ct).chain(cs.iter()).enumerate() {
                    let bit = (corner >> d) & 1;
                    wc *= if bit == 1 { c.frac } else { 1.0 - c.frac };
                    idx[d] = c.lo + bit;
                }
                if wc == 0.0 {
                    continue;
                }
                emit(idx[0] * s + grid.spatial_index(idx[1], idx[2], idx[3]), wc);
            }
        })?;
    }
    Ok((dropped, count))
}

impl RowOperator {
    /// Sum of the given pieces, sampled by 4-linear interpolation.
    pub fn build(grid: &GridSpec, pieces: &[Piece], m: f64, quad: &QuadratureConfig) -> Result<Self> {
        let rules = Rules::new(quad)?;
        let nodes = grid.particle_count();

        type Row = (Vec<u32>, Vec<f64>, f64, usize);
        let rows: Vec<Result<Row>> = (0..nodes)
            .into_par_iter()
            .map_init(
                || (vec![0.0f64; nodes], vec![false; nodes], Vec::<u32>::new()),
                |(acc, mark, touched), q| {
                    let (dropped, count) = row_entries(&rules, grid, pieces, m, q, |col, wc| {
                        if !mark[col] {
                            mark[col] = true;
                            touched.push(col as u32);
                        }
                        acc[col] += wc;
                    })?;
                    touched.sort_unstable();
                    let mut cols = Vec::with_capacity(touched.len());
                    let mut ws = Vec::with_capacity(touched.len());
                    for &c in touched.iter() {
                        let c = c as usize;
                        if acc[c] != 0.0 {
                            cols.push(c as u32);
                            ws.push(acc[c]);
                        }
                        acc[c] = 0.0;
                        mark[c] = false;
                    }
                    touched.clear();
                    Ok((cols, ws, dropped, count))
                },
            )
            .collect();

        let mut offsets = Vec::with_capacity(nodes + 1);
        offsets.push(0);
        let mut cols = Vec::new();
        let mut weights = Vec::new();
        let mut dropped = Vec::with_capacity(nodes);
        let mut max_nodes_per_row = 0;
        for row in rows {
            let (c, w, d, count) = row?;
            cols.extend_from_slice(&c);
            weights.extend_from_slice(&w);
            offsets.push(cols.len());
            dropped.push(d);
            max_nodes_per_row = max_nodes_per_row.max(count);
        }
        Ok(Self {
            nodes,
            offsets,
            cols,
            weights,
            dropped,
            max_nodes_per_row,
        })
    }

    #[inline]
    pub fn row(&self, q: usize) -> (&[u32], &[f64]) {
        let (a, b) = (self.offsets[q], self.offsets[q + 1]);
        (&self.cols[a..b], &self.weights[a..b])
    }

    pub fn nonzeros(&self) -> usize {
        self.cols.len()
    }

    pub fn max_dropped_weight(&self) -> f64 {
        self.dropped.iter().cloned().fold(0.0, f64::max)
    }

    pub fn diagnostics(&self) -> OperatorDiagnostics {
        OperatorDiagnostics {
            quadrature_nodes_per_row: self.max_nodes_per_row,
            nonzeros: self.nonzeros(),
            max_dropped_weight: self.max_dropped_weight(),
            clipped_mass: 0.0,
        }
    }

    /// Applies the row operator to a scalar function sampled on particle-local nodes.
    pub fn apply_scalar(&self, values: &[f64]) -> Vec<f64> {
        (0..self.nodes)
            .map(|q| {
                let (c, w) = self.row(q);
                c.iter().zip(w).map(|(&c, &w)| w * values[c as usize]).sum()
            })
            .collect()
    }
}
