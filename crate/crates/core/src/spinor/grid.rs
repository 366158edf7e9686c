use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default memory budget for one (t₁, t₂) slice.
pub const DEFAULT_SLICE_BUDGET: usize = 512 << 20;

/// Components per grid point: ℂ⁴ ⊗ ℂ⁴.
pub const SPIN: usize = 16;

/// Uniform product grid on [0, T] × [−L, L]³, identical for both particles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub time_extent: f64,
    pub time_steps: usize,
    pub spatial_half_width: f64,
    pub spatial_points: usize,
}

impl GridSpec {
    pub fn new(
        time_extent: f64,
        time_steps: usize,
        spatial_half_width: f64,
        spatial_points: usize,
    ) -> Result<Self> {
        Self::with_budget(
            time_extent,
            time_steps,
            spatial_half_width,
            spatial_points,
            DEFAULT_SLICE_BUDGET,
        )
    }

    pub fn with_budget(
        time_extent: f64,
        time_steps: usize,
        spatial_half_width: f64,
        spatial_points: usize,
        slice_budget_bytes: usize,
    ) -> Result<Self> {
        if !(time_extent > 0.0 && time_extent.is_finite()) {
            return Err(Error::Config(format!("time extent {time_extent} must be > 0")));
        }
        if time_steps < 2 {
            return Err(Error::Config(format!("time steps {time_steps} must be >= 2")));
        }
        if !(spatial_half_width > 0.0 && spatial_half_width.is_finite()) {
            return Err(Error::Config(format!(
                "spatial half-width {spatial_half_width} must be > 0"
            )));
        }
        if spatial_points < 4 {
            return Err(Error::Config(format!(
                "spatial points {spatial_points} must be >= 4 per axis"
            )));
        }
        let grid = Self {
            time_extent,
            time_steps,
            spatial_half_width,
            spatial_points,
        };
        let bytes = grid.slice_len() * std::mem::size_of::<num_complex::Complex64>();
        if bytes > slice_budget_bytes {
            return Err(Error::Config(format!(
                "one time-pair slice needs {bytes} bytes, budget is {slice_budget_bytes}"
            )));
        }
        Ok(grid)
    }

    #[inline]
    pub fn dt(&self) -> f64 {
        self.time_extent / (self.time_steps - 1) as f64
    }

    #[inline]
    pub fn dx(&self) -> f64 {
        2.0 * self.spatial_half_width / (self.spatial_points - 1) as f64
    }

    #[inline]
    pub fn time(&self, n: usize) -> f64 {
        n as f64 * self.dt()
    }

    #[inline]
    pub fn coord(&self, i: usize) -> f64 {
        -self.spatial_half_width + i as f64 * self.dx()
    }

    /// Spatial points per particle (Ns³).
    #[inline]
    pub fn spatial_count(&self) -> usize {
        self.spatial_points.pow(3)
    }

    /// Space-time points per particle (Nt · Ns³).
    #[inline]
    pub fn particle_count(&self) -> usize {
        self.time_steps * self.spatial_count()
    }

    /// Complex values in one (t₁, t₂) slice.
    #[inline]
    pub fn slice_len(&self) -> usize {
        self.spatial_count() * self.spatial_count() * SPIN
    }

    /// Complex values in the whole field.
    #[inline]
    pub fn len(&self) -> usize {
        self.particle_count() * self.particle_count() * SPIN
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn spatial_index(&self, ix: usize, iy: usize, iz: usize) -> usize {
        (ix * self.spatial_points + iy) * self.spatial_points + iz
    }

    #[inline]
    pub fn spatial_multi(&self, i: usize) -> [usize; 3] {
        let n = self.spatial_points;
        [i / (n * n), (i / n) % n, i % n]
    }

    #[inline]
    pub fn spatial_point(&self, i: usize) -> [f64; 3] {
        let [a, b, c] = self.spatial_multi(i);
        [self.coord(a), self.coord(b), self.coord(c)]
    }

    /// (t, x, y, z) of particle-local node (n, i).
    #[inline]
    pub fn event(&self, n: usize, i: usize) -> [f64; 4] {
        let [x, y, z] = self.spatial_point(i);
        [self.time(n), x, y, z]
    }

    /// Trapezoid weight of a spatial node (product over the three axes).
    pub fn trapezoid_weight(&self, i: usize) -> f64 {
        let h = self.dx();
        let last = self.spatial_points - 1;
        self.spatial_multi(i)
            .iter()
            .map(|&k| if k == 0 || k == last { 0.5 * h } else { h })
            .product()
    }

    /// Spatial nodes on the faces of the box.
    pub fn is_boundary(&self, i: usize) -> bool {
        let last = self.spatial_points - 1;
        self.spatial_multi(i).iter().any(|&k| k == 0 || k == last)
    }

    /// Box volume (2L)³ per particle.
    pub fn box_volume(&self) -> f64 {
        (2.0 * self.spatial_half_width).powi(3)
    }

    /// Time index closest to t, if t is a node within 1e-9·Δt.
    pub fn time_index(&self, t: f64) -> Option<usize> {
        let r = t / self.dt();
        let n = r.round();
        if (r - n).abs() < 1e-9 && n >= 0.0 && (n as usize) < self.time_steps {
            Some(n as usize)
        } else {
            None
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spacings_and_sizes() {
        let g = GridSpec::new(1.0, 6, 2.5, 6).unwrap();
        assert!((g.dt() - 0.2).abs() < 1e-15);
        assert!((g.dx() - 1.0).abs() < 1e-15);
        assert_eq!(g.spatial_count(), 216);
        assert_eq!(g.slice_len(), 216 * 216 * 16);
        assert_eq!(g.len(), 36 * 216 * 216 * 16);
        assert_eq!(g.spatial_multi(g.spatial_index(1, 2, 3)), [1, 2, 3]);
        assert_eq!(g.time_index(0.4), Some(2));
        assert_eq!(g.time_index(0.41), None);
    }

    #[test]
    fn trapezoid_weights_sum_to_volume() {
        let g = GridSpec::new(1.0, 3, 1.5, 5).unwrap();
        let total: f64 = (0..g.spatial_count()).map(|i| g.trapezoid_weight(i)).sum();
        assert!((total - g.box_volume()).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(GridSpec::new(0.0, 3, 1.0, 4).is_err());
        assert!(GridSpec::new(1.0, 1, 1.0, 4).is_err());
        assert!(GridSpec::new(1.0, 3, 1.0, 3).is_err());
        assert!(GridSpec::new(1.0, 3, -1.0, 4).is_err());
        assert!(GridSpec::with_budget(1.0, 3, 1.0, 8, 1 << 20).is_err());
    }
}
