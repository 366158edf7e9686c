//! Free two-particle Dirac solutions: plane waves and spectral evolution of
//! Cauchy data given on the slice t₁ = t₂ = 0.

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{FftDirection, FftPlanner};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::spinor::gamma::{GammaSet, Mat4};
use crate::spinor::{GridSpec, MultiTimeField, SPIN};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

pub type Spinor = [Complex64; 4];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlaneWaveSpec {
    pub momentum: [f64; 3],
    /// 1, 2: positive energy (spin up/down); 3, 4: negative energy.
    pub spin_index: u8,
    pub mass: f64,
    pub amplitude: Complex64,
}

impl PlaneWaveSpec {
    pub fn new(momentum: [f64; 3], spin_index: u8, mass: f64) -> Result<Self> {
        if !(1..=4).contains(&spin_index) {
            return Err(Error::Config(format!("spin index {spin_index} not in 1..=4")));
        }
        if !(mass.is_finite() && mass >= 0.0) {
            return Err(Error::Domain(format!("mass {mass} must be finite and >= 0")));
        }
        Ok(Self {
            momentum,
            spin_index,
            mass,
            amplitude: Complex64::new(1.0, 0.0),
        })
    }

    pub fn with_amplitude(mut self, amplitude: Complex64) -> Self {
        self.amplitude = amplitude;
        self
    }

    pub fn is_positive_energy(&self) -> bool {
        self.spin_index <= 2
    }

    /// Signed energy p⁰.
    pub fn energy(&self) -> f64 {
        let e = energy(self.momentum, self.mass);
        if self.is_positive_energy() {
            e
        } else {
            -e
        }
    }
}

pub fn energy(p: [f64; 3], m: f64) -> f64 {
    (p[0] * p[0] + p[1] * p[1] + p[2] * p[2] + m * m).sqrt()
}

/// Free Hamiltonian α·p + βm in the Dirac representation.
pub fn hamiltonian(p: [f64; 3], m: f64) -> Mat4 {
    let g = GammaSet::standard();
    let mut h = [[ZERO; 4]; 4];
    for r in 0..4 {
        let (c0, g0) = g.entry(0, r);
        h[r][c0] += g0 * m;
        for j in 0..3 {
            // α_j = γ⁰γ^j
            let (c, gj) = g.entry(j + 1, c0);
            h[r][c] += g0 * gj * p[j];
        }
    }
    h
}

/// Normalized eigenspinor u with (γ^μ p_μ − m) u = 0.
pub fn eigenspinor(spec: &PlaneWaveSpec) -> Spinor {
    let p = spec.momentum;
    let m = spec.mass;
    let e = energy(p, m);
    let up = matches!(spec.spin_index, 1 | 3);
    let chi = if up {
        [Complex64::new(1.0, 0.0), ZERO]
    } else {
        [ZERO, Complex64::new(1.0, 0.0)]
    };
    let mut u = [ZERO; 4];
    if e + m == 0.0 {
        // massless at rest: every spinor solves the equation
        u[(spec.spin_index - 1) as usize] = Complex64::new(1.0, 0.0);
        return u;
    }
    // σ·p χ
    let sp = [
        Complex64::new(p[2], 0.0) * chi[0] + Complex64::new(p[0], -p[1]) * chi[1],
        Complex64::new(p[0], p[1]) * chi[0] - Complex64::new(p[2], 0.0) * chi[1],
    ];
    if spec.is_positive_energy() {
        u[0] = chi[0];
        u[1] = chi[1];
        u[2] = sp[0] / (e + m);
        u[3] = sp[1] / (e + m);
    } else {
        u[0] = -sp[0] / (e + m);
        u[1] = -sp[1] / (e + m);
        u[2] = chi[0];
        u[3] = chi[1];
    }
    let n = u.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    u.map(|z| z / n)
}

/// max |(γ^μ p_μ − m) u| for the eigenspinor of `spec`.
pub fn eigenspinor_residual(spec: &PlaneWaveSpec) -> f64 {
    let u = eigenspinor(spec);
    let p = spec.momentum;
    let lower = [
        Complex64::new(spec.energy(), 0.0),
        Complex64::new(-p[0], 0.0),
        Complex64::new(-p[1], 0.0),
        Complex64::new(-p[2], 0.0),
    ];
    let s = GammaSet::standard().slash(lower);
    (0..4)
        .map(|r| {
            let v: Complex64 = (0..4).map(|c| s[r][c] * u[c]).sum::<Complex64>() - spec.mass * u[r];
            v.norm()
        })
        .fold(0.0, f64::max)
}

fn plane_wave_value(spec: &PlaneWaveSpec, u: &Spinor, x: [f64; 4]) -> Spinor {
    let p = spec.momentum;
    let phase = -(spec.energy() * x[0] - p[0] * x[1] - p[1] * x[2] - p[2] * x[3]);
    let f = spec.amplitude * Complex64::from_polar(1.0, phase);
    u.map(|c| c * f)
}

fn aliasing_warning(spec: &PlaneWaveSpec, grid: &GridSpec, which: usize) -> Option<String> {
    let p = spec.momentum;
    let pn = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
    (pn * grid.dx() > PI).then(|| {
        format!(
            "particle {which}: |p|·dx = {:.3} exceeds pi, momentum aliased on the grid",
            pn * grid.dx()
        )
    })
}

/// A sampled free field together with warnings collected while building it.
#[derive(Debug, Clone)]
pub struct FreeField {
    pub field: MultiTimeField,
    pub warnings: Vec<String>,
}

/// Sum over pairs of u₁e^{−ip₁·x₁} ⊗ u₂e^{−ip₂·x₂}.
pub fn plane_wave_sum(pairs: &[(PlaneWaveSpec, PlaneWaveSpec)], grid: GridSpec) -> Result<FreeField> {
    let first = pairs
        .first()
        .ok_or_else(|| Error::Config("no plane waves given".into()))?;
    let masses = (first.0.mass, first.1.mass);
    let mut warnings = Vec::new();
    let mut prepared = Vec::with_capacity(pairs.len());
    for (s1, s2) in pairs {
        if (s1.mass, s2.mass) != masses {
            return Err(Error::Config("plane waves in one field must share masses".into()));
        }
        for (k, s) in [(1, s1), (2, s2)] {
            let r = eigenspinor_residual(s);
            if r > 1e-12 * (1.0 + s.energy().abs()) {
                return Err(Error::Domain(format!("eigenspinor residual {r:.3e} too large")));
            }
            if let Some(w) = aliasing_warning(s, &grid, k) {
                warnings.push(w);
            }
        }
        prepared.push((*s1, eigenspinor(s1), *s2, eigenspinor(s2)));
    }
    let field = MultiTimeField::from_fn(grid, masses, |x1, x2| {
        let mut out = [ZERO; SPIN];
        for (s1, u1, s2, u2) in &prepared {
            let a = plane_wave_value(s1, u1, x1);
            let b = plane_wave_value(s2, u2, x2);
            for i in 0..4 {
                for j in 0..4 {
                    out[4 * i + j] += a[i] * b[j];
                }
            }
        }
        out
    });
    Ok(FreeField { field, warnings })
}

pub fn plane_wave_field(s1: &PlaneWaveSpec, s2: &PlaneWaveSpec, grid: GridSpec) -> Result<FreeField> {
    plane_wave_sum(&[(*s1, *s2)], grid)
}

/// Values on the (t₁, t₂) = (0, 0) slice in `(i₁, i₂, s)` layout.
#[derive(Debug, Clone, PartialEq)]
pub struct CauchyData {
    pub grid: GridSpec,
    pub values: Vec<Complex64>,
}

impl CauchyData {
    pub fn new(grid: GridSpec, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.slice_len() {
            return Err(Error::Config(format!(
                "Cauchy data needs {} values, got {}",
                grid.slice_len(),
                values.len()
            )));
        }
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::Domain("Cauchy data must be finite".into()));
        }
        Ok(Self { grid, values })
    }

    pub fn from_field(field: &MultiTimeField) -> Self {
        Self {
            grid: field.grid,
            values: field.slice(0, 0),
        }
    }

    pub fn from_fn<F>(grid: GridSpec, f: F) -> Self
    where
        F: Fn([f64; 3], [f64; 3]) -> [Complex64; SPIN] + Sync,
    {
        let s = grid.spatial_count();
        let mut values = vec![ZERO; grid.slice_len()];
        values
            .par_chunks_mut(s * SPIN)
            .enumerate()
            .for_each(|(i1, chunk)| {
                let x1 = grid.spatial_point(i1);
                for i2 in 0..s {
                    let v = f(x1, grid.spatial_point(i2));
                    chunk[i2 * SPIN..(i2 + 1) * SPIN].copy_from_slice(&v);
                }
            });
        Self { grid, values }
    }

    /// Max |ψ₀| on the box faces of either particle.
    pub fn boundary_max_abs(&self) -> f64 {
        let s = self.grid.spatial_count();
        let mut best = 0.0f64;
        for i1 in 0..s {
            for i2 in 0..s {
                if self.grid.is_boundary(i1) || self.grid.is_boundary(i2) {
                    let off = (i1 * s + i2) * SPIN;
                    for v in &self.values[off..off + SPIN] {
                        best = best.max(v.norm());
                    }
                }
            }
        }
        best
    }
}

/// Gaussian wave packet for one particle: envelope exp(−|x−c|²/(2w²)) with a
/// carrier plane wave of the given momentum and spinor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianPacket {
    pub center: [f64; 3],
    pub width: f64,
    pub momentum: [f64; 3],
    pub spin_index: u8,
}

impl GaussianPacket {
    pub fn value(&self, mass: f64, x: [f64; 3]) -> Result<Spinor> {
        let spec = PlaneWaveSpec::new(self.momentum, self.spin_index, mass)?;
        let u = eigenspinor(&spec);
        Ok(self.value_with(&u, x))
    }

    fn value_with(&self, u: &Spinor, x: [f64; 3]) -> Spinor {
        let mut r2 = 0.0;
        let mut phase = 0.0;
        for j in 0..3 {
            let d = x[j] - self.center[j];
            r2 += d * d;
            phase += self.momentum[j] * x[j];
        }
        let f = Complex64::from_polar((-0.5 * r2 / (self.width * self.width)).exp(), phase);
        u.map(|c| c * f)
    }
}

/// Product Cauchy datum φ₁(x₁) ⊗ φ₂(x₂) built from two packets.
pub fn packet_cauchy_data(
    p1: &GaussianPacket,
    p2: &GaussianPacket,
    masses: (f64, f64),
    grid: GridSpec,
) -> Result<CauchyData> {
    if !(p1.width > 0.0 && p2.width > 0.0) {
        return Err(Error::Config("packet widths must be positive".into()));
    }
    let u1 = eigenspinor(&PlaneWaveSpec::new(p1.momentum, p1.spin_index, masses.0)?);
    let u2 = eigenspinor(&PlaneWaveSpec::new(p2.momentum, p2.spin_index, masses.1)?);
    Ok(CauchyData::from_fn(grid, |x1, x2| {
        let a = p1.value_with(&u1, x1);
        let b = p2.value_with(&u2, x2);
        let mut out = [ZERO; SPIN];
        for i in 0..4 {
            for j in 0..4 {
                out[4 * i + j] = a[i] * b[j];
            }
        }
        out
    }))
}

/// In-place FFT over the six spatial axes of a slice, per spin component.
fn fft6(data: &mut [Complex64], ns: usize, direction: FftDirection) {
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft(ns, direction);
    // axis strides in complex values; spin is innermost
    let mut stride = SPIN;
    let total = data.len();
    for _axis in 0..6 {
        let span = stride * ns;
        let outer = total / span;
        let mut line = vec![ZERO; ns];
        let mut scratch = vec![ZERO; fft.get_inplace_scratch_len()];
        for o in 0..outer {
            let base = o * span;
            for inner in 0..stride {
                for (k, v) in line.iter_mut().enumerate() {
                    *v = data[base + inner + k * stride];
                }
                fft.process_with_scratch(&mut line, &mut scratch);
                for (k, v) in line.iter().enumerate() {
                    data[base + inner + k * stride] = *v;
                }
            }
        }
        stride = span;
    }
    if direction == FftDirection::Inverse {
        let norm = 1.0 / (ns as f64).powi(6);
        data.iter_mut().for_each(|v| *v *= norm);
    }
}

fn wavenumber(q: usize, ns: usize, period: f64) -> f64 {
    let signed = if q <= ns / 2 { q as f64 } else { q as f64 - ns as f64 };
    2.0 * PI * signed / period
}

/// exp(−iHt) = cos(Et) − i sin(Et) H/E.
fn evolution(p: [f64; 3], m: f64, t: f64) -> Mat4 {
    let e = energy(p, m);
    let mut u = [[ZERO; 4]; 4];
    if e == 0.0 {
        for (r, row) in u.iter_mut().enumerate() {
            row[r] = Complex64::new(1.0, 0.0);
        }
        return u;
    }
    let h = hamiltonian(p, m);
    let (s, c) = (e * t).sin_cos();
    for r in 0..4 {
        for col in 0..4 {
            u[r][col] = Complex64::new(0.0, -s / e) * h[r][col];
        }
        u[r][r] += c;
    }
    u
}

/// Evolves Cauchy data with the exact free Dirac propagator of each particle
/// on the periodic box of period Ns·Δx, one time variable per particle.
pub fn propagate_cauchy(data: &CauchyData, masses: (f64, f64), grid: GridSpec) -> Result<MultiTimeField> {
    if data.grid != grid {
        return Err(Error::Config("Cauchy data grid differs from target grid".into()));
    }
    let ns = grid.spatial_points;
    let s = grid.spatial_count();
    let nt = grid.time_steps;
    let period = ns as f64 * grid.dx();
    let mut hat = data.values.clone();
    fft6(&mut hat, ns, FftDirection::Forward);

    let momenta: Vec<[f64; 3]> = (0..s)
        .map(|i| {
            let q = grid.spatial_multi(i);
            [
                wavenumber(q[0], ns, period),
                wavenumber(q[1], ns, period),
                wavenumber(q[2], ns, period),
            ]
        })
        .collect();

    let mut out = MultiTimeField::zeros(grid, masses);
    let mut work = vec![ZERO; grid.slice_len()];
    for n1 in 0..nt {
        let u1: Vec<Mat4> = momenta.iter().map(|&p| evolution(p, masses.0, grid.time(n1))).collect();
        for n2 in 0..nt {
            let u2: Vec<Mat4> = momenta
                .iter()
                .map(|&p| evolution(p, masses.1, grid.time(n2)))
                .collect();
            work.par_chunks_mut(s * SPIN)
                .enumerate()
                .for_each(|(k1, chunk)| {
                    let a = &u1[k1];
                    for (k2, b) in u2.iter().enumerate() {
                        let src = &hat[(k1 * s + k2) * SPIN..(k1 * s + k2 + 1) * SPIN];
                        let dst = &mut chunk[k2 * SPIN..(k2 + 1) * SPIN];
                        // (U₁ ⊗ U₂) v
                        let mut tmp = [ZERO; SPIN];
                        for i in 0..4 {
                            for j in 0..4 {
                                let mut acc = ZERO;
                                for l in 0..4 {
                                    acc += b[j][l] * src[4 * i + l];
                                }
                                tmp[4 * i + j] = acc;
                            }
                        }
                        for i in 0..4 {
                            for j in 0..4 {
                                let mut acc = ZERO;
                                for l in 0..4 {
                                    acc += a[i][l] * tmp[4 * l + j];
                                }
                                dst[4 * i + j] = acc;
                            }
                        }
                    }
                });
            fft6(&mut work, ns, FftDirection::Inverse);
            out.set_slice(n1, n2, &work);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigenspinors_solve_the_equation() {
        for idx in 1..=4 {
            for (p, m) in [([0.0; 3], 1.0), ([0.3, -1.2, 0.7], 0.5), ([1.0, 0.0, 0.0], 0.0)] {
                let spec = PlaneWaveSpec::new(p, idx, m).unwrap();
                assert!(eigenspinor_residual(&spec) < 1e-12);
            }
        }
        let rest = PlaneWaveSpec::new([0.0; 3], 3, 0.0).unwrap();
        assert!(eigenspinor_residual(&rest) < 1e-15);
    }

    #[test]
    fn hamiltonian_squares_to_energy() {
        let p = [0.4, 0.1, -0.9];
        let h = hamiltonian(p, 0.7);
        let e2 = energy(p, 0.7).powi(2);
        let h2 = crate::spinor::gamma::mat4_mul(&h, &h);
        for (r, row) in h2.iter().enumerate() {
            for (c, v) in row.iter().enumerate() {
                let want = if r == c { e2 } else { 0.0 };
                assert!((v - want).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn rejects_bad_spin_index() {
        assert!(PlaneWaveSpec::new([0.0; 3], 0, 1.0).is_err());
        assert!(PlaneWaveSpec::new([0.0; 3], 5, 1.0).is_err());
    }

    #[test]
    fn aliasing_is_warned() {
        let g = GridSpec::new(0.5, 3, 1.0, 4).unwrap();
        let fast = PlaneWaveSpec::new([6.0, 0.0, 0.0], 1, 1.0).unwrap();
        let slow = PlaneWaveSpec::new([0.5, 0.0, 0.0], 1, 1.0).unwrap();
        assert_eq!(plane_wave_field(&fast, &slow, g).unwrap().warnings.len(), 1);
        assert!(plane_wave_field(&slow, &slow, g).unwrap().warnings.is_empty());
    }

    #[test]
    fn fft_round_trip() {
        let g = GridSpec::new(0.5, 2, 1.0, 4).unwrap();
        let data: Vec<Complex64> = (0..g.slice_len())
            .map(|k| Complex64::new((k as f64 * 0.37).sin(), (k as f64 * 0.11).cos()))
            .collect();
        let mut work = data.clone();
        fft6(&mut work, 4, FftDirection::Forward);
        fft6(&mut work, 4, FftDirection::Inverse);
        for (a, b) in work.iter().zip(&data) {
            assert!((a - b).norm() < 1e-13);
        }
    }
}
