//! Application of the row operators to two-particle fields.

use num_complex::Complex64;
use rayon::prelude::*;

use super::rows::{OperatorDiagnostics, RowOperator};
use super::{Piece, QuadratureConfig};
use crate::error::{Error, Result};
use crate::kernels::{eval_kernel, KernelSpec};
use crate::spinor::{dirac_general, GridSpec, MultiTimeField, Particle, TimeStencil, SPIN};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Spinor factor multiplying a row operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum SpinFactor {
    Identity,
    IGamma0,
}

fn spin_weights(factor: SpinFactor, particle: Particle) -> [Complex64; SPIN] {
    std::array::from_fn(|s| match factor {
        SpinFactor::Identity => Complex64::new(1.0, 0.0),
        SpinFactor::IGamma0 => {
            let idx = match particle {
                Particle::One => s / 4,
                Particle::Two => s % 4,
            };
            // γ⁰ = diag(1, 1, −1, −1)
            Complex64::new(0.0, if idx < 2 { 1.0 } else { -1.0 })
        }
    })
}

/// out += (rows ⊗ factor) · src in the chosen particle's variables. Output
/// nodes with time index above `window` are left untouched.
fn accumulate_rows(
    out: &mut MultiTimeField,
    src: &MultiTimeField,
    rows: &RowOperator,
    particle: Particle,
    factor: SpinFactor,
    window: Option<usize>,
) {
    let g = src.grid;
    let s = g.spatial_count();
    let p = g.particle_count();
    let fac = spin_weights(factor, particle);
    let limit = window.map_or(g.time_steps, |w| (w + 1).min(g.time_steps));
    match particle {
        Particle::Two => {
            out.values
                .par_chunks_mut(p * SPIN)
                .zip(src.values.par_chunks(p * SPIN))
                .enumerate()
                .for_each(|(outer, (dst, blk))| {
                    if outer / s >= limit {
                        return;
                    }
                    for q in 0..limit * s {
                        let (cols, ws) = rows.row(q);
                        if cols.is_empty() {
                            continue;
                        }
                        let mut acc = [ZERO; SPIN];
                        for (&c, &w) in cols.iter().zip(ws) {
                            let v = &blk[c as usize * SPIN..(c as usize + 1) * SPIN];
                            for (a, x) in acc.iter_mut().zip(v) {
                                *a += w * x;
                            }
                        }
                        let o = &mut dst[q * SPIN..(q + 1) * SPIN];
                        for k in 0..SPIN {
                            o[k] += fac[k] * acc[k];
                        }
                    }
                });
        }
        Particle::One => {
            let chunk = p * SPIN;
            out.values
                .par_chunks_mut(chunk)
                .enumerate()
                .for_each(|(q, dst)| {
                    if q / s >= limit {
                        return;
                    }
                    let (cols, ws) = rows.row(q);
                    if cols.is_empty() {
                        return;
                    }
                    let mut tmp = vec![ZERO; chunk];
                    for (&c, &w) in cols.iter().zip(ws) {
                        let v = &src.values[c as usize * chunk..(c as usize + 1) * chunk];
                        for (a, x) in tmp.iter_mut().zip(v) {
                            *a += w * x;
                        }
                    }
                    for (k, (o, t)) in dst.iter_mut().zip(&tmp).enumerate() {
                        *o += fac[k % SPIN] * t;
                    }
                });
        }
    }
}

fn boundary_max(field: &MultiTimeField, particle: Particle) -> f64 {
    field.boundary_max_abs(particle)
}

/// Convolution rows for one particle: R₁₂ = A⁽¹⁾ + A⁽²⁾ acting on D⁺f and
/// R₃₄ = A⁽³⁾ + A⁽⁴⁾ (times iγ⁰) acting on f.
#[derive(Debug, Clone, PartialEq)]
pub struct ParticleOperator {
    pub mass: f64,
    pub r12: RowOperator,
    pub r34: RowOperator,
}

impl ParticleOperator {
    pub fn new(grid: &GridSpec, mass: f64, quad: &QuadratureConfig) -> Result<Self> {
        Ok(Self {
            mass,
            r12: RowOperator::build(grid, &[Piece::A1, Piece::A2], mass, quad)?,
            r34: RowOperator::build(grid, &[Piece::A3, Piece::A4], mass, quad)?,
        })
    }

    /// conv f in the given particle's variables; returns the clipped mass.
    pub fn conv(
        &self,
        f: &MultiTimeField,
        particle: Particle,
        window: Option<usize>,
    ) -> Result<(MultiTimeField, f64)> {
        let dplus = dirac_general(f, particle, self.mass, TimeStencil::Causal)?;
        let mut out = MultiTimeField::zeros(f.grid, f.masses);
        accumulate_rows(&mut out, &dplus, &self.r12, particle, SpinFactor::Identity, window);
        let clip12 = self.r12.max_dropped_weight() * boundary_max(&dplus, particle);
        drop(dplus);
        accumulate_rows(&mut out, f, &self.r34, particle, SpinFactor::IGamma0, window);
        let clip34 = self.r34.max_dropped_weight() * boundary_max(f, particle);
        Ok((out, clip12.max(clip34)))
    }

    pub fn diagnostics(&self) -> OperatorDiagnostics {
        self.r12.diagnostics().merge(self.r34.diagnostics())
    }
}

/// Kψ, pointwise.
pub fn kernel_times(k: &KernelSpec, psi: &MultiTimeField) -> Result<MultiTimeField> {
    if let Some(c) = k.as_constant() {
        return Ok(psi.scaled(c));
    }
    let g = psi.grid;
    let s = g.spatial_count();
    let p = g.particle_count();
    let mut out = psi.clone();
    out.values
        .par_chunks_mut(p * SPIN)
        .enumerate()
        .try_for_each(|(outer, blk)| -> Result<()> {
            let x1 = g.event(outer / s, outer % s);
            for q in 0..p {
                let kv = eval_kernel(k, x1, g.event(q / s, q % s))?;
                blk[q * SPIN..(q + 1) * SPIN].iter_mut().for_each(|v| *v *= kv);
            }
            Ok(())
        })?;
    Ok(out)
}

/// The full two-particle operator on one grid, with rows built once.
#[derive(Debug, Clone, PartialEq)]
pub struct PairOperator {
    pub grid: GridSpec,
    pub masses: (f64, f64),
    pub quad: QuadratureConfig,
    p1: ParticleOperator,
    p2: ParticleOperator,
}

impl PairOperator {
    pub fn new(grid: GridSpec, masses: (f64, f64), quad: QuadratureConfig) -> Result<Self> {
        let p1 = ParticleOperator::new(&grid, masses.0, &quad)?;
        let p2 = if masses.1 == masses.0 {
            p1.clone()
        } else {
            ParticleOperator::new(&grid, masses.1, &quad)?
        };
        Ok(Self {
            grid,
            masses,
            quad,
            p1,
            p2,
        })
    }

    pub fn particle(&self, particle: Particle) -> &ParticleOperator {
        match particle {
            Particle::One => &self.p1,
            Particle::Two => &self.p2,
        }
    }

    fn check(&self, psi: &MultiTimeField) -> Result<()> {
        if psi.grid != self.grid {
            return Err(Error::Config("field grid differs from operator grid".into()));
        }
        if psi.masses != self.masses {
            return Err(Error::Config(format!(
                "field masses {:?} differ from operator masses {:?}",
                psi.masses, self.masses
            )));
        }
        Ok(())
    }

    /// conv in one particle's variables.
    pub fn conv(&self, f: &MultiTimeField, particle: Particle) -> Result<MultiTimeField> {
        self.check(f)?;
        Ok(self.particle(particle).conv(f, particle, None)?.0)
    }

    /// conv₁ ∘ conv₂ applied to an already formed Kψ.
    pub fn apply_to_source(
        &self,
        kpsi: &MultiTimeField,
        window: Option<usize>,
    ) -> Result<(MultiTimeField, OperatorDiagnostics)> {
        self.check(kpsi)?;
        let (c2, clip2) = self.p2.conv(kpsi, Particle::Two, window)?;
        let (out, clip1) = self.p1.conv(&c2, Particle::One, window)?;
        let mut diag = self.p1.diagnostics().merge(self.p2.diagnostics());
        diag.clipped_mass = clip1.max(clip2);
        Ok((out, diag))
    }

    /// Aψ with diagnostics.
    pub fn apply(&self, psi: &MultiTimeField, k: &KernelSpec) -> Result<(MultiTimeField, OperatorDiagnostics)> {
        self.apply_windowed(psi, k, None)
    }

    /// Aψ on time pairs with n₁, n₂ ≤ window (zero elsewhere). Equal to the
    /// full result there, since every piece only looks backwards in time.
    pub fn apply_windowed(
        &self,
        psi: &MultiTimeField,
        k: &KernelSpec,
        window: Option<usize>,
    ) -> Result<(MultiTimeField, OperatorDiagnostics)> {
        self.check(psi)?;
        if k.is_zero() {
            let mut diag = self.p1.diagnostics().merge(self.p2.diagnostics());
            diag.clipped_mass = 0.0;
            return Ok((MultiTimeField::zeros(psi.grid, psi.masses), diag));
        }
        let kpsi = kernel_times(k, psi)?;
        self.apply_to_source(&kpsi, window)
    }
}

/// Applies prebuilt single-piece rows in one particle's variables, with the
/// iγ⁰ factor when `boundary` is set.
pub fn apply_piece_rows(f: &MultiTimeField, particle: Particle, rows: &RowOperator, boundary: bool) -> MultiTimeField {
    let mut out = MultiTimeField::zeros(f.grid, f.masses);
    let factor = if boundary {
        SpinFactor::IGamma0
    } else {
        SpinFactor::Identity
    };
    accumulate_rows(&mut out, f, rows, particle, factor, None);
    out
}

fn apply_piece(
    f: &MultiTimeField,
    particle: Particle,
    piece: Piece,
    m: f64,
    quad: &QuadratureConfig,
) -> Result<MultiTimeField> {
    let rows = RowOperator::build(&f.grid, &[piece], m, quad)?;
    Ok(apply_piece_rows(f, particle, &rows, piece.is_boundary()))
}

/// (A⁽¹⁾f)(t,x) = (1/4π)∫₀ᵗ r dr ∫dΩ f(t−r, x+rω).
pub fn apply_a1(f: &MultiTimeField, particle: Particle, quad: &QuadratureConfig) -> Result<MultiTimeField> {
    apply_piece(f, particle, Piece::A1, 0.0, quad)
}

/// Interior cone piece with the J₁ kernel.
pub fn apply_a2(f: &MultiTimeField, particle: Particle, m: f64, quad: &QuadratureConfig) -> Result<MultiTimeField> {
    apply_piece(f, particle, Piece::A2, m, quad)
}

/// (A⁽³⁾f)(t,x) = iγ⁰ (t/4π) ∫dΩ f(0, x+tω).
pub fn apply_a3(f: &MultiTimeField, particle: Particle, quad: &QuadratureConfig) -> Result<MultiTimeField> {
    apply_piece(f, particle, Piece::A3, 0.0, quad)
}

/// Ball integral of the t = 0 slice with the J₁ kernel, times iγ⁰.
pub fn apply_a4(f: &MultiTimeField, particle: Particle, m: f64, quad: &QuadratureConfig) -> Result<MultiTimeField> {
    apply_piece(f, particle, Piece::A4, m, quad)
}

/// Retarded convolution in one particle's variables with mass m.
pub fn conv_retarded(
    f: &MultiTimeField,
    particle: Particle,
    m: f64,
    quad: &QuadratureConfig,
) -> Result<MultiTimeField> {
    Ok(ParticleOperator::new(&f.grid, m, quad)?.conv(f, particle, None)?.0)
}

/// Aψ = conv₁ conv₂ (Kψ) with the field's own masses.
pub fn apply_a_full(psi: &MultiTimeField, k: &KernelSpec, quad: &QuadratureConfig) -> Result<MultiTimeField> {
    let op = PairOperator::new(psi.grid, psi.masses, *quad)?;
    Ok(op.apply(psi, k)?.0)
}
