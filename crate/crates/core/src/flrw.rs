//! Conformal front-end for the massless equation on flat FLRW spacetime.
//!
//! With conformal time η and metric a²(η)(dη² − dx²), the rescaled field
//! χ = a^{3/2}(η₁)a^{3/2}(η₂)ψ obeys the half-space equation with kernel
//! a^{1−α}(η₁)a^{1−α}(η₂)K̃. χ is the stored object; ψ is singular at η = 0.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::kernels::{kernel_norm, KernelDomain, KernelNormReport, KernelSpec, NormSampling};
use crate::solver::{cauchy_check, neumann_solve, SolveConfig, SolveFailure, SolveReport};
use crate::spinor::{MultiTimeField, SPIN};

type ScaleFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
enum ScaleKind {
    Linear,
    Quadratic,
    Power(f64),
    Unit,
    Custom { name: String, f: ScaleFn },
}

/// Scale factor a(η) with a(0) = 0 and a > 0 for η > 0.
#[derive(Clone)]
pub struct ScaleFactor {
    kind: ScaleKind,
}

impl fmt::Debug for ScaleFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ScaleFactor({})", self.name())
    }
}

impl PartialEq for ScaleFactor {
    fn eq(&self, other: &Self) -> bool {
        match (&self.kind, &other.kind) {
            (ScaleKind::Custom { f: a, .. }, ScaleKind::Custom { f: b, .. }) => Arc::ptr_eq(a, b),
            _ => self.name() == other.name(),
        }
    }
}

/// Built-in scale-factor families, as named in run configurations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "family")]
pub enum ScaleFamily {
    Linear,
    Quadratic,
    Power { exponent: f64 },
}

impl ScaleFactor {
    /// a(η) = η.
    pub fn linear() -> Self {
        Self {
            kind: ScaleKind::Linear,
        }
    }

    /// a(η) = η².
    pub fn quadratic() -> Self {
        Self {
            kind: ScaleKind::Quadratic,
        }
    }

    /// a(η) = η^p, p > 0.
    pub fn power(p: f64) -> Result<Self> {
        if !(p > 0.0 && p.is_finite()) {
            return Err(Error::Config(format!("scale exponent {p} must be > 0")));
        }
        Ok(Self {
            kind: ScaleKind::Power(p),
        })
    }

    pub fn from_family(family: ScaleFamily) -> Result<Self> {
        match family {
            ScaleFamily::Linear => Ok(Self::linear()),
            ScaleFamily::Quadratic => Ok(Self::quadratic()),
            ScaleFamily::Power { exponent } => Self::power(exponent),
        }
    }

    /// a ≡ 1. Not a valid scale factor (a(0) ≠ 0); only for testing the
    /// transforms as identities.
    pub fn unit_unchecked() -> Self {
        Self {
            kind: ScaleKind::Unit,
        }
    }

    /// User-supplied a(η), validated on samples of (0, horizon].
    pub fn custom(
        name: impl Into<String>,
        horizon: f64,
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Result<Self> {
        let sf = Self {
            kind: ScaleKind::Custom {
                name: name.into(),
                f: Arc::new(f),
            },
        };
        sf.validate(horizon)?;
        Ok(sf)
    }

    pub fn name(&self) -> String {
        match &self.kind {
            ScaleKind::Linear => "linear".into(),
            ScaleKind::Quadratic => "quadratic".into(),
            ScaleKind::Power(p) => format!("power({p})"),
            ScaleKind::Unit => "unit".into(),
            ScaleKind::Custom { name, .. } => name.clone(),
        }
    }

    #[inline]
    pub fn eval(&self, eta: f64) -> f64 {
        match &self.kind {
            ScaleKind::Linear => eta,
            ScaleKind::Quadratic => eta * eta,
            ScaleKind::Power(p) => eta.max(0.0).powf(*p),
            ScaleKind::Unit => 1.0,
            ScaleKind::Custom { f, .. } => f(eta),
        }
    }

    /// a'(η); analytic for built-ins, central differences otherwise.
    pub fn derivative(&self, eta: f64) -> f64 {
        match &self.kind {
            ScaleKind::Linear => 1.0,
            ScaleKind::Quadratic => 2.0 * eta,
            ScaleKind::Power(p) => p * eta.max(0.0).powf(p - 1.0),
            ScaleKind::Unit => 0.0,
            ScaleKind::Custom { f, .. } => {
                let h = 1e-6 * (1.0 + eta.abs());
                if eta >= h {
                    (f(eta + h) - f(eta - h)) / (2.0 * h)
                } else {
                    (f(eta + h) - f(eta)) / h
                }
            }
        }
    }

    /// Checks a(0) = 0, a > 0 and finite a' on samples of (0, horizon].
    pub fn validate(&self, horizon: f64) -> Result<()> {
        if self.eval(0.0) != 0.0 {
            return Err(Error::Config(format!(
                "scale factor {} has a(0) = {} != 0",
                self.name(),
                self.eval(0.0)
            )));
        }
        for k in 1..=64 {
            let eta = horizon * k as f64 / 64.0;
            let a = self.eval(eta);
            if !(a > 0.0 && a.is_finite()) {
                return Err(Error::Config(format!(
                    "scale factor {} not positive at eta = {eta}",
                    self.name()
                )));
            }
            if !self.derivative(eta).is_finite() {
                return Err(Error::Config(format!(
                    "scale factor {} not differentiable at eta = {eta}",
                    self.name()
                )));
            }
        }
        Ok(())
    }
}

/// a^{3/2}(η₁)a^{3/2}(η₂) on every time pair.
fn pair_factors(field: &MultiTimeField, a: &ScaleFactor, power: f64) -> Vec<f64> {
    let g = field.grid;
    let nt = g.time_steps;
    let f: Vec<f64> = (0..nt).map(|n| a.eval(g.time(n)).powf(power)).collect();
    (0..nt * nt).map(|k| f[k / nt] * f[k % nt]).collect()
}

/// χ = a^{3/2}(η₁)a^{3/2}(η₂)ψ at nodes with a(η₁)a(η₂) > 0.
///
/// On Big-Bang slices (η₁ = 0 or η₂ = 0) the stored value is taken to be χ
/// already and copied unchanged, since ψ itself is singular there.
pub fn regularize(psi: &MultiTimeField, a: &ScaleFactor) -> MultiTimeField {
    let g = psi.grid;
    let nt = g.time_steps;
    let s = g.spatial_count();
    let fac = pair_factors(psi, a, 1.5);
    let mut out = psi.clone();
    // one chunk per (n₁, i₁, n₂) run of Ns³ spinors
    out.values
        .par_chunks_mut(s * SPIN)
        .enumerate()
        .for_each(|(c, chunk)| {
            let (n1, n2) = (c / (s * nt), c % nt);
            let f = fac[n1 * nt + n2];
            if f > 0.0 {
                chunk.iter_mut().for_each(|v| *v *= f);
            }
        });
    out
}

/// ψ = a^{−3/2}(η₁)a^{−3/2}(η₂)χ on the time pair (n₁, n₂).
pub fn deregularize(chi: &MultiTimeField, a: &ScaleFactor, n1: usize, n2: usize) -> Result<Vec<Complex64>> {
    let g = chi.grid;
    let (e1, e2) = (g.time(n1), g.time(n2));
    let f = (a.eval(e1) * a.eval(e2)).powf(1.5);
    if !(f > 0.0) {
        return Err(Error::Singularity(format!(
            "psi is singular at the Big Bang (eta1 = {e1}, eta2 = {e2})"
        )));
    }
    Ok(chi.slice(n1, n2).into_iter().map(|v| v / f).collect())
}

/// All η > 0 slices of ψ, keyed by (n₁, n₂) with n₁, n₂ ≥ 1.
pub fn deregularize_all(chi: &MultiTimeField, a: &ScaleFactor) -> Result<Vec<((usize, usize), Vec<Complex64>)>> {
    let nt = chi.grid.time_steps;
    let mut out = Vec::with_capacity((nt - 1) * (nt - 1));
    for n1 in 1..nt {
        for n2 in 1..nt {
            out.push(((n1, n2), deregularize(chi, a, n1, n2)?));
        }
    }
    Ok(out)
}

/// a^{1−α}(η₁)a^{1−α}(η₂)K̃; the profile kernel itself when α = 1.
pub fn rescale_kernel(profile_kernel: &KernelSpec, a: &ScaleFactor, alpha: f64) -> Result<KernelSpec> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::Config(format!("alpha = {alpha} must lie in [0, 1]")));
    }
    if alpha == 1.0 {
        return Ok(profile_kernel.clone());
    }
    Ok(KernelSpec::rescaled(profile_kernel.clone(), a.clone(), 1.0 - alpha))
}

/// The massless FLRW problem in regularized form.
#[derive(Debug, Clone)]
pub struct FLRWProblem {
    pub scale: ScaleFactor,
    pub alpha: f64,
    pub profile_kernel: KernelSpec,
    chi_free: MultiTimeField,
}

impl FLRWProblem {
    /// `chi_free` must carry masses (0, 0).
    pub fn new(scale: ScaleFactor, alpha: f64, profile_kernel: KernelSpec, chi_free: MultiTimeField) -> Result<Self> {
        if chi_free.masses != (0.0, 0.0) {
            return Err(Error::Config(format!(
                "FLRW dynamics is massless; chi_free has masses {:?}",
                chi_free.masses
            )));
        }
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::Config(format!("alpha = {alpha} must lie in [0, 1]")));
        }
        scale.validate(chi_free.grid.time_extent)?;
        Ok(Self {
            scale,
            alpha,
            profile_kernel,
            chi_free,
        })
    }

    pub fn chi_free(&self) -> &MultiTimeField {
        &self.chi_free
    }

    pub fn effective_kernel(&self) -> Result<KernelSpec> {
        rescale_kernel(&self.profile_kernel, &self.scale, self.alpha)
    }
}

/// Conformal metadata attached to FLRW solve reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConformalInfo {
    pub scale_factor: String,
    pub alpha: f64,
    pub kernel_norm: KernelNormReport,
    /// max |χ − χ_free| on the η₁ = η₂ = 0 slice.
    pub big_bang_cauchy_defect: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlrwReport {
    #[serde(flatten)]
    pub solve: SolveReport,
    pub conformal: ConformalInfo,
}

/// Solves for χ with the rescaled kernel after checking its sampled norm
/// (inflated) stays below 1.
pub fn flrw_solve(
    problem: &FLRWProblem,
    cfg: &SolveConfig,
    sampling: &NormSampling,
) -> std::result::Result<(MultiTimeField, FlrwReport), SolveFailure> {
    let kernel = problem.effective_kernel()?;
    let g = problem.chi_free.grid;
    let domain = KernelDomain {
        time_extent: g.time_extent,
        half_width: g.spatial_half_width,
    };
    let norm = kernel_norm(&kernel, &domain, sampling)?;
    if norm.inflated >= 1.0 {
        return Err(Error::Condition(format!(
            "rescaled kernel norm estimate {:.4} (sampled {:.4} x {}) is not below 1",
            norm.inflated, norm.norm_k, norm.inflation
        ))
        .into());
    }
    let (chi, mut report) = neumann_solve(&problem.chi_free, &kernel, cfg)?;
    if norm.inflated > cfg.weight.norm_k {
        report.warnings.push(format!(
            "kernel norm estimate {:.4} exceeds the weight's normK {}",
            norm.inflated, cfg.weight.norm_k
        ));
    }
    let defect = cauchy_check(&chi, &problem.chi_free)?;
    Ok((
        chi,
        FlrwReport {
            solve: report,
            conformal: ConformalInfo {
                scale_factor: problem.scale.name(),
                alpha: problem.alpha,
                kernel_norm: norm,
                big_bang_cauchy_defect: defect,
            },
        },
    ))
}
