//! Scalar interaction kernels K(x₁, x₂) and the norm
//! ‖K‖ = max(sup|K|, sup‖∂̸₁K‖, sup‖∂̸₂K‖, sup‖∂̸₁∂̸₂K‖).

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::flrw::ScaleFactor;
use crate::quadrature::GaussLegendre;
use crate::spinor::gamma::{mat4_to_dmatrix, op_norm2, GammaSet};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

type ProfileFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Radial profile f(d) of the covariant FLRW kernel.
#[derive(Clone)]
pub enum Profile {
    Zero,
    /// κ·dⁿ·e^{−d}
    PolyExp { kappa: f64, power: u32 },
    Custom { name: String, f: ProfileFn },
}

impl fmt::Debug for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Profile::Zero => write!(f, "Zero"),
            Profile::PolyExp { kappa, power } => write!(f, "PolyExp({kappa}, {power})"),
            Profile::Custom { name, .. } => write!(f, "Custom({name})"),
        }
    }
}

impl Profile {
    /// The default family κ d² e^{−d}.
    pub fn default_family(kappa: f64) -> Self {
        Profile::PolyExp { kappa, power: 2 }
    }

    pub fn custom(name: impl Into<String>, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Profile::Custom {
            name: name.into(),
            f: Arc::new(f),
        }
    }

    pub fn eval(&self, d: f64) -> f64 {
        match self {
            Profile::Zero => 0.0,
            Profile::PolyExp { kappa, power } => kappa * d.powi(*power as i32) * (-d).exp(),
            Profile::Custom { f, .. } => f(d),
        }
    }

    /// f(0), f'(0), f''(0).
    pub fn jet_at_zero(&self) -> [f64; 3] {
        match self {
            Profile::Zero => [0.0; 3],
            Profile::PolyExp { kappa, power } => {
                // dⁿe^{−d} = Σ_k (−1)^k d^{n+k}/k!
                let mut out = [0.0; 3];
                for (j, o) in out.iter_mut().enumerate() {
                    let n = *power as usize;
                    if j >= n {
                        let k = j - n;
                        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                        let fact_j: f64 = (1..=j).map(|v| v as f64).product();
                        let fact_k: f64 = (1..=k).map(|v| v as f64).product();
                        *o = kappa * sign * fact_j / fact_k;
                    }
                }
                out
            }
            Profile::Custom { f, .. } => {
                let h = 1e-4;
                let (f0, f1, f2) = (f(0.0), f(h), f(2.0 * h));
                let f3 = f(3.0 * h);
                [
                    f0,
                    (-3.0 * f0 + 4.0 * f1 - f2) / (2.0 * h),
                    (2.0 * f0 - 5.0 * f1 + 4.0 * f2 - f3) / (h * h),
                ]
            }
        }
    }
}

/// Smoothness of the light-cone gated kernel across the cone.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConeRegularity {
    Discontinuous,
    C0,
    C1,
    C2,
}

pub fn cone_regularity(profile: &Profile) -> ConeRegularity {
    let [f0, f1, f2] = profile.jet_at_zero();
    let tol = 1e-8;
    if f0.abs() > tol {
        ConeRegularity::Discontinuous
    } else if f1.abs() > tol {
        ConeRegularity::C0
    } else if f2.abs() > tol {
        ConeRegularity::C1
    } else {
        ConeRegularity::C2
    }
}

#[derive(Debug, Clone)]
enum KernelKind {
    Zero,
    Constant(Complex64),
    GaussianDifference { kappa: Complex64, sigma: f64 },
    Flrw { profile: Profile, scale: ScaleFactor },
    Rescaled { inner: Box<KernelSpec>, scale: ScaleFactor, exponent: f64 },
    Scaled { factor: Complex64, inner: Box<KernelSpec> },
}

/// A complex scalar interaction kernel.
#[derive(Debug, Clone)]
pub struct KernelSpec {
    kind: KernelKind,
}

/// Family name and parameters, for reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelInfo {
    pub family: String,
    pub params: Vec<(String, f64)>,
    pub regularity_warning: Option<String>,
}

/// K and its first and mixed derivatives at one point pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelJet {
    pub value: Complex64,
    pub d1: [Complex64; 4],
    pub d2: [Complex64; 4],
    pub d12: [[Complex64; 4]; 4],
}

impl KernelSpec {
    pub fn zero() -> Self {
        Self {
            kind: KernelKind::Zero,
        }
    }

    pub fn constant(kappa: Complex64) -> Self {
        Self {
            kind: KernelKind::Constant(kappa),
        }
    }

    pub fn constant_real(kappa: f64) -> Self {
        Self::constant(Complex64::new(kappa, 0.0))
    }

    /// κ·exp(−Σ_μ (x₁−x₂)_μ²/σ²), Euclidean sum over all four components.
    pub fn gaussian_difference(kappa: Complex64, sigma: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::Config(format!("gaussian width {sigma} must be > 0")));
        }
        Ok(Self {
            kind: KernelKind::GaussianDifference { kappa, sigma },
        })
    }

    /// f(d(x₁,x₂)) for time-like or light-like pairs, 0 for space-like ones.
    pub fn flrw(profile: Profile, scale: ScaleFactor) -> Self {
        Self {
            kind: KernelKind::Flrw { profile, scale },
        }
    }

    /// a^e(η₁)·a^e(η₂)·inner.
    pub fn rescaled(inner: KernelSpec, scale: ScaleFactor, exponent: f64) -> Self {
        Self {
            kind: KernelKind::Rescaled {
                inner: Box::new(inner),
                scale,
                exponent,
            },
        }
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        Self {
            kind: KernelKind::Scaled {
                factor,
                inner: Box::new(self.clone()),
            },
        }
    }

    pub fn is_zero(&self) -> bool {
        match &self.kind {
            KernelKind::Zero => true,
            KernelKind::Constant(k) => *k == ZERO,
            KernelKind::GaussianDifference { kappa, .. } => *kappa == ZERO,
            KernelKind::Flrw { profile, .. } => matches!(profile, Profile::Zero),
            KernelKind::Rescaled { inner, .. } => inner.is_zero(),
            KernelKind::Scaled { factor, inner } => *factor == ZERO || inner.is_zero(),
        }
    }

    /// Constant value if the kernel does not depend on its arguments.
    pub fn as_constant(&self) -> Option<Complex64> {
        match &self.kind {
            KernelKind::Zero => Some(ZERO),
            KernelKind::Constant(k) => Some(*k),
            KernelKind::Scaled { factor, inner } => inner.as_constant().map(|c| c * factor),
            _ if self.is_zero() => Some(ZERO),
            _ => None,
        }
    }

    pub fn info(&self) -> KernelInfo {
        let (family, params) = match &self.kind {
            KernelKind::Zero => ("zero".to_string(), vec![]),
            KernelKind::Constant(k) => (
                "constant".into(),
                vec![("kappa_re".into(), k.re), ("kappa_im".into(), k.im)],
            ),
            KernelKind::GaussianDifference { kappa, sigma } => (
                "gaussian_difference".into(),
                vec![
                    ("kappa_re".into(), kappa.re),
                    ("kappa_im".into(), kappa.im),
                    ("sigma".into(), *sigma),
                ],
            ),
            KernelKind::Flrw { profile, scale } => {
                let mut p = vec![];
                if let Profile::PolyExp { kappa, power } = profile {
                    p.push(("kappa".into(), *kappa));
                    p.push(("power".into(), *power as f64));
                }
                (format!("flrw[{:?}; a = {}]", profile, scale.name()), p)
            }
            KernelKind::Rescaled {
                inner,
                scale,
                exponent,
            } => (
                format!("rescaled[{}; a = {}]", inner.info().family, scale.name()),
                vec![("exponent".into(), *exponent)],
            ),
            KernelKind::Scaled { factor, inner } => (
                format!("scaled[{}]", inner.info().family),
                vec![("factor_re".into(), factor.re), ("factor_im".into(), factor.im)],
            ),
        };
        KernelInfo {
            family,
            params,
            regularity_warning: self.regularity_warning(),
        }
    }

    /// Warning when a gated FLRW profile is not C² across the light cone.
    pub fn regularity_warning(&self) -> Option<String> {
        match &self.kind {
            KernelKind::Flrw { profile, .. } => match cone_regularity(profile) {
                ConeRegularity::C2 => None,
                r => Some(format!(
                    "gated profile is only {r:?} across the light cone; ‖K‖ assumes C2"
                )),
            },
            KernelKind::Rescaled { inner, .. } | KernelKind::Scaled { inner, .. } => {
                inner.regularity_warning()
            }
            _ => None,
        }
    }

    fn raw(&self, x1: [f64; 4], x2: [f64; 4]) -> Complex64 {
        match &self.kind {
            KernelKind::Zero => ZERO,
            KernelKind::Constant(k) => *k,
            KernelKind::GaussianDifference { kappa, sigma } => {
                let r2: f64 = (0..4).map(|m| (x1[m] - x2[m]).powi(2)).sum();
                kappa * (-r2 / (sigma * sigma)).exp()
            }
            KernelKind::Flrw { profile, scale } => {
                let dt = (x1[0] - x2[0]).abs();
                let dx = spatial_distance(x1, x2);
                if dt >= dx {
                    let d = flrw_distance(x1[0], x1, x2[0], x2, scale);
                    Complex64::new(profile.eval(d.max(0.0)), 0.0)
                } else {
                    ZERO
                }
            }
            KernelKind::Rescaled {
                inner,
                scale,
                exponent,
            } => {
                let w = scale.eval(x1[0]).powf(*exponent) * scale.eval(x2[0]).powf(*exponent);
                inner.raw(x1, x2) * w
            }
            KernelKind::Scaled { factor, inner } => factor * inner.raw(x1, x2),
        }
    }

    /// Analytic value and derivatives where the family provides them.
    pub fn analytic_jet(&self, x1: [f64; 4], x2: [f64; 4]) -> Option<KernelJet> {
        match &self.kind {
            KernelKind::Zero | KernelKind::Constant(_) => Some(KernelJet {
                value: self.raw(x1, x2),
                d1: [ZERO; 4],
                d2: [ZERO; 4],
                d12: [[ZERO; 4]; 4],
            }),
            KernelKind::GaussianDifference { sigma, .. } => {
                let k = self.raw(x1, x2);
                let s2 = sigma * sigma;
                let delta: [f64; 4] = std::array::from_fn(|m| x1[m] - x2[m]);
                let d1 = delta.map(|d| k * (-2.0 * d / s2));
                let d2 = delta.map(|d| k * (2.0 * d / s2));
                let mut d12 = [[ZERO; 4]; 4];
                for m in 0..4 {
                    for n in 0..4 {
                        let diag = if m == n { 2.0 / s2 } else { 0.0 };
                        d12[m][n] = k * (diag - 4.0 * delta[m] * delta[n] / (s2 * s2));
                    }
                }
                Some(KernelJet {
                    value: k,
                    d1,
                    d2,
                    d12,
                })
            }
            KernelKind::Scaled { factor, inner } => inner.analytic_jet(x1, x2).map(|j| KernelJet {
                value: j.value * factor,
                d1: j.d1.map(|v| v * factor),
                d2: j.d2.map(|v| v * factor),
                d12: j.d12.map(|r| r.map(|v| v * factor)),
            }),
            _ => None,
        }
    }

    /// Central-difference jet with step h.
    pub fn fd_jet(&self, x1: [f64; 4], x2: [f64; 4], h: f64) -> KernelJet {
        let shift = |x: [f64; 4], m: usize, s: f64| {
            let mut y = x;
            y[m] += s;
            y
        };
        let mut d1 = [ZERO; 4];
        let mut d2 = [ZERO; 4];
        let mut d12 = [[ZERO; 4]; 4];
        for m in 0..4 {
            d1[m] = (self.raw(shift(x1, m, h), x2) - self.raw(shift(x1, m, -h), x2)) / (2.0 * h);
            d2[m] = (self.raw(x1, shift(x2, m, h)) - self.raw(x1, shift(x2, m, -h))) / (2.0 * h);
            for n in 0..4 {
                let pp = self.raw(shift(x1, m, h), shift(x2, n, h));
                let pm = self.raw(shift(x1, m, h), shift(x2, n, -h));
                let mp = self.raw(shift(x1, m, -h), shift(x2, n, h));
                let mm = self.raw(shift(x1, m, -h), shift(x2, n, -h));
                d12[m][n] = (pp - pm - mp + mm) / (4.0 * h * h);
            }
        }
        KernelJet {
            value: self.raw(x1, x2),
            d1,
            d2,
            d12,
        }
    }
}

pub fn spatial_distance(x1: [f64; 4], x2: [f64; 4]) -> f64 {
    ((x1[1] - x2[1]).powi(2) + (x1[2] - x2[2]).powi(2) + (x1[3] - x2[3]).powi(2)).sqrt()
}

/// K(x₁, x₂), with an error carrying the location if the value is not finite.
pub fn eval_kernel(spec: &KernelSpec, x1: [f64; 4], x2: [f64; 4]) -> Result<Complex64> {
    let v = spec.raw(x1, x2);
    if v.re.is_finite() && v.im.is_finite() {
        Ok(v)
    } else {
        Err(Error::Kernel {
            x1,
            x2,
            msg: format!("non-finite value {v}"),
        })
    }
}

/// d = (|η₁−η₂| − |x₁−x₂|)·∫₀¹ a(τη₁ + (1−τ)η₂) dτ.
pub fn flrw_distance(eta1: f64, x1: [f64; 4], eta2: f64, x2: [f64; 4], a: &ScaleFactor) -> f64 {
    thread_local! {
        static RULE: GaussLegendre = GaussLegendre::new(16);
    }
    let avg = RULE.with(|gl| gl.integrate(0.0, 1.0, |tau| a.eval(tau * eta1 + (1.0 - tau) * eta2)));
    ((eta1 - eta2).abs() - spatial_distance(x1, x2)) * avg
}

pub fn flrw_kernel(profile: Profile, a: ScaleFactor) -> KernelSpec {
    KernelSpec::flrw(profile, a)
}

/// Box [0, T] × [−L, L]³ for each particle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelDomain {
    pub time_extent: f64,
    pub half_width: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormSampling {
    /// Points of the 8-dimensional Halton sequence.
    pub halton_points: usize,
    /// Points per axis of the regular lattice (0 disables it).
    pub lattice_per_axis: usize,
    /// Coincident pairs x₁ = x₂ drawn from the 4-dimensional Halton sequence.
    pub diagonal_points: usize,
    pub fd_step: f64,
    pub inflation: f64,
}

impl Default for NormSampling {
    fn default() -> Self {
        Self {
            halton_points: 4096,
            lattice_per_axis: 3,
            diagonal_points: 1024,
            fd_step: 1e-3,
            inflation: 1.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelNormReport {
    pub sup_abs_k: f64,
    pub sup_abs_slash1: f64,
    pub sup_abs_slash2: f64,
    pub sup_abs_slash12: f64,
    /// Max of the four sampled sups; a lower estimate of the true ‖K‖.
    pub norm_k: f64,
    pub inflation: f64,
    /// norm_k × inflation, the value used for certification.
    pub inflated: f64,
    pub samples: usize,
    pub derivatives: String,
    pub regularity_warning: Option<String>,
}

const PRIMES: [u32; 8] = [2, 3, 5, 7, 11, 13, 17, 19];

fn radical_inverse(mut i: u64, base: u32) -> f64 {
    let b = base as u64;
    let mut f = 1.0;
    let mut r = 0.0;
    while i > 0 {
        f /= base as f64;
        r += f * (i % b) as f64;
        i /= b;
    }
    r
}

fn sample_points(domain: &KernelDomain, cfg: &NormSampling, t_lo: f64) -> Vec<([f64; 4], [f64; 4])> {
    let t_span = (domain.time_extent - t_lo).max(0.0);
    let map = |u: &[f64]| -> [f64; 4] {
        [
            t_lo + u[0] * t_span,
            -domain.half_width + 2.0 * domain.half_width * u[1],
            -domain.half_width + 2.0 * domain.half_width * u[2],
            -domain.half_width + 2.0 * domain.half_width * u[3],
        ]
    };
    let mut pts = Vec::new();
    for i in 0..cfg.halton_points {
        let u: Vec<f64> = PRIMES
            .iter()
            .map(|&p| radical_inverse(i as u64 + 1, p))
            .collect();
        pts.push((map(&u[..4]), map(&u[4..])));
    }
    for i in 0..cfg.diagonal_points {
        let u: Vec<f64> = PRIMES[..4]
            .iter()
            .map(|&p| radical_inverse(i as u64 + 1, p))
            .collect();
        let x = map(&u);
        pts.push((x, x));
    }
    let n = cfg.lattice_per_axis;
    if n > 0 {
        let total = n.pow(8);
        for k in 0..total {
            let mut rem = k;
            let mut u = [0.0; 8];
            for v in u.iter_mut() {
                let j = rem % n;
                rem /= n;
                *v = if n == 1 { 0.5 } else { j as f64 / (n - 1) as f64 };
            }
            pts.push((map(&u[..4]), map(&u[4..])));
        }
    }
    pts
}

/// ‖γ^μ v_μ‖₂.
pub fn slash_norm(v: [Complex64; 4]) -> f64 {
    let m = GammaSet::standard().slash(v);
    op_norm2(&mat4_to_dmatrix(&m))
}

/// ‖γ₁^μ γ₂^ν w_{μν}‖₂.
pub fn double_slash_norm(w: [[Complex64; 4]; 4]) -> f64 {
    if w.iter().flatten().all(|v| *v == ZERO) {
        return 0.0;
    }
    let m: DMatrix<Complex64> = GammaSet::standard().double_slash(w);
    op_norm2(&m)
}

fn jet_sups(jet: &KernelJet) -> [f64; 4] {
    [
        jet.value.norm(),
        if jet.d1.iter().all(|v| *v == ZERO) { 0.0 } else { slash_norm(jet.d1) },
        if jet.d2.iter().all(|v| *v == ZERO) { 0.0 } else { slash_norm(jet.d2) },
        double_slash_norm(jet.d12),
    ]
}

fn max4(a: [f64; 4], b: [f64; 4]) -> [f64; 4] {
    std::array::from_fn(|k| a[k].max(b[k]))
}

/// Sampled estimate of ‖K‖ over the domain.
pub fn kernel_norm(spec: &KernelSpec, domain: &KernelDomain, cfg: &NormSampling) -> Result<KernelNormReport> {
    if !(cfg.inflation >= 1.0 && cfg.fd_step > 0.0) {
        return Err(Error::Config("inflation must be >= 1 and fd_step > 0".into()));
    }
    let analytic = spec.analytic_jet([0.0; 4], [0.0; 4]).is_some();
    let h = cfg.fd_step;
    let pts = sample_points(domain, cfg, if analytic { 0.0 } else { 2.0 * h });
    for (x1, x2) in &pts {
        eval_kernel(spec, *x1, *x2)?;
    }
    let zero = [0.0; 4];
    let (sups, sups_half) = if analytic {
        let s = pts
            .par_iter()
            .map(|(x1, x2)| jet_sups(&spec.analytic_jet(*x1, *x2).unwrap()))
            .reduce(|| zero, max4);
        (s, s)
    } else {
        pts.par_iter()
            .map(|(x1, x2)| {
                (
                    jet_sups(&spec.fd_jet(*x1, *x2, h)),
                    jet_sups(&spec.fd_jet(*x1, *x2, 0.5 * h)),
                )
            })
            .reduce(|| (zero, zero), |a, b| (max4(a.0, b.0), max4(a.1, b.1)))
    };
    if !analytic {
        for k in 1..4 {
            let (a, b) = (sups[k], sups_half[k]);
            let big = a.max(b);
            if big > 1e-12 {
                let small = a.min(b).max(1e-300);
                if big / small > 10.0 {
                    return Err(Error::KernelUnresolved(format!(
                        "derivative sup {k} changes from {a:.3e} to {b:.3e} when halving the step"
                    )));
                }
            }
        }
    }
    for v in sups {
        if !v.is_finite() {
            return Err(Error::KernelUnresolved("non-finite derivative sup".into()));
        }
    }
    let norm_k = sups.iter().cloned().fold(0.0, f64::max);
    Ok(KernelNormReport {
        sup_abs_k: sups[0],
        sup_abs_slash1: sups[1],
        sup_abs_slash2: sups[2],
        sup_abs_slash12: sups[3],
        norm_k,
        inflation: cfg.inflation,
        inflated: norm_k * cfg.inflation,
        samples: pts.len(),
        derivatives: if analytic { "analytic" } else { "finite-difference" }.into(),
        regularity_warning: spec.regularity_warning(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_sampling() -> NormSampling {
        NormSampling {
            halton_points: 512,
            lattice_per_axis: 2,
            diagonal_points: 128,
            ..Default::default()
        }
    }

    #[test]
    fn constant_kernel_norm_is_kappa() {
        let d = KernelDomain {
            time_extent: 1.0,
            half_width: 1.0,
        };
        let r = kernel_norm(&KernelSpec::constant_real(0.3), &d, &small_sampling()).unwrap();
        assert_eq!(r.norm_k, 0.3);
        assert_eq!(r.sup_abs_slash12, 0.0);
        assert!((r.inflated - 0.33).abs() < 1e-15);
    }

    #[test]
    fn gaussian_peak_value() {
        let k = KernelSpec::gaussian_difference(Complex64::new(0.3, 0.0), 2.0).unwrap();
        let x = [0.4, 0.1, -0.2, 0.3];
        assert_eq!(eval_kernel(&k, x, x).unwrap(), Complex64::new(0.3, 0.0));
    }

    #[test]
    fn analytic_jet_matches_differences() {
        let k = KernelSpec::gaussian_difference(Complex64::new(0.3, -0.1), 1.3).unwrap();
        let x1 = [0.4, 0.1, -0.2, 0.3];
        let x2 = [0.1, -0.3, 0.2, 0.5];
        let a = k.analytic_jet(x1, x2).unwrap();
        let f = k.fd_jet(x1, x2, 1e-4);
        for m in 0..4 {
            assert!((a.d1[m] - f.d1[m]).norm() < 1e-7);
            assert!((a.d2[m] - f.d2[m]).norm() < 1e-7);
            for n in 0..4 {
                assert!((a.d12[m][n] - f.d12[m][n]).norm() < 1e-6);
            }
        }
    }

    #[test]
    fn flrw_distance_examples() {
        let lin = ScaleFactor::linear();
        let d = flrw_distance(2.0, [2.0, 0.0, 0.0, 0.0], 1.0, [1.0, 0.0, 0.0, 0.0], &lin);
        assert!((d - 1.5).abs() < 1e-14);
        let quad = ScaleFactor::quadratic();
        let d = flrw_distance(1.0, [1.0, 0.0, 0.0, 0.0], 0.0, [0.0; 4], &quad);
        assert!((d - 1.0 / 3.0).abs() < 1e-14);
        let d = flrw_distance(1.0, [1.0, 0.5, 0.0, 0.0], 1.0, [1.0, 0.0, 0.0, 0.0], &lin);
        assert!(d < 0.0);
    }

    #[test]
    fn flrw_kernel_gate() {
        let k = flrw_kernel(Profile::custom("one", |_| 1.0), ScaleFactor::linear());
        // space-like
        assert_eq!(eval_kernel(&k, [1.0, 0.0, 0.0, 0.0], [1.0, 0.5, 0.0, 0.0]).unwrap(), ZERO);
        // light-like: f(0)
        let v = eval_kernel(&k, [1.5, 0.0, 0.0, 0.0], [1.0, 0.5, 0.0, 0.0]).unwrap();
        assert_eq!(v, Complex64::new(1.0, 0.0));
        assert!(k.regularity_warning().is_some());
        let zero = flrw_kernel(Profile::Zero, ScaleFactor::linear());
        assert!(zero.is_zero());
    }

    #[test]
    fn regularity_classes() {
        assert_eq!(cone_regularity(&Profile::default_family(0.1)), ConeRegularity::C1);
        assert_eq!(
            cone_regularity(&Profile::PolyExp { kappa: 1.0, power: 3 }),
            ConeRegularity::C2
        );
        assert_eq!(
            cone_regularity(&Profile::PolyExp { kappa: 1.0, power: 1 }),
            ConeRegularity::C0
        );
        assert_eq!(
            cone_regularity(&Profile::custom("sin", |d| d.sin())),
            ConeRegularity::C0
        );
        assert_eq!(
            cone_regularity(&Profile::custom("cos", |d| d.cos())),
            ConeRegularity::Discontinuous
        );
    }

    #[test]
    fn slash_norm_closed_form() {
        let v = [0.3, -1.0, 0.4, 2.0];
        let got = slash_norm(v.map(|x| Complex64::new(x, 0.0)));
        let want = 0.3 + (1.0f64 + 0.16 + 4.0).sqrt();
        assert!((got - want).abs() < 1e-12);
    }
}
