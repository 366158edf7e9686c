//! Solution of ψ = ψ_free + Aψ by Neumann series, Picard iteration and
//! time marching, plus the contraction certificate and the estimate checks.

mod certificate;
pub mod lemmas;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::KernelSpec;
use crate::operator::{OperatorDiagnostics, PairOperator, QuadratureConfig};
use crate::specialfun::WeightSpec;
use crate::spinor::{weighted_norm, MultiTimeField};

pub use certificate::{certificate_for, contraction_certificate, Certificate};
pub use lemmas::{
    curly_a_apply, curly_a_total, verify_growth_bounds, verify_piece_bounds, InequalityCheck,
    LemmaConfig, LemmaReport, Verdict,
};

/// Inner fixed-point sweeps allowed per time-marching shell.
pub const MAX_SWEEPS: usize = 5;

/// Consecutive non-decreasing term norms that count as divergence.
const DIVERGENCE_RUN: usize = 3;

/// Slack on the certificate when comparing empirical term ratios.
const RATIO_SLACK: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolveMode {
    Neumann,
    TimeMarch,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolveConfig {
    pub mode: SolveMode,
    pub max_iterations: usize,
    /// Stop once a term (or an update) has ‖·‖_g below this.
    pub residual_tolerance: f64,
    pub weight: WeightSpec,
    pub quad: QuadratureConfig,
}

impl SolveConfig {
    pub fn new(mode: SolveMode, max_iterations: usize, residual_tolerance: f64, weight: WeightSpec) -> Result<Self> {
        let cfg = Self {
            mode,
            max_iterations,
            residual_tolerance,
            weight,
            quad: QuadratureConfig::default(),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_quadrature(mut self, quad: QuadratureConfig) -> Self {
        self.quad = quad;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_iterations == 0 {
            return Err(Error::Config("maxIterations must be >= 1".into()));
        }
        if !(self.residual_tolerance > 0.0 && self.residual_tolerance.is_finite()) {
            return Err(Error::Config(format!(
                "residual tolerance {} must be > 0",
                self.residual_tolerance
            )));
        }
        self.quad.validate()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolveStatus {
    Converged,
    MaxIterations,
    Diverged,
    SweepFailure,
}

/// One row of the convergence history.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iteration: usize,
    /// ‖Aᵏψ_free‖_g for the Neumann series, ‖ψₖ − ψₖ₋₁‖_g for Picard,
    /// the last sweep's update for a time-marching shell.
    pub term_norm: f64,
    pub ratio: Option<f64>,
    /// ‖ψₖ − ψ_free − Aψₖ‖_g.
    pub residual: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub mode: String,
    pub status: SolveStatus,
    pub history: Vec<IterationRecord>,
    pub final_residual: f64,
    pub max_ratio: Option<f64>,
    pub certificate: Option<Certificate>,
    /// Every empirical ratio is at most the certificate sum plus 5%.
    pub ratios_within_certificate: Option<bool>,
    pub clipped_mass: f64,
    pub diagnostics: OperatorDiagnostics,
    pub cauchy_defect: f64,
    pub weight: WeightSpec,
    /// Inner sweeps used per shell (time marching only).
    pub sweeps: Vec<usize>,
    pub warnings: Vec<String>,
}

impl SolveReport {
    fn new(mode: &str, weight: WeightSpec) -> Self {
        Self {
            mode: mode.to_string(),
            status: SolveStatus::MaxIterations,
            history: Vec::new(),
            final_residual: f64::NAN,
            max_ratio: None,
            certificate: None,
            ratios_within_certificate: None,
            clipped_mass: 0.0,
            diagnostics: OperatorDiagnostics::default(),
            cauchy_defect: 0.0,
            weight,
            sweeps: Vec::new(),
            warnings: Vec::new(),
        }
    }

    fn record_diag(&mut self, d: OperatorDiagnostics) {
        let clip = self.clipped_mass.max(d.clipped_mass);
        self.diagnostics = OperatorDiagnostics {
            clipped_mass: clip,
            ..d
        };
        self.clipped_mass = clip;
    }

    fn finish_ratios(&mut self) {
        let max = self
            .history
            .iter()
            .filter_map(|r| r.ratio)
            .fold(None, |m: Option<f64>, r| Some(m.map_or(r, |m| m.max(r))));
        self.max_ratio = max;
        if let (Some(max), Some(c)) = (max, self.certificate) {
            self.ratios_within_certificate = Some(max <= c.sum * (1.0 + RATIO_SLACK));
        }
    }

    /// Convergence history as CSV: iteration, term norm, ratio, residual.
    pub fn history_csv(&self) -> String {
        let mut s = String::from("iteration,term_norm,ratio,residual\n");
        let opt = |v: Option<f64>| v.map_or(String::new(), |x| format!("{x:.12e}"));
        for r in &self.history {
            s.push_str(&format!(
                "{},{:.12e},{},{}\n",
                r.iteration,
                r.term_norm,
                opt(r.ratio),
                opt(r.residual)
            ));
        }
        s
    }
}

/// A solve that stopped abnormally, with the report up to that point when
/// iterations had started.
#[derive(Debug, Clone, thiserror::Error)]
#[error("{error}")]
pub struct SolveFailure {
    pub error: Error,
    pub report: Option<Box<SolveReport>>,
}

impl From<Error> for SolveFailure {
    fn from(error: Error) -> Self {
        Self { error, report: None }
    }
}

pub type SolveResult = std::result::Result<(MultiTimeField, SolveReport), SolveFailure>;

fn kernel_warnings(k: &KernelSpec, weight: &WeightSpec) -> Vec<String> {
    let mut w = Vec::new();
    if let Some(c) = k.as_constant() {
        if c.norm() > weight.norm_k {
            w.push(format!(
                "constant kernel |kappa| = {} exceeds the weight's normK = {}",
                c.norm(),
                weight.norm_k
            ));
        }
    }
    if let Some(r) = k.regularity_warning() {
        w.push(r);
    }
    w
}

/// ψ_free(0,·,0,·) against ψ(0,·,0,·): max absolute difference.
pub fn cauchy_check(psi: &MultiTimeField, psi_free: &MultiTimeField) -> Result<f64> {
    if !psi.same_shape(psi_free) {
        return Err(Error::Config("fields live on different grids".into()));
    }
    let a = psi.slice(0, 0);
    let b = psi_free.slice(0, 0);
    Ok(a.iter().zip(&b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max))
}

/// ‖ψ − ψ_free − Aψ‖_g.
pub fn residual_norm(
    op: &PairOperator,
    psi: &MultiTimeField,
    psi_free: &MultiTimeField,
    k: &KernelSpec,
    weight: &WeightSpec,
) -> Result<(f64, OperatorDiagnostics)> {
    let (apsi, diag) = op.apply(psi, k)?;
    let mut r = psi.sub(psi_free);
    r.axpy(Complex64::new(-1.0, 0.0), &apsi);
    Ok((weighted_norm(&r, weight)?, diag))
}

fn fail(error: Error, mut report: SolveReport, status: SolveStatus) -> SolveFailure {
    report.status = status;
    report.finish_ratios();
    SolveFailure {
        error,
        report: Some(Box::new(report)),
    }
}

/// Dispatches on `cfg.mode`.
pub fn solve(psi_free: &MultiTimeField, k: &KernelSpec, cfg: &SolveConfig) -> SolveResult {
    match cfg.mode {
        SolveMode::Neumann => neumann_solve(psi_free, k, cfg),
        SolveMode::TimeMarch => time_march_solve(psi_free, k, cfg),
    }
}

/// ψ_N = Σ_{k≤N} Aᵏψ_free, stopping at the first term with ‖·‖_g below the
/// tolerance. The residual of ψ_k equals the norm of the next term, so the
/// history carries it for every iteration but the last, whose residual is
/// evaluated explicitly.
pub fn neumann_solve(psi_free: &MultiTimeField, k: &KernelSpec, cfg: &SolveConfig) -> SolveResult {
    cfg.validate()?;
    let mut report = SolveReport::new("neumann", cfg.weight);
    report.certificate = Some(certificate_for(&cfg.weight));
    report.warnings = kernel_warnings(k, &cfg.weight);
    let op = PairOperator::new(psi_free.grid, psi_free.masses, cfg.quad)?;

    let mut psi = psi_free.clone();
    let mut term = psi_free.clone();
    let mut prev = weighted_norm(&term, &cfg.weight)?;
    report.history.push(IterationRecord {
        iteration: 0,
        term_norm: prev,
        ratio: None,
        residual: None,
    });
    let mut rising = 0usize;
    let mut converged = prev < cfg.residual_tolerance;
    let mut it = 0;
    while !converged && it < cfg.max_iterations {
        it += 1;
        let (next, diag) = op.apply(&term, k)?;
        report.record_diag(diag);
        term = next;
        let norm = weighted_norm(&term, &cfg.weight)?;
        if let Some(last) = report.history.last_mut() {
            last.residual = Some(norm);
        }
        let ratio = (prev > 0.0).then(|| norm / prev);
        report.history.push(IterationRecord {
            iteration: it,
            term_norm: norm,
            ratio,
            residual: None,
        });
        psi.axpy(Complex64::new(1.0, 0.0), &term);
        rising = if norm >= prev { rising + 1 } else { 0 };
        if rising >= DIVERGENCE_RUN {
            let msg = format!("term norms did not decrease over {DIVERGENCE_RUN} iterations (last {norm:.3e})");
            return Err(fail(Error::Divergence(msg), report, SolveStatus::Diverged));
        }
        converged = norm < cfg.residual_tolerance;
        prev = norm;
    }
    let (res, diag) = residual_norm(&op, &psi, psi_free, k, &cfg.weight)?;
    report.record_diag(diag);
    report.final_residual = res;
    if let Some(last) = report.history.last_mut() {
        last.residual = Some(res);
    }
    report.status = if converged {
        SolveStatus::Converged
    } else {
        SolveStatus::MaxIterations
    };
    report.cauchy_defect = cauchy_check(&psi, psi_free)?;
    report.finish_ratios();
    Ok((psi, report))
}

/// Picard iteration ψ ← ψ_free + Aψ from a given start, until the update
/// has ‖·‖_g below the tolerance.
pub fn picard_solve(
    psi_free: &MultiTimeField,
    initial: &MultiTimeField,
    k: &KernelSpec,
    cfg: &SolveConfig,
) -> SolveResult {
    cfg.validate()?;
    if !initial.same_shape(psi_free) {
        return Err(Error::Config("initial iterate lives on a different grid".into()).into());
    }
    let mut report = SolveReport::new("picard", cfg.weight);
    report.certificate = Some(certificate_for(&cfg.weight));
    report.warnings = kernel_warnings(k, &cfg.weight);
    let op = PairOperator::new(psi_free.grid, psi_free.masses, cfg.quad)?;
    let mut psi = initial.clone();
    let mut prev: Option<f64> = None;
    let mut rising = 0usize;
    let mut converged = false;
    for it in 1..=cfg.max_iterations {
        let (apsi, diag) = op.apply(&psi, k)?;
        report.record_diag(diag);
        let next = psi_free.add(&apsi);
        drop(apsi);
        let update = weighted_norm(&next.sub(&psi), &cfg.weight)?;
        if let Some(last) = report.history.last_mut() {
            last.residual = Some(update);
        }
        let ratio = prev.filter(|p| *p > 0.0).map(|p| update / p);
        report.history.push(IterationRecord {
            iteration: it,
            term_norm: update,
            ratio,
            residual: None,
        });
        psi = next;
        if let Some(p) = prev {
            rising = if update >= p { rising + 1 } else { 0 };
        }
        if rising >= DIVERGENCE_RUN {
            let msg = format!("updates did not decrease over {DIVERGENCE_RUN} iterations");
            return Err(fail(Error::Divergence(msg), report, SolveStatus::Diverged));
        }
        prev = Some(update);
        if update < cfg.residual_tolerance {
            converged = true;
            break;
        }
    }
    let (res, diag) = residual_norm(&op, &psi, psi_free, k, &cfg.weight)?;
    report.record_diag(diag);
    report.final_residual = res;
    if let Some(last) = report.history.last_mut() {
        last.residual = Some(res);
    }
    report.status = if converged {
        SolveStatus::Converged
    } else {
        SolveStatus::MaxIterations
    };
    report.cauchy_defect = cauchy_check(&psi, psi_free)?;
    report.finish_ratios();
    Ok((psi, report))
}

fn copy_shell(dst: &mut MultiTimeField, src: &MultiTimeField, w: usize) {
    for n in 0..=w {
        dst.set_slice(w, n, &src.slice(w, n));
        dst.set_slice(n, w, &src.slice(n, w));
    }
}

/// Fills ψ shell by shell in w = max(n₁, n₂). Aψ on a shell needs only
/// pairs inside the window n₁, n₂ ≤ w, so each shell is an inner fixed
/// point of at most [`MAX_SWEEPS`] sweeps with everything earlier frozen.
pub fn time_march_solve(psi_free: &MultiTimeField, k: &KernelSpec, cfg: &SolveConfig) -> SolveResult {
    cfg.validate()?;
    let mut report = SolveReport::new("time-march", cfg.weight);
    report.certificate = Some(certificate_for(&cfg.weight));
    report.warnings = kernel_warnings(k, &cfg.weight);
    let op = PairOperator::new(psi_free.grid, psi_free.masses, cfg.quad)?;
    let nt = psi_free.grid.time_steps;
    let mut psi = MultiTimeField::zeros(psi_free.grid, psi_free.masses);
    let sweep_tol = 0.1 * cfg.residual_tolerance;
    for w in 0..nt {
        copy_shell(&mut psi, psi_free, w);
        let mut done = false;
        let mut change = 0.0;
        for sweep in 1..=MAX_SWEEPS {
            let (apsi, diag) = op.apply_windowed(&psi, k, Some(w))?;
            report.record_diag(diag);
            let mut next = psi.clone();
            let target = psi_free.add(&apsi);
            drop(apsi);
            copy_shell(&mut next, &target, w);
            drop(target);
            change = weighted_norm(&next.sub(&psi), &cfg.weight)?;
            psi = next;
            report.history.push(IterationRecord {
                iteration: w,
                term_norm: change,
                ratio: None,
                residual: None,
            });
            if change <= sweep_tol {
                report.sweeps.push(sweep);
                done = true;
                break;
            }
        }
        if !done {
            report.sweeps.push(MAX_SWEEPS);
            return Err(fail(
                Error::SweepNonConvergence { shell: w, change },
                report,
                SolveStatus::SweepFailure,
            ));
        }
    }
    let (res, diag) = residual_norm(&op, &psi, psi_free, k, &cfg.weight)?;
    report.record_diag(diag);
    report.final_residual = res;
    report.status = SolveStatus::Converged;
    report.cauchy_defect = cauchy_check(&psi, psi_free)?;
    Ok((psi, report))
}
