//! Numerical checks of the L² growth estimates behind the contraction proof.
//!
//! Every estimate has the form LHS(t₁,t₂) ≤ RHS(t₁,t₂) on all grid time
//! pairs, where the right-hand sides are built from the comparison
//! operators 𝒜⁽ᵏ⁾ acting on tables over time pairs.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::KernelSpec;
use crate::operator::{apply_piece_rows, PairOperator, Piece, QuadratureConfig, RowOperator};
use crate::spinor::norms::slice_l2_table;
use crate::spinor::{apply_dirac, bracket_table, MultiTimeField, Particle};

/// Applies 𝒜⁽ᵏ⁾(m) in one time variable of a row-major nt×nt table sampled on
/// the grid times n·dt. The ρ-integrals use the trapezoid rule.
pub fn curly_a_apply(k: usize, m: f64, particle: Particle, table: &[f64], time_steps: usize, dt: f64) -> Result<Vec<f64>> {
    if !(1..=4).contains(&k) {
        return Err(Error::Config(format!("comparison operator index {k} not in 1..=4")));
    }
    let nt = time_steps;
    if table.len() != nt * nt {
        return Err(Error::Config(format!(
            "table has {} entries, expected {}",
            table.len(),
            nt * nt
        )));
    }
    let at = |n: usize, other: usize| match particle {
        Particle::One => table[n * nt + other],
        Particle::Two => table[other * nt + n],
    };
    let m4 = m.powi(4);
    let mut out = vec![0.0; nt * nt];
    for other in 0..nt {
        for n in 0..nt {
            let t = n as f64 * dt;
            let integral = |p: i32| -> f64 {
                (0..=n)
                    .map(|j| {
                        let w = if j == 0 || j == n { 0.5 } else { 1.0 };
                        let rho = j as f64 * dt;
                        w * dt * (t - rho).powi(p) * at(j, other)
                    })
                    .sum()
            };
            let v = match k {
                1 => t * integral(2),
                2 => m4 * t.powi(4) / 144.0 * integral(3),
                3 => t * t * at(0, other),
                _ => m4 * t.powi(6) / 36.0 * at(0, other),
            };
            let idx = match particle {
                Particle::One => n * nt + other,
                Particle::Two => other * nt + n,
            };
            out[idx] = v;
        }
    }
    Ok(out)
}

/// 𝒜(m) = Σₖ 𝒜⁽ᵏ⁾(m) in one time variable.
pub fn curly_a_total(m: f64, particle: Particle, table: &[f64], time_steps: usize, dt: f64) -> Result<Vec<f64>> {
    let mut out = vec![0.0; table.len()];
    for k in 1..=4 {
        let part = curly_a_apply(k, m, particle, table, time_steps, dt)?;
        out.iter_mut().zip(&part).for_each(|(o, p)| *o += p);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

/// Worst time pair of one estimate on one sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalityCheck {
    pub name: String,
    pub sample: usize,
    pub time_pair: (usize, usize),
    pub lhs: f64,
    pub rhs: f64,
    /// max over time pairs of LHS/RHS (pairs with RHS = 0 are skipped).
    pub worst_ratio: f64,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LemmaConfig {
    pub quad: QuadratureConfig,
    /// Relative slack: PASS iff LHS ≤ RHS·(1 + tolerance).
    pub tolerance: f64,
    /// Re-run with every quadrature order doubled and mark the sample
    /// inconclusive if the left-hand sides move by more than this.
    pub refinement_tolerance: Option<f64>,
}

impl Default for LemmaConfig {
    fn default() -> Self {
        Self {
            quad: QuadratureConfig::default(),
            tolerance: 0.05,
            refinement_tolerance: Some(0.05),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LemmaReport {
    pub tolerance: f64,
    pub checks: Vec<InequalityCheck>,
    /// Per sample: max relative change of the left-hand sides under
    /// quadrature refinement, when the refinement gate ran.
    pub refinement_change: Vec<Option<f64>>,
}

impl LemmaReport {
    pub fn count(&self, v: Verdict) -> usize {
        self.checks.iter().filter(|c| c.verdict == v).count()
    }

    pub fn all_pass(&self) -> bool {
        !self.checks.is_empty() && self.checks.iter().all(|c| c.verdict == Verdict::Pass)
    }
}

fn compare(name: &str, sample: usize, lhs: &[f64], rhs: &[f64], nt: usize, tol: f64, floor: f64) -> InequalityCheck {
    let mut worst = (0usize, 0usize);
    let mut worst_ratio = 0.0f64;
    let mut ok = true;
    for (idx, (&l, &r)) in lhs.iter().zip(rhs).enumerate() {
        if l > r * (1.0 + tol) + floor {
            ok = false;
        }
        if r > 0.0 && l / r > worst_ratio {
            worst_ratio = l / r;
            worst = (idx / nt, idx % nt);
        } else if r <= 0.0 && l > floor && worst_ratio.is_finite() {
            worst_ratio = f64::INFINITY;
            worst = (idx / nt, idx % nt);
        }
    }
    let i = worst.0 * nt + worst.1;
    InequalityCheck {
        name: name.to_string(),
        sample,
        time_pair: worst,
        lhs: lhs[i],
        rhs: rhs[i],
        worst_ratio,
        verdict: if ok { Verdict::Pass } else { Verdict::Fail },
    }
}

fn max_rel_change(a: &[f64], b: &[f64]) -> f64 {
    let scale = a.iter().chain(b).cloned().fold(0.0, f64::max);
    if scale == 0.0 {
        return 0.0;
    }
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs() / scale)
        .fold(0.0, f64::max)
}

struct GrowthLhs {
    a: Vec<f64>,
    d1: Vec<f64>,
    d2: Vec<f64>,
    d12: Vec<f64>,
}

impl GrowthLhs {
    fn bracket(&self) -> Vec<f64> {
        (0..self.a.len())
            .map(|i| self.a[i] + self.d1[i] + self.d2[i] + self.d12[i])
            .collect()
    }

    fn compute(psi: &MultiTimeField, k: &KernelSpec, quad: &QuadratureConfig) -> Result<Self> {
        let op = PairOperator::new(psi.grid, psi.masses, *quad)?;
        let (apsi, _) = op.apply(psi, k)?;
        let a = slice_l2_table(&apsi);
        let d1 = slice_l2_table(&apply_dirac(&apsi, Particle::One)?);
        let d2f = apply_dirac(&apsi, Particle::Two)?;
        drop(apsi);
        let d2 = slice_l2_table(&d2f);
        let d12 = slice_l2_table(&apply_dirac(&d2f, Particle::One)?);
        Ok(Self { a, d1, d2, d12 })
    }
}

/// Checks, per sample and time pair,
///
/// ```text
/// ‖Aψ‖²      ≤ 64‖K‖² 𝒜₁𝒜₂[ψ]²
/// ‖D₁Aψ‖²    ≤ 8‖K‖² 𝒜₂[ψ]²
/// ‖D₂Aψ‖²    ≤ 8‖K‖² 𝒜₁[ψ]²
/// ‖D₁D₂Aψ‖²  ≤ ‖K‖² [ψ]²
/// [Aψ]²      ≤ ‖K‖² (1 + 8𝒜₁)(1 + 8𝒜₂)[ψ]²
/// ```
///
/// with 𝒜ⱼ = 𝒜ⱼ(mⱼ) and `norm_k` the kernel norm ‖K‖.
pub fn verify_growth_bounds(
    samples: &[MultiTimeField],
    k: &KernelSpec,
    norm_k: f64,
    cfg: &LemmaConfig,
) -> Result<LemmaReport> {
    let mut checks = Vec::new();
    let mut refinement_change = Vec::new();
    for (si, psi) in samples.iter().enumerate() {
        let g = psi.grid;
        let (nt, dt) = (g.time_steps, g.dt());
        let (m1, m2) = psi.masses;
        let br = bracket_table(psi)?.squared;
        let k2 = norm_k * norm_k;
        let a1 = curly_a_total(m1, Particle::One, &br, nt, dt)?;
        let a2 = curly_a_total(m2, Particle::Two, &br, nt, dt)?;
        let a12 = curly_a_total(m1, Particle::One, &a2, nt, dt)?;

        let lhs = GrowthLhs::compute(psi, k, &cfg.quad)?;
        let gate = match cfg.refinement_tolerance {
            Some(_) => {
                let fine = GrowthLhs::compute(psi, k, &cfg.quad.refined())?;
                Some(max_rel_change(&lhs.bracket(), &fine.bracket()))
            }
            None => None,
        };
        let unresolved = matches!((gate, cfg.refinement_tolerance), (Some(c), Some(t)) if c > t);
        refinement_change.push(gate);

        let floor = 1e-12 * k2 * br.iter().cloned().fold(0.0, f64::max);
        let scaled = |v: &[f64], c: f64| v.iter().map(|x| c * x).collect::<Vec<_>>();
        let growth: Vec<f64> = (0..br.len())
            .map(|i| k2 * (br[i] + 8.0 * a1[i] + 8.0 * a2[i] + 64.0 * a12[i]))
            .collect();
        let mut local = vec![
            compare("a_psi_bound", si, &lhs.a, &scaled(&a12, 64.0 * k2), nt, cfg.tolerance, floor),
            compare("d1_a_psi_bound", si, &lhs.d1, &scaled(&a2, 8.0 * k2), nt, cfg.tolerance, floor),
            compare("d2_a_psi_bound", si, &lhs.d2, &scaled(&a1, 8.0 * k2), nt, cfg.tolerance, floor),
            compare("d1d2_a_psi_bound", si, &lhs.d12, &scaled(&br, k2), nt, cfg.tolerance, floor),
            compare("bracket_growth_bound", si, &lhs.bracket(), &growth, nt, cfg.tolerance, floor),
        ];
        if unresolved {
            local.iter_mut().for_each(|c| c.verdict = Verdict::Inconclusive);
        }
        checks.extend(local);
    }
    Ok(LemmaReport {
        tolerance: cfg.tolerance,
        checks,
        refinement_change,
    })
}

fn piece_tables(psi: &MultiTimeField, quad: &QuadratureConfig) -> Result<Vec<Vec<f64>>> {
    let g = psi.grid;
    let pieces = [Piece::A1, Piece::A2, Piece::A3, Piece::A4];
    let rows = |m: f64| -> Result<Vec<RowOperator>> {
        pieces
            .iter()
            .map(|&p| RowOperator::build(&g, &[p], m, quad))
            .collect()
    };
    let r1 = rows(psi.masses.0)?;
    let r2 = if psi.masses.1 == psi.masses.0 {
        r1.clone()
    } else {
        rows(psi.masses.1)?
    };
    let mut out = Vec::with_capacity(16);
    for (kk, pk) in pieces.iter().enumerate() {
        for (ll, pl) in pieces.iter().enumerate() {
            let inner = apply_piece_rows(psi, Particle::Two, &r2[ll], pl.is_boundary());
            let both = apply_piece_rows(&inner, Particle::One, &r1[kk], pk.is_boundary());
            out.push(slice_l2_table(&both));
        }
    }
    Ok(out)
}

/// Checks ‖A₁⁽ᵏ⁾A₂⁽ˡ⁾ψ‖² ≤ 𝒜₁⁽ᵏ⁾(m₁)𝒜₂⁽ˡ⁾(m₂)‖ψ‖² for all sixteen (k, l).
pub fn verify_piece_bounds(samples: &[MultiTimeField], cfg: &LemmaConfig) -> Result<LemmaReport> {
    let mut checks = Vec::new();
    let mut refinement_change = Vec::new();
    for (si, psi) in samples.iter().enumerate() {
        let g = psi.grid;
        let (nt, dt) = (g.time_steps, g.dt());
        let (m1, m2) = psi.masses;
        let l2 = slice_l2_table(psi);
        let tables = piece_tables(psi, &cfg.quad)?;
        let gate = match cfg.refinement_tolerance {
            Some(_) => {
                let fine = piece_tables(psi, &cfg.quad.refined())?;
                Some(
                    tables
                        .iter()
                        .zip(&fine)
                        .map(|(a, b)| max_rel_change(a, b))
                        .fold(0.0, f64::max),
                )
            }
            None => None,
        };
        let unresolved = matches!((gate, cfg.refinement_tolerance), (Some(c), Some(t)) if c > t);
        refinement_change.push(gate);
        let floor = 1e-12 * l2.iter().cloned().fold(0.0, f64::max);
        for k in 1..=4 {
            for l in 1..=4 {
                let inner = curly_a_apply(l, m2, Particle::Two, &l2, nt, dt)?;
                let rhs = curly_a_apply(k, m1, Particle::One, &inner, nt, dt)?;
                let lhs = &tables[(k - 1) * 4 + (l - 1)];
                let mut c = compare(&format!("piece_bound_{k}{l}"), si, lhs, &rhs, nt, cfg.tolerance, floor);
                if unresolved {
                    c.verdict = Verdict::Inconclusive;
                }
                checks.push(c);
            }
        }
    }
    Ok(LemmaReport {
        tolerance: cfg.tolerance,
        checks,
        refinement_change,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spinor::GridSpec;

    fn ones(nt: usize) -> Vec<f64> {
        vec![1.0; nt * nt]
    }

    #[test]
    fn comparison_operators_on_constants() {
        let nt = 5;
        let dt = 0.25;
        let t_last = 1.0;
        let a3 = curly_a_apply(3, 0.0, Particle::One, &ones(nt), nt, dt).unwrap();
        assert!((a3[4 * nt + 2] - t_last * t_last).abs() < 1e-15);
        // trapezoid on ∫(t−ρ)² is not exact; compare with the polynomial
        // integral to the rule's accuracy
        let a1 = curly_a_apply(1, 0.0, Particle::Two, &ones(nt), nt, dt).unwrap();
        assert!((a1[nt + 4] - 1.0 / 3.0).abs() < 0.02);
        let a2 = curly_a_apply(2, 1.0, Particle::One, &ones(nt), nt, dt).unwrap();
        assert!((a2[4 * nt] - 1.0 / 576.0).abs() < 2e-4);
        let a4 = curly_a_apply(4, 1.0, Particle::One, &ones(nt), nt, dt).unwrap();
        assert!((a4[4 * nt] - 1.0 / 36.0).abs() < 1e-15);
        assert!(curly_a_apply(5, 0.0, Particle::One, &ones(nt), nt, dt).is_err());
    }

    #[test]
    fn zero_field_passes_trivially() {
        let g = GridSpec::new(0.5, 3, 1.0, 4).unwrap();
        let psi = MultiTimeField::zeros(g, (0.0, 0.0));
        let cfg = LemmaConfig {
            refinement_tolerance: None,
            ..LemmaConfig::default()
        };
        let r = verify_growth_bounds(&[psi], &KernelSpec::constant_real(0.3), 0.3, &cfg).unwrap();
        assert!(r.all_pass());
        assert!(r.checks.iter().all(|c| c.lhs == 0.0));
    }
}
