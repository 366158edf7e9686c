//! Scalar special functions: the order-one Bessel function, the contraction
//! weight `g` and its closed-form identities, and the smooth step used when
//! approximating free solutions by test functions.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Largest argument accepted by `exp` before we call the weight saturated.
pub const EXP_SATURATION: f64 = 700.0;

const SERIES_CUTOFF: f64 = 8.0;
const TRAPEZOID_NODES: usize = 160;

/// Bessel function of the first kind, order one.
///
/// Power series below 8; above that the periodic trapezoid rule on Bessel's
/// integral `J1(x) = (1/2π) ∫₀^{2π} cos(τ − x sin τ) dτ`, which converges
/// geometrically once the node count exceeds `x`.
pub fn bessel_j1(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::Domain(format!("bessel_j1 argument {x} is not finite")));
    }
    if x < 0.0 {
        return bessel_j1(-x).map(|v| -v);
    }
    if x < SERIES_CUTOFF {
        Ok(x * j1_over_x_series(x))
    } else {
        Ok(j1_trapezoid(x))
    }
}

/// `J1(x)/x` with the removable singularity at zero filled by 1/2.
pub fn j1_over_x(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::Domain(format!("j1_over_x argument {x} is not finite")));
    }
    let x = x.abs();
    if x < SERIES_CUTOFF {
        Ok(j1_over_x_series(x))
    } else {
        Ok(j1_trapezoid(x) / x)
    }
}

// Σ_k (−1)^k (x/2)^{2k} / (2 · k! (k+1)!)
fn j1_over_x_series(x: f64) -> f64 {
    let q = -0.25 * x * x;
    let mut term = 0.5;
    let mut sum = term;
    for k in 1..60 {
        let kf = k as f64;
        term *= q / (kf * (kf + 1.0));
        sum += term;
        if term.abs() < 1e-18 * sum.abs().max(1e-300) {
            break;
        }
    }
    sum
}

fn j1_trapezoid(x: f64) -> f64 {
    let n = TRAPEZOID_NODES.max(2 * (x.ceil() as usize) + 64);
    let h = 2.0 * PI / n as f64;
    let mut acc = 0.0;
    for j in 0..n {
        let tau = j as f64 * h;
        acc += (tau - x * tau.sin()).cos();
    }
    acc / n as f64
}

/// Parameters of the contraction weight.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightSpec {
    pub norm_k: f64,
    pub mu: f64,
    pub b: f64,
}

impl WeightSpec {
    /// Builds the spec with `b = (‖K‖/(1−‖K‖))⁴ (6+μ⁴)⁴`.
    pub fn new(norm_k: f64, mu: f64) -> Result<Self> {
        if !(norm_k > 0.0 && norm_k < 1.0) {
            return Err(Error::Domain(format!("normK = {norm_k} must lie in (0, 1)")));
        }
        if !(mu.is_finite() && mu >= 0.0) {
            return Err(Error::Domain(format!("mu = {mu} must be finite and >= 0")));
        }
        let ratio = norm_k / (1.0 - norm_k);
        let mass = 6.0 + mu.powi(4);
        let b = ratio.powi(4) * mass.powi(4);
        Ok(Self { norm_k, mu, b })
    }

    /// Natural log of g(t); finite even where g itself would overflow.
    pub fn ln_g(&self, t: f64) -> f64 {
        let bt8 = self.b * t.powi(8);
        0.5 * bt8.ln_1p() + bt8 / 16.0
    }
}

fn check_t(t: f64) -> Result<()> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::Domain(format!("t = {t} must be finite and >= 0")));
    }
    Ok(())
}

/// g(t) = √(1+bt⁸) · exp(bt⁸/16).
pub fn weight_g(t: f64, spec: &WeightSpec) -> Result<f64> {
    check_t(t)?;
    let bt8 = spec.b * t.powi(8);
    let exponent = bt8 / 16.0;
    if exponent > EXP_SATURATION {
        return Err(Error::WeightSaturated { t, exponent });
    }
    Ok((1.0 + bt8).sqrt() * exponent.exp())
}

/// Closed form of ∫₀ᵗ g²(τ) dτ, namely t/(1+bt⁸) · g²(t).
pub fn g_sq_antiderivative(t: f64, spec: &WeightSpec) -> Result<f64> {
    check_t(t)?;
    let bt8 = spec.b * t.powi(8);
    // g² = (1+bt⁸) exp(bt⁸/8)
    let exponent = bt8 / 8.0;
    if exponent > EXP_SATURATION {
        return Err(Error::WeightSaturated { t, exponent });
    }
    let g_sq = (1.0 + bt8) * exponent.exp();
    Ok(t / (1.0 + bt8) * g_sq)
}

/// sup_{t>0} tᶜ/(1+bt⁸) for 0 < c ≤ 8.
///
/// For c < 8 the maximum sits at bt⁸ = c/(8−c), giving
/// (1 − c/8)·b^{−c/8}·(8/c − 1)^{−c/8}.
pub fn sup_power_ratio(c: f64, b: f64) -> Result<f64> {
    if !(c > 0.0 && c <= 8.0) {
        return Err(Error::Domain(format!("exponent c = {c} outside (0, 8]")));
    }
    if !(b > 0.0 && b.is_finite()) {
        return Err(Error::Domain(format!("b = {b} must be positive")));
    }
    if c == 8.0 {
        return Ok(1.0 / b);
    }
    let e = c / 8.0;
    Ok((1.0 - e) * b.powf(-e) * (8.0 / c - 1.0).powf(-e))
}

/// Location of the maximum of tᶜ/(1+bt⁸) for c < 8.
pub fn sup_power_ratio_argmax(c: f64, b: f64) -> f64 {
    b.powf(-0.125) * (8.0 / c - 1.0).powf(-0.125)
}

/// Smooth monotone step: 0 for t ≤ 0, 1 for t ≥ 1.
pub fn mollifier_eta(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else if t >= 1.0 {
        1.0
    } else {
        (-(1.0 / t) * (1.0 / (t - 1.0)).exp()).exp()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn j1_small_values() {
        assert_eq!(bessel_j1(0.0).unwrap(), 0.0);
        assert_eq!(j1_over_x(0.0).unwrap(), 0.5);
        let x = 1e-6;
        assert!((bessel_j1(x).unwrap() / x - 0.5).abs() < 1e-12);
        let direct = bessel_j1(1.0).unwrap();
        assert!((j1_over_x(1.0).unwrap() - direct).abs() < 1e-14);
    }

    #[test]
    fn j1_known_values() {
        // tabulated (Abramowitz & Stegun)
        let table = [
            (1.0, 0.440_050_585_744_933_5),
            (2.5, 0.497_094_102_464_274_6),
            (10.0, 0.043_472_746_168_861_41),
            (30.0, -0.118_751_062_616_623_05),
        ];
        for (x, v) in table {
            assert!((bessel_j1(x).unwrap() - v).abs() < 1e-13, "x = {x}");
        }
    }

    #[test]
    fn j1_continuous_at_cutoff() {
        let below = bessel_j1(SERIES_CUTOFF - 1e-12).unwrap();
        let above = bessel_j1(SERIES_CUTOFF).unwrap();
        assert!((below - above).abs() < 1e-12);
    }

    #[test]
    fn j1_rejects_nan() {
        assert!(bessel_j1(f64::NAN).is_err());
        assert!(j1_over_x(f64::INFINITY).is_err());
    }

    #[test]
    fn j1_over_x_bounded_by_half() {
        let mut x = 0.0;
        while x <= 1000.0 {
            assert!(j1_over_x(x).unwrap().abs() <= 0.5, "x = {x}");
            x += 0.01;
        }
    }

    #[test]
    fn weight_spec_b() {
        let spec = WeightSpec::new(0.5, 0.0).unwrap();
        assert_eq!(spec.b, 1296.0);
        let spec = WeightSpec::new(0.1, 0.0).unwrap();
        assert!((spec.b - (1.0f64 / 9.0).powi(4) * 1296.0).abs() < 1e-15);
        assert!(spec.b < 1.0);
        assert!(WeightSpec::new(1.0, 0.0).is_err());
        assert!(WeightSpec::new(0.0, 0.0).is_err());
        assert!(WeightSpec::new(0.3, -1.0).is_err());
    }

    #[test]
    fn weight_values() {
        let spec = WeightSpec::new(0.5, 0.0).unwrap();
        assert_eq!(weight_g(0.0, &spec).unwrap(), 1.0);
        let expected = 1297f64.sqrt() * 81f64.exp();
        let got = weight_g(1.0, &spec).unwrap();
        assert!((got / expected - 1.0).abs() < 1e-14);
        assert!((spec.ln_g(1.0) - expected.ln()).abs() < 1e-12);
        assert!(matches!(
            weight_g(2.0, &spec),
            Err(Error::WeightSaturated { .. })
        ));
        assert!(g_sq_antiderivative(1.5, &spec).is_err());
        assert_eq!(g_sq_antiderivative(0.0, &spec).unwrap(), 0.0);
    }

    #[test]
    fn sup_ratio_closed_forms() {
        assert!((sup_power_ratio(4.0, 1.0).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(sup_power_ratio(8.0, 3.0).unwrap(), 1.0 / 3.0);
        // c = 2, b = 1: maximum at t⁸ = 1/3, value (3/4)·3^{-1/4}
        assert!((sup_power_ratio(2.0, 1.0).unwrap() - 0.75 * 3f64.powf(-0.25)).abs() < 1e-15);
        assert!(sup_power_ratio(0.0, 1.0).is_err());
        assert!(sup_power_ratio(8.5, 1.0).is_err());
    }

    #[test]
    fn mollifier_values() {
        assert_eq!(mollifier_eta(-1.0), 0.0);
        assert_eq!(mollifier_eta(0.0), 0.0);
        assert_eq!(mollifier_eta(1.0), 1.0);
        assert_eq!(mollifier_eta(2.0), 1.0);
        let expected = (-2.0 * (-2.0f64).exp()).exp();
        assert!((mollifier_eta(0.5) - expected).abs() < 1e-15);
        let mut prev = 0.0;
        for k in 0..=1000 {
            let v = mollifier_eta(k as f64 / 1000.0);
            assert!(v >= prev);
            prev = v;
        }
    }
}
