//! Fixed-order quadrature rules shared by the operator and kernel modules.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Gauss–Legendre nodes and weights on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            // Tricomi initial guess, then Newton on P_n
            let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            weights[i] = w;
            nodes[n - 1 - i] = x;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    /// Nodes and weights mapped to [a, b].
    pub fn on_interval(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (mid + half * x, half * w))
    }

    pub fn integrate(&self, a: f64, b: f64, f: impl Fn(f64) -> f64) -> f64 {
        self.on_interval(a, b).map(|(x, w)| w * f(x)).sum()
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let pn = if n == 0 { 1.0 } else { p1 };
    let pm1 = if n == 0 { 0.0 } else { p0 };
    let d = n as f64 * (x * pn - pm1) / (x * x - 1.0);
    (pn, d)
}

/// Product rule on the unit sphere: Gauss–Legendre in cos θ, uniform in φ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SphereRuleSpec {
    pub polar: usize,
    pub azimuthal: usize,
}

/// Unit directions with weights summing to 4π.
#[derive(Debug, Clone)]
pub struct SphereRule {
    pub directions: Vec<[f64; 3]>,
    pub weights: Vec<f64>,
}

impl SphereRule {
    pub fn new(spec: SphereRuleSpec) -> Result<Self> {
        if spec.polar == 0 || spec.azimuthal == 0 {
            return Err(Error::Config("sphere rule orders must be positive".into()));
        }
        let gl = GaussLegendre::new(spec.polar);
        let dphi = 2.0 * PI / spec.azimuthal as f64;
        let mut directions = Vec::with_capacity(spec.polar * spec.azimuthal);
        let mut weights = Vec::with_capacity(spec.polar * spec.azimuthal);
        for (&ct, &w) in gl.nodes.iter().zip(&gl.weights) {
            let st = (1.0 - ct * ct).max(0.0).sqrt();
            for j in 0..spec.azimuthal {
                // half-step offset keeps the rule free of a preferred axis node
                let phi = (j as f64 + 0.5) * dphi;
                directions.push([st * phi.cos(), st * phi.sin(), ct]);
                weights.push(w * dphi);
            }
        }
        Ok(Self {
            directions,
            weights,
        })
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn integrate(&self, f: impl Fn([f64; 3]) -> f64) -> f64 {
        self.directions
            .iter()
            .zip(&self.weights)
            .map(|(&d, &w)| w * f(d))
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_exact_on_polynomials() {
        for n in 1..=20 {
            let gl = GaussLegendre::new(n);
            let wsum: f64 = gl.weights.iter().sum();
            assert!((wsum - 2.0).abs() < 1e-13, "n = {n}");
            for deg in 0..2 * n {
                let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
                let got = gl.integrate(-1.0, 1.0, |x| x.powi(deg as i32));
                assert!((got - exact).abs() < 1e-12, "n = {n}, deg = {deg}");
            }
        }
    }

    #[test]
    fn interval_mapping() {
        let gl = GaussLegendre::new(6);
        let got = gl.integrate(0.0, 2.0, |x| x * x * x);
        assert!((got - 4.0).abs() < 1e-13);
    }

    #[test]
    fn sphere_rule_low_harmonics() {
        let rule = SphereRule::new(SphereRuleSpec {
            polar: 6,
            azimuthal: 12,
        })
        .unwrap();
        let area = rule.integrate(|_| 1.0);
        assert!((area - 4.0 * PI).abs() < 1e-12);
        // Y_1m and Y_2m integrate to zero
        for f in [
            |d: [f64; 3]| d[0],
            |d: [f64; 3]| d[1],
            |d: [f64; 3]| d[2],
            |d: [f64; 3]| d[0] * d[1],
            |d: [f64; 3]| d[0] * d[2],
            |d: [f64; 3]| 3.0 * d[2] * d[2] - 1.0,
            |d: [f64; 3]| d[0] * d[0] - d[1] * d[1],
        ] {
            assert!(rule.integrate(f).abs() < 1e-12);
        }
        // ∫ z² dΩ = 4π/3
        assert!((rule.integrate(|d| d[2] * d[2]) - 4.0 * PI / 3.0).abs() < 1e-12);
    }

    #[test]
    fn sphere_rule_rejects_zero_order() {
        assert!(SphereRule::new(SphereRuleSpec {
            polar: 0,
            azimuthal: 4
        })
        .is_err());
    }
}
