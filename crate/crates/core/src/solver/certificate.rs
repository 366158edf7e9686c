//! Closed-form bound on ‖A‖ in the weighted norm.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::specialfun::WeightSpec;

/// The five-term operator-norm bound and its collapsed forms.
///
/// Each term is ‖K‖ times a coefficient times sup tᶜ/(1+bt⁸):
/// 1, 8·sup t⁴, (μ⁴/18)·sup t⁸, 8·sup t², (2μ⁴/9)·sup t⁶. A commonly
/// quoted form evaluates the c = 2 and c = 6 maxima with the factor c/8 where
/// the true maximum carries 1 − c/8; `quoted_terms` keeps those values for
/// comparison.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub norm_k: f64,
    pub mu: f64,
    pub b: f64,
    /// ‖K‖, 4‖K‖b^{−1/2}, μ⁴‖K‖/(18b), 6‖K‖(3b)^{−1/4}, μ⁴‖K‖/(6(3b³)^{1/4}).
    pub terms: [f64; 5],
    /// Sum of `terms`; an upper bound for every b > 0.
    pub sum: f64,
    /// ‖K‖ + ‖K‖b^{−1/4}(4 + μ⁴/18 + 6·3^{−1/4} + μ⁴/(6·3^{1/4})); bounds
    /// `sum` when b ≥ 1.
    pub collapsed: Option<f64>,
    /// ‖K‖, 4‖K‖b^{−1/2}, μ⁴‖K‖/(18b), 2‖K‖(3b)^{−1/4}, μ⁴‖K‖/(2(3b³)^{1/4}).
    pub quoted_terms: [f64; 5],
    pub quoted_sum: f64,
    /// ‖K‖ + ‖K‖(6+μ⁴)b^{−1/4}, which equals 1 for this b; reported when b ≥ 1.
    pub quoted_bound: Option<f64>,
    pub b_ge_one: bool,
}

impl Certificate {
    /// Whether the exact sum certifies a contraction.
    pub fn is_contraction(&self) -> bool {
        self.sum < 1.0
    }
}

/// Evaluates the bound chain for weight parameters (‖K‖, μ).
pub fn contraction_certificate(norm_k: f64, mu: f64) -> Result<Certificate> {
    let spec = WeightSpec::new(norm_k, mu)?;
    Ok(certificate_for(&spec))
}

pub fn certificate_for(spec: &WeightSpec) -> Certificate {
    let (k, mu, b) = (spec.norm_k, spec.mu, spec.b);
    let mu4 = mu.powi(4);
    let terms = [
        k,
        4.0 * k / b.sqrt(),
        mu4 * k / (18.0 * b),
        6.0 * k / (3.0 * b).powf(0.25),
        mu4 * k / (6.0 * (3.0 * b.powi(3)).powf(0.25)),
    ];
    let quoted_terms = [
        k,
        4.0 * k / b.sqrt(),
        mu4 * k / (18.0 * b),
        2.0 * k / (3.0 * b).powf(0.25),
        mu4 * k / (2.0 * (3.0 * b.powi(3)).powf(0.25)),
    ];
    let sum = terms.iter().sum();
    let b_ge_one = b >= 1.0;
    let root3 = 3f64.powf(0.25);
    let collapsed = b_ge_one.then(|| k + k * b.powf(-0.25) * (4.0 + mu4 / 18.0 + 6.0 / root3 + mu4 / (6.0 * root3)));
    Certificate {
        norm_k: k,
        mu,
        b,
        terms,
        sum,
        collapsed,
        quoted_terms,
        quoted_sum: quoted_terms.iter().sum(),
        quoted_bound: b_ge_one.then(|| k + k * (6.0 + mu4) * b.powf(-0.25)),
        b_ge_one,
    }
}
