//! Reference numerics used by the self-test, written independently of the
//! core library's closed forms.

/// Panels of the initial composite Simpson pass.
const PANELS: usize = 16;

/// Adaptive Simpson quadrature of `f` on [a, b] to absolute tolerance `tol`.
/// Accuracy is capped at about 1e-12 relative to the integral, the level of
/// rounding noise in typical integrands.
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    let h = (b - a) / PANELS as f64;
    let panels: Vec<_> = (0..PANELS)
        .map(|k| {
            let (lo, hi) = (a + k as f64 * h, a + (k + 1) as f64 * h);
            let (fa, fm, fb) = (f(lo), f(0.5 * (lo + hi)), f(hi));
            (lo, hi, fa, fm, fb, h / 6.0 * (fa + 4.0 * fm + fb))
        })
        .collect();
    let scale: f64 = panels.iter().map(|p| p.5.abs()).sum();
    // refining below the noise floor never terminates
    let floor = 1e-12 * scale / PANELS as f64;
    let local = tol / PANELS as f64;
    panels
        .iter()
        .map(|&(lo, hi, fa, fm, fb, whole)| simpson_step(f, lo, hi, fa, fm, fb, whole, local, floor, 40))
        .sum()
}

#[allow(clippy::too_many_arguments)]
fn simpson_step(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    floor: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let diff = left + right - whole;
    if depth == 0 || diff.abs() <= 15.0 * tol.max(floor) {
        return left + right + diff / 15.0;
    }
    simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, 0.5 * floor, depth - 1)
        + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, 0.5 * floor, depth - 1)
}

/// Maximum of a unimodal `f` on [a, b] by golden-section search.
pub fn golden_section_max(f: &dyn Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > tol {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x).max(fc).max(fd))
}

/// sup over t > 0 of tᶜ/(1+bt⁸), searched in ln t on [10⁻⁴, 10⁴].
pub fn numeric_sup_power_ratio(c: f64, b: f64) -> f64 {
    let f = |s: f64| {
        let t = s.exp();
        t.powf(c) / (1.0 + b * t.powi(8))
    };
    golden_section_max(&f, (1e-4f64).ln(), (1e4f64).ln(), 1e-12).1
}

/// J₁ from its power series, Σ (−1)ᵏ (x/2)^{2k+1}/(k!(k+1)!), 50 terms.
pub fn bessel_j1_series(x: f64) -> f64 {
    let h = 0.5 * x;
    let mut term = h;
    let mut sum = term;
    for k in 1..50 {
        term *= -h * h / (k as f64 * (k + 1) as f64);
        sum += term;
    }
    sum
}

/// J₁(x)/x with the removable singularity filled in.
pub fn j1_over_x_series(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        0.5
    } else {
        bessel_j1_series(x) / x
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simpson_on_polynomials_and_exp() {
        let v = adaptive_simpson(&|x| x.powi(5), 0.0, 2.0, 1e-13);
        assert!((v - 64.0 / 6.0).abs() < 1e-11);
        let e = adaptive_simpson(&|x| x.exp(), 0.0, 1.0, 1e-14);
        assert!((e - (std::f64::consts::E - 1.0)).abs() < 1e-13);
    }

    #[test]
    fn golden_section_finds_parabola_peak() {
        // a smooth peak only pins x to about sqrt(eps)
        let (x, v) = golden_section_max(&|x| -(x - 0.3) * (x - 0.3) + 2.0, -1.0, 1.0, 1e-12);
        assert!((x - 0.3).abs() < 1e-7);
        assert!((v - 2.0).abs() < 1e-15);
    }

    #[test]
    fn golden_section_finds_kink_peak() {
        let (x, _) = golden_section_max(&|x| 2.0 - (x - 0.3).abs(), -1.0, 1.0, 1e-12);
        assert!((x - 0.3).abs() < 1e-11);
    }

    #[test]
    fn series_j1_small_values() {
        // J₁(1) = 0.44005058574493351596
        assert!((bessel_j1_series(1.0) - 0.440_050_585_744_933_5).abs() < 1e-15);
        assert_eq!(j1_over_x_series(0.0), 0.5);
    }
}
