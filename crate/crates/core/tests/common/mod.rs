//! Reference numerics shared by the integration tests.
#![allow(dead_code)]

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use multitime::spinor::{GridSpec, MultiTimeField, SPIN};

/// Adaptive Simpson on [a, b]; refinement stops at `tol` or at rounding
/// noise relative to the first estimate.
pub fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    const PANELS: usize = 32;
    let h = (b - a) / PANELS as f64;
    let mut total = 0.0;
    let mut pieces = Vec::with_capacity(PANELS);
    for k in 0..PANELS {
        let (lo, hi) = (a + k as f64 * h, a + (k + 1) as f64 * h);
        let (fa, fm, fb) = (f(lo), f(0.5 * (lo + hi)), f(hi));
        let whole = h / 6.0 * (fa + 4.0 * fm + fb);
        total += whole.abs();
        pieces.push((lo, hi, fa, fm, fb, whole));
    }
    let floor = 1e-13 * total / PANELS as f64;
    pieces
        .into_iter()
        .map(|(lo, hi, fa, fm, fb, whole)| step(f, lo, hi, fa, fm, fb, whole, tol / PANELS as f64, floor, 40))
        .sum()
}

#[allow(clippy::too_many_arguments)]
fn step(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, floor: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let (flm, frm) = (f(0.5 * (a + m)), f(0.5 * (m + b)));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let diff = left + right - whole;
    if depth == 0 || diff.abs() <= 15.0 * tol.max(floor) {
        return left + right + diff / 15.0;
    }
    step(f, a, m, fa, flm, fm, left, 0.5 * tol, 0.5 * floor, depth - 1)
        + step(f, m, b, fm, frm, fb, right, 0.5 * tol, 0.5 * floor, depth - 1)
}

/// Maximum of a unimodal function by golden-section search.
pub fn golden_max(f: &dyn Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let (mut c, mut d) = (b - r * (b - a), a + r * (b - a));
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > tol {
        if fc > fd {
            (b, d, fd) = (d, c, fc);
            c = b - r * (b - a);
            fc = f(c);
        } else {
            (a, c, fc) = (c, d, fd);
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x).max(fc).max(fd))
}

/// Field with independent uniform entries in the unit square.
pub fn random_field(grid: GridSpec, masses: (f64, f64), seed: u64) -> MultiTimeField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values = (0..grid.len())
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    MultiTimeField::from_values(grid, masses, values).unwrap()
}

/// Smooth product Gaussian in both particles, decaying well inside the box.
pub fn gaussian_field(grid: GridSpec, masses: (f64, f64), width: f64, phase: f64) -> MultiTimeField {
    MultiTimeField::from_fn(grid, masses, |x1, x2| {
        let r2: f64 = x1[1..].iter().chain(&x2[1..]).map(|v| v * v).sum();
        let e = (-r2 / (2.0 * width * width)).exp();
        let mut out = [Complex64::new(0.0, 0.0); SPIN];
        for (s, o) in out.iter_mut().enumerate() {
            *o = Complex64::from_polar(e * (1.0 + 0.1 * s as f64), phase * (s as f64 + x1[0] - x2[0]));
        }
        out
    })
}
