mod common;

use proptest::prelude::*;

use multitime::specialfun::{
    bessel_j1, g_sq_antiderivative, j1_over_x, sup_power_ratio, sup_power_ratio_argmax, weight_g, WeightSpec,
};

/// Σ (−1)ᵏ (x/2)^{2k+1}/(k!(k+1)!), summed until the terms underflow.
fn j1_series(x: f64) -> f64 {
    let h = 0.5 * x;
    let (mut term, mut sum) = (h, h);
    for k in 1..80 {
        term *= -h * h / (k as f64 * (k + 1) as f64);
        sum += term;
    }
    sum
}

/// Weight with the given b, for tests that pick b directly.
fn spec_with_b(b: f64) -> WeightSpec {
    let mut s = WeightSpec::new(0.5, 0.0).unwrap();
    s.b = b;
    s
}

#[test]
fn j1_over_x_bounded_on_dense_grid() {
    for k in 0..=200_000 {
        let x = k as f64 * 0.005;
        let v = j1_over_x(x).unwrap();
        assert!(v.abs() <= 0.5, "J1(x)/x = {v} at x = {x}");
    }
}

#[test]
fn antiderivative_matches_quadrature_at_pinned_points() {
    // the integrand is g²(τ)/g²(t), written through logs so that b = 1296
    // never overflows; the closed form is then t/(1+bt⁸)
    for b in [1.0, 1296.0] {
        for t in [0.25, 0.5, 1.0, 2.0] {
            let base = 1.0 + b * f64::powi(t, 8);
            let ratio = |tau: f64| {
                let d8: f64 = (0..8).map(|k| tau.powi(k) * t.powi(7 - k)).sum::<f64>() * (tau - t);
                ((b * d8 / base).ln_1p() + b * d8 / 8.0).exp()
            };
            let slope = 8.0 * b * t.powi(7) / base + b * t.powi(7);
            let split = (t - 40.0 / slope).max(0.0);
            let num = common::simpson(&ratio, 0.0, split, 1e-15) + common::simpson(&ratio, split, t, 1e-15);
            let closed = t / base;
            assert!((num - closed).abs() <= 1e-10 * closed, "t={t} b={b}: {num} vs {closed}");
            if b * t.powi(8) / 16.0 < 700.0 {
                let spec = spec_with_b(b);
                let g = weight_g(t, &spec).unwrap();
                let full = g_sq_antiderivative(t, &spec).unwrap();
                assert!((full - closed * g * g).abs() <= 1e-12 * full);
            }
        }
    }
}

proptest! {
    #[test]
    fn j1_agrees_with_series(x in 0.0f64..12.0) {
        let a = bessel_j1(x).unwrap();
        let s = j1_series(x);
        prop_assert!((a - s).abs() < 1e-12, "x={} {} vs {}", x, a, s);
    }

    #[test]
    fn weight_is_one_at_zero_and_increasing(b in 0.01f64..2000.0, t1 in 0.0f64..1.2, dt in 1e-6f64..0.3) {
        let spec = spec_with_b(b);
        prop_assert_eq!(weight_g(0.0, &spec).unwrap(), 1.0);
        let t2 = t1 + dt;
        prop_assume!(b * t2.powi(8) / 16.0 < 700.0);
        prop_assert!(weight_g(t2, &spec).unwrap() > weight_g(t1, &spec).unwrap());
    }

    #[test]
    fn antiderivative_derivative_is_g_squared(b in 0.05f64..50.0, t in 0.1f64..1.1) {
        let spec = spec_with_b(b);
        // fourth-order central difference
        let h = 1e-4 * t;
        let f = |s: f64| g_sq_antiderivative(s, &spec).unwrap();
        let d = (8.0 * (f(t + h) - f(t - h)) - (f(t + 2.0 * h) - f(t - 2.0 * h))) / (12.0 * h);
        let g = weight_g(t, &spec).unwrap();
        prop_assert!((d - g * g).abs() <= 1e-8 * g * g);
    }

    #[test]
    fn sup_dominates_random_points(c in 0.5f64..8.0, b in 0.01f64..2000.0, seed in 0u64..u64::MAX) {
        use rand::{Rng, SeedableRng};
        let sup = sup_power_ratio(c, b).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..10_000 {
            let t = (rng.gen_range(-8.0f64..8.0)).exp();
            let v = t.powf(c) / (1.0 + b * t.powi(8));
            prop_assert!(v <= sup * (1.0 + 1e-12), "t={} v={} sup={}", t, v, sup);
        }
        let t = sup_power_ratio_argmax(c, b);
        let at = t.powf(c) / (1.0 + b * t.powi(8));
        prop_assert!((at - sup).abs() <= 1e-6 * sup);
    }

    #[test]
    fn sup_matches_golden_section(c in 0.5f64..7.9, b in 0.01f64..2000.0) {
        let f = |s: f64| {
            let t = s.exp();
            t.powf(c) / (1.0 + b * t.powi(8))
        };
        let (_, num) = common::golden_max(&f, -12.0, 12.0, 1e-12);
        let closed = sup_power_ratio(c, b).unwrap();
        prop_assert!((num - closed).abs() <= 1e-8 * closed.max(1e-300), "{} vs {}", num, closed);
    }
}
