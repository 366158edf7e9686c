mod common;

use num_complex::Complex64;
use proptest::prelude::*;

use multitime::freedirac::{packet_cauchy_data, plane_wave_field, propagate_cauchy, CauchyData, GaussianPacket, PlaneWaveSpec};
use multitime::specialfun::WeightSpec;
use multitime::spinor::field::{slice_discrete_l2_sq, slice_l2_sq};
use multitime::spinor::{bracket_table, weighted_norm, GridSpec};

fn spread(v: &[f64]) -> f64 {
    let max = v.iter().cloned().fold(0.0, f64::max);
    let min = v.iter().cloned().fold(f64::INFINITY, f64::min);
    max / min - 1.0
}

#[test]
fn packet_l2_matches_gaussian_moment() {
    // ∫ exp(−|x|²/w²) d³x = (πw²)^{3/2} per particle
    let grid = GridSpec::new(0.5, 3, 3.5, 8).unwrap();
    let w = 1.0;
    let p = GaussianPacket {
        center: [0.0, 0.0, 0.5],
        width: w,
        momentum: [0.3, 0.0, 0.0],
        spin_index: 1,
    };
    let masses = (1.0, 0.5);
    let data = packet_cauchy_data(&p, &p, masses, grid).unwrap();
    let u1: f64 = p.value(masses.0, p.center).unwrap().iter().map(|c| c.norm_sqr()).sum();
    let u2: f64 = p.value(masses.1, p.center).unwrap().iter().map(|c| c.norm_sqr()).sum();
    let moment = (std::f64::consts::PI * w * w).powi(3) * u1 * u2;
    let got = slice_l2_sq(&grid, &data.values);
    assert!((got / moment - 1.0).abs() < 1e-3, "{got} vs {moment}");
}

#[test]
fn plane_wave_bracket_is_constant() {
    // lowest box mode, so the finite differences see a smooth wave
    let grid = GridSpec::new(0.5, 6, 2.0, 6).unwrap();
    let k = 2.0 * std::f64::consts::PI / (6.0 * grid.dx());
    for m in [0.0, 1.0] {
        let s1 = PlaneWaveSpec::new([k, 0.0, 0.0], 1, m).unwrap();
        let s2 = PlaneWaveSpec::new([0.0, k, 0.0], 2, m).unwrap();
        let f = plane_wave_field(&s1, &s2, grid).unwrap().field;
        let t = bracket_table(&f).unwrap();
        let v: Vec<f64> = t.squared.iter().map(|x| x.sqrt()).collect();
        assert!(spread(&v) < 0.02, "m={m}: spread {}", spread(&v));
    }
}

#[test]
fn propagation_conserves_discrete_l2() {
    let grid = GridSpec::new(0.6, 4, 2.0, 6).unwrap();
    let psi = common::random_field(grid, (0.7, 0.0), 3);
    let data = CauchyData::from_field(&psi);
    let out = propagate_cauchy(&data, psi.masses, grid).unwrap();
    let n0 = slice_discrete_l2_sq(&grid, &data.values);
    for n1 in 0..4 {
        for n2 in 0..4 {
            let n = slice_discrete_l2_sq(&grid, &out.slice(n1, n2));
            assert!((n / n0 - 1.0).abs() < 1e-12);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn weighted_norm_is_homogeneous(seed in 0u64..1000, re in -3.0f64..3.0, im in -3.0f64..3.0) {
        let grid = GridSpec::new(0.8, 3, 1.5, 4).unwrap();
        let spec = WeightSpec::new(0.3, 0.5).unwrap();
        let psi = common::random_field(grid, (0.0, 0.0), seed);
        let lam = Complex64::new(re, im);
        let a = weighted_norm(&psi.scaled(lam), &spec).unwrap();
        let b = lam.norm() * weighted_norm(&psi, &spec).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * b.max(1e-300));
    }

    #[test]
    fn weighted_norm_triangle(seed in 0u64..1000) {
        let grid = GridSpec::new(0.8, 3, 1.5, 4).unwrap();
        let spec = WeightSpec::new(0.3, 0.5).unwrap();
        let psi = common::random_field(grid, (0.0, 0.0), seed);
        let phi = common::random_field(grid, (0.0, 0.0), seed + 7919);
        let sum = weighted_norm(&psi.add(&phi), &spec).unwrap();
        let parts = weighted_norm(&psi, &spec).unwrap() + weighted_norm(&phi, &spec).unwrap();
        prop_assert!(sum <= parts + 1e-10);
    }

    #[test]
    fn propagation_is_linear(seed in 0u64..1000, re in -2.0f64..2.0, im in -2.0f64..2.0) {
        let grid = GridSpec::new(0.6, 3, 2.0, 4).unwrap();
        let masses = (0.5, 1.0);
        let a = CauchyData::from_field(&common::random_field(grid, masses, seed));
        let b = CauchyData::from_field(&common::random_field(grid, masses, seed + 1));
        let lam = Complex64::new(re, im);
        let combo = CauchyData::new(grid, a.values.iter().zip(&b.values).map(|(x, y)| lam * x + y).collect()).unwrap();
        let pa = propagate_cauchy(&a, masses, grid).unwrap();
        let pb = propagate_cauchy(&b, masses, grid).unwrap();
        let pc = propagate_cauchy(&combo, masses, grid).unwrap();
        let mut expect = pa.scaled(lam);
        expect.axpy(Complex64::new(1.0, 0.0), &pb);
        prop_assert!(pc.max_abs_diff(&expect) <= 1e-12 * expect.max_abs());
    }
}
