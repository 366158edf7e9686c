mod common;

use num_complex::Complex64;
use proptest::prelude::*;

use multitime::kernels::KernelSpec;
use multitime::operator::{apply_a_full, QuadratureConfig};
use multitime::spinor::{GridSpec, MultiTimeField, SPIN};

fn grid() -> GridSpec {
    GridSpec::new(0.9, 4, 1.5, 4).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn operator_is_linear(seed in 0u64..1000, re in -2.0f64..2.0, im in -2.0f64..2.0) {
        let g = grid();
        let masses = (0.5, 1.0);
        let k = KernelSpec::constant(Complex64::new(0.3, 0.1));
        let quad = QuadratureConfig::default();
        let psi = common::random_field(g, masses, seed);
        let phi = common::random_field(g, masses, seed + 1);
        let lam = Complex64::new(re, im);
        let mut combo = psi.scaled(lam);
        combo.axpy(Complex64::new(1.0, 0.0), &phi);
        let lhs = apply_a_full(&combo, &k, &quad).unwrap();
        let mut rhs = apply_a_full(&psi, &k, &quad).unwrap().scaled(lam);
        rhs.axpy(Complex64::new(1.0, 0.0), &apply_a_full(&phi, &k, &quad).unwrap());
        prop_assert!(lhs.max_abs_diff(&rhs) <= 1e-10 * rhs.max_abs().max(1.0));
    }

    #[test]
    fn later_data_never_reaches_earlier_output(seed in 0u64..1000, c1 in 0usize..3, c2 in 0usize..3) {
        let g = grid();
        let masses = (0.0, 0.7);
        let k = KernelSpec::constant_real(0.4);
        let quad = QuadratureConfig::default();
        let psi = common::random_field(g, masses, seed);
        let noise = common::random_field(g, masses, seed + 99);
        let mut perturbed = psi.clone();
        for n1 in 0..g.time_steps {
            for n2 in 0..g.time_steps {
                if n1 > c1 || n2 > c2 {
                    perturbed.set_slice(n1, n2, &noise.slice(n1, n2));
                }
            }
        }
        let a = apply_a_full(&psi, &k, &quad).unwrap();
        let b = apply_a_full(&perturbed, &k, &quad).unwrap();
        for n1 in 0..=c1 {
            for n2 in 0..=c2 {
                prop_assert!(a.slice(n1, n2) == b.slice(n1, n2), "slice ({}, {}) changed", n1, n2);
            }
        }
    }

    #[test]
    fn output_vanishes_at_initial_corner(seed in 0u64..1000, m1 in 0.0f64..1.5, m2 in 0.0f64..1.5) {
        let g = grid();
        let psi = common::random_field(g, (m1, m2), seed);
        let a = apply_a_full(&psi, &KernelSpec::constant_real(0.5), &QuadratureConfig::default()).unwrap();
        prop_assert!(a.slice(0, 0).iter().all(|v| *v == Complex64::new(0.0, 0.0)));
    }
}

#[test]
fn zero_kernel_gives_zero() {
    let g = grid();
    let psi = MultiTimeField::from_fn(g, (1.0, 1.0), |_, _| [Complex64::new(1.0, -1.0); SPIN]);
    let a = apply_a_full(&psi, &KernelSpec::zero(), &QuadratureConfig::default()).unwrap();
    assert_eq!(a.max_abs(), 0.0);
}

#[test]
fn quadrature_refinement_changes_little() {
    // smooth field: doubling every quadrature order moves the output by a
    // small fraction of its size
    let g = grid();
    let psi = common::gaussian_field(g, (0.5, 1.0), 0.5, 0.2);
    let k = KernelSpec::constant_real(0.3);
    let q0 = QuadratureConfig::default();
    let a0 = apply_a_full(&psi, &k, &q0).unwrap();
    let a1 = apply_a_full(&psi, &k, &q0.refined()).unwrap();
    let d = a0.max_abs_diff(&a1);
    assert!(d < 1e-2 * a1.max_abs(), "{d:.3e} vs {:.3e}", a1.max_abs());
}
