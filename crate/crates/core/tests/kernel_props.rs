use num_complex::Complex64;
use proptest::prelude::*;

use multitime::flrw::ScaleFactor;
use multitime::kernels::{eval_kernel, flrw_kernel, kernel_norm, KernelDomain, KernelSpec, NormSampling, Profile};

fn small_sampling() -> NormSampling {
    NormSampling {
        halton_points: 256,
        lattice_per_axis: 2,
        diagonal_points: 64,
        ..NormSampling::default()
    }
}

/// Rotation about a unit axis by an angle (Rodrigues).
fn rotate(v: [f64; 3], axis: [f64; 3], angle: f64) -> [f64; 3] {
    let n = (axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]).sqrt();
    let k = axis.map(|a| a / n);
    let (s, c) = angle.sin_cos();
    let dot = k[0] * v[0] + k[1] * v[1] + k[2] * v[2];
    let cross = [k[1] * v[2] - k[2] * v[1], k[2] * v[0] - k[0] * v[2], k[0] * v[1] - k[1] * v[0]];
    [0, 1, 2].map(|i| v[i] * c + cross[i] * s + k[i] * dot * (1.0 - c))
}

fn moved(x: [f64; 4], axis: [f64; 3], angle: f64, shift: [f64; 3]) -> [f64; 4] {
    let r = rotate([x[1], x[2], x[3]], axis, angle);
    [x[0], r[0] + shift[0], r[1] + shift[1], r[2] + shift[2]]
}

fn event() -> impl Strategy<Value = [f64; 4]> {
    (0.05f64..1.0, -1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0).prop_map(|(t, x, y, z)| [t, x, y, z])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn norm_is_homogeneous(re in -2.0f64..2.0, im in -2.0f64..2.0, sigma in 0.3f64..2.0) {
        let domain = KernelDomain { time_extent: 0.8, half_width: 1.0 };
        let k = KernelSpec::gaussian_difference(Complex64::new(0.2, 0.0), sigma).unwrap();
        let lam = Complex64::new(re, im);
        prop_assume!(lam.norm() > 1e-3);
        let a = kernel_norm(&k.scaled(lam), &domain, &small_sampling()).unwrap().norm_k;
        let b = lam.norm() * kernel_norm(&k, &domain, &small_sampling()).unwrap().norm_k;
        prop_assert!((a - b).abs() <= 1e-12 * b);
    }

    #[test]
    fn flrw_kernel_is_euclidean_invariant(
        x1 in event(), x2 in event(),
        axis in (-1.0f64..1.0, -1.0f64..1.0, 0.1f64..1.0),
        angle in 0.0f64..6.28,
        shift in (-2.0f64..2.0, -2.0f64..2.0, -2.0f64..2.0),
        power in 0u32..4,
    ) {
        let axis = [axis.0, axis.1, axis.2];
        let shift = [shift.0, shift.1, shift.2];
        for a in [ScaleFactor::linear(), ScaleFactor::quadratic()] {
            let k = flrw_kernel(Profile::PolyExp { kappa: 0.4, power }, a);
            let v = eval_kernel(&k, x1, x2).unwrap();
            let w = eval_kernel(&k, moved(x1, axis, angle, shift), moved(x2, axis, angle, shift)).unwrap();
            prop_assert!((v - w).norm() <= 1e-12 * v.norm().max(1.0), "{} vs {}", v, w);
        }
    }
}
