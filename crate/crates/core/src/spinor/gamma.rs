//! Dirac-representation gamma matrices, signature (+,−,−,−).

use nalgebra::DMatrix;
use num_complex::Complex64;
use std::sync::OnceLock;

pub type Mat4 = [[Complex64; 4]; 4];

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Minkowski metric diagonal.
pub const METRIC: [f64; 4] = [1.0, -1.0, -1.0, -1.0];

/// The four gamma matrices γ^μ.
#[derive(Debug, Clone, PartialEq)]
pub struct GammaSet {
    pub gamma: [Mat4; 4],
    // each row of each γ^μ holds exactly one nonzero entry in this representation
    sparse: [[(usize, Complex64); 4]; 4],
}

impl GammaSet {
    /// Dirac representation: γ⁰ = diag(1,1,−1,−1), γʲ = [[0, σⱼ], [−σⱼ, 0]].
    pub fn dirac() -> Self {
        let sigma: [[[Complex64; 2]; 2]; 3] = [
            [[ZERO, ONE], [ONE, ZERO]],
            [[ZERO, -I], [I, ZERO]],
            [[ONE, ZERO], [ZERO, -ONE]],
        ];
        let mut gamma = [[[ZERO; 4]; 4]; 4];
        gamma[0][0][0] = ONE;
        gamma[0][1][1] = ONE;
        gamma[0][2][2] = -ONE;
        gamma[0][3][3] = -ONE;
        for (j, s) in sigma.iter().enumerate() {
            for r in 0..2 {
                for c in 0..2 {
                    gamma[j + 1][r][c + 2] = s[r][c];
                    gamma[j + 1][r + 2][c] = -s[r][c];
                }
            }
        }
        let mut sparse = [[(0, ZERO); 4]; 4];
        for mu in 0..4 {
            for r in 0..4 {
                let nz: Vec<usize> = (0..4).filter(|&c| gamma[mu][r][c] != ZERO).collect();
                assert_eq!(nz.len(), 1);
                sparse[mu][r] = (nz[0], gamma[mu][r][nz[0]]);
            }
        }
        Self { gamma, sparse }
    }

    /// Shared instance.
    pub fn standard() -> &'static GammaSet {
        static CELL: OnceLock<GammaSet> = OnceLock::new();
        CELL.get_or_init(GammaSet::dirac)
    }

    /// (column, value) of the single nonzero entry in row `row` of γ^μ.
    #[inline]
    pub fn entry(&self, mu: usize, row: usize) -> (usize, Complex64) {
        self.sparse[mu][row]
    }

    /// γ^μ v_μ for lower-index components v_μ.
    pub fn slash(&self, v: [Complex64; 4]) -> Mat4 {
        let mut out = [[ZERO; 4]; 4];
        for (mu, &vm) in v.iter().enumerate() {
            for (r, row) in out.iter_mut().enumerate() {
                let (c, g) = self.sparse[mu][r];
                row[c] += g * vm;
            }
        }
        out
    }

    /// Σ_{μν} (γ^μ ⊗ γ^ν) w[μ][ν], a 16×16 matrix on ℂ⁴⊗ℂ⁴ (particle 1 outer).
    pub fn double_slash(&self, w: [[Complex64; 4]; 4]) -> DMatrix<Complex64> {
        let mut out = DMatrix::from_element(16, 16, ZERO);
        for mu in 0..4 {
            for nu in 0..4 {
                let coef = w[mu][nu];
                if coef == ZERO {
                    continue;
                }
                for a in 0..4 {
                    let (ca, ga) = self.sparse[mu][a];
                    for b in 0..4 {
                        let (cb, gb) = self.sparse[nu][b];
                        out[(4 * a + b, 4 * ca + cb)] += ga * gb * coef;
                    }
                }
            }
        }
        out
    }
}

pub fn mat4_mul(a: &Mat4, b: &Mat4) -> Mat4 {
    let mut out = [[ZERO; 4]; 4];
    for r in 0..4 {
        for c in 0..4 {
            out[r][c] = (0..4).map(|k| a[r][k] * b[k][c]).sum();
        }
    }
    out
}

pub fn mat4_to_dmatrix(m: &Mat4) -> DMatrix<Complex64> {
    DMatrix::from_fn(4, 4, |r, c| m[r][c])
}

/// Operator 2-norm (largest singular value).
pub fn op_norm2(m: &DMatrix<Complex64>) -> f64 {
    m.clone()
        .singular_values()
        .iter()
        .cloned()
        .fold(0.0, f64::max)
}
