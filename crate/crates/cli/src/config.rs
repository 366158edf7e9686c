//! Run configuration, read from TOML.
//!
//! ```toml
//! output_dir = "out/demo"
//! seed = 7
//! threads = 4
//!
//! [grid]
//! time_extent = 1.0
//! time_steps = 6
//! half_width = 2.0
//! spatial_points = 6
//!
//! [masses]
//! m1 = 0.0
//! m2 = 0.0
//!
//! [kernel]
//! family = "constant"
//! kappa = 0.3
//!
//! [solve]
//! mode = "neumann"
//! max_iterations = 40
//! residual_tolerance = 1e-6
//!
//! [weight]
//! norm_k = 0.5
//!
//! [free]
//! kind = "packet"
//! particle1 = { center = [0.0, 0.0, 0.0], width = 0.5, momentum = [0.0, 0.0, 0.0], spin_index = 1 }
//! particle2 = { center = [0.0, 0.0, 0.0], width = 0.5, momentum = [0.0, 0.0, 0.0], spin_index = 1 }
//! ```
//!
//! `[quadrature]`, `[norm_sampling]`, `[weight]` and `[flrw]` are optional.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};

use multitime::flrw::{ScaleFactor, ScaleFamily};
use multitime::freedirac::{packet_cauchy_data, plane_wave_sum, propagate_cauchy, GaussianPacket, PlaneWaveSpec};
use multitime::kernels::{KernelSpec, NormSampling, Profile};
use multitime::operator::QuadratureConfig;
use multitime::solver::SolveMode;
use multitime::spinor::{GridSpec, MultiTimeField};
use multitime::Error;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub output_dir: PathBuf,
    #[serde(default)]
    pub seed: u64,
    /// Worker threads for the numeric kernels; 0 lets rayon decide.
    #[serde(default)]
    pub threads: usize,
    pub grid: GridConfig,
    #[serde(default)]
    pub masses: MassConfig,
    pub kernel: KernelConfig,
    #[serde(default)]
    pub quadrature: QuadratureConfig,
    #[serde(default)]
    pub norm_sampling: NormSampling,
    pub solve: SolveSection,
    #[serde(default)]
    pub weight: WeightSection,
    pub free: FreeConfig,
    pub flrw: Option<FlrwSection>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub time_extent: f64,
    pub time_steps: usize,
    pub half_width: f64,
    pub spatial_points: usize,
}

impl GridConfig {
    pub fn build(&self) -> Result<GridSpec, Error> {
        GridSpec::new(self.time_extent, self.time_steps, self.half_width, self.spatial_points)
    }
}

#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MassConfig {
    pub m1: f64,
    pub m2: f64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum KernelConfig {
    Zero,
    Constant {
        kappa: f64,
        #[serde(default)]
        kappa_im: f64,
    },
    GaussianDifference {
        kappa: f64,
        #[serde(default)]
        kappa_im: f64,
        sigma: f64,
    },
    /// κ dⁿ e^{−d} of the covariant distance for the scale factor in `[flrw]`.
    FlrwProfile { kappa: f64, power: u32 },
}

impl KernelConfig {
    /// `scale` is required by the FLRW profile family only.
    pub fn build(&self, scale: Option<&ScaleFactor>) -> Result<KernelSpec, Error> {
        match *self {
            KernelConfig::Zero => Ok(KernelSpec::zero()),
            KernelConfig::Constant { kappa, kappa_im } => Ok(KernelSpec::constant(Complex64::new(kappa, kappa_im))),
            KernelConfig::GaussianDifference { kappa, kappa_im, sigma } => {
                KernelSpec::gaussian_difference(Complex64::new(kappa, kappa_im), sigma)
            }
            KernelConfig::FlrwProfile { kappa, power } => {
                let a = scale.ok_or_else(|| Error::Config("kernel family flrw_profile needs an [flrw] section".into()))?;
                Ok(KernelSpec::flrw(Profile::PolyExp { kappa, power }, a.clone()))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolveSection {
    pub mode: SolveMode,
    pub max_iterations: usize,
    pub residual_tolerance: f64,
}

#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightSection {
    /// Overrides the sampled kernel norm.
    pub norm_k: Option<f64>,
    /// Defaults to max(m1, m2).
    pub mu: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlaneWaveConfig {
    pub momentum: [f64; 3],
    pub spin_index: u8,
    #[serde(default = "one")]
    pub amplitude: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FreeConfig {
    Packet {
        particle1: GaussianPacket,
        particle2: GaussianPacket,
    },
    PlaneWave {
        particle1: PlaneWaveConfig,
        particle2: PlaneWaveConfig,
    },
}

impl FreeConfig {
    pub fn build(&self, grid: GridSpec, masses: (f64, f64)) -> Result<MultiTimeField, Error> {
        match self {
            FreeConfig::Packet { particle1, particle2 } => {
                let data = packet_cauchy_data(particle1, particle2, masses, grid)?;
                propagate_cauchy(&data, masses, grid)
            }
            FreeConfig::PlaneWave { particle1, particle2 } => {
                let s1 = PlaneWaveSpec::new(particle1.momentum, particle1.spin_index, masses.0)?
                    .with_amplitude(Complex64::new(particle1.amplitude, 0.0));
                let s2 = PlaneWaveSpec::new(particle2.momentum, particle2.spin_index, masses.1)?
                    .with_amplitude(Complex64::new(particle2.amplitude, 0.0));
                Ok(plane_wave_sum(&[(s1, s2)], grid)?.field)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlrwSection {
    pub scale: ScaleFamily,
    pub alpha: f64,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, Error> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, Error> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn validate(&self) -> Result<(), Error> {
        self.grid.build()?;
        self.quadrature.validate()?;
        let MassConfig { m1, m2 } = self.masses;
        if !(m1 >= 0.0 && m2 >= 0.0 && m1.is_finite() && m2.is_finite()) {
            return Err(Error::Config(format!("masses ({m1}, {m2}) must be finite and >= 0")));
        }
        if let KernelConfig::FlrwProfile { .. } = self.kernel {
            if self.flrw.is_none() {
                return Err(Error::Config("kernel family flrw_profile needs an [flrw] section".into()));
            }
        }
        Ok(())
    }

    pub fn masses(&self) -> (f64, f64) {
        (self.masses.m1, self.masses.m2)
    }

    /// SHA-256 of the canonical JSON form, so formatting and key order in the
    /// TOML file do not change it.
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_vec(self).expect("config serializes");
        let digest = Sha256::digest(&canonical);
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = r#"
output_dir = "out"
[grid]
time_extent = 1.0
time_steps = 4
half_width = 2.0
spatial_points = 4
[kernel]
family = "constant"
kappa = 0.3
[solve]
mode = "neumann"
max_iterations = 10
residual_tolerance = 1e-6
[free]
kind = "plane_wave"
particle1 = { momentum = [0.0, 0.0, 0.0], spin_index = 1 }
particle2 = { momentum = [0.0, 0.0, 0.0], spin_index = 1 }
"#;

    #[test]
    fn parses_minimal_config_with_defaults() {
        let cfg = RunConfig::from_toml(BASE).unwrap();
        assert_eq!(cfg.seed, 0);
        assert_eq!(cfg.quadrature, QuadratureConfig::default());
        assert!(cfg.weight.norm_k.is_none());
        assert!(matches!(cfg.kernel, KernelConfig::Constant { kappa, .. } if kappa == 0.3));
    }

    #[test]
    fn hash_ignores_formatting() {
        let a = RunConfig::from_toml(BASE).unwrap();
        let b = RunConfig::from_toml(&BASE.replace("kappa = 0.3", "kappa   =   0.30")).unwrap();
        assert_eq!(a.hash(), b.hash());
        let c = RunConfig::from_toml(&BASE.replace("kappa = 0.3", "kappa = 0.31")).unwrap();
        assert_ne!(a.hash(), c.hash());
    }

    #[test]
    fn rejects_unknown_family_and_keys() {
        assert!(RunConfig::from_toml(&BASE.replace("\"constant\"", "\"yukawa\"")).is_err());
        assert!(RunConfig::from_toml(&format!("{BASE}\n[extra]\nx = 1\n")).is_err());
        let small = BASE.replace("spatial_points = 4", "spatial_points = 3");
        assert!(matches!(RunConfig::from_toml(&small), Err(Error::Config(_))));
    }

    #[test]
    fn flrw_profile_needs_flrw_section() {
        let text = BASE.replace("family = \"constant\"\nkappa = 0.3", "family = \"flrw_profile\"\nkappa = 0.3\npower = 2");
        assert!(RunConfig::from_toml(&text).is_err());
        let with = format!("{text}\n[flrw]\nalpha = 1.0\nscale = {{ family = \"linear\" }}\n");
        let cfg = RunConfig::from_toml(&with).unwrap();
        let a = ScaleFactor::from_family(cfg.flrw.unwrap().scale).unwrap();
        assert!(cfg.kernel.build(Some(&a)).is_ok());
    }
}
