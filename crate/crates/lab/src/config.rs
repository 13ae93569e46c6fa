//! Experiment configuration (TOML).
//!
//! Every section has defaults, so a config file only needs `kind`. Unknown
//! keys anywhere are rejected. The fully resolved config is echoed into the
//! run manifest.

use std::path::PathBuf;

use kolmo_core::ThickSetDescriptor;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Propagate,
    DecayCheck,
    Thickness,
    SpectralFit,
    InterpVerify,
    Telescope,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 6] = [
        ExperimentKind::Propagate,
        ExperimentKind::DecayCheck,
        ExperimentKind::Thickness,
        ExperimentKind::SpectralFit,
        ExperimentKind::InterpVerify,
        ExperimentKind::Telescope,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Propagate => "propagate",
            ExperimentKind::DecayCheck => "decay-check",
            ExperimentKind::Thickness => "thickness",
            ExperimentKind::SpectralFit => "spectral-fit",
            ExperimentKind::InterpVerify => "interp-verify",
            ExperimentKind::Telescope => "telescope",
        }
    }

    /// Built-in example config for this kind.
    pub fn preset(self) -> &'static str {
        match self {
            ExperimentKind::Propagate => include_str!("../configs/propagate.toml"),
            ExperimentKind::DecayCheck => include_str!("../configs/decay-check.toml"),
            ExperimentKind::Thickness => include_str!("../configs/thickness.toml"),
            ExperimentKind::SpectralFit => include_str!("../configs/spectral-fit.toml"),
            ExperimentKind::InterpVerify => include_str!("../configs/interp-verify.toml"),
            ExperimentKind::Telescope => include_str!("../configs/telescope.toml"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub plots: bool,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub data: DataConfig,
    #[serde(default = "default_set")]
    pub set: ThickSetDescriptor,
    #[serde(default)]
    pub time: TimeConfig,
    #[serde(default)]
    pub constants: ConstantsConfig,
    #[serde(default)]
    pub thickness: ThicknessConfig,
    #[serde(default)]
    pub spectral: SpectralConfig,
    #[serde(default)]
    pub quadrature: QuadratureConfig,
    #[serde(default)]
    pub propagate: PropagateConfig,
}

fn default_set() -> ThickSetDescriptor {
    ThickSetDescriptor::lattice_balls(2, 1.0, 0.3)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub d: usize,
    pub points: usize,
    pub half_width: f64,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig { d: 1, points: 128, half_width: 8.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case", deny_unknown_fields)]
pub enum DataConfig {
    /// `sets` random mixtures of `terms` Gaussians each, drawn from
    /// ChaCha8 streams `1..=sets` of the run seed.
    Random { sets: usize, terms: usize, d: usize },
    /// One explicit mixture.
    Mixture { d: usize, terms: Vec<TermConfig> },
    /// A phase-field snapshot (grid backend only).
    Snapshot { path: PathBuf },
}

impl Default for DataConfig {
    fn default() -> Self {
        DataConfig::Random { sets: 5, terms: 2, d: 1 }
    }
}

/// Phase-space Gaussian `a·exp(−½(z−z₀)ᵀP(z−z₀) + i k₀·z)`. Give either
/// `width` (isotropic, `P = I/width²`) or a row-major `precision`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermConfig {
    #[serde(default = "unit_amplitude")]
    pub amplitude: [f64; 2],
    pub center: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub width: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub precision: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wave: Option<Vec<f64>>,
}

fn unit_amplitude() -> [f64; 2] {
    [1.0, 0.0]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TimeConfig {
    #[serde(rename = "T")]
    pub t: Vec<f64>,
    pub alpha: Vec<f64>,
    #[serde(rename = "N")]
    pub n: Vec<f64>,
    pub lambda: f64,
    /// Horizon of the time set `E ⊂ (0, horizon)`.
    pub horizon: f64,
    #[serde(rename = "E")]
    pub e: Vec<[f64; 2]>,
    /// Horizons for the `E = (0, T)` constant audit; empty skips it.
    #[serde(rename = "audit_T")]
    pub audit_t: Vec<f64>,
}

impl Default for TimeConfig {
    fn default() -> Self {
        TimeConfig {
            t: vec![0.25, 1.0, 4.0],
            alpha: vec![0.25, 0.5, 0.75],
            n: vec![0.0, 1.0, 2.0, 4.0],
            lambda: kolmo_core::telescope::DEFAULT_LAMBDA,
            horizon: 1.0,
            e: vec![[0.0, 0.5], [0.75, 1.0]],
            audit_t: Vec::new(),
        }
    }
}

/// Overrides for the decay constants and the spectral constant. Missing
/// decay constants take the explicit values for the data dimension; a
/// missing `c1` is fitted from the `[spectral]` section.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstantsConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c_exponent: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c_pointwise: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c3: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c1: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ThicknessConfig {
    pub r: f64,
    /// Checked against the set if present; the minimal `δ` is always reported.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    pub sampling_step: f64,
    /// Export the set as a mask on `[grid]` (axes `2·grid.d`).
    #[serde(default)]
    pub export_mask: bool,
}

impl Default for ThicknessConfig {
    fn default() -> Self {
        ThicknessConfig { r: 0.25, delta: None, sampling_step: 1e-2, export_mask: false }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpectralConfig {
    /// Grid for the band-limited samples (`d` follows the data).
    pub points: usize,
    pub half_width: f64,
    #[serde(rename = "N")]
    pub n: Vec<f64>,
    pub random_samples: usize,
    pub random_bumps: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lattice_spacing: Option<f64>,
}

impl Default for SpectralConfig {
    fn default() -> Self {
        SpectralConfig {
            points: 64,
            half_width: std::f64::consts::PI,
            n: vec![1.0, 2.0, 4.0, 6.0],
            random_samples: 16,
            random_bumps: 16,
            lattice_spacing: Some(0.5),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuadratureConfig {
    pub panel_width: f64,
    pub order: usize,
    pub tolerance: f64,
    pub max_spacing: f64,
    pub max_points: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        let t = kolmo_core::telescope::TimeQuadrature::default();
        let v = kolmo_core::lab::VerifyOptions::default();
        QuadratureConfig {
            panel_width: t.panel_width,
            order: t.order,
            tolerance: t.tolerance,
            max_spacing: v.max_spacing,
            max_points: v.max_points,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PropagateConfig {
    /// Finite-difference steps at the finest `T`; `0` skips the reference
    /// solve. Only used for `d = 1`.
    pub fd_steps: usize,
    /// Drop the boundary-energy guard (the grid is treated as a torus).
    pub periodic: bool,
    pub dump_snapshots: bool,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, String> {
        let value: toml::Table = toml::from_str(text).map_err(|e| e.to_string())?;
        // serde lets extra keys through on the unit variant
        if let Some(toml::Value::Table(set)) = value.get("set") {
            if set.get("kind").and_then(|k| k.as_str()) == Some("full_space") {
                if let Some(key) = set.keys().find(|k| *k != "kind") {
                    return Err(format!("set: unknown field `{key}` for kind `full_space`"));
                }
            }
        }
        let config: ExperimentConfig = value.try_into().map_err(|e: toml::de::Error| e.to_string())?;
        config.validate()?;
        Ok(config)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Dimension `d` of the initial data.
    pub fn data_dimension(&self) -> Option<usize> {
        match &self.data {
            DataConfig::Random { d, .. } | DataConfig::Mixture { d, .. } => Some(*d),
            DataConfig::Snapshot { .. } => None,
        }
    }

    /// Checks that go beyond the schema: ranges and cross-field consistency.
    pub fn validate(&self) -> Result<(), String> {
        fn positive(name: &str, xs: &[f64]) -> Result<(), String> {
            match xs.iter().find(|x| !(**x > 0.0) || !x.is_finite()) {
                Some(x) => Err(format!("{name}: every entry must be finite and > 0, got {x}")),
                None => Ok(()),
            }
        }
        match &self.data {
            DataConfig::Random { sets, terms, d } => {
                if *sets == 0 || *terms == 0 {
                    return Err("data: `sets` and `terms` must be ≥ 1".into());
                }
                if !(1..=2).contains(d) {
                    return Err(format!("data: d must be 1 or 2, got {d}"));
                }
            }
            DataConfig::Mixture { d, terms } => {
                if terms.is_empty() {
                    return Err("data: mixture needs at least one term".into());
                }
                for (i, t) in terms.iter().enumerate() {
                    if t.center.len() != 2 * d {
                        return Err(format!("data.terms[{i}]: center needs {} entries", 2 * d));
                    }
                    if t.width.is_some() == t.precision.is_some() {
                        return Err(format!("data.terms[{i}]: give exactly one of `width`, `precision`"));
                    }
                }
            }
            DataConfig::Snapshot { .. } => {
                if !matches!(self.kind, ExperimentKind::Propagate) {
                    return Err(format!("data: snapshot input only supports `propagate`, not `{}`", self.kind.name()));
                }
            }
        }
        let time = &self.time;
        match self.kind {
            ExperimentKind::Propagate => positive("time.T", &time.t)?,
            ExperimentKind::DecayCheck => {
                positive("time.T", &time.t)?;
                if time.n.iter().any(|n| !(*n >= 0.0)) {
                    return Err("time.N: entries must be ≥ 0".into());
                }
            }
            ExperimentKind::InterpVerify => {
                positive("time.T", &time.t)?;
                if time.alpha.iter().any(|a| !(*a > 0.0 && *a < 1.0)) {
                    return Err("time.alpha: entries must lie in (0, 1)".into());
                }
            }
            ExperimentKind::Telescope => {
                if time.e.is_empty() {
                    return Err("time.E: the time set needs at least one interval".into());
                }
            }
            ExperimentKind::Thickness | ExperimentKind::SpectralFit => {}
        }
        if matches!(self.kind, ExperimentKind::SpectralFit) && self.spectral.n.is_empty() {
            return Err("spectral.N: at least one band radius is required".into());
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_parse_and_round_trip() {
        for kind in ExperimentKind::ALL {
            let config = ExperimentConfig::from_toml(kind.preset()).unwrap_or_else(|e| panic!("{}: {e}", kind.name()));
            assert_eq!(config.kind, kind);
            let again = ExperimentConfig::from_toml(&config.to_toml()).unwrap();
            assert_eq!(again, config);
        }
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(ExperimentConfig::from_toml("kind = \"thickness\"\nbogus = 1\n").is_err());
        let nested = "kind = \"thickness\"\n[grid]\nd = 1\npoints = 8\nhalf_width = 1.0\nextra = 2\n";
        assert!(ExperimentConfig::from_toml(nested).is_err());
        let set = "kind = \"thickness\"\n[set]\nkind = \"full_space\"\nradius = 1.0\n";
        assert!(ExperimentConfig::from_toml(set).is_err());
    }

    #[test]
    fn empty_time_set_rejected() {
        let err = ExperimentConfig::from_toml("kind = \"telescope\"\n[time]\nE = []\n");
        assert!(err.is_err());
    }

    #[test]
    fn minimal_config_takes_defaults() {
        let c = ExperimentConfig::from_toml("kind = \"decay-check\"").unwrap();
        assert_eq!(c.grid, GridConfig::default());
        assert_eq!(c.data, DataConfig::default());
    }
}
