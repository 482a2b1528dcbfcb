//! Run configuration: a TOML file selecting a model, its parameters, the
//! scan ranges, and output options.
//!
//! Parsing is strict: unknown keys anywhere are rejected with a diagnostic
//! naming the key, and a parsed configuration serializes back to an
//! equivalent file.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use chiral_scatter::analysis::{PhaseMode, ScatterModel};
use chiral_scatter::model::{
    DualVelocityParams, GiantAtomParams, SmallAtomParams, TwoLevelParams,
};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{0}")]
pub struct ConfigError(pub String);

impl ConfigError {
    fn new(message: impl fmt::Display) -> Self {
        Self(message.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    SmallLambda,
    TwoLevel,
    GiantLambda,
    DualVelocity,
}

impl ModelKind {
    pub fn name(&self) -> &'static str {
        match self {
            ModelKind::SmallLambda => "small_lambda",
            ModelKind::TwoLevel => "two_level",
            ModelKind::GiantLambda => "giant_lambda",
            ModelKind::DualVelocity => "dual_velocity",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SmallAtomConfig {
    pub gamma_r: f64,
    pub gamma_l: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TwoLevelConfig {
    pub gamma_r: f64,
    pub gamma_l: f64,
    #[serde(default)]
    pub kappa: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GiantAtomConfig {
    pub gamma_1r: f64,
    pub gamma_2r: f64,
    pub gamma_1l: f64,
    pub gamma_2l: f64,
    pub phi_1_0: f64,
    pub phi_2_0: f64,
    pub tau: f64,
    /// Optional independent delay of the converted component; defaults to
    /// `tau`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau_2: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DualVelocityConfig {
    pub v1: f64,
    pub v2: f64,
    pub d: f64,
    pub omega_1: f64,
    pub omega_2: f64,
    pub omega_e: f64,
    pub omega_f: f64,
    pub g_1r: f64,
    pub g_2r: f64,
    pub g_1l: f64,
    pub g_2l: f64,
    pub xi_1r: f64,
    pub xi_2r: f64,
    pub xi_1l: f64,
    pub xi_2l: f64,
}

/// The model selection together with its parameter block.
#[derive(Debug, Clone, PartialEq)]
pub enum ModelConfig {
    SmallLambda(SmallAtomConfig),
    TwoLevel(TwoLevelConfig),
    GiantLambda(GiantAtomConfig),
    DualVelocity(DualVelocityConfig),
}

impl ModelConfig {
    pub fn kind(&self) -> ModelKind {
        match self {
            ModelConfig::SmallLambda(_) => ModelKind::SmallLambda,
            ModelConfig::TwoLevel(_) => ModelKind::TwoLevel,
            ModelConfig::GiantLambda(_) => ModelKind::GiantLambda,
            ModelConfig::DualVelocity(_) => ModelKind::DualVelocity,
        }
    }

    /// Validated scattering model; errors name the offending `params` field.
    pub fn to_model(&self) -> Result<ScatterModel, ConfigError> {
        let in_params = |e: chiral_scatter::model::ModelError| ConfigError::new(format!("params: {e}"));
        Ok(match self {
            ModelConfig::SmallLambda(p) => ScatterModel::SmallLambda(
                SmallAtomParams::new(p.gamma_r, p.gamma_l).map_err(in_params)?,
            ),
            ModelConfig::TwoLevel(p) => ScatterModel::TwoLevel(
                TwoLevelParams::new(p.gamma_r, p.gamma_l, p.kappa).map_err(in_params)?,
            ),
            ModelConfig::GiantLambda(p) => ScatterModel::GiantLambda(
                GiantAtomParams::with_delays(
                    p.gamma_1r,
                    p.gamma_2r,
                    p.gamma_1l,
                    p.gamma_2l,
                    p.phi_1_0,
                    p.phi_2_0,
                    p.tau,
                    p.tau_2.unwrap_or(p.tau),
                )
                .map_err(in_params)?,
            ),
            ModelConfig::DualVelocity(p) => ScatterModel::DualVelocity(
                DualVelocityParams::new(
                    p.v1,
                    p.v2,
                    p.d,
                    p.omega_1,
                    p.omega_2,
                    p.omega_e,
                    p.omega_f,
                    [p.g_1r, p.g_2r, p.g_1l, p.g_2l],
                    [p.xi_1r, p.xi_2r, p.xi_1l, p.xi_2l],
                )
                .map_err(in_params)?,
            ),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhaseModeConfig {
    Phi1Only,
    Antisymmetric,
}

impl From<PhaseModeConfig> for PhaseMode {
    fn from(mode: PhaseModeConfig) -> Self {
        match mode {
            PhaseModeConfig::Phi1Only => PhaseMode::Phi1Only,
            PhaseModeConfig::Antisymmetric => PhaseMode::Antisymmetric,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanConfig {
    pub delta_min: f64,
    pub delta_max: f64,
    pub delta_points: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phase_mode: Option<PhaseModeConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi_min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi_max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi_points: Option<usize>,
}

impl ScanConfig {
    pub fn delta_range(&self) -> Result<(f64, f64), ConfigError> {
        if !self.delta_min.is_finite() || !self.delta_max.is_finite() {
            return Err(ConfigError::new("scan.delta_min/delta_max must be finite"));
        }
        if self.delta_max < self.delta_min {
            return Err(ConfigError::new("scan.delta_max must not be below scan.delta_min"));
        }
        Ok((self.delta_min, self.delta_max))
    }

    pub fn spectrum_points(&self) -> Result<usize, ConfigError> {
        if self.delta_points < 2 {
            return Err(ConfigError::new("scan.delta_points must be at least 2"));
        }
        Ok(self.delta_points)
    }

    /// Phase-axis settings for map runs; every field is required there.
    pub fn phase_axis(&self) -> Result<(PhaseMode, (f64, f64), usize), ConfigError> {
        let mode = self
            .phase_mode
            .ok_or_else(|| ConfigError::new("scan.phase_mode is required for map runs"))?;
        let lo = self
            .phi_min
            .ok_or_else(|| ConfigError::new("scan.phi_min is required for map runs"))?;
        let hi = self
            .phi_max
            .ok_or_else(|| ConfigError::new("scan.phi_max is required for map runs"))?;
        let n = self
            .phi_points
            .ok_or_else(|| ConfigError::new("scan.phi_points is required for map runs"))?;
        if !lo.is_finite() || !hi.is_finite() || hi < lo {
            return Err(ConfigError::new("scan.phi_min/phi_max must form a finite range"));
        }
        if n == 0 {
            return Err(ConfigError::new("scan.phi_points must be at least 1"));
        }
        Ok((mode.into(), (lo, hi), n))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MapChannels {
    /// `phi,delta,T2` rows.
    #[default]
    T2,
    /// All transmission channels and contrasts.
    Full,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dir: Option<PathBuf>,
    pub map_channels: MapChannels,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VerifyConfig {
    pub sample_count: usize,
    pub seed: u64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self { sample_count: 1000, seed: 1 }
    }
}

/// A fully parsed run configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub model: ModelConfig,
    pub scan: Option<ScanConfig>,
    pub output: OutputConfig,
    pub verify: Option<VerifyConfig>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    model: ModelKind,
    params: toml::Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    scan: Option<ScanConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    output: Option<OutputConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    verify: Option<VerifyConfig>,
}

fn params_from_value<T: serde::de::DeserializeOwned>(
    value: toml::Value,
) -> Result<T, ConfigError> {
    value.try_into().map_err(|e| ConfigError::new(format!("params: {e}")))
}

fn params_to_value<T: Serialize>(params: &T) -> toml::Value {
    toml::Value::try_from(params).expect("parameter blocks serialize to tables")
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, ConfigError> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| ConfigError::new(e.message()))?;
        let model = match raw.model {
            ModelKind::SmallLambda => ModelConfig::SmallLambda(params_from_value(raw.params)?),
            ModelKind::TwoLevel => ModelConfig::TwoLevel(params_from_value(raw.params)?),
            ModelKind::GiantLambda => ModelConfig::GiantLambda(params_from_value(raw.params)?),
            ModelKind::DualVelocity => ModelConfig::DualVelocity(params_from_value(raw.params)?),
        };
        Ok(Self {
            model,
            scan: raw.scan,
            output: raw.output.unwrap_or_default(),
            verify: raw.verify,
        })
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::new(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        let params = match &self.model {
            ModelConfig::SmallLambda(p) => params_to_value(p),
            ModelConfig::TwoLevel(p) => params_to_value(p),
            ModelConfig::GiantLambda(p) => params_to_value(p),
            ModelConfig::DualVelocity(p) => params_to_value(p),
        };
        let raw = RawConfig {
            model: self.model.kind(),
            params,
            scan: self.scan.clone(),
            output: if self.output == OutputConfig::default() {
                None
            } else {
                Some(self.output.clone())
            },
            verify: self.verify.clone(),
        };
        toml::to_string(&raw).expect("configuration serializes")
    }

    pub fn scan(&self) -> Result<&ScanConfig, ConfigError> {
        self.scan
            .as_ref()
            .ok_or_else(|| ConfigError::new("missing [scan] section"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const GIANT: &str = r#"
model = "giant_lambda"

[params]
gamma_1r = 1.0
gamma_2r = 1.0
gamma_1l = 0.0
gamma_2l = 0.0
phi_1_0 = 3.141592653589793
phi_2_0 = 0.0
tau = 3.0

[scan]
delta_min = -10.0
delta_max = 10.0
delta_points = 2001

[verify]
sample_count = 500
seed = 7
"#;

    #[test]
    fn parses_and_round_trips() {
        let config = RunConfig::from_toml_str(GIANT).unwrap();
        assert_eq!(config.model.kind(), ModelKind::GiantLambda);
        assert_eq!(config.verify.as_ref().unwrap().sample_count, 500);
        let reparsed = RunConfig::from_toml_str(&config.to_toml_string()).unwrap();
        assert_eq!(config, reparsed);
    }

    #[test]
    fn rejects_unknown_top_level_key() {
        let err = RunConfig::from_toml_str("model = \"small_lambda\"\nbogus = 1\n[params]\ngamma_r = 1.0\ngamma_l = 0.0\n")
            .unwrap_err();
        assert!(err.0.contains("bogus"), "message was: {}", err.0);
    }

    #[test]
    fn rejects_unknown_params_key() {
        let text = GIANT.replace("tau = 3.0", "tau = 3.0\ngamma_3r = 1.0");
        let err = RunConfig::from_toml_str(&text).unwrap_err();
        assert!(err.0.contains("gamma_3r"), "message was: {}", err.0);
        assert!(err.0.contains("params"), "message was: {}", err.0);
    }

    #[test]
    fn rejects_missing_params_field() {
        let text = GIANT.replace("tau = 3.0\n", "");
        let err = RunConfig::from_toml_str(&text).unwrap_err();
        assert!(err.0.contains("tau"), "message was: {}", err.0);
    }

    #[test]
    fn invalid_parameter_values_name_the_field() {
        let text = GIANT.replace("gamma_1r = 1.0", "gamma_1r = -1.0");
        let config = RunConfig::from_toml_str(&text).unwrap();
        let err = config.model.to_model().unwrap_err();
        assert!(err.0.contains("gamma_1r"), "message was: {}", err.0);
    }

    #[test]
    fn map_scan_requires_phase_axis() {
        let config = RunConfig::from_toml_str(GIANT).unwrap();
        let err = config.scan.unwrap().phase_axis().unwrap_err();
        assert!(err.0.contains("phase_mode"), "message was: {}", err.0);
    }
}
