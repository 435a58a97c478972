//! TOML experiment configuration. Every section is optional and falls back
//! to the defaults below; unknown keys are rejected.

use std::path::{Path, PathBuf};

use cattaneo_core::linsim::{make_lowerbound_data, Profile, RadialDataSpec};
use cattaneo_core::nonlinsim::InitSpec;
use cattaneo_core::{NormalizedParams, PhysicalParams};
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("malformed config: {0}")]
    Parse(String),
    #[error("invalid value for `{key}`: {message}")]
    Invalid { key: String, message: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PhysicalSection {
    #[serde(rename = "R")]
    pub r_gas: f64,
    pub gamma: f64,
    pub kappa: f64,
    pub tau: f64,
    pub nu_tilde: f64,
    pub eta_tilde: f64,
    pub rho_star: f64,
    pub theta_star: f64,
}

impl Default for PhysicalSection {
    fn default() -> Self {
        let p = PhysicalParams::default();
        Self {
            r_gas: p.r_gas,
            gamma: p.gamma,
            kappa: p.kappa,
            tau: p.tau,
            nu_tilde: p.nu_tilde,
            eta_tilde: p.eta_tilde,
            rho_star: p.rho_star,
            theta_star: p.theta_star,
        }
    }
}

impl PhysicalSection {
    pub fn params(&self) -> PhysicalParams {
        PhysicalParams {
            r_gas: self.r_gas,
            gamma: self.gamma,
            kappa: self.kappa,
            tau: self.tau,
            nu_tilde: self.nu_tilde,
            eta_tilde: self.eta_tilde,
            rho_star: self.rho_star,
            theta_star: self.theta_star,
        }
    }
}

/// Frequency radii for the symbol experiments and the periodic grid for the
/// nonlinear solver.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridSection {
    pub r_min: f64,
    pub r_max: f64,
    pub points: usize,
    pub low_radii: Vec<f64>,
    pub high_radii: Vec<f64>,
    /// Band cutoffs `r0 < R0` of the low/high split.
    pub band_r0: f64,
    pub band_big_r0: f64,
    pub n: usize,
    pub l: f64,
}

impl Default for GridSection {
    fn default() -> Self {
        Self {
            r_min: 1e-4,
            r_max: 1e4,
            points: 500,
            low_radii: vec![0.04, 0.02, 0.01],
            high_radii: vec![50.0, 100.0, 200.0],
            band_r0: 0.1,
            band_big_r0: 10.0,
            n: 16,
            l: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TimeSection {
    /// Log-spaced sample times for the whole-space experiments.
    pub t_min: f64,
    pub t_max: f64,
    pub samples: usize,
    pub fit_window: [f64; 2],
    /// Nonlinear run length and base step.
    pub t_final: f64,
    pub dt: f64,
    pub monitor_every: usize,
}

impl Default for TimeSection {
    fn default() -> Self {
        Self { t_min: 1e2, t_max: 1e5, samples: 40, fit_window: [1e2, 1e5], t_final: 10.0, dt: 0.05, monitor_every: 1 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DataKind {
    /// Smooth cutoff of the density: 1 on `r ≤ r0`, 0 beyond `R0`.
    Lowerbound,
    /// Unit indicator of the ball of radius `radius` in every component.
    Indicator,
    /// `exp(−r²/width²)` in every component.
    Gaussian,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DataSection {
    pub kind: DataKind,
    pub mu0: f64,
    pub r0: f64,
    pub big_r0: f64,
    pub radius: f64,
    pub width: f64,
    /// Periodic initial data: `Σ|f̂|` of each field.
    pub amplitude: f64,
    pub seed: u64,
    pub k_max: usize,
}

impl Default for DataSection {
    fn default() -> Self {
        Self {
            kind: DataKind::Lowerbound,
            mu0: 1.0,
            r0: 0.1,
            big_r0: 10.0,
            radius: 1.0,
            width: 1.0,
            amplitude: 1e-3,
            seed: 0,
            k_max: 2,
        }
    }
}

impl DataSection {
    pub fn radial(&self) -> cattaneo_core::Result<RadialDataSpec> {
        match self.kind {
            DataKind::Lowerbound => make_lowerbound_data(self.mu0, self.r0, self.big_r0),
            DataKind::Indicator => {
                let p = Profile::Indicator { scale: 1.0, radius: self.radius };
                Ok(RadialDataSpec::from_profiles(p, p, p, p))
            }
            DataKind::Gaussian => {
                let p = Profile::Gaussian { scale: 1.0, width: self.width };
                Ok(RadialDataSpec::from_profiles(p, p, p, p))
            }
        }
    }

    pub fn periodic(&self) -> InitSpec {
        InitSpec::Random { seed: self.seed, k_max: self.k_max }
    }
}

/// Which norms the series experiments record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RequestsSection {
    pub derivatives: Vec<u32>,
    pub negative: Vec<f64>,
}

impl Default for RequestsSection {
    fn default() -> Self {
        Self { derivatives: vec![0, 1, 2], negative: vec![] }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    pub dir: PathBuf,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self { dir: PathBuf::from("out") }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub physical: PhysicalSection,
    pub grid: GridSection,
    pub time: TimeSection,
    pub data: DataSection,
    pub requests: RequestsSection,
    pub output: OutputSection,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let cfg: Self = toml::from_str(text).map_err(|e| ConfigError::Parse(e.message().to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.into(), source })?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn normalized(&self) -> Result<NormalizedParams, ConfigError> {
        NormalizedParams::from_physical(&self.physical.params()).map_err(|e| ConfigError::Invalid { key: "physical".into(), message: e.to_string() })
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |key: &str, message: String| Err(ConfigError::Invalid { key: key.into(), message });
        let violations = self.physical.params().validate();
        if let Some(v) = violations.first() {
            let name = v.constraint.split(|c: char| !(c.is_alphanumeric() || c == '_')).next().unwrap_or("");
            let key = format!("physical.{name}");
            return bad(&key, format!("{} violated by {}", v.constraint, v.value));
        }
        let g = &self.grid;
        if !(g.r_min > 0.0 && g.r_min < g.r_max) {
            return bad("grid.r_min", format!("need 0 < r_min < r_max, got {} and {}", g.r_min, g.r_max));
        }
        if g.points < 2 {
            return bad("grid.points", format!("need at least 2, got {}", g.points));
        }
        if !(g.band_r0 > 0.0 && g.band_r0 < g.band_big_r0) {
            return bad("grid.band_r0", "need 0 < band_r0 < band_big_r0".into());
        }
        if g.n < 8 || !g.n.is_power_of_two() {
            return bad("grid.n", format!("must be a power of two >= 8, got {}", g.n));
        }
        if !(g.l > 0.0) {
            return bad("grid.l", format!("must be positive, got {}", g.l));
        }
        let t = &self.time;
        if !(t.t_min > 0.0 && t.t_min < t.t_max) {
            return bad("time.t_min", format!("need 0 < t_min < t_max, got {} and {}", t.t_min, t.t_max));
        }
        if t.samples < 2 {
            return bad("time.samples", format!("need at least 2, got {}", t.samples));
        }
        if !(t.dt > 0.0 && t.t_final > 0.0) {
            return bad("time.dt", "dt and t_final must be positive".into());
        }
        if t.monitor_every == 0 {
            return bad("time.monitor_every", "must be at least 1".into());
        }
        let d = &self.data;
        if !(d.amplitude >= 0.0) {
            return bad("data.amplitude", format!("must be >= 0, got {}", d.amplitude));
        }
        if let Err(e) = d.radial() {
            return bad("data", e.to_string());
        }
        Ok(())
    }
}
