//! Run-configuration file (TOML) schema and validation.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use emscat::geom::Vec3;
use emscat::medium::Material;
use emscat::operators::QuadConfig;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("config parse error: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("{field}: {msg}")]
    Invalid { field: String, msg: String },
}

fn invalid(field: &str, msg: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        field: field.into(),
        msg: msg.into(),
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub scene: SceneConfig,
    pub excitation: ExcitationConfig,
    pub frequencies: FrequencyConfig,
    pub solvers: SolversConfig,
    #[serde(default)]
    pub quadrature: QuadratureConfig,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default)]
    pub benchmark: BenchmarkConfig,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneConfig {
    #[serde(default)]
    pub exterior: MaterialConfig,
    pub scatterers: Vec<ScattererConfig>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialConfig {
    #[serde(default = "one")]
    pub epsilon_r: f64,
    #[serde(default = "one")]
    pub mu_r: f64,
    #[serde(default)]
    pub loss_tangent: f64,
}

fn one() -> f64 {
    1.0
}

impl Default for MaterialConfig {
    fn default() -> Self {
        Self {
            epsilon_r: 1.0,
            mu_r: 1.0,
            loss_tangent: 0.0,
        }
    }
}

impl MaterialConfig {
    pub fn material(&self) -> Material {
        Material {
            epsilon_r: self.epsilon_r,
            mu_r: self.mu_r,
            loss_tangent: self.loss_tangent,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScattererConfig {
    /// Mesh file path, resolved relative to the config file.
    pub mesh: String,
    /// "msh" or "obj"; inferred from the extension when omitted.
    #[serde(default)]
    pub format: Option<String>,
    #[serde(default = "one")]
    pub epsilon_r: f64,
    #[serde(default = "one")]
    pub mu_r: f64,
    #[serde(default)]
    pub loss_tangent: f64,
    /// Sphere radius (m); required on a single-scatterer scene to run the
    /// analytic `mie` reference.
    #[serde(default)]
    pub sphere_radius_m: Option<f64>,
}

impl ScattererConfig {
    pub fn material(&self) -> Material {
        Material {
            epsilon_r: self.epsilon_r,
            mu_r: self.mu_r,
            loss_tangent: self.loss_tangent,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExcitationConfig {
    /// Propagation direction k̂ (normalized on load).
    pub direction: [f64; 3],
    /// Polarization ê (must be orthogonal to k̂).
    pub polarization: [f64; 3],
    #[serde(default = "one")]
    pub amplitude_v_per_m: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrequencyConfig {
    #[serde(default)]
    pub list_hz: Vec<f64>,
    #[serde(default)]
    pub linspace: Option<Linspace>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Linspace {
    pub start_hz: f64,
    pub stop_hz: f64,
    pub count: usize,
}

impl FrequencyConfig {
    pub fn frequencies(&self) -> Vec<f64> {
        let mut out = self.list_hz.clone();
        if let Some(l) = self.linspace {
            if l.count == 1 {
                out.push(l.start_hz);
            } else {
                for i in 0..l.count {
                    out.push(
                        l.start_hz + (l.stop_hz - l.start_hz) * i as f64 / (l.count as f64 - 1.0),
                    );
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolversConfig {
    /// Any of "single_source", "pmchwt", "schur", "mie".
    pub run: Vec<String>,
    #[serde(default = "half")]
    pub alpha: f64,
    #[serde(default = "half")]
    pub weight: f64,
}

fn half() -> f64 {
    0.5
}

#[derive(Debug, Clone, Copy, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct QuadratureConfig {
    pub far_points: Option<usize>,
    pub near_points: Option<usize>,
    pub near_threshold: Option<f64>,
}

impl QuadratureConfig {
    pub fn quad(&self) -> QuadConfig {
        let d = QuadConfig::default();
        QuadConfig {
            far_points: self.far_points.unwrap_or(d.far_points),
            near_points: self.near_points.unwrap_or(d.near_points),
            near_threshold: self.near_threshold.unwrap_or(d.near_threshold),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default = "default_out_dir")]
    pub dir: String,
    #[serde(default)]
    pub cuts: Vec<CutConfig>,
    /// Dump each scatterer's differential admittance block alongside the
    /// CSVs (binary container, regression baselines).
    #[serde(default)]
    pub dump_ys: bool,
}

fn default_out_dir() -> String {
    "out".into()
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            dir: default_out_dir(),
            cuts: Vec::new(),
            dump_ys: false,
        }
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CutConfig {
    #[serde(default)]
    pub phi_deg: Option<f64>,
    #[serde(default)]
    pub theta_deg: Option<f64>,
    #[serde(default = "default_step")]
    pub step_deg: f64,
}

fn default_step() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct BenchmarkConfig {
    #[serde(default)]
    pub enabled: bool,
}

pub const KNOWN_SOLVERS: [&str; 4] = ["single_source", "pmchwt", "schur", "mie"];

impl RunConfig {
    pub fn load(path: impl AsRef<Path>) -> Result<(Self, PathBuf), ConfigError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let cfg: RunConfig = toml::from_str(&text)?;
        cfg.validate()?;
        let base = path.parent().map(|p| p.to_path_buf()).unwrap_or_default();
        Ok((cfg, base))
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.scene.scatterers.is_empty() {
            return Err(invalid(
                "scene.scatterers",
                "at least one scatterer is required",
            ));
        }
        for (i, s) in self.scene.scatterers.iter().enumerate() {
            if !s.material().is_passive() {
                return Err(invalid(
                    &format!("scene.scatterers[{i}]"),
                    "material must be passive (epsilon_r > 0, mu_r > 0, loss_tangent >= 0)",
                ));
            }
            if let Some(fmt) = &s.format {
                if fmt != "msh" && fmt != "obj" {
                    return Err(invalid(
                        &format!("scene.scatterers[{i}].format"),
                        format!("unknown format {fmt:?}; expected \"msh\" or \"obj\""),
                    ));
                }
            }
        }
        if self.solvers.run.is_empty() {
            return Err(invalid("solvers.run", "at least one solver is required"));
        }
        for name in &self.solvers.run {
            if !KNOWN_SOLVERS.contains(&name.as_str()) {
                return Err(invalid(
                    "solvers.run",
                    format!("unknown solver {name:?}; expected one of {KNOWN_SOLVERS:?}"),
                ));
            }
        }
        if self.solvers.run.iter().any(|s| s == "mie") {
            if self.scene.scatterers.len() != 1 {
                return Err(invalid(
                    "solvers.run",
                    "the mie reference is only available for single-sphere scenes",
                ));
            }
            if self.scene.scatterers[0].sphere_radius_m.is_none() {
                return Err(invalid(
                    "scene.scatterers[0].sphere_radius_m",
                    "the mie reference requires the sphere radius",
                ));
            }
        }
        if !(self.solvers.alpha > 0.0 && self.solvers.alpha < 1.0) {
            return Err(invalid(
                "solvers.alpha",
                format!(
                    "alpha = {} is outside the required open interval (0, 1)",
                    self.solvers.alpha
                ),
            ));
        }
        if !(0.0..=1.0).contains(&self.solvers.weight) {
            return Err(invalid("solvers.weight", "weight must lie in [0, 1]"));
        }
        let freqs = self.frequencies.frequencies();
        if freqs.is_empty() {
            return Err(invalid(
                "frequencies",
                "no frequencies given (list_hz or linspace)",
            ));
        }
        if freqs.iter().any(|&f| !(f > 0.0)) {
            return Err(invalid("frequencies", "frequencies must be positive"));
        }
        for (i, c) in self.output.cuts.iter().enumerate() {
            match (c.phi_deg, c.theta_deg) {
                (Some(_), None) | (None, Some(_)) => {}
                _ => {
                    return Err(invalid(
                        &format!("output.cuts[{i}]"),
                        "exactly one of phi_deg or theta_deg must be set",
                    ))
                }
            }
            if !(c.step_deg > 0.0) {
                return Err(invalid(
                    &format!("output.cuts[{i}].step_deg"),
                    "must be positive",
                ));
            }
        }
        let q = self.quadrature;
        for (name, pts) in [("far_points", q.far_points), ("near_points", q.near_points)] {
            if let Some(p) = pts {
                if emscat::quad::QuadratureRule::by_points(p).is_none() {
                    return Err(invalid(
                        &format!("quadrature.{name}"),
                        format!("no {p}-point rule; available: 1, 3, 7, 16"),
                    ));
                }
            }
        }
        if let Some(t) = q.near_threshold {
            if !(t >= 0.0) {
                return Err(invalid("quadrature.near_threshold", "must be non-negative"));
            }
        }
        Ok(())
    }

    pub fn wave_vectors(&self) -> Result<(Vec3, Vec3), ConfigError> {
        let d = Vec3::new(
            self.excitation.direction[0],
            self.excitation.direction[1],
            self.excitation.direction[2],
        );
        let p = Vec3::new(
            self.excitation.polarization[0],
            self.excitation.polarization[1],
            self.excitation.polarization[2],
        );
        if d.norm() == 0.0 {
            return Err(invalid("excitation.direction", "zero vector"));
        }
        if p.norm() == 0.0 {
            return Err(invalid("excitation.polarization", "zero vector"));
        }
        let k_hat = d / d.norm();
        let e_raw = p / p.norm();
        if k_hat.dot(&e_raw).abs() > 1e-9 {
            return Err(invalid(
                "excitation.polarization",
                "polarization must be orthogonal to the propagation direction",
            ));
        }
        // Orthonormalize exactly against roundoff.
        let e_hat = (e_raw - k_hat * k_hat.dot(&e_raw)).normalize();
        Ok((k_hat, e_hat))
    }
}
