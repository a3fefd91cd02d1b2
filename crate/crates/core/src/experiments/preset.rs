use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::propagators::{SemiclassicalParams, SplitScheme};
use crate::scattering::{self, ScatteringConfig};
use crate::spectral::{GridSpec, WaveField};
use crate::wkb::InitialProfile;

pub const FOCAL_EPSILON: f64 = 1.0 / 150.0;
pub const FOCAL_MODES: usize = 1024;
pub const FOCAL_T: f64 = 2.0;
pub const CUSP_MODES: usize = 4096;
pub const CUSP_T: f64 = 3.5;
pub const DEFAULT_DT: f64 = 1e-3;

pub const FOCAL_ALPHAS: [f64; 3] = [2.5, 2.0, 1.5];
pub const CUSP_ALPHAS: [f64; 3] = [4.0, 3.0, 2.0];
pub const SCATTER_POINTS: [(f64, f64); 8] = [
    (2.0, 1.0),
    (2.0, 5.0),
    (2.0, 25.0),
    (2.0, -1.0),
    (1.5, 5.0),
    (1.5, 25.0),
    (3.0, 5.0),
    (3.0, 25.0),
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Experiment {
    Focal,
    Cusp,
    Scatter,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialData {
    /// `exp(-(2 + i/(2ε))(x-π)²)`
    FocalGaussian,
    /// `exp(-2(x-π)² - i cos(x)/ε)`
    CuspGaussian,
    /// `exp(-5x²)`
    NarrowGaussian,
}

impl InitialData {
    pub fn sample(self, grid: GridSpec, epsilon: f64) -> WaveField {
        match self {
            InitialData::FocalGaussian => InitialProfile::focal_gaussian().sample(grid, epsilon),
            InitialData::CuspGaussian => InitialProfile::cusp_gaussian().sample(grid, epsilon),
            InitialData::NarrowGaussian => scattering::narrow_gaussian(grid),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ArtifactKind {
    WaveField,
    Spectrum,
    Series,
    Maslov,
    Metadata,
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Experiment::Focal => "focal",
            Experiment::Cusp => "cusp",
            Experiment::Scatter => "scatter",
        };
        f.write_str(s)
    }
}

/// A fully specified run. For scattering presets `t_final` is the half-window `T`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Preset {
    pub name: String,
    pub experiment: Experiment,
    pub grid: GridSpec,
    pub initial: InitialData,
    pub params: SemiclassicalParams,
    pub t_final: f64,
    pub dt: f64,
    pub scheme: SplitScheme,
    pub outputs: Vec<ArtifactKind>,
}

fn number(v: f64) -> String {
    format!("{v}")
}

impl Preset {
    pub fn focal(alpha: f64) -> Result<Self> {
        let p = Preset {
            name: format!("focal-alpha{}", number(alpha)),
            experiment: Experiment::Focal,
            grid: GridSpec::periodic_2pi(FOCAL_MODES)?,
            initial: InitialData::FocalGaussian,
            params: SemiclassicalParams::new(FOCAL_EPSILON, 2.0, alpha, 1.0)?,
            t_final: FOCAL_T,
            dt: DEFAULT_DT,
            scheme: SplitScheme::Strang,
            outputs: vec![
                ArtifactKind::WaveField,
                ArtifactKind::Series,
                ArtifactKind::Maslov,
                ArtifactKind::Metadata,
            ],
        };
        p.validate()?;
        Ok(p)
    }

    pub fn cusp(alpha: f64) -> Result<Self> {
        let p = Preset {
            name: format!("cusp-alpha{}", number(alpha)),
            experiment: Experiment::Cusp,
            grid: GridSpec::periodic_2pi(CUSP_MODES)?,
            initial: InitialData::CuspGaussian,
            params: SemiclassicalParams::new(FOCAL_EPSILON, 4.0, alpha, 1.0)?,
            t_final: CUSP_T,
            dt: DEFAULT_DT,
            scheme: SplitScheme::Strang,
            outputs: vec![
                ArtifactKind::WaveField,
                ArtifactKind::Spectrum,
                ArtifactKind::Series,
                ArtifactKind::Metadata,
            ],
        };
        p.validate()?;
        Ok(p)
    }

    pub fn scatter(sigma: f64, lambda: f64) -> Result<Self> {
        let cfg = ScatteringConfig::wide(sigma, lambda)?;
        let p = Preset {
            name: format!("scatter-sigma{}-lambda{}", number(sigma), number(lambda)),
            experiment: Experiment::Scatter,
            grid: cfg.grid,
            initial: InitialData::NarrowGaussian,
            params: cfg.params(),
            t_final: cfg.t_scatter,
            dt: cfg.dt,
            scheme: cfg.scheme,
            outputs: vec![
                ArtifactKind::WaveField,
                ArtifactKind::Spectrum,
                ArtifactKind::Metadata,
            ],
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        self.grid.validate()?;
        self.params.validate()?;
        if !(self.t_final > 0.0 && self.t_final.is_finite()) {
            return Err(Error::InvalidParams(format!("t_final must be > 0, got {}", self.t_final)));
        }
        if !(self.dt > 0.0) {
            return Err(Error::InvalidParams(format!("dt must be > 0, got {}", self.dt)));
        }
        Ok(())
    }

    pub fn scattering_config(&self) -> Result<ScatteringConfig> {
        let cfg = ScatteringConfig::new(self.grid, self.params.sigma, self.params.lambda, self.t_final)?
            .with_dt(self.dt)?
            .with_scheme(self.scheme);
        Ok(cfg)
    }

    pub fn initial_field(&self) -> WaveField {
        self.initial.sample(self.grid, self.params.epsilon)
    }
}

/// Every registered preset, in a fixed order.
pub fn registered_presets() -> Vec<Preset> {
    let mut out = Vec::new();
    for a in FOCAL_ALPHAS {
        out.push(Preset::focal(a).expect("valid preset"));
    }
    for a in CUSP_ALPHAS {
        out.push(Preset::cusp(a).expect("valid preset"));
    }
    for (s, l) in SCATTER_POINTS {
        out.push(Preset::scatter(s, l).expect("valid preset"));
    }
    out
}

pub fn preset_by_name(name: &str) -> Result<Preset> {
    registered_presets()
        .into_iter()
        .find(|p| p.name == name)
        .ok_or_else(|| Error::UnknownPreset(name.to_string()))
}

/// Per-invocation overrides, read from a JSON document and/or CLI flags.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Overrides {
    pub preset: Option<String>,
    pub epsilon: Option<f64>,
    pub sigma: Option<f64>,
    pub alpha: Option<f64>,
    pub lambda: Option<f64>,
    pub t_final: Option<f64>,
    pub dt: Option<f64>,
    pub num_points: Option<usize>,
    pub x_min: Option<f64>,
    pub x_max: Option<f64>,
    pub scheme: Option<SplitScheme>,
}

impl Overrides {
    pub fn from_json_file(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }

    /// Values set in `other` win.
    pub fn merged_with(self, other: Overrides) -> Overrides {
        Overrides {
            preset: other.preset.or(self.preset),
            epsilon: other.epsilon.or(self.epsilon),
            sigma: other.sigma.or(self.sigma),
            alpha: other.alpha.or(self.alpha),
            lambda: other.lambda.or(self.lambda),
            t_final: other.t_final.or(self.t_final),
            dt: other.dt.or(self.dt),
            num_points: other.num_points.or(self.num_points),
            x_min: other.x_min.or(self.x_min),
            x_max: other.x_max.or(self.x_max),
            scheme: other.scheme.or(self.scheme),
        }
    }

    pub fn apply(&self, preset: &Preset) -> Result<Preset> {
        let mut p = preset.clone();
        let params = &mut p.params;
        params.epsilon = self.epsilon.unwrap_or(params.epsilon);
        params.sigma = self.sigma.unwrap_or(params.sigma);
        params.alpha = self.alpha.unwrap_or(params.alpha);
        params.lambda = self.lambda.unwrap_or(params.lambda);
        p.t_final = self.t_final.unwrap_or(p.t_final);
        p.dt = self.dt.unwrap_or(p.dt);
        p.scheme = self.scheme.unwrap_or(p.scheme);
        p.grid = GridSpec::new(
            self.x_min.unwrap_or(p.grid.x_min),
            self.x_max.unwrap_or(p.grid.x_max),
            self.num_points.unwrap_or(p.grid.num_points),
        )?;
        if p.experiment == Experiment::Scatter && self.t_final.is_some() && self.dt.is_none() {
            p.dt = 2.0 * p.t_final / scattering::DEFAULT_NONLINEAR_STEPS as f64;
        }
        p.validate()?;
        Ok(p)
    }

    /// The base preset: `--preset` if given, otherwise `fallback`.
    pub fn resolve(&self, fallback: impl FnOnce() -> Result<Preset>) -> Result<Preset> {
        let base = match &self.preset {
            Some(name) => preset_by_name(name)?,
            None => fallback()?,
        };
        self.apply(&base)
    }
}
