//! Numerical scattering operator for `i∂_tψ + ½∂_x²ψ = λ|ψ|^{2σ}ψ`.
//!
//! `S ≈ U(-T) ∘ U_NL(2T) ∘ U(-T)` with `U` the exact free flow and `U_NL` the
//! split-step nonlinear flow, both at `ε = α = 1`. The free stretches spread the
//! wave far across the domain, so the grid has to be wide.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::propagators::{self, free_step, RunConfig, SemiclassicalParams, SplitScheme};
use crate::spectral::{
    boundary_mass_fraction, continuous_fourier, inverse_continuous_fourier, l2_norm, GridSpec,
    WaveField,
};

/// Nonlinear steps per unit `2T` in the default step size `dt = 2T/20000`.
pub const DEFAULT_NONLINEAR_STEPS: usize = 20_000;

/// Default outer-layer mass fraction that counts as a boundary leak.
pub const DEFAULT_LEAK_TOLERANCE: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScatteringConfig {
    pub grid: GridSpec,
    pub sigma: f64,
    pub lambda: f64,
    /// Half-length `T` of the nonlinear window `[-T, T]`.
    pub t_scatter: f64,
    pub dt: f64,
    pub scheme: SplitScheme,
    pub leak_tolerance: f64,
}

impl ScatteringConfig {
    /// Strang splitting with `dt = 2T/20000` (`T` taken as at least 1/2 for the step).
    pub fn new(grid: GridSpec, sigma: f64, lambda: f64, t_scatter: f64) -> Result<Self> {
        let cfg = ScatteringConfig {
            grid,
            sigma,
            lambda,
            t_scatter,
            dt: 2.0 * t_scatter.max(0.5) / DEFAULT_NONLINEAR_STEPS as f64,
            scheme: SplitScheme::Strang,
            leak_tolerance: DEFAULT_LEAK_TOLERANCE,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// `[-100π, 100π)` with 8192 points and `T = 55`.
    pub fn wide(sigma: f64, lambda: f64) -> Result<Self> {
        Self::new(GridSpec::new(-100.0 * PI, 100.0 * PI, 8192)?, sigma, lambda, 55.0)
    }

    pub fn with_dt(mut self, dt: f64) -> Result<Self> {
        self.dt = dt;
        self.validate()?;
        Ok(self)
    }

    pub fn with_scheme(mut self, scheme: SplitScheme) -> Self {
        self.scheme = scheme;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.grid.validate()?;
        SemiclassicalParams::unscaled(self.sigma, self.lambda)?;
        if !(self.t_scatter >= 0.0 && self.t_scatter.is_finite()) {
            return Err(Error::InvalidParams(format!("T must be >= 0, got {}", self.t_scatter)));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::InvalidParams(format!("dt must be > 0, got {}", self.dt)));
        }
        if !(self.leak_tolerance > 0.0) {
            return Err(Error::InvalidParams("leak tolerance must be > 0".into()));
        }
        Ok(())
    }

    /// The defocusing scattering theory needs `σ > 1`; smaller powers are
    /// run anyway but the result need not approximate any scattering state.
    pub fn in_scattering_regime(&self) -> bool {
        self.sigma > 1.0
    }

    pub fn params(&self) -> SemiclassicalParams {
        SemiclassicalParams::unscaled(self.sigma, self.lambda).expect("validated")
    }

    /// Nonlinear run over `duration`, with the step size adjusted to a whole
    /// number of steps.
    pub fn nonlinear_run(&self, duration: f64) -> Result<RunConfig> {
        let steps = (duration / self.dt).round().max(1.0);
        RunConfig::new(self.params(), self.scheme, duration, duration / steps)
    }

    /// Same step size, different `T`.
    pub fn with_t_scatter(&self, t_scatter: f64) -> ScatteringConfig {
        ScatteringConfig { t_scatter, ..*self }
    }

    fn check_leak(&self, field: &WaveField, stage: &'static str) -> Result<()> {
        let fraction = boundary_mass_fraction(field);
        if fraction > self.leak_tolerance {
            return Err(Error::BoundaryLeak {
                stage,
                fraction,
                tolerance: self.leak_tolerance,
            });
        }
        Ok(())
    }

    fn warn_regime(&self) {
        if !self.in_scattering_regime() {
            log::warn!("sigma = {} <= 1: outside the scattering regime", self.sigma);
        }
    }
}

/// The stages of one sandwich evaluation.
#[derive(Clone, Debug)]
pub struct ScatteringOutcome {
    /// `U_NL(T) U(-T) ψ₋`: the nonlinear solution at physical time zero.
    pub at_time_zero: WaveField,
    /// `U(-T) U_NL(2T) U(-T) ψ₋ ≈ Sψ₋`.
    pub scattered: WaveField,
}

/// Sandwich evaluation keeping the intermediate state at time zero.
///
/// The leak check runs on the three states that should be localized: the
/// input, the state at time zero, and the output. In between, the wave is
/// spread over the domain on purpose.
pub fn scatter_with_stages(psi_minus: &WaveField, cfg: &ScatteringConfig) -> Result<ScatteringOutcome> {
    cfg.validate()?;
    if psi_minus.grid() != &cfg.grid {
        return Err(Error::GridMismatch);
    }
    cfg.warn_regime();
    cfg.check_leak(psi_minus, "input")?;
    let t = cfg.t_scatter;
    if t == 0.0 {
        return Ok(ScatteringOutcome {
            at_time_zero: psi_minus.clone(),
            scattered: psi_minus.clone(),
        });
    }
    let half = cfg.nonlinear_run(t)?;

    let start = free_step(psi_minus, -t, 1.0);
    let at_time_zero = propagators::evolve(&start, &half)?;
    cfg.check_leak(&at_time_zero, "time zero")?;
    let late = propagators::evolve(&at_time_zero, &half)?;
    let scattered = free_step(&late, -t, 1.0);
    cfg.check_leak(&scattered, "output")?;
    Ok(ScatteringOutcome {
        at_time_zero,
        scattered,
    })
}

/// `U(-T) ∘ U_NL(2T) ∘ U(-T) ψ₋`.
pub fn scattering_apply(psi_minus: &WaveField, cfg: &ScatteringConfig) -> Result<WaveField> {
    Ok(scatter_with_stages(psi_minus, cfg)?.scattered)
}

/// `U(-T) U_NL(T) ψ₀`: the outgoing asymptotic state of data given at `t = 0`.
pub fn mixed_state(psi0: &WaveField, cfg: &ScatteringConfig) -> Result<WaveField> {
    cfg.validate()?;
    if psi0.grid() != &cfg.grid {
        return Err(Error::GridMismatch);
    }
    cfg.warn_regime();
    cfg.check_leak(psi0, "input")?;
    if cfg.t_scatter == 0.0 {
        return Ok(psi0.clone());
    }
    let evolved = propagators::evolve(psi0, &cfg.nonlinear_run(cfg.t_scatter)?)?;
    let out = free_step(&evolved, -cfg.t_scatter, 1.0);
    cfg.check_leak(&out, "output")?;
    Ok(out)
}

/// `‖S_{factor·T}ψ₋ - S_Tψ₋‖ / ‖ψ₋‖`, with the step size of `cfg` in both runs.
pub fn t_stability(psi_minus: &WaveField, cfg: &ScatteringConfig, factor: f64) -> Result<f64> {
    if !(factor > 1.0) {
        return Err(Error::InvalidParams(format!("factor must exceed 1, got {factor}")));
    }
    let norm = l2_norm(psi_minus);
    if norm == 0.0 {
        return Ok(0.0);
    }
    let short = scattering_apply(psi_minus, cfg)?;
    let long = scattering_apply(psi_minus, &cfg.with_t_scatter(factor * cfg.t_scatter))?;
    Ok(l2_norm(&long.sub(&short)?) / norm)
}

/// `Z = F ∘ S ∘ F⁻¹` with `Fφ(ξ) = (2iπ)^{-1/2} ∫ e^{-ixξ} φ(x) dx`.
///
/// `f` lives on its own (frequency-side) grid; `F⁻¹f` is sampled on the
/// scattering grid, scattered, and transformed back onto `f`'s nodes.
pub fn z_operator(f: &WaveField, cfg: &ScatteringConfig) -> Result<WaveField> {
    let psi_minus = WaveField::new(cfg.grid, inverse_continuous_fourier(f, &cfg.grid.nodes()))?;
    let psi_plus = scattering_apply(&psi_minus, cfg)?;
    let values = continuous_fourier(&psi_plus, &f.grid().nodes());
    WaveField::new(*f.grid(), values)
}

/// The Gaussian `exp(-5x²)` used as scattering data.
pub fn narrow_gaussian(grid: GridSpec) -> WaveField {
    WaveField::from_fn(grid, |x| Complex64::new((-5.0 * x * x).exp(), 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_cfg(sigma: f64, lambda: f64, t: f64) -> ScatteringConfig {
        let grid = GridSpec::new(-40.0 * PI, 40.0 * PI, 2048).unwrap();
        ScatteringConfig::new(grid, sigma, lambda, t)
            .unwrap()
            .with_dt(2.0 * t / 2000.0)
            .unwrap()
    }

    fn dist(a: &WaveField, b: &WaveField) -> f64 {
        l2_norm(&a.sub(b).unwrap())
    }

    #[test]
    fn config_validation() {
        let g = GridSpec::new(-10.0, 10.0, 64).unwrap();
        assert!(ScatteringConfig::new(g, 2.0, 1.0, -1.0).is_err());
        assert!(ScatteringConfig::new(g, 2.0, 1.0, 0.0).unwrap().with_dt(0.0).is_err());
        assert!(ScatteringConfig::new(g, 0.0, 1.0, 1.0).is_err());
        let c = ScatteringConfig::new(g, 1.0, 1.0, 5.0).unwrap();
        assert!(!c.in_scattering_regime());
        assert!((c.dt - 5e-4).abs() < 1e-15);
        assert_eq!(c.nonlinear_run(5.0).unwrap().num_steps(), 10_000);
    }

    #[test]
    fn identity_without_nonlinearity() {
        let cfg = small_cfg(2.0, 0.0, 10.0);
        let psi = narrow_gaussian(cfg.grid);
        assert!(dist(&scattering_apply(&psi, &cfg).unwrap(), &psi) < 1e-10);
        assert!(dist(&mixed_state(&psi, &cfg).unwrap(), &psi) < 1e-10);
        assert!(t_stability(&psi, &cfg, 1.5).unwrap() < 1e-10);
    }

    #[test]
    fn isometry_and_gauge_covariance() {
        let cfg = small_cfg(2.0, 1.0, 10.0);
        let psi = narrow_gaussian(cfg.grid);
        let out = scattering_apply(&psi, &cfg).unwrap();
        assert!((l2_norm(&out) - l2_norm(&psi)).abs() / l2_norm(&psi) < 1e-10);

        let phase = Complex64::cis(0.7);
        let rotated = scattering_apply(&psi.scaled(phase), &cfg).unwrap();
        assert!(dist(&rotated, &out.scaled(phase)) < 1e-10);
    }

    #[test]
    fn leak_is_reported() {
        let grid = GridSpec::new(-10.0, 10.0, 256).unwrap();
        let cfg = ScatteringConfig::new(grid, 2.0, 1.0, 1.0).unwrap();
        let wide = WaveField::from_fn(grid, |_| Complex64::new(1.0, 0.0));
        assert!(matches!(
            scattering_apply(&wide, &cfg),
            Err(Error::BoundaryLeak { stage: "input", .. })
        ));
    }

    #[test]
    fn z_operator_identity_and_nonlinearity() {
        let cfg = small_cfg(2.0, 0.0, 5.0);
        let fgrid = GridSpec::new(-PI, PI, 256).unwrap();
        let f = WaveField::from_fn(fgrid, |y| Complex64::new((-2.0 * y * y).exp(), 0.0));
        let z = z_operator(&f, &cfg).unwrap();
        assert!(f.sub(&z).unwrap().sup_norm() < 1e-8);

        let cfg = small_cfg(2.0, 1.0, 5.0);
        let z1 = z_operator(&f, &cfg).unwrap();
        let z2 = z_operator(&f.scaled(Complex64::new(2.0, 0.0)), &cfg).unwrap();
        assert!(dist(&z2, &z1.scaled(Complex64::new(2.0, 0.0))) > 1e-3);
        assert!((l2_norm(&z1) - l2_norm(&f)).abs() / l2_norm(&f) < 1e-8);
    }
}
