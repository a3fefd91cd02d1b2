//! Split-step integrators for `iε∂_t u + (ε²/2)∂_x²u = λ ε^α |u|^{2σ} u`.
//!
//! Both substeps are exact flows: the free part is a unit-modulus Fourier
//! multiplier and the nonlinear part is a pointwise phase rotation (it keeps
//! `|u|` fixed, so `|u|^{2σ}` is constant along it). The only time error is the
//! splitting error.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::observables::{self, ObservableRecord};
use crate::spectral::{l2_norm, FftWorkspace, GridSpec, WaveField};

/// Default blow-up guard, as a multiple of the initial sup-norm.
pub const DEFAULT_BLOWUP_FACTOR: f64 = 1e6;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SemiclassicalParams {
    pub epsilon: f64,
    pub sigma: f64,
    pub alpha: f64,
    pub lambda: f64,
}

impl SemiclassicalParams {
    pub fn new(epsilon: f64, sigma: f64, alpha: f64, lambda: f64) -> Result<Self> {
        let p = SemiclassicalParams {
            epsilon,
            sigma,
            alpha,
            lambda,
        };
        p.validate()?;
        Ok(p)
    }

    /// `ε = 1, α = 1`: the unscaled equation `i∂_tψ + ½∂_x²ψ = λ|ψ|^{2σ}ψ`.
    pub fn unscaled(sigma: f64, lambda: f64) -> Result<Self> {
        Self::new(1.0, sigma, 1.0, lambda)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(Error::InvalidParams(format!("epsilon must be > 0, got {}", self.epsilon)));
        }
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(Error::InvalidParams(format!("sigma must be > 0, got {}", self.sigma)));
        }
        if !(self.alpha >= 1.0 && self.alpha.is_finite()) {
            return Err(Error::InvalidParams(format!("alpha must be >= 1, got {}", self.alpha)));
        }
        if !self.lambda.is_finite() {
            return Err(Error::InvalidParams("lambda must be finite".into()));
        }
        Ok(())
    }

    /// Phase rate `λ ε^{α-1}` multiplying `|u|^{2σ}` in the nonlinear flow.
    pub fn phase_coupling(&self) -> f64 {
        self.lambda * self.epsilon.powf(self.alpha - 1.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SplitScheme {
    Lie,
    Strang,
}

impl fmt::Display for SplitScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SplitScheme::Lie => f.write_str("lie"),
            SplitScheme::Strang => f.write_str("strang"),
        }
    }
}

impl FromStr for SplitScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "lie" => Ok(SplitScheme::Lie),
            "strang" => Ok(SplitScheme::Strang),
            other => Err(Error::InvalidParams(format!("unknown scheme '{other}'"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub params: SemiclassicalParams,
    pub scheme: SplitScheme,
    pub t_final: f64,
    pub dt: f64,
    pub snapshot_every: usize,
    #[serde(default = "default_blowup_factor")]
    pub blowup_factor: f64,
}

fn default_blowup_factor() -> f64 {
    DEFAULT_BLOWUP_FACTOR
}

impl RunConfig {
    pub fn new(params: SemiclassicalParams, scheme: SplitScheme, t_final: f64, dt: f64) -> Result<Self> {
        let cfg = RunConfig {
            params,
            scheme,
            t_final,
            dt,
            snapshot_every: usize::MAX,
            blowup_factor: DEFAULT_BLOWUP_FACTOR,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_snapshot_every(mut self, every: usize) -> Self {
        self.snapshot_every = every;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if !(self.t_final >= 0.0 && self.t_final.is_finite()) {
            return Err(Error::InvalidParams(format!("t_final must be >= 0, got {}", self.t_final)));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::InvalidParams(format!("dt must be > 0, got {}", self.dt)));
        }
        let ratio = self.t_final / self.dt;
        if (ratio - ratio.round()).abs() > 1e-9 {
            return Err(Error::InvalidParams(format!(
                "t_final / dt = {ratio} is not a whole number of steps"
            )));
        }
        if self.snapshot_every == 0 {
            return Err(Error::InvalidParams("snapshot_every must be >= 1".into()));
        }
        if !(self.blowup_factor > 1.0) {
            return Err(Error::InvalidParams("blowup_factor must exceed 1".into()));
        }
        Ok(())
    }

    pub fn num_steps(&self) -> usize {
        (self.t_final / self.dt).round() as usize
    }
}

fn free_multiplier(grid: &GridSpec, t: f64, epsilon: f64) -> Vec<Complex64> {
    (0..grid.num_points)
        .map(|i| {
            let xi = grid.wavenumber(grid.natural_index(i));
            Complex64::cis(-0.5 * epsilon * xi * xi * t)
        })
        .collect()
}

/// Exact free flow over time `t` (negative allowed): multiplies the spectrum
/// by `e^{-iεξ²t/2}`.
pub fn free_step(field: &WaveField, t: f64, epsilon: f64) -> WaveField {
    let grid = *field.grid();
    let mult = free_multiplier(&grid, t, epsilon);
    let mut buf = field.values().to_vec();
    let mut ws = FftWorkspace::new(grid.num_points);
    ws.forward(&mut buf);
    for (z, m) in buf.iter_mut().zip(&mult) {
        *z *= m;
    }
    ws.inverse(&mut buf);
    WaveField::new(grid, buf).expect("grid unchanged")
}

/// Relative change of the `L²` norm under [`free_step`]; zero for the zero field.
pub fn free_step_is_unitary_check(field: &WaveField, t: f64, epsilon: f64) -> f64 {
    let before = l2_norm(field);
    if before == 0.0 {
        return 0.0;
    }
    let after = l2_norm(&free_step(field, t, epsilon));
    (after - before).abs() / before
}

fn rotate_phase(values: &mut [Complex64], coupling: f64, sigma: f64, t: f64) {
    if coupling == 0.0 || t == 0.0 {
        return;
    }
    for z in values.iter_mut() {
        let rho = z.norm_sqr().powf(sigma);
        *z *= Complex64::cis(-coupling * rho * t);
    }
}

/// Exact nonlinear flow: `u_j ← u_j exp(-i λ ε^{α-1} |u_j|^{2σ} t)`.
pub fn nonlinear_step(field: &WaveField, t: f64, params: &SemiclassicalParams) -> WaveField {
    let mut out = field.clone();
    rotate_phase(out.values_mut(), params.phase_coupling(), params.sigma, t);
    out
}

/// Owns the FFT workspace and the free multiplier for one step size.
struct Stepper {
    ws: FftWorkspace,
    full: Vec<Complex64>,
    coupling: f64,
    sigma: f64,
    dt: f64,
}

impl Stepper {
    fn new(grid: GridSpec, cfg: &RunConfig) -> Self {
        Stepper {
            ws: FftWorkspace::new(grid.num_points),
            full: free_multiplier(&grid, cfg.dt, cfg.params.epsilon),
            coupling: cfg.params.phase_coupling(),
            sigma: cfg.params.sigma,
            dt: cfg.dt,
        }
    }

    fn free(&mut self, buf: &mut [Complex64]) {
        self.ws.forward(buf);
        for (z, m) in buf.iter_mut().zip(&self.full) {
            *z *= m;
        }
        self.ws.inverse(buf);
    }

    fn nonlinear(&self, buf: &mut [Complex64], fraction: f64) {
        rotate_phase(buf, self.coupling, self.sigma, fraction * self.dt);
    }
}

struct BlowUpGuard {
    limit: f64,
}

impl BlowUpGuard {
    fn new(initial: &WaveField, factor: f64) -> Self {
        let sup = initial.sup_norm();
        BlowUpGuard {
            limit: if sup > 0.0 { factor * sup } else { f64::INFINITY },
        }
    }

    fn check(&self, buf: &[Complex64], t: f64) -> Result<()> {
        let mut sup = 0.0f64;
        for z in buf {
            let m = z.norm();
            if !m.is_finite() {
                return Err(Error::BlowUp {
                    t,
                    sup_norm: f64::INFINITY,
                    guard: self.limit,
                });
            }
            sup = sup.max(m);
        }
        if sup > self.limit {
            return Err(Error::BlowUp {
                t,
                sup_norm: sup,
                guard: self.limit,
            });
        }
        Ok(())
    }
}

/// `n = t_final/dt` rounds of `[V(dt) ∘ U(dt)]`: free step first, then the
/// nonlinear step.
pub fn lie_evolve(field: &WaveField, cfg: &RunConfig) -> Result<WaveField> {
    let cfg = RunConfig {
        scheme: SplitScheme::Lie,
        snapshot_every: usize::MAX,
        ..*cfg
    };
    evolve_with_snapshots(field, &cfg, |_, _, _| {})
}

/// `V(dt/2) ∘ U(dt) ∘ [V(dt) ∘ U(dt)]^{n-1} ∘ V(dt/2)`.
pub fn strang_evolve(field: &WaveField, cfg: &RunConfig) -> Result<WaveField> {
    let cfg = RunConfig {
        scheme: SplitScheme::Strang,
        snapshot_every: usize::MAX,
        ..*cfg
    };
    evolve_with_snapshots(field, &cfg, |_, _, _| {})
}

/// Runs the configured scheme.
pub fn evolve(field: &WaveField, cfg: &RunConfig) -> Result<WaveField> {
    let cfg = RunConfig {
        snapshot_every: usize::MAX,
        ..*cfg
    };
    evolve_with_snapshots(field, &cfg, |_, _, _| {})
}

/// Runs the configured scheme and calls `sink` at `t = 0`, every
/// `snapshot_every` steps, and at `t_final` (once, even when it coincides with
/// a regular snapshot).
pub fn evolve_with_snapshots<F>(field: &WaveField, cfg: &RunConfig, mut sink: F) -> Result<WaveField>
where
    F: FnMut(f64, &WaveField, &ObservableRecord),
{
    cfg.validate()?;
    let grid = *field.grid();
    let n = cfg.num_steps();
    let mut emit = |t: f64, buf: &[Complex64]| {
        let snap = WaveField::new(grid, buf.to_vec()).expect("grid unchanged");
        let rec = observables::record(t, &snap, &cfg.params);
        sink(t, &snap, &rec);
    };

    let mut buf = field.values().to_vec();
    emit(0.0, &buf);
    if n == 0 {
        return Ok(field.clone());
    }

    let guard = BlowUpGuard::new(field, cfg.blowup_factor);
    let mut stepper = Stepper::new(grid, cfg);
    // Strang: a trailing V(dt/2) owed by the previous step, merged with the
    // next opening half into one V(dt).
    let mut owes_half = false;

    for s in 1..=n {
        let t = s as f64 * cfg.dt;
        match cfg.scheme {
            SplitScheme::Lie => {
                stepper.free(&mut buf);
                stepper.nonlinear(&mut buf, 1.0);
            }
            SplitScheme::Strang => {
                stepper.nonlinear(&mut buf, if owes_half { 1.0 } else { 0.5 });
                stepper.free(&mut buf);
                owes_half = true;
            }
        }
        guard.check(&buf, t)?;

        let snapshot = s == n || s % cfg.snapshot_every == 0;
        if snapshot {
            if owes_half {
                stepper.nonlinear(&mut buf, 0.5);
                owes_half = false;
            }
            emit(t, &buf);
        }
    }
    Ok(WaveField::new(grid, buf).expect("grid unchanged"))
}
