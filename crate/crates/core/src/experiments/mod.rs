//! Experiment presets and runners. Each runner writes its CSV artifacts and a
//! `metadata.json` sidecar into `<out_dir>/<run name>/`.

pub mod output;
pub mod preset;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::aliasing::{self, AliasReport};
use crate::error::{Error, Result};
use crate::observables::{self, ObservableRecord};
use crate::propagators::{self, free_step, RunConfig, SemiclassicalParams, SplitScheme};
use crate::scattering;
use crate::spectral::{l2_norm, GridSpec, WaveField};
use crate::wkb::{self, CausticGeometry, InitialProfile};

pub use output::ArtifactDir;
pub use preset::{
    preset_by_name, registered_presets, ArtifactKind, Experiment, InitialData, Overrides, Preset,
};

pub const MASS_DRIFT_TOLERANCE: f64 = 1e-10;
/// Observable series are sampled every this many steps.
pub const SERIES_EVERY: usize = 10;
pub const CONVERGENCE_DTS: [f64; 5] = [0.1, 0.05, 0.025, 0.0125, 0.00625];
pub const LEMMA3_EPSILONS: [f64; 4] = [1.0 / 50.0, 1.0 / 100.0, 1.0 / 200.0, 1.0 / 400.0];
/// Support band of the linear density spectrum: relative threshold and dilation.
pub const BAND_THRESHOLD: f64 = 1e-3;
pub const BAND_DILATION: usize = 2;

#[derive(Clone, Debug, Serialize)]
pub struct RunMetadata<R> {
    pub name: String,
    pub experiment: String,
    pub version: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub preset: Option<Preset>,
    /// Center of the `x` weight in the Σ-norm series.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma_norm_center: Option<f64>,
    pub mass_drift: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub energy_drift: Option<f64>,
    pub wall_time_s: f64,
    pub artifacts: Vec<String>,
    pub results: R,
}

#[derive(Clone, Debug)]
pub struct RunOutput<R> {
    pub dir: PathBuf,
    pub metadata: RunMetadata<R>,
}

impl<R> RunOutput<R> {
    pub fn results(&self) -> &R {
        &self.metadata.results
    }
}

struct Finish {
    name: String,
    experiment: &'static str,
    preset: Option<Preset>,
    mass_drift: f64,
    energy_drift: Option<f64>,
    started: Instant,
}

fn finish<R: Serialize>(dir: ArtifactDir, f: Finish, results: R) -> Result<RunOutput<R>> {
    let mut artifacts = dir.files().to_vec();
    artifacts.push("metadata.json".into());
    let metadata = RunMetadata {
        name: f.name,
        experiment: f.experiment.to_string(),
        version: env!("CARGO_PKG_VERSION"),
        sigma_norm_center: f.preset.as_ref().map(|p| p.grid.midpoint()),
        preset: f.preset,
        mass_drift: f.mass_drift,
        energy_drift: f.energy_drift,
        wall_time_s: f.started.elapsed().as_secs_f64(),
        artifacts,
        results,
    };
    output::write_json(&dir.root().join("metadata.json"), &metadata)?;
    Ok(RunOutput {
        dir: dir.root().to_path_buf(),
        metadata,
    })
}

fn relative_change(a: f64, b: f64) -> f64 {
    if a == 0.0 {
        (b - a).abs()
    } else {
        ((b - a) / a).abs()
    }
}

/// Relative mass change between two states; errors above the tolerance.
pub fn check_mass(run: &str, before: f64, after: f64) -> Result<f64> {
    let drift = relative_change(before, after);
    if !(drift <= MASS_DRIFT_TOLERANCE) {
        return Err(Error::MassDrift {
            run: run.to_string(),
            drift,
            tolerance: MASS_DRIFT_TOLERANCE,
        });
    }
    Ok(drift)
}

fn series_drifts(run: &str, series: &[ObservableRecord]) -> Result<(f64, f64)> {
    let (first, last) = (series[0], series[series.len() - 1]);
    let mass = check_mass(run, first.mass, last.mass)?;
    Ok((mass, relative_change(first.energy, last.energy)))
}

/// Evolution that also returns the observable series.
pub fn evolve_recorded(field: &WaveField, cfg: &RunConfig) -> Result<(WaveField, Vec<ObservableRecord>)> {
    let mut series = Vec::new();
    let out = propagators::evolve_with_snapshots(field, cfg, |_, _, rec| series.push(*rec))?;
    Ok((out, series))
}

fn linear_params(p: &SemiclassicalParams) -> SemiclassicalParams {
    SemiclassicalParams { lambda: 0.0, ..*p }
}

fn run_pair(preset: &Preset) -> Result<((WaveField, Vec<ObservableRecord>), (WaveField, Vec<ObservableRecord>))> {
    let u0 = preset.initial_field();
    let cfg = RunConfig::new(preset.params, preset.scheme, preset.t_final, preset.dt)?
        .with_snapshot_every(SERIES_EVERY);
    let lin = RunConfig {
        params: linear_params(&preset.params),
        ..cfg
    };
    let (u, v) = rayon::join(|| evolve_recorded(&u0, &cfg), || evolve_recorded(&u0, &lin));
    Ok((u?, v?))
}

fn expect_experiment(preset: &Preset, kind: Experiment) -> Result<()> {
    if preset.experiment != kind {
        return Err(Error::InvalidParams(format!(
            "preset '{}' is a {} run, expected {kind}",
            preset.name, preset.experiment
        )));
    }
    Ok(())
}

fn sup_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

#[derive(Clone, Debug, Serialize)]
pub struct FocalResults {
    pub regime: String,
    pub critical_alpha: f64,
    /// `sup_x ||u| - |v||` at the final time.
    pub sup_modulus_error: f64,
    /// `sup_x ||u|² - |v|²|` at the final time.
    pub sup_density_error: f64,
    pub l2_error: f64,
    pub sup_error: f64,
    /// `sup_x |Im(v e^{-iφ/ε}) - Im(a)|` against the single-phase profile
    /// `e^{iφ/ε} a`; absent when the final time is too close to the focus.
    pub maslov_error: Option<f64>,
    pub mass_drift_linear: f64,
    pub mass_drift_nonlinear: f64,
}

#[derive(Serialize)]
struct MaslovRow {
    x: f64,
    initial_re: f64,
    linear_im: f64,
    nonlinear_im: f64,
    predicted_im: f64,
}

/// `field · e^{-iφ(t,x)/ε}` with the eikonal phase of the quadratic data.
fn remove_eikonal_phase(field: &WaveField, t: f64, epsilon: f64, profile: &InitialProfile) -> Result<Vec<Complex64>> {
    let grid = field.grid();
    field
        .values()
        .iter()
        .enumerate()
        .map(|(j, z)| {
            let y = grid.node(j) - profile.center;
            let phase = if t == 0.0 { -0.5 * y * y } else { wkb::quadratic_wkb(t, grid.node(j), profile, 1)?.0 };
            Ok(z * Complex64::cis(-phase / epsilon))
        })
        .collect()
}

pub fn run_focal_preset(preset: &Preset, out_dir: &Path) -> Result<RunOutput<FocalResults>> {
    expect_experiment(preset, Experiment::Focal)?;
    let started = Instant::now();
    let p = preset.params;
    let profile = InitialProfile::focal_gaussian();
    let edge = profile.boundary_magnitude(&preset.grid);
    if edge > 1e-12 {
        log::warn!("initial envelope is {edge:.2e} at the domain ends");
    }
    let regime = wkb::classify_regime(p.alpha, CausticGeometry::FocalPoint, 1, p.sigma)?;
    let critical_alpha = wkb::criticality_index(CausticGeometry::FocalPoint, 1, p.sigma)?;

    let ((u, su), (v, sv)) = run_pair(preset)?;
    let (drift_u, energy_drift) = series_drifts(&preset.name, &su)?;
    let (drift_v, _) = series_drifts(&format!("{} (linear)", preset.name), &sv)?;

    let mut dir = ArtifactDir::create(out_dir, &preset.name)?;
    let u_init = preset.initial_field();
    dir.wave_field("initial.csv", &u_init)?;
    dir.wave_field("nonlinear_final.csv", &u)?;
    dir.wave_field("linear_final.csv", &v)?;
    let diff = u.sub(&v)?;
    dir.wave_field("error_final.csv", &diff)?;
    dir.series("series_nonlinear.csv", &su)?;
    dir.series("series_linear.csv", &sv)?;

    let t = preset.t_final;
    let eps = p.epsilon;
    let maslov_error = if (t - 1.0).abs() > wkb::DEFAULT_FOCUS_WINDOW {
        let predicted = wkb::focal_asymptotic(t, eps, &profile, 1, preset.grid, wkb::DEFAULT_FOCUS_WINDOW)?;
        let pred = remove_eikonal_phase(&predicted, t, eps, &profile)?;
        let lin = remove_eikonal_phase(&v, t, eps, &profile)?;
        let non = remove_eikonal_phase(&u, t, eps, &profile)?;
        let init = remove_eikonal_phase(&u_init, 0.0, eps, &profile)?;
        let grid = preset.grid;
        dir.rows(
            "maslov.csv",
            (0..grid.num_points).map(|j| MaslovRow {
                x: grid.node(j),
                initial_re: init[j].re,
                linear_im: lin[j].im,
                nonlinear_im: non[j].im,
                predicted_im: pred[j].im,
            }),
        )?;
        Some(lin.iter().zip(&pred).map(|(a, b)| (a.im - b.im).abs()).fold(0.0, f64::max))
    } else {
        None
    };

    let mod_u: Vec<f64> = u.values().iter().map(|z| z.norm()).collect();
    let mod_v: Vec<f64> = v.values().iter().map(|z| z.norm()).collect();
    let results = FocalResults {
        regime: regime.to_string(),
        critical_alpha,
        sup_modulus_error: sup_abs_diff(&mod_u, &mod_v),
        sup_density_error: sup_abs_diff(&observables::position_density(&u), &observables::position_density(&v)),
        l2_error: l2_norm(&diff),
        sup_error: diff.sup_norm(),
        maslov_error,
        mass_drift_linear: drift_v,
        mass_drift_nonlinear: drift_u,
    };
    log::info!("{}: regime {}, sup density error {:.3e}", preset.name, results.regime, results.sup_density_error);
    finish(
        dir,
        Finish {
            name: preset.name.clone(),
            experiment: "focal",
            preset: Some(preset.clone()),
            mass_drift: drift_u.max(drift_v),
            energy_drift: Some(energy_drift),
            started,
        },
        results,
    )
}

pub fn run_focal(alpha: f64, out_dir: &Path) -> Result<RunOutput<FocalResults>> {
    run_focal_preset(&Preset::focal(alpha)?, out_dir)
}

#[derive(Clone, Debug, Serialize)]
pub struct CuspResults {
    pub regime: String,
    pub critical_alpha: f64,
    /// `sup_x ||u|² - |v|²| / sup_x |v|²`.
    pub sup_relative_density_difference: f64,
    pub dominant_peak_linear: Option<usize>,
    pub dominant_peak_nonlinear: Option<usize>,
    /// Share of the nonlinear density spectrum's `Σ|c_k|²` outside the
    /// linear run's support band.
    pub out_of_band_fraction: f64,
    pub band_bins: usize,
    pub mass_drift_linear: f64,
    pub mass_drift_nonlinear: f64,
}

pub fn run_cusp_preset(preset: &Preset, out_dir: &Path) -> Result<RunOutput<CuspResults>> {
    expect_experiment(preset, Experiment::Cusp)?;
    let started = Instant::now();
    let p = preset.params;
    let regime = wkb::classify_regime(p.alpha, CausticGeometry::Cusp1D, 1, p.sigma)?;
    let critical_alpha = wkb::criticality_index(CausticGeometry::Cusp1D, 1, p.sigma)?;

    let ((u, su), (v, sv)) = run_pair(preset)?;
    let (drift_u, energy_drift) = series_drifts(&preset.name, &su)?;
    let (drift_v, _) = series_drifts(&format!("{} (linear)", preset.name), &sv)?;

    let rho_u = observables::position_density(&u);
    let rho_v = observables::position_density(&v);
    let peak_v = rho_v.iter().copied().fold(0.0, f64::max);
    let spec_u = observables::density_spectrum(&u);
    let spec_v = observables::density_spectrum(&v);
    let band = observables::support_band(&spec_v, BAND_THRESHOLD, BAND_DILATION);

    let mut dir = ArtifactDir::create(out_dir, &preset.name)?;
    dir.wave_field("initial.csv", &preset.initial_field())?;
    dir.wave_field("nonlinear_final.csv", &u)?;
    dir.wave_field("linear_final.csv", &v)?;
    dir.spectrum("density_spectrum_nonlinear.csv", &spec_u)?;
    dir.spectrum("density_spectrum_linear.csv", &spec_v)?;
    dir.series("series_nonlinear.csv", &su)?;
    dir.series("series_linear.csv", &sv)?;

    let results = CuspResults {
        regime: regime.to_string(),
        critical_alpha,
        sup_relative_density_difference: sup_abs_diff(&rho_u, &rho_v) / peak_v,
        dominant_peak_linear: observables::dominant_peak_index(&spec_v),
        dominant_peak_nonlinear: observables::dominant_peak_index(&spec_u),
        out_of_band_fraction: observables::out_of_band_fraction(&spec_u, &band),
        band_bins: band.iter().filter(|&&b| b).count(),
        mass_drift_linear: drift_v,
        mass_drift_nonlinear: drift_u,
    };
    finish(
        dir,
        Finish {
            name: preset.name.clone(),
            experiment: "cusp",
            preset: Some(preset.clone()),
            mass_drift: drift_u.max(drift_v),
            energy_drift: Some(energy_drift),
            started,
        },
        results,
    )
}

pub fn run_cusp(alpha: f64, out_dir: &Path) -> Result<RunOutput<CuspResults>> {
    run_cusp_preset(&Preset::cusp(alpha)?, out_dir)
}

#[derive(Clone, Debug, Serialize)]
pub struct ScatterResults {
    pub in_scattering_regime: bool,
    pub energy_initial: f64,
    pub energy_time_zero: f64,
    pub energy_scattered: f64,
    /// `‖S_{1.5T}ψ₋ - S_Tψ₋‖ / ‖ψ₋‖`.
    pub t_stability: f64,
    pub density_change_sup: f64,
    pub scattered_distance: f64,
}

pub fn run_scatter_preset(preset: &Preset, out_dir: &Path) -> Result<RunOutput<ScatterResults>> {
    expect_experiment(preset, Experiment::Scatter)?;
    let started = Instant::now();
    let cfg = preset.scattering_config()?;
    let psi = preset.initial_field();
    let stages = scattering::scatter_with_stages(&psi, &cfg)?;
    let mixed = scattering::mixed_state(&psi, &cfg)?;
    let long = scattering::scattering_apply(&psi, &cfg.with_t_scatter(1.5 * cfg.t_scatter))?;

    let mass_in = l2_norm(&psi);
    let mut drift = check_mass(&preset.name, mass_in, l2_norm(&stages.scattered))?;
    drift = drift.max(check_mass(&preset.name, mass_in, l2_norm(&mixed))?);

    let params = cfg.params();
    let energy_initial = observables::energy(&psi, &params);
    let energy_time_zero = observables::energy(&stages.at_time_zero, &params);
    let energy_scattered = observables::energy(&stages.scattered, &params);
    if params.lambda < 0.0 {
        for (stage, e) in [("input", energy_initial), ("time zero", energy_time_zero), ("output", energy_scattered)] {
            if e <= 0.0 {
                log::warn!("{}: non-positive energy {e:.3e} at {stage}; blow-up is not excluded", preset.name);
            }
        }
    }
    log::info!(
        "{}: energy {energy_initial:.6e} (input), {energy_time_zero:.6e} (t = 0), {energy_scattered:.6e} (output)",
        preset.name
    );

    let mut dir = ArtifactDir::create(out_dir, &preset.name)?;
    dir.wave_field("initial.csv", &psi)?;
    dir.wave_field("time_zero.csv", &stages.at_time_zero)?;
    dir.wave_field("mixed.csv", &mixed)?;
    dir.wave_field("scattered.csv", &stages.scattered)?;
    dir.spectrum("density_spectrum_scattered.csv", &observables::density_spectrum(&stages.scattered))?;

    let norm = mass_in.max(f64::MIN_POSITIVE);
    let results = ScatterResults {
        in_scattering_regime: cfg.in_scattering_regime(),
        energy_initial,
        energy_time_zero,
        energy_scattered,
        t_stability: l2_norm(&long.sub(&stages.scattered)?) / norm,
        density_change_sup: sup_abs_diff(
            &observables::position_density(&stages.scattered),
            &observables::position_density(&psi),
        ),
        scattered_distance: l2_norm(&stages.scattered.sub(&psi)?) / norm,
    };
    log::info!("{}: T-stability {:.3e}", preset.name, results.t_stability);
    finish(
        dir,
        Finish {
            name: preset.name.clone(),
            experiment: "scatter",
            preset: Some(preset.clone()),
            mass_drift: drift,
            energy_drift: Some(relative_change(energy_initial, energy_scattered)),
            started,
        },
        results,
    )
}

pub fn run_scatter(sigma: f64, lambda: f64, out_dir: &Path) -> Result<RunOutput<ScatterResults>> {
    run_scatter_preset(&Preset::scatter(sigma, lambda)?, out_dir)
}

/// Least-squares slope of `log y` against `log x`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct ConvergenceRow {
    pub dt: f64,
    pub lie_error: f64,
    pub strang_error: f64,
    pub lie_linear_error: f64,
    pub strang_linear_error: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConvergenceResults {
    pub rows: Vec<ConvergenceRow>,
    pub lie_slope: f64,
    pub strang_slope: f64,
    pub reference_dt: f64,
}

/// Data `e^{-2(x-π)²}` on `[0, 2π)` with `N = 256`, `ε = σ = λ = 1`, `T = 1`.
pub fn convergence_study(dts: &[f64]) -> Result<ConvergenceResults> {
    let grid = GridSpec::periodic_2pi(256)?;
    let u0 = WaveField::from_fn(grid, |x| Complex64::new((-2.0 * (x - std::f64::consts::PI).powi(2)).exp(), 0.0));
    let params = SemiclassicalParams::new(1.0, 1.0, 1.0, 1.0)?;
    let linear = linear_params(&params);
    let t = 1.0;
    let dt_min = dts.iter().copied().fold(f64::INFINITY, f64::min);
    let reference_dt = dt_min / 64.0;
    let reference = propagators::evolve(&u0, &RunConfig::new(params, SplitScheme::Strang, t, reference_dt)?)?;
    let exact_free = free_step(&u0, t, 1.0);

    let rows = dts
        .par_iter()
        .map(|&dt| -> Result<ConvergenceRow> {
            let err = |p: SemiclassicalParams, s: SplitScheme, target: &WaveField| -> Result<f64> {
                let out = propagators::evolve(&u0, &RunConfig::new(p, s, t, dt)?)?;
                Ok(l2_norm(&out.sub(target)?))
            };
            Ok(ConvergenceRow {
                dt,
                lie_error: err(params, SplitScheme::Lie, &reference)?,
                strang_error: err(params, SplitScheme::Strang, &reference)?,
                lie_linear_error: err(linear, SplitScheme::Lie, &exact_free)?,
                strang_linear_error: err(linear, SplitScheme::Strang, &exact_free)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let dts: Vec<f64> = rows.iter().map(|r| r.dt).collect();
    let lie: Vec<f64> = rows.iter().map(|r| r.lie_error).collect();
    let strang: Vec<f64> = rows.iter().map(|r| r.strang_error).collect();
    Ok(ConvergenceResults {
        lie_slope: loglog_slope(&dts, &lie),
        strang_slope: loglog_slope(&dts, &strang),
        rows,
        reference_dt,
    })
}

pub fn run_convergence(out_dir: &Path) -> Result<RunOutput<ConvergenceResults>> {
    let started = Instant::now();
    let results = convergence_study(&CONVERGENCE_DTS)?;
    let mut dir = ArtifactDir::create(out_dir, "convergence")?;
    dir.rows("convergence.csv", results.rows.iter())?;
    finish(
        dir,
        Finish {
            name: "convergence".into(),
            experiment: "converge",
            preset: None,
            mass_drift: 0.0,
            energy_drift: None,
            started,
        },
        results,
    )
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct Lemma3Row {
    pub epsilon: f64,
    pub num_points: usize,
    /// `max` over the sampled times of `‖u(t) - v(t)‖_{L²}`.
    pub sup_error: f64,
    pub final_error: f64,
    pub mass_drift: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Lemma3Results {
    pub sigma: f64,
    pub alpha: f64,
    pub rows: Vec<Lemma3Row>,
    pub sup_slope: f64,
    pub final_slope: f64,
    pub predicted_sup_exponent: f64,
    pub predicted_final_exponent: f64,
}

/// `u` by splitting and `v` by the exact free flow, compared at `t_final/samples` spacing.
pub fn lemma3_point(epsilon: f64, num_points: usize, sigma: f64, alpha: f64, dt: f64, samples: usize) -> Result<Lemma3Row> {
    let grid = GridSpec::periodic_2pi(num_points)?;
    let params = SemiclassicalParams::new(epsilon, sigma, alpha, 1.0)?;
    let t_final = preset::FOCAL_T;
    let steps = (t_final / dt).round() as usize;
    if !steps.is_multiple_of(samples) {
        return Err(Error::InvalidParams(format!("{steps} steps do not split into {samples} samples")));
    }
    let cfg = RunConfig::new(params, SplitScheme::Strang, t_final, dt)?.with_snapshot_every(steps / samples);
    let u0 = InitialProfile::focal_gaussian().sample(grid, epsilon);
    let mass0 = l2_norm(&u0);
    let mut sup_error = 0.0f64;
    let mut final_error = 0.0;
    let mut last_mass = mass0;
    propagators::evolve_with_snapshots(&u0, &cfg, |t, u, rec| {
        let v = free_step(&u0, t, epsilon);
        let e = l2_norm(&u.sub(&v).expect("same grid"));
        sup_error = sup_error.max(e);
        final_error = e;
        last_mass = rec.mass;
    })?;
    let mass_drift = check_mass(&format!("lemma3 eps={epsilon}"), mass0, last_mass)?;
    Ok(Lemma3Row {
        epsilon,
        num_points,
        sup_error,
        final_error,
        mass_drift,
    })
}

/// `N = 512·(1/50)/ε` so the grid resolves the `ε`-oscillations equally on every rung.
pub fn lemma3_study(epsilons: &[f64], sigma: f64, alpha: f64) -> Result<Lemma3Results> {
    let (predicted_sup_exponent, predicted_final_exponent) = wkb::lemma3_error_prediction(epsilons[0], alpha, sigma)?;
    let rows = epsilons
        .par_iter()
        .map(|&eps| {
            let n = (512.0 * (1.0 / 50.0) / eps).round() as usize;
            lemma3_point(eps, n, sigma, alpha, preset::DEFAULT_DT, 200)
        })
        .collect::<Result<Vec<_>>>()?;
    let eps: Vec<f64> = rows.iter().map(|r| r.epsilon).collect();
    let sup: Vec<f64> = rows.iter().map(|r| r.sup_error).collect();
    let fin: Vec<f64> = rows.iter().map(|r| r.final_error).collect();
    Ok(Lemma3Results {
        sigma,
        alpha,
        sup_slope: loglog_slope(&eps, &sup),
        final_slope: loglog_slope(&eps, &fin),
        rows,
        predicted_sup_exponent,
        predicted_final_exponent,
    })
}

pub fn run_lemma3_scaling(out_dir: &Path) -> Result<RunOutput<Lemma3Results>> {
    let started = Instant::now();
    let results = lemma3_study(&LEMMA3_EPSILONS, 2.0, 2.5)?;
    let drift = results.rows.iter().map(|r| r.mass_drift).fold(0.0, f64::max);
    let mut dir = ArtifactDir::create(out_dir, "lemma3")?;
    dir.rows("lemma3.csv", results.rows.iter())?;
    finish(
        dir,
        Finish {
            name: "lemma3".into(),
            experiment: "lemma3",
            preset: None,
            mass_drift: drift,
            energy_drift: None,
            started,
        },
        results,
    )
}

/// `count` superpositions of 1 to 20 modes with indices in `[-4N, 4N]`.
pub fn seeded_superpositions(seed: u64, count: usize, n: usize) -> Vec<BTreeMap<i64, Complex64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let span = 4 * n as i64;
    (0..count)
        .map(|_| {
            let len = rng.gen_range(1..=20);
            (0..len)
                .map(|_| {
                    let m = rng.gen_range(-span..=span);
                    (m, Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                })
                .collect()
        })
        .collect()
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct FoldRow {
    pub case: usize,
    pub n: usize,
    pub modes: usize,
    pub max_discrepancy: f64,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct ExactnessRow {
    pub case: usize,
    pub n: usize,
    pub epsilon: f64,
    pub t: f64,
    pub in_band: bool,
    pub sup_error: f64,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct TailRow {
    pub data: &'static str,
    pub n_coarse: usize,
    pub alias_l2: f64,
    pub tail_sum: f64,
    pub tail_bound_estimate: f64,
    pub decay_exponent: Option<f64>,
}

impl TailRow {
    fn new(data: &'static str, r: AliasReport) -> Self {
        TailRow {
            data,
            n_coarse: r.n_modes,
            alias_l2: r.alias_l2,
            tail_sum: r.tail_sum,
            tail_bound_estimate: r.tail_bound_estimate,
            decay_exponent: r.decay_exponent,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct AliasResults {
    pub fold: Vec<FoldRow>,
    pub exactness: Vec<ExactnessRow>,
    pub tails: Vec<TailRow>,
    pub max_fold_discrepancy: f64,
    pub max_in_band_error: f64,
    pub tails_monotone: bool,
}

pub const ALIAS_SEED: u64 = 20_240_601;

pub fn alias_study() -> Result<AliasResults> {
    let mut fold = Vec::new();
    for n in [8, 16, 32, 64] {
        for (i, modes) in seeded_superpositions(ALIAS_SEED + n as u64, 30, n).iter().enumerate() {
            fold.push(FoldRow {
                case: i,
                n,
                modes: modes.len(),
                max_discrepancy: aliasing::alias_fold_matches_dft(modes, n)?,
            });
        }
    }

    let mut exactness = Vec::new();
    let n = 64;
    let mut rng = ChaCha8Rng::seed_from_u64(ALIAS_SEED);
    for case in 0..20 {
        let modes: BTreeMap<i64, Complex64> = (0..5)
            .map(|_| (rng.gen_range(-31..=31), Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))))
            .collect();
        let (eps, t) = (1.0 / 150.0, 2.0);
        exactness.push(ExactnessRow {
            case,
            n,
            epsilon: eps,
            t,
            in_band: true,
            sup_error: aliasing::band_limited_exactness(&modes, eps, t, n)?,
        });
    }
    let outside = BTreeMap::from([(n as i64 / 2 + 1, Complex64::new(1.0, 0.0))]);
    exactness.push(ExactnessRow {
        case: 20,
        n,
        epsilon: 1.0,
        t: 1.0,
        in_band: false,
        sup_error: aliasing::band_limited_exactness(&outside, 1.0, 1.0, n)?,
    });

    let fine = GridSpec::periodic_2pi(4096)?;
    let pi = std::f64::consts::PI;
    let gaussian = WaveField::from_fn(fine, |x| Complex64::new((-8.0 * (x - pi).powi(2)).exp(), 0.0));
    let chirped = InitialProfile::focal_gaussian().sample(fine, preset::FOCAL_EPSILON);
    let mut tails = Vec::new();
    for (name, field) in [("gaussian", &gaussian), ("chirped", &chirped)] {
        for nc in [64, 128, 256, 512, 1024] {
            tails.push(TailRow::new(name, aliasing::truncation_tail(field, nc)?));
        }
    }
    let tails_monotone = ["gaussian", "chirped"].iter().all(|name| {
        let t: Vec<f64> = tails.iter().filter(|r| r.data == *name).map(|r| r.tail_sum).collect();
        t.windows(2).all(|w| w[1] <= w[0])
    });

    Ok(AliasResults {
        max_fold_discrepancy: fold.iter().map(|r| r.max_discrepancy).fold(0.0, f64::max),
        max_in_band_error: exactness
            .iter()
            .filter(|r| r.in_band)
            .map(|r| r.sup_error)
            .fold(0.0, f64::max),
        fold,
        exactness,
        tails,
        tails_monotone,
    })
}

pub fn run_alias_check(out_dir: &Path) -> Result<RunOutput<AliasResults>> {
    let started = Instant::now();
    let results = alias_study()?;
    let mut dir = ArtifactDir::create(out_dir, "alias")?;
    dir.rows("alias_fold.csv", results.fold.iter())?;
    dir.rows("band_limited.csv", results.exactness.iter())?;
    dir.rows("truncation_tail.csv", results.tails.iter())?;
    finish(
        dir,
        Finish {
            name: "alias".into(),
            experiment: "alias",
            preset: None,
            mass_drift: 0.0,
            energy_drift: None,
            started,
        },
        results,
    )
}
