//! Closed-form geometric-optics references and caustic bookkeeping.
//!
//! Profiles are written in the centered variable `y = x - center`. The
//! quadratic phase `φ₀(y) = -y²/2` focuses at `(t, y) = (1, 0)`; the cosine
//! phase `φ₀(y) = cos y` develops a cusp at `t = 1`.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{GridSpec, WaveField};

/// Default half-width of the time window around the focus where the
/// single-phase profile is not evaluated.
pub const DEFAULT_FOCUS_WINDOW: f64 = 0.05;

/// Default half-range `|y| ≤ y_max` scanned for cusp critical points.
pub const DEFAULT_CUSP_SCAN: f64 = 4.0 * PI;

/// Caustic geometries with their boundary-layer exponents: amplitude
/// `ε^{-ℓ}` on a layer of width `ε^k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CausticGeometry {
    FocalPoint,
    Cusp1D,
}

impl CausticGeometry {
    /// `(k, ℓ)` in dimension `n`.
    pub fn layer_exponents(self, n: u32) -> (f64, f64) {
        match self {
            CausticGeometry::FocalPoint => (1.0, n as f64 / 2.0),
            CausticGeometry::Cusp1D => (2.0 / 3.0, 1.0 / 3.0),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    LinearCausticLinearProp,
    LinearCausticNonlinearProp,
    NonlinearCausticLinearProp,
    NonlinearCausticNonlinearProp,
    Supercritical,
}

impl Regime {
    pub fn is_linear_caustic(self) -> bool {
        matches!(self, Regime::LinearCausticLinearProp | Regime::LinearCausticNonlinearProp)
    }

    pub fn is_nonlinear_caustic(self) -> bool {
        matches!(
            self,
            Regime::NonlinearCausticLinearProp | Regime::NonlinearCausticNonlinearProp
        )
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Regime::LinearCausticLinearProp => "linear caustic, linear propagation",
            Regime::LinearCausticNonlinearProp => "linear caustic, nonlinear propagation",
            Regime::NonlinearCausticLinearProp => "nonlinear caustic, linear propagation",
            Regime::NonlinearCausticNonlinearProp => "nonlinear caustic, nonlinear propagation",
            Regime::Supercritical => "supercritical caustic",
        };
        f.write_str(s)
    }
}

/// Shape of the initial phase, used to pick the right closed forms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhaseKind {
    /// `φ₀(y) = -y²/2`
    Quadratic,
    /// `φ₀(y) = cos y`
    Cosine,
    /// `φ₀ = 0`
    Flat,
}

type Envelope = Arc<dyn Fn(f64) -> Complex64 + Send + Sync>;

/// Initial data `f(y) e^{iφ₀(y)/ε}` with `y = x - center`.
#[derive(Clone)]
pub struct InitialProfile {
    envelope: Envelope,
    phase: PhaseKind,
    pub center: f64,
}

impl fmt::Debug for InitialProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("InitialProfile")
            .field("phase", &self.phase)
            .field("center", &self.center)
            .finish_non_exhaustive()
    }
}

impl InitialProfile {
    pub fn new(
        envelope: impl Fn(f64) -> Complex64 + Send + Sync + 'static,
        phase: PhaseKind,
        center: f64,
    ) -> Self {
        InitialProfile {
            envelope: Arc::new(envelope),
            phase,
            center,
        }
    }

    /// `f(y) = e^{-2y²}` with a quadratic phase, centered at π.
    pub fn focal_gaussian() -> Self {
        Self::new(|y| Complex64::new((-2.0 * y * y).exp(), 0.0), PhaseKind::Quadratic, PI)
    }

    /// `f(y) = e^{-2y²}` with the cosine phase, centered at π, so that the
    /// data read `exp(-2(x-π)² - i cos(x)/ε)`.
    pub fn cusp_gaussian() -> Self {
        Self::new(|y| Complex64::new((-2.0 * y * y).exp(), 0.0), PhaseKind::Cosine, PI)
    }

    pub fn phase_kind(&self) -> PhaseKind {
        self.phase
    }

    pub fn envelope(&self, y: f64) -> Complex64 {
        (self.envelope)(y)
    }

    pub fn phase(&self, y: f64) -> f64 {
        match self.phase {
            PhaseKind::Quadratic => -0.5 * y * y,
            PhaseKind::Cosine => y.cos(),
            PhaseKind::Flat => 0.0,
        }
    }

    /// Samples `f(x - c) e^{iφ₀(x - c)/ε}` on `grid`.
    pub fn sample(&self, grid: GridSpec, epsilon: f64) -> WaveField {
        WaveField::from_fn(grid, |x| {
            let y = x - self.center;
            self.envelope(y) * Complex64::cis(self.phase(y) / epsilon)
        })
    }

    /// Largest `|f|` at the two domain ends.
    pub fn boundary_magnitude(&self, grid: &GridSpec) -> f64 {
        let a = self.envelope(grid.x_min - self.center).norm();
        let b = self.envelope(grid.x_max - self.center).norm();
        a.max(b)
    }
}

/// `(1-t)^{-n/2}` continued through the focus: `e^{-inπ/2}(t-1)^{-n/2}` for
/// `t > 1`.
fn focal_amplification(t: f64, n: u32) -> Complex64 {
    let half_n = n as f64 / 2.0;
    if t < 1.0 {
        Complex64::new((1.0 - t).powf(-half_n), 0.0)
    } else {
        Complex64::from_polar((t - 1.0).powf(-half_n), -(n as f64) * FRAC_PI_2)
    }
}

/// Eikonal phase `|y|²/(2(t-1))` and transport amplitude
/// `(1-t)^{-n/2} f(y/(1-t))` for the quadratic initial phase. Past the focus
/// the amplitude carries the Maslov factor `e^{-inπ/2}`.
pub fn quadratic_wkb(t: f64, x: f64, profile: &InitialProfile, n: u32) -> Result<(f64, Complex64)> {
    if (t - 1.0).abs() < 1e-12 {
        return Err(Error::AtCaustic(t));
    }
    let y = x - profile.center;
    let phase = y * y / (2.0 * (t - 1.0));
    let amplitude = focal_amplification(t, n) * profile.envelope(y / (1.0 - t));
    Ok((phase, amplitude))
}

/// Samples the single-phase asymptotic profile of the free solution with
/// quadratic initial phase, `e^{iφ(t,y)/ε} a(t,y)`, on `grid`.
pub fn focal_asymptotic(
    t: f64,
    epsilon: f64,
    profile: &InitialProfile,
    n: u32,
    grid: GridSpec,
    focus_window: f64,
) -> Result<WaveField> {
    if (t - 1.0).abs() <= focus_window {
        return Err(Error::TooCloseToFocus { t, delta: focus_window });
    }
    // the envelope is magnified by |1 - t|; it must still fit in the domain
    let stretched_edge = {
        let a = profile.envelope((grid.x_min - profile.center) / (1.0 - t)).norm();
        let b = profile.envelope((grid.x_max - profile.center) / (1.0 - t)).norm();
        a.max(b)
    };
    if stretched_edge > 1e-8 {
        log::warn!("focal_asymptotic: profile at t = {t} reaches the domain ends ({stretched_edge:.2e})");
    }
    let mut values = Vec::with_capacity(grid.num_points);
    for x in grid.nodes() {
        let (phase, amp) = quadratic_wkb(t, x, profile, n)?;
        values.push(amp * Complex64::cis(phase / epsilon));
    }
    WaveField::new(grid, values)
}

/// `α_c = 1 + 2ℓσ - k`: `nσ` for a focal point, `(2σ+1)/3` for the 1-D cusp.
pub fn criticality_index(geom: CausticGeometry, n: u32, sigma: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidParams("dimension must be >= 1".into()));
    }
    if geom == CausticGeometry::Cusp1D && n != 1 {
        return Err(Error::UnsupportedDimension(n));
    }
    if !(sigma > 0.0) {
        return Err(Error::InvalidParams(format!("sigma must be > 0, got {sigma}")));
    }
    let (k, ell) = geom.layer_exponents(n);
    Ok(1.0 + 2.0 * ell * sigma - k)
}

const REGIME_TOL: f64 = 1e-12;

/// Places `α` in the caustic/propagation table. Propagation is nonlinear at
/// `α = 1`; the caustic is linear above `α_c`, nonlinear at `α_c`, and
/// supercritical below.
pub fn classify_regime(alpha: f64, geom: CausticGeometry, n: u32, sigma: f64) -> Result<Regime> {
    if !(alpha >= 1.0 - REGIME_TOL) {
        return Err(Error::InvalidParams(format!("alpha must be >= 1, got {alpha}")));
    }
    let critical = criticality_index(geom, n, sigma)?;
    let nonlinear_prop = (alpha - 1.0).abs() <= REGIME_TOL;
    let tol = REGIME_TOL * critical.abs().max(1.0);
    let regime = if (alpha - critical).abs() <= tol {
        if nonlinear_prop {
            Regime::NonlinearCausticNonlinearProp
        } else {
            Regime::NonlinearCausticLinearProp
        }
    } else if alpha > critical {
        if nonlinear_prop {
            Regime::LinearCausticNonlinearProp
        } else {
            Regime::LinearCausticLinearProp
        }
    } else {
        Regime::Supercritical
    };
    Ok(regime)
}

/// Whether `(t, x)` (centered `x`) lies on the cusp caustic of `φ₀ = cos`,
/// i.e. some `y` satisfies `(y - x)/t = sin y` and `1/t = cos y`.
pub fn cusp_caustic_contains(t: f64, x: f64, tol: f64) -> bool {
    cusp_caustic_contains_within(t, x, tol, DEFAULT_CUSP_SCAN)
}

/// [`cusp_caustic_contains`] scanning the branches of `cos y = 1/t` with
/// `|y| ≤ y_max`.
pub fn cusp_caustic_contains_within(t: f64, x: f64, tol: f64, y_max: f64) -> bool {
    cusp_critical_points(t, y_max)
        .into_iter()
        .any(|y| (y - x - t * y.sin()).abs() <= tol)
}

/// Roots of `cos y = 1/t` with `|y| ≤ y_max`; empty before the caustic forms.
pub fn cusp_critical_points(t: f64, y_max: f64) -> Vec<f64> {
    if !(t >= 1.0) {
        return Vec::new();
    }
    let base = (1.0 / t).acos();
    let m_max = ((y_max + base) / (2.0 * PI)).ceil() as i64;
    let mut roots = Vec::new();
    for m in -m_max..=m_max {
        let shift = 2.0 * PI * m as f64;
        for y in [shift + base, shift - base] {
            if y.abs() <= y_max && !roots.contains(&y) {
                roots.push(y);
            }
        }
    }
    roots
}

/// Points `(y - t sin y)` of the cusp caustic at time `t`, one per critical point.
pub fn cusp_caustic_points(t: f64, y_max: f64) -> Vec<f64> {
    cusp_critical_points(t, y_max)
        .into_iter()
        .map(|y| y - t * y.sin())
        .collect()
}

/// Predicted exponents of the `u - v` error for the focal problem:
/// `(α - σ)` for `sup_t ‖u - v‖_{L²}` and `min(1, α - σ)` at `t = 2`.
pub fn lemma3_error_prediction(epsilon: f64, alpha: f64, sigma: f64) -> Result<(f64, f64)> {
    if !(epsilon > 0.0) {
        return Err(Error::InvalidParams(format!("epsilon must be > 0, got {epsilon}")));
    }
    if !(alpha > 1.0_f64.max(sigma)) {
        return Err(Error::HypothesisViolated(format!(
            "need alpha > max(1, sigma); got alpha = {alpha}, sigma = {sigma}"
        )));
    }
    let exponent = alpha - sigma;
    Ok((exponent, exponent.min(1.0)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_wkb_examples() {
        let prof = InitialProfile::focal_gaussian();
        let c = prof.center;
        let x = c + 0.3;
        let (phase, amp) = quadratic_wkb(0.0, x, &prof, 1).unwrap();
        assert!((phase + 0.045).abs() < 1e-15);
        assert!((amp - prof.envelope(0.3)).norm() < 1e-15);

        let (_, amp) = quadratic_wkb(0.5, x, &prof, 1).unwrap();
        assert!((amp - 2f64.sqrt() * prof.envelope(0.6)).norm() < 1e-14);

        let (phase, amp) = quadratic_wkb(2.0, x, &prof, 1).unwrap();
        assert!((phase - 0.045).abs() < 1e-15);
        let expect = Complex64::new(0.0, -1.0) * prof.envelope(-0.3);
        assert!((amp - expect).norm() < 1e-15);
        assert!((amp.norm() - prof.envelope(-0.3).norm()).abs() < 1e-15);

        assert!(matches!(quadratic_wkb(1.0, x, &prof, 1), Err(Error::AtCaustic(_))));
    }

    #[test]
    fn focal_asymptotic_window_and_initial_limit() {
        let prof = InitialProfile::focal_gaussian();
        let g = GridSpec::periodic_2pi(512).unwrap();
        assert!(matches!(
            focal_asymptotic(1.02, 0.01, &prof, 1, g, DEFAULT_FOCUS_WINDOW),
            Err(Error::TooCloseToFocus { .. })
        ));
        let eps = 0.02;
        let near0 = focal_asymptotic(1e-9, eps, &prof, 1, g, DEFAULT_FOCUS_WINDOW).unwrap();
        let init = prof.sample(g, eps);
        for (a, b) in near0.values().iter().zip(init.values()) {
            assert!((a - b).norm() < 1e-6);
        }
    }

    #[test]
    fn focal_asymptotic_at_two_is_maslov_shifted_reflection() {
        let prof = InitialProfile::focal_gaussian();
        let g = GridSpec::periodic_2pi(256).unwrap();
        let eps = 1.0 / 150.0;
        let v = focal_asymptotic(2.0, eps, &prof, 1, g, DEFAULT_FOCUS_WINDOW).unwrap();
        for (j, z) in v.values().iter().enumerate() {
            let y = g.node(j) - PI;
            let expect = Complex64::new(0.0, -1.0) * Complex64::cis(y * y / (2.0 * eps)) * prof.envelope(-y);
            assert!((z - expect).norm() < 1e-12);
        }
    }

    #[test]
    fn modulus_symmetry_about_focus() {
        let prof = InitialProfile::new(
            |y| Complex64::new((-(y - 0.2).powi(2)).exp(), 0.1 * y),
            PhaseKind::Quadratic,
            0.0,
        );
        for &s in &[0.1, 0.4, 0.9] {
            for &x in &[-1.0, -0.2, 0.0, 0.35] {
                let (_, a) = quadratic_wkb(1.0 - s, x, &prof, 1).unwrap();
                let (_, b) = quadratic_wkb(1.0 + s, -x, &prof, 1).unwrap();
                assert!((a.norm() - b.norm()).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn criticality_values() {
        assert_eq!(criticality_index(CausticGeometry::FocalPoint, 1, 2.0).unwrap(), 2.0);
        assert!((criticality_index(CausticGeometry::Cusp1D, 1, 4.0).unwrap() - 3.0).abs() < 1e-15);
        assert!((criticality_index(CausticGeometry::Cusp1D, 1, 1.0).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(criticality_index(CausticGeometry::FocalPoint, 3, 1.0).unwrap(), 3.0);
        assert!(matches!(
            criticality_index(CausticGeometry::Cusp1D, 2, 1.0),
            Err(Error::UnsupportedDimension(2))
        ));
    }

    #[test]
    fn criticality_increases_with_sigma() {
        for geom in [CausticGeometry::FocalPoint, CausticGeometry::Cusp1D] {
            let vals: Vec<f64> = (1..20)
                .map(|i| criticality_index(geom, 1, 0.25 * i as f64).unwrap())
                .collect();
            assert!(vals.windows(2).all(|w| w[1] > w[0]));
        }
    }

    #[test]
    fn focal_regimes() {
        let f = CausticGeometry::FocalPoint;
        assert_eq!(classify_regime(2.5, f, 1, 2.0).unwrap(), Regime::LinearCausticLinearProp);
        assert_eq!(classify_regime(2.0, f, 1, 2.0).unwrap(), Regime::NonlinearCausticLinearProp);
        assert_eq!(classify_regime(1.5, f, 1, 2.0).unwrap(), Regime::Supercritical);
        assert_eq!(classify_regime(1.0, f, 1, 0.5).unwrap(), Regime::LinearCausticNonlinearProp);
        assert_eq!(classify_regime(1.0, f, 1, 1.0).unwrap(), Regime::NonlinearCausticNonlinearProp);
        assert!(classify_regime(0.5, f, 1, 1.0).is_err());
    }

    #[test]
    fn regime_boundary_for_many_sigmas() {
        for geom in [CausticGeometry::FocalPoint, CausticGeometry::Cusp1D] {
            for i in 0..12 {
                let sigma = 1.0 + 0.5 * i as f64;
                let ac = criticality_index(geom, 1, sigma).unwrap();
                assert!(classify_regime(ac + 0.1, geom, 1, sigma).unwrap().is_linear_caustic());
                assert!(classify_regime(ac, geom, 1, sigma).unwrap().is_nonlinear_caustic());
            }
        }
    }

    #[test]
    fn cusp_membership() {
        for &x in &[-3.0, 0.0, 0.5, 2.0] {
            assert!(!cusp_caustic_contains(0.7, x, 1e-3));
        }
        // t = 1: tips at 2πZ
        assert!(cusp_caustic_contains(1.0, 0.0, 1e-9));
        assert!(cusp_caustic_contains(1.0, 2.0 * PI, 1e-9));
        assert!(!cusp_caustic_contains(1.0, 0.5, 1e-3));
        // t = 2: a point of the parametric curve
        let y = 0.5f64.acos();
        let x = y - 2.0 * y.sin();
        assert!(cusp_caustic_contains(2.0, x, 1e-12));
        assert!(cusp_caustic_contains(2.0, -x, 1e-12));
    }

    #[test]
    fn cusp_membership_is_symmetric() {
        for i in 0..200 {
            let t = 0.9 + 0.013 * i as f64;
            for j in 0..40 {
                let x = -6.0 + 0.31 * j as f64;
                assert_eq!(cusp_caustic_contains(t, x, 0.05), cusp_caustic_contains(t, -x, 0.05));
            }
        }
    }

    #[test]
    fn lemma3_exponents() {
        assert_eq!(lemma3_error_prediction(0.01, 2.5, 2.0).unwrap(), (0.5, 0.5));
        assert_eq!(lemma3_error_prediction(0.01, 3.5, 2.0).unwrap(), (1.5, 1.0));
        assert!(matches!(
            lemma3_error_prediction(0.01, 2.0, 2.0),
            Err(Error::HypothesisViolated(_))
        ));
        assert!(lemma3_error_prediction(0.01, 1.0, 0.5).is_err());
    }
}
