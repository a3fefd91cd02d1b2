//! Diagnostics computed from wave fields: conserved quantities, the Σ-norm,
//! densities and their spectra, and the chirp-compensated fields used to read
//! off the Maslov phase.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::propagators::SemiclassicalParams;
use crate::spectral::{forward_dft, l2_norm, SpectrumField, WaveField};

/// One row of an observable time series.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObservableRecord {
    pub t: f64,
    pub mass: f64,
    pub energy: f64,
    pub sup_norm: f64,
    pub sigma_norm: f64,
}

/// Observables at time `t`; the Σ-norm weight is centered at the domain midpoint.
pub fn record(t: f64, field: &WaveField, params: &SemiclassicalParams) -> ObservableRecord {
    ObservableRecord {
        t,
        mass: mass(field),
        energy: energy(field, params),
        sup_norm: field.sup_norm(),
        sigma_norm: sigma_norm(field, field.grid().midpoint()),
    }
}

/// `‖u‖_{L²}`.
pub fn mass(field: &WaveField) -> f64 {
    l2_norm(field)
}

/// `‖∂_x u‖²_{L²}` by Parseval on the spectral derivative.
fn gradient_sq(field: &WaveField) -> f64 {
    let spec = forward_dft(field);
    let grid = spec.grid();
    let sum: f64 = spec
        .iter()
        .map(|(k, c)| {
            let xi = grid.wavenumber(k);
            xi * xi * c.norm_sqr()
        })
        .sum();
    sum * grid.length()
}

/// `(1/2)‖ε∂_x u‖² + (λ ε^α/(σ+1)) ‖u‖^{2σ+2}_{L^{2σ+2}}`.
pub fn energy(field: &WaveField, params: &SemiclassicalParams) -> f64 {
    let eps = params.epsilon;
    let kinetic = 0.5 * eps * eps * gradient_sq(field);
    let p = params.sigma + 1.0;
    let potential_integral: f64 =
        field.values().iter().map(|z| z.norm_sqr().powf(p)).sum::<f64>() * field.grid().dx();
    kinetic + params.lambda * eps.powf(params.alpha) / p * potential_integral
}

/// `‖f‖ + ‖(x - center) f‖ + ‖∂_x f‖`, all in `L²`.
pub fn sigma_norm(field: &WaveField, center: f64) -> f64 {
    let grid = field.grid();
    let weighted: f64 = field
        .values()
        .iter()
        .enumerate()
        .map(|(j, z)| {
            let x = grid.node(j) - center;
            x * x * z.norm_sqr()
        })
        .sum::<f64>()
        * grid.dx();
    l2_norm(field) + weighted.sqrt() + gradient_sq(field).sqrt()
}

pub fn position_density(field: &WaveField) -> Vec<f64> {
    field.values().iter().map(|z| z.norm_sqr()).collect()
}

/// Forward DFT of `|u|²`.
pub fn density_spectrum(field: &WaveField) -> SpectrumField {
    let density = field
        .values()
        .iter()
        .map(|z| Complex64::new(z.norm_sqr(), 0.0))
        .collect();
    let as_field = WaveField::new(*field.grid(), density).expect("same grid");
    forward_dft(&as_field)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChirpSign {
    Plus,
    Minus,
}

impl ChirpSign {
    fn value(self) -> f64 {
        match self {
            ChirpSign::Plus => 1.0,
            ChirpSign::Minus => -1.0,
        }
    }
}

/// `u_j · exp(± i (x_j - center)²/(2ε))`.
pub fn maslov_adjusted(field: &WaveField, epsilon: f64, sign: ChirpSign, center: f64) -> Vec<Complex64> {
    let grid = field.grid();
    let s = sign.value();
    field
        .values()
        .iter()
        .enumerate()
        .map(|(j, z)| {
            let y = grid.node(j) - center;
            z * Complex64::cis(s * y * y / (2.0 * epsilon))
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorNorms {
    pub l2: f64,
    pub sup: f64,
}

pub fn error_norms(a: &WaveField, b: &WaveField) -> Result<ErrorNorms> {
    if a.grid() != b.grid() {
        return Err(Error::GridMismatch);
    }
    let diff = a.sub(b)?;
    Ok(ErrorNorms {
        l2: l2_norm(&diff),
        sup: diff.sup_norm(),
    })
}

/// Spectrum magnitude folded onto `|k| = 0..=N/2` (max of the `±k` entries).
pub fn folded_magnitudes(spec: &SpectrumField) -> Vec<f64> {
    let half = spec.grid().num_points / 2;
    (0..=half as i64)
        .map(|k| spec.get(k).norm().max(spec.get(-k).norm()))
        .collect()
}

/// `|k| ≥ 1` with the largest magnitude.
pub fn dominant_peak_index(spec: &SpectrumField) -> Option<usize> {
    let folded = folded_magnitudes(spec);
    (1..folded.len()).max_by(|&a, &b| folded[a].total_cmp(&folded[b]))
}

/// Strict local maxima of the folded magnitude at `|k| ≥ 1` exceeding
/// `rel_threshold` times the largest magnitude (including `k = 0`).
pub fn local_maxima(spec: &SpectrumField, rel_threshold: f64) -> Vec<usize> {
    let m = folded_magnitudes(spec);
    let peak = m.iter().copied().fold(0.0, f64::max);
    (1..m.len().saturating_sub(1))
        .filter(|&q| m[q] > m[q - 1] && m[q] >= m[q + 1] && m[q] > rel_threshold * peak)
        .collect()
}

/// Mask (centered order) of the bins whose magnitude exceeds `rel_threshold`
/// times the spectrum's peak, dilated by `dilation` bins on each side.
pub fn support_band(spec: &SpectrumField, rel_threshold: f64, dilation: usize) -> Vec<bool> {
    let mags = spec.magnitudes();
    let n = mags.len();
    let peak = mags.iter().copied().fold(0.0, f64::max);
    let core: Vec<bool> = mags.iter().map(|&m| m > rel_threshold * peak).collect();
    let d = dilation as isize;
    (0..n as isize)
        .map(|i| (-d..=d).any(|s| core[(i + s).rem_euclid(n as isize) as usize]))
        .collect()
}

/// Fraction of `Σ|c_k|²` carried by bins outside `band`.
pub fn out_of_band_fraction(spec: &SpectrumField, band: &[bool]) -> f64 {
    let total: f64 = spec.coeffs().iter().map(|c| c.norm_sqr()).sum();
    if total == 0.0 {
        return 0.0;
    }
    let outside: f64 = spec
        .coeffs()
        .iter()
        .zip(band)
        .filter(|(_, &inside)| !inside)
        .map(|(c, _)| c.norm_sqr())
        .sum();
    outside / total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::GridSpec;
    use std::f64::consts::PI;

    fn p(eps: f64, sigma: f64, alpha: f64, lambda: f64) -> SemiclassicalParams {
        SemiclassicalParams::new(eps, sigma, alpha, lambda).unwrap()
    }

    #[test]
    fn energy_of_plane_wave() {
        let g = GridSpec::periodic_2pi(32).unwrap();
        let u = WaveField::from_fn(g, Complex64::cis);
        assert!((energy(&u, &p(1.0, 1.0, 1.0, 1.0)) - 2.0 * PI).abs() < 1e-12);
        assert_eq!(energy(&WaveField::zeros(g), &p(1.0, 1.0, 1.0, 1.0)), 0.0);
    }

    #[test]
    fn sigma_norm_examples() {
        let g = GridSpec::new(-PI, PI, 4096).unwrap();
        assert_eq!(sigma_norm(&WaveField::zeros(g), 0.0), 0.0);
        let one = WaveField::from_fn(g, |_| Complex64::new(1.0, 0.0));
        let expect = (2.0 * PI).sqrt() + (2.0 * PI.powi(3) / 3.0).sqrt();
        // rectangle rule on x² is only second order at the jump of the periodic extension
        assert!((sigma_norm(&one, 0.0) - expect).abs() < 1e-5);
    }

    #[test]
    fn densities() {
        let g = GridSpec::periodic_2pi(16).unwrap();
        let u = WaveField::from_fn(g, |x| Complex64::cis(3.0 * x));
        assert!(position_density(&u).iter().all(|d| (d - 1.0).abs() < 1e-14));
        assert!(position_density(&WaveField::zeros(g)).iter().all(|&d| d == 0.0));

        let s = density_spectrum(&u);
        assert!((s.get(0) - 1.0).norm() < 1e-14);
        assert!(s.iter().filter(|(k, _)| *k != 0).all(|(_, c)| c.norm() < 1e-14));
    }

    #[test]
    fn density_spectrum_of_cosine_density() {
        // |u|² = 1 + cos(8θ) / 2 has peaks at ±8
        let g = GridSpec::periodic_2pi(64).unwrap();
        let u = WaveField::from_fn(g, |x| Complex64::new((1.0 + 0.5 * (8.0 * x).cos()).sqrt(), 0.0));
        let s = density_spectrum(&u);
        assert!((s.get(8).re - 0.25).abs() < 1e-14);
        assert!((s.get(-8).re - 0.25).abs() < 1e-14);
        assert_eq!(dominant_peak_index(&s), Some(8));
        assert_eq!(local_maxima(&s, 0.01), vec![8]);
    }

    #[test]
    fn maslov_adjusted_cancels_own_chirp() {
        let eps = 0.01;
        let g = GridSpec::periodic_2pi(256).unwrap();
        let u = WaveField::from_fn(g, |x| Complex64::cis(-(x - PI).powi(2) / (2.0 * eps)));
        let adj = maslov_adjusted(&u, eps, ChirpSign::Plus, PI);
        assert!(adj.iter().all(|z| (z - 1.0).norm() < 1e-12));
    }

    #[test]
    fn error_norm_examples() {
        let g = GridSpec::periodic_2pi(64).unwrap();
        let a = WaveField::from_fn(g, |x| Complex64::new(x.sin(), 0.0));
        let e = error_norms(&a, &a).unwrap();
        assert_eq!((e.l2, e.sup), (0.0, 0.0));
        let e = error_norms(&a, &WaveField::zeros(g)).unwrap();
        assert!((e.l2 - l2_norm(&a)).abs() < 1e-15);
        assert!((e.sup - a.sup_norm()).abs() < 1e-15);
        let other = WaveField::zeros(GridSpec::periodic_2pi(32).unwrap());
        assert!(matches!(error_norms(&a, &other), Err(Error::GridMismatch)));
    }

    #[test]
    fn band_and_out_of_band() {
        let g = GridSpec::periodic_2pi(64).unwrap();
        let mut s = SpectrumField::zeros(g);
        s.set(0, Complex64::new(1.0, 0.0));
        s.set(20, Complex64::new(0.5, 0.0));
        let mut only_dc = SpectrumField::zeros(g);
        only_dc.set(0, Complex64::new(1.0, 0.0));
        let band = support_band(&only_dc, 1e-3, 2);
        assert_eq!(band.iter().filter(|&&b| b).count(), 5);
        assert!((out_of_band_fraction(&s, &band) - 0.25 / 1.25).abs() < 1e-15);
    }
}
