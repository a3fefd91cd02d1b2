//! Aliasing and truncation diagnostics for the collocation scheme on `[0, 2π)`.
//!
//! Sampling `Σ_m f̂_m e^{imx}` on `N` points folds every mode onto
//! `f#_k = Σ_j f̂_{k+jN}`; the modes beyond the Nyquist index are lost.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::propagators::free_step;
use crate::spectral::{forward_dft, GridSpec, SpectrumField, WaveField};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AliasReport {
    pub n_modes: usize,
    /// `L²` norm of the folded-minus-exact difference on the coarse grid.
    pub alias_l2: f64,
    /// `Σ_{|k| > N/2} |ζ̂_k|` measured on the fine grid.
    pub tail_sum: f64,
    /// `C N^{-m̂}` with `(C, m̂)` fitted on the dyadic ladder.
    pub tail_bound_estimate: f64,
    pub decay_exponent: Option<f64>,
}

/// Index in `[-N/2, N/2)` that mode `m` lands on.
pub fn folded_index(m: i64, n: usize) -> i64 {
    let n = n as i64;
    (m + n / 2).rem_euclid(n) - n / 2
}

/// `f#_k = Σ_j f̂_{k+jN}` on the `N`-point grid of `[0, 2π)`.
pub fn alias_fold(exact_coeffs: &BTreeMap<i64, Complex64>, n: usize) -> Result<SpectrumField> {
    let mut spec = SpectrumField::zeros(GridSpec::periodic_2pi(n)?);
    for (&m, &c) in exact_coeffs {
        let k = folded_index(m, n);
        spec.set(k, spec.get(k) + c);
    }
    Ok(spec)
}

/// `Σ_m f̂_m e^{imx}` on `grid`.
pub fn synthesize(modes: &BTreeMap<i64, Complex64>, grid: GridSpec) -> WaveField {
    WaveField::from_fn(grid, |x| {
        modes
            .iter()
            .map(|(&m, &c)| c * Complex64::cis(m as f64 * x))
            .sum()
    })
}

/// `max_k |DFT(samples)_k - f#_k|`.
pub fn alias_fold_matches_dft(exact_coeffs: &BTreeMap<i64, Complex64>, n: usize) -> Result<f64> {
    let folded = alias_fold(exact_coeffs, n)?;
    let dft = forward_dft(&synthesize(exact_coeffs, *folded.grid()));
    Ok(dft
        .coeffs()
        .iter()
        .zip(folded.coeffs())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max))
}

fn tail_sum(fine: &SpectrumField, n_coarse: usize) -> f64 {
    let cut = (n_coarse / 2) as i64;
    fine.iter()
        .filter(|(k, _)| k.abs() > cut)
        .map(|(_, c)| c.norm())
        .sum()
}

/// Least-squares `log y = log C - m log N`; `None` when any value is zero.
fn fit_power_law(ns: &[usize], ys: &[f64]) -> Option<(f64, f64)> {
    if ys.iter().any(|&y| !(y > 0.0)) {
        return None;
    }
    let xs: Vec<f64> = ns.iter().map(|&n| (n as f64).ln()).collect();
    let ls: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ls.iter().sum::<f64>() / k;
    let sxy: f64 = xs.iter().zip(&ls).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let slope = sxy / sxx;
    Some(((my - slope * mx).exp(), -slope))
}

/// Truncation and aliasing of `field` (a fine-grid sample) at `n_coarse`.
///
/// The decay exponent is fitted from the tail sums at `n_coarse/4`,
/// `n_coarse/2` and `n_coarse`.
pub fn truncation_tail(field: &WaveField, n_coarse: usize) -> Result<AliasReport> {
    let grid = *field.grid();
    let n_fine = grid.num_points;
    if n_coarse < 16 || !n_coarse.is_multiple_of(4) || n_fine < 4 * n_coarse || !n_fine.is_multiple_of(n_coarse) {
        return Err(Error::InsufficientResolution {
            fine: n_fine,
            coarse: n_coarse,
        });
    }
    let fine = forward_dft(field);
    let ladder = [n_coarse / 4, n_coarse / 2, n_coarse];
    let tails: Vec<f64> = ladder.iter().map(|&n| tail_sum(&fine, n)).collect();
    let tail = tails[2];
    let fit = fit_power_law(&ladder, &tails);

    let stride = n_fine / n_coarse;
    let coarse_grid = GridSpec::new(grid.x_min, grid.x_max, n_coarse)?;
    let samples = field.values().iter().step_by(stride).copied().collect();
    let coarse = forward_dft(&WaveField::new(coarse_grid, samples)?);
    let alias_sq: f64 = coarse.iter().map(|(k, c)| (c - fine.get(k)).norm_sqr()).sum();

    Ok(AliasReport {
        n_modes: n_coarse,
        alias_l2: (alias_sq * grid.length()).sqrt(),
        tail_sum: tail,
        tail_bound_estimate: fit.map_or(tail, |(c, m)| c * (n_coarse as f64).powf(-m)),
        decay_exponent: fit.map(|(_, m)| m),
    })
}

/// Sup error of the sampled free evolution of `Σ_m ζ̂_m e^{imx}` against
/// `Σ_m ζ̂_m e^{imx - iεm²t/2}` on the `N`-point grid of `[0, 2π)`.
pub fn band_limited_exactness(
    modes: &BTreeMap<i64, Complex64>,
    epsilon: f64,
    t: f64,
    n: usize,
) -> Result<f64> {
    let grid = GridSpec::periodic_2pi(n)?;
    if modes.keys().any(|m| m.unsigned_abs() as usize >= n / 2) {
        log::warn!("modes at or beyond N/2 = {}: expect aliasing error", n / 2);
    }
    let evolved = free_step(&synthesize(modes, grid), t, epsilon);
    // The temporal phase reaches 1e4..1e5 rad for large |m|, ε and t, where one
    // rounding of the product is already ~1e-11; it is evaluated exactly as the
    // free multiplier does so that both sides round the same way.
    let exact = WaveField::from_fn(grid, |x| {
        modes
            .iter()
            .map(|(&m, &c)| {
                let xi = grid.wavenumber(m);
                c * Complex64::cis(m as f64 * x) * Complex64::cis(-0.5 * epsilon * xi * xi * t)
            })
            .sum()
    });
    Ok(evolved.sub(&exact)?.sup_norm())
}
