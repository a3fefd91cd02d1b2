//! Periodic grids, wave fields and the discrete Fourier transform.
//!
//! Spectra are stored in centered order, index `i` holding wavenumber index
//! `k = i - N/2`, so `k` runs over `-N/2..N/2`. The forward transform carries
//! the `1/N` factor: a sampled pure mode `e^{i m θ}` has coefficient exactly 1
//! at `k = m`. The FFT library works in natural order; the reordering stays
//! inside this module.

use std::cell::RefCell;
use std::collections::HashMap;
use std::f64::consts::{FRAC_PI_4, PI};
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Fraction of the domain (at each end) treated as the "boundary layer" when
/// checking that a field decays before the domain edges.
pub const BOUNDARY_LAYER: f64 = 0.05;

/// Uniform periodic grid on `[x_min, x_max)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub num_points: usize,
}

impl GridSpec {
    pub fn new(x_min: f64, x_max: f64, num_points: usize) -> Result<Self> {
        let grid = GridSpec {
            x_min,
            x_max,
            num_points,
        };
        grid.validate()?;
        Ok(grid)
    }

    /// The torus `[0, 2π)` with `n` points.
    pub fn periodic_2pi(n: usize) -> Result<Self> {
        Self::new(0.0, 2.0 * PI, n)
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_points < 4 || !self.num_points.is_multiple_of(2) {
            return Err(Error::InvalidGrid(format!(
                "need an even number of points >= 4, got {}",
                self.num_points
            )));
        }
        if !(self.x_min.is_finite() && self.x_max.is_finite()) || self.x_max <= self.x_min {
            return Err(Error::InvalidGrid(format!(
                "need x_max > x_min, got [{}, {})",
                self.x_min, self.x_max
            )));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.num_points
    }

    pub fn is_empty(&self) -> bool {
        self.num_points == 0
    }

    pub fn length(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn dx(&self) -> f64 {
        self.length() / self.num_points as f64
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.x_min + self.x_max)
    }

    pub fn node(&self, j: usize) -> f64 {
        self.x_min + j as f64 * self.dx()
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.num_points).map(|j| self.node(j)).collect()
    }

    /// Physical wavenumber `2πk/L` of index `k`.
    pub fn wavenumber(&self, k: i64) -> f64 {
        2.0 * PI * k as f64 / self.length()
    }

    /// Wavenumber indices in centered order: `-N/2, ..., N/2 - 1`.
    pub fn mode_indices(&self) -> impl Iterator<Item = i64> {
        let half = (self.num_points / 2) as i64;
        -half..half
    }

    /// Wavenumber index of natural-order FFT slot `i`.
    pub(crate) fn natural_index(&self, i: usize) -> i64 {
        let n = self.num_points;
        if i < n / 2 {
            i as i64
        } else {
            i as i64 - n as i64
        }
    }
}

/// Complex samples of a wave function on a periodic grid.
#[derive(Clone, Debug, PartialEq)]
pub struct WaveField {
    grid: GridSpec,
    values: Vec<Complex64>,
}

impl WaveField {
    pub fn new(grid: GridSpec, values: Vec<Complex64>) -> Result<Self> {
        grid.validate()?;
        if values.len() != grid.num_points {
            return Err(Error::InvalidGrid(format!(
                "{} values for a grid of {} points",
                values.len(),
                grid.num_points
            )));
        }
        Ok(WaveField { grid, values })
    }

    pub fn zeros(grid: GridSpec) -> Self {
        WaveField {
            grid,
            values: vec![Complex64::new(0.0, 0.0); grid.num_points],
        }
    }

    /// Samples `f` at every grid node.
    pub fn from_fn(grid: GridSpec, f: impl Fn(f64) -> Complex64) -> Self {
        let values = (0..grid.num_points).map(|j| f(grid.node(j))).collect();
        WaveField { grid, values }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn scaled(&self, a: Complex64) -> WaveField {
        WaveField {
            grid: self.grid,
            values: self.values.iter().map(|z| a * z).collect(),
        }
    }

    /// Pointwise difference `self - other`.
    pub fn sub(&self, other: &WaveField) -> Result<WaveField> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a - b)
            .collect();
        Ok(WaveField {
            grid: self.grid,
            values,
        })
    }
}

/// Fourier coefficients in centered order.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumField {
    grid: GridSpec,
    coeffs: Vec<Complex64>,
}

impl SpectrumField {
    pub fn zeros(grid: GridSpec) -> Self {
        SpectrumField {
            grid,
            coeffs: vec![Complex64::new(0.0, 0.0); grid.num_points],
        }
    }

    /// Builds a spectrum from centered-order coefficients.
    pub fn from_centered(grid: GridSpec, coeffs: Vec<Complex64>) -> Result<Self> {
        grid.validate()?;
        if coeffs.len() != grid.num_points {
            return Err(Error::InvalidGrid(format!(
                "{} coefficients for a grid of {} points",
                coeffs.len(),
                grid.num_points
            )));
        }
        Ok(SpectrumField { grid, coeffs })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    /// Coefficients in centered order (`k = -N/2` first).
    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    fn slot(&self, k: i64) -> Option<usize> {
        let half = (self.grid.num_points / 2) as i64;
        if (-half..half).contains(&k) {
            Some((k + half) as usize)
        } else {
            None
        }
    }

    /// Coefficient at wavenumber index `k`; zero outside `[-N/2, N/2)`.
    pub fn get(&self, k: i64) -> Complex64 {
        self.slot(k)
            .map(|i| self.coeffs[i])
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    /// Sets the coefficient at `k`. Panics if `k` is outside `[-N/2, N/2)`.
    pub fn set(&mut self, k: i64, value: Complex64) {
        let i = self
            .slot(k)
            .unwrap_or_else(|| panic!("mode {k} outside the grid's index range"));
        self.coeffs[i] = value;
    }

    /// `(k, coefficient)` pairs in centered order.
    pub fn iter(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        self.grid.mode_indices().zip(self.coeffs.iter().copied())
    }

    pub fn magnitudes(&self) -> Vec<f64> {
        self.coeffs.iter().map(|c| c.norm()).collect()
    }
}

type PlanPair = (Arc<dyn Fft<f64>>, Arc<dyn Fft<f64>>);

thread_local! {
    static PLANS: RefCell<(FftPlanner<f64>, HashMap<usize, PlanPair>)> =
        RefCell::new((FftPlanner::new(), HashMap::new()));
}

fn plans(n: usize) -> PlanPair {
    PLANS.with(|cell| {
        let mut cell = cell.borrow_mut();
        let (planner, cache) = &mut *cell;
        cache
            .entry(n)
            .or_insert_with(|| (planner.plan_fft_forward(n), planner.plan_fft_inverse(n)))
            .clone()
    })
}

/// Unnormalized in-place FFT pair with its own scratch space, for evolution
/// loops that transform the same buffer thousands of times.
pub(crate) struct FftWorkspace {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    scratch: Vec<Complex64>,
    inv_n: f64,
}

impl FftWorkspace {
    pub(crate) fn new(n: usize) -> Self {
        let (forward, inverse) = plans(n);
        let scratch_len = forward
            .get_inplace_scratch_len()
            .max(inverse.get_inplace_scratch_len());
        FftWorkspace {
            forward,
            inverse,
            scratch: vec![Complex64::new(0.0, 0.0); scratch_len],
            inv_n: 1.0 / n as f64,
        }
    }

    /// Natural-order transform `Σ_j u_j e^{-2πijk/N}`, no normalization.
    pub(crate) fn forward(&mut self, buf: &mut [Complex64]) {
        self.forward.process_with_scratch(buf, &mut self.scratch);
    }

    /// Inverse of [`FftWorkspace::forward`], including the `1/N` factor.
    pub(crate) fn inverse(&mut self, buf: &mut [Complex64]) {
        self.inverse.process_with_scratch(buf, &mut self.scratch);
        for z in buf.iter_mut() {
            *z *= self.inv_n;
        }
    }
}

/// `coeffs[k] = (1/N) Σ_j u_j e^{-ikθ_j}` with `θ_j = 2πj/N`.
pub fn forward_dft(field: &WaveField) -> SpectrumField {
    let grid = *field.grid();
    let n = grid.num_points;
    let mut buf = field.values().to_vec();
    FftWorkspace::new(n).forward(&mut buf);
    let inv_n = 1.0 / n as f64;
    // natural -> centered is a rotation by N/2
    buf.rotate_right(n / 2);
    for c in buf.iter_mut() {
        *c *= inv_n;
    }
    SpectrumField { grid, coeffs: buf }
}

/// Exact inverse of [`forward_dft`]: `u_j = Σ_k coeffs[k] e^{ikθ_j}`.
pub fn inverse_dft(spec: &SpectrumField) -> WaveField {
    let grid = *spec.grid();
    let n = grid.num_points;
    let mut buf = spec.coeffs().to_vec();
    buf.rotate_left(n / 2);
    let mut ws = FftWorkspace::new(n);
    ws.inverse(&mut buf);
    // undo the 1/N of the inverse transform: the forward already carries it
    for z in buf.iter_mut() {
        *z *= n as f64;
    }
    WaveField { grid, values: buf }
}

/// Physical wavenumbers `ξ_k = 2πk/L` in centered order.
pub fn physical_wavenumbers(grid: &GridSpec) -> Vec<f64> {
    grid.mode_indices().map(|k| grid.wavenumber(k)).collect()
}

/// Rectangle-rule `L²` norm.
pub fn l2_norm(field: &WaveField) -> f64 {
    let sum: f64 = field.values().iter().map(|z| z.norm_sqr()).sum();
    (sum * field.grid().dx()).sqrt()
}

/// Fraction of `‖u‖²` lying in the outer [`BOUNDARY_LAYER`] of the domain at
/// either end. Zero for the zero field.
pub fn boundary_mass_fraction(field: &WaveField) -> f64 {
    let grid = field.grid();
    let width = BOUNDARY_LAYER * grid.length();
    let (lo, hi) = (grid.x_min + width, grid.x_max - width);
    let mut total = 0.0;
    let mut outer = 0.0;
    for (j, z) in field.values().iter().enumerate() {
        let x = grid.node(j);
        let w = z.norm_sqr();
        total += w;
        if x < lo || x >= hi {
            outer += w;
        }
    }
    if total == 0.0 {
        0.0
    } else {
        outer / total
    }
}

/// Mass fraction above which the periodic integral is not trusted as an
/// approximation of the integral over the whole line.
pub const DECAY_TOLERANCE: f64 = 1e-10;

fn warn_if_not_decayed(field: &WaveField, what: &str) {
    let frac = boundary_mass_fraction(field);
    if frac > DECAY_TOLERANCE {
        log::warn!(
            "{what}: {frac:.3e} of the mass lies near the domain ends; domain may be too small"
        );
    }
}

/// `(2iπ)^{-1/2} ∫ e^{-ixξ} φ(x) dx` at each `ξ`, by the rectangle rule over
/// the field's nodes. Principal branch: `(2iπ)^{-1/2} = (2π)^{-1/2} e^{-iπ/4}`.
pub fn continuous_fourier(field: &WaveField, xi: &[f64]) -> Vec<Complex64> {
    warn_if_not_decayed(field, "continuous_fourier");
    let prefactor = Complex64::from_polar((2.0 * PI).sqrt().recip(), -FRAC_PI_4);
    oscillatory_sum(field, xi, -1.0, prefactor)
}

/// Inverse of [`continuous_fourier`]: `(2iπ)^{1/2}/(2π) ∫ e^{ixξ} g(ξ) dξ`,
/// where the field's nodes are the frequency variable.
pub fn inverse_continuous_fourier(field: &WaveField, x: &[f64]) -> Vec<Complex64> {
    warn_if_not_decayed(field, "inverse_continuous_fourier");
    let prefactor = Complex64::from_polar((2.0 * PI).sqrt().recip(), FRAC_PI_4);
    oscillatory_sum(field, x, 1.0, prefactor)
}

fn oscillatory_sum(
    field: &WaveField,
    targets: &[f64],
    sign: f64,
    prefactor: Complex64,
) -> Vec<Complex64> {
    let grid = *field.grid();
    let nodes = grid.nodes();
    let scale = prefactor * grid.dx();
    targets
        .par_iter()
        .map(|&s| {
            let acc: Complex64 = nodes
                .iter()
                .zip(field.values())
                .map(|(&x, &v)| v * Complex64::cis(sign * x * s))
                .sum();
            acc * scale
        })
        .collect()
}
