//! Slowly varying pulse envelopes Ω(t) on uniform power-of-two time grids.
//!
//! Spectra use the analysis convention Ω̃(ω) = ∫ Ω(t) e^{−iωt} dt, which is
//! the sign of the forward FFT. A spectral factor e^{−iωτ} therefore delays
//! the envelope by τ.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{positive, Error, Result};

/// Uniform time axis t_k = start + k·dt with a power-of-two number of samples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    start: f64,
    dt: f64,
    len: usize,
}

impl TimeGrid {
    pub fn new(start: f64, dt: f64, len: usize) -> Result<Self> {
        let dt = positive("time step dt", dt)?;
        if !start.is_finite() {
            return Err(Error::Grid("grid start must be finite".into()));
        }
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::Grid(format!(
                "grid length {len} is not a power of two >= 2"
            )));
        }
        Ok(Self { start, dt, len })
    }

    /// Smallest power-of-two grid with step `dt` that spans at least `span`.
    pub fn covering(start: f64, span: f64, dt: f64) -> Result<Self> {
        let dt = positive("time step dt", dt)?;
        let span = positive("time span", span)?;
        let len = ((span / dt).ceil() as usize).max(2).next_power_of_two();
        Self::new(start, dt, len)
    }

    pub fn start(&self) -> f64 {
        self.start
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn duration(&self) -> f64 {
        self.len as f64 * self.dt
    }

    pub fn time(&self, k: usize) -> f64 {
        self.start + k as f64 * self.dt
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len).map(move |k| self.time(k))
    }

    /// Spacing of the FFT-conjugate angular frequency grid, 2π/(M·dt).
    pub fn omega_step(&self) -> f64 {
        2.0 * PI / self.duration()
    }

    /// Conjugate angular frequencies in ascending order, (k − M/2)·dω.
    pub fn omega_grid(&self) -> Vec<f64> {
        let dw = self.omega_step();
        let half = (self.len / 2) as f64;
        (0..self.len).map(|k| (k as f64 - half) * dw).collect()
    }

    /// Nearest sample index to time `t`, clamped to the grid.
    pub fn index_of(&self, t: f64) -> usize {
        let k = ((t - self.start) / self.dt).round();
        k.clamp(0.0, (self.len - 1) as f64) as usize
    }
}

/// Index into an ascending ω grid for FFT bin `bin` (and vice versa).
pub(crate) fn bin_to_ascending(bin: usize, len: usize) -> usize {
    (bin + len / 2) % len
}

pub(crate) fn fft_forward(data: &mut [Complex64]) {
    FftPlanner::new().plan_fft_forward(data.len()).process(data);
}

pub(crate) fn fft_inverse(data: &mut [Complex64]) {
    FftPlanner::new().plan_fft_inverse(data.len()).process(data);
    let scale = 1.0 / data.len() as f64;
    data.iter_mut().for_each(|v| *v *= scale);
}

#[derive(Debug, Clone, PartialEq)]
pub struct PulseEnvelope {
    grid: TimeGrid,
    values: Vec<Complex64>,
}

impl PulseEnvelope {
    pub fn new(grid: TimeGrid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Grid(format!(
                "{} samples for a grid of {}",
                values.len(),
                grid.len()
            )));
        }
        if values
            .iter()
            .any(|v| !v.re.is_finite() || !v.im.is_finite())
        {
            return Err(Error::Grid("envelope contains non-finite samples".into()));
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: TimeGrid, f: impl Fn(f64) -> Complex64) -> Self {
        let values = grid.times().map(f).collect();
        Self { grid, values }
    }

    /// Gaussian envelope whose *intensity* |Ω|² has rms duration `rms`.
    pub fn gaussian(grid: TimeGrid, center: f64, rms: f64) -> Result<Self> {
        let rms = positive("pulse rms width", rms)?;
        Ok(Self::from_fn(grid, |t| {
            let x = (t - center) / rms;
            Complex64::new((-0.25 * x * x).exp(), 0.0)
        }))
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn intensity(&self) -> impl Iterator<Item = f64> + '_ {
        self.values.iter().map(|v| v.norm_sqr())
    }

    /// Σ|Ω|²·dt.
    pub fn energy(&self) -> f64 {
        self.intensity().sum::<f64>() * self.grid.dt
    }

    /// Intensity-weighted mean time. `None` for an all-zero trace.
    pub fn centroid(&self) -> Option<f64> {
        let total: f64 = self.intensity().sum();
        if total <= 0.0 {
            return None;
        }
        let weighted: f64 = self
            .intensity()
            .zip(self.grid.times())
            .map(|(i, t)| i * t)
            .sum();
        Some(weighted / total)
    }

    /// Intensity rms duration about the centroid.
    pub fn rms_width(&self) -> Option<f64> {
        let c = self.centroid()?;
        let total: f64 = self.intensity().sum();
        let var: f64 = self
            .intensity()
            .zip(self.grid.times())
            .map(|(i, t)| i * (t - c) * (t - c))
            .sum::<f64>()
            / total;
        Some(var.sqrt())
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        Self {
            grid: self.grid,
            values: self.values.iter().map(|v| v * factor).collect(),
        }
    }

    /// Delays the trace by `samples` grid steps, filling the front with zeros.
    pub fn delayed_samples(&self, samples: usize) -> Self {
        let n = self.values.len();
        let mut values = vec![Complex64::new(0.0, 0.0); n];
        if samples < n {
            values[samples..].copy_from_slice(&self.values[..n - samples]);
        }
        Self {
            grid: self.grid,
            values,
        }
    }

    /// FFT of the samples, in FFT bin order (not scaled by dt).
    pub(crate) fn spectrum(&self) -> Vec<Complex64> {
        let mut buf = self.values.clone();
        fft_forward(&mut buf);
        buf
    }

    pub(crate) fn from_spectrum(grid: TimeGrid, mut spectrum: Vec<Complex64>) -> Self {
        fft_inverse(&mut spectrum);
        Self {
            grid,
            values: spectrum,
        }
    }

    /// ‖self − other‖ / ‖other‖ over the common grid.
    pub fn relative_l2_distance(&self, other: &PulseEnvelope) -> Result<f64> {
        if self.grid != other.grid {
            return Err(Error::Grid("traces live on different grids".into()));
        }
        let diff: f64 = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum();
        let norm: f64 = other.values.iter().map(|v| v.norm_sqr()).sum();
        Ok((diff / norm).sqrt())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn grid_requires_power_of_two() {
        assert!(TimeGrid::new(0.0, 1.0, 1000).is_err());
        assert!(TimeGrid::new(0.0, 0.0, 1024).is_err());
        let g = TimeGrid::covering(0.0, 100.0, 0.3).unwrap();
        assert_eq!(g.len(), 512);
        assert!(g.duration() >= 100.0);
    }

    #[test]
    fn gaussian_moments() {
        let grid = TimeGrid::new(0.0, 0.01e-6, 4096).unwrap();
        let p = PulseEnvelope::gaussian(grid, 20e-6, 1.75e-6).unwrap();
        assert_relative_eq!(p.centroid().unwrap(), 20e-6, max_relative = 1e-9);
        assert_relative_eq!(p.rms_width().unwrap(), 1.75e-6, max_relative = 1e-6);
        // ∫ exp(−t²/2σ²) dt = σ√(2π)
        assert_relative_eq!(p.energy(), 1.75e-6 * (2.0 * PI).sqrt(), max_relative = 1e-9);
    }

    #[test]
    fn omega_grid_ordering_matches_fft_bins() {
        let grid = TimeGrid::new(0.0, 0.5, 8).unwrap();
        let w = grid.omega_grid();
        let dw = grid.omega_step();
        assert_relative_eq!(w[0], -4.0 * dw);
        assert_relative_eq!(w[4], 0.0);
        assert_eq!(bin_to_ascending(0, 8), 4);
        assert_eq!(bin_to_ascending(7, 8), 3);
        assert_relative_eq!(w[bin_to_ascending(1, 8)], dw);
        assert_relative_eq!(w[bin_to_ascending(7, 8)], -dw);
    }

    #[test]
    fn spectrum_round_trip() {
        let grid = TimeGrid::new(-5.0, 0.1, 128).unwrap();
        let p = PulseEnvelope::gaussian(grid, 0.3, 0.7).unwrap();
        let back = PulseEnvelope::from_spectrum(grid, p.spectrum());
        assert!(back.relative_l2_distance(&p).unwrap() < 1e-14);
    }
}
