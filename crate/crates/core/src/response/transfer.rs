use num_complex::Complex64;
use rayon::prelude::*;

use super::{susceptibility_kernel, MediumParams};
use crate::error::{Error, Result};
use crate::pulse::{bin_to_ascending, PulseEnvelope};
use crate::spectra::SpectralProfile;

/// Fraction of the band, at each end, that must be free of pulse content.
const EDGE_FRACTION: usize = 32;
/// Largest tolerated edge amplitude relative to the spectral peak.
const EDGE_LEAKAGE: f64 = 1e-6;

/// H(ω) = e^{K(ω)L} on an ascending, uniform angular-frequency grid.
#[derive(Debug, Clone)]
pub struct TransferFunction {
    omega: Vec<f64>,
    values: Vec<Complex64>,
    medium: MediumParams,
    profile: SpectralProfile,
}

impl TransferFunction {
    pub fn omega(&self) -> &[f64] {
        &self.omega
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn medium(&self) -> &MediumParams {
        &self.medium
    }

    pub fn profile(&self) -> &SpectralProfile {
        &self.profile
    }

    pub fn omega_step(&self) -> f64 {
        self.omega[1] - self.omega[0]
    }

    /// Intensity transmission |H(ω)|².
    pub fn power(&self) -> impl Iterator<Item = f64> + '_ {
        self.values.iter().map(|h| h.norm_sqr())
    }
}

pub fn transfer_function(
    profile: &SpectralProfile,
    medium: &MediumParams,
    omega_grid: &[f64],
) -> Result<TransferFunction> {
    check_frequency_grid(omega_grid)?;
    let length = medium.length();
    let values = omega_grid
        .par_iter()
        .map(|&w| susceptibility_kernel(profile, medium, w).map(|k| (k * length).exp()))
        .collect::<Result<Vec<_>>>()?;
    Ok(TransferFunction {
        omega: omega_grid.to_vec(),
        values,
        medium: *medium,
        profile: profile.clone(),
    })
}

fn check_frequency_grid(omega: &[f64]) -> Result<()> {
    if omega.len() < 2 {
        return Err(Error::Grid(
            "frequency grid needs at least two points".into(),
        ));
    }
    let step = (omega[omega.len() - 1] - omega[0]) / (omega.len() - 1) as f64;
    if step <= 0.0 || !step.is_finite() {
        return Err(Error::Grid("frequency grid must be increasing".into()));
    }
    for w in omega.windows(2) {
        if ((w[1] - w[0]) - step).abs() > 1e-9 * step {
            return Err(Error::Grid("frequency grid is not uniform".into()));
        }
    }
    // FFT grids carry one extra negative frequency
    if (omega[0] + omega[omega.len() - 1]).abs() > 1.5 * step {
        return Err(Error::Grid("frequency grid is not centred on zero".into()));
    }
    Ok(())
}

/// Multiplies the input spectrum by H(ω) and transforms back. The output
/// lives on the input grid in the retarded frame.
pub fn propagate(pulse: &PulseEnvelope, tf: &TransferFunction) -> Result<PulseEnvelope> {
    let grid = *pulse.grid();
    let m = grid.len();
    if tf.omega.len() != m {
        return Err(Error::Grid(format!(
            "pulse has {m} samples but the transfer function has {}",
            tf.omega.len()
        )));
    }
    let dw = grid.omega_step();
    if (tf.omega_step() - dw).abs() > 1e-9 * dw
        || (tf.omega[0] + (m / 2) as f64 * dw).abs() > 1e-6 * dw
    {
        return Err(Error::Grid(
            "transfer function grid is not FFT-conjugate to the pulse grid".into(),
        ));
    }

    let mut spectrum = pulse.spectrum();
    check_leakage(&spectrum)?;
    for (bin, s) in spectrum.iter_mut().enumerate() {
        *s *= tf.values[bin_to_ascending(bin, m)];
    }
    Ok(PulseEnvelope::from_spectrum(grid, spectrum))
}

/// Convenience wrapper building the transfer function on the pulse's grid.
pub fn propagate_through(
    pulse: &PulseEnvelope,
    profile: &SpectralProfile,
    medium: &MediumParams,
) -> Result<PulseEnvelope> {
    let tf = transfer_function(profile, medium, &pulse.grid().omega_grid())?;
    propagate(pulse, &tf)
}

fn check_leakage(spectrum: &[Complex64]) -> Result<()> {
    let m = spectrum.len();
    let peak = spectrum.iter().map(|s| s.norm()).fold(0.0, f64::max);
    if peak == 0.0 {
        return Ok(());
    }
    let edge = (m / EDGE_FRACTION).max(1);
    // bins near ±Nyquist sit in the middle of FFT ordering
    let lo = m / 2 - edge;
    let hi = m / 2 + edge;
    let worst = spectrum[lo..hi]
        .iter()
        .map(|s| s.norm())
        .fold(0.0, f64::max);
    let ratio = worst / peak;
    if ratio > EDGE_LEAKAGE {
        return Err(Error::Aliasing { ratio });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pulse::TimeGrid;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn gaussian() -> PulseEnvelope {
        let grid = TimeGrid::new(0.0, 0.05e-6, 1024).unwrap();
        PulseEnvelope::gaussian(grid, 12e-6, 1.75e-6).unwrap()
    }

    #[test]
    fn bleached_medium_is_identity() {
        let p = gaussian();
        let m = MediumParams::new(700.0, 0.005, 1e4).unwrap();
        let out = propagate_through(&p, &SpectralProfile::bleached(), &m).unwrap();
        assert!(out.relative_l2_distance(&p).unwrap() < 1e-14);
    }

    #[test]
    fn flat_transmission_and_shape() {
        let p = gaussian();
        let m = MediumParams::with_optical_depth(2.0, 0.01, 1e4).unwrap();
        let tf = transfer_function(&SpectralProfile::flat(), &m, &p.grid().omega_grid()).unwrap();
        for a in tf.power() {
            assert_relative_eq!(a, (-2.0f64).exp(), max_relative = 1e-12);
        }
        let out = propagate(&p, &tf).unwrap();
        assert_relative_eq!(
            out.energy() / p.energy(),
            (-2.0f64).exp(),
            max_relative = 1e-12
        );
        let rescaled = out.scaled(Complex64::new(1.0f64.exp(), 0.0));
        assert!(rescaled.relative_l2_distance(&p).unwrap() < 1e-12);
    }

    #[test]
    fn hole_delays_by_alpha_l_over_width() {
        let p = gaussian();
        let delta0 = 2.0 * PI * 5e6;
        let m = MediumParams::with_optical_depth(5.0, 0.01, 2.0 * PI * 1e3).unwrap();
        let out = propagate_through(&p, &SpectralProfile::hole(delta0).unwrap(), &m).unwrap();
        let delay = out.centroid().unwrap() - p.centroid().unwrap();
        assert_relative_eq!(delay, 5.0 / delta0, max_relative = 0.01);
        assert!(delay > 0.0);
    }

    #[test]
    fn linear_in_input() {
        let p = gaussian();
        let m = MediumParams::with_optical_depth(3.0, 0.01, 1e4).unwrap();
        let prof = SpectralProfile::hole(2.0 * PI * 1e6).unwrap();
        let a = Complex64::new(-2.5, 0.75);
        let lhs = propagate_through(&p.scaled(a), &prof, &m).unwrap();
        let rhs = propagate_through(&p, &prof, &m).unwrap().scaled(a);
        assert!(lhs.relative_l2_distance(&rhs).unwrap() < 1e-13);
    }

    #[test]
    fn refuses_aliased_input() {
        let grid = TimeGrid::new(0.0, 1e-6, 256).unwrap();
        // rms of half a sample: spectrum is wide at Nyquist
        let p = PulseEnvelope::gaussian(grid, 100e-6, 0.5e-6).unwrap();
        let m = MediumParams::with_optical_depth(1.0, 0.01, 1e4).unwrap();
        let err = propagate_through(&p, &SpectralProfile::flat(), &m).unwrap_err();
        assert!(matches!(err, Error::Aliasing { .. }));
    }

    #[test]
    fn rejects_mismatched_grids() {
        let p = gaussian();
        let m = MediumParams::with_optical_depth(1.0, 0.01, 1e4).unwrap();
        let other = TimeGrid::new(0.0, 0.1e-6, 1024).unwrap().omega_grid();
        let tf = transfer_function(&SpectralProfile::flat(), &m, &other).unwrap();
        assert!(matches!(propagate(&p, &tf), Err(Error::Grid(_))));
        assert!(transfer_function(&SpectralProfile::flat(), &m, &[0.0, 1.0, 3.0]).is_err());
        assert!(transfer_function(&SpectralProfile::flat(), &m, &[1.0, 2.0, 3.0]).is_err());
    }
}
