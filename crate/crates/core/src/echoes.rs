//! Echo trains from periodic spectral gratings.
//!
//! A grating g(Δ) = Σₙ gₙ e^{−inΔT} re-emits the input as a train of
//! replicas, Ω(z,t) = Σ_p a_p(z) Ω(0, t − pT). The amplitudes obey a
//! triangular linear system in the optical depth ζ = αz,
//!
//! ```text
//! da_k/dζ = −Σ_{p≤k} a_p g_{p−k} Y(k−p),    Y(0) = 1/2, Y(m>0) = 1
//! ```
//!
//! so order k is driven only by orders p ≤ k. The first-order solution gives
//! η = |g₋₁αL|² e^{−g₀αL}, which specialises to the photon-echo and comb
//! efficiency formulas below.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{non_negative, positive, Error, Result};
use crate::pulse::PulseEnvelope;
use crate::spectra::{FourierCoeffs, SpectralProfile};

/// z steps used by [`order_recursion`] when none are given.
pub const DEFAULT_Z_STEPS: usize = 512;

/// Forward comb efficiency limit 4e⁻².
pub const FORWARD_EFFICIENCY_LIMIT: f64 = 4.0 * 0.1353352832366127;

/// a_p along the medium, for p = 0..=P.
#[derive(Debug, Clone, PartialEq)]
pub struct EchoOrderAmplitudes {
    /// Depth as a fraction of the medium length, from 0 to 1.
    z_grid: Vec<f64>,
    /// `orders[p][j]` is a_p at `z_grid[j]`.
    orders: Vec<Vec<Complex64>>,
}

impl EchoOrderAmplitudes {
    pub fn max_order(&self) -> usize {
        self.orders.len() - 1
    }

    pub fn z_grid(&self) -> &[f64] {
        &self.z_grid
    }

    /// a_p over the z grid.
    pub fn order(&self, p: usize) -> Option<&[Complex64]> {
        self.orders.get(p).map(Vec::as_slice)
    }

    /// a_p at the exit face.
    pub fn output(&self, p: usize) -> Option<Complex64> {
        self.orders.get(p).and_then(|v| v.last().copied())
    }

    /// |a_p(L)|².
    pub fn efficiency(&self, p: usize) -> Option<f64> {
        self.output(p).map(|a| a.norm_sqr())
    }
}

/// Integrates the order cascade with fixed-step RK4 over αL.
pub fn order_recursion(
    coeffs: &FourierCoeffs,
    alpha_l: f64,
    max_order: usize,
    n_z: usize,
) -> Result<EchoOrderAmplitudes> {
    order_recursion_weighted(coeffs, alpha_l, max_order, n_z, 0.5)
}

/// Same cascade with the same-order coupling weight Y(0) exposed.
pub(crate) fn order_recursion_weighted(
    coeffs: &FourierCoeffs,
    alpha_l: f64,
    max_order: usize,
    n_z: usize,
    self_weight: f64,
) -> Result<EchoOrderAmplitudes> {
    let alpha_l = non_negative("optical depth alphaL", alpha_l)?;
    if max_order < 1 {
        return Err(Error::Domain {
            name: "maximum echo order",
            requirement: ">= 1",
            value: max_order as f64,
        });
    }
    if n_z < 1 {
        return Err(Error::Domain {
            name: "z steps",
            requirement: ">= 1",
            value: 0.0,
        });
    }
    if coeffs.cutoff() < max_order {
        return Err(Error::Cutoff {
            have: coeffs.cutoff(),
            need: max_order,
        });
    }

    // coupling[m] = g_{−m}·Y(m): weight of order k−m in the equation for k
    let coupling: Vec<Complex64> = (0..=max_order)
        .map(|m| {
            let g = coeffs.get(-(m as i64)).expect("cutoff checked");
            if m == 0 {
                g * self_weight
            } else {
                g
            }
        })
        .collect();
    let rhs = |a: &[Complex64]| -> Vec<Complex64> {
        (0..a.len())
            .map(|k| -(0..=k).map(|p| a[p] * coupling[k - p]).sum::<Complex64>())
            .collect()
    };

    let h = alpha_l / n_z as f64;
    let mut state = vec![Complex64::new(0.0, 0.0); max_order + 1];
    state[0] = Complex64::new(1.0, 0.0);
    let mut orders: Vec<Vec<Complex64>> = state.iter().map(|&a| vec![a]).collect();
    let axpy = |a: &[Complex64], k: &[Complex64], s: f64| -> Vec<Complex64> {
        a.iter().zip(k).map(|(a, k)| a + k * s).collect()
    };
    for _ in 0..n_z {
        let k1 = rhs(&state);
        let k2 = rhs(&axpy(&state, &k1, 0.5 * h));
        let k3 = rhs(&axpy(&state, &k2, 0.5 * h));
        let k4 = rhs(&axpy(&state, &k3, h));
        for (i, a) in state.iter_mut().enumerate() {
            *a += (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) * (h / 6.0);
        }
        for (track, a) in orders.iter_mut().zip(&state) {
            track.push(*a);
        }
    }
    let z_grid = (0..=n_z).map(|j| j as f64 / n_z as f64).collect();
    Ok(EchoOrderAmplitudes { z_grid, orders })
}

/// First-echo efficiency |g₋₁αL|² e^{−g₀αL} from a set of coefficients.
pub fn eta_from_coeffs(coeffs: &FourierCoeffs, alpha_l: f64) -> Result<f64> {
    let alpha_l = non_negative("optical depth alphaL", alpha_l)?;
    let g0 = coeffs.get(0).ok_or(Error::MissingCoefficient(0))?;
    let g1 = coeffs.get(-1).ok_or(Error::MissingCoefficient(-1))?;
    Ok((g1 * alpha_l).norm_sqr() * (-g0.re * alpha_l).exp())
}

/// Three-pulse photon echo efficiency (αL/4)² e^{−αL/2}.
pub fn eta_3pe(alpha_l: f64) -> Result<f64> {
    let d = non_negative("optical depth alphaL", alpha_l)?;
    Ok((d / 4.0).powi(2) * (-d / 2.0).exp())
}

/// Forward comb efficiency (παL/2F)² e^{−παL/2F − 2π/F}.
pub fn eta_afc_forward(alpha_l: f64, finesse: f64) -> Result<f64> {
    let d = non_negative("optical depth alphaL", alpha_l)?;
    if !(finesse.is_finite() && finesse >= 1.0) {
        return Err(Error::Domain {
            name: "comb finesse F",
            requirement: "finite and >= 1",
            value: finesse,
        });
    }
    let x = PI * d / (2.0 * finesse);
    Ok(x * x * (-x - 2.0 * PI / finesse).exp())
}

/// Forward comb efficiency at the best finesse, 4e⁻²·(αL/(4 + αL))².
pub fn eta_optimal(alpha_l: f64) -> Result<f64> {
    let d = non_negative("optical depth alphaL", alpha_l)?;
    Ok(FORWARD_EFFICIENCY_LIMIT * (d / (4.0 + d)).powi(2))
}

/// Best comb for a given optical depth.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CombDesign {
    pub alpha_l: f64,
    pub finesse: f64,
    /// Tooth half-width times period, π/F.
    pub gamma_t: f64,
    pub predicted_eta: f64,
    /// Comb period T (s), when one has been chosen.
    pub period: Option<f64>,
}

impl CombDesign {
    pub fn with_period(self, period: f64) -> Result<Self> {
        Ok(Self {
            period: Some(positive("comb period T", period)?),
            ..self
        })
    }

    /// Tooth half-width Γ = π/(F·T) in rad/s.
    pub fn gamma_peak(&self) -> Option<f64> {
        self.period.map(|t| self.gamma_t / t)
    }

    /// The designed comb as a spectral profile; needs a period.
    pub fn profile(&self) -> Result<SpectralProfile> {
        let period = self
            .period
            .ok_or_else(|| Error::UnsupportedProfile("comb design has no period".into()))?;
        SpectralProfile::comb_with_finesse(self.finesse, period)
    }
}

/// F = π(1 + αL/4), which maximises the forward comb efficiency.
pub fn optimal_finesse(alpha_l: f64) -> Result<CombDesign> {
    let d = positive("optical depth alphaL", alpha_l)?;
    let finesse = PI * (1.0 + d / 4.0);
    Ok(CombDesign {
        alpha_l: d,
        finesse,
        gamma_t: PI / finesse,
        predicted_eta: eta_optimal(d)?,
        period: None,
    })
}

/// Energies found in successive echo windows of an output trace.
#[derive(Debug, Clone, PartialEq)]
pub struct EchoReport {
    /// Window centres: reference centroid + pT, for p = 0, 1, ...
    pub echo_times: Vec<f64>,
    /// Window energies over the reference energy; entry 0 is the directly
    /// transmitted pulse.
    pub echo_energies: Vec<f64>,
    /// Energy of the p = 1 window.
    pub efficiency_first: f64,
    /// Energy of the p = 0 window.
    pub transmitted: f64,
}

/// Integrates |Ω|² in windows of half-width T/2 centred on the reference
/// centroid plus pT. Orders are reported while their window fits on the grid.
pub fn detect_echoes(
    output: &PulseEnvelope,
    reference: &PulseEnvelope,
    period: f64,
) -> Result<EchoReport> {
    let period = positive("comb period T", period)?;
    if output.grid() != reference.grid() {
        return Err(Error::Grid(
            "output and reference live on different grids".into(),
        ));
    }
    let grid = *output.grid();
    let e_ref = reference.energy();
    let (centre, rms) = match (reference.centroid(), reference.rms_width()) {
        (Some(c), Some(r)) if e_ref > 0.0 => (c, r),
        _ => {
            return Err(Error::Resolution(
                "reference trace carries no energy".into(),
            ))
        }
    };
    if period < 4.0 * rms {
        return Err(Error::Resolution(format!(
            "period {period:.3e} s is shorter than four reference rms widths ({:.3e} s)",
            4.0 * rms
        )));
    }
    let end = grid.time(grid.len() - 1) + 0.5 * grid.dt();

    let mut echo_times = Vec::new();
    let mut echo_energies = Vec::new();
    for p in 0.. {
        let t = centre + p as f64 * period;
        let lo = t - 0.5 * period;
        let hi = t + 0.5 * period;
        if hi > end {
            break;
        }
        let energy: f64 = grid
            .times()
            .zip(output.intensity())
            .filter(|(s, _)| *s >= lo && *s < hi)
            .map(|(_, i)| i)
            .sum::<f64>()
            * grid.dt();
        echo_times.push(t);
        echo_energies.push(energy / e_ref);
    }
    if echo_energies.len() < 2 {
        return Err(Error::Resolution(
            "grid ends before the first echo window".into(),
        ));
    }
    Ok(EchoReport {
        transmitted: echo_energies[0],
        efficiency_first: echo_energies[1],
        echo_times,
        echo_energies,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pulse::TimeGrid;
    use approx::assert_relative_eq;

    fn coeffs(values: &[(i64, f64)], cutoff: usize) -> FourierCoeffs {
        let n = cutoff as i64;
        let v = (-n..=n)
            .map(|k| {
                let g = values
                    .iter()
                    .find(|(m, _)| *m == k || *m == -k)
                    .map(|(_, g)| *g)
                    .unwrap_or(0.0);
                Complex64::new(g, 0.0)
            })
            .collect();
        FourierCoeffs::new(1.0, v).unwrap()
    }

    #[test]
    fn no_grating_means_plain_absorption() {
        let c = coeffs(&[(0, 0.7)], 3);
        let a = order_recursion(&c, 3.0, 3, 256).unwrap();
        assert_relative_eq!(
            a.output(0).unwrap().re,
            (-0.7f64 * 1.5).exp(),
            max_relative = 1e-10
        );
        for p in 1..=3 {
            assert!(a.output(p).unwrap().norm() < 1e-15);
        }
        assert_eq!(a.z_grid().len(), 257);
    }

    #[test]
    fn first_order_matches_closed_form() {
        let c = coeffs(&[(0, 0.5), (1, 0.25)], 2);
        for &d in &[0.5, 2.0, 4.0, 9.0] {
            let a = order_recursion(&c, d, 2, DEFAULT_Z_STEPS).unwrap();
            let closed = (0.25 * d).powi(2) * (-0.5 * d).exp();
            assert_relative_eq!(a.efficiency(1).unwrap(), closed, max_relative = 1e-9);
            assert_relative_eq!(
                eta_from_coeffs(&c, d).unwrap(),
                closed,
                max_relative = 1e-12
            );
        }
        let a = order_recursion(&c, 4.0, 2, DEFAULT_Z_STEPS).unwrap();
        assert_relative_eq!(
            a.efficiency(1).unwrap(),
            (-2.0f64).exp(),
            max_relative = 1e-9
        );
    }

    #[test]
    fn self_weight_other_than_half_breaks_first_order() {
        let c = coeffs(&[(0, 0.5), (1, 0.25)], 1);
        let closed = eta_3pe(4.0).unwrap();
        for y0 in [0.0, 1.0] {
            let a = order_recursion_weighted(&c, 4.0, 1, 512, y0).unwrap();
            assert!((a.efficiency(1).unwrap() / closed - 1.0).abs() > 0.5);
        }
    }

    #[test]
    fn cutoff_must_cover_orders() {
        let c = coeffs(&[(0, 0.5), (1, 0.25)], 1);
        assert!(matches!(
            order_recursion(&c, 1.0, 3, 16),
            Err(Error::Cutoff { have: 1, need: 3 })
        ));
    }

    #[test]
    fn closed_form_values() {
        assert_eq!(eta_3pe(0.0).unwrap(), 0.0);
        assert_relative_eq!(eta_3pe(4.0).unwrap(), (-2.0f64).exp(), max_relative = 1e-14);
        assert_eq!(eta_afc_forward(0.0, 5.0).unwrap(), 0.0);
        assert_relative_eq!(
            eta_afc_forward(4.0, 2.0 * PI).unwrap(),
            (-2.0f64).exp(),
            max_relative = 1e-12
        );
        assert!(eta_afc_forward(4.0, 1e9).unwrap() < 1e-12);
        assert!(eta_afc_forward(4.0, 0.5).is_err());
        assert!(eta_3pe(-1.0).is_err());
    }

    #[test]
    fn optimal_design() {
        let d = optimal_finesse(4.0).unwrap();
        assert_relative_eq!(d.finesse, 2.0 * PI, max_relative = 1e-14);
        assert_relative_eq!(d.gamma_t, 0.5, max_relative = 1e-14);
        assert_relative_eq!(d.predicted_eta, (-2.0f64).exp(), max_relative = 1e-12);
        assert!(d.gamma_peak().is_none());
        let d = d.with_period(1.5e-6).unwrap();
        assert_relative_eq!(d.gamma_peak().unwrap(), 0.5 / 1.5e-6);
        assert!(d.profile().is_ok());
        assert!(optimal_finesse(1e6).unwrap().predicted_eta < FORWARD_EFFICIENCY_LIMIT);
    }

    #[test]
    fn missing_coefficients() {
        let c = FourierCoeffs::new(1.0, vec![Complex64::new(0.5, 0.0)]).unwrap();
        assert!(matches!(
            eta_from_coeffs(&c, 1.0),
            Err(Error::MissingCoefficient(-1))
        ));
    }

    #[test]
    fn reference_alone_is_all_transmitted() {
        let grid = TimeGrid::new(0.0, 0.03e-6, 1024).unwrap();
        let p = PulseEnvelope::gaussian(grid, 2e-6, 0.15e-6).unwrap();
        let r = detect_echoes(&p, &p, 1.5e-6).unwrap();
        // a ±5 rms window leaves ~6e-7 of a Gaussian outside
        assert_relative_eq!(r.transmitted, 1.0, max_relative = 1e-6);
        assert!(r.echo_energies[1..].iter().all(|&e| e < 1e-6));
        assert_eq!(r.echo_times.len(), r.echo_energies.len());
        assert!(matches!(
            detect_echoes(&p, &p, 0.5e-6),
            Err(Error::Resolution(_))
        ));
    }
}
