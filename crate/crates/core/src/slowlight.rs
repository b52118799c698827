//! Slow light in a spectral hole: delay estimation, shape comparison and the
//! split of pulse energy between the field and the atoms.

use num_complex::Complex64;

use crate::error::{positive, Error, Result};
use crate::pulse::{fft_forward, PulseEnvelope};
use crate::response::oracle::{Lattice, OracleConfig};
use crate::response::{MediumParams, SPEED_OF_LIGHT};
use crate::spectra::{Hole, SpectralProfile};

/// Output energy below this fraction of the input makes a centroid meaningless.
const MIN_DETECTABLE: f64 = 1e-6;

/// Largest fraction of the input allowed outside the medium at the snapshot.
const CONTAINMENT_TOLERANCE: f64 = 1e-2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DelayReport {
    /// Centroid shift of the output intensity (s).
    pub delay_measured: f64,
    /// αL/Δ₀ (s).
    pub delay_expected: f64,
    /// Output over input energy.
    pub transmission: f64,
    /// Normalized L2 shape mismatch after the best shift and complex scale.
    pub distortion: f64,
    /// L/c, not included in either delay (s).
    pub vacuum_transit: f64,
}

/// Where the input energy sits at one instant of slow-light propagation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyAudit {
    /// (1/c)∫|Ω|²dz inside the medium over the input energy.
    pub field_fraction: f64,
    /// Energy held by the atomic dipoles over the input energy.
    pub atomic_fraction: f64,
    /// V_g/c = 1/(1 + cα/Δ₀).
    pub vg_over_c: f64,
    /// Input energy still arriving after the snapshot.
    pub pending_fraction: f64,
    /// Output energy already gone before the snapshot.
    pub exited_fraction: f64,
    pub contained: bool,
}

impl EnergyAudit {
    pub fn total(&self) -> f64 {
        self.field_fraction + self.atomic_fraction
    }
}

/// Centroid of the output intensity minus centroid of the input intensity.
pub fn group_delay(input: &PulseEnvelope, output: &PulseEnvelope) -> Result<f64> {
    same_grid(input, output)?;
    let e_in = input.energy();
    let ratio = if e_in > 0.0 {
        output.energy() / e_in
    } else {
        0.0
    };
    if ratio < MIN_DETECTABLE {
        return Err(Error::UndetectableDelay { ratio });
    }
    match (output.centroid(), input.centroid()) {
        (Some(out), Some(inp)) => Ok(out - inp),
        _ => Err(Error::UndetectableDelay { ratio }),
    }
}

/// αL/Δ₀.
pub fn expected_delay(medium: &MediumParams, delta0: f64) -> Result<f64> {
    let delta0 = positive("hole width delta0", delta0)?;
    Ok(medium.optical_depth() / delta0)
}

/// Expected delay in units of the pulse rms duration.
pub fn containment_fraction(
    pulse: &PulseEnvelope,
    medium: &MediumParams,
    delta0: f64,
) -> Result<f64> {
    let rms = pulse.rms_width().unwrap_or(0.0);
    let rms = positive("pulse rms width", rms)?;
    Ok(expected_delay(medium, delta0)? / rms)
}

/// sqrt(1 − max_τ |⟨in(t−τ), out⟩|² / (‖in‖²‖out‖²)): zero when the output is
/// a shifted, rescaled copy of the input.
pub fn distortion(input: &PulseEnvelope, output: &PulseEnvelope) -> Result<f64> {
    same_grid(input, output)?;
    let n_in: f64 = input.intensity().sum();
    let n_out: f64 = output.intensity().sum();
    if n_in == 0.0 || n_out == 0.0 {
        return Err(Error::UndetectableDelay { ratio: 0.0 });
    }
    let overlap = best_overlap(input.values(), output.values());
    let cos2 = (overlap * overlap / (n_in * n_out)).min(1.0);
    Ok((1.0 - cos2).max(0.0).sqrt())
}

/// max over fractional sample shifts τ of |Σ in*(t−τ)·out(t)|, using band-
/// limited interpolation on a zero-padded spectrum.
fn best_overlap(input: &[Complex64], output: &[Complex64]) -> f64 {
    let m = input.len();
    let n = 2 * m;
    let pad = |v: &[Complex64]| {
        let mut buf = vec![Complex64::new(0.0, 0.0); n];
        buf[..m].copy_from_slice(v);
        fft_forward(&mut buf);
        buf
    };
    let a = pad(input);
    let b = pad(output);
    // cross spectrum conj(A)·B; its inverse transform is the correlation
    let cross: Vec<Complex64> = a.iter().zip(&b).map(|(a, b)| a.conj() * b).collect();
    let mut corr = cross.clone();
    crate::pulse::fft_inverse(&mut corr);
    let (peak, _) = corr
        .iter()
        .enumerate()
        .map(|(k, c)| (k, c.norm()))
        .fold((0, f64::MIN), |acc, x| if x.1 > acc.1 { x } else { acc });

    // bins in signed order so a shift of s samples is e^{+2πi k s / n}
    let at = |shift: f64| -> f64 {
        let sum: Complex64 = cross
            .iter()
            .enumerate()
            .map(|(k, c)| {
                let kk = if k < n / 2 {
                    k as f64
                } else {
                    k as f64 - n as f64
                };
                c * Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * kk * shift / n as f64)
            })
            .sum();
        sum.norm() / n as f64
    };
    let centre = if peak < n / 2 {
        peak as f64
    } else {
        peak as f64 - n as f64
    };
    let refined = golden_section_max(at, centre - 1.0, centre + 1.0, 1e-6);
    refined.max(corr[peak].norm())
}

/// Maximum of a unimodal function on [lo, hi].
pub(crate) fn golden_section_max(
    f: impl Fn(f64) -> f64,
    mut lo: f64,
    mut hi: f64,
    tol: f64,
) -> f64 {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - r * (hi - lo);
    let mut x2 = lo + r * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > tol {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + r * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - r * (hi - lo);
            f1 = f(x1);
        }
    }
    f1.max(f2)
}

/// Full comparison of a pulse before and after a hole of width `delta0`.
pub fn delay_report(
    input: &PulseEnvelope,
    output: &PulseEnvelope,
    medium: &MediumParams,
    delta0: f64,
) -> Result<DelayReport> {
    Ok(DelayReport {
        delay_measured: group_delay(input, output)?,
        delay_expected: expected_delay(medium, delta0)?,
        transmission: output.energy() / input.energy(),
        distortion: distortion(input, output)?,
        vacuum_transit: medium.vacuum_transit(),
    })
}

/// Field and atomic energy inside a hole-burnt medium at `snapshot_time`,
/// read off the time-domain lattice.
///
/// The field part is (1/c)∫|Ω|²dz. The atomic part is (α/π)∫dz∫g|P|²/2 dΔ,
/// which for the adiabatic P = −Ω/Δ is the excitation stored in the
/// population. Both are divided by the input energy ∫|Ω_in|²dt. If more than
/// 1% of the input has not yet entered or has already left, the audit is
/// returned inside [`Error::AuditInvalid`].
pub fn energy_audit(
    pulse: &PulseEnvelope,
    hole: &Hole,
    medium: &MediumParams,
    snapshot_time: f64,
    config: OracleConfig,
) -> Result<EnergyAudit> {
    let grid = *pulse.grid();
    let e_in = positive("input pulse energy", pulse.energy())?;
    let vg_over_c = 1.0 / (1.0 + SPEED_OF_LIGHT * medium.alpha() / hole.delta0());
    let probe = grid.index_of(snapshot_time);
    if medium.alpha() == 0.0 {
        // nothing to store: whatever has entered is still in flight
        return Ok(EnergyAudit {
            field_fraction: 1.0,
            atomic_fraction: 0.0,
            vg_over_c,
            pending_fraction: 0.0,
            exited_fraction: 0.0,
            contained: true,
        });
    }

    let profile = SpectralProfile::Hole(*hole);
    let lattice = Lattice::new(&grid, &profile, medium, config)?;
    let run = lattice.run(pulse, Some(probe));
    let snapshot = run.snapshot.expect("probe requested");

    let dt = grid.dt();
    let pending: f64 = pulse.values()[probe + 1..]
        .iter()
        .map(|v| v.norm_sqr())
        .sum::<f64>()
        * dt;
    let exited: f64 = run.output.values()[..probe]
        .iter()
        .map(|v| v.norm_sqr())
        .sum::<f64>()
        * dt;

    let field = trapezoid(&snapshot.field_intensity, snapshot.dz) / SPEED_OF_LIGHT;
    let atomic =
        medium.alpha() / std::f64::consts::PI * trapezoid(&snapshot.atomic_density, snapshot.dz);

    let audit = EnergyAudit {
        field_fraction: field / e_in,
        atomic_fraction: atomic / e_in,
        vg_over_c,
        pending_fraction: pending / e_in,
        exited_fraction: exited / e_in,
        contained: false,
    };
    if audit.pending_fraction > CONTAINMENT_TOLERANCE
        || audit.exited_fraction > CONTAINMENT_TOLERANCE
    {
        return Err(Error::AuditInvalid {
            reason: format!(
                "pulse not contained at the snapshot: {:.3e} still to enter, {:.3e} already out",
                audit.pending_fraction, audit.exited_fraction
            ),
            audit: Box::new(audit),
        });
    }
    Ok(EnergyAudit {
        contained: true,
        ..audit
    })
}

fn trapezoid(values: &[f64], h: f64) -> f64 {
    let n = values.len();
    if n < 2 {
        return 0.0;
    }
    h * (values.iter().sum::<f64>() - 0.5 * (values[0] + values[n - 1]))
}

fn same_grid(a: &PulseEnvelope, b: &PulseEnvelope) -> Result<()> {
    if a.grid() != b.grid() {
        return Err(Error::Grid("traces live on different grids".into()));
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
    fn identical_traces_have_no_delay_or_distortion() {
        let p = gaussian();
        assert_eq!(group_delay(&p, &p).unwrap(), 0.0);
        assert!(distortion(&p, &p).unwrap() < 1e-6);
    }

    #[test]
    fn pure_shift_is_measured_exactly() {
        let p = gaussian();
        let q = p.delayed_samples(3).scaled(Complex64::new(0.2, -0.4));
        assert_relative_eq!(
            group_delay(&p, &q).unwrap(),
            3.0 * 0.05e-6,
            max_relative = 1e-9
        );
        assert!(distortion(&p, &q).unwrap() < 1e-6);
    }

    #[test]
    fn fractional_shift_is_not_distortion() {
        let grid = TimeGrid::new(0.0, 0.05e-6, 1024).unwrap();
        let a = PulseEnvelope::gaussian(grid, 12e-6, 1.75e-6).unwrap();
        let b = PulseEnvelope::gaussian(grid, 12.0123e-6, 1.75e-6).unwrap();
        assert!(distortion(&a, &b).unwrap() < 1e-5);
        let wide = PulseEnvelope::gaussian(grid, 12e-6, 2.5e-6).unwrap();
        assert!(distortion(&a, &wide).unwrap() > 0.05);
    }

    #[test]
    fn expected_delay_values() {
        let m = MediumParams::with_optical_depth(5.0, 0.01, 1.0).unwrap();
        let d = expected_delay(&m, 2.0 * PI * 1e6).unwrap();
        assert_relative_eq!(d, 0.7957747e-6, max_relative = 1e-6);
        assert_relative_eq!(expected_delay(&m, 4.0 * PI * 1e6).unwrap(), d / 2.0);
        let empty = MediumParams::new(0.0, 0.01, 1.0).unwrap();
        assert_eq!(expected_delay(&empty, 1e6).unwrap(), 0.0);
        assert!(expected_delay(&m, 0.0).is_err());
    }

    #[test]
    fn containment_ratio() {
        let p = gaussian();
        // delay of 10 µs
        let m = MediumParams::with_optical_depth(10.0, 0.01, 1.0).unwrap();
        let c = containment_fraction(&p, &m, 1e6).unwrap();
        assert_relative_eq!(c, 10.0 / 1.75, max_relative = 1e-5);
    }

    #[test]
    fn undetectable_output() {
        let p = gaussian();
        let dark = p.scaled(Complex64::new(1e-4, 0.0));
        assert!(matches!(
            group_delay(&p, &dark),
            Err(Error::UndetectableDelay { .. })
        ));
    }

    #[test]
    fn vacuum_audit() {
        let p = gaussian();
        let m = MediumParams::new(0.0, 0.01, 1.0).unwrap();
        let audit = energy_audit(
            &p,
            &Hole::new(1e6).unwrap(),
            &m,
            20e-6,
            OracleConfig::default(),
        )
        .unwrap();
        assert_eq!(audit.field_fraction, 1.0);
        assert_eq!(audit.atomic_fraction, 0.0);
    }

    #[test]
    fn audit_flags_uncontained_pulse() {
        let grid = TimeGrid::new(0.0, 0.25e-6, 64).unwrap();
        let p = PulseEnvelope::gaussian(grid, 4e-6, 1e-6).unwrap();
        let m = MediumParams::with_optical_depth(2.0, 0.01, 1.0).unwrap();
        let cfg = OracleConfig {
            n_delta: 256,
            n_z: 16,
            delta_half_width: None,
        };
        // snapshot before the pulse has entered
        let err = energy_audit(&p, &Hole::new(1e7).unwrap(), &m, 3e-6, cfg).unwrap_err();
        match err {
            Error::AuditInvalid { audit, .. } => {
                assert!(!audit.contained);
                assert!(audit.pending_fraction > 0.1);
            }
            other => panic!("unexpected {other}"),
        }
    }
}
