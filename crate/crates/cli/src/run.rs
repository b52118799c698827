//! Turning a validated config into simulated traces and report tables.

use std::f64::consts::PI;

use rayon::prelude::*;

use lightstore::echoes::{
    detect_echoes, eta_afc_forward, eta_from_coeffs, optimal_finesse, order_recursion,
    DEFAULT_Z_STEPS,
};
use lightstore::io::{
    fmt_g9, sampled_from_mhz, write_spectrum, write_table, write_trace, write_transfer,
};
use lightstore::protocol::{
    compose_efficiency, predict_retrieval, Direction, ProtocolTimeline, Scheme,
};
use lightstore::response::{propagate, transfer_function};
use lightstore::slowlight::delay_report;
use lightstore::spectra::{finesse, DEFAULT_FOURIER_CUTOFF};
use lightstore::{MediumParams, PulseEnvelope, SpectralProfile, TimeGrid};

use crate::config::{
    Config, DirectionConfig, FieldError, Finesse, FinesseName, GridConfig, MediumConfig,
    ProfileConfig, PulseConfig, PulseShape, SchemeConfig,
};
use crate::CliError;

const MHZ: f64 = 2.0 * PI * 1e6;
const KHZ: f64 = 2.0 * PI * 1e3;
const US: f64 = 1e-6;

pub const DELAY_HEADER: [&str; 6] = [
    "delta0_mhz",
    "alphaL",
    "delay_expected_us",
    "delay_measured_us",
    "transmission",
    "distortion",
];
pub const EFFICIENCY_HEADER: [&str; 5] =
    ["alphaL", "F", "eta_recursion", "eta_closed", "eta_detected"];
pub const TRANSMISSION_HEADER: [&str; 2] = ["alphaL", "transmission"];
pub const ECHO_HEADER: [&str; 3] = ["order", "time_us", "energy"];
pub const PROTOCOL_HEADER: [&str; 5] = [
    "scheme",
    "retrieval_time_us",
    "direction",
    "amplitude_factor",
    "efficiency",
];

/// A config resolved into SI quantities.
pub struct Scenario {
    pub medium: MediumParams,
    pub profile: SpectralProfile,
    pub pulse: PulseEnvelope,
    /// Comb finesse, for comb profiles.
    pub finesse: Option<f64>,
}

fn invalid(field: &str, err: impl ToString) -> CliError {
    CliError::Invalid(vec![FieldError {
        field: field.into(),
        message: err.to_string(),
    }])
}

impl Scenario {
    /// Checks the config and builds every physical object it describes.
    /// Sampled profiles must already be inlined.
    pub fn build(config: &Config) -> Result<Self, CliError> {
        let errors = config.validate();
        if !errors.is_empty() {
            return Err(CliError::Invalid(errors));
        }
        let m = &config.medium;
        let medium = MediumParams::new(
            m.alpha_per_cm * 100.0,
            m.length_cm / 100.0,
            m.gamma_khz * KHZ,
        )
        .map_err(|e| invalid("medium", e))?;
        let alpha_l = medium.optical_depth();

        let mut comb_finesse = None;
        let profile = match &config.profile {
            ProfileConfig::Flat { level } => SpectralProfile::flat_level(level.unwrap_or(1.0)),
            ProfileConfig::Hole { delta0_mhz } => SpectralProfile::hole(delta0_mhz * MHZ),
            ProfileConfig::LorentzianComb {
                period_us,
                gamma_peak_mhz,
                finesse: f,
            } => {
                let period = period_us * US;
                let f = match (gamma_peak_mhz, f) {
                    (Some(g), _) => finesse(g * MHZ, period)
                        .map_err(|e| invalid("profile.gamma_peak_mhz", e))?,
                    (None, Some(Finesse::Value(f))) => *f,
                    (None, Some(Finesse::Named(FinesseName::Optimal))) => {
                        optimal_finesse(alpha_l)
                            .map_err(|e| invalid("profile.finesse", e))?
                            .finesse
                    }
                    (None, None) => unreachable!("rejected by validate"),
                };
                comb_finesse = Some(f);
                match gamma_peak_mhz {
                    Some(g) => SpectralProfile::lorentzian_comb(g * MHZ, period),
                    None => SpectralProfile::comb_with_finesse(f, period),
                }
            }
            ProfileConfig::CosineGrating { period_us } => {
                SpectralProfile::cosine_grating(period_us * US)
            }
            ProfileConfig::Sampled {
                delta_mhz: Some(d),
                g: Some(g),
                period_us,
                ..
            } => sampled_from_mhz(d, g.clone())
                .and_then(|s| match period_us {
                    Some(t) => s.with_period(t * US),
                    None => Ok(s),
                })
                .map(SpectralProfile::Sampled),
            ProfileConfig::Sampled { .. } => {
                return Err(invalid("profile.csv", "sampled data was not loaded"))
            }
        }
        .map_err(|e| invalid("profile", e))?;

        let p = &config.pulse;
        let grid = TimeGrid::new(0.0, p.grid.dt_us * US, p.grid.n_points)
            .map_err(|e| invalid("pulse.grid", e))?;
        let pulse = PulseEnvelope::gaussian(grid, p.center_us * US, p.rms_us * US)
            .map_err(|e| invalid("pulse", e))?;
        Ok(Self {
            medium,
            profile,
            pulse,
            finesse: comb_finesse,
        })
    }

    /// Detunings (rad/s) at which to tabulate the profile.
    fn spectrum_detunings(&self) -> Vec<f64> {
        let span = |half: f64, n: usize| -> Vec<f64> {
            (0..n)
                .map(|i| -half + 2.0 * half * i as f64 / (n - 1) as f64)
                .collect()
        };
        match &self.profile {
            SpectralProfile::Sampled(s) => s.detunings().to_vec(),
            SpectralProfile::Hole(h) => span(4.0 * h.delta0(), 801),
            p => match p.period() {
                Some(t) => span(3.0 * 2.0 * PI / t, 1201),
                None => {
                    let rms = self.pulse.rms_width().unwrap_or(1.0);
                    span(10.0 / rms, 401)
                }
            },
        }
    }
}

/// One row of the per-point report, already formatted.
pub enum Report {
    Delay(Vec<String>),
    Efficiency(Vec<String>),
    Transmission(Vec<String>),
}

impl Report {
    pub fn header(&self) -> &'static [&'static str] {
        match self {
            Report::Delay(_) => &DELAY_HEADER,
            Report::Efficiency(_) => &EFFICIENCY_HEADER,
            Report::Transmission(_) => &TRANSMISSION_HEADER,
        }
    }

    pub fn file_name(&self) -> &'static str {
        match self {
            Report::Delay(_) => "delay.csv",
            Report::Efficiency(_) => "efficiency.csv",
            Report::Transmission(_) => "transmission.csv",
        }
    }

    pub fn row(&self) -> &[String] {
        match self {
            Report::Delay(r) | Report::Efficiency(r) | Report::Transmission(r) => r,
        }
    }
}

/// Everything computed for one configuration.
pub struct Outcome {
    pub output: PulseEnvelope,
    pub transfer: lightstore::TransferFunction,
    pub report: Report,
    /// Echo windows as `order,time_us,energy` rows, for periodic profiles.
    pub echoes: Option<Vec<Vec<String>>>,
    /// Efficiency a protocol starts from when none is configured.
    pub base_efficiency: f64,
}

pub fn simulate(s: &Scenario) -> lightstore::Result<Outcome> {
    let tf = transfer_function(&s.profile, &s.medium, &s.pulse.grid().omega_grid())?;
    let output = propagate(&s.pulse, &tf)?;
    let alpha_l = s.medium.optical_depth();
    let transmission = output.energy() / s.pulse.energy();

    let (report, echoes, base_efficiency) = if let SpectralProfile::Hole(h) = &s.profile {
        let r = delay_report(&s.pulse, &output, &s.medium, h.delta0())?;
        let row = vec![
            fmt_g9(h.delta0() / MHZ),
            fmt_g9(alpha_l),
            fmt_g9(r.delay_expected / US),
            fmt_g9(r.delay_measured / US),
            fmt_g9(r.transmission),
            fmt_g9(r.distortion),
        ];
        (Report::Delay(row), None, transmission)
    } else if let Some(period) = s.profile.period() {
        let coeffs = s.profile.fourier_coeffs(DEFAULT_FOURIER_CUTOFF)?;
        let recursion = order_recursion(&coeffs, alpha_l, 1, DEFAULT_Z_STEPS)?
            .efficiency(1)
            .expect("first order computed");
        let closed = match s.finesse {
            Some(f) => eta_afc_forward(alpha_l, f)?,
            None => eta_from_coeffs(&coeffs, alpha_l)?,
        };
        let detected = detect_echoes(&output, &s.pulse, period)?;
        let row = vec![
            fmt_g9(alpha_l),
            fmt_g9(s.finesse.unwrap_or(f64::NAN)),
            fmt_g9(recursion),
            fmt_g9(closed),
            fmt_g9(detected.efficiency_first),
        ];
        let echoes = detected
            .echo_times
            .iter()
            .zip(&detected.echo_energies)
            .enumerate()
            .map(|(p, (t, e))| vec![p.to_string(), fmt_g9(t / US), fmt_g9(*e)])
            .collect();
        (
            Report::Efficiency(row),
            Some(echoes),
            detected.efficiency_first.min(1.0),
        )
    } else {
        let row = vec![fmt_g9(alpha_l), fmt_g9(transmission)];
        (Report::Transmission(row), None, transmission)
    };

    Ok(Outcome {
        output,
        transfer: tf,
        report,
        echoes,
        base_efficiency: base_efficiency.clamp(0.0, 1.0),
    })
}

/// The `protocol.csv` row for a config with a protocol block.
fn protocol_row(config: &Config, s: &Scenario, base: f64) -> Result<Vec<String>, CliError> {
    let p = config.protocol.as_ref().expect("caller checked");
    let timeline = ProtocolTimeline {
        scheme: match p.scheme {
            SchemeConfig::Afc => Scheme::Afc,
            SchemeConfig::Shbsl => Scheme::Shbsl,
        },
        signal_in_time: p.signal_in_us.unwrap_or(config.pulse.center_us) * US,
        raman1_time: p.raman1_us.map(|t| t * US),
        raman2_time: p.raman2_us.map(|t| t * US),
        comb_period: s.profile.period(),
        spin_lifetime: p.spin_lifetime_us.map_or(f64::INFINITY, |t| t * US),
        retrieval_direction: match p.direction {
            DirectionConfig::Forward => Direction::Forward,
            DirectionConfig::Backward => Direction::Backward,
        },
        raman_efficiency: p.raman_efficiency,
    };
    let prediction = predict_retrieval(&timeline).map_err(|e| invalid("protocol", e))?;
    let efficiency = compose_efficiency(p.base_efficiency.unwrap_or(base), &prediction)?;
    Ok(vec![
        timeline.scheme.name().to_string(),
        fmt_g9(prediction.retrieval_time / US),
        prediction.direction.name().to_string(),
        fmt_g9(prediction.amplitude_factor),
        fmt_g9(efficiency),
    ])
}

/// Named output files with their contents.
pub type Files = Vec<(&'static str, Vec<u8>)>;

fn table(header: &[&str], rows: &[Vec<String>]) -> lightstore::Result<Vec<u8>> {
    let mut buf = Vec::new();
    write_table(&mut buf, header, rows)?;
    Ok(buf)
}

/// Runs one configuration and renders every output except the manifest.
pub fn simulate_files(config: &Config) -> Result<Files, CliError> {
    let s = Scenario::build(config)?;
    let outcome = simulate(&s)?;
    let mut files: Files = Vec::new();

    let mut buf = Vec::new();
    write_trace(&mut buf, &s.pulse)?;
    files.push(("input_trace.csv", buf));
    let mut buf = Vec::new();
    write_trace(&mut buf, &outcome.output)?;
    files.push(("output_trace.csv", buf));
    let mut buf = Vec::new();
    write_transfer(&mut buf, &outcome.transfer)?;
    files.push(("transfer.csv", buf));
    let mut buf = Vec::new();
    write_spectrum(
        &mut buf,
        &s.profile,
        s.medium.optical_depth(),
        &s.spectrum_detunings(),
    )?;
    files.push(("spectrum.csv", buf));

    let report = &outcome.report;
    files.push((
        report.file_name(),
        table(report.header(), &[report.row().to_vec()])?,
    ));
    if let Some(echoes) = &outcome.echoes {
        files.push(("echoes.csv", table(&ECHO_HEADER, echoes)?));
    }
    if config.protocol.is_some() {
        let row = protocol_row(config, &s, outcome.base_efficiency)?;
        files.push(("protocol.csv", table(&PROTOCOL_HEADER, &[row])?));
    }
    Ok(files)
}

/// Runs every point of the sweep in parallel and renders `sweep.csv` with
/// rows in sweep order.
pub fn sweep_files(config: &Config) -> Result<Files, CliError> {
    let errors = config.validate();
    if !errors.is_empty() {
        return Err(CliError::Invalid(errors));
    }
    let sweep = config
        .sweep
        .as_ref()
        .ok_or_else(|| invalid("sweep", "the config has no sweep block"))?;
    let points: Vec<Config> = config
        .sweep_values()
        .into_iter()
        .map(|v| config.with_parameter(sweep.parameter, v))
        .collect();
    let mut errors = Vec::new();
    for (i, p) in points.iter().enumerate() {
        errors.extend(p.validate().into_iter().map(|e| FieldError {
            field: format!("sweep point {i}: {}", e.field),
            message: e.message,
        }));
    }
    if !errors.is_empty() {
        return Err(CliError::Invalid(errors));
    }

    let reports = points
        .par_iter()
        .map(|p| {
            let s = Scenario::build(p)?;
            Ok(simulate(&s)?.report)
        })
        .collect::<Result<Vec<Report>, CliError>>()?;
    let header = reports[0].header();
    let rows: Vec<Vec<String>> = reports.iter().map(|r| r.row().to_vec()).collect();
    Ok(vec![("sweep.csv", table(header, &rows)?)])
}

/// The comb that maximises forward efficiency at `alpha_l`, as printable lines.
pub fn afc_design_lines(alpha_l: f64, period_us: Option<f64>) -> Result<Vec<String>, CliError> {
    let mut design = optimal_finesse(alpha_l).map_err(|e| CliError::Usage(e.to_string()))?;
    if let Some(t) = period_us {
        design = design
            .with_period(t * US)
            .map_err(|e| CliError::Usage(e.to_string()))?;
    }
    let mut lines = vec![
        format!("alphaL = {}", fmt_g9(alpha_l)),
        format!("F = {:.4}", design.finesse),
        format!("Gamma*T = {:.4}", design.gamma_t),
        format!("eta = {:.4}", design.predicted_eta),
    ];
    if let (Some(t), Some(g)) = (period_us, design.gamma_peak()) {
        lines.push(format!("period_us = {}", fmt_g9(t)));
        lines.push(format!("gamma_peak_mhz = {:.6}", g / MHZ));
    }
    Ok(lines)
}

/// Delay report for a Gaussian pulse through a hole, on a grid chosen to
/// hold the pulse and its delayed copy.
pub fn slowlight_table(
    alpha_l: f64,
    delta0_mhz: f64,
    rms_us: f64,
    gamma_khz: f64,
) -> Result<Vec<u8>, CliError> {
    for (name, v) in [
        ("--delta0-mhz", delta0_mhz),
        ("--rms-us", rms_us),
        ("--gamma-khz", gamma_khz),
    ] {
        if !(v.is_finite() && v > 0.0) {
            return Err(CliError::Usage(format!(
                "{name} must be finite and > 0, got {v}"
            )));
        }
    }
    if !(alpha_l.is_finite() && alpha_l >= 0.0) {
        return Err(CliError::Usage(format!(
            "--alphaL must be finite and >= 0, got {alpha_l}"
        )));
    }
    let delay_us = alpha_l / (delta0_mhz * 2.0 * PI);
    let dt_us = rms_us / 20.0;
    let span = 16.0 * rms_us + 2.0 * delay_us;
    let config = Config {
        medium: MediumConfig {
            alpha_per_cm: alpha_l,
            length_cm: 1.0,
            gamma_khz,
        },
        profile: ProfileConfig::Hole { delta0_mhz },
        pulse: PulseConfig {
            shape: PulseShape::Gaussian,
            rms_us,
            center_us: 8.0 * rms_us,
            grid: GridConfig {
                n_points: ((span / dt_us).ceil() as usize).max(2).next_power_of_two(),
                dt_us,
            },
        },
        protocol: None,
        sweep: None,
        seed: 0,
    };
    let s = Scenario::build(&config)?;
    let outcome = simulate(&s)?;
    Ok(table(
        outcome.report.header(),
        &[outcome.report.row().to_vec()],
    )?)
}
