//! Scenario files: JSON in lab units (cm, µs, MHz, kHz), checked field by
//! field before anything is simulated.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub medium: MediumConfig,
    pub profile: ProfileConfig,
    pub pulse: PulseConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub protocol: Option<ProtocolConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
    /// Recorded in the manifest; the simulation itself draws no random numbers.
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MediumConfig {
    pub alpha_per_cm: f64,
    pub length_cm: f64,
    /// Homogeneous half-width γ/2π.
    #[serde(default = "default_gamma_khz")]
    pub gamma_khz: f64,
}

fn default_gamma_khz() -> f64 {
    10.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProfileConfig {
    Flat {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        level: Option<f64>,
    },
    Hole {
        /// Hole FWHM Δ₀/2π.
        delta0_mhz: f64,
    },
    LorentzianComb {
        period_us: f64,
        /// Tooth half-width Γ/2π.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        gamma_peak_mhz: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        finesse: Option<Finesse>,
    },
    CosineGrating {
        period_us: f64,
    },
    Sampled {
        /// `delta_mhz,g` table, relative to the config file.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        csv: Option<PathBuf>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        delta_mhz: Option<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        g: Option<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        period_us: Option<f64>,
    },
}

impl ProfileConfig {
    pub fn kind(&self) -> &'static str {
        match self {
            ProfileConfig::Flat { .. } => "flat",
            ProfileConfig::Hole { .. } => "hole",
            ProfileConfig::LorentzianComb { .. } => "lorentzian_comb",
            ProfileConfig::CosineGrating { .. } => "cosine_grating",
            ProfileConfig::Sampled { .. } => "sampled",
        }
    }
}

/// A numeric finesse or the string `"optimal"`, which picks π(1 + αL/4).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Finesse {
    Value(f64),
    Named(FinesseName),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FinesseName {
    Optimal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PulseShape {
    Gaussian,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PulseConfig {
    #[serde(default = "default_shape")]
    pub shape: PulseShape,
    /// Intensity rms width.
    pub rms_us: f64,
    pub center_us: f64,
    pub grid: GridConfig,
}

fn default_shape() -> PulseShape {
    PulseShape::Gaussian
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub n_points: usize,
    pub dt_us: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchemeConfig {
    Afc,
    Shbsl,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DirectionConfig {
    Forward,
    Backward,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProtocolConfig {
    pub scheme: SchemeConfig,
    /// Defaults to the pulse centre.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub signal_in_us: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub raman1_us: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub raman2_us: Option<f64>,
    #[serde(default = "default_direction")]
    pub direction: DirectionConfig,
    /// Spin coherence lifetime; absent means no decay.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spin_lifetime_us: Option<f64>,
    #[serde(default = "default_raman_efficiency")]
    pub raman_efficiency: f64,
    /// Storage efficiency before spin decay and Raman losses. Defaults to the
    /// first echo found on the output trace (comb profiles) or the
    /// transmission (everything else).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base_efficiency: Option<f64>,
}

fn default_direction() -> DirectionConfig {
    DirectionConfig::Forward
}

fn default_raman_efficiency() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub parameter: SweepParameter,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stop: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub steps: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SweepParameter {
    #[serde(rename = "alphaL")]
    AlphaL,
    #[serde(rename = "alpha_per_cm")]
    AlphaPerCm,
    #[serde(rename = "length_cm")]
    LengthCm,
    #[serde(rename = "gamma_khz")]
    GammaKhz,
    #[serde(rename = "delta0_mhz")]
    Delta0Mhz,
    #[serde(rename = "period_us")]
    PeriodUs,
    #[serde(rename = "finesse")]
    Finesse,
    #[serde(rename = "gamma_peak_mhz")]
    GammaPeakMhz,
    #[serde(rename = "level")]
    Level,
    #[serde(rename = "rms_us")]
    RmsUs,
    #[serde(rename = "center_us")]
    CenterUs,
}

impl SweepParameter {
    pub fn name(self) -> &'static str {
        match self {
            SweepParameter::AlphaL => "alphaL",
            SweepParameter::AlphaPerCm => "alpha_per_cm",
            SweepParameter::LengthCm => "length_cm",
            SweepParameter::GammaKhz => "gamma_khz",
            SweepParameter::Delta0Mhz => "delta0_mhz",
            SweepParameter::PeriodUs => "period_us",
            SweepParameter::Finesse => "finesse",
            SweepParameter::GammaPeakMhz => "gamma_peak_mhz",
            SweepParameter::Level => "level",
            SweepParameter::RmsUs => "rms_us",
            SweepParameter::CenterUs => "center_us",
        }
    }
}

/// One rejected field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldError {
    /// Dotted path such as `medium.alpha_per_cm`.
    pub field: String,
    pub message: String,
}

impl fmt::Display for FieldError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

#[derive(Default)]
struct Checker {
    errors: Vec<FieldError>,
}

impl Checker {
    fn fail(&mut self, field: &str, message: impl Into<String>) {
        self.errors.push(FieldError {
            field: field.into(),
            message: message.into(),
        });
    }

    fn positive(&mut self, field: &str, v: f64) {
        if !(v.is_finite() && v > 0.0) {
            self.fail(field, format!("must be finite and > 0, got {v}"));
        }
    }

    fn non_negative(&mut self, field: &str, v: f64) {
        if !(v.is_finite() && v >= 0.0) {
            self.fail(field, format!("must be finite and >= 0, got {v}"));
        }
    }

    fn finite(&mut self, field: &str, v: f64) {
        if !v.is_finite() {
            self.fail(field, format!("must be finite, got {v}"));
        }
    }
}

impl Config {
    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }

    /// Every problem found, or nothing.
    pub fn validate(&self) -> Vec<FieldError> {
        let mut c = Checker::default();
        c.non_negative("medium.alpha_per_cm", self.medium.alpha_per_cm);
        c.positive("medium.length_cm", self.medium.length_cm);
        c.positive("medium.gamma_khz", self.medium.gamma_khz);

        let periodic = match &self.profile {
            ProfileConfig::Flat { level } => {
                if let Some(l) = level {
                    c.non_negative("profile.level", *l);
                }
                false
            }
            ProfileConfig::Hole { delta0_mhz } => {
                c.positive("profile.delta0_mhz", *delta0_mhz);
                false
            }
            ProfileConfig::LorentzianComb {
                period_us,
                gamma_peak_mhz,
                finesse,
            } => {
                c.positive("profile.period_us", *period_us);
                match (gamma_peak_mhz, finesse) {
                    (Some(g), None) => {
                        c.positive("profile.gamma_peak_mhz", *g);
                        let gamma_t = *g * period_us * 2.0 * std::f64::consts::PI;
                        if gamma_t > std::f64::consts::PI {
                            c.fail(
                                "profile.gamma_peak_mhz",
                                "teeth wider than the comb spacing (finesse below 1)",
                            );
                        }
                    }
                    (None, Some(Finesse::Value(f))) => {
                        if !(f.is_finite() && *f >= 1.0) {
                            c.fail(
                                "profile.finesse",
                                format!("must be finite and >= 1, got {f}"),
                            );
                        }
                    }
                    (None, Some(Finesse::Named(FinesseName::Optimal))) => {
                        if self.medium.alpha_per_cm.is_nan() || self.medium.alpha_per_cm <= 0.0 {
                            c.fail(
                                "profile.finesse",
                                "\"optimal\" needs medium.alpha_per_cm > 0",
                            );
                        }
                    }
                    (Some(_), Some(_)) => c.fail(
                        "profile.finesse",
                        "give either gamma_peak_mhz or finesse, not both",
                    ),
                    (None, None) => {
                        c.fail("profile.finesse", "a comb needs gamma_peak_mhz or finesse")
                    }
                }
                true
            }
            ProfileConfig::CosineGrating { period_us } => {
                c.positive("profile.period_us", *period_us);
                true
            }
            ProfileConfig::Sampled {
                csv,
                delta_mhz,
                g,
                period_us,
            } => {
                match (csv, delta_mhz, g) {
                    (Some(_), None, None) => {}
                    (None, Some(d), Some(g)) => {
                        if d.len() != g.len() {
                            c.fail(
                                "profile.g",
                                format!("{} values for {} detunings", g.len(), d.len()),
                            );
                        }
                    }
                    (Some(_), _, _) => c.fail(
                        "profile.csv",
                        "give either csv or inline delta_mhz and g, not both",
                    ),
                    _ => c.fail(
                        "profile.delta_mhz",
                        "a sampled profile needs csv or both delta_mhz and g",
                    ),
                }
                if let Some(t) = period_us {
                    c.positive("profile.period_us", *t);
                }
                period_us.is_some()
            }
        };

        c.positive("pulse.rms_us", self.pulse.rms_us);
        c.finite("pulse.center_us", self.pulse.center_us);
        c.positive("pulse.grid.dt_us", self.pulse.grid.dt_us);
        let n = self.pulse.grid.n_points;
        if n < 2 || !n.is_power_of_two() {
            c.fail(
                "pulse.grid.n_points",
                format!("must be a power of two >= 2, got {n}"),
            );
        }

        if let Some(p) = &self.protocol {
            for (field, v) in [
                ("protocol.signal_in_us", p.signal_in_us),
                ("protocol.raman1_us", p.raman1_us),
                ("protocol.raman2_us", p.raman2_us),
            ] {
                if let Some(v) = v {
                    c.finite(field, v);
                }
            }
            if p.raman1_us.is_some() != p.raman2_us.is_some() && p.scheme == SchemeConfig::Shbsl {
                c.fail(
                    "protocol.raman2_us",
                    "spectral-hole storage needs both Raman pulses",
                );
            }
            if p.raman1_us.is_none() && p.raman2_us.is_some() {
                c.fail(
                    "protocol.raman1_us",
                    "second Raman pulse given without the first",
                );
            }
            if let Some(t) = p.spin_lifetime_us {
                c.positive("protocol.spin_lifetime_us", t);
            }
            if !(p.raman_efficiency > 0.0 && p.raman_efficiency <= 1.0) {
                c.fail(
                    "protocol.raman_efficiency",
                    format!("must be in (0, 1], got {}", p.raman_efficiency),
                );
            }
            if let Some(b) = p.base_efficiency {
                if !(0.0..=1.0).contains(&b) {
                    c.fail(
                        "protocol.base_efficiency",
                        format!("must be in [0, 1], got {b}"),
                    );
                }
            }
            if p.scheme == SchemeConfig::Afc && !periodic {
                c.fail(
                    "protocol.scheme",
                    format!(
                        "comb storage needs a periodic profile, not {}",
                        self.profile.kind()
                    ),
                );
            }
        }

        if let Some(s) = &self.sweep {
            match (&s.values, s.start, s.stop, s.steps) {
                (Some(v), None, None, None) => {
                    if v.is_empty() {
                        c.fail("sweep.values", "must not be empty");
                    }
                    for x in v {
                        c.finite("sweep.values", *x);
                    }
                }
                (None, Some(a), Some(b), Some(n)) => {
                    c.finite("sweep.start", a);
                    c.finite("sweep.stop", b);
                    if n == 0 {
                        c.fail("sweep.steps", "must be >= 1");
                    }
                }
                _ => c.fail(
                    "sweep.values",
                    "give either values or all of start, stop and steps",
                ),
            }
            if !s.parameter.applies_to(&self.profile) {
                c.fail(
                    "sweep.parameter",
                    format!(
                        "{} does not apply to a {} profile",
                        s.parameter.name(),
                        self.profile.kind()
                    ),
                );
            }
        }
        c.errors
    }

    /// Reads a sampled profile's CSV into the config so it is self-contained.
    /// Relative paths resolve against `base`.
    pub fn inline_sampled(&mut self, base: &Path) -> lightstore::Result<()> {
        if let ProfileConfig::Sampled {
            csv, delta_mhz, g, ..
        } = &mut self.profile
        {
            if let Some(path) = csv.take() {
                let path = if path.is_absolute() {
                    path
                } else {
                    base.join(path)
                };
                let file = std::fs::File::open(&path)?;
                let (d, v) = lightstore::io::read_sampled_csv(file)?;
                *delta_mhz = Some(d);
                *g = Some(v);
            }
        }
        Ok(())
    }

    /// The swept values, in order.
    pub fn sweep_values(&self) -> Vec<f64> {
        let Some(s) = &self.sweep else {
            return Vec::new();
        };
        if let Some(v) = &s.values {
            return v.clone();
        }
        let (a, b, n) = (
            s.start.unwrap_or(0.0),
            s.stop.unwrap_or(0.0),
            s.steps.unwrap_or(0),
        );
        if n == 1 {
            return vec![a];
        }
        (0..n)
            .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
            .collect()
    }

    /// This config with one swept parameter set to `value` and no sweep block.
    pub fn with_parameter(&self, parameter: SweepParameter, value: f64) -> Config {
        let mut c = self.clone();
        c.sweep = None;
        match parameter {
            SweepParameter::AlphaL => c.medium.alpha_per_cm = value / c.medium.length_cm,
            SweepParameter::AlphaPerCm => c.medium.alpha_per_cm = value,
            SweepParameter::LengthCm => c.medium.length_cm = value,
            SweepParameter::GammaKhz => c.medium.gamma_khz = value,
            SweepParameter::RmsUs => c.pulse.rms_us = value,
            SweepParameter::CenterUs => c.pulse.center_us = value,
            SweepParameter::Delta0Mhz => {
                if let ProfileConfig::Hole { delta0_mhz } = &mut c.profile {
                    *delta0_mhz = value;
                }
            }
            SweepParameter::Level => {
                if let ProfileConfig::Flat { level } = &mut c.profile {
                    *level = Some(value);
                }
            }
            SweepParameter::PeriodUs => match &mut c.profile {
                ProfileConfig::LorentzianComb { period_us, .. }
                | ProfileConfig::CosineGrating { period_us } => *period_us = value,
                ProfileConfig::Sampled { period_us, .. } => *period_us = Some(value),
                _ => {}
            },
            SweepParameter::Finesse => {
                if let ProfileConfig::LorentzianComb {
                    finesse,
                    gamma_peak_mhz,
                    ..
                } = &mut c.profile
                {
                    *finesse = Some(Finesse::Value(value));
                    *gamma_peak_mhz = None;
                }
            }
            SweepParameter::GammaPeakMhz => {
                if let ProfileConfig::LorentzianComb {
                    finesse,
                    gamma_peak_mhz,
                    ..
                } = &mut c.profile
                {
                    *gamma_peak_mhz = Some(value);
                    *finesse = None;
                }
            }
        }
        c
    }
}

impl SweepParameter {
    fn applies_to(self, profile: &ProfileConfig) -> bool {
        use SweepParameter::*;
        match self {
            AlphaL | AlphaPerCm | LengthCm | GammaKhz | RmsUs | CenterUs => true,
            Delta0Mhz => matches!(profile, ProfileConfig::Hole { .. }),
            Level => matches!(profile, ProfileConfig::Flat { .. }),
            PeriodUs => matches!(
                profile,
                ProfileConfig::LorentzianComb { .. }
                    | ProfileConfig::CosineGrating { .. }
                    | ProfileConfig::Sampled { .. }
            ),
            Finesse | GammaPeakMhz => matches!(profile, ProfileConfig::LorentzianComb { .. }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> Config {
        Config::from_json(
            r#"{
                "medium": {"alpha_per_cm": 5.0, "length_cm": 1.0},
                "profile": {"kind": "hole", "delta0_mhz": 1.0},
                "pulse": {"rms_us": 1.75, "center_us": 20.0,
                          "grid": {"n_points": 1024, "dt_us": 0.05}}
            }"#,
        )
        .unwrap()
    }

    #[test]
    fn defaults_fill_in() {
        let c = base();
        assert_eq!(c.medium.gamma_khz, 10.0);
        assert_eq!(c.pulse.shape, PulseShape::Gaussian);
        assert!(c.validate().is_empty());
    }

    #[test]
    fn bad_fields_are_named() {
        let mut c = base();
        c.medium.alpha_per_cm = -1.0;
        c.pulse.grid.n_points = 1000;
        let fields: Vec<_> = c.validate().into_iter().map(|e| e.field).collect();
        assert_eq!(fields, ["medium.alpha_per_cm", "pulse.grid.n_points"]);
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let err = Config::from_json(
            r#"{"medium": {"alpha_per_cm": 1, "length_cm": 1, "colour": 3},
                "profile": {"kind": "flat"},
                "pulse": {"rms_us": 1, "center_us": 1, "grid": {"n_points": 8, "dt_us": 1}}}"#,
        )
        .unwrap_err();
        assert!(err.to_string().contains("colour"), "{err}");
    }

    #[test]
    fn finesse_accepts_number_or_optimal() {
        for (text, want) in [
            ("4.5", Finesse::Value(4.5)),
            ("\"optimal\"", Finesse::Named(FinesseName::Optimal)),
        ] {
            let f: Finesse = serde_json::from_str(text).unwrap();
            assert_eq!(f, want);
        }
        assert!(serde_json::from_str::<Finesse>("\"best\"").is_err());
    }

    #[test]
    fn sweep_grid_and_parameter_binding() {
        let mut c = base();
        c.sweep = Some(SweepConfig {
            parameter: SweepParameter::AlphaL,
            start: Some(1.0),
            stop: Some(3.0),
            steps: Some(3),
            values: None,
        });
        assert!(c.validate().is_empty());
        assert_eq!(c.sweep_values(), [1.0, 2.0, 3.0]);
        let p = c.with_parameter(SweepParameter::AlphaL, 2.0);
        assert_eq!(p.medium.alpha_per_cm, 2.0);
        assert!(p.sweep.is_none());

        c.sweep.as_mut().unwrap().parameter = SweepParameter::Finesse;
        assert_eq!(c.validate()[0].field, "sweep.parameter");
    }

    #[test]
    fn serialisation_round_trips() {
        let mut c = base();
        c.profile = ProfileConfig::LorentzianComb {
            period_us: 1.5,
            gamma_peak_mhz: None,
            finesse: Some(Finesse::Named(FinesseName::Optimal)),
        };
        let text = serde_json::to_string(&c).unwrap();
        assert_eq!(Config::from_json(&text).unwrap(), c);
    }
}
