//! Timeline bookkeeping for storage protocols that park the excitation in a
//! spin coherence.
//!
//! A Raman π-pulse maps optical coherences onto spin coherences and stops
//! the optical phase evolution; a second one maps them back and restarts it.
//! For a comb the rephasing clock therefore pauses between the two pulses.
//! A counter-propagating pair imprints a 2kz phase that phase-matches
//! emission in the backward direction.

use crate::error::{non_negative, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    /// Slow light in a spectral hole, frozen by Raman transfer.
    Shbsl,
    /// Atomic frequency comb echo.
    Afc,
}

impl Scheme {
    pub fn name(self) -> &'static str {
        match self {
            Scheme::Shbsl => "SHBSL",
            Scheme::Afc => "AFC",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Backward,
}

impl Direction {
    pub fn name(self) -> &'static str {
        match self {
            Direction::Forward => "forward",
            Direction::Backward => "backward",
        }
    }
}

/// Times are in seconds on a common clock.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProtocolTimeline {
    pub scheme: Scheme,
    pub signal_in_time: f64,
    pub raman1_time: Option<f64>,
    pub raman2_time: Option<f64>,
    /// Comb period T; required for [`Scheme::Afc`].
    pub comb_period: Option<f64>,
    /// 1/e decay time of the spin coherence amplitude.
    pub spin_lifetime: f64,
    /// Direction requested from the Raman pair. `Backward` means the two
    /// pulses counter-propagate.
    pub retrieval_direction: Direction,
    /// Population transfer efficiency of each Raman pulse, in (0, 1].
    pub raman_efficiency: f64,
}

impl ProtocolTimeline {
    /// Comb storage without Raman pulses.
    pub fn afc(signal_in_time: f64, comb_period: f64) -> Self {
        Self {
            scheme: Scheme::Afc,
            signal_in_time,
            raman1_time: None,
            raman2_time: None,
            comb_period: Some(comb_period),
            spin_lifetime: f64::INFINITY,
            retrieval_direction: Direction::Forward,
            raman_efficiency: 1.0,
        }
    }

    /// Adds a Raman pair at `raman1` and `raman2`.
    pub fn with_raman(mut self, raman1: f64, raman2: f64, direction: Direction) -> Self {
        self.raman1_time = Some(raman1);
        self.raman2_time = Some(raman2);
        self.retrieval_direction = direction;
        self
    }

    pub fn with_spin_lifetime(mut self, lifetime: f64) -> Self {
        self.spin_lifetime = lifetime;
        self
    }

    /// Every time shifted by `dt`.
    pub fn shifted(mut self, dt: f64) -> Self {
        self.signal_in_time += dt;
        self.raman1_time = self.raman1_time.map(|t| t + dt);
        self.raman2_time = self.raman2_time.map(|t| t + dt);
        self
    }

    fn validate(&self) -> Result<()> {
        let finite = |name: &str, t: f64| {
            if t.is_finite() {
                Ok(())
            } else {
                Err(Error::Timeline(format!("{name} must be finite")))
            }
        };
        finite("signal time", self.signal_in_time)?;
        if let Some(t) = self.raman1_time {
            finite("first Raman time", t)?;
        }
        if let Some(t) = self.raman2_time {
            finite("second Raman time", t)?;
        }
        if self.spin_lifetime.is_nan() || self.spin_lifetime <= 0.0 {
            return Err(Error::Timeline("spin lifetime must be > 0".into()));
        }
        if !(self.raman_efficiency > 0.0 && self.raman_efficiency <= 1.0) {
            return Err(Error::Timeline(
                "Raman transfer efficiency must be in (0, 1]".into(),
            ));
        }
        if let (Some(r1), Some(r2)) = (self.raman1_time, self.raman2_time) {
            if r2 < r1 {
                return Err(Error::Timeline(
                    "second Raman pulse precedes the first".into(),
                ));
            }
        }
        if let Some(r1) = self.raman1_time {
            if r1 < self.signal_in_time {
                return Err(Error::Timeline(
                    "first Raman pulse precedes the signal".into(),
                ));
            }
        }
        if self.scheme == Scheme::Afc {
            match self.comb_period {
                Some(t) if t.is_finite() && t > 0.0 => {}
                _ => return Err(Error::Timeline("comb storage needs a period T > 0".into())),
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RetrievalPrediction {
    pub retrieval_time: f64,
    pub direction: Direction,
    /// Field amplitude factor from spin decay and Raman transfer, in (0, 1].
    pub amplitude_factor: f64,
    /// Whether the emission is phase matched in `direction`.
    pub phase_matched: bool,
}

pub fn predict_retrieval(timeline: &ProtocolTimeline) -> Result<RetrievalPrediction> {
    timeline.validate()?;
    let t_in = timeline.signal_in_time;
    let pair = match (timeline.raman1_time, timeline.raman2_time) {
        (Some(r1), Some(r2)) => Some((r1, r2)),
        _ => None,
    };
    let lone_pulse =
        pair.is_none() && (timeline.raman1_time.is_some() || timeline.raman2_time.is_some());

    let direction = if pair.is_some() && timeline.retrieval_direction == Direction::Backward {
        Direction::Backward
    } else {
        Direction::Forward
    };
    let amplitude_factor = match pair {
        Some((r1, r2)) => {
            let decay = (-(r2 - r1) / timeline.spin_lifetime).exp();
            decay * timeline.raman_efficiency * timeline.raman_efficiency
        }
        None => 1.0,
    };

    let retrieval_time = match timeline.scheme {
        Scheme::Afc => {
            let period = timeline.comb_period.expect("validated");
            let echo = t_in + period;
            match pair {
                Some((r1, r2)) => {
                    if r1 >= echo {
                        return Err(Error::TooLate { raman1: r1, echo });
                    }
                    // the clock pauses for r2 − r1; written this way a
                    // zero-length pause lands exactly on the bare echo
                    echo + (r2 - r1)
                }
                // a single transfer leaves the coherence in the spin state
                // with nothing to bring it back; the prediction falls back to
                // the natural echo and is marked unmatched
                None => echo,
            }
        }
        Scheme::Shbsl => match pair {
            Some((_, r2)) => r2,
            None => {
                return Err(Error::Timeline(
                    "slow-light storage needs both Raman pulses".into(),
                ))
            }
        },
    };

    Ok(RetrievalPrediction {
        retrieval_time,
        direction,
        amplitude_factor,
        phase_matched: !lone_pulse,
    })
}

/// base_eta × amplitude_factor².
pub fn compose_efficiency(base_eta: f64, prediction: &RetrievalPrediction) -> Result<f64> {
    let base = non_negative("base efficiency", base_eta)?;
    if base > 1.0 {
        return Err(Error::Domain {
            name: "base efficiency",
            requirement: "<= 1",
            value: base,
        });
    }
    Ok(base * prediction.amplitude_factor * prediction.amplitude_factor)
}
