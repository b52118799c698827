use thiserror::Error;

use crate::slowlight::EnergyAudit;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{name} must be {requirement} (got {value})")]
    Domain {
        name: &'static str,
        requirement: &'static str,
        value: f64,
    },

    #[error("detuning {delta:.6e} rad/s is outside the sampled range [{min:.6e}, {max:.6e}]")]
    OutOfRange { delta: f64, min: f64, max: f64 },

    #[error("operation not supported for this profile: {0}")]
    UnsupportedProfile(String),

    #[error("invalid sampled profile: {0}")]
    InvalidSampled(String),

    #[error("grid mismatch: {0}")]
    Grid(String),

    #[error("pulse spectrum reaches the grid edge ({ratio:.3e} of peak amplitude); refine dt")]
    Aliasing { ratio: f64 },

    #[error("quadrature did not converge (achieved {achieved:.3e})")]
    Quadrature { achieved: f64 },

    #[error("lattice step too coarse: {0}")]
    Stability(String),

    #[error("output energy is {ratio:.3e} of the input; delay is undetectable")]
    UndetectableDelay { ratio: f64 },

    #[error("echo windows cannot be resolved: {0}")]
    Resolution(String),

    #[error("Fourier cutoff {have} does not cover echo order {need}")]
    Cutoff { have: usize, need: usize },

    #[error("Fourier coefficient g_{0} is missing")]
    MissingCoefficient(i64),

    #[error("invalid protocol timeline: {0}")]
    Timeline(String),

    #[error("first Raman pulse at {raman1:.6e} s arrives after the natural echo at {echo:.6e} s")]
    TooLate { raman1: f64, echo: f64 },

    #[error("energy audit invalid: {reason}")]
    AuditInvalid {
        reason: String,
        audit: Box<EnergyAudit>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn positive(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(Error::Domain {
            name,
            requirement: "finite and > 0",
            value,
        })
    }
}

pub(crate) fn non_negative(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value >= 0.0 {
        Ok(value)
    } else {
        Err(Error::Domain {
            name,
            requirement: "finite and >= 0",
            value,
        })
    }
}
