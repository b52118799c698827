//! Linear response of the absorber and propagation of weak envelopes.
//!
//! In the weak-signal limit the field obeys
//!
//! ```text
//! ∂zΩ = −(iα/2π) ∫ g(Δ) P(Δ) dΔ
//! ∂tP = −(iΔ + γ) P − iΩ
//! ```
//!
//! written in the frame retarded by z/c. In the frequency domain each
//! spectral component evolves independently, Ω̃(z,ω) = Ω̃(0,ω)·e^{K(ω)z},
//! with the kernel K computed in [`kernel`]. The same equations integrated
//! directly on a (Δ, z, t) lattice live in [`oracle`] and serve as an
//! independent check.

pub mod kernel;
pub mod oracle;
pub mod transfer;

pub use kernel::susceptibility_kernel;
pub use oracle::{time_domain_oracle, OracleConfig};
pub use transfer::{propagate, propagate_through, transfer_function, TransferFunction};

use std::f64::consts::PI;

use crate::error::{non_negative, positive, Result};

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Homogeneous half-width used when none is given: 2π × 10 kHz.
pub const DEFAULT_GAMMA: f64 = 2.0 * PI * 10e3;

/// Absorption coefficient α (1/m), length L (m) and homogeneous half-width
/// γ (rad/s) of the medium.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MediumParams {
    alpha: f64,
    length: f64,
    gamma: f64,
}

impl MediumParams {
    pub fn new(alpha: f64, length: f64, gamma: f64) -> Result<Self> {
        Ok(Self {
            alpha: non_negative("absorption coefficient alpha", alpha)?,
            length: positive("medium length L", length)?,
            gamma: positive("homogeneous width gamma", gamma)?,
        })
    }

    /// Medium of length `length` whose absorption gives optical depth αL.
    pub fn with_optical_depth(alpha_l: f64, length: f64, gamma: f64) -> Result<Self> {
        let length = positive("medium length L", length)?;
        Self::new(
            non_negative("optical depth alphaL", alpha_l)? / length,
            length,
            gamma,
        )
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn optical_depth(&self) -> f64 {
        self.alpha * self.length
    }

    /// Vacuum transit time L/c, dropped from envelopes by the retarded frame.
    pub fn vacuum_transit(&self) -> f64 {
        self.length / SPEED_OF_LIGHT
    }
}
