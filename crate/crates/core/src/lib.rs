//! Weak-signal propagation of light through spectrally tailored
//! inhomogeneously broadened absorbers.
//!
//! The medium is described by a normalized spectral density g(Δ) over
//! angular detunings ([`spectra`]), an absorption coefficient, a length and
//! a homogeneous width ([`response::MediumParams`]). Pulses are complex
//! envelopes on power-of-two time grids ([`pulse`]). From there:
//!
//! - [`response`] builds the linear transfer function and propagates pulses,
//!   with a brute-force lattice integrator as an independent check;
//! - [`slowlight`] measures group delay, distortion and the field/atom
//!   energy split in a spectral hole;
//! - [`echoes`] computes echo trains from periodic gratings by order
//!   recursion, closed forms and trace detection;
//! - [`protocol`] predicts retrieval time and direction for Raman-assisted
//!   storage timelines;
//! - [`io`] reads and writes the CSV formats.
//!
//! All quantities are SI: seconds, 1/m, and rad/s for detunings and
//! frequencies.

pub mod echoes;
pub mod error;
pub mod io;
pub mod protocol;
pub mod pulse;
pub mod response;
pub mod slowlight;
pub mod spectra;

pub use error::{Error, Result};
pub use pulse::{PulseEnvelope, TimeGrid};
pub use response::{MediumParams, TransferFunction};
pub use spectra::{FourierCoeffs, SpectralProfile};
