//! Brute-force integration of the Bloch–Maxwell equations on a discrete
//! (Δ, z, t) lattice.
//!
//! Each detuning class is an independent damped oscillator driven by the
//! local field; its update over one time step is exact for a field that is
//! linear within the step. The field is then marched in z with classical
//! RK4. Nothing here touches the FFT or the closed-form kernels, which is
//! what makes it useful as a cross-check of [`super::propagate`].
//!
//! Detuning classes sit on a uniform grid of half-width W. The grid spacing
//! is chosen so the discrete ensemble does not rephase inside the simulated
//! window. Classes beyond W are far off resonance and follow the field
//! adiabatically, P ≈ −Ω/Δ − i∂tΩ/Δ², which adds the delay term
//! −(α ḡ/πW)·∂tΩ to the propagation equation.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use super::MediumParams;
use crate::error::{Error, Result};
use crate::pulse::{PulseEnvelope, TimeGrid};
use crate::spectra::SpectralProfile;

pub const MAX_DETUNING_CLASSES: usize = 4096;
pub const MAX_SLICES: usize = 256;

/// Largest |K·dz| tolerated by the RK4 march; its real-axis limit is 2.785.
const RK4_STABLE_STEP: f64 = 2.78;

const CHUNK: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleConfig {
    /// Number of detuning classes.
    pub n_delta: usize,
    /// Number of z steps across the medium.
    pub n_z: usize,
    /// Half-width W of the detuning grid (rad/s). Defaults to a spacing of
    /// π/(window duration).
    pub delta_half_width: Option<f64>,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            n_delta: 2048,
            n_z: 128,
            delta_half_width: None,
        }
    }
}

/// Ω(L, t) computed on the lattice.
pub fn time_domain_oracle(
    pulse: &PulseEnvelope,
    profile: &SpectralProfile,
    medium: &MediumParams,
    config: OracleConfig,
) -> Result<PulseEnvelope> {
    let lattice = Lattice::new(pulse.grid(), profile, medium, config)?;
    Ok(lattice.run(pulse, None).output)
}

/// State of the lattice at one instant, for energy bookkeeping.
#[derive(Debug, Clone)]
pub(crate) struct Snapshot {
    /// |Ω(z_k, t_s)|² at each of the n_z + 1 slices.
    pub field_intensity: Vec<f64>,
    /// ∫ g |P(Δ; z_k, t_s)|² / 2 dΔ at each slice, tails included.
    pub atomic_density: Vec<f64>,
    pub dz: f64,
}

pub(crate) struct LatticeRun {
    pub output: PulseEnvelope,
    pub snapshot: Option<Snapshot>,
}

pub(crate) struct Lattice {
    grid: TimeGrid,
    weights: Vec<f64>,
    steps: Vec<StepCoefficients>,
    /// ḡ/(πW): coefficient of the far-detuning delay term.
    tail_delay: f64,
    /// ḡ/W: far-detuning contribution to ∫g|P|²/2 per unit |Ω|².
    tail_energy: f64,
    alpha: f64,
    dz: f64,
    n_z: usize,
}

#[derive(Debug, Clone, Copy)]
struct StepCoefficients {
    decay: Complex64,
    c0: Complex64,
    c1: Complex64,
    c2: Complex64,
}

impl StepCoefficients {
    /// For a = iΔ + γ over a step dt, with u = s/dt: decay e^{−a dt} and the
    /// weights ∫₀^dt e^{−a(dt−s)} q(u) ds for q = 1, u and u(u−1)/2, the
    /// basis of a quadratic drive.
    fn new(a: Complex64, dt: f64) -> Self {
        let x = a * dt;
        let decay = (-x).exp();
        // I_k = ∫₀¹ e^{−x(1−u)} u^k du
        let (i0, i1, i2) = if x.norm() < 1.0 {
            // I_k = Σ_m (−x)^m k!/(m+k+1)!
            let mut sums = [Complex64::new(0.0, 0.0); 3];
            let mut power = Complex64::new(1.0, 0.0);
            for m in 0..30 {
                let mut fact = 1.0;
                for j in 1..=m + 1 {
                    fact *= j as f64;
                }
                // fact = (m+1)!
                sums[0] += power / fact;
                sums[1] += power / (fact * (m + 2) as f64);
                sums[2] += power * 2.0 / (fact * ((m + 2) * (m + 3)) as f64);
                power *= -x;
            }
            (sums[0], sums[1], sums[2])
        } else {
            let i0 = (1.0 - decay) / x;
            let i1 = (1.0 - i0) / x;
            let i2 = (1.0 - 2.0 * i1) / x;
            (i0, i1, i2)
        };
        Self {
            decay,
            c0: i0 * dt,
            c1: i1 * dt,
            c2: 0.5 * (i2 - i1) * dt,
        }
    }
}

impl Lattice {
    pub(crate) fn new(
        grid: &TimeGrid,
        profile: &SpectralProfile,
        medium: &MediumParams,
        config: OracleConfig,
    ) -> Result<Self> {
        let OracleConfig {
            n_delta,
            n_z,
            delta_half_width,
        } = config;
        if !(16..=MAX_DETUNING_CLASSES).contains(&n_delta) {
            return Err(Error::Domain {
                name: "oracle detuning classes",
                requirement: "between 16 and 4096",
                value: n_delta as f64,
            });
        }
        if !(1..=MAX_SLICES).contains(&n_z) {
            return Err(Error::Domain {
                name: "oracle z slices",
                requirement: "between 1 and 256",
                value: n_z as f64,
            });
        }
        let window = grid.duration();
        let spacing = match delta_half_width {
            Some(w) if w.is_finite() && w > 0.0 => 2.0 * w / n_delta as f64,
            Some(w) => {
                return Err(Error::Domain {
                    name: "oracle detuning half-width",
                    requirement: "finite and > 0",
                    value: w,
                })
            }
            None => PI / window,
        };
        if 2.0 * PI / spacing < window {
            return Err(Error::Stability(format!(
                "detuning spacing {spacing:.3e} rad/s rephases the ensemble within the {window:.3e} s window"
            )));
        }
        let half_width = 0.5 * spacing * n_delta as f64;
        let dt = grid.dt();
        let gamma = medium.gamma();

        let mut weights = Vec::with_capacity(n_delta);
        let mut steps = Vec::with_capacity(n_delta);
        for j in 0..n_delta {
            let delta = -half_width + (j as f64 + 0.5) * spacing;
            weights.push(profile.density(delta) * spacing);
            steps.push(StepCoefficients::new(Complex64::new(gamma, delta), dt));
        }

        let background = profile.background();
        let tail_delay = background / (PI * half_width);
        let alpha = medium.alpha();
        let dz = medium.length() / n_z as f64;
        // worst-case |K| over the band: absorption α/2 plus the tail delay
        // term at Nyquist
        let stiffness = alpha * dz * (0.5 + tail_delay * PI / dt);
        if stiffness > RK4_STABLE_STEP {
            return Err(Error::Stability(format!(
                "|K|·dz reaches {stiffness:.2} (limit {RK4_STABLE_STEP}); use more z slices"
            )));
        }

        Ok(Self {
            grid: *grid,
            weights,
            steps,
            tail_delay,
            tail_energy: background / half_width,
            alpha,
            dz,
            n_z,
        })
    }

    /// S(t) = Σ_j w_j P_j(t) driven by `field`, and optionally
    /// Σ_j w_j |P_j(t_probe)|² / 2.
    fn source(&self, field: &[Complex64], probe: Option<usize>) -> (Vec<Complex64>, f64) {
        let n_t = field.len();
        // second difference of the field over step n, i.e. [t_{n−1}, t_n];
        // the last step reuses the one before
        let mut curvature = vec![Complex64::new(0.0, 0.0); n_t];
        for n in 1..n_t {
            curvature[n] = if n + 1 < n_t {
                field[n + 1] - 2.0 * field[n] + field[n - 1]
            } else if n >= 2 {
                field[n] - 2.0 * field[n - 1] + field[n - 2]
            } else {
                Complex64::new(0.0, 0.0)
            };
        }
        let partials: Vec<(Vec<Complex64>, f64)> = self
            .weights
            .par_chunks(CHUNK)
            .zip(self.steps.par_chunks(CHUNK))
            .map(|(weights, steps)| {
                let mut acc = vec![Complex64::new(0.0, 0.0); n_t];
                let mut energy = 0.0;
                for (&w, step) in weights.iter().zip(steps) {
                    if w == 0.0 {
                        continue;
                    }
                    let mut p = Complex64::new(0.0, 0.0);
                    for n in 1..n_t {
                        let drive = step.c0 * field[n - 1]
                            + step.c1 * (field[n] - field[n - 1])
                            + step.c2 * curvature[n];
                        p = step.decay * p - Complex64::i() * drive;
                        acc[n] += w * p;
                        if probe == Some(n) {
                            energy += 0.5 * w * p.norm_sqr();
                        }
                    }
                }
                (acc, energy)
            })
            .collect();
        // fixed-order reduction keeps results independent of scheduling
        let mut total = vec![Complex64::new(0.0, 0.0); n_t];
        let mut energy = 0.0;
        for (acc, e) in partials {
            for (t, a) in total.iter_mut().zip(acc) {
                *t += a;
            }
            energy += e;
        }
        (total, energy)
    }

    /// ∂zΩ for the whole trace; also returns the atomic energy density at
    /// the probe time.
    fn derivative(&self, field: &[Complex64], probe: Option<usize>) -> (Vec<Complex64>, f64) {
        let (source, energy) = self.source(field, probe);
        let n_t = field.len();
        let dt = self.grid.dt();
        let coupling = -Complex64::i() * (self.alpha / (2.0 * PI));
        let tail = self.alpha * self.tail_delay;
        let out = (0..n_t)
            .map(|n| {
                let dfield = if n == 0 {
                    (field[1] - field[0]) / dt
                } else if n == n_t - 1 {
                    (field[n] - field[n - 1]) / dt
                } else {
                    (field[n + 1] - field[n - 1]) / (2.0 * dt)
                };
                coupling * source[n] - tail * dfield
            })
            .collect();
        let density = probe
            .map(|k| energy + self.tail_energy * field[k].norm_sqr())
            .unwrap_or(0.0);
        (out, density)
    }

    pub(crate) fn run(&self, pulse: &PulseEnvelope, probe: Option<usize>) -> LatticeRun {
        let mut field = pulse.values().to_vec();
        let h = self.dz;
        let mut field_intensity = Vec::new();
        let mut atomic_density = Vec::new();

        let axpy = |base: &[Complex64], k: &[Complex64], s: f64| -> Vec<Complex64> {
            base.iter().zip(k).map(|(b, k)| b + k * s).collect()
        };

        for _ in 0..self.n_z {
            let (k1, density) = self.derivative(&field, probe);
            if let Some(idx) = probe {
                field_intensity.push(field[idx].norm_sqr());
                atomic_density.push(density);
            }
            let (k2, _) = self.derivative(&axpy(&field, &k1, 0.5 * h), None);
            let (k3, _) = self.derivative(&axpy(&field, &k2, 0.5 * h), None);
            let (k4, _) = self.derivative(&axpy(&field, &k3, h), None);
            for (i, f) in field.iter_mut().enumerate() {
                *f += (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) * (h / 6.0);
            }
        }
        if let Some(idx) = probe {
            let (_, density) = self.derivative(&field, probe);
            field_intensity.push(field[idx].norm_sqr());
            atomic_density.push(density);
        }

        let output = PulseEnvelope::new(self.grid, field).expect("lattice keeps the grid");
        LatticeRun {
            output,
            snapshot: probe.map(|_| Snapshot {
                field_intensity,
                atomic_density,
                dz: h,
            }),
        }
    }
}
