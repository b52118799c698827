//! Inhomogeneous spectral distributions g(Δ) and their Fourier series.
//!
//! Detunings are angular frequencies in rad/s everywhere in this crate. A
//! profile is the fraction of absorbers left at detuning Δ after spectral
//! tailoring, normalized so that an untouched line has g = 1.
//!
//! Periodic profiles expand as g(Δ) = Σₙ gₙ e^{−inΔT}, where 2π/T is the
//! spacing of the structure in Δ. Negative orders g₋ₙ drive the echo at
//! time nT.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{non_negative, positive, Error, Result};

/// Default number of Fourier orders kept on each side of g₀.
pub const DEFAULT_FOURIER_CUTOFF: usize = 8;

/// Minimum number of samples per period for Fourier analysis of sampled data.
pub const MIN_POINTS_PER_PERIOD: usize = 64;

/// Uniform density g(Δ) = level. `level = 0` is a fully bleached medium.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Flat {
    level: f64,
}

impl Flat {
    pub fn new(level: f64) -> Result<Self> {
        let level = non_negative("flat level", level)?;
        if level > 1.0 {
            return Err(Error::Domain {
                name: "flat level",
                requirement: "<= 1",
                value: level,
            });
        }
        Ok(Self { level })
    }

    pub fn level(&self) -> f64 {
        self.level
    }
}

/// Lorentzian transparency window g(Δ) = 1 − 1/(1 + 4Δ²/Δ₀²).
///
/// `delta0` is the full width at half maximum of the hole.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hole {
    delta0: f64,
}

impl Hole {
    pub fn new(delta0: f64) -> Result<Self> {
        Ok(Self {
            delta0: positive("hole width delta0", delta0)?,
        })
    }

    pub fn delta0(&self) -> f64 {
        self.delta0
    }

    fn eval(&self, delta: f64) -> f64 {
        let x = 2.0 * delta / self.delta0;
        x * x / (1.0 + x * x)
    }
}

/// Infinite train of unit-height Lorentzian teeth centred on 2πl/T with
/// half width at half maximum `gamma`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LorentzianComb {
    gamma: f64,
    period: f64,
}

impl LorentzianComb {
    /// Rejects combs with ΓT > π: the teeth would overlap and the closed-form
    /// coefficients would no longer describe well-separated peaks.
    pub fn new(gamma: f64, period: f64) -> Result<Self> {
        let gamma = positive("comb tooth width gamma", gamma)?;
        let period = positive("comb period T", period)?;
        if gamma * period > PI {
            return Err(Error::Domain {
                name: "comb gamma*T",
                requirement: "<= pi (finesse >= 1)",
                value: gamma * period,
            });
        }
        Ok(Self { gamma, period })
    }

    pub fn from_finesse(finesse: f64, period: f64) -> Result<Self> {
        let finesse = positive("finesse", finesse)?;
        let period = positive("comb period T", period)?;
        Self::new(PI / (finesse * period), period)
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn finesse(&self) -> f64 {
        PI / (self.gamma * self.period)
    }

    /// Closed-form lattice sum of the teeth:
    /// (ΓT/2)·sinh(ΓT) / (cosh(ΓT) − cos(ΔT)).
    fn eval(&self, delta: f64) -> f64 {
        let a = self.gamma * self.period;
        let s = (0.5 * a).sinh();
        let c = (0.5 * delta * self.period).sin();
        // cosh a − cos b = 2 sinh²(a/2) + 2 sin²(b/2), free of cancellation
        0.5 * a * a.sinh() / (2.0 * (s * s + c * c))
    }

    fn coefficient(&self, n: i64) -> f64 {
        let a = self.gamma * self.period;
        0.5 * a * (-(n.unsigned_abs() as f64) * a).exp()
    }
}

/// Three-pulse-echo population grating g(Δ) = [1 + cos(ΔT)]/2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CosineGrating {
    period: f64,
}

impl CosineGrating {
    pub fn new(period: f64) -> Result<Self> {
        Ok(Self {
            period: positive("grating period T", period)?,
        })
    }

    pub fn period(&self) -> f64 {
        self.period
    }
}

/// Tabulated g(Δ) on a uniform grid, linearly interpolated.
#[derive(Debug, Clone, PartialEq)]
pub struct Sampled {
    delta: Vec<f64>,
    g: Vec<f64>,
    period: Option<f64>,
    background: f64,
}

impl Sampled {
    pub fn new(delta: Vec<f64>, g: Vec<f64>) -> Result<Self> {
        if delta.len() != g.len() {
            return Err(Error::InvalidSampled(format!(
                "{} detunings but {} values",
                delta.len(),
                g.len()
            )));
        }
        if delta.len() < 2 {
            return Err(Error::InvalidSampled("need at least two samples".into()));
        }
        if delta.iter().chain(&g).any(|v| !v.is_finite()) {
            return Err(Error::InvalidSampled("non-finite sample".into()));
        }
        if let Some(v) = g.iter().find(|&&v| v < 0.0) {
            return Err(Error::InvalidSampled(format!("negative density {v}")));
        }
        let step = (delta[delta.len() - 1] - delta[0]) / (delta.len() - 1) as f64;
        if step <= 0.0 {
            return Err(Error::InvalidSampled(
                "detuning grid must be strictly increasing".into(),
            ));
        }
        for (i, w) in delta.windows(2).enumerate() {
            let d = w[1] - w[0];
            if d <= 0.0 || (d - step).abs() > 1e-6 * step {
                return Err(Error::InvalidSampled(format!(
                    "grid spacing at index {i} is {d:.6e}, expected uniform {step:.6e}"
                )));
            }
        }
        let background = edge_background(&g);
        Ok(Self {
            delta,
            g,
            period: None,
            background,
        })
    }

    /// Declares the structure periodic with period T (spacing 2π/T in Δ),
    /// which enables Fourier analysis.
    pub fn with_period(mut self, period: f64) -> Result<Self> {
        self.period = Some(positive("sampled period T", period)?);
        Ok(self)
    }

    pub fn detunings(&self) -> &[f64] {
        &self.delta
    }

    pub fn values(&self) -> &[f64] {
        &self.g
    }

    pub fn period(&self) -> Option<f64> {
        self.period
    }

    pub fn step(&self) -> f64 {
        (self.delta[self.delta.len() - 1] - self.delta[0]) / (self.delta.len() - 1) as f64
    }

    pub fn range(&self) -> (f64, f64) {
        (self.delta[0], self.delta[self.delta.len() - 1])
    }

    /// Density assumed beyond the tabulated range.
    pub fn background(&self) -> f64 {
        self.background
    }

    fn eval(&self, delta: f64) -> Result<f64> {
        let (min, max) = self.range();
        let tol = 1e-9 * self.step();
        if delta < min - tol || delta > max + tol {
            return Err(Error::OutOfRange { delta, min, max });
        }
        Ok(self.interpolate(delta.clamp(min, max)))
    }

    fn interpolate(&self, delta: f64) -> f64 {
        let x = (delta - self.delta[0]) / self.step();
        let last = self.g.len() - 1;
        let i = (x.floor().max(0.0) as usize).min(last - 1);
        let frac = (x - i as f64).clamp(0.0, 1.0);
        self.g[i] * (1.0 - frac) + self.g[i + 1] * frac
    }

    fn fourier(&self, cutoff: usize) -> Result<FourierCoeffs> {
        let period = self.period.ok_or_else(|| {
            Error::UnsupportedProfile("sampled profile has no declared period".into())
        })?;
        let (min, max) = self.range();
        let span = max - min;
        let spacing = 2.0 * PI / period;
        let periods = span / spacing;
        let whole = periods.round();
        if whole < 1.0 || (periods - whole).abs() > 1e-6 * whole {
            return Err(Error::InvalidSampled(format!(
                "grid spans {periods:.6} periods; Fourier analysis needs a whole number"
            )));
        }
        let per_period = (self.g.len() - 1) as f64 / whole;
        if per_period < MIN_POINTS_PER_PERIOD as f64 - 1e-9 {
            return Err(Error::InvalidSampled(format!(
                "{per_period:.1} samples per period, need at least {MIN_POINTS_PER_PERIOD}"
            )));
        }
        // trapezoid over whole periods: end points carry half weight
        let step = self.step();
        let last = self.g.len() - 1;
        let positive: Vec<Complex64> = (0..=cutoff)
            .map(|n| {
                let sum: Complex64 = self
                    .delta
                    .iter()
                    .zip(&self.g)
                    .enumerate()
                    .map(|(j, (&d, &g))| {
                        let w = if j == 0 || j == last { 0.5 } else { 1.0 };
                        Complex64::from_polar(w * g, n as f64 * d * period)
                    })
                    .sum();
                sum * step / span
            })
            .collect();
        Ok(FourierCoeffs::from_non_negative(period, &positive, None))
    }
}

/// Mean of the outer eighth of the samples on each side.
fn edge_background(g: &[f64]) -> f64 {
    let k = (g.len() / 8).max(1);
    let left: f64 = g[..k].iter().sum::<f64>() / k as f64;
    let right: f64 = g[g.len() - k..].iter().sum::<f64>() / k as f64;
    0.5 * (left + right)
}

/// Which family a profile belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProfileKind {
    Flat,
    Hole,
    LorentzianComb,
    CosineGrating,
    Sampled,
}

impl ProfileKind {
    pub fn name(self) -> &'static str {
        match self {
            ProfileKind::Flat => "flat",
            ProfileKind::Hole => "hole",
            ProfileKind::LorentzianComb => "lorentzian_comb",
            ProfileKind::CosineGrating => "cosine_grating",
            ProfileKind::Sampled => "sampled",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SpectralProfile {
    Flat(Flat),
    Hole(Hole),
    LorentzianComb(LorentzianComb),
    CosineGrating(CosineGrating),
    Sampled(Sampled),
}

impl SpectralProfile {
    pub fn flat() -> Self {
        SpectralProfile::Flat(Flat { level: 1.0 })
    }

    pub fn bleached() -> Self {
        SpectralProfile::Flat(Flat { level: 0.0 })
    }

    pub fn flat_level(level: f64) -> Result<Self> {
        Flat::new(level).map(SpectralProfile::Flat)
    }

    pub fn hole(delta0: f64) -> Result<Self> {
        Hole::new(delta0).map(SpectralProfile::Hole)
    }

    pub fn lorentzian_comb(gamma: f64, period: f64) -> Result<Self> {
        LorentzianComb::new(gamma, period).map(SpectralProfile::LorentzianComb)
    }

    pub fn comb_with_finesse(finesse: f64, period: f64) -> Result<Self> {
        LorentzianComb::from_finesse(finesse, period).map(SpectralProfile::LorentzianComb)
    }

    pub fn cosine_grating(period: f64) -> Result<Self> {
        CosineGrating::new(period).map(SpectralProfile::CosineGrating)
    }

    pub fn sampled(delta: Vec<f64>, g: Vec<f64>) -> Result<Self> {
        Sampled::new(delta, g).map(SpectralProfile::Sampled)
    }

    pub fn kind(&self) -> ProfileKind {
        match self {
            SpectralProfile::Flat(_) => ProfileKind::Flat,
            SpectralProfile::Hole(_) => ProfileKind::Hole,
            SpectralProfile::LorentzianComb(_) => ProfileKind::LorentzianComb,
            SpectralProfile::CosineGrating(_) => ProfileKind::CosineGrating,
            SpectralProfile::Sampled(_) => ProfileKind::Sampled,
        }
    }

    /// Period T of the structure, if it has one.
    pub fn period(&self) -> Option<f64> {
        match self {
            SpectralProfile::LorentzianComb(c) => Some(c.period),
            SpectralProfile::CosineGrating(c) => Some(c.period),
            SpectralProfile::Sampled(s) => s.period,
            _ => None,
        }
    }

    /// g(Δ). Sampled profiles refuse detunings outside their grid.
    pub fn eval(&self, delta: f64) -> Result<f64> {
        match self {
            SpectralProfile::Sampled(s) => s.eval(delta),
            _ => Ok(self.density(delta)),
        }
    }

    /// g(Δ) extended over the whole axis: sampled profiles fall back to their
    /// edge background outside the grid.
    pub fn density(&self, delta: f64) -> f64 {
        match self {
            SpectralProfile::Flat(f) => f.level,
            SpectralProfile::Hole(h) => h.eval(delta),
            SpectralProfile::LorentzianComb(c) => c.eval(delta),
            SpectralProfile::CosineGrating(c) => 0.5 * (1.0 + (delta * c.period).cos()),
            SpectralProfile::Sampled(s) => {
                let (min, max) = s.range();
                if delta < min || delta > max {
                    s.background
                } else {
                    s.interpolate(delta)
                }
            }
        }
    }

    /// Average density far from any tailored feature.
    pub fn background(&self) -> f64 {
        match self {
            SpectralProfile::Flat(f) => f.level,
            SpectralProfile::Hole(_) => 1.0,
            SpectralProfile::LorentzianComb(c) => c.coefficient(0),
            SpectralProfile::CosineGrating(_) => 0.5,
            SpectralProfile::Sampled(s) => s.background,
        }
    }

    /// Fourier-series coefficients gₙ for |n| ≤ `cutoff`.
    pub fn fourier_coeffs(&self, cutoff: usize) -> Result<FourierCoeffs> {
        if cutoff == 0 {
            return Err(Error::Domain {
                name: "Fourier cutoff",
                requirement: ">= 1",
                value: 0.0,
            });
        }
        match self {
            SpectralProfile::Flat(_) | SpectralProfile::Hole(_) => Err(Error::UnsupportedProfile(
                format!("{} profile is not periodic", self.kind().name()),
            )),
            SpectralProfile::LorentzianComb(c) => {
                let positive: Vec<Complex64> = (0..=cutoff as i64)
                    .map(|n| Complex64::new(c.coefficient(n), 0.0))
                    .collect();
                let q = (-c.gamma * c.period).exp();
                let tail = 2.0 * c.coefficient(cutoff as i64 + 1) / (1.0 - q);
                Ok(FourierCoeffs::from_non_negative(
                    c.period,
                    &positive,
                    Some(tail),
                ))
            }
            SpectralProfile::CosineGrating(c) => {
                let positive: Vec<Complex64> = (0..=cutoff)
                    .map(|n| match n {
                        0 => Complex64::new(0.5, 0.0),
                        1 => Complex64::new(0.25, 0.0),
                        _ => Complex64::new(0.0, 0.0),
                    })
                    .collect();
                Ok(FourierCoeffs::from_non_negative(
                    c.period,
                    &positive,
                    Some(0.0),
                ))
            }
            SpectralProfile::Sampled(s) => s.fourier(cutoff),
        }
    }
}

/// Comb finesse F = π/(ΓT): tooth spacing over tooth width.
pub fn finesse(gamma: f64, period: f64) -> Result<f64> {
    let gamma = positive("comb tooth width gamma", gamma)?;
    let period = positive("comb period T", period)?;
    Ok(PI / (gamma * period))
}

/// Coefficients gₙ, n ∈ [−N, N], of g(Δ) = Σₙ gₙ e^{−inΔT}.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierCoeffs {
    period: f64,
    coeffs: Vec<Complex64>,
    tail_bound: Option<f64>,
}

impl FourierCoeffs {
    /// Builds a set from explicit coefficients listed for n = −N..=N.
    pub fn new(period: f64, coeffs: Vec<Complex64>) -> Result<Self> {
        let period = positive("Fourier period T", period)?;
        if coeffs.len().is_multiple_of(2) {
            return Err(Error::Domain {
                name: "coefficient count",
                requirement: "odd (orders -N..=N)",
                value: coeffs.len() as f64,
            });
        }
        Ok(Self {
            period,
            coeffs,
            tail_bound: None,
        })
    }

    /// Real-profile constructor: g₋ₙ = conj(gₙ).
    fn from_non_negative(period: f64, positive: &[Complex64], tail_bound: Option<f64>) -> Self {
        let n = positive.len() - 1;
        let mut coeffs = Vec::with_capacity(2 * n + 1);
        coeffs.extend(positive[1..].iter().rev().map(|c| c.conj()));
        coeffs.push(Complex64::new(positive[0].re, 0.0));
        coeffs.extend_from_slice(&positive[1..]);
        Self {
            period,
            coeffs,
            tail_bound,
        }
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    /// Highest order N kept.
    pub fn cutoff(&self) -> usize {
        self.coeffs.len() / 2
    }

    pub fn get(&self, n: i64) -> Option<Complex64> {
        let idx = n + self.cutoff() as i64;
        if idx < 0 {
            return None;
        }
        self.coeffs.get(idx as usize).copied()
    }

    /// Upper bound on Σ_{|n|>N} |gₙ| when known analytically.
    pub fn tail_bound(&self) -> Option<f64> {
        self.tail_bound
    }

    /// (n, gₙ) pairs in increasing n.
    pub fn iter(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        let n = self.cutoff() as i64;
        self.coeffs
            .iter()
            .enumerate()
            .map(move |(i, &c)| (i as i64 - n, c))
    }

    /// Copy with every coefficient of order below `min_order` set to zero.
    pub fn zeroed_below(&self, min_order: i64) -> Self {
        let mut out = self.clone();
        let n = self.cutoff() as i64;
        for (i, c) in out.coeffs.iter_mut().enumerate() {
            if (i as i64 - n) < min_order {
                *c = Complex64::new(0.0, 0.0);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn hole_center_and_half_width() {
        let p = SpectralProfile::hole(2.0 * PI * 1e6).unwrap();
        assert_eq!(p.eval(0.0).unwrap(), 0.0);
        assert_relative_eq!(p.eval(PI * 1e6).unwrap(), 0.5, epsilon = 1e-15);
        assert_relative_eq!(p.eval(-PI * 1e6).unwrap(), 0.5, epsilon = 1e-15);
        assert!(p.eval(1e12).unwrap() > 1.0 - 1e-9);
    }

    #[test]
    fn grating_minimum() {
        let t = 1.5e-6;
        let p = SpectralProfile::cosine_grating(t).unwrap();
        assert!(p.eval(PI / t).unwrap().abs() < 1e-15);
        assert_relative_eq!(p.eval(0.0).unwrap(), 1.0);
    }

    #[test]
    fn comb_matches_brute_force_tooth_sum() {
        let t = 1.5e-6;
        let comb = SpectralProfile::comb_with_finesse(10.0, t).unwrap();
        let SpectralProfile::LorentzianComb(c) = &comb else {
            unreachable!()
        };
        let gamma = c.gamma();
        let spacing = 2.0 * PI / t;
        for &delta in &[
            0.0,
            0.3 * spacing,
            0.5 * spacing,
            3.0 * spacing + 0.1 * gamma,
        ] {
            // direct sum of neighbouring Lorentzian tails
            let mut sum = 0.0;
            for l in -200_000i64..=200_000 {
                let x = (delta - l as f64 * spacing) / gamma;
                sum += 1.0 / (1.0 + x * x);
            }
            assert_relative_eq!(comb.eval(delta).unwrap(), sum, max_relative = 1e-5);
        }
        // tooth centres sit at or above unity once tails are added
        let centre = comb.eval(2.0 * spacing).unwrap();
        assert!((1.0 - 1e-12..1.01).contains(&centre), "{centre}");
    }

    #[test]
    fn overlapping_comb_rejected() {
        assert!(SpectralProfile::lorentzian_comb(1.1 * PI, 1.0).is_err());
        assert!(SpectralProfile::lorentzian_comb(PI, 1.0).is_ok());
        assert!(SpectralProfile::comb_with_finesse(0.9, 1.0).is_err());
    }

    #[test]
    fn grating_coefficients() {
        let c = SpectralProfile::cosine_grating(1.0)
            .unwrap()
            .fourier_coeffs(2)
            .unwrap();
        assert_eq!(c.get(0).unwrap().re, 0.5);
        assert_eq!(c.get(1).unwrap().re, 0.25);
        assert_eq!(c.get(-1).unwrap().re, 0.25);
        assert_eq!(c.get(2).unwrap().norm(), 0.0);
        assert_eq!(c.get(-2).unwrap().norm(), 0.0);
        assert!(c.get(3).is_none());
    }

    #[test]
    fn comb_coefficients_closed_form() {
        let t = 2.0;
        let comb = SpectralProfile::lorentzian_comb(0.25, t).unwrap();
        let c = comb.fourier_coeffs(1).unwrap();
        assert_relative_eq!(c.get(0).unwrap().re, 0.25, epsilon = 1e-15);
        assert_relative_eq!(
            c.get(-1).unwrap().re,
            0.25 * (-0.5f64).exp(),
            epsilon = 1e-15
        );
        assert_relative_eq!(
            c.get(-1).unwrap().re,
            0.151_632_664_928_158_2,
            epsilon = 1e-12
        );
    }

    #[test]
    fn sampled_comb_fourier_matches_closed_form() {
        let t = 1.5e-6;
        let comb = SpectralProfile::lorentzian_comb(0.5 / t, t).unwrap();
        let spacing = 2.0 * PI / t;
        let periods = 6;
        let n = 128 * periods + 1;
        let step = periods as f64 * spacing / (n - 1) as f64;
        let delta: Vec<f64> = (0..n)
            .map(|j| -(periods as f64) * spacing / 2.0 + j as f64 * step)
            .collect();
        let g: Vec<f64> = delta.iter().map(|&d| comb.eval(d).unwrap()).collect();
        let sampled = Sampled::new(delta, g).unwrap().with_period(t).unwrap();
        let numeric = SpectralProfile::Sampled(sampled).fourier_coeffs(5).unwrap();
        let exact = comb.fourier_coeffs(5).unwrap();
        for n in -5..=5 {
            let a = numeric.get(n).unwrap();
            let b = exact.get(n).unwrap();
            assert!((a - b).norm() <= 1e-6 * b.norm(), "order {n}: {a} vs {b}");
        }
    }

    #[test]
    fn sampled_requires_whole_periods_and_resolution() {
        let t = 1.0;
        let spacing = 2.0 * PI;
        let coarse: Vec<f64> = (0..33).map(|j| j as f64 * spacing / 32.0).collect();
        let g = vec![0.5; 33];
        let s = Sampled::new(coarse, g).unwrap().with_period(t).unwrap();
        assert!(matches!(
            SpectralProfile::Sampled(s).fourier_coeffs(2),
            Err(Error::InvalidSampled(_))
        ));
        let partial: Vec<f64> = (0..101).map(|j| j as f64 * 1.5 * spacing / 100.0).collect();
        let s = Sampled::new(partial, vec![0.5; 101])
            .unwrap()
            .with_period(t)
            .unwrap();
        assert!(SpectralProfile::Sampled(s).fourier_coeffs(2).is_err());
    }

    #[test]
    fn sampled_out_of_range_and_interpolation() {
        let p = SpectralProfile::sampled(vec![0.0, 1.0, 2.0], vec![0.0, 1.0, 0.5]).unwrap();
        assert_relative_eq!(p.eval(0.5).unwrap(), 0.5);
        assert_relative_eq!(p.eval(1.5).unwrap(), 0.75);
        assert_relative_eq!(p.eval(2.0).unwrap(), 0.5);
        assert!(matches!(p.eval(2.5), Err(Error::OutOfRange { .. })));
        assert!(matches!(p.eval(-0.1), Err(Error::OutOfRange { .. })));
    }

    #[test]
    fn sampled_rejects_bad_grids() {
        assert!(SpectralProfile::sampled(vec![0.0, 1.0, 3.0], vec![1.0; 3]).is_err());
        assert!(SpectralProfile::sampled(vec![1.0, 0.0], vec![1.0; 2]).is_err());
        assert!(SpectralProfile::sampled(vec![0.0, 1.0], vec![1.0, -0.5]).is_err());
        assert!(SpectralProfile::sampled(vec![0.0, 1.0], vec![1.0]).is_err());
    }

    #[test]
    fn non_periodic_profiles_have_no_series() {
        assert!(matches!(
            SpectralProfile::flat().fourier_coeffs(4),
            Err(Error::UnsupportedProfile(_))
        ));
        assert!(matches!(
            SpectralProfile::hole(1.0).unwrap().fourier_coeffs(4),
            Err(Error::UnsupportedProfile(_))
        ));
    }

    #[test]
    fn finesse_definition() {
        assert_relative_eq!(finesse(PI, 1.0).unwrap(), 1.0);
        assert_relative_eq!(finesse(PI / 10.0, 1.0).unwrap(), 10.0);
        // optimal finesse at alphaL = 4 is 2*pi, i.e. Gamma*T = 1/2
        let f_opt = PI * (1.0 + 4.0 / 4.0);
        assert_relative_eq!(PI / f_opt, 0.5);
        assert!(finesse(0.0, 1.0).is_err());
        assert!(finesse(1.0, -1.0).is_err());
    }

    #[test]
    fn comb_tail_bound_covers_truncation() {
        let comb = SpectralProfile::lorentzian_comb(0.3, 1.0).unwrap();
        let c = comb.fourier_coeffs(8).unwrap();
        let exact_tail: f64 = (9..2000)
            .map(|n| 2.0 * 0.15 * (-0.3 * n as f64).exp())
            .sum();
        assert_relative_eq!(c.tail_bound().unwrap(), exact_tail, max_relative = 1e-9);
    }
}
