//! Propagation kernel K(ω) = (iα/2π) ∫ g(Δ) / (ω + Δ − iγ) dΔ.
//!
//! The integral is the symmetric (principal-value) limit. A flat background
//! contributes exactly iπ per unit density; every closed form below keeps
//! that term analytic rather than truncating it.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::MediumParams;
use crate::error::{Error, Result};
use crate::spectra::{Sampled, SpectralProfile};

/// K(ω) in 1/m; Ω̃(z, ω) = Ω̃(0, ω)·e^{K(ω)z}.
pub fn susceptibility_kernel(
    profile: &SpectralProfile,
    medium: &MediumParams,
    omega: f64,
) -> Result<Complex64> {
    let integral = resonance_integral(profile, medium.gamma(), omega)?;
    let k = Complex64::i() * (medium.alpha() / (2.0 * PI)) * integral;
    if !(k.re.is_finite() && k.im.is_finite()) {
        return Err(Error::Quadrature {
            achieved: f64::INFINITY,
        });
    }
    Ok(k)
}

/// ∫ g(Δ) / (ω + Δ − iγ) dΔ.
pub(crate) fn resonance_integral(
    profile: &SpectralProfile,
    gamma: f64,
    omega: f64,
) -> Result<Complex64> {
    let i = Complex64::i();
    let value = match profile {
        SpectralProfile::Flat(f) => i * PI * f.level(),
        SpectralProfile::Hole(h) => {
            // flat background minus a Lorentzian of HWHM Δ₀/2, closed in the
            // lower half plane
            let half = 0.5 * h.delta0();
            i * PI - PI * half / Complex64::new(omega, -(half + gamma))
        }
        SpectralProfile::LorentzianComb(c) => {
            // Σₗ πΓ / (ω + 2πl/T − i(Γ+γ)) = iπ(ΓT/2)(1 + x)/(1 − x),
            // x = e^{−(Γ+γ)T − iωT}
            let t = c.period();
            let x = Complex64::from_polar((-(c.gamma() + gamma) * t).exp(), -omega * t);
            i * PI * 0.5 * c.gamma() * t * (1.0 + x) / (1.0 - x)
        }
        SpectralProfile::CosineGrating(c) => {
            let t = c.period();
            let x = Complex64::from_polar((-gamma * t).exp(), -omega * t);
            i * PI * 0.5 * (1.0 + x)
        }
        SpectralProfile::Sampled(s) => sampled_integral(s, gamma, omega),
    };
    Ok(value)
}

/// Exact integral of the piecewise-linear interpolant over the grid, plus the
/// background density carried analytically to ±∞.
fn sampled_integral(s: &Sampled, gamma: f64, omega: f64) -> Complex64 {
    let z = Complex64::new(omega, -gamma);
    let delta = s.detunings();
    let g = s.values();
    let h = s.step();
    let mut sum = Complex64::new(0.0, 0.0);
    for j in 0..delta.len() - 1 {
        let a = delta[j] + z;
        let (dlog, rest) = segment_terms(a, h);
        let slope = (g[j + 1] - g[j]) / h;
        sum += g[j] * dlog + slope * rest;
    }
    let first = delta[0] + z;
    let last = delta[delta.len() - 1] + z;
    // every a lies in the lower half plane, so the principal logs never
    // cross their branch cut
    let inner = last.ln() - first.ln();
    sum + s.background() * (Complex64::new(0.0, PI) - inner)
}

/// For a segment [x, x+h] with a = x + z, returns
/// (ln(1 + h/a), h − a·ln(1 + h/a)).
fn segment_terms(a: Complex64, h: f64) -> (Complex64, Complex64) {
    let u = h / a;
    if u.norm() < 0.1 {
        // series keeps the near-cancellation in the second term accurate
        let mut dlog = Complex64::new(0.0, 0.0);
        let mut rest = Complex64::new(0.0, 0.0);
        let mut power = u;
        for k in 1..=14 {
            let kf = k as f64;
            let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
            dlog += sign * power / kf;
            // h − a·ln(1+u) = h·Σ_{k≥1} (−1)^{k+1} u^k / (k+1)
            rest += sign * power / (kf + 1.0);
            power *= u;
        }
        (dlog, h * rest)
    } else {
        let dlog = (a + h).ln() - a.ln();
        (dlog, h - a * dlog)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    /// Brute-force trapezoid over [−R, R] with the flat tails beyond R added
    /// analytically (background b contributes b·[iπ − ln((R+z)/(−R+z))]).
    fn brute_force(
        profile: &SpectralProfile,
        gamma: f64,
        omega: f64,
        r: f64,
        n: usize,
    ) -> Complex64 {
        let z = Complex64::new(omega, -gamma);
        let h = 2.0 * r / n as f64;
        let mut sum = Complex64::new(0.0, 0.0);
        for j in 0..=n {
            let d = -r + j as f64 * h;
            let w = if j == 0 || j == n { 0.5 } else { 1.0 };
            sum += w * profile.density(d) / (d + z);
        }
        sum *= h;
        let b = profile.background();
        let inner = (r + z).ln() - (-r + z).ln();
        sum + b * (Complex64::new(0.0, PI) - inner)
    }

    #[test]
    fn flat_gives_beer_lambert_decay() {
        let m = MediumParams::new(300.0, 0.01, 1e3).unwrap();
        for &w in &[0.0, 1e6, -3e7] {
            let k = susceptibility_kernel(&SpectralProfile::flat(), &m, w).unwrap();
            assert_relative_eq!(k.re, -150.0, max_relative = 1e-14);
            assert!(k.im.abs() < 1e-12);
        }
        let k = susceptibility_kernel(&SpectralProfile::bleached(), &m, 2e6).unwrap();
        assert_eq!(k.norm(), 0.0);
    }

    #[test]
    fn hole_closed_form_matches_quadrature() {
        let hole = SpectralProfile::hole(2.0).unwrap();
        for &w in &[0.0, 0.3, -1.7, 5.0] {
            let exact = resonance_integral(&hole, 0.05, w).unwrap();
            let numeric = brute_force(&hole, 0.05, w, 4000.0, 4_000_000);
            assert!((exact - numeric).norm() < 2e-4, "{w}: {exact} vs {numeric}");
        }
    }

    #[test]
    fn comb_and_grating_closed_forms_match_quadrature() {
        let comb = SpectralProfile::lorentzian_comb(0.4, 1.0).unwrap();
        let grating = SpectralProfile::cosine_grating(1.0).unwrap();
        for profile in [&comb, &grating] {
            for &w in &[0.0, 0.9, -2.2] {
                let exact = resonance_integral(profile, 0.2, w).unwrap();
                let numeric = brute_force(profile, 0.2, w, 2000.0 * PI, 4_000_000);
                assert!((exact - numeric).norm() < 2e-3, "{w}: {exact} vs {numeric}");
            }
        }
    }

    #[test]
    fn sampled_integral_matches_closed_form() {
        let hole = SpectralProfile::hole(2.0).unwrap();
        let n = 40_001;
        let r = 400.0;
        let delta: Vec<f64> = (0..n)
            .map(|j| -r + 2.0 * r * j as f64 / (n - 1) as f64)
            .collect();
        let g: Vec<f64> = delta.iter().map(|&d| hole.density(d)).collect();
        let sampled = SpectralProfile::sampled(delta, g).unwrap();
        for &w in &[0.0, 0.5, -3.0] {
            let a = resonance_integral(&sampled, 0.01, w).unwrap();
            let b = resonance_integral(&hole, 0.01, w).unwrap();
            // background taken from the grid edges is slightly below 1
            assert!((a - b).norm() < 5e-3, "{w}: {a} vs {b}");
        }
    }

    #[test]
    fn hole_group_delay_per_length() {
        // −Im dK/dω at ω = 0 → α/Δ₀ for γ ≪ Δ₀
        let delta0 = 2.0 * PI * 1e6;
        let m = MediumParams::new(500.0, 0.01, 1.0).unwrap();
        let hole = SpectralProfile::hole(delta0).unwrap();
        let dw = 1.0;
        let kp = susceptibility_kernel(&hole, &m, dw).unwrap();
        let km = susceptibility_kernel(&hole, &m, -dw).unwrap();
        let slope = (kp - km) / (2.0 * dw);
        assert_relative_eq!(-slope.im, 500.0 / delta0, max_relative = 1e-5);
        // a delay, not an advance
        assert!(slope.im < 0.0);
    }

    #[test]
    fn segment_series_and_direct_forms_agree() {
        let a = Complex64::new(11.0, -0.3);
        let h = 1.05;
        let (d1, r1) = segment_terms(a, h);
        let d2 = (a + h).ln() - a.ln();
        let r2 = h - a * d2;
        assert!((d1 - d2).norm() < 1e-13);
        assert!((r1 - r2).norm() < 1e-11);
    }
}
