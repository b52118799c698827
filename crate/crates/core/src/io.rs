//! Plain-text exchange formats: CSV traces, transfer functions, spectra, and
//! sampled profiles.
//!
//! Floats are written with nine significant digits in the style of C's
//! `%.9g`, so files are stable across platforms and locales.

use std::f64::consts::PI;
use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::pulse::PulseEnvelope;
use crate::response::TransferFunction;
use crate::spectra::{Sampled, SpectralProfile};

const MHZ: f64 = 2.0 * PI * 1e6;
const US: f64 = 1e-6;

/// `%.9g` formatting.
pub fn fmt_g9(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() {
            "-0".into()
        } else {
            "0".into()
        };
    }
    let sci = format!("{x:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..9).contains(&exp) {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (8 - exp) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn writer<W: Write>(out: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().from_writer(out)
}

/// `t_us,re,im,intensity`.
pub fn write_trace<W: Write>(out: W, pulse: &PulseEnvelope) -> Result<()> {
    let mut w = writer(out);
    w.write_record(["t_us", "re", "im", "intensity"])?;
    for (t, v) in pulse.grid().times().zip(pulse.values()) {
        w.write_record([
            fmt_g9(t / US),
            fmt_g9(v.re),
            fmt_g9(v.im),
            fmt_g9(v.norm_sqr()),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// `omega_mhz,re_H,im_H,abs2_H`, with ω given as an ordinary frequency.
pub fn write_transfer<W: Write>(out: W, tf: &TransferFunction) -> Result<()> {
    let mut w = writer(out);
    w.write_record(["omega_mhz", "re_H", "im_H", "abs2_H"])?;
    for (omega, h) in tf.omega().iter().zip(tf.values()) {
        w.write_record([
            fmt_g9(omega / MHZ),
            fmt_g9(h.re),
            fmt_g9(h.im),
            fmt_g9(h.norm_sqr()),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// `delta_mhz,g,optical_depth` on the given detunings (rad/s).
pub fn write_spectrum<W: Write>(
    out: W,
    profile: &SpectralProfile,
    alpha_l: f64,
    detunings: &[f64],
) -> Result<()> {
    let mut w = writer(out);
    w.write_record(["delta_mhz", "g", "optical_depth"])?;
    for &d in detunings {
        let g = profile.density(d);
        w.write_record([fmt_g9(d / MHZ), fmt_g9(g), fmt_g9(g * alpha_l)])?;
    }
    w.flush()?;
    Ok(())
}

/// Writes a header and rows of already formatted cells.
pub fn write_table<W: Write>(out: W, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut w = writer(out);
    w.write_record(header)?;
    for row in rows {
        if row.len() != header.len() {
            return Err(Error::Grid(format!(
                "row has {} cells for {} columns",
                row.len(),
                header.len()
            )));
        }
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a `delta_mhz,g` table as written, detunings still in MHz.
pub fn read_sampled_csv<R: Read>(input: R) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut r = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(input);
    let headers = r.headers()?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::InvalidSampled(format!("missing column `{name}`")))
    };
    let (i_delta, i_g) = (col("delta_mhz")?, col("g")?);
    let mut delta = Vec::new();
    let mut g = Vec::new();
    for (line, record) in r.records().enumerate() {
        let record = record?;
        let parse = |i: usize, name: &str| -> Result<f64> {
            record
                .get(i)
                .and_then(|s| s.parse::<f64>().ok())
                .ok_or_else(|| {
                    Error::InvalidSampled(format!("row {}: bad `{name}` value", line + 1))
                })
        };
        delta.push(parse(i_delta, "delta_mhz")?);
        g.push(parse(i_g, "g")?);
    }
    Ok((delta, g))
}

/// Reads a `delta_mhz,g` table straight into a profile.
pub fn load_sampled<R: Read>(input: R) -> Result<Sampled> {
    let (delta_mhz, g) = read_sampled_csv(input)?;
    sampled_from_mhz(&delta_mhz, g)
}

/// Sampled profile from detunings given in MHz.
pub fn sampled_from_mhz(delta_mhz: &[f64], g: Vec<f64>) -> Result<Sampled> {
    Sampled::new(delta_mhz.iter().map(|d| d * MHZ).collect(), g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pulse::TimeGrid;

    #[test]
    fn g9_matches_c_printf() {
        let cases = [
            (0.0, "0"),
            (1.0, "1"),
            (0.1353352832366127, "0.135335283"),
            (std::f64::consts::TAU, "6.28318531"),
            (123456789.0, "123456789"),
            (1234567890.0, "1.23456789e+09"),
            (1e-5, "1e-05"),
            (0.0001234, "0.0001234"),
            (-2.5, "-2.5"),
            (f64::NAN, "nan"),
            (1e300, "1e+300"),
            (999999999.5, "1e+09"),
        ];
        for (x, s) in cases {
            assert_eq!(fmt_g9(x), s, "{x}");
        }
    }

    #[test]
    fn trace_csv_shape() {
        let grid = TimeGrid::new(0.0, 1e-6, 4).unwrap();
        let p = PulseEnvelope::gaussian(grid, 1e-6, 1e-6).unwrap();
        let mut buf = Vec::new();
        write_trace(&mut buf, &p).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "t_us,re,im,intensity");
        assert_eq!(lines[2], "1,1,0,1");
        assert_eq!(lines.len(), 5);
    }

    #[test]
    fn sampled_round_trip() {
        let text = "delta_mhz, g\n-1, 1\n0, 0.25\n1, 1\n";
        let s = load_sampled(text.as_bytes()).unwrap();
        assert!((s.detunings()[2] - MHZ).abs() < 1e-6);
        assert_eq!(s.values()[1], 0.25);
        assert!(read_sampled_csv("delta_mhz,x\n1,2\n".as_bytes()).is_err());
        assert!(read_sampled_csv("delta_mhz,g\n1,abc\n".as_bytes()).is_err());
    }
}
