//! Seeded synthetic sideband spectra and the two-column spectrum CSV format.

use std::fs;
use std::io::Write;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::Lorentzian;
use crate::error::{ensure_non_negative, Error, Result};
use crate::model::{hz, to_hz};

pub const SPECTRUM_HEADER: &str = "frequency_hz,psd_shotnoise_units";

/// Samples `truth` at `omegas` (rad/s) and adds white Gaussian noise of
/// standard deviation `sigma` in shot-noise units.
pub fn synth_sideband_spectrum(
    truth: &Lorentzian,
    omegas: &[f64],
    sigma: f64,
    seed: u64,
) -> Result<Vec<(f64, f64)>> {
    let sigma = ensure_non_negative("sigma", sigma)?;
    if omegas.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Shape("synthesis grid must be strictly increasing".into()));
    }
    if sigma == 0.0 {
        return Ok(omegas.iter().map(|&w| (w, truth.value(w))).collect());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = Normal::new(0.0, sigma).map_err(|_| Error::InvalidParameter {
        name: "sigma",
        value: sigma,
        reason: "invalid noise level",
    })?;
    Ok(omegas
        .iter()
        .map(|&w| (w, truth.value(w) + noise.sample(&mut rng)))
        .collect())
}

/// `count` evenly spaced angular frequencies covering `center +/- half_span`.
pub fn linear_omegas(center: f64, half_span: f64, count: usize) -> Vec<f64> {
    let denom = (count.max(2) - 1) as f64;
    (0..count)
        .map(|i| center - half_span + 2.0 * half_span * i as f64 / denom)
        .collect()
}

/// Writes samples given in rad/s with frequencies converted to Hz.
pub fn write_spectrum_csv(path: &Path, samples: &[(f64, f64)]) -> Result<()> {
    let mut out = String::with_capacity(40 * (samples.len() + 1));
    out.push_str(SPECTRUM_HEADER);
    out.push('\n');
    for &(w, s) in samples {
        out.push_str(&format!("{:.16e},{:.16e}\n", to_hz(w), s));
    }
    let mut file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    file.write_all(out.as_bytes()).map_err(|e| Error::io(path, e))
}

/// Reads a two-column spectrum; frequencies are returned in rad/s.
pub fn read_spectrum_csv(path: &Path) -> Result<Vec<(f64, f64)>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_spectrum_csv(&text).map_err(|reason| Error::Parse {
        path: path.to_path_buf(),
        reason,
    })
}

fn parse_spectrum_csv(text: &str) -> std::result::Result<Vec<(f64, f64)>, String> {
    let mut lines = text.lines();
    match lines.next().map(str::trim) {
        Some(SPECTRUM_HEADER) => {}
        Some(other) => return Err(format!("expected header `{SPECTRUM_HEADER}`, found `{other}`")),
        None => return Err("empty file".into()),
    }
    let mut out = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let mut cols = line.split(',');
        let (Some(f), Some(s), None) = (cols.next(), cols.next(), cols.next()) else {
            return Err(format!("line {}: expected two columns", i + 2));
        };
        let parse = |v: &str| {
            v.trim()
                .parse::<f64>()
                .map_err(|e| format!("line {}: {e}", i + 2))
        };
        out.push((hz(parse(f)?), parse(s)?));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn truth() -> Lorentzian {
        Lorentzian {
            center: hz(1.596e6),
            gamma: hz(325.0),
            amplitude: 0.78,
            offset: 1.0,
        }
    }

    #[test]
    fn noiseless_is_exact_model() {
        let l = truth();
        let grid = linear_omegas(l.center, 5.0 * l.gamma, 101);
        let s = synth_sideband_spectrum(&l, &grid, 0.0, 7).unwrap();
        for (w, v) in s {
            assert_eq!(v, l.value(w));
        }
    }

    #[test]
    fn seeded_is_deterministic() {
        let l = truth();
        let grid = linear_omegas(l.center, 5.0 * l.gamma, 101);
        let a = synth_sideband_spectrum(&l, &grid, 0.01, 42).unwrap();
        let b = synth_sideband_spectrum(&l, &grid, 0.01, 42).unwrap();
        let c = synth_sideband_spectrum(&l, &grid, 0.01, 43).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn csv_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("red.csv");
        let l = truth();
        let s = synth_sideband_spectrum(&l, &linear_omegas(l.center, 1e4, 20), 0.01, 1).unwrap();
        write_spectrum_csv(&path, &s).unwrap();
        let back = read_spectrum_csv(&path).unwrap();
        assert_eq!(back.len(), s.len());
        for ((w0, v0), (w1, v1)) in s.iter().zip(&back) {
            assert!((w0 - w1).abs() <= 1e-15 * w0);
            assert_eq!(v0, v1);
        }
    }

    #[test]
    fn bad_header_rejected() {
        assert!(parse_spectrum_csv("f,psd\n1,2\n").is_err());
        assert!(parse_spectrum_csv("").is_err());
        assert!(parse_spectrum_csv(&format!("{SPECTRUM_HEADER}\n1,2,3\n")).is_err());
    }
}
