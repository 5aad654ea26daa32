//! Offset-Lorentzian least squares with a deterministic starting point.

use nalgebra::{Matrix4, Vector4};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MIN_SAMPLES: usize = 8;
/// Required sample span in units of the initial linewidth estimate.
pub const MIN_SPAN_LINEWIDTHS: f64 = 3.0;
pub const MAX_ITERATIONS: usize = 200;
pub const GRADIENT_TOLERANCE: f64 = 1e-10;

/// `offset + amplitude (Gamma/2)^2 / ((Gamma/2)^2 + (omega - center)^2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Lorentzian {
    /// rad/s
    pub center: f64,
    /// Full width at half maximum (rad/s).
    pub gamma: f64,
    pub amplitude: f64,
    pub offset: f64,
}

impl Lorentzian {
    pub fn value(&self, omega: f64) -> f64 {
        let h = 0.5 * self.gamma;
        let d = omega - self.center;
        self.offset + self.amplitude * h * h / (h * h + d * d)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LorentzianFit {
    pub params: Lorentzian,
    pub residual_rms: f64,
    pub iterations: usize,
}

fn require_count(samples: &[(f64, f64)]) -> Result<()> {
    if samples.len() < MIN_SAMPLES {
        return Err(Error::Shape(format!(
            "Lorentzian fit needs at least {MIN_SAMPLES} samples, got {}",
            samples.len()
        )));
    }
    Ok(())
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

// Linear interpolation of the half-maximum crossing walking away from `peak`.
fn half_crossing(samples: &[(f64, f64)], peak: usize, level: f64, step: isize) -> Option<f64> {
    let mut i = peak as isize;
    loop {
        let j = i + step;
        if j < 0 || j as usize >= samples.len() {
            return None;
        }
        let (x0, y0) = samples[i as usize];
        let (x1, y1) = samples[j as usize];
        if y1 <= level {
            let t = (y0 - level) / (y0 - y1);
            return Some(x0 + t * (x1 - x0));
        }
        i = j;
    }
}

/// Starting point: offset from the outer quartiles, peak at the largest
/// sample, width from the half-maximum crossings.
pub fn initial_guess(samples: &[(f64, f64)]) -> Result<Lorentzian> {
    require_count(samples)?;
    let n = samples.len();
    let q = (n / 4).max(1);
    let mut outer: Vec<f64> = samples[..q]
        .iter()
        .chain(&samples[n - q..])
        .map(|s| s.1)
        .collect();
    let offset = median(&mut outer);
    // robust spread of the baseline
    let mut dev: Vec<f64> = outer.iter().map(|v| (v - offset).abs()).collect();
    let sigma = 1.4826 * median(&mut dev);

    let (peak, &(center, max)) = samples
        .iter()
        .enumerate()
        .max_by(|a, b| a.1 .1.total_cmp(&b.1 .1))
        .expect("non-empty");
    let amplitude = max - offset;
    let scale = max.abs().max(offset.abs()).max(f64::MIN_POSITIVE);
    if amplitude <= 1e-12 * scale || amplitude <= 5.0 * sigma {
        return Err(Error::NoPeak("maximum does not rise above the baseline"));
    }

    let level = offset + 0.5 * amplitude;
    let left = half_crossing(samples, peak, level, -1);
    let right = half_crossing(samples, peak, level, 1);
    let gamma = match (left, right) {
        (Some(l), Some(r)) => r - l,
        (Some(l), None) => 2.0 * (center - l),
        (None, Some(r)) => 2.0 * (r - center),
        (None, None) => return Err(Error::NoPeak("peak is wider than the sampled span")),
    };
    if gamma <= 0.0 {
        return Err(Error::NoPeak("zero-width peak"));
    }
    let span = samples[n - 1].0 - samples[0].0;
    if span < MIN_SPAN_LINEWIDTHS * gamma {
        return Err(Error::Shape(format!(
            "samples span {span:e} rad/s, need at least {MIN_SPAN_LINEWIDTHS} linewidths ({:e})",
            MIN_SPAN_LINEWIDTHS * gamma
        )));
    }
    Ok(Lorentzian {
        center,
        gamma,
        amplitude,
        offset,
    })
}

// Parameters in scaled coordinates: frequencies measured from `x0` in units
// of `w`, powers in units of `s`.
struct Scaling {
    x0: f64,
    w: f64,
    s: f64,
}

impl Scaling {
    fn to_scaled(&self, l: &Lorentzian) -> Vector4<f64> {
        Vector4::new(
            (l.center - self.x0) / self.w,
            l.gamma / self.w,
            l.amplitude / self.s,
            l.offset / self.s,
        )
    }

    fn unscale(&self, v: &Vector4<f64>) -> Lorentzian {
        Lorentzian {
            center: self.x0 + v[0] * self.w,
            gamma: v[1].abs() * self.w,
            amplitude: v[2] * self.s,
            offset: v[3] * self.s,
        }
    }
}

// Cost, gradient and Gauss-Newton matrix of 1/2 sum r^2.
fn normal_equations(t: &[f64], y: &[f64], v: &Vector4<f64>) -> (f64, Vector4<f64>, Matrix4<f64>) {
    let (c, g, a, o) = (v[0], v[1], v[2], v[3]);
    let h = 0.5 * g;
    let mut cost = 0.0;
    let mut grad = Vector4::zeros();
    let mut jtj = Matrix4::zeros();
    for (&ti, &yi) in t.iter().zip(y) {
        let d = ti - c;
        let den = h * h + d * d;
        let l = h * h / den;
        let r = o + a * l - yi;
        let j = Vector4::new(
            2.0 * a * h * h * d / (den * den),
            a * h * d * d / (den * den),
            l,
            1.0,
        );
        cost += 0.5 * r * r;
        grad += j * r;
        jtj += j * j.transpose();
    }
    (cost, grad, jtj)
}

/// Fits an offset Lorentzian to `(omega, psd)` samples sorted by frequency.
///
/// Levenberg-Marquardt from [`initial_guess`] (or `init`). Converges when the
/// gradient norm in scaled coordinates drops below [`GRADIENT_TOLERANCE`], or
/// when no step can lower the cost any further at machine precision.
pub fn fit_lorentzian(samples: &[(f64, f64)], init: Option<Lorentzian>) -> Result<LorentzianFit> {
    if samples.windows(2).any(|w| !(w[1].0 > w[0].0)) {
        return Err(Error::Shape("samples must be strictly increasing in frequency".into()));
    }
    if samples.iter().any(|s| !s.0.is_finite() || !s.1.is_finite()) {
        return Err(Error::Shape("samples must be finite".into()));
    }
    let guess = match init {
        Some(l) => {
            require_count(samples)?;
            l
        }
        None => initial_guess(samples)?,
    };
    let scaling = Scaling {
        x0: guess.center,
        w: guess.gamma.abs().max(f64::MIN_POSITIVE),
        s: guess.amplitude.abs().max(1e-300),
    };
    let t: Vec<f64> = samples.iter().map(|s| (s.0 - scaling.x0) / scaling.w).collect();
    let y: Vec<f64> = samples.iter().map(|s| s.1 / scaling.s).collect();

    let mut v = scaling.to_scaled(&guess);
    let (mut cost, mut grad, mut jtj) = normal_equations(&t, &y, &v);
    let mut lambda = 1e-3;
    let rms = |cost: f64| scaling.s * (2.0 * cost / samples.len() as f64).sqrt();

    for iteration in 0..MAX_ITERATIONS {
        if grad.norm() < GRADIENT_TOLERANCE {
            return Ok(LorentzianFit {
                params: scaling.unscale(&v),
                residual_rms: rms(cost),
                iterations: iteration,
            });
        }
        let mut improved = false;
        while lambda < 1e16 {
            let mut damped = jtj;
            for k in 0..4 {
                damped[(k, k)] += lambda * jtj[(k, k)].max(1e-12);
            }
            let Some(step) = damped.lu().solve(&(-grad)) else {
                lambda *= 10.0;
                continue;
            };
            let trial = v + step;
            let (c2, g2, j2) = normal_equations(&t, &y, &trial);
            if c2.is_finite() && c2 < cost {
                v = trial;
                cost = c2;
                grad = g2;
                jtj = j2;
                lambda = (lambda / 10.0).max(1e-12);
                improved = true;
                break;
            }
            lambda *= 10.0;
        }
        if !improved {
            // stuck at machine precision: the cost cannot decrease any further
            return Ok(LorentzianFit {
                params: scaling.unscale(&v),
                residual_rms: rms(cost),
                iterations: iteration,
            });
        }
    }
    if grad.norm() < GRADIENT_TOLERANCE {
        return Ok(LorentzianFit {
            params: scaling.unscale(&v),
            residual_rms: rms(cost),
            iterations: MAX_ITERATIONS,
        });
    }
    Err(Error::NonConvergence {
        iterations: MAX_ITERATIONS,
        gradient_norm: grad.norm(),
        residual_rms: rms(cost),
        best: scaling.unscale(&v),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::hz;

    fn truth() -> Lorentzian {
        Lorentzian {
            center: hz(1.596e6),
            gamma: hz(325.0),
            amplitude: 0.78,
            offset: 1.0,
        }
    }

    fn samples(l: &Lorentzian, n: usize, half_span: f64) -> Vec<(f64, f64)> {
        (0..n)
            .map(|i| {
                let x = l.center - half_span + 2.0 * half_span * i as f64 / (n - 1) as f64;
                (x, l.value(x))
            })
            .collect()
    }

    #[test]
    fn noiseless_recovery() {
        let l = truth();
        let fit = fit_lorentzian(&samples(&l, 400, 5.0 * l.gamma), None).unwrap();
        let p = fit.params;
        assert!(((p.gamma - l.gamma) / l.gamma).abs() < 1e-6);
        assert!(((p.amplitude - l.amplitude) / l.amplitude).abs() < 1e-6);
        assert!(((p.offset - l.offset) / l.offset).abs() < 1e-6);
        assert!(((p.center - l.center) / l.gamma).abs() < 1e-6);
        assert!(fit.residual_rms < 1e-9);
    }

    #[test]
    fn flat_input_has_no_peak() {
        let flat: Vec<(f64, f64)> = (0..50).map(|i| (i as f64, 1.0)).collect();
        assert!(matches!(fit_lorentzian(&flat, None), Err(Error::NoPeak(_))));
    }

    #[test]
    fn too_few_or_too_narrow() {
        let l = truth();
        assert!(matches!(
            fit_lorentzian(&samples(&l, 7, 5.0 * l.gamma), None),
            Err(Error::Shape(_))
        ));
        assert!(fit_lorentzian(&samples(&l, 50, 0.6 * l.gamma), None).is_err());
    }

    #[test]
    fn initial_guess_is_close() {
        let l = truth();
        let g = initial_guess(&samples(&l, 401, 5.0 * l.gamma)).unwrap();
        assert_eq!(g.center, l.center);
        assert!(((g.gamma - l.gamma) / l.gamma).abs() < 0.1);
        assert!((g.amplitude + g.offset - 1.78).abs() < 1e-12);
    }
}
