//! Independent numerical oracles shared by the integration tests.

#![allow(dead_code)]

/// Golden-section search for the minimum of a unimodal `f` on `[a, b]`.
/// Returns `(x_min, f(x_min))`.
pub fn golden_section<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > tol * (1.0 + c.abs() + d.abs()) {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

/// Golden-section search in `ln x` for positive arguments spanning decades.
pub fn golden_section_log<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, tol: f64) -> (f64, f64) {
    let (u, v) = golden_section(|u| f(u.exp()), lo.ln(), hi.ln(), tol);
    (u.exp(), v)
}

/// Exhaustive search over `n` evenly spaced points of `[a, b]`.
pub fn grid_min<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> (f64, f64) {
    (0..n)
        .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
        .map(|x| (x, f(x)))
        .fold((f64::NAN, f64::INFINITY), |best, cur| if cur.1 < best.1 { cur } else { best })
}

/// Two-dimensional minimization: golden section in `y` nested inside golden
/// section in `ln x`.
pub fn min_2d<F: Fn(f64, f64) -> f64>(
    f: F,
    x_range: (f64, f64),
    y_range: (f64, f64),
    tol: f64,
) -> (f64, f64, f64) {
    let inner = |x: f64| golden_section(|y| f(x, y), y_range.0, y_range.1, tol);
    let (x, v) = golden_section_log(|x| inner(x).1, x_range.0, x_range.1, tol);
    (x, inner(x).0, v)
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

/// Empirical quantile by nearest rank.
pub fn percentile(values: &[f64], q: f64) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let rank = ((q * v.len() as f64).ceil() as usize).clamp(1, v.len());
    v[rank - 1]
}
