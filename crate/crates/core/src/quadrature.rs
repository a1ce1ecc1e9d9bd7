//! Composite Simpson quadrature with fixed breakpoints.

/// Simpson weights on `n` uniform intervals (`n` even), unscaled by `h/3`.
fn weight(i: usize, n: usize) -> f64 {
    if i == 0 || i == n {
        1.0
    } else if i % 2 == 1 {
        4.0
    } else {
        2.0
    }
}

/// Simpson rule over sampled values on a uniform grid of spacing `h`.
///
/// Panics if the number of intervals is odd.
pub fn simpson_samples(values: &[f64], h: f64) -> f64 {
    let n = values.len() - 1;
    assert!(n.is_multiple_of(2) && n > 0, "Simpson needs an even number of intervals, got {n}");
    let s: f64 = values.iter().enumerate().map(|(i, v)| weight(i, n) * v).sum();
    s * h / 3.0
}

/// Composite Simpson on `[lo, hi]` with `panels` intervals (rounded up to even).
pub fn simpson(f: impl Fn(f64) -> f64, lo: f64, hi: f64, panels: usize) -> f64 {
    let n = panels.max(2) + panels % 2;
    let h = (hi - lo) / n as f64;
    let s: f64 = (0..=n)
        .map(|i| {
            let x = if i == n { hi } else { lo + h * i as f64 };
            weight(i, n) * f(x)
        })
        .sum();
    s * h / 3.0
}

/// Simpson over each sub-interval between sorted, deduplicated breakpoints.
/// Returns one integral per sub-interval.
pub fn simpson_regions(f: impl Fn(f64) -> f64, breaks: &[f64], panels: usize) -> Vec<f64> {
    let pts = sorted_breaks(breaks);
    pts.windows(2).map(|w| simpson(&f, w[0], w[1], panels)).collect()
}

/// Integral over `[lo, hi]` that keeps every interior breakpoint as a panel edge.
pub fn simpson_piecewise(f: impl Fn(f64) -> f64, lo: f64, hi: f64, interior: &[f64], panels: usize) -> f64 {
    let mut breaks = vec![lo, hi];
    breaks.extend(interior.iter().copied().filter(|&x| x > lo && x < hi));
    simpson_regions(f, &breaks, panels).iter().sum()
}

pub fn sorted_breaks(breaks: &[f64]) -> Vec<f64> {
    let mut pts: Vec<f64> = breaks.to_vec();
    pts.sort_by(|a, b| a.partial_cmp(b).expect("finite breakpoints"));
    pts.dedup_by(|a, b| (*a - *b).abs() <= 1e-15 * (1.0 + b.abs()));
    pts
}

/// `|a - b| / |b|`, or the absolute difference when `b` is zero.
pub fn relative_change(a: f64, b: f64) -> f64 {
    let d = (a - b).abs();
    if b == 0.0 {
        d
    } else {
        d / b.abs()
    }
}
