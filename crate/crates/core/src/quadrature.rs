//! One-dimensional quadrature and interpolation on sample arrays.

use alloc::vec;
use alloc::vec::Vec;

/// Running integral `I[k] = int_{x0}^{x0 + k h} f` of uniformly spaced samples.
///
/// Even `k` uses composite Simpson; odd `k >= 3` closes the last three
/// intervals with the 3/8 rule; `k = 1` uses the four-point cubic formula.
/// With at least four samples every branch is exact for cubics.
pub fn cumulative_simpson(f: &[f64], h: f64) -> Vec<f64> {
    let n = f.len();
    let mut out = vec![0.0; n];
    if n < 2 {
        return out;
    }
    if n < 4 {
        // Too few points for a cubic closure.
        for k in 1..n {
            out[k] = out[k - 1] + 0.5 * h * (f[k - 1] + f[k]);
        }
        if n == 3 {
            out[2] = h / 3.0 * (f[0] + 4.0 * f[1] + f[2]);
            out[1] = h / 12.0 * (5.0 * f[0] + 8.0 * f[1] - f[2]);
        }
        return out;
    }
    out[1] = h / 24.0 * (9.0 * f[0] + 19.0 * f[1] - 5.0 * f[2] + f[3]);
    for k in (2..n).step_by(2) {
        out[k] = out[k - 2] + h / 3.0 * (f[k - 2] + 4.0 * f[k - 1] + f[k]);
    }
    for k in (3..n).step_by(2) {
        out[k] = out[k - 3] + 3.0 * h / 8.0 * (f[k - 3] + 3.0 * f[k - 2] + 3.0 * f[k - 1] + f[k]);
    }
    out
}

/// Cubic Lagrange interpolation on strictly increasing, possibly
/// nonuniform nodes. Points outside `[xs[0], xs[n-1]]` are extrapolated from
/// the end stencil.
pub fn interp_cubic(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    let n = xs.len();
    debug_assert_eq!(n, ys.len());
    if n == 1 {
        return ys[0];
    }
    let m = n.min(4);
    let pos = xs.partition_point(|&t| t <= x);
    let start = pos.saturating_sub(m / 2).min(n - m);
    let mut acc = 0.0;
    for a in start..start + m {
        let mut w = 1.0;
        for b in start..start + m {
            if a != b {
                w *= (x - xs[b]) / (xs[a] - xs[b]);
            }
        }
        acc += w * ys[a];
    }
    acc
}

/// Solves `map(x) = y` for increasing tabulated `map`, by interpolating the
/// inverse relation.
pub fn invert_monotone(xs: &[f64], map: &[f64], y: f64) -> f64 {
    interp_cubic(map, xs, y)
}
