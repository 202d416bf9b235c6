//! Goursat marching for the hyperbolic natural systems (fixture generators).

use alloc::vec;
use alloc::vec::Vec;

// Unused when std is linked and its inherent float methods win.
#[allow(unused_imports)]
use num_traits::Float;

use super::{CanonicalTriple, Case};
use crate::error::{Error, Result};
use crate::fields::{GridSpec, ScalarField};
use crate::quadrature::interp_cubic;

/// Marching stops with [`Error::BlowUp`] beyond this `|g|`.
pub const G_LIMIT: f64 = 50.0;

const MAX_SWEEPS: usize = 25;
const SWEEP_TOL: f64 = 1e-10;

fn check_len(v: &[f64], n: usize) -> Result<()> {
    if v.len() != n {
        return Err(Error::ShapeMismatch { expected: n, found: v.len() });
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite("edge data"));
    }
    Ok(())
}

fn check_corner(a: f64, b: f64) -> Result<()> {
    if (a - b).abs() > 1e-12 * (1.0 + a.abs().max(b.abs())) {
        return Err(Error::IncompatibleCorner { first: a, second: b });
    }
    Ok(())
}

fn check_sign(sign_mu: f64) -> Result<()> {
    if sign_mu == 1.0 || sign_mu == -1.0 {
        Ok(())
    } else {
        Err(Error::InvalidInput("sign_mu must be +1 or -1"))
    }
}

/// One cell of the trapezoidal Goursat update for `g_uv = R(g)` at the
/// upper-right corner: solves `x = base + c (known + R(x))` by Newton.
fn cell_update(
    base: f64,
    known: f64,
    c: f64,
    rhs: impl Fn(f64) -> (f64, f64),
    at: (f64, f64),
) -> Result<(f64, f64)> {
    let blow_up = || Error::BlowUp { u: at.0, v: at.1 };
    let mut x = base + c * (known + rhs(base).0);
    for _ in 0..60 {
        if !x.is_finite() || x.abs() > G_LIMIT {
            return Err(blow_up());
        }
        let (r, dr) = rhs(x);
        let f = x - base - c * (known + r);
        let df = 1.0 - c * dr;
        if !(df > 0.0) || !f.is_finite() {
            return Err(blow_up());
        }
        let step = f / df;
        x -= step;
        if step.abs() <= 1e-15 * (1.0 + x.abs()) {
            break;
        }
    }
    if !x.is_finite() || x.abs() > G_LIMIT {
        return Err(blow_up());
    }
    Ok((x, rhs(x).0))
}

/// Marches `g_uv = R(i, j, g)` from `g` on the bottom row and left column.
/// `rhs(i, j, g)` returns `(R, dR/dg)`.
fn march_g(
    grid: &GridSpec,
    g_bottom: &[f64],
    g_left: &[f64],
    rhs: impl Fn(usize, usize, f64) -> (f64, f64),
) -> Result<Vec<f64>> {
    let (nu, nv) = (grid.nu, grid.nv);
    let c = 0.25 * grid.hu() * grid.hv();
    let mut g = vec![0.0; nu * nv];
    let mut r = vec![0.0; nu * nv];
    for i in 0..nu {
        g[i * nv] = g_bottom[i];
        r[i * nv] = rhs(i, 0, g_bottom[i]).0;
    }
    for j in 0..nv {
        g[j] = g_left[j];
        r[j] = rhs(0, j, g_left[j]).0;
    }
    for i in 1..nu {
        for j in 1..nv {
            let (k00, k10, k01) = ((i - 1) * nv + j - 1, i * nv + j - 1, (i - 1) * nv + j);
            let base = g[k10] + g[k01] - g[k00];
            let known = r[k00] + r[k10] + r[k01];
            let (x, rx) = cell_update(base, known, c, |x| rhs(i, j, x), (grid.u(i), grid.v(j)))?;
            g[i * nv + j] = x;
            r[i * nv + j] = rx;
        }
    }
    Ok(g)
}

/// Second-order derivative of uniformly spaced 1-D samples.
fn diff_1d(f: &[f64], h: f64) -> Vec<f64> {
    let n = f.len();
    let mut d = vec![0.0; n];
    d[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
    for k in 1..n - 1 {
        d[k] = (f[k + 1] - f[k - 1]) / (2.0 * h);
    }
    d[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h);
    d
}

/// Solves the degenerate system for a fixture.
///
/// With `g = ln|mu|`, marches `g_uv = -nu(u)^2 e^{-g}` from `g_bottom`
/// (`g(u, v0)`) and `g_left` (`g(u0, v)`) with a trapezoidal cell rule,
/// then integrates `lambda_v = lambda g_v - nu_u` up each `u = const` line
/// by RK4 from `lambda_bottom`. Returns the triple with `mu = sign_mu e^g`.
pub fn solve_goursat_degenerate(
    nu_of_u: &[f64],
    g_bottom: &[f64],
    g_left: &[f64],
    lambda_bottom: &[f64],
    sign_mu: f64,
    grid: GridSpec,
) -> Result<CanonicalTriple> {
    grid.validate()?;
    check_sign(sign_mu)?;
    for (v, n) in [(nu_of_u, grid.nu), (g_bottom, grid.nu), (g_left, grid.nv), (lambda_bottom, grid.nu)] {
        check_len(v, n)?;
    }
    let nu_max = nu_of_u.iter().fold(f64::NEG_INFINITY, |m, &x| m.max(x));
    let nu_min = nu_of_u.iter().fold(f64::INFINITY, |m, &x| m.min(x));
    if nu_max - nu_min <= 1e-8 * (1.0 + nu_max.abs().max(nu_min.abs())) {
        return Err(Error::ConstantNu);
    }
    check_corner(g_bottom[0], g_left[0])?;

    let (nu, nv) = (grid.nu, grid.nv);
    let g = march_g(&grid, g_bottom, g_left, |i, _, x| {
        let a = nu_of_u[i] * nu_of_u[i];
        let e = (-x).exp();
        (-a * e, a * e)
    })?;

    let hv = grid.hv();
    let nu_u = diff_1d(nu_of_u, grid.hu());
    let vs = grid.vs();
    let mut lambda = vec![0.0; nu * nv];
    for i in 0..nu {
        let col = &g[i * nv..(i + 1) * nv];
        let gv = diff_1d(col, hv);
        let gv_at = |k: usize, half: bool| {
            if half {
                interp_cubic(&vs, &gv, vs[k] + 0.5 * hv)
            } else {
                gv[k]
            }
        };
        let rate = |gv: f64, l: f64| l * gv - nu_u[i];
        let mut l = lambda_bottom[i];
        lambda[i * nv] = l;
        for k in 0..nv - 1 {
            let (g0, gh, g1) = (gv_at(k, false), gv_at(k, true), gv_at(k + 1, false));
            let k1 = rate(g0, l);
            let k2 = rate(gh, l + 0.5 * hv * k1);
            let k3 = rate(gh, l + 0.5 * hv * k2);
            let k4 = rate(g1, l + hv * k3);
            l += hv / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            if !l.is_finite() {
                return Err(Error::BlowUp { u: grid.u(i), v: grid.v(k + 1) });
            }
            lambda[i * nv + k + 1] = l;
        }
    }

    let mut nu_field = vec![0.0; nu * nv];
    for i in 0..nu {
        nu_field[i * nv..(i + 1) * nv].fill(nu_of_u[i]);
    }
    let g = ScalarField::from_values(grid, g)?;
    CanonicalTriple::new(
        ScalarField::from_values(grid, lambda)?,
        g.exp().scale(sign_mu),
        ScalarField::from_values(grid, nu_field)?,
        Case::Degenerate,
    )
}

/// Edge data for the `eps = -1` system in characteristic variables
/// `p = lambda + nu`, `q = lambda - nu`, `g = ln|mu|`.
///
/// `p` is given on the bottom row and left column, `q` on the left column
/// and top row, `g` on the bottom row and left column. Row arrays have
/// `nu` entries (indexed by `u`), column arrays `nv` entries (indexed by `v`).
#[derive(Clone, Debug, PartialEq)]
pub struct HyperbolicGoursatData {
    pub p_bottom: Vec<f64>,
    pub p_left: Vec<f64>,
    pub q_left: Vec<f64>,
    pub q_top: Vec<f64>,
    pub g_bottom: Vec<f64>,
    pub g_left: Vec<f64>,
    pub sign_mu: f64,
}

impl HyperbolicGoursatData {
    /// Edge data sampled from functions of `(u, v)`.
    pub fn from_fns(
        grid: &GridSpec,
        p: impl Fn(f64, f64) -> f64,
        q: impl Fn(f64, f64) -> f64,
        g: impl Fn(f64, f64) -> f64,
        sign_mu: f64,
    ) -> Self {
        let (us, vs) = (grid.us(), grid.vs());
        let row = |f: &dyn Fn(f64, f64) -> f64, v: f64| us.iter().map(|&u| f(u, v)).collect();
        let col = |f: &dyn Fn(f64, f64) -> f64, u: f64| vs.iter().map(|&v| f(u, v)).collect();
        HyperbolicGoursatData {
            p_bottom: row(&p, grid.v0),
            p_left: col(&p, grid.u0),
            q_left: col(&q, grid.u0),
            q_top: row(&q, grid.v1),
            g_bottom: row(&g, grid.v0),
            g_left: col(&g, grid.u0),
            sign_mu,
        }
    }
}

/// Solves the `eps = -1` system by Picard iteration.
///
/// Each sweep transports `p` along the diagonal `(1, 1)` and `q` along
/// `(1, -1)` with the trapezoidal rule, so cells must be square,
///
/// ```text
/// p_u + p_v = lambda (g_u + g_v),   q_u - q_v = lambda (g_u - g_v),
/// ```
///
/// then re-marches `g_uv = p q e^{-g} + e^{g}`. Stops when the largest
/// change between sweeps is at most `1e-10`.
pub fn solve_goursat_hyperbolic(data: &HyperbolicGoursatData, grid: GridSpec) -> Result<CanonicalTriple> {
    grid.validate()?;
    check_sign(data.sign_mu)?;
    let (nu, nv) = (grid.nu, grid.nv);
    check_len(&data.p_bottom, nu)?;
    check_len(&data.q_top, nu)?;
    check_len(&data.g_bottom, nu)?;
    check_len(&data.p_left, nv)?;
    check_len(&data.q_left, nv)?;
    check_len(&data.g_left, nv)?;
    check_corner(data.p_bottom[0], data.p_left[0])?;
    check_corner(data.g_bottom[0], data.g_left[0])?;
    check_corner(data.q_left[nv - 1], data.q_top[0])?;

    let idx = |i: usize, j: usize| i * nv + j;
    let extend = |row: &[f64], col: &[f64], corner: f64| {
        let mut a = vec![0.0; nu * nv];
        for i in 0..nu {
            for j in 0..nv {
                a[idx(i, j)] = row[i] + col[j] - corner;
            }
        }
        a
    };
    let mut p = extend(&data.p_bottom, &data.p_left, data.p_left[0]);
    let mut q = extend(&data.q_top, &data.q_left, data.q_left[nv - 1]);
    let mut g = extend(&data.g_bottom, &data.g_left, data.g_left[0]);

    let (h, hv) = (grid.hu(), grid.hv());
    if (h - hv).abs() > 1e-12 * h {
        return Err(Error::InvalidInput("hyperbolic Goursat march needs hu = hv"));
    }
    let mut change = f64::INFINITY;
    for _ in 0..MAX_SWEEPS {
        let gf = ScalarField::from_values(grid, g.clone())?;
        let (gu, gv) = (gf.fd_du().into_values(), gf.fd_dv().into_values());
        let mut p_new = vec![0.0; nu * nv];
        let mut q_new = vec![0.0; nu * nv];
        for i in 0..nu {
            p_new[idx(i, 0)] = data.p_bottom[i];
            q_new[idx(i, nv - 1)] = data.q_top[i];
        }
        for j in 0..nv {
            p_new[idx(0, j)] = data.p_left[j];
            q_new[idx(0, j)] = data.q_left[j];
        }
        let source = |k: usize, plus: bool| {
            let lam = 0.5 * (p[k] + q[k]);
            lam * if plus { gu[k] + gv[k] } else { gu[k] - gv[k] }
        };
        for i in 1..nu {
            for j in 1..nv {
                let (k, b) = (idx(i, j), idx(i - 1, j - 1));
                p_new[k] = p_new[b] + 0.5 * h * (source(k, true) + source(b, true));
            }
        }
        for i in 1..nu {
            for j in (0..nv - 1).rev() {
                let (k, b) = (idx(i, j), idx(i - 1, j + 1));
                q_new[k] = q_new[b] + 0.5 * h * (source(k, false) + source(b, false));
            }
        }
        let g_new = march_g(&grid, &data.g_bottom, &data.g_left, |i, j, x| {
            let pq = p_new[idx(i, j)] * q_new[idx(i, j)];
            let (em, ep) = ((-x).exp(), x.exp());
            (pq * em + ep, -pq * em + ep)
        })?;
        change = 0.0;
        for k in 0..nu * nv {
            change = change
                .max((p_new[k] - p[k]).abs())
                .max((q_new[k] - q[k]).abs())
                .max((g_new[k] - g[k]).abs());
        }
        if p_new.iter().chain(&q_new).any(|x| !x.is_finite() || x.abs() > 1e8) {
            return Err(Error::BlowUp { u: grid.u1, v: grid.v1 });
        }
        p = p_new;
        q = q_new;
        g = g_new;
        if change <= SWEEP_TOL {
            let lambda: Vec<f64> = p.iter().zip(&q).map(|(a, b)| 0.5 * (a + b)).collect();
            let nu_vals: Vec<f64> = p.iter().zip(&q).map(|(a, b)| 0.5 * (a - b)).collect();
            let g = ScalarField::from_values(grid, g)?;
            return CanonicalTriple::new(
                ScalarField::from_values(grid, lambda)?,
                g.exp().scale(data.sign_mu),
                ScalarField::from_values(grid, nu_vals)?,
                Case::NegativeKH,
            );
        }
    }
    Err(Error::NoConvergence { sweeps: MAX_SWEEPS, change })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::natural::residual;

    fn degenerate(n: usize) -> Result<CanonicalTriple> {
        let grid = GridSpec::square(1.0, n).unwrap();
        let us = grid.us();
        let vs = grid.vs();
        let nu: Vec<f64> = us.iter().map(|u| 1.0 + u).collect();
        let gb: Vec<f64> = us.iter().map(|u| 1.5 * u).collect();
        let gl: Vec<f64> = vs.iter().map(|v| 1.5 * v).collect();
        solve_goursat_degenerate(&nu, &gb, &gl, &vec![0.0; n], 1.0, grid)
    }

    #[test]
    fn degenerate_second_order() {
        let r: Vec<f64> = [33, 65, 129]
            .iter()
            .map(|&n| residual(&degenerate(n).unwrap()).unwrap().interior_max_abs)
            .collect();
        assert!(r[1] <= 1e-2);
        assert!((r[0] / r[1]).log2() >= 1.8, "{r:?}");
        assert!((r[1] / r[2]).log2() >= 1.8, "{r:?}");
    }

    #[test]
    fn degenerate_nu_exactly_v_independent() {
        let t = degenerate(33).unwrap();
        assert_eq!(t.nu.d_dv().max_abs(), 0.0);
    }

    #[test]
    fn degenerate_rejects_constant_nu_and_bad_corner() {
        let grid = GridSpec::square(1.0, 9).unwrap();
        let z = vec![0.0; 9];
        assert_eq!(
            solve_goursat_degenerate(&z, &z, &z, &z, 1.0, grid).unwrap_err(),
            Error::ConstantNu
        );
        let nu: Vec<f64> = grid.us().iter().map(|u| 1.0 + u).collect();
        let mut left = z.clone();
        left[0] = 1.0;
        assert!(matches!(
            solve_goursat_degenerate(&nu, &z, &left, &z, 1.0, grid),
            Err(Error::IncompatibleCorner { .. })
        ));
    }

    #[test]
    fn degenerate_zero_edges_blow_up() {
        let grid = GridSpec::square(1.0, 65).unwrap();
        let nu: Vec<f64> = grid.us().iter().map(|u| 1.0 + u).collect();
        let z = vec![0.0; 65];
        assert!(matches!(
            solve_goursat_degenerate(&nu, &z, &z, &z, 1.0, grid),
            Err(Error::BlowUp { .. })
        ));
    }

    #[test]
    fn hyperbolic_constant_solution() {
        let grid = GridSpec::square(1.0, 17).unwrap();
        let data = HyperbolicGoursatData::from_fns(&grid, |_, _| 1.0, |_, _| -1.0, |_, _| 0.0, 1.0);
        let t = solve_goursat_hyperbolic(&data, grid).unwrap();
        assert!(residual(&t).unwrap().max_abs <= 1e-12);
        assert!(t.lambda.max_abs() <= 1e-15);
        assert!((t.nu.min() - 1.0).abs() <= 1e-15 && (t.mu.max() - 1.0).abs() <= 1e-15);
    }

    #[test]
    fn hyperbolic_zero_nu_flagged() {
        let grid = GridSpec::square(0.5, 17).unwrap();
        let data = HyperbolicGoursatData::from_fns(&grid, |_, _| 0.0, |_, _| 0.0, |_, _| 0.0, 1.0);
        let t = solve_goursat_hyperbolic(&data, grid).unwrap();
        assert!(t.nu_is_constant());
        assert!(t.nu.max_abs() == 0.0);
    }
}
