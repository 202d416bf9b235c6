//! Polynomial solutions of the natural systems to a given order at a point.
//!
//! Writing `g = ln|mu|`, the third equation becomes
//! `g_uv = -(e^{-g}(nu^2 + eps lambda^2) + eps e^{g})` (or `-e^{-g} nu^2`
//! in the degenerate case), which fixes every mixed coefficient of `g` two
//! degrees ahead; the pure powers of `g` are free. `g` is carried one degree
//! beyond `lambda` and `nu` so that all three residuals vanish through the
//! same degree. The first two equations
//! determine the degree `d + 1` coefficients of `lambda` and `nu` from lower
//! ones, triangularly, once the pure-`v` coefficients are given.

use alloc::sync::Arc;
use alloc::vec::Vec;

// Unused when std is linked and its inherent float methods win.
#[allow(unused_imports)]
use num_traits::Float;

use super::{CanonicalTriple, Case};
use crate::analytic::{Analytic, Poly2, Taylor2, UnaryOp};
use crate::error::{Error, Result};
use crate::fields::{GridSpec, ScalarField};

/// Free Taylor data, indexed by degree.
///
/// Entry `d` of each vector is the coefficient of the monomial of degree
/// `d` named by the field; missing entries are zero.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct JetSeed {
    /// `g(0, 0)`, i.e. `ln|mu|` at the center.
    pub g0: f64,
    /// Coefficients of `du^d` in `g` (entry 0 unused).
    pub g_u: Vec<f64>,
    /// Coefficients of `dv^d` in `g` (entry 0 unused).
    pub g_v: Vec<f64>,
    /// General case: coefficients of `dv^d` in `lambda`.
    /// Degenerate case: coefficients of `du^d` in `lambda`.
    pub lambda: Vec<f64>,
    /// General case: coefficients of `dv^d` in `nu`.
    /// Degenerate case: the full polynomial `nu(u)`, coefficients of `du^d`.
    pub nu: Vec<f64>,
    /// Sign of `mu`.
    pub sign_mu: f64,
}

impl JetSeed {
    /// Seed of the constant solution `(lambda, |mu|, nu)` with `|mu| = e^{g0}`.
    pub fn constant(lambda: f64, mu: f64, nu: f64) -> Self {
        JetSeed {
            g0: mu.abs().ln(),
            g_u: Vec::new(),
            g_v: Vec::new(),
            lambda: alloc::vec![lambda],
            nu: alloc::vec![nu],
            sign_mu: if mu < 0.0 { -1.0 } else { 1.0 },
        }
    }
}

fn seed_at(v: &[f64], d: usize) -> f64 {
    v.get(d).copied().unwrap_or(0.0)
}

/// Taylor coefficients of a manufactured solution.
#[derive(Clone, Debug)]
pub struct JetTriple {
    pub lambda: Taylor2,
    pub nu: Taylor2,
    pub g: Taylor2,
    pub case: Case,
    pub sign_mu: f64,
}

fn check_finite(t: &Taylor2, d: usize) -> Result<()> {
    if (0..=d).all(|j| t.get(d - j, j).is_finite()) {
        Ok(())
    } else {
        Err(Error::SingularDegreeSystem { degree: d })
    }
}

/// Coefficient `(i, j)` of `a * b`, using terms of `a` and `b` as given.
fn product_coeff(a: &Taylor2, b: &Taylor2, i: usize, j: usize) -> f64 {
    let mut s = 0.0;
    for k in 0..=i {
        for l in 0..=j {
            s += a.get(k, l) * b.get(i - k, j - l);
        }
    }
    s
}

/// Source `S` with `g_uv = -S`, through degree `d`.
fn g_source(lambda: &Taylor2, nu: &Taylor2, g: &Taylor2, case: Case, d: usize) -> Taylor2 {
    let (lam, nu, g) = (lambda.truncate(d), nu.truncate(d), g.truncate(d));
    let em = g.scale(-1.0).exp();
    match case {
        Case::Degenerate => em.mul(&nu.mul(&nu)),
        _ => {
            let eps = case.epsilon();
            let quad = nu.mul(&nu).add(&lam.mul(&lam).scale(eps));
            em.mul(&quad).add(&g.exp().scale(eps))
        }
    }
}

impl JetTriple {
    /// Solves the recursion so that every residual has vanishing Taylor
    /// coefficients through degree `n - 1`; `lambda`, `nu` have degree `n`
    /// and `g` degree `n + 1`.
    pub fn solve(case: Case, n: usize, seed: &JetSeed) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidOrder(n));
        }
        if seed.sign_mu != 1.0 && seed.sign_mu != -1.0 {
            return Err(Error::InvalidInput("sign_mu must be +1 or -1"));
        }
        let all_seeds = [&seed.g_u, &seed.g_v, &seed.lambda, &seed.nu];
        if !seed.g0.is_finite() || all_seeds.iter().any(|v| v.iter().any(|x| !x.is_finite())) {
            return Err(Error::NonFinite("jet seed"));
        }
        let mut lam = Taylor2::zeros(n);
        let mut nu = Taylor2::zeros(n);
        let mut g = Taylor2::zeros(n + 1);
        let degenerate = case == Case::Degenerate;

        g.set(0, 0, seed.g0);
        g.set(1, 0, seed_at(&seed.g_u, 1));
        g.set(0, 1, seed_at(&seed.g_v, 1));
        lam.set(0, 0, seed_at(&seed.lambda, 0));
        nu.set(0, 0, seed_at(&seed.nu, 0));
        if degenerate {
            for d in 1..=n {
                nu.set(d, 0, seed_at(&seed.nu, d));
            }
        }

        let eps = case.epsilon();
        for d in 0..n {
            // Degree d + 2 of g.
            let s = g_source(&lam, &nu, &g, case, d);
            for j in 0..=d {
                let i = d - j;
                let c = -s.get(i, j) / ((i + 1) * (j + 1)) as f64;
                g.set(i + 1, j + 1, c);
            }
            g.set(d + 2, 0, seed_at(&seed.g_u, d + 2));
            g.set(0, d + 2, seed_at(&seed.g_v, d + 2));
            check_finite(&g, d + 2)?;

            // Degree d + 1 of lambda and nu from r1, r2 at degree d.
            let gu = g.derivative(1, 0);
            let gv = g.derivative(0, 1);
            if degenerate {
                for j in 0..=d {
                    let i = d - j;
                    let mut rhs = product_coeff(&lam, &gv, i, j);
                    if j == 0 {
                        rhs -= (i + 1) as f64 * nu.get(i + 1, 0);
                    }
                    lam.set(i, j + 1, rhs / (j + 1) as f64);
                }
                lam.set(d + 1, 0, seed_at(&seed.lambda, d + 1));
            } else {
                lam.set(0, d + 1, seed_at(&seed.lambda, d + 1));
                nu.set(0, d + 1, seed_at(&seed.nu, d + 1));
                for i in 0..=d {
                    let j = d - i;
                    let r1 = product_coeff(&lam, &gv, i, j);
                    let r2 = product_coeff(&lam, &gu, i, j);
                    let nu_next = (r1 - (j + 1) as f64 * lam.get(i, j + 1)) / (i + 1) as f64;
                    let lam_next = (r2 + eps * (j + 1) as f64 * nu.get(i, j + 1)) / (i + 1) as f64;
                    nu.set(i + 1, j, nu_next);
                    lam.set(i + 1, j, lam_next);
                }
            }
            check_finite(&lam, d + 1)?;
            check_finite(&nu, d + 1)?;
        }
        Ok(JetTriple { lambda: lam, nu, g, case, sign_mu: seed.sign_mu })
    }

    /// Evaluators centered at `center`.
    pub fn evaluators(&self, center: (f64, f64)) -> [Arc<Analytic>; 3] {
        let lam = Arc::new(Analytic::Poly(Poly2::new(center, self.lambda.clone())));
        let nu = Arc::new(Analytic::Poly(Poly2::new(center, self.nu.clone())));
        let g = Arc::new(Analytic::Poly(Poly2::new(center, self.g.clone())));
        let mu = Arc::new(Analytic::unary(
            UnaryOp::Scale(self.sign_mu),
            Arc::new(Analytic::unary(UnaryOp::Exp, g)),
        ));
        [lam, mu, nu]
    }

    /// The triple on `grid`, with exact polynomial evaluators attached.
    pub fn on_grid(&self, center: (f64, f64), grid: GridSpec) -> Result<CanonicalTriple> {
        let [lam, mu, nu] = self.evaluators(center);
        CanonicalTriple::new(
            ScalarField::from_analytic(grid, lam)?,
            ScalarField::from_analytic(grid, mu)?,
            ScalarField::from_analytic(grid, nu)?,
            self.case,
        )
    }
}

/// Manufactures a polynomial triple of order `order` at `center` and samples
/// it on the square patch of half-width `radius` with `nodes` per axis.
pub fn jet_manufacture(
    case: Case,
    order: usize,
    seed: &JetSeed,
    center: (f64, f64),
    radius: f64,
    nodes: usize,
) -> Result<CanonicalTriple> {
    let jet = JetTriple::solve(case, order, seed)?;
    let grid = GridSpec::centered(center.0, center.1, radius, nodes)?;
    jet.on_grid(center, grid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::natural::residual;

    fn unit_seed(sign_mu: f64) -> JetSeed {
        JetSeed {
            g0: 0.2,
            g_u: alloc::vec![0.0, 0.5, -0.3, 0.2, 0.1, -0.2, 0.1],
            g_v: alloc::vec![0.0, -0.4, 0.2, 0.3, -0.1, 0.2, 0.1],
            lambda: alloc::vec![0.7, 0.3, -0.5, 0.2, 0.4, -0.3, 0.2],
            nu: alloc::vec![1.2, -0.6, 0.4, 0.1, -0.2, 0.3, 0.1],
            sign_mu,
        }
    }

    #[test]
    fn constant_seed_is_exact() {
        let seed = JetSeed::constant(0.0, 1.0, 1.0);
        let t = jet_manufacture(Case::NegativeKH, 2, &seed, (0.0, 0.0), 0.5, 9).unwrap();
        assert_eq!(residual(&t).unwrap().max_abs, 0.0);
    }

    #[test]
    fn order_too_low() {
        let seed = JetSeed::constant(0.0, 1.0, 1.0);
        assert_eq!(JetTriple::solve(Case::NegativeKH, 1, &seed).unwrap_err(), Error::InvalidOrder(1));
    }

    #[test]
    fn taylor_coefficients_of_residual_vanish() {
        for case in [Case::PositiveKH, Case::NegativeKH, Case::Degenerate] {
            let n = 6;
            let jet = JetTriple::solve(case, n, &unit_seed(-1.0)).unwrap();
            let [lam, mu, nu] = jet.evaluators((0.0, 0.0));
            let g = Analytic::unary(UnaryOp::LnAbs, mu.clone());
            let m = n + 2;
            let (l, v, g, mu) = (lam.taylor(0.0, 0.0, m), nu.taylor(0.0, 0.0, m), g.taylor(0.0, 0.0, m), mu.taylor(0.0, 0.0, m));
            let eps = case.epsilon();
            let r1 = v.derivative(1, 0).add(&l.derivative(0, 1)).sub(&l.truncate(m - 1).mul(&g.derivative(0, 1)));
            let r2 = if case == Case::Degenerate {
                v.derivative(0, 1)
            } else {
                l.derivative(1, 0).sub(&v.derivative(0, 1).scale(eps)).sub(&l.truncate(m - 1).mul(&g.derivative(1, 0)))
            };
            let abs_mu = mu.scale(jet.sign_mu);
            let mut r3 = abs_mu.truncate(m - 2).mul(&g.derivative(1, 1)).add(&v.mul(&v).truncate(m - 2));
            if case != Case::Degenerate {
                r3 = r3.add(&l.mul(&l).add(&mu.mul(&mu)).scale(eps).truncate(m - 2));
            }
            for d in 0..n {
                assert!(r1.degree_max_abs(d) < 1e-12, "{case:?} r1 degree {d}");
                assert!(r2.degree_max_abs(d) < 1e-12, "{case:?} r2 degree {d}");
            }
            for d in 0..n {
                assert!(r3.degree_max_abs(d) < 1e-12, "{case:?} r3 degree {d}");
            }
        }
    }

    #[test]
    fn residual_scales_with_radius() {
        let n = 6;
        let res = |r: f64| {
            let t = jet_manufacture(Case::PositiveKH, n, &unit_seed(1.0), (0.0, 0.0), r, 33).unwrap();
            residual(&t).unwrap().max_abs
        };
        let (a, b) = (res(0.1), res(0.05));
        assert!(a <= 1e-4, "{a}");
        let slope = (a / b).log2();
        assert!(slope >= 5.5, "slope {slope}");
    }

    #[test]
    fn degenerate_nu_is_function_of_u() {
        let jet = JetTriple::solve(Case::Degenerate, 6, &unit_seed(1.0)).unwrap();
        for d in 0..=6 {
            for j in 1..=d {
                assert_eq!(jet.nu.get(d - j, j), 0.0);
            }
        }
    }
}
