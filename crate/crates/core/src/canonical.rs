//! Passage to canonical parameters.
//!
//! Under `u -> U(u)`, `v -> V(v)` isotropic parameters stay isotropic and
//! `f^2 |mu1| / U'^2`, `f^2 |mu2| / V'^2` are the new values of
//! `f^2 |mu_i|`. Canonical parameters make both equal to one, so
//! `U' = sqrt(phi(u))`, `V' = sqrt(psi(v))` with `phi = f^2 |mu1|`,
//! `psi = f^2 |mu2|`. When `mu2 = 0` only `U` is fixed and `v` is kept.

use alloc::vec::Vec;

// Unused when std is linked and its inherent float methods win.
#[allow(unused_imports)]
use num_traits::Float;

use crate::analysis::{analyze, AnalysisOptions, Immersion, SurfaceAnalysis};
use crate::error::{Error, Result};
use crate::fields::{GridSpec, ScalarField};
use crate::natural::{CanonicalTriple, Case};
use crate::quadrature::{cumulative_simpson, invert_monotone};

/// `max|mu2| <= DEGENERATE_RATIO max|mu1|` selects the degenerate case.
pub const DEGENERATE_RATIO: f64 = 1e-3;
/// Base of the default separability tolerance, see [`Separability::default_tol`].
pub const TOL_SEP: f64 = 1e-3;
/// Default bound on the canonical relations after reparametrization.
pub const TOL_CANONICAL: f64 = 1e-2;

/// How far `f^2 |mu1|` depends on `v` and `f^2 |mu2|` on `u`.
#[derive(Clone, Debug, PartialEq)]
pub struct Separability {
    /// Interior max of `|d/du ln(f^2 |mu2|)|`; zero in the degenerate case.
    pub dev_u: f64,
    /// Interior max of `|d/dv ln(f^2 |mu1|)|`.
    pub dev_v: f64,
    /// Largest `|ln(f^2 |mu_i|)|`.
    pub log_scale: f64,
    pub degenerate: bool,
    /// Means of `f^2 |mu1|` over interior `v`, one per `u` node.
    pub phi: Vec<f64>,
    /// Means of `f^2 |mu2|` over interior `u`, one per `v` node; empty when degenerate.
    pub psi: Vec<f64>,
}

impl Separability {
    /// `TOL_SEP (1 + max|ln f^2 |mu_i||)`.
    pub fn default_tol(&self) -> f64 {
        TOL_SEP * (1.0 + self.log_scale)
    }
}

fn interior_range(n: usize) -> core::ops::Range<usize> {
    let m = crate::fields::INTERIOR_MARGIN.min((n - 1) / 2);
    m..n - m
}

/// Means of `field` over the interior of the other axis, one per node of
/// the `u` axis (`along_u`) or the `v` axis.
fn axis_means(field: &ScalarField, along_u: bool) -> Vec<f64> {
    let g = *field.grid();
    let (outer, inner) = if along_u { (g.nu, g.nv) } else { (g.nv, g.nu) };
    let r = interior_range(inner);
    let count = r.len() as f64;
    (0..outer)
        .map(|a| {
            r.clone()
                .map(|b| if along_u { field.at(a, b) } else { field.at(b, a) })
                .sum::<f64>()
                / count
        })
        .collect()
}

/// Separability of `f^2 |mu1|` and `f^2 |mu2|` from sampled `f`, `mu1`, `mu2`.
pub fn separability(f: &ScalarField, mu1: &ScalarField, mu2: &ScalarField) -> Result<Separability> {
    let (m1, m2) = (mu1.max_abs(), mu2.max_abs());
    if m1 <= DEGENERATE_RATIO * m2 || m1 == 0.0 {
        return Err(Error::InvalidInput("mu1 vanishes; exchange the roles of u and v"));
    }
    let f2 = f * f;
    let degenerate = m2 <= DEGENERATE_RATIO * m1;
    let phi_field = &f2 * &mu1.abs();
    let ln_phi = phi_field.ln_abs()?;
    let mut log_scale = ln_phi.max_abs();
    let dev_v = ln_phi.d_dv().interior_max_abs();
    let (psi, dev_u) = if degenerate {
        (Vec::new(), 0.0)
    } else {
        let psi_field = &f2 * &mu2.abs();
        let ln_psi = psi_field.ln_abs()?;
        log_scale = log_scale.max(ln_psi.max_abs());
        (axis_means(&psi_field, false), ln_psi.d_du().interior_max_abs())
    };
    Ok(Separability { dev_u, dev_v, log_scale, degenerate, phi: axis_means(&phi_field, true), psi })
}

fn separability_of(a: &SurfaceAnalysis) -> Result<Separability> {
    let ff = &a.functions;
    separability(&ff.f, &ff.mu1, &ff.mu2)
}

/// Measures whether `f^2 |mu1|` depends on `u` only and `f^2 |mu2|` on `v` only.
pub fn check_separability(m: &Immersion) -> Result<Separability> {
    separability_of(&analyze(m, &AnalysisOptions::default())?)
}

/// The change of parameters found by [`canonicalize`].
#[derive(Clone, Debug)]
pub struct Reparametrization {
    pub phi: Vec<f64>,
    pub psi: Vec<f64>,
    /// `ubar(u_i)`, with `ubar(u0) = 0`.
    pub ubar: Vec<f64>,
    /// `vbar(v_j)`, with `vbar(v0) = 0`; a translation of `v` when degenerate.
    pub vbar: Vec<f64>,
    /// Uniform grid in the new parameters.
    pub new_grid: GridSpec,
    /// Old parameters of the new grid nodes.
    pub source_us: Vec<f64>,
    pub source_vs: Vec<f64>,
    pub case: Case,
}

/// Thresholds for [`canonicalize`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CanonicalizeOptions {
    /// Defaults to [`Separability::default_tol`].
    pub tol_sep: Option<f64>,
    pub tol_canonical: f64,
    pub analysis: AnalysisOptions,
}

impl Default for CanonicalizeOptions {
    fn default() -> Self {
        CanonicalizeOptions {
            tol_sep: None,
            tol_canonical: TOL_CANONICAL,
            analysis: AnalysisOptions::default(),
        }
    }
}

/// A surface in canonical parameters with its triple.
#[derive(Clone, Debug)]
pub struct Canonicalized {
    pub immersion: Immersion,
    pub triple: CanonicalTriple,
    pub reparametrization: Reparametrization,
    pub separability: Separability,
    pub analysis: SurfaceAnalysis,
    /// Interior max of `|f sqrt|mu1| - 1|` in the new parameters.
    pub metric_deviation: f64,
    /// Interior max of `|lambda2 + eps lambda1|` and `|mu2 + eps mu1|`
    /// relative to `max|mu1|`.
    pub sigma_deviation: f64,
    /// Spread of `nu` along `v` removed when projecting to `nu(u)`
    /// (degenerate case only).
    pub nu_v_spread: f64,
}

fn reparam_axis(density: &[f64], h: f64) -> Vec<f64> {
    let speed: Vec<f64> = density.iter().map(|d| d.abs().sqrt()).collect();
    cumulative_simpson(&speed, h)
}

fn check_monotone(map: &[f64]) -> Result<()> {
    if map.windows(2).all(|w| w[1] > w[0]) {
        Ok(())
    } else {
        Err(Error::InvalidInput("reparametrization is not monotone"))
    }
}

/// Reparametrizes `m` to canonical parameters and reads off the triple.
pub fn canonicalize(m: &Immersion, opts: &CanonicalizeOptions) -> Result<Canonicalized> {
    let first = analyze(m, &opts.analysis)?;
    let sep = separability_of(&first)?;
    let tol_sep = opts.tol_sep.unwrap_or_else(|| sep.default_tol());
    if sep.dev_u > tol_sep || sep.dev_v > tol_sep {
        return Err(Error::NotSeparable { dev_u: sep.dev_u, dev_v: sep.dev_v, tol: tol_sep });
    }
    let g = *m.grid();
    let (us, vs) = (g.us(), g.vs());
    let ubar = reparam_axis(&sep.phi, g.hu());
    let vbar: Vec<f64> = if sep.degenerate {
        vs.iter().map(|v| v - g.v0).collect()
    } else {
        reparam_axis(&sep.psi, g.hv())
    };
    check_monotone(&ubar)?;
    check_monotone(&vbar)?;
    let new_grid = GridSpec::new(ubar[0], ubar[g.nu - 1], vbar[0], vbar[g.nv - 1], g.nu, g.nv)?;
    let clamp = |x: f64, lo: f64, hi: f64| x.max(lo).min(hi);
    let source_us: Vec<f64> = new_grid
        .us()
        .iter()
        .map(|&t| clamp(invert_monotone(&us, &ubar, t), g.u0, g.u1))
        .collect();
    let source_vs: Vec<f64> = new_grid
        .vs()
        .iter()
        .map(|&t| clamp(invert_monotone(&vs, &vbar, t), g.v0, g.v1))
        .collect();
    let immersion = m.sample_onto(&source_us, &source_vs, new_grid)?;
    let analysis = analyze(&immersion, &opts.analysis)?;
    let ff = &analysis.functions;

    let mu_scale = ff.mu1.max_abs();
    let metric_deviation = (&ff.f * &ff.mu1.sqrt_abs()).offset(-1.0).interior_max_abs();
    let (case, nu, nu_v_spread) = if sep.degenerate {
        let means = axis_means(&ff.nu, true);
        let spread = (0..g.nu)
            .flat_map(|i| (0..g.nv).map(move |j| (i, j)))
            .filter(|&(i, j)| new_grid.is_interior(i, j))
            .fold(0.0f64, |s, (i, j)| s.max((ff.nu.at(i, j) - means[i]).abs()));
        let nu = ScalarField::from_fn(new_grid, |u, _| {
            crate::quadrature::interp_cubic(&new_grid.us(), &means, u)
        })?;
        (Case::Degenerate, nu, spread)
    } else {
        let sign = ff.mu1.sign().unwrap_or(1.0) * ff.mu2.sign().unwrap_or(1.0);
        let case = if sign < 0.0 { Case::PositiveKH } else { Case::NegativeKH };
        (case, ff.nu.without_analytic(), 0.0)
    };
    let eps = case.epsilon();
    let sigma_deviation = if sep.degenerate {
        ff.lambda2.interior_max_abs().max(ff.mu2.interior_max_abs()) / mu_scale
    } else {
        (&ff.lambda2 + &ff.lambda1.scale(eps))
            .interior_max_abs()
            .max((&ff.mu2 + &ff.mu1.scale(eps)).interior_max_abs())
            / mu_scale
    };
    let deviation = metric_deviation.max(sigma_deviation);
    if deviation > opts.tol_canonical {
        return Err(Error::NotCanonical { deviation, tol: opts.tol_canonical });
    }
    let triple = CanonicalTriple::new(ff.lambda1.clone(), ff.mu1.clone(), nu, case)?;
    Ok(Canonicalized {
        immersion,
        triple,
        reparametrization: Reparametrization {
            phi: sep.phi.clone(),
            psi: sep.psi.clone(),
            ubar,
            vbar,
            new_grid,
            source_us,
            source_vs,
            case,
        },
        separability: sep,
        analysis,
        metric_deviation,
        sigma_deviation,
        nu_v_spread,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::minkowski::{standard_frame, MinkVec};
    use crate::frame::{reconstruct, ReconstructOptions};

    fn constant_surface(n: usize) -> Immersion {
        let t = CanonicalTriple::constant(GridSpec::square(1.0, n).unwrap(), 0.0, 1.0, 1.0, Case::NegativeKH)
            .unwrap();
        reconstruct(&t, MinkVec::ZERO, &standard_frame(), ReconstructOptions::default())
            .unwrap()
            .immersion
    }

    #[test]
    fn canonical_input_is_fixed() {
        let c = canonicalize(&constant_surface(33), &CanonicalizeOptions::default()).unwrap();
        let r = &c.reparametrization;
        for (i, u) in r.ubar.iter().enumerate() {
            assert!((u - r.new_grid.u(i)).abs() < 1e-3, "node {i}");
        }
        assert_eq!(c.triple.case, Case::NegativeKH);
        assert!((c.triple.mu.max() - 1.0).abs() < 1e-3 && c.triple.lambda.interior_max_abs() < 1e-3);
        assert!(c.metric_deviation < 1e-3);
    }

    #[test]
    fn doubled_u_is_undone() {
        let m = constant_surface(33).reparametrize_affine(2.0, 0.0, 1.0, 0.0).unwrap();
        let sep = check_separability(&m).unwrap();
        assert!((sep.phi[16] - 0.25).abs() < 1e-3);
        let c = canonicalize(&m, &CanonicalizeOptions::default()).unwrap();
        assert!((c.reparametrization.new_grid.u1 - 1.0).abs() < 1e-3);
    }
}
