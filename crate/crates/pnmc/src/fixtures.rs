//! Builtin fixtures with pinned parameters.
//!
//! Seed 0 is the hand-picked jet seed below. Any other seed perturbs its
//! higher coefficients with ChaCha8 noise, so a seed number always names
//! the same surface.

use std::f64::consts::FRAC_1_SQRT_2;

use pnmc_core::analysis::Immersion;
use pnmc_core::frame::{reconstruct, ReconstructOptions};
use pnmc_core::natural::{
    jet_manufacture, solve_goursat_degenerate, solve_goursat_hyperbolic, HyperbolicGoursatData, JetSeed, JetTriple,
};
use pnmc_core::{standard_frame, CanonicalTriple, Case, GridSpec, MinkVec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{CliError, Result};

pub const DEFAULT_SEED: u64 = 0;
pub const DEFAULT_NODES: usize = 65;
pub const DEFAULT_ORDER: usize = 6;
pub const DEFAULT_RADIUS: f64 = 0.1;
/// Jet order behind the hyperbolic Goursat edge data.
pub const HYPERBOLIC_ORDER: usize = 12;
const PERTURBATION: f64 = 0.1;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Fixture {
    Constant,
    Jet,
    GoursatDegenerate,
    GoursatHyperbolic,
    Cylinder,
}

impl Fixture {
    pub const ALL: [Fixture; 5] =
        [Fixture::Constant, Fixture::Jet, Fixture::GoursatDegenerate, Fixture::GoursatHyperbolic, Fixture::Cylinder];

    pub fn name(self) -> &'static str {
        match self {
            Fixture::Constant => "constant",
            Fixture::Jet => "jet",
            Fixture::GoursatDegenerate => "goursat-degenerate",
            Fixture::GoursatHyperbolic => "goursat-hyperbolic",
            Fixture::Cylinder => "cylinder",
        }
    }

    pub fn parse(s: &str) -> Result<Fixture> {
        Fixture::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| CliError::Config(format!("unknown fixture {s:?}")))
    }

    /// The case a fixture is pinned to, if any.
    fn pinned_case(self) -> Option<Case> {
        match self {
            Fixture::Constant | Fixture::GoursatHyperbolic => Some(Case::NegativeKH),
            Fixture::GoursatDegenerate => Some(Case::Degenerate),
            Fixture::Jet | Fixture::Cylinder => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FixtureParams {
    pub case: Option<Case>,
    pub order: Option<usize>,
    pub radius: f64,
    pub nodes: usize,
    pub seed: u64,
}

impl Default for FixtureParams {
    fn default() -> Self {
        FixtureParams { case: None, order: None, radius: DEFAULT_RADIUS, nodes: DEFAULT_NODES, seed: DEFAULT_SEED }
    }
}

impl FixtureParams {
    /// Case actually used by `fixture`, rejecting a conflicting request.
    pub fn case_for(&self, fixture: Fixture) -> Result<Case> {
        match (fixture.pinned_case(), self.case) {
            (Some(p), Some(c)) if p != c => {
                Err(CliError::Config(format!("fixture {} is pinned to case {}", fixture.name(), p.name())))
            }
            (Some(p), _) => Ok(p),
            (None, c) => Ok(c.unwrap_or(Case::PositiveKH)),
        }
    }
}

/// Hand-picked seed; `sign_mu` fixes the sign of `mu`.
pub fn base_seed(sign_mu: f64) -> JetSeed {
    JetSeed {
        g0: 0.2,
        g_u: vec![0.0, 0.5, -0.3, 0.2, 0.1, -0.2, 0.1],
        g_v: vec![0.0, -0.4, 0.2, 0.3, -0.1, 0.2, 0.1],
        lambda: vec![0.7, 0.3, -0.5, 0.2, 0.4, -0.3, 0.2],
        nu: vec![1.2, -0.6, 0.4, 0.1, -0.2, 0.3, 0.1],
        sign_mu,
    }
}

/// Jet seed for `case`: positive `mu` except in the negative case.
pub fn jet_seed(case: Case, seed: u64) -> JetSeed {
    let mut s = base_seed(if case == Case::NegativeKH { -1.0 } else { 1.0 });
    if seed != 0 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for v in [&mut s.g_u, &mut s.g_v, &mut s.lambda, &mut s.nu] {
            for c in v.iter_mut().skip(1) {
                *c += rng.random_range(-PERTURBATION..PERTURBATION);
            }
        }
    }
    s
}

pub fn jet(case: Case, order: usize, radius: f64, nodes: usize, seed: u64) -> Result<CanonicalTriple> {
    Ok(jet_manufacture(case, order, &jet_seed(case, seed), (0.0, 0.0), radius, nodes)?)
}

/// `(lambda, mu, nu) = (0, 1, 1)`, eps = -1, on the unit square.
pub fn constant(nodes: usize) -> Result<CanonicalTriple> {
    Ok(CanonicalTriple::constant(GridSpec::square(1.0, nodes)?, 0.0, 1.0, 1.0, Case::NegativeKH)?)
}

/// Degenerate Goursat data: `nu = 1 + u`, `g = 1.5 u` on `v = 0`,
/// `g = 1.5 v` on `u = 0`, `lambda = 0` on `v = 0`, `mu > 0`.
pub fn goursat_degenerate(nodes: usize) -> Result<CanonicalTriple> {
    let g = GridSpec::square(1.0, nodes)?;
    let nu: Vec<f64> = g.us().iter().map(|u| 1.0 + u).collect();
    let bottom: Vec<f64> = g.us().iter().map(|u| 1.5 * u).collect();
    let left: Vec<f64> = g.vs().iter().map(|v| 1.5 * v).collect();
    Ok(solve_goursat_degenerate(&nu, &bottom, &left, &vec![0.0; nodes], 1.0, g)?)
}

/// Hyperbolic Goursat problem on `[0, 0.5]^2` whose edge data come from
/// an eps = -1 jet centred at `(0, 0.25)`.
pub fn goursat_hyperbolic(nodes: usize, seed: u64) -> Result<CanonicalTriple> {
    let jet = JetTriple::solve(Case::NegativeKH, HYPERBOLIC_ORDER, &jet_seed(Case::PositiveKH, seed))?;
    let [l, m, n] = jet.evaluators((0.0, 0.25));
    let g = GridSpec::new(0.0, 0.5, 0.0, 0.5, nodes, nodes)?;
    let (l2, n2) = (l.clone(), n.clone());
    let data = HyperbolicGoursatData::from_fns(
        &g,
        move |u, v| l.value(u, v) + n.value(u, v),
        move |u, v| l2.value(u, v) - n2.value(u, v),
        move |u, v| m.value(u, v).abs().ln(),
        1.0,
    );
    Ok(solve_goursat_hyperbolic(&data, g)?)
}

/// Lightlike-parametrized cylinder `(cos t, sin t, 0, s)` with
/// `t = (u - v)/sqrt 2`, `s = (u + v)/sqrt 2`.
pub fn cylinder(nodes: usize) -> Result<Immersion> {
    Ok(Immersion::from_fn(GridSpec::square(1.0, nodes)?, |u, v| {
        let (th, t) = ((u - v) * FRAC_1_SQRT_2, (u + v) * FRAC_1_SQRT_2);
        MinkVec::new(th.cos(), th.sin(), 0.0, t)
    })?)
}

/// Triple of a triple fixture.
pub fn triple(fixture: Fixture, p: &FixtureParams) -> Result<CanonicalTriple> {
    let case = p.case_for(fixture)?;
    match fixture {
        Fixture::Constant => constant(p.nodes),
        Fixture::Jet => jet(case, p.order.unwrap_or(DEFAULT_ORDER), p.radius, p.nodes, p.seed),
        Fixture::GoursatDegenerate => goursat_degenerate(p.nodes),
        Fixture::GoursatHyperbolic => goursat_hyperbolic(p.nodes, p.seed),
        Fixture::Cylinder => Err(CliError::Config("cylinder is an immersion fixture, not a triple".into())),
    }
}

/// Immersion of any fixture; triple fixtures are reconstructed from the
/// standard frame at the origin.
pub fn immersion(fixture: Fixture, p: &FixtureParams, opts: ReconstructOptions) -> Result<Immersion> {
    match fixture {
        Fixture::Cylinder => cylinder(p.nodes),
        _ => {
            let t = triple(fixture, p)?;
            Ok(reconstruct(&t, MinkVec::ZERO, &standard_frame(), opts)?.immersion)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeds_are_reproducible() {
        assert_eq!(jet_seed(Case::PositiveKH, 7), jet_seed(Case::PositiveKH, 7));
        assert_ne!(jet_seed(Case::PositiveKH, 7), jet_seed(Case::PositiveKH, 8));
        assert_eq!(jet_seed(Case::PositiveKH, 0), base_seed(1.0));
    }

    #[test]
    fn pinned_case_conflict() {
        let p = FixtureParams { case: Some(Case::PositiveKH), ..Default::default() };
        assert!(p.case_for(Fixture::GoursatDegenerate).is_err());
        assert_eq!(p.case_for(Fixture::Jet).unwrap(), Case::PositiveKH);
    }
}
