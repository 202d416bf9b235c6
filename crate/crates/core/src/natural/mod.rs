//! The natural PDE systems of timelike PNMC surfaces in canonical parameters.
//!
//! With `g = ln|mu|` and `eps = +-1` the general systems read
//!
//! ```text
//! r1 = nu_u + lambda_v - lambda g_v
//! r2 = lambda_u - eps nu_v - lambda g_u
//! r3 = |mu| g_uv + nu^2 + eps (lambda^2 + mu^2)
//! ```
//!
//! and in the degenerate case (`K - H^2 = 0`) `r2 = nu_v`,
//! `r3 = |mu| g_uv + nu^2`. A triple solves its system when all residuals
//! vanish.

mod goursat;
mod jet;

pub use goursat::{solve_goursat_degenerate, solve_goursat_hyperbolic, HyperbolicGoursatData};
pub use jet::{jet_manufacture, JetSeed, JetTriple};

use core::fmt;


use crate::error::{Error, Result};
use crate::fields::{GridSpec, ScalarField, MU_MIN};

/// Sign class of `K - H^2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Case {
    /// `eps = +1`, `K - H^2 > 0`.
    PositiveKH,
    /// `eps = -1`, `K - H^2 < 0`.
    NegativeKH,
    /// `K - H^2 = 0`.
    Degenerate,
}

impl Case {
    /// `eps` of the general systems; `0` for the degenerate case.
    pub fn epsilon(self) -> f64 {
        match self {
            Case::PositiveKH => 1.0,
            Case::NegativeKH => -1.0,
            Case::Degenerate => 0.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Case::PositiveKH => "positive",
            Case::NegativeKH => "negative",
            Case::Degenerate => "degenerate",
        }
    }

    pub fn parse(s: &str) -> Option<Case> {
        match s {
            "positive" => Some(Case::PositiveKH),
            "negative" => Some(Case::NegativeKH),
            "degenerate" => Some(Case::Degenerate),
            _ => None,
        }
    }
}

impl fmt::Display for Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Threshold for "nu does not depend on v" and "nu is constant".
pub fn tol_nu(nu: &ScalarField) -> f64 {
    1e-8 * (1.0 + nu.max_abs())
}

/// The three geometric functions `(lambda, mu, nu)` with their case tag.
#[derive(Clone, Debug)]
pub struct CanonicalTriple {
    pub lambda: ScalarField,
    pub mu: ScalarField,
    pub nu: ScalarField,
    pub case: Case,
}

impl CanonicalTriple {
    /// Checks grid agreement, `min|mu| >= MU_MIN`, constant sign of `mu`
    /// and, for the degenerate case, `nu = nu(u)`.
    pub fn new(lambda: ScalarField, mu: ScalarField, nu: ScalarField, case: Case) -> Result<Self> {
        if lambda.grid() != mu.grid() || mu.grid() != nu.grid() {
            return Err(Error::InvalidInput("lambda, mu, nu on different grids"));
        }
        let min_abs = mu.min_abs();
        if min_abs < MU_MIN {
            return Err(Error::NearZeroField { min_abs, threshold: MU_MIN });
        }
        if mu.sign().is_none() {
            return Err(Error::MixedSign);
        }
        if case == Case::Degenerate {
            let tol = tol_nu(&nu);
            let max_dv = nu.d_dv().max_abs();
            if max_dv > tol {
                return Err(Error::NuDependsOnV { max_dv, tol });
            }
        }
        Ok(CanonicalTriple { lambda, mu, nu, case })
    }

    /// Triple of constant functions.
    pub fn constant(grid: GridSpec, lambda: f64, mu: f64, nu: f64, case: Case) -> Result<Self> {
        Self::new(
            ScalarField::constant(grid, lambda)?,
            ScalarField::constant(grid, mu)?,
            ScalarField::constant(grid, nu)?,
            case,
        )
    }

    pub fn grid(&self) -> &GridSpec {
        self.mu.grid()
    }

    pub fn sign_mu(&self) -> f64 {
        self.mu.sign().unwrap_or(1.0)
    }

    pub fn epsilon(&self) -> f64 {
        self.case.epsilon()
    }

    /// Constant `nu` means parallel mean curvature vector, not PNMC.
    pub fn nu_is_constant(&self) -> bool {
        self.nu.max() - self.nu.min() <= tol_nu(&self.nu)
    }

    /// Whether `nu <= 0` somewhere (`nu = |H|` for an actual surface).
    pub fn has_nonpositive_nu(&self) -> bool {
        self.nu.min() <= 0.0
    }

    /// Same triple with every exact evaluator dropped.
    pub fn sampled(&self) -> Self {
        CanonicalTriple {
            lambda: self.lambda.without_analytic(),
            mu: self.mu.without_analytic(),
            nu: self.nu.without_analytic(),
            case: self.case,
        }
    }
}

/// Residual fields of the natural system of a triple.
#[derive(Clone, Debug)]
pub struct ResidualReport {
    pub r1: ScalarField,
    pub r2: ScalarField,
    pub r3: ScalarField,
    pub max_abs: f64,
    pub interior_max_abs: f64,
}

impl ResidualReport {
    pub fn component_max(&self) -> [f64; 3] {
        [self.r1.max_abs(), self.r2.max_abs(), self.r3.max_abs()]
    }

    pub fn component_interior_max(&self) -> [f64; 3] {
        [
            self.r1.interior_max_abs(),
            self.r2.interior_max_abs(),
            self.r3.interior_max_abs(),
        ]
    }
}

/// Evaluates the natural-system residuals of `t`.
pub fn residual(t: &CanonicalTriple) -> Result<ResidualReport> {
    let g = t.mu.ln_abs()?;
    let (gu, gv, guv) = (g.d_du(), g.d_dv(), g.d_dudv());
    let (lam, nu) = (&t.lambda, &t.nu);
    let abs_mu = t.mu.abs();
    let nu2 = nu * nu;

    let r1 = &(&nu.d_du() + &lam.d_dv()) - &(lam * &gv);
    let (r2, r3) = match t.case {
        Case::Degenerate => (nu.d_dv(), &(&abs_mu * &guv) + &nu2),
        case => {
            let eps = case.epsilon();
            let r2 = &(&lam.d_du() - &nu.d_dv().scale(eps)) - &(lam * &gu);
            let squares = &(lam * lam) + &(&t.mu * &t.mu);
            let r3 = &(&(&abs_mu * &guv) + &nu2) + &squares.scale(eps);
            (r2, r3)
        }
    };
    let max_abs = r1.max_abs().max(r2.max_abs()).max(r3.max_abs());
    let interior_max_abs = r1
        .interior_max_abs()
        .max(r2.interior_max_abs())
        .max(r3.interior_max_abs());
    Ok(ResidualReport { r1, r2, r3, max_abs, interior_max_abs })
}

/// Classifies a point from its frame functions by
/// `K - H^2 = -(mu2/mu1)(lambda1^2 + mu1^2)`.
///
/// If `mu1 = 0` but `mu2 != 0` the roles of the two pairs are exchanged.
/// The degenerate band is `|K - H^2| <= 1e-10 min(1, lambda1^2 + mu1^2)`.
pub fn classify_from_frame(lambda1: f64, mu1: f64, lambda2: f64, mu2: f64) -> Result<(Case, f64)> {
    let (l1, m1, m2) = if mu1 != 0.0 {
        (lambda1, mu1, mu2)
    } else if mu2 != 0.0 {
        (lambda2, mu2, mu1)
    } else {
        return Err(Error::BothMuZero);
    };
    let scale = l1 * l1 + m1 * m1;
    let k_minus_h2 = -(m2 / m1) * scale;
    let tol = 1e-10 * scale.min(1.0);
    let case = if k_minus_h2 > tol {
        Case::PositiveKH
    } else if k_minus_h2 < -tol {
        Case::NegativeKH
    } else {
        Case::Degenerate
    };
    Ok((case, k_minus_h2))
}
