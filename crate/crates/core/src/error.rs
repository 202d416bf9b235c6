use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

/// Failure modes of the numerical pipeline.
///
/// Variants carry enough context to be reported without the originating
/// call site; [`Error::name`] and [`Error::module`] give stable identifiers
/// for machine-readable reports.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Fewer than five nodes along an axis.
    GridTooSmall { nu: usize, nv: usize },
    /// Empty or inverted domain bounds.
    InvalidGrid(&'static str),
    /// Sample count does not match the grid.
    ShapeMismatch { expected: usize, found: usize },
    NonFinite(&'static str),
    /// A field that must stay away from zero came closer than `threshold`.
    NearZeroField { min_abs: f64, threshold: f64 },
    /// A field required to keep one sign changes sign on the grid.
    MixedSign,
    OutOfDomain { u: f64, v: f64 },
    /// mu1 = mu2 = 0: the surface lies in a three-dimensional subspace.
    BothMuZero,
    /// nu is constant where a non-constant function is required.
    ConstantNu,
    /// A degenerate triple whose nu varies in v.
    NuDependsOnV { max_dv: f64, tol: f64 },
    /// Malformed solver input (lengths, signs, orders).
    InvalidInput(&'static str),
    IncompatibleCorner { first: f64, second: f64 },
    BlowUp { u: f64, v: f64 },
    NoConvergence { sweeps: usize, change: f64 },
    SingularDegreeSystem { degree: usize },
    InvalidOrder(usize),
    /// Initial frame is not pseudo-orthonormal.
    InvalidFrame { residual: f64 },
    StepUnstable { u: f64, v: f64 },
    ResidualTooLarge { measured: f64, tol: f64 },
    DegenerateMetric,
    NotTimelike,
    NotIsotropic { ratio: f64, tol: f64 },
    MinimalOrTotallyGeodesic { nu_min: f64 },
    NotSeparable { dev_u: f64, dev_v: f64, tol: f64 },
    /// Canonical metric law or the sigma relation fails after reparametrization.
    NotCanonical { deviation: f64, tol: f64 },
}

impl Error {
    pub fn name(&self) -> &'static str {
        match self {
            Error::GridTooSmall { .. } => "GridTooSmall",
            Error::InvalidGrid(_) => "InvalidGrid",
            Error::ShapeMismatch { .. } => "ShapeMismatch",
            Error::NonFinite(_) => "NonFinite",
            Error::NearZeroField { .. } => "NearZeroField",
            Error::MixedSign => "MixedSign",
            Error::OutOfDomain { .. } => "OutOfDomain",
            Error::BothMuZero => "BothMuZero",
            Error::ConstantNu => "ConstantNu",
            Error::NuDependsOnV { .. } => "NuDependsOnV",
            Error::InvalidInput(_) => "InvalidInput",
            Error::IncompatibleCorner { .. } => "IncompatibleCorner",
            Error::BlowUp { .. } => "BlowUp",
            Error::NoConvergence { .. } => "NoConvergence",
            Error::SingularDegreeSystem { .. } => "SingularDegreeSystem",
            Error::InvalidOrder(_) => "InvalidOrder",
            Error::InvalidFrame { .. } => "InvalidFrame",
            Error::StepUnstable { .. } => "StepUnstable",
            Error::ResidualTooLarge { .. } => "ResidualTooLarge",
            Error::DegenerateMetric => "DegenerateMetric",
            Error::NotTimelike => "NotTimelike",
            Error::NotIsotropic { .. } => "NotIsotropic",
            Error::MinimalOrTotallyGeodesic { .. } => "MinimalOrTotallyGeodesic",
            Error::NotSeparable { .. } => "NotSeparable",
            Error::NotCanonical { .. } => "NotCanonical",
        }
    }

    /// Module of origin, as used in reports.
    pub fn module(&self) -> &'static str {
        match self {
            Error::GridTooSmall { .. }
            | Error::InvalidGrid(_)
            | Error::ShapeMismatch { .. }
            | Error::NonFinite(_)
            | Error::NearZeroField { .. }
            | Error::MixedSign
            | Error::OutOfDomain { .. } => "fields",
            Error::BothMuZero
            | Error::ConstantNu
            | Error::NuDependsOnV { .. }
            | Error::InvalidInput(_)
            | Error::IncompatibleCorner { .. }
            | Error::BlowUp { .. }
            | Error::NoConvergence { .. }
            | Error::SingularDegreeSystem { .. }
            | Error::InvalidOrder(_) => "natural_systems",
            Error::InvalidFrame { .. }
            | Error::StepUnstable { .. }
            | Error::ResidualTooLarge { .. } => "frame_integration",
            Error::DegenerateMetric
            | Error::NotTimelike
            | Error::NotIsotropic { .. }
            | Error::MinimalOrTotallyGeodesic { .. } => "surface_analysis",
            Error::NotSeparable { .. } | Error::NotCanonical { .. } => "canonical_params",
        }
    }

    /// True for failures of a numerical procedure on otherwise valid input
    /// (tolerance exceeded, divergence, blow-up).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::BlowUp { .. }
                | Error::NoConvergence { .. }
                | Error::SingularDegreeSystem { .. }
                | Error::StepUnstable { .. }
                | Error::ResidualTooLarge { .. }
                | Error::NotSeparable { .. }
                | Error::NotCanonical { .. }
                | Error::MinimalOrTotallyGeodesic { .. }
                | Error::DegenerateMetric
                | Error::NearZeroField { .. }
        )
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::GridTooSmall { nu, nv } => {
                write!(f, "grid {nu}x{nv} too small, need at least 5 nodes per axis")
            }
            Error::InvalidGrid(why) => write!(f, "invalid grid: {why}"),
            Error::ShapeMismatch { expected, found } => {
                write!(f, "expected {expected} samples, found {found}")
            }
            Error::NonFinite(what) => write!(f, "non-finite value in {what}"),
            Error::NearZeroField { min_abs, threshold } => {
                write!(f, "field magnitude {min_abs:e} below threshold {threshold:e}")
            }
            Error::MixedSign => write!(f, "field changes sign on the grid"),
            Error::OutOfDomain { u, v } => write!(f, "point ({u}, {v}) outside the grid domain"),
            Error::BothMuZero => {
                write!(f, "mu1 = mu2 = 0: inflection configuration, surface lies in a 3-space")
            }
            Error::ConstantNu => write!(f, "nu is constant"),
            Error::NuDependsOnV { max_dv, tol } => {
                write!(f, "degenerate case needs nu = nu(u), but max |nu_v| = {max_dv:e} > {tol:e}")
            }
            Error::InvalidInput(why) => write!(f, "invalid input: {why}"),
            Error::IncompatibleCorner { first, second } => {
                write!(f, "edge data disagree at the corner: {first} vs {second}")
            }
            Error::BlowUp { u, v } => write!(f, "solution blew up near ({u}, {v})"),
            Error::NoConvergence { sweeps, change } => {
                write!(f, "no convergence after {sweeps} sweeps (last change {change:e})")
            }
            Error::SingularDegreeSystem { degree } => {
                write!(f, "singular coefficient system at degree {degree}")
            }
            Error::InvalidOrder(n) => write!(f, "jet order {n} not supported"),
            Error::InvalidFrame { residual } => {
                write!(f, "initial frame not pseudo-orthonormal (gram residual {residual:e})")
            }
            Error::StepUnstable { u, v } => write!(f, "frame integration unstable near ({u}, {v})"),
            Error::ResidualTooLarge { measured, tol } => {
                write!(f, "natural-system residual {measured:e} exceeds {tol:e}")
            }
            Error::DegenerateMetric => write!(f, "first fundamental form is degenerate"),
            Error::NotTimelike => write!(f, "immersion is not timelike"),
            Error::NotIsotropic { ratio, tol } => {
                write!(f, "parameters are not isotropic (max(|E|,|G|)/max|F| = {ratio:e} > {tol:e}); isotropic coordinates must be constructed first")
            }
            Error::MinimalOrTotallyGeodesic { nu_min } => {
                write!(f, "mean curvature vanishes (min nu = {nu_min:e})")
            }
            Error::NotSeparable { dev_u, dev_v, tol } => {
                write!(f, "f^2|mu_i| not separable (dev_u {dev_u:e}, dev_v {dev_v:e}, tol {tol:e})")
            }
            Error::NotCanonical { deviation, tol } => {
                write!(f, "canonical relations violated ({deviation:e} > {tol:e})")
            }
        }
    }
}

impl core::error::Error for Error {}
