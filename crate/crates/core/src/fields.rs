//! Scalar functions of `(u, v)` sampled on a uniform rectangular grid.
//!
//! Samples are stored row-major with `v` varying fastest: node `(i, j)` sits
//! at `u0 + i hu`, `v0 + j hv` and has flat index `i * nv + j`.
//!
//! Derivatives use second-order central differences in the interior and
//! three-point one-sided second-order closures on the boundary. When an
//! exact evaluator is attached (see [`crate::analytic`]) derivatives are
//! taken from it instead and the result keeps an evaluator.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, Div, Mul, Neg, Sub};

// Unused when std is linked and its inherent float methods win.
#[allow(unused_imports)]
use num_traits::Float;

use crate::analytic::{Analytic, BinaryOp, UnaryOp};
use crate::error::{Error, Result};

/// Default lower bound for `|mu|` where `1/sqrt|mu|` and `ln|mu|` are formed.
pub const MU_MIN: f64 = 1e-8;

/// Number of boundary layers excluded by interior measurements.
pub const INTERIOR_MARGIN: usize = 2;

/// Uniform grid on `[u0, u1] x [v0, v1]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    pub u0: f64,
    pub u1: f64,
    pub v0: f64,
    pub v1: f64,
    pub nu: usize,
    pub nv: usize,
}

impl GridSpec {
    pub fn new(u0: f64, u1: f64, v0: f64, v1: f64, nu: usize, nv: usize) -> Result<Self> {
        if nu < 5 || nv < 5 {
            return Err(Error::GridTooSmall { nu, nv });
        }
        if !(u0.is_finite() && u1.is_finite() && v0.is_finite() && v1.is_finite()) {
            return Err(Error::InvalidGrid("non-finite bounds"));
        }
        if u1 <= u0 || v1 <= v0 {
            return Err(Error::InvalidGrid("upper bound must exceed lower bound"));
        }
        Ok(GridSpec { u0, u1, v0, v1, nu, nv })
    }

    /// Square grid `[0, side]^2` with `n` nodes per axis.
    pub fn square(side: f64, n: usize) -> Result<Self> {
        Self::new(0.0, side, 0.0, side, n, n)
    }

    /// Grid `[c - r, c + r]` in both variables around `(cu, cv)`.
    pub fn centered(cu: f64, cv: f64, r: f64, n: usize) -> Result<Self> {
        Self::new(cu - r, cu + r, cv - r, cv + r, n, n)
    }

    pub fn validate(&self) -> Result<()> {
        Self::new(self.u0, self.u1, self.v0, self.v1, self.nu, self.nv).map(|_| ())
    }

    pub fn hu(&self) -> f64 {
        (self.u1 - self.u0) / (self.nu - 1) as f64
    }

    pub fn hv(&self) -> f64 {
        (self.v1 - self.v0) / (self.nv - 1) as f64
    }

    pub fn u(&self, i: usize) -> f64 {
        if i + 1 == self.nu {
            self.u1
        } else {
            self.u0 + i as f64 * self.hu()
        }
    }

    pub fn v(&self, j: usize) -> f64 {
        if j + 1 == self.nv {
            self.v1
        } else {
            self.v0 + j as f64 * self.hv()
        }
    }

    pub fn us(&self) -> Vec<f64> {
        (0..self.nu).map(|i| self.u(i)).collect()
    }

    pub fn vs(&self) -> Vec<f64> {
        (0..self.nv).map(|j| self.v(j)).collect()
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.nv + j
    }

    pub fn len(&self) -> usize {
        self.nu * self.nv
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_interior(&self, i: usize, j: usize) -> bool {
        let m = INTERIOR_MARGIN;
        i >= m && j >= m && i + m < self.nu && j + m < self.nv
    }

    /// Whether `(u, v)` lies in the closed domain, up to rounding slack.
    pub fn contains(&self, u: f64, v: f64) -> bool {
        let su = 1e-12 * (self.u1 - self.u0).max(1.0);
        let sv = 1e-12 * (self.v1 - self.v0).max(1.0);
        u >= self.u0 - su && u <= self.u1 + su && v >= self.v0 - sv && v <= self.v1 + sv
    }

    /// Same domain with `n` nodes per axis.
    pub fn with_nodes(&self, nu: usize, nv: usize) -> Result<Self> {
        Self::new(self.u0, self.u1, self.v0, self.v1, nu, nv)
    }
}

/// Sampled scalar function with an optional exact evaluator.
#[derive(Clone, Debug)]
pub struct ScalarField {
    grid: GridSpec,
    values: Vec<f64>,
    analytic: Option<Arc<Analytic>>,
}

fn stencil_weights(nodes: &[f64; 4], x: f64) -> [f64; 4] {
    core::array::from_fn(|a| {
        let mut w = 1.0;
        for b in 0..4 {
            if a != b {
                w *= (x - nodes[b]) / (nodes[a] - nodes[b]);
            }
        }
        w
    })
}

fn stencil_start(x: f64, x0: f64, h: f64, n: usize) -> usize {
    let cell = ((x - x0) / h).floor();
    let cell = if cell < 0.0 { 0 } else { cell as usize };
    cell.saturating_sub(1).min(n - 4)
}

impl ScalarField {
    pub fn from_values(grid: GridSpec, values: Vec<f64>) -> Result<Self> {
        grid.validate()?;
        if values.len() != grid.len() {
            return Err(Error::ShapeMismatch { expected: grid.len(), found: values.len() });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("field samples"));
        }
        Ok(ScalarField { grid, values, analytic: None })
    }

    pub fn from_fn(grid: GridSpec, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        let mut values = Vec::with_capacity(grid.len());
        for i in 0..grid.nu {
            for j in 0..grid.nv {
                values.push(f(grid.u(i), grid.v(j)));
            }
        }
        Self::from_values(grid, values)
    }

    /// Samples `a` at the nodes and keeps it for exact derivatives.
    pub fn from_analytic(grid: GridSpec, a: Arc<Analytic>) -> Result<Self> {
        let mut s = Self::from_fn(grid, |u, v| a.value(u, v))?;
        s.analytic = Some(a);
        Ok(s)
    }

    pub fn constant(grid: GridSpec, c: f64) -> Result<Self> {
        Self::from_analytic(grid, Arc::new(Analytic::Const(c)))
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn analytic(&self) -> Option<&Arc<Analytic>> {
        self.analytic.as_ref()
    }

    /// The same samples with the evaluator dropped.
    pub fn without_analytic(&self) -> Self {
        ScalarField { grid: self.grid, values: self.values.clone(), analytic: None }
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[self.grid.index(i, j)]
    }

    fn derived(&self, values: Vec<f64>, analytic: Option<Arc<Analytic>>) -> Self {
        ScalarField { grid: self.grid, values, analytic }
    }

    fn analytic_partial(&self, du: usize, dv: usize) -> Option<Self> {
        let a = self.analytic.as_ref()?;
        if a.max_order() < du + dv {
            return None;
        }
        let p = Arc::new(Analytic::Partial { du, dv, inner: a.clone() });
        let g = self.grid;
        let mut values = Vec::with_capacity(g.len());
        for i in 0..g.nu {
            for j in 0..g.nv {
                values.push(a.partial(g.u(i), g.v(j), du, dv));
            }
        }
        Some(self.derived(values, Some(p)))
    }

    pub fn d_du(&self) -> Self {
        self.analytic_partial(1, 0).unwrap_or_else(|| self.fd_du())
    }

    pub fn d_dv(&self) -> Self {
        self.analytic_partial(0, 1).unwrap_or_else(|| self.fd_dv())
    }

    /// Mixed partial; the finite-difference path applies `d_du` then `d_dv`.
    pub fn d_dudv(&self) -> Self {
        self.analytic_partial(1, 1).unwrap_or_else(|| self.fd_du().fd_dv())
    }

    pub fn d_du2(&self) -> Self {
        self.analytic_partial(2, 0).unwrap_or_else(|| self.fd_second(true))
    }

    pub fn d_dv2(&self) -> Self {
        self.analytic_partial(0, 2).unwrap_or_else(|| self.fd_second(false))
    }

    fn fd_first(&self, along_u: bool) -> Self {
        let g = self.grid;
        let (n, h, stride, lines, line_stride) = if along_u {
            (g.nu, g.hu(), g.nv, g.nv, 1)
        } else {
            (g.nv, g.hv(), 1, g.nu, g.nv)
        };
        let mut out = vec![0.0; g.len()];
        let f = &self.values;
        for l in 0..lines {
            let base = l * line_stride;
            let at = |k: usize| f[base + k * stride];
            out[base] = (-3.0 * at(0) + 4.0 * at(1) - at(2)) / (2.0 * h);
            for k in 1..n - 1 {
                out[base + k * stride] = (at(k + 1) - at(k - 1)) / (2.0 * h);
            }
            out[base + (n - 1) * stride] =
                (3.0 * at(n - 1) - 4.0 * at(n - 2) + at(n - 3)) / (2.0 * h);
        }
        self.derived(out, None)
    }

    fn fd_second(&self, along_u: bool) -> Self {
        let g = self.grid;
        let (n, h, stride, lines, line_stride) = if along_u {
            (g.nu, g.hu(), g.nv, g.nv, 1)
        } else {
            (g.nv, g.hv(), 1, g.nu, g.nv)
        };
        let h2 = h * h;
        let mut out = vec![0.0; g.len()];
        let f = &self.values;
        for l in 0..lines {
            let base = l * line_stride;
            let at = |k: usize| f[base + k * stride];
            out[base] = (2.0 * at(0) - 5.0 * at(1) + 4.0 * at(2) - at(3)) / h2;
            for k in 1..n - 1 {
                out[base + k * stride] = (at(k + 1) - 2.0 * at(k) + at(k - 1)) / h2;
            }
            out[base + (n - 1) * stride] =
                (2.0 * at(n - 1) - 5.0 * at(n - 2) + 4.0 * at(n - 3) - at(n - 4)) / h2;
        }
        self.derived(out, None)
    }

    /// Finite-difference `d/du`, ignoring any evaluator.
    pub fn fd_du(&self) -> Self {
        self.fd_first(true)
    }

    pub fn fd_dv(&self) -> Self {
        self.fd_first(false)
    }

    pub fn fd_dudv(&self) -> Self {
        self.fd_du().fd_dv()
    }

    /// Pointwise `ln|s|`.
    ///
    /// Fails with [`Error::NearZeroField`] if some `|s| < mu_min`, and with
    /// [`Error::MixedSign`] if `require_constant_sign` and the samples change sign.
    pub fn ln_abs_checked(&self, mu_min: f64, require_constant_sign: bool) -> Result<Self> {
        let min_abs = self.min_abs();
        if min_abs < mu_min {
            return Err(Error::NearZeroField { min_abs, threshold: mu_min });
        }
        if require_constant_sign && self.sign().is_none() {
            return Err(Error::MixedSign);
        }
        Ok(self.unary(UnaryOp::LnAbs, |x| x.abs().ln()))
    }

    /// `ln|s|` with the default threshold [`MU_MIN`].
    pub fn ln_abs(&self) -> Result<Self> {
        self.ln_abs_checked(MU_MIN, false)
    }

    /// `+1.0` or `-1.0` if all samples share a strict sign.
    pub fn sign(&self) -> Option<f64> {
        if self.values.iter().all(|&x| x > 0.0) {
            Some(1.0)
        } else if self.values.iter().all(|&x| x < 0.0) {
            Some(-1.0)
        } else {
            None
        }
    }

    fn unary(&self, op: UnaryOp, f: impl Fn(f64) -> f64) -> Self {
        let values = self.values.iter().map(|&x| f(x)).collect();
        let analytic = self.analytic.as_ref().map(|a| Arc::new(Analytic::unary(op, a.clone())));
        self.derived(values, analytic)
    }

    pub fn scale(&self, s: f64) -> Self {
        self.unary(UnaryOp::Scale(s), |x| s * x)
    }

    pub fn offset(&self, c: f64) -> Self {
        self.unary(UnaryOp::Offset(c), |x| x + c)
    }

    pub fn exp(&self) -> Self {
        self.unary(UnaryOp::Exp, |x| x.exp())
    }

    pub fn abs(&self) -> Self {
        self.unary(UnaryOp::Abs, |x| x.abs())
    }

    /// `|s|^p`.
    pub fn pow_abs(&self, p: f64) -> Self {
        self.unary(UnaryOp::PowAbs(p), |x| x.abs().powf(p))
    }

    pub fn sqrt_abs(&self) -> Self {
        self.pow_abs(0.5)
    }

    pub fn recip(&self) -> Self {
        self.unary(UnaryOp::Recip, |x| 1.0 / x)
    }

    /// Pointwise map; the evaluator is dropped.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        self.derived(self.values.iter().map(|&x| f(x)).collect(), None)
    }

    fn binary(&self, other: &Self, op: BinaryOp, f: impl Fn(f64, f64) -> f64) -> Self {
        assert_eq!(self.grid, other.grid, "fields live on different grids");
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect();
        let analytic = match (&self.analytic, &other.analytic) {
            (Some(a), Some(b)) => Some(Arc::new(Analytic::binary(op, a.clone(), b.clone()))),
            _ => None,
        };
        self.derived(values, analytic)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn min_abs(&self) -> f64 {
        self.values.iter().fold(f64::INFINITY, |m, x| m.min(x.abs()))
    }

    pub fn min(&self) -> f64 {
        self.values.iter().fold(f64::INFINITY, |m, &x| m.min(x))
    }

    pub fn max(&self) -> f64 {
        self.values.iter().fold(f64::NEG_INFINITY, |m, &x| m.max(x))
    }

    /// Largest `|s|` over nodes at least [`INTERIOR_MARGIN`] away from the boundary.
    pub fn interior_max_abs(&self) -> f64 {
        let g = self.grid;
        let mut m = 0.0f64;
        for i in 0..g.nu {
            for j in 0..g.nv {
                if g.is_interior(i, j) {
                    m = m.max(self.at(i, j).abs());
                }
            }
        }
        m
    }

    /// Value at an arbitrary point: the evaluator if attached, otherwise
    /// bicubic (tensor 4-point Lagrange) interpolation.
    pub fn eval(&self, u: f64, v: f64) -> Result<f64> {
        if !self.grid.contains(u, v) {
            return Err(Error::OutOfDomain { u, v });
        }
        match &self.analytic {
            Some(a) => Ok(a.value(u, v)),
            None => Ok(self.bicubic(u, v)),
        }
    }

    /// Bicubic interpolation of the samples, ignoring any evaluator.
    pub fn bicubic(&self, u: f64, v: f64) -> f64 {
        let g = self.grid;
        let i0 = stencil_start(u, g.u0, g.hu(), g.nu);
        let j0 = stencil_start(v, g.v0, g.hv(), g.nv);
        let wu = stencil_weights(&core::array::from_fn(|a| g.u(i0 + a)), u);
        let wv = stencil_weights(&core::array::from_fn(|b| g.v(j0 + b)), v);
        let mut acc = 0.0;
        for a in 0..4 {
            let mut row = 0.0;
            for b in 0..4 {
                row += wv[b] * self.at(i0 + a, j0 + b);
            }
            acc += wu[a] * row;
        }
        acc
    }

    /// Bicubic samples at the tensor product of `us` and `vs` (`v` fastest).
    pub fn sample_nodes(&self, us: &[f64], vs: &[f64]) -> Result<Vec<f64>> {
        let mut out = Vec::with_capacity(us.len() * vs.len());
        for &u in us {
            for &v in vs {
                if !self.grid.contains(u, v) {
                    return Err(Error::OutOfDomain { u, v });
                }
                out.push(self.bicubic(u, v));
            }
        }
        Ok(out)
    }

    /// Bicubic resampling onto the nodes of `target`, which must lie inside
    /// this field's domain.
    pub fn resample(&self, target: &GridSpec) -> Result<Self> {
        let values = self.sample_nodes(&target.us(), &target.vs())?;
        Self::from_values(*target, values)
    }
}

impl Add for &ScalarField {
    type Output = ScalarField;
    fn add(self, o: &ScalarField) -> ScalarField {
        self.binary(o, BinaryOp::Add, |a, b| a + b)
    }
}

impl Sub for &ScalarField {
    type Output = ScalarField;
    fn sub(self, o: &ScalarField) -> ScalarField {
        self.binary(o, BinaryOp::Sub, |a, b| a - b)
    }
}

impl Mul for &ScalarField {
    type Output = ScalarField;
    fn mul(self, o: &ScalarField) -> ScalarField {
        self.binary(o, BinaryOp::Mul, |a, b| a * b)
    }
}

impl Div for &ScalarField {
    type Output = ScalarField;
    fn div(self, o: &ScalarField) -> ScalarField {
        self.binary(o, BinaryOp::Div, |a, b| a / b)
    }
}

impl Neg for &ScalarField {
    type Output = ScalarField;
    fn neg(self) -> ScalarField {
        self.unary(UnaryOp::Neg, |x| -x)
    }
}
