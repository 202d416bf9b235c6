//! Closed-form scalar functions of `(u, v)` evaluated through truncated
//! bivariate Taylor series.
//!
//! Every evaluator produces the local Taylor jet at a point, so derivatives
//! and compositions (products, quotients, `exp`, `ln|.|`, powers) stay exact
//! up to rounding. Jets are also the working representation of the
//! manufactured polynomial solutions in [`crate::natural`].

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

// Unused when std is linked and its inherent float methods win.
#[allow(unused_imports)]
use num_traits::Float;


/// Order reported by evaluators that support derivatives of any order.
pub const UNLIMITED_ORDER: usize = usize::MAX / 4;

#[inline]
fn tri_index(i: usize, j: usize) -> usize {
    let d = i + j;
    d * (d + 1) / 2 + j
}

fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Truncated series `sum c[i][j] du^i dv^j` over `i + j <= order`.
#[derive(Clone, Debug, PartialEq)]
pub struct Taylor2 {
    order: usize,
    coeffs: Vec<f64>,
}

impl Taylor2 {
    pub fn zeros(order: usize) -> Self {
        Taylor2 {
            order,
            coeffs: vec![0.0; tri_index(0, order) + 1],
        }
    }

    pub fn constant(order: usize, c: f64) -> Self {
        let mut t = Self::zeros(order);
        t.coeffs[0] = c;
        t
    }

    /// The coordinate function `u` expanded at `u0`.
    pub fn variable_u(order: usize, u0: f64) -> Self {
        let mut t = Self::constant(order, u0);
        if order >= 1 {
            t.set(1, 0, 1.0);
        }
        t
    }

    pub fn variable_v(order: usize, v0: f64) -> Self {
        let mut t = Self::constant(order, v0);
        if order >= 1 {
            t.set(0, 1, 1.0);
        }
        t
    }

    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        if i + j > self.order {
            0.0
        } else {
            self.coeffs[tri_index(i, j)]
        }
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, c: f64) {
        assert!(i + j <= self.order, "coefficient ({i},{j}) beyond order {}", self.order);
        self.coeffs[tri_index(i, j)] = c;
    }

    pub fn value(&self) -> f64 {
        self.coeffs[0]
    }

    /// `d^{i+j} f / du^i dv^j` at the expansion point.
    pub fn partial(&self, i: usize, j: usize) -> f64 {
        self.get(i, j) * factorial(i) * factorial(j)
    }

    pub fn truncate(&self, order: usize) -> Self {
        let order = order.min(self.order);
        let len = tri_index(0, order) + 1;
        Taylor2 { order, coeffs: self.coeffs[..len].to_vec() }
    }

    /// Largest coefficient magnitude among terms of exactly total degree `d`.
    pub fn degree_max_abs(&self, d: usize) -> f64 {
        (0..=d).fold(0.0, |m: f64, j| m.max(self.get(d - j, j).abs()))
    }

    fn common_order(&self, other: &Self) -> usize {
        self.order.min(other.order)
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.common_order(other);
        let mut t = Self::zeros(n);
        for (k, c) in t.coeffs.iter_mut().enumerate() {
            *c = self.coeffs[k] + other.coeffs[k];
        }
        t
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.common_order(other);
        let mut t = Self::zeros(n);
        for (k, c) in t.coeffs.iter_mut().enumerate() {
            *c = self.coeffs[k] - other.coeffs[k];
        }
        t
    }

    pub fn scale(&self, s: f64) -> Self {
        Taylor2 {
            order: self.order,
            coeffs: self.coeffs.iter().map(|c| s * c).collect(),
        }
    }

    pub fn add_constant(&self, c: f64) -> Self {
        let mut t = self.clone();
        t.coeffs[0] += c;
        t
    }

    pub fn mul(&self, other: &Self) -> Self {
        let n = self.common_order(other);
        let mut t = Self::zeros(n);
        for d in 0..=n {
            for j in 0..=d {
                let i = d - j;
                let mut s = 0.0;
                for k in 0..=i {
                    for l in 0..=j {
                        s += self.get(k, l) * other.get(i - k, j - l);
                    }
                }
                t.set(i, j, s);
            }
        }
        t
    }

    /// Quotient; the divisor must not vanish at the expansion point.
    pub fn div(&self, other: &Self) -> Self {
        let n = self.common_order(other);
        let b0 = other.value();
        let mut q = Self::zeros(n);
        for d in 0..=n {
            for j in 0..=d {
                let i = d - j;
                let mut s = self.get(i, j);
                for k in 0..=i {
                    for l in 0..=j {
                        if k == 0 && l == 0 {
                            continue;
                        }
                        s -= other.get(k, l) * q.get(i - k, j - l);
                    }
                }
                q.set(i, j, s / b0);
            }
        }
        q
    }

    /// `exp(f)` by the recursion `E_u = f_u E` (or `E_v = f_v E` on the `v` axis).
    pub fn exp(&self) -> Self {
        let n = self.order;
        let mut e = Self::zeros(n);
        e.set(0, 0, self.value().exp());
        for d in 1..=n {
            for j in 0..=d {
                let i = d - j;
                let mut s = 0.0;
                if i >= 1 {
                    for k in 1..=i {
                        for l in 0..=j {
                            s += k as f64 * self.get(k, l) * e.get(i - k, j - l);
                        }
                    }
                    s /= i as f64;
                } else {
                    for l in 1..=j {
                        s += l as f64 * self.get(0, l) * e.get(0, j - l);
                    }
                    s /= j as f64;
                }
                e.set(i, j, s);
            }
        }
        e
    }

    /// `ln|f|`; `f` must not vanish at the expansion point.
    pub fn ln_abs(&self) -> Self {
        let f = if self.value() < 0.0 { self.scale(-1.0) } else { self.clone() };
        let n = f.order;
        let f0 = f.value();
        let mut l = Self::zeros(n);
        l.set(0, 0, f0.ln());
        for d in 1..=n {
            for j in 0..=d {
                let i = d - j;
                // f L_u = f_u (or the v analogue when i = 0), solved for L[i][j].
                let (a, along_u) = if i >= 1 { (i, true) } else { (j, false) };
                let mut s = a as f64 * f.get(i, j);
                for k in 0..=i {
                    for m in 0..=j {
                        if k == i && m == j {
                            continue;
                        }
                        let w = if along_u { k } else { m };
                        if w == 0 {
                            continue;
                        }
                        s -= w as f64 * l.get(k, m) * f.get(i - k, j - m);
                    }
                }
                l.set(i, j, s / (a as f64 * f0));
            }
        }
        l
    }

    /// `|f|^p`; `f` must not vanish at the expansion point.
    pub fn pow_abs(&self, p: f64) -> Self {
        let f = if self.value() < 0.0 { self.scale(-1.0) } else { self.clone() };
        let n = f.order;
        let f0 = f.value();
        let mut r = Self::zeros(n);
        r.set(0, 0, f0.powf(p));
        for d in 1..=n {
            for j in 0..=d {
                let i = d - j;
                // f P_u = p f_u P, solved for P[i][j].
                let (a, along_u) = if i >= 1 { (i, true) } else { (j, false) };
                let mut s = 0.0;
                for k in 0..=i {
                    for m in 0..=j {
                        let w = if along_u { k } else { m };
                        if w == 0 {
                            continue;
                        }
                        s += p * w as f64 * f.get(k, m) * r.get(i - k, j - m);
                        if !(k == i && m == j) {
                            s -= w as f64 * r.get(k, m) * f.get(i - k, j - m);
                        }
                    }
                }
                r.set(i, j, s / (a as f64 * f0));
            }
        }
        r
    }

    /// Series of `d^{di+dj} f / du^di dv^dj`, of order `order - di - dj`.
    pub fn derivative(&self, di: usize, dj: usize) -> Self {
        assert!(di + dj <= self.order, "derivative beyond truncation order");
        let n = self.order - di - dj;
        let mut t = Self::zeros(n);
        for d in 0..=n {
            for j in 0..=d {
                let i = d - j;
                let c = self.get(i + di, j + dj) * factorial(i + di) / factorial(i)
                    * factorial(j + dj)
                    / factorial(j);
                t.set(i, j, c);
            }
        }
        t
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m: f64, c| m.max(c.abs()))
    }
}

/// Bivariate polynomial in powers of `(u - cu, v - cv)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Poly2 {
    center: (f64, f64),
    coeffs: Taylor2,
}

impl Poly2 {
    pub fn new(center: (f64, f64), coeffs: Taylor2) -> Self {
        Poly2 { center, coeffs }
    }

    pub fn center(&self) -> (f64, f64) {
        self.center
    }

    pub fn coeffs(&self) -> &Taylor2 {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.order()
    }

    pub fn value(&self, u: f64, v: f64) -> f64 {
        let (du, dv) = (u - self.center.0, v - self.center.1);
        let n = self.degree();
        // Horner in u of polynomials in v.
        let mut acc = 0.0;
        for i in (0..=n).rev() {
            let mut inner = 0.0;
            for j in (0..=n - i).rev() {
                inner = inner * dv + self.coeffs.get(i, j);
            }
            acc = acc * du + inner;
        }
        acc
    }

    /// Taylor expansion at `(u, v)` through `order`.
    pub fn taylor(&self, u: f64, v: f64, order: usize) -> Taylor2 {
        let (du, dv) = (u - self.center.0, v - self.center.1);
        let n = self.degree();
        let mut pu = vec![1.0; n + 1];
        let mut pv = vec![1.0; n + 1];
        for k in 1..=n {
            pu[k] = pu[k - 1] * du;
            pv[k] = pv[k - 1] * dv;
        }
        let mut t = Taylor2::zeros(order);
        for d in 0..=order.min(n) {
            for j in 0..=d {
                let i = d - j;
                let mut s = 0.0;
                for a in i..=n {
                    for b in j..=n - a {
                        let c = self.coeffs.get(a, b);
                        if c != 0.0 {
                            s += c * binomial(a, i) * binomial(b, j) * pu[a - i] * pv[b - j];
                        }
                    }
                }
                t.set(i, j, s);
            }
        }
        t
    }
}

type PointFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// A function given by closures for its value and any declared partials.
#[derive(Clone)]
pub struct ClosedForm {
    partials: Vec<(usize, usize, PointFn)>,
}

impl ClosedForm {
    pub fn new(f: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        ClosedForm {
            partials: vec![(0, 0, Arc::new(f) as PointFn)],
        }
    }

    /// Declare `d^{i+j} f / du^i dv^j`.
    pub fn with_partial(
        mut self,
        i: usize,
        j: usize,
        g: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        self.partials.retain(|(a, b, _)| !(*a == i && *b == j));
        self.partials.push((i, j, Arc::new(g)));
        self
    }

    fn find(&self, i: usize, j: usize) -> Option<&PointFn> {
        self.partials.iter().find(|(a, b, _)| *a == i && *b == j).map(|(_, _, f)| f)
    }

    /// Largest `n` such that every partial of total order `<= n` is declared.
    pub fn max_order(&self) -> usize {
        let mut n = 0;
        loop {
            let next = n + 1;
            if (0..=next).all(|j| self.find(next - j, j).is_some()) {
                n = next;
            } else {
                return n;
            }
        }
    }

    fn taylor(&self, u: f64, v: f64, order: usize) -> Taylor2 {
        let mut t = Taylor2::zeros(order);
        for d in 0..=order {
            for j in 0..=d {
                let i = d - j;
                let c = match self.find(i, j) {
                    Some(f) => f(u, v) / (factorial(i) * factorial(j)),
                    None => f64::NAN,
                };
                t.set(i, j, c);
            }
        }
        t
    }
}

impl fmt::Debug for ClosedForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let declared: Vec<(usize, usize)> = self.partials.iter().map(|(i, j, _)| (*i, *j)).collect();
        f.debug_struct("ClosedForm").field("declared", &declared).finish()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum UnaryOp {
    Neg,
    Scale(f64),
    Offset(f64),
    Exp,
    LnAbs,
    Abs,
    PowAbs(f64),
    Recip,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// Expression tree of closed-form evaluators.
#[derive(Clone, Debug)]
pub enum Analytic {
    Const(f64),
    Poly(Poly2),
    Closed(ClosedForm),
    Unary(UnaryOp, Arc<Analytic>),
    Binary(BinaryOp, Arc<Analytic>, Arc<Analytic>),
    Partial { du: usize, dv: usize, inner: Arc<Analytic> },
}

impl Analytic {
    pub fn unary(op: UnaryOp, a: Arc<Analytic>) -> Self {
        Analytic::Unary(op, a)
    }

    pub fn binary(op: BinaryOp, a: Arc<Analytic>, b: Arc<Analytic>) -> Self {
        Analytic::Binary(op, a, b)
    }

    /// Highest total derivative order this evaluator can produce.
    pub fn max_order(&self) -> usize {
        match self {
            Analytic::Const(_) | Analytic::Poly(_) => UNLIMITED_ORDER,
            Analytic::Closed(c) => c.max_order(),
            Analytic::Unary(_, a) => a.max_order(),
            Analytic::Binary(_, a, b) => a.max_order().min(b.max_order()),
            Analytic::Partial { du, dv, inner } => inner.max_order().saturating_sub(du + dv),
        }
    }

    pub fn taylor(&self, u: f64, v: f64, order: usize) -> Taylor2 {
        match self {
            Analytic::Const(c) => Taylor2::constant(order, *c),
            Analytic::Poly(p) => p.taylor(u, v, order),
            Analytic::Closed(c) => c.taylor(u, v, order),
            Analytic::Unary(op, a) => {
                let t = a.taylor(u, v, order);
                match op {
                    UnaryOp::Neg => t.scale(-1.0),
                    UnaryOp::Scale(s) => t.scale(*s),
                    UnaryOp::Offset(c) => t.add_constant(*c),
                    UnaryOp::Exp => t.exp(),
                    UnaryOp::LnAbs => t.ln_abs(),
                    UnaryOp::Abs => {
                        if t.value() < 0.0 {
                            t.scale(-1.0)
                        } else {
                            t
                        }
                    }
                    UnaryOp::PowAbs(p) => t.pow_abs(*p),
                    UnaryOp::Recip => Taylor2::constant(order, 1.0).div(&t),
                }
            }
            Analytic::Binary(op, a, b) => {
                let (ta, tb) = (a.taylor(u, v, order), b.taylor(u, v, order));
                match op {
                    BinaryOp::Add => ta.add(&tb),
                    BinaryOp::Sub => ta.sub(&tb),
                    BinaryOp::Mul => ta.mul(&tb),
                    BinaryOp::Div => ta.div(&tb),
                }
            }
            Analytic::Partial { du, dv, inner } => {
                inner.taylor(u, v, order + du + dv).derivative(*du, *dv)
            }
        }
    }

    pub fn value(&self, u: f64, v: f64) -> f64 {
        match self {
            Analytic::Const(c) => *c,
            Analytic::Poly(p) => p.value(u, v),
            _ => self.taylor(u, v, 0).value(),
        }
    }

    pub fn partial(&self, u: f64, v: f64, i: usize, j: usize) -> f64 {
        self.taylor(u, v, i + j).partial(i, j)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series_of(f: impl Fn(f64, f64) -> f64, u: f64, v: f64, order: usize) -> Taylor2 {
        // Taylor coefficients by repeated central differences, accurate enough for checks.
        let h = 1e-2;
        let mut t = Taylor2::zeros(order);
        for d in 0..=order.min(2) {
            for j in 0..=d {
                let i = d - j;
                let val = match (i, j) {
                    (0, 0) => f(u, v),
                    (1, 0) => (f(u + h, v) - f(u - h, v)) / (2.0 * h),
                    (0, 1) => (f(u, v + h) - f(u, v - h)) / (2.0 * h),
                    (2, 0) => (f(u + h, v) - 2.0 * f(u, v) + f(u - h, v)) / (h * h) / 2.0,
                    (0, 2) => (f(u, v + h) - 2.0 * f(u, v) + f(u, v - h)) / (h * h) / 2.0,
                    _ => {
                        (f(u + h, v + h) - f(u + h, v - h) - f(u - h, v + h) + f(u - h, v - h))
                            / (4.0 * h * h)
                    }
                };
                t.set(i, j, val);
            }
        }
        t
    }

    fn close(a: &Taylor2, b: &Taylor2, tol: f64) -> bool {
        let n = a.order().min(b.order());
        (0..=n).all(|d| (0..=d).all(|j| (a.get(d - j, j) - b.get(d - j, j)).abs() <= tol))
    }

    fn sample_poly() -> Poly2 {
        // 1 + 2 du - dv + 0.5 du dv + 0.25 dv^2 + 0.1 du^3
        let mut c = Taylor2::zeros(3);
        c.set(0, 0, 1.0);
        c.set(1, 0, 2.0);
        c.set(0, 1, -1.0);
        c.set(1, 1, 0.5);
        c.set(0, 2, 0.25);
        c.set(3, 0, 0.1);
        Poly2::new((0.2, -0.1), c)
    }

    #[test]
    fn polynomial_shift_matches_value() {
        let p = sample_poly();
        let t = p.taylor(0.5, 0.3, 3);
        assert!((t.value() - p.value(0.5, 0.3)).abs() < 1e-14);
        // Shifting back reproduces the original coefficients.
        let back = Poly2::new((0.5, 0.3), t).taylor(0.2, -0.1, 3);
        assert!(close(&back, p.coeffs(), 1e-13));
    }

    #[test]
    fn exp_ln_roundtrip() {
        let p = sample_poly();
        let t = p.taylor(0.1, 0.0, 5);
        assert!(close(&t.exp().ln_abs(), &t, 1e-12));
        let neg = t.scale(-1.0);
        assert!(close(&neg.ln_abs(), &t.ln_abs(), 1e-12));
    }

    #[test]
    fn pow_and_div_consistent() {
        let p = sample_poly();
        let t = p.taylor(0.3, 0.1, 4);
        let sq = t.pow_abs(0.5);
        assert!(close(&sq.mul(&sq), &t, 1e-12));
        let inv = t.pow_abs(-1.0);
        assert!(close(&Taylor2::constant(4, 1.0).div(&t), &inv, 1e-12));
        assert!(close(&t.mul(&inv), &Taylor2::constant(4, 1.0), 1e-12));
    }

    #[test]
    fn composite_against_differences() {
        let p = Arc::new(Analytic::Poly(sample_poly()));
        let e = Analytic::unary(UnaryOp::Exp, p.clone());
        let ratio = Analytic::binary(BinaryOp::Div, Arc::new(e), p.clone());
        let f = |u: f64, v: f64| {
            let x = sample_poly().value(u, v);
            x.exp() / x
        };
        let exact = ratio.taylor(0.4, 0.2, 2);
        let approx = series_of(f, 0.4, 0.2, 2);
        assert!(close(&exact, &approx, 1e-3 * exact.max_abs()));
        let d = Analytic::Partial { du: 1, dv: 1, inner: Arc::new(ratio) };
        assert!((d.value(0.4, 0.2) - exact.partial(1, 1)).abs() < 1e-12);
    }

    #[test]
    fn closed_form_order() {
        let c = ClosedForm::new(|u, v| u.sin() * v.cos())
            .with_partial(1, 0, |u, v| u.cos() * v.cos())
            .with_partial(0, 1, |u, v| -u.sin() * v.sin());
        assert_eq!(c.max_order(), 1);
        let a = Analytic::Closed(c);
        assert_eq!(a.max_order(), 1);
        assert!((a.partial(0.3, 0.2, 1, 0) - 0.3f64.cos() * 0.2f64.cos()).abs() < 1e-15);
    }
}
