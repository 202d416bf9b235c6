//! Lorentzian linear algebra in signature (3,1) and pseudo-orthonormal frames.
//!
//! The fourth coordinate is timelike: `<a,b> = a1 b1 + a2 b2 + a3 b3 - a4 b4`.

use core::ops::{Add, AddAssign, Mul, Neg, Sub};


pub type Mat4 = [[f64; 4]; 4];

/// A vector of Minkowski 4-space in the standard basis.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct MinkVec(pub [f64; 4]);

impl MinkVec {
    pub const ZERO: MinkVec = MinkVec([0.0; 4]);

    pub const fn new(c1: f64, c2: f64, c3: f64, c4: f64) -> Self {
        MinkVec([c1, c2, c3, c4])
    }

    /// Unit vector `e_{k+1}` (0-based `k`).
    pub fn basis(k: usize) -> Self {
        let mut c = [0.0; 4];
        c[k] = 1.0;
        MinkVec(c)
    }

    pub fn components(&self) -> [f64; 4] {
        self.0
    }

    pub fn dot(&self, other: &MinkVec) -> f64 {
        lorentz_inner(self, other)
    }

    /// `<a,a>`, which may be negative.
    pub fn norm_sq(&self) -> f64 {
        lorentz_inner(self, self)
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.is_finite())
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0, |m, c| m.max(c.abs()))
    }
}

impl Add for MinkVec {
    type Output = MinkVec;
    fn add(self, o: MinkVec) -> MinkVec {
        MinkVec(core::array::from_fn(|k| self.0[k] + o.0[k]))
    }
}

impl AddAssign for MinkVec {
    fn add_assign(&mut self, o: MinkVec) {
        for k in 0..4 {
            self.0[k] += o.0[k];
        }
    }
}

impl Sub for MinkVec {
    type Output = MinkVec;
    fn sub(self, o: MinkVec) -> MinkVec {
        MinkVec(core::array::from_fn(|k| self.0[k] - o.0[k]))
    }
}

impl Neg for MinkVec {
    type Output = MinkVec;
    fn neg(self) -> MinkVec {
        MinkVec(self.0.map(|c| -c))
    }
}

impl Mul<MinkVec> for f64 {
    type Output = MinkVec;
    fn mul(self, v: MinkVec) -> MinkVec {
        MinkVec(v.0.map(|c| self * c))
    }
}

/// Ambient metric of signature (3,1).
#[inline]
pub fn lorentz_inner(a: &MinkVec, b: &MinkVec) -> f64 {
    a.0[0] * b.0[0] + a.0[1] * b.0[1] + a.0[2] * b.0[2] - a.0[3] * b.0[3]
}

/// The vector `n` with `<n, d> = det[a; b; c; d]` for every `d`.
///
/// It is orthogonal to `a`, `b` and `c`, and `det[a; b; c; n] = <n, n>`.
pub fn normal_complement(a: &MinkVec, b: &MinkVec, c: &MinkVec) -> MinkVec {
    // Cofactor expansion of det[a; b; c; e_l] along the last row.
    let m = [a.0, b.0, c.0];
    let minor = |skip: usize| -> f64 {
        let cols: [usize; 3] = match skip {
            0 => [1, 2, 3],
            1 => [0, 2, 3],
            2 => [0, 1, 3],
            _ => [0, 1, 2],
        };
        let e = |r: usize, k: usize| m[r][cols[k]];
        e(0, 0) * (e(1, 1) * e(2, 2) - e(1, 2) * e(2, 1))
            - e(0, 1) * (e(1, 0) * e(2, 2) - e(1, 2) * e(2, 0))
            + e(0, 2) * (e(1, 0) * e(2, 1) - e(1, 1) * e(2, 0))
    };
    // Row 4, column l carries sign (-1)^(4+l) with 1-based l.
    let cof: [f64; 4] = core::array::from_fn(|l| {
        let sign = if (3 + l) % 2 == 0 { 1.0 } else { -1.0 };
        sign * minor(l)
    });
    // Lower the index so that the Lorentz product reproduces the Euclidean contraction.
    MinkVec::new(cof[0], cof[1], cof[2], -cof[3])
}

/// Target Gram matrix of a pseudo-orthonormal frame in row order (x, y, n1, n2).
pub const GRAM_TARGET: Mat4 = [
    [0.0, -1.0, 0.0, 0.0],
    [-1.0, 0.0, 0.0, 0.0],
    [0.0, 0.0, 1.0, 0.0],
    [0.0, 0.0, 0.0, 1.0],
];

/// Frames with a Gram residual below this are accepted as initial data.
pub const FRAME_TOLERANCE: f64 = 1e-8;

/// Moving frame `{x, y, n1, n2}` stored row-wise.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FrameState {
    rows: Mat4,
}

impl FrameState {
    pub fn from_rows(rows: Mat4) -> Self {
        FrameState { rows }
    }

    pub fn from_vectors(x: MinkVec, y: MinkVec, n1: MinkVec, n2: MinkVec) -> Self {
        FrameState {
            rows: [x.0, y.0, n1.0, n2.0],
        }
    }

    pub fn rows(&self) -> &Mat4 {
        &self.rows
    }

    pub fn row(&self, i: usize) -> MinkVec {
        MinkVec(self.rows[i])
    }

    pub fn x(&self) -> MinkVec {
        self.row(0)
    }

    pub fn y(&self) -> MinkVec {
        self.row(1)
    }

    pub fn n1(&self) -> MinkVec {
        self.row(2)
    }

    pub fn n2(&self) -> MinkVec {
        self.row(3)
    }

    /// Matrix of pairwise Lorentz products of the rows.
    pub fn gram(&self) -> Mat4 {
        core::array::from_fn(|i| core::array::from_fn(|j| lorentz_inner(&self.row(i), &self.row(j))))
    }

    pub fn gram_residual(&self) -> f64 {
        gram_residual(self)
    }

    pub fn det(&self) -> f64 {
        det4(&self.rows)
    }

    pub fn max_abs(&self) -> f64 {
        max_abs(&self.rows)
    }

    pub fn is_finite(&self) -> bool {
        self.rows.iter().flatten().all(|c| c.is_finite())
    }
}

/// Largest deviation of the ten distinct frame inner products from their
/// pseudo-orthonormal values.
pub fn gram_residual(frame: &FrameState) -> f64 {
    let g = frame.gram();
    let mut worst: f64 = 0.0;
    for i in 0..4 {
        for j in i..4 {
            worst = worst.max((g[i][j] - GRAM_TARGET[i][j]).abs());
        }
    }
    worst
}

/// `x = (e1 + e4)/sqrt 2`, `y = (-e1 + e4)/sqrt 2`, `n1 = e2`, `n2 = e3`.
pub fn standard_frame() -> FrameState {
    let s = core::f64::consts::FRAC_1_SQRT_2;
    FrameState::from_vectors(
        MinkVec::new(s, 0.0, 0.0, s),
        MinkVec::new(-s, 0.0, 0.0, s),
        MinkVec::basis(1),
        MinkVec::basis(2),
    )
}

pub fn mat_mul(a: &Mat4, b: &Mat4) -> Mat4 {
    core::array::from_fn(|i| {
        core::array::from_fn(|k| (0..4).map(|j| a[i][j] * b[j][k]).sum())
    })
}

pub fn mat_add(a: &Mat4, b: &Mat4) -> Mat4 {
    core::array::from_fn(|i| core::array::from_fn(|k| a[i][k] + b[i][k]))
}

pub fn mat_sub(a: &Mat4, b: &Mat4) -> Mat4 {
    core::array::from_fn(|i| core::array::from_fn(|k| a[i][k] - b[i][k]))
}

pub fn mat_scale(s: f64, a: &Mat4) -> Mat4 {
    core::array::from_fn(|i| core::array::from_fn(|k| s * a[i][k]))
}

pub fn max_abs(a: &Mat4) -> f64 {
    a.iter().flatten().fold(0.0, |m: f64, c| m.max(c.abs()))
}

pub fn det4(m: &Mat4) -> f64 {
    let det3 = |r: [usize; 3], c: [usize; 3]| -> f64 {
        let e = |i: usize, j: usize| m[r[i]][c[j]];
        e(0, 0) * (e(1, 1) * e(2, 2) - e(1, 2) * e(2, 1))
            - e(0, 1) * (e(1, 0) * e(2, 2) - e(1, 2) * e(2, 0))
            + e(0, 2) * (e(1, 0) * e(2, 1) - e(1, 1) * e(2, 0))
    };
    let rest = [1, 2, 3];
    let mut det = 0.0;
    for col in 0..4 {
        let cols: [usize; 3] = match col {
            0 => [1, 2, 3],
            1 => [0, 2, 3],
            2 => [0, 1, 3],
            _ => [0, 1, 2],
        };
        let sign = if col % 2 == 0 { 1.0 } else { -1.0 };
        det += sign * m[0][col] * det3(rest, cols);
    }
    det
}
