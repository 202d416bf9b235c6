//! Reconstruction of a surface from a canonical triple by the moving frame.
//!
//! The frame rows `F = (x, y, n1, n2)` obey `F_u = A F`, `F_v = B F` and the
//! position obeys `z_u = x / sqrt|mu|`, `z_v = y / sqrt|mu|`. The system is
//! integrable exactly when `A_v - B_u + A B - B A = 0`, which is equivalent to
//! the natural system of the triple.

use alloc::vec;
use alloc::vec::Vec;


use crate::analysis::Immersion;
use crate::error::{Error, Result};
use crate::fields::{GridSpec, ScalarField};
use crate::minkowski::{
    gram_residual, mat_add, mat_mul, mat_scale, mat_sub, FrameState, Mat4, MinkVec, FRAME_TOLERANCE,
};
use crate::natural::{residual, CanonicalTriple, Case};
use crate::quadrature::cumulative_simpson;

/// Default bound on the interior natural-system residual accepted by [`reconstruct`].
pub const TOL_BUILD: f64 = 1e-3;

/// RK4 substeps per grid cell.
pub const SUBSTEPS: usize = 2;
/// Frame entries beyond this magnitude abort integration.
pub const STEP_LIMIT: f64 = 1e8;

/// The fields entering `A` and `B`, before the common factor `1/sqrt|mu|`.
#[derive(Clone, Debug)]
pub struct CoefficientMatrices {
    pub gamma1: ScalarField,
    pub gamma2: ScalarField,
    pub lambda: ScalarField,
    pub mu: ScalarField,
    pub nu: ScalarField,
    /// `1/sqrt|mu|`.
    pub scale: ScalarField,
    pub case: Case,
}

fn assemble_a(g1: f64, lam: f64, mu: f64, nu: f64, s: f64) -> Mat4 {
    mat_scale(
        s,
        &[
            [g1, 0.0, lam, mu],
            [0.0, -g1, -nu, 0.0],
            [-nu, lam, 0.0, 0.0],
            [0.0, mu, 0.0, 0.0],
        ],
    )
}

fn assemble_b(g2: f64, lam: f64, mu: f64, nu: f64, s: f64, case: Case) -> Mat4 {
    let b = match case {
        Case::Degenerate => [
            [-g2, 0.0, -nu, 0.0],
            [0.0, g2, 0.0, 0.0],
            [0.0, -nu, 0.0, 0.0],
            [0.0, 0.0, 0.0, 0.0],
        ],
        _ => {
            let e = case.epsilon();
            [
                [-g2, 0.0, -nu, 0.0],
                [0.0, g2, -e * lam, -e * mu],
                [-e * lam, -nu, 0.0, 0.0],
                [-e * mu, 0.0, 0.0, 0.0],
            ]
        }
    };
    mat_scale(s, &b)
}

impl CoefficientMatrices {
    /// `gamma1 = -(sqrt|mu|)_u`, `gamma2 = -(sqrt|mu|)_v`.
    pub fn new(t: &CanonicalTriple) -> Result<Self> {
        // ln_abs enforces the |mu| >= MU_MIN guard.
        t.mu.ln_abs()?;
        let root = t.mu.sqrt_abs();
        Ok(CoefficientMatrices {
            gamma1: -&root.d_du(),
            gamma2: -&root.d_dv(),
            lambda: t.lambda.clone(),
            mu: t.mu.clone(),
            nu: t.nu.clone(),
            scale: root.recip(),
            case: t.case,
        })
    }

    pub fn grid(&self) -> &GridSpec {
        self.mu.grid()
    }

    /// `(A, B)` at node `(i, j)`.
    pub fn at_node(&self, i: usize, j: usize) -> (Mat4, Mat4) {
        let s = self.scale.at(i, j);
        let (lam, mu, nu) = (self.lambda.at(i, j), self.mu.at(i, j), self.nu.at(i, j));
        (
            assemble_a(self.gamma1.at(i, j), lam, mu, nu, s),
            assemble_b(self.gamma2.at(i, j), lam, mu, nu, s, self.case),
        )
    }

    /// `(A, B)` at an arbitrary point, from exact evaluators where attached
    /// and bicubic interpolation otherwise.
    pub fn at_point(&self, u: f64, v: f64) -> Result<(Mat4, Mat4)> {
        let s = self.scale.eval(u, v)?;
        let (lam, mu, nu) = (self.lambda.eval(u, v)?, self.mu.eval(u, v)?, self.nu.eval(u, v)?);
        Ok((
            assemble_a(self.gamma1.eval(u, v)?, lam, mu, nu, s),
            assemble_b(self.gamma2.eval(u, v)?, lam, mu, nu, s, self.case),
        ))
    }

    /// Entry fields of `A` and `B`, carrying evaluators where available.
    fn entry_fields(&self) -> ([[ScalarField; 4]; 4], [[ScalarField; 4]; 4]) {
        let zero = self.scale.scale(0.0);
        let s = &self.scale;
        let sc = |f: &ScalarField, k: f64| (f * s).scale(k);
        let (g1, g2, lam, mu, nu) = (&self.gamma1, &self.gamma2, &self.lambda, &self.mu, &self.nu);
        let z = || zero.clone();
        let a = [
            [sc(g1, 1.0), z(), sc(lam, 1.0), sc(mu, 1.0)],
            [z(), sc(g1, -1.0), sc(nu, -1.0), z()],
            [sc(nu, -1.0), sc(lam, 1.0), z(), z()],
            [z(), sc(mu, 1.0), z(), z()],
        ];
        let b = match self.case {
            Case::Degenerate => [
                [sc(g2, -1.0), z(), sc(nu, -1.0), z()],
                [z(), sc(g2, 1.0), z(), z()],
                [z(), sc(nu, -1.0), z(), z()],
                [z(), z(), z(), z()],
            ],
            case => {
                let e = case.epsilon();
                [
                    [sc(g2, -1.0), z(), sc(nu, -1.0), z()],
                    [z(), sc(g2, 1.0), sc(lam, -e), sc(mu, -e)],
                    [sc(lam, -e), sc(nu, -1.0), z(), z()],
                    [sc(mu, -e), z(), z(), z()],
                ]
            }
        };
        (a, b)
    }
}

/// Assembles the coefficient matrices of `t`.
pub fn coefficient_matrices(t: &CanonicalTriple) -> Result<CoefficientMatrices> {
    CoefficientMatrices::new(t)
}

/// Per-node max-norm of `A_v - B_u + A B - B A`.
pub fn compatibility_residual(t: &CanonicalTriple) -> Result<ScalarField> {
    let c = CoefficientMatrices::new(t)?;
    let (a, b) = c.entry_fields();
    let av: Vec<Vec<ScalarField>> = a.iter().map(|r| r.iter().map(|f| f.d_dv()).collect()).collect();
    let bu: Vec<Vec<ScalarField>> = b.iter().map(|r| r.iter().map(|f| f.d_du()).collect()).collect();
    let g = *c.grid();
    let mut out = vec![0.0; g.len()];
    for (k, o) in out.iter_mut().enumerate() {
        let am: Mat4 = core::array::from_fn(|i| core::array::from_fn(|j| a[i][j].values()[k]));
        let bm: Mat4 = core::array::from_fn(|i| core::array::from_fn(|j| b[i][j].values()[k]));
        let comm = mat_sub(&mat_mul(&am, &bm), &mat_mul(&bm, &am));
        let mut m = 0.0f64;
        for i in 0..4 {
            for j in 0..4 {
                m = m.max((av[i][j].values()[k] - bu[i][j].values()[k] + comm[i][j]).abs());
            }
        }
        *o = m;
    }
    ScalarField::from_values(g, out)
}

/// Frame on every grid node, row-major with `v` fastest.
#[derive(Clone, Debug)]
pub struct FrameField {
    pub grid: GridSpec,
    pub frames: Vec<FrameState>,
}

impl FrameField {
    pub fn at(&self, i: usize, j: usize) -> &FrameState {
        &self.frames[self.grid.index(i, j)]
    }

    /// Largest Gram residual over all nodes.
    pub fn gram_drift(&self) -> f64 {
        self.frames.iter().fold(0.0, |m, f| m.max(gram_residual(f)))
    }

    /// Largest entrywise difference against another frame field.
    pub fn max_difference(&self, other: &FrameField) -> f64 {
        let mut m = 0.0f64;
        for (a, b) in self.frames.iter().zip(&other.frames) {
            for i in 0..4 {
                for j in 0..4 {
                    m = m.max((a.rows()[i][j] - b.rows()[i][j]).abs());
                }
            }
        }
        m
    }
}

/// Integration diagnostics.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Diagnostics {
    pub gram_drift: f64,
    pub path_discrepancy: f64,
    pub position_discrepancy: f64,
    pub compat_max: f64,
    pub residual_max: f64,
}

fn rk4_step(f: &Mat4, h: f64, m0: &Mat4, mh: &Mat4, m1: &Mat4) -> Mat4 {
    let k1 = mat_mul(m0, f);
    let k2 = mat_mul(mh, &mat_add(f, &mat_scale(0.5 * h, &k1)));
    let k3 = mat_mul(mh, &mat_add(f, &mat_scale(0.5 * h, &k2)));
    let k4 = mat_mul(m1, &mat_add(f, &mat_scale(h, &k3)));
    let incr = mat_add(&mat_add(&k1, &k4), &mat_scale(2.0, &mat_add(&k2, &k3)));
    mat_add(f, &mat_scale(h / 6.0, &incr))
}

fn check_step(f: &Mat4, u: f64, v: f64) -> Result<()> {
    if f.iter().flatten().all(|x| x.is_finite() && x.abs() <= STEP_LIMIT) {
        Ok(())
    } else {
        Err(Error::StepUnstable { u, v })
    }
}

/// Integrates `F_u = A F` along the line `v = v_j` (or `F_v = B F` along
/// `u = u_i`), writing into `frames`.
fn integrate_line(
    c: &CoefficientMatrices,
    frames: &mut [Mat4],
    along_u: bool,
    fixed: usize,
    start: Mat4,
) -> Result<()> {
    let g = *c.grid();
    let (n, h) = if along_u { (g.nu, g.hu()) } else { (g.nv, g.hv()) };
    let node = |k: usize| if along_u { (k, fixed) } else { (fixed, k) };
    let pick = |ab: (Mat4, Mat4)| if along_u { ab.0 } else { ab.1 };
    let mut f = start;
    let (i0, j0) = node(0);
    frames[g.index(i0, j0)] = f;
    let mut m0 = pick(c.at_node(i0, j0));
    let hs = h / SUBSTEPS as f64;
    for k in 0..n - 1 {
        let (i1, j1) = node(k + 1);
        let at = |t: f64| {
            if along_u {
                (g.u(k) + t, g.v(fixed))
            } else {
                (g.u(fixed), g.v(k) + t)
            }
        };
        let mut ma = m0;
        for s in 0..SUBSTEPS {
            let t0 = s as f64 * hs;
            let (uh, vh) = at(t0 + 0.5 * hs);
            let mh = pick(c.at_point(uh, vh)?);
            let mb = if s + 1 == SUBSTEPS {
                pick(c.at_node(i1, j1))
            } else {
                let (ub, vb) = at(t0 + hs);
                pick(c.at_point(ub, vb)?)
            };
            f = rk4_step(&f, hs, &ma, &mh, &mb);
            ma = mb;
        }
        check_step(&f, g.u(i1), g.v(j1))?;
        frames[g.index(i1, j1)] = f;
        m0 = ma;
    }
    Ok(())
}

fn integrate_path(c: &CoefficientMatrices, f0: &Mat4, bottom_first: bool) -> Result<Vec<Mat4>> {
    let g = *c.grid();
    let mut frames = vec![[[0.0; 4]; 4]; g.len()];
    if bottom_first {
        integrate_line(c, &mut frames, true, 0, *f0)?;
        for i in 0..g.nu {
            let start = frames[g.index(i, 0)];
            integrate_line(c, &mut frames, false, i, start)?;
        }
    } else {
        integrate_line(c, &mut frames, false, 0, *f0)?;
        for j in 0..g.nv {
            let start = frames[g.index(0, j)];
            integrate_line(c, &mut frames, true, j, start)?;
        }
    }
    Ok(frames)
}

/// Integrates the frame system from `f0` at `(u0, v0)`: RK4 along the bottom
/// edge, then up each column. Returns the frame field and
/// `(gram_drift, path_discrepancy)`, the latter against the left-edge-first
/// order.
pub fn integrate_frame(c: &CoefficientMatrices, f0: &FrameState) -> Result<(FrameField, f64, f64)> {
    let residual = f0.gram_residual();
    if !f0.is_finite() || residual > FRAME_TOLERANCE {
        return Err(Error::InvalidFrame { residual });
    }
    let grid = *c.grid();
    let primary = integrate_path(c, f0.rows(), true)?;
    let alternate = integrate_path(c, f0.rows(), false)?;
    let field = FrameField { grid, frames: primary.into_iter().map(FrameState::from_rows).collect() };
    let other = FrameField { grid, frames: alternate.into_iter().map(FrameState::from_rows).collect() };
    let drift = field.gram_drift();
    let discrepancy = field.max_difference(&other);
    Ok((field, drift, discrepancy))
}

fn position_path(frames: &FrameField, scale: &ScalarField, p0: MinkVec, bottom_first: bool) -> Vec<MinkVec> {
    let g = frames.grid;
    let mut z = vec![MinkVec::ZERO; g.len()];
    // Integrand component c of s * row r along a line.
    let line = |r: usize, nodes: &[(usize, usize)], h: f64, start: MinkVec, out: &mut Vec<MinkVec>| {
        let mut cols = [vec![], vec![], vec![], vec![]];
        for &(i, j) in nodes {
            let w = frames.at(i, j).rows()[r];
            let s = scale.at(i, j);
            for c in 0..4 {
                cols[c].push(s * w[c]);
            }
        }
        let ints: Vec<Vec<f64>> = cols.iter().map(|f| cumulative_simpson(f, h)).collect();
        out.clear();
        for k in 0..nodes.len() {
            out.push(start + MinkVec(core::array::from_fn(|c| ints[c][k])));
        }
    };
    let mut buf = Vec::new();
    let row_nodes = |j: usize| (0..g.nu).map(|i| (i, j)).collect::<Vec<_>>();
    let col_nodes = |i: usize| (0..g.nv).map(|j| (i, j)).collect::<Vec<_>>();
    if bottom_first {
        line(0, &row_nodes(0), g.hu(), p0, &mut buf);
        for i in 0..g.nu {
            z[g.index(i, 0)] = buf[i];
        }
        for i in 0..g.nu {
            line(1, &col_nodes(i), g.hv(), z[g.index(i, 0)], &mut buf);
            for j in 0..g.nv {
                z[g.index(i, j)] = buf[j];
            }
        }
    } else {
        line(1, &col_nodes(0), g.hv(), p0, &mut buf);
        for j in 0..g.nv {
            z[g.index(0, j)] = buf[j];
        }
        for j in 0..g.nv {
            line(0, &row_nodes(j), g.hu(), z[g.index(0, j)], &mut buf);
            for i in 0..g.nu {
                z[g.index(i, j)] = buf[i];
            }
        }
    }
    z[0] = p0;
    z
}

/// Integrates `z_u = x / sqrt|mu|`, `z_v = y / sqrt|mu|` by cumulative
/// Simpson quadrature along the bottom edge and then the columns, with
/// `z(u0, v0) = p0`. Returns the immersion and the largest difference
/// against the left-edge-first order.
pub fn integrate_position(frames: &FrameField, mu: &ScalarField, p0: MinkVec) -> Result<(Immersion, f64)> {
    if mu.grid() != &frames.grid {
        return Err(Error::InvalidInput("frame field and mu on different grids"));
    }
    mu.ln_abs()?;
    let scale = mu.pow_abs(-0.5);
    let a = position_path(frames, &scale, p0, true);
    let b = position_path(frames, &scale, p0, false);
    let discrepancy = a
        .iter()
        .zip(&b)
        .fold(0.0f64, |m, (p, q)| m.max((*p - *q).max_abs()));
    Ok((Immersion::new(frames.grid, a)?, discrepancy))
}

/// Options of [`reconstruct`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReconstructOptions {
    pub tol_build: f64,
    /// Integrate even if the residual exceeds `tol_build`.
    pub force: bool,
}

impl Default for ReconstructOptions {
    fn default() -> Self {
        ReconstructOptions { tol_build: TOL_BUILD, force: false }
    }
}

/// Surface, frame and diagnostics built from a triple.
#[derive(Clone, Debug)]
pub struct ReconstructionBundle {
    pub frames: FrameField,
    pub immersion: Immersion,
    pub diagnostics: Diagnostics,
}

/// Builds the surface of `t` through `p0` with initial frame `f0`.
///
/// Refuses with [`Error::ResidualTooLarge`] when the interior residual
/// exceeds `opts.tol_build`, unless `opts.force`.
pub fn reconstruct(
    t: &CanonicalTriple,
    p0: MinkVec,
    f0: &FrameState,
    opts: ReconstructOptions,
) -> Result<ReconstructionBundle> {
    let res = residual(t)?;
    if !opts.force && !(res.interior_max_abs <= opts.tol_build) {
        return Err(Error::ResidualTooLarge { measured: res.interior_max_abs, tol: opts.tol_build });
    }
    let c = CoefficientMatrices::new(t)?;
    let compat = compatibility_residual(t)?;
    let (frames, gram_drift, path_discrepancy) = integrate_frame(&c, f0)?;
    let (immersion, position_discrepancy) = integrate_position(&frames, &t.mu, p0)?;
    Ok(ReconstructionBundle {
        frames,
        immersion,
        diagnostics: Diagnostics {
            gram_drift,
            path_discrepancy,
            position_discrepancy,
            compat_max: compat.max_abs(),
            residual_max: res.interior_max_abs,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::minkowski::{max_abs, standard_frame};

    fn constant(nu: f64, case: Case, n: usize) -> CanonicalTriple {
        CanonicalTriple::constant(GridSpec::square(1.0, n).unwrap(), 0.0, 1.0, nu, case).unwrap()
    }

    #[test]
    fn constant_matrices() {
        let c = CoefficientMatrices::new(&constant(2.0, Case::NegativeKH, 5)).unwrap();
        let (a, b) = c.at_node(2, 3);
        assert_eq!(a, [[0.0, 0.0, 0.0, 1.0], [0.0, 0.0, -2.0, 0.0], [-2.0, 0.0, 0.0, 0.0], [0.0, 1.0, 0.0, 0.0]]);
        assert_eq!(b, [[0.0, 0.0, -2.0, 0.0], [0.0, 0.0, 0.0, 1.0], [0.0, -2.0, 0.0, 0.0], [1.0, 0.0, 0.0, 0.0]]);
        let c = CoefficientMatrices::new(&constant(2.0, Case::PositiveKH, 5)).unwrap();
        let (_, b) = c.at_node(0, 0);
        assert_eq!(b[1], [0.0, 0.0, 0.0, -1.0]);
        assert_eq!(b[2], [0.0, -2.0, 0.0, 0.0]);
        assert_eq!(b[3], [-1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn compatibility_of_constants() {
        assert!(compatibility_residual(&constant(1.0, Case::NegativeKH, 9)).unwrap().max_abs() <= 1e-12);
        let m = compatibility_residual(&constant(2.0, Case::NegativeKH, 9)).unwrap();
        assert!(m.values().iter().all(|&x| (x - 3.0).abs() < 1e-12));
    }

    #[test]
    fn refuses_non_solution() {
        let g = GridSpec::square(1.0, 9).unwrap();
        let t = CanonicalTriple::new(
            ScalarField::constant(g, 1.0).unwrap(),
            ScalarField::constant(g, core::f64::consts::E).unwrap(),
            ScalarField::from_fn(g, |u, _| u).unwrap(),
            Case::PositiveKH,
        )
        .unwrap();
        let err = reconstruct(&t, MinkVec::ZERO, &standard_frame(), ReconstructOptions::default()).unwrap_err();
        assert!(matches!(err, Error::ResidualTooLarge { .. }));
        let forced = ReconstructOptions { force: true, ..Default::default() };
        assert!(reconstruct(&t, MinkVec::ZERO, &standard_frame(), forced).is_ok());
    }

    #[test]
    fn rejects_bad_initial_frame() {
        let c = CoefficientMatrices::new(&constant(1.0, Case::NegativeKH, 9)).unwrap();
        let mut rows = *standard_frame().rows();
        rows[2][1] = 2.0;
        let err = integrate_frame(&c, &FrameState::from_rows(rows)).unwrap_err();
        assert!(matches!(err, Error::InvalidFrame { .. }));
    }

    #[test]
    fn constant_fixture_basics() {
        let t = constant(1.0, Case::NegativeKH, 65);
        let p0 = MinkVec::new(0.5, -1.0, 2.0, 0.25);
        let b = reconstruct(&t, p0, &standard_frame(), ReconstructOptions::default()).unwrap();
        assert_eq!(b.immersion.point(0, 0), p0);
        assert!(b.diagnostics.gram_drift <= 1e-10);
        assert!(b.diagnostics.path_discrepancy <= 1e-10);
        assert!(max_abs(b.frames.at(64, 64).rows()).is_finite());
    }
}
