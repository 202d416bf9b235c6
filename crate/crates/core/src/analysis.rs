//! Frame functions and invariants of a sampled immersion in isotropic
//! parameters.
//!
//! For `z(u, v)` with `<z_u, z_u> = <z_v, z_v> = 0`, `<z_u, z_v> = -f^2`:
//! `x = z_u / f`, `y = z_v / f`, `H = -(z_uv)^normal / f^2`, `nu = |H|`,
//! `n1 = H / nu` and `n2` completes a positively oriented frame. With
//! `c_ij^k = <z_ij, n_k>`:
//!
//! ```text
//! lambda1 = c_11^1 / f^2   mu1 = c_11^2 / f^2
//! lambda2 = c_22^1 / f^2   mu2 = c_22^2 / f^2
//! beta1 = <(n1)_u, n2> / f   beta2 = <(n1)_v, n2> / f
//! gamma1 = (ln f)_u / f      gamma2 = (ln f)_v / f
//! ```

use alloc::vec;
use alloc::vec::Vec;

// Unused when std is linked and its inherent float methods win.
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::fields::{GridSpec, ScalarField};
use crate::frame::FrameField;
use crate::minkowski::{lorentz_inner, normal_complement, FrameState, MinkVec};
use crate::natural::{classify_from_frame, Case};

/// Default bound on `max(|E|, |G|) / max|F|` for isotropic parameters.
///
/// Second-order differences leave `|E| ~ (h^2/3) f^4 (lambda1^2 + mu1^2)`
/// on exactly isotropic surfaces, so the bound must sit above that floor.
pub const ISOTROPY_TOL: f64 = 1e-2;

/// Sampled surface `z(u, v)` in Minkowski 4-space.
#[derive(Clone, Debug, PartialEq)]
pub struct Immersion {
    grid: GridSpec,
    points: Vec<MinkVec>,
}

impl Immersion {
    pub fn new(grid: GridSpec, points: Vec<MinkVec>) -> Result<Self> {
        grid.validate()?;
        if points.len() != grid.len() {
            return Err(Error::ShapeMismatch { expected: grid.len(), found: points.len() });
        }
        if points.iter().any(|p| !p.is_finite()) {
            return Err(Error::NonFinite("immersion points"));
        }
        Ok(Immersion { grid, points })
    }

    pub fn from_fn(grid: GridSpec, z: impl Fn(f64, f64) -> MinkVec) -> Result<Self> {
        let mut points = Vec::with_capacity(grid.len());
        for i in 0..grid.nu {
            for j in 0..grid.nv {
                points.push(z(grid.u(i), grid.v(j)));
            }
        }
        Self::new(grid, points)
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn points(&self) -> &[MinkVec] {
        &self.points
    }

    pub fn point(&self, i: usize, j: usize) -> MinkVec {
        self.points[self.grid.index(i, j)]
    }

    /// Coordinate `k` (0-based) as a scalar field.
    pub fn component(&self, k: usize) -> ScalarField {
        let values = self.points.iter().map(|p| p.0[k]).collect();
        ScalarField::from_values(self.grid, values).expect("finite samples on a valid grid")
    }

    /// Bicubic samples at the tensor product of `us` and `vs`, placed on `grid`.
    pub fn sample_onto(&self, us: &[f64], vs: &[f64], grid: GridSpec) -> Result<Immersion> {
        if us.len() != grid.nu || vs.len() != grid.nv {
            return Err(Error::ShapeMismatch { expected: grid.len(), found: us.len() * vs.len() });
        }
        let comps: Vec<Vec<f64>> = (0..4)
            .map(|k| self.component(k).sample_nodes(us, vs))
            .collect::<Result<_>>()?;
        let points = (0..grid.len())
            .map(|n| MinkVec(core::array::from_fn(|k| comps[k][n])))
            .collect();
        Immersion::new(grid, points)
    }

    /// Bicubic resampling onto the nodes of `target`.
    pub fn resample(&self, target: &GridSpec) -> Result<Immersion> {
        self.sample_onto(&target.us(), &target.vs(), *target)
    }

    /// The same point set described on rescaled parameters
    /// `(a u + b, c v + d)`.
    pub fn reparametrize_affine(&self, a: f64, b: f64, c: f64, d: f64) -> Result<Immersion> {
        let g = self.grid;
        let (u0, u1) = ordered(a * g.u0 + b, a * g.u1 + b);
        let (v0, v1) = ordered(c * g.v0 + d, c * g.v1 + d);
        if a <= 0.0 || c <= 0.0 {
            return Err(Error::InvalidInput("affine reparametrization must preserve orientation"));
        }
        Immersion::new(GridSpec::new(u0, u1, v0, v1, g.nu, g.nv)?, self.points.clone())
    }
}

fn ordered(a: f64, b: f64) -> (f64, f64) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Finite-difference partials of an immersion, per node.
#[derive(Clone, Debug)]
struct Partials {
    zu: Vec<MinkVec>,
    zv: Vec<MinkVec>,
    zuu: Vec<MinkVec>,
    zuv: Vec<MinkVec>,
    zvv: Vec<MinkVec>,
}

fn gather(fields: [ScalarField; 4]) -> Vec<MinkVec> {
    let n = fields[0].values().len();
    (0..n)
        .map(|k| MinkVec(core::array::from_fn(|c| fields[c].values()[k])))
        .collect()
}

fn vector_partial(v: &[MinkVec], grid: GridSpec, along_u: bool) -> Vec<MinkVec> {
    gather(core::array::from_fn(|c| {
        let s = ScalarField::from_values(grid, v.iter().map(|p| p.0[c]).collect())
            .expect("finite samples on a valid grid");
        if along_u {
            s.d_du()
        } else {
            s.d_dv()
        }
    }))
}

fn partials(m: &Immersion) -> Partials {
    let comps: [ScalarField; 4] = core::array::from_fn(|k| m.component(k));
    Partials {
        zu: gather(core::array::from_fn(|k| comps[k].d_du())),
        zv: gather(core::array::from_fn(|k| comps[k].d_dv())),
        zuu: gather(core::array::from_fn(|k| comps[k].d_du2())),
        zuv: gather(core::array::from_fn(|k| comps[k].d_dudv())),
        zvv: gather(core::array::from_fn(|k| comps[k].d_dv2())),
    }
}

/// Coefficients of the first fundamental form.
#[derive(Clone, Debug)]
pub struct FirstFundamentalForm {
    pub e: ScalarField,
    pub f: ScalarField,
    pub g: ScalarField,
    /// `sqrt|EG - F^2|`.
    pub w: ScalarField,
    pub is_timelike: bool,
    pub is_isotropic: bool,
    /// `max(|E|, |G|) / max|F|`.
    pub isotropy_ratio: f64,
}

fn fff_from(grid: GridSpec, p: &Partials, isotropy_tol: f64) -> Result<FirstFundamentalForm> {
    let e: Vec<f64> = p.zu.iter().map(|a| a.norm_sq()).collect();
    let g: Vec<f64> = p.zv.iter().map(|a| a.norm_sq()).collect();
    let f: Vec<f64> = p.zu.iter().zip(&p.zv).map(|(a, b)| lorentz_inner(a, b)).collect();
    let det: Vec<f64> = (0..e.len()).map(|k| e[k] * g[k] - f[k] * f[k]).collect();
    let scale = (0..e.len()).fold(0.0f64, |m, k| m.max(e[k].abs()).max(g[k].abs()).max(f[k].abs()));
    if det.iter().any(|d| d.abs() < 1e-14 * scale * scale) || scale == 0.0 {
        return Err(Error::DegenerateMetric);
    }
    let is_timelike = det.iter().all(|&d| d < 0.0);
    let max_f = f.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let max_eg = e.iter().chain(&g).fold(0.0f64, |m, x| m.max(x.abs()));
    let isotropy_ratio = max_eg / max_f;
    let w = det.iter().map(|d| d.abs().sqrt()).collect();
    Ok(FirstFundamentalForm {
        e: ScalarField::from_values(grid, e)?,
        f: ScalarField::from_values(grid, f)?,
        g: ScalarField::from_values(grid, g)?,
        w: ScalarField::from_values(grid, w)?,
        is_timelike,
        is_isotropic: isotropy_ratio <= isotropy_tol,
        isotropy_ratio,
    })
}

/// First fundamental form from finite-difference tangents; `is_isotropic`
/// uses [`ISOTROPY_TOL`].
pub fn first_fundamental_form(m: &Immersion) -> Result<FirstFundamentalForm> {
    fff_from(m.grid, &partials(m), ISOTROPY_TOL)
}

/// Tangential projection `-<w, y> x - <w, x> y` in a pseudo-orthonormal frame.
fn tangential(w: &MinkVec, x: &MinkVec, y: &MinkVec) -> MinkVec {
    -lorentz_inner(w, y) * *x - lorentz_inner(w, x) * *y
}

/// Adapted frame of an isotropic immersion.
#[derive(Clone, Debug)]
pub struct GeometricFrame {
    pub frames: FrameField,
    /// `f = sqrt(-F)`.
    pub f: ScalarField,
    pub nu: ScalarField,
}

/// Analysis thresholds.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AnalysisOptions {
    pub isotropy_tol: f64,
    /// Bound on `|beta_i|` for parallel `n1`; default `1e-4 (1 + sigma scale)`.
    pub tol_beta: Option<f64>,
    /// Bound on `max nu - min nu` for constant `nu`; default `1e-4 (1 + max|nu|)`.
    pub tol_nu_variation: Option<f64>,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        AnalysisOptions { isotropy_tol: ISOTROPY_TOL, tol_beta: None, tol_nu_variation: None }
    }
}

fn geometric_frame_from(
    m: &Immersion,
    p: &Partials,
    fff: &FirstFundamentalForm,
) -> Result<GeometricFrame> {
    if !fff.is_timelike {
        return Err(Error::NotTimelike);
    }
    let grid = m.grid;
    let f: Vec<f64> = fff.f.values().iter().map(|&x| (-x).sqrt()).collect();
    let mut frames = Vec::with_capacity(grid.len());
    let mut nu = Vec::with_capacity(grid.len());
    for k in 0..grid.len() {
        let x = (1.0 / f[k]) * p.zu[k];
        let y = (1.0 / f[k]) * p.zv[k];
        let w = p.zuv[k];
        let normal = w - tangential(&w, &x, &y);
        let h = (-1.0 / (f[k] * f[k])) * normal;
        let nrm = h.norm_sq().max(0.0).sqrt();
        nu.push(nrm);
        let n1 = if nrm > 0.0 { (1.0 / nrm) * h } else { MinkVec::ZERO };
        let c = normal_complement(&x, &y, &n1);
        let cn = c.norm_sq();
        let n2 = if cn > 0.0 { (1.0 / cn.sqrt()) * c } else { MinkVec::ZERO };
        frames.push(FrameState::from_vectors(x, y, n1, n2));
    }
    let nu_max = nu.iter().fold(0.0f64, |a, &b| a.max(b));
    let nu_min = nu.iter().fold(f64::INFINITY, |a, &b| a.min(b));
    if nu_min < 1e-8 * nu_max.max(1.0) {
        return Err(Error::MinimalOrTotallyGeodesic { nu_min });
    }
    Ok(GeometricFrame {
        frames: FrameField { grid, frames },
        f: ScalarField::from_values(grid, f)?,
        nu: ScalarField::from_values(grid, nu)?,
    })
}

/// Adapted frame `(x, y, n1, n2)`, `f` and `nu` of an isotropic immersion.
pub fn geometric_frame(m: &Immersion) -> Result<GeometricFrame> {
    analyze(m, &AnalysisOptions::default()).map(|a| a.frame)
}

/// Geometric functions of the adapted frame.
#[derive(Clone, Debug)]
pub struct FrameFunctions {
    pub gamma1: ScalarField,
    pub gamma2: ScalarField,
    pub lambda1: ScalarField,
    pub mu1: ScalarField,
    pub lambda2: ScalarField,
    pub mu2: ScalarField,
    pub nu: ScalarField,
    pub beta1: ScalarField,
    pub beta2: ScalarField,
    pub f: ScalarField,
}

impl FrameFunctions {
    /// Largest `|lambda_i|`, `|mu_i|`, `nu` over the grid.
    pub fn sigma_scale(&self) -> f64 {
        [&self.lambda1, &self.mu1, &self.lambda2, &self.mu2, &self.nu]
            .iter()
            .fold(0.0f64, |m, s| m.max(s.max_abs()))
    }

    pub fn beta_max(&self) -> f64 {
        self.beta1.max_abs().max(self.beta2.max_abs())
    }

    pub fn beta_interior_max(&self) -> f64 {
        self.beta1.interior_max_abs().max(self.beta2.interior_max_abs())
    }
}

/// Per-node surface type.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SurfaceClass {
    TotallyGeodesic,
    Minimal,
    ParallelH,
    Pnmc,
    Generic,
}

impl SurfaceClass {
    pub fn name(self) -> &'static str {
        match self {
            SurfaceClass::TotallyGeodesic => "TotallyGeodesic",
            SurfaceClass::Minimal => "Minimal",
            SurfaceClass::ParallelH => "ParallelH",
            SurfaceClass::Pnmc => "PNMC",
            SurfaceClass::Generic => "Generic",
        }
    }
}

/// Curvatures, inflection determinants and classification.
#[derive(Clone, Debug)]
pub struct InvariantReport {
    /// `(2/f^2)(ln f)_uv`.
    pub k_metric: ScalarField,
    /// `nu^2 - lambda1 lambda2 - mu1 mu2`.
    pub k_frame: ScalarField,
    pub h2: ScalarField,
    pub kmh2_direct: ScalarField,
    /// `-(mu2/mu1)(lambda1^2 + mu1^2)` (roles exchanged where `mu1 = 0`);
    /// zero where both `mu_i` vanish, see `formula_defined`.
    pub kmh2_formula: ScalarField,
    pub formula_defined: Vec<bool>,
    pub delta1: ScalarField,
    pub delta2: ScalarField,
    pub delta3: ScalarField,
    pub classification: Vec<SurfaceClass>,
    /// Majority class over the interior nodes.
    pub overall: SurfaceClass,
    pub tol_beta: f64,
    pub tol_nu_variation: f64,
    pub nu_variation: f64,
}

/// Full analysis of an isotropic immersion.
#[derive(Clone, Debug)]
pub struct SurfaceAnalysis {
    pub fff: FirstFundamentalForm,
    pub frame: GeometricFrame,
    pub functions: FrameFunctions,
    pub invariants: InvariantReport,
    /// `c_ij^k` as `[c11^1, c12^1, c22^1, c11^2, c12^2, c22^2]` per node.
    pub second_form: Vec<[f64; 6]>,
}

impl SurfaceAnalysis {
    /// Case of `K - H^2` at node `(i, j)`.
    pub fn case_at(&self, i: usize, j: usize) -> Result<(Case, f64)> {
        let ff = &self.functions;
        classify_from_frame(ff.lambda1.at(i, j), ff.mu1.at(i, j), ff.lambda2.at(i, j), ff.mu2.at(i, j))
    }
}

/// Runs every analysis step.
pub fn analyze(m: &Immersion, opts: &AnalysisOptions) -> Result<SurfaceAnalysis> {
    let grid = m.grid;
    let p = partials(m);
    let fff = fff_from(grid, &p, opts.isotropy_tol)?;
    if !fff.is_timelike {
        return Err(Error::NotTimelike);
    }
    if !fff.is_isotropic {
        return Err(Error::NotIsotropic { ratio: fff.isotropy_ratio, tol: opts.isotropy_tol });
    }
    let frame = geometric_frame_from(m, &p, &fff)?;
    let n = grid.len();
    let f = &frame.f;

    let mut c = Vec::with_capacity(n);
    for k in 0..n {
        let fr = &frame.frames.frames[k];
        let (n1, n2) = (fr.n1(), fr.n2());
        c.push([
            lorentz_inner(&p.zuu[k], &n1),
            lorentz_inner(&p.zuv[k], &n1),
            lorentz_inner(&p.zvv[k], &n1),
            lorentz_inner(&p.zuu[k], &n2),
            lorentz_inner(&p.zuv[k], &n2),
            lorentz_inner(&p.zvv[k], &n2),
        ]);
    }
    let field = |vals: Vec<f64>| ScalarField::from_values(grid, vals);
    let f2: Vec<f64> = f.values().iter().map(|x| x * x).collect();
    let over_f2 = |idx: usize| field((0..n).map(|k| c[k][idx] / f2[k]).collect());

    let n1s: Vec<MinkVec> = frame.frames.frames.iter().map(|fr| fr.n1()).collect();
    let n1u = vector_partial(&n1s, grid, true);
    let n1v = vector_partial(&n1s, grid, false);
    let fv = f.values();
    let beta1 = field((0..n).map(|k| lorentz_inner(&n1u[k], &frame.frames.frames[k].n2()) / fv[k]).collect())?;
    let beta2 = field((0..n).map(|k| lorentz_inner(&n1v[k], &frame.frames.frames[k].n2()) / fv[k]).collect())?;
    let lnf = f.ln_abs()?;
    let functions = FrameFunctions {
        gamma1: &lnf.d_du() / f,
        gamma2: &lnf.d_dv() / f,
        lambda1: over_f2(0)?,
        mu1: over_f2(3)?,
        lambda2: over_f2(2)?,
        mu2: over_f2(5)?,
        nu: frame.nu.clone(),
        beta1,
        beta2,
        f: f.clone(),
    };
    let invariants = invariants_from(grid, &functions, &lnf, &c, opts)?;
    Ok(SurfaceAnalysis { fff, frame, functions, invariants, second_form: c })
}

fn invariants_from(
    grid: GridSpec,
    ff: &FrameFunctions,
    lnf: &ScalarField,
    c: &[[f64; 6]],
    opts: &AnalysisOptions,
) -> Result<InvariantReport> {
    let n = grid.len();
    let f2 = &ff.f * &ff.f;
    let k_metric = &lnf.d_dudv().scale(2.0) / &f2;
    let h2 = &ff.nu * &ff.nu;
    let k_frame = &(&h2 - &(&ff.lambda1 * &ff.lambda2)) - &(&ff.mu1 * &ff.mu2);
    let kmh2_direct = &k_frame - &h2;

    let sigma = ff.sigma_scale();
    let zero_tol = 1e-8 * sigma.max(1.0);
    let mut formula = vec![0.0; n];
    let mut defined = vec![false; n];
    for k in 0..n {
        let (l1, m1, l2, m2) = (
            ff.lambda1.values()[k],
            ff.mu1.values()[k],
            ff.lambda2.values()[k],
            ff.mu2.values()[k],
        );
        let (l, a, b) = if m1.abs() > zero_tol {
            (l1, m1, m2)
        } else if m2.abs() > zero_tol {
            (l2, m2, m1)
        } else {
            continue;
        };
        formula[k] = -(b / a) * (l * l + a * a);
        defined[k] = true;
    }
    let det = |k: usize, (a, b, p, q): (usize, usize, usize, usize)| c[k][a] * c[k][b] - c[k][p] * c[k][q];
    // Delta1 = c11^1 c12^2 - c12^1 c11^2, Delta2 = c11^1 c22^2 - c22^1 c11^2,
    // Delta3 = c12^1 c22^2 - c22^1 c12^2.
    let delta1 = ScalarField::from_values(grid, (0..n).map(|k| det(k, (0, 4, 1, 3))).collect())?;
    let delta2 = ScalarField::from_values(grid, (0..n).map(|k| det(k, (0, 5, 2, 3))).collect())?;
    let delta3 = ScalarField::from_values(grid, (0..n).map(|k| det(k, (1, 5, 2, 4))).collect())?;

    let tol_beta = opts.tol_beta.unwrap_or(1e-4 * (1.0 + sigma));
    let tol_nu_variation = opts.tol_nu_variation.unwrap_or(1e-4 * (1.0 + ff.nu.max_abs()));
    let nu_variation = ff.nu.max() - ff.nu.min();
    let f2v = f2.values();
    let classification: Vec<SurfaceClass> = (0..n)
        .map(|k| {
            let geodesic = c[k].iter().all(|x| x.abs() / f2v[k] <= zero_tol);
            if geodesic {
                SurfaceClass::TotallyGeodesic
            } else if ff.nu.values()[k] <= zero_tol {
                SurfaceClass::Minimal
            } else if ff.beta1.values()[k].abs().max(ff.beta2.values()[k].abs()) <= tol_beta {
                if nu_variation <= tol_nu_variation {
                    SurfaceClass::ParallelH
                } else {
                    SurfaceClass::Pnmc
                }
            } else {
                SurfaceClass::Generic
            }
        })
        .collect();
    let overall = majority(grid, &classification);
    Ok(InvariantReport {
        k_metric,
        k_frame,
        h2,
        kmh2_direct,
        kmh2_formula: ScalarField::from_values(grid, formula)?,
        formula_defined: defined,
        delta1,
        delta2,
        delta3,
        classification,
        overall,
        tol_beta,
        tol_nu_variation,
        nu_variation,
    })
}

fn majority(grid: GridSpec, classes: &[SurfaceClass]) -> SurfaceClass {
    let all = [
        SurfaceClass::TotallyGeodesic,
        SurfaceClass::Minimal,
        SurfaceClass::ParallelH,
        SurfaceClass::Pnmc,
        SurfaceClass::Generic,
    ];
    let mut counts = [0usize; 5];
    for i in 0..grid.nu {
        for j in 0..grid.nv {
            if grid.is_interior(i, j) {
                let c = classes[grid.index(i, j)];
                counts[all.iter().position(|&a| a == c).unwrap_or(4)] += 1;
            }
        }
    }
    let best = (0..5).max_by_key(|&k| (counts[k], 5 - k)).unwrap_or(4);
    all[best]
}

/// Frame functions of an isotropic immersion.
pub fn frame_functions(m: &Immersion) -> Result<FrameFunctions> {
    analyze(m, &AnalysisOptions::default()).map(|a| a.functions)
}

/// Curvatures, inflection determinants and classification.
pub fn invariants(m: &Immersion) -> Result<InvariantReport> {
    analyze(m, &AnalysisOptions::default()).map(|a| a.invariants)
}

/// Christoffel symbols of isotropic parameters.
#[derive(Clone, Debug)]
pub struct Christoffel {
    /// `Gamma^1_11 = 2 f_u / f`.
    pub g1_11: ScalarField,
    pub g1_12: ScalarField,
    pub g1_22: ScalarField,
    pub g2_11: ScalarField,
    pub g2_12: ScalarField,
    /// `Gamma^2_22 = 2 f_v / f`.
    pub g2_22: ScalarField,
    /// Interior max of the tangential part of `z_uu - Gamma^1_11 z_u` and
    /// `z_vv - Gamma^2_22 z_v`; `O(h^2)` on isotropic input.
    pub tangential_defect: f64,
}

/// Christoffel symbols, with a check of `z_uu^T = Gamma^1_11 z_u`.
pub fn christoffel_isotropic(m: &Immersion) -> Result<Christoffel> {
    let grid = m.grid;
    let p = partials(m);
    let fff = fff_from(grid, &p, ISOTROPY_TOL)?;
    if !fff.is_isotropic {
        return Err(Error::NotIsotropic { ratio: fff.isotropy_ratio, tol: ISOTROPY_TOL });
    }
    let f = fff.f.map(|x| (-x).sqrt());
    let lnf = f.ln_abs()?;
    let g1_11 = lnf.d_du().scale(2.0);
    let g2_22 = lnf.d_dv().scale(2.0);
    let zero = g1_11.scale(0.0);
    let mut defect = 0.0f64;
    for i in 0..grid.nu {
        for j in 0..grid.nv {
            if !grid.is_interior(i, j) {
                continue;
            }
            let k = grid.index(i, j);
            let fk = f.values()[k];
            let (x, y) = ((1.0 / fk) * p.zu[k], (1.0 / fk) * p.zv[k]);
            let du = tangential(&p.zuu[k], &x, &y) - g1_11.values()[k] * p.zu[k];
            let dv = tangential(&p.zvv[k], &x, &y) - g2_22.values()[k] * p.zv[k];
            defect = defect.max(du.max_abs() / (fk * fk)).max(dv.max_abs() / (fk * fk));
        }
    }
    Ok(Christoffel {
        g1_11,
        g1_12: zero.clone(),
        g1_22: zero.clone(),
        g2_11: zero.clone(),
        g2_12: zero,
        g2_22,
        tangential_defect: defect,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::FRAC_1_SQRT_2;

    fn cylinder(n: usize) -> Immersion {
        Immersion::from_fn(GridSpec::square(1.0, n).unwrap(), |u, v| {
            let (th, t) = ((u - v) * FRAC_1_SQRT_2, (u + v) * FRAC_1_SQRT_2);
            MinkVec::new(th.cos(), th.sin(), 0.0, t)
        })
        .unwrap()
    }

    #[test]
    fn null_plane() {
        let m = Immersion::from_fn(GridSpec::square(1.0, 9).unwrap(), |u, v| {
            MinkVec::new((u - v) * FRAC_1_SQRT_2, 0.0, 0.0, (u + v) * FRAC_1_SQRT_2)
        })
        .unwrap();
        let fff = first_fundamental_form(&m).unwrap();
        assert!(fff.e.max_abs() < 1e-14 && fff.g.max_abs() < 1e-14);
        assert!((fff.f.max() + 1.0).abs() < 1e-14 && (fff.f.min() + 1.0).abs() < 1e-14);
        assert!(fff.is_isotropic && fff.is_timelike);
        assert!(matches!(geometric_frame(&m), Err(Error::MinimalOrTotallyGeodesic { .. })));
    }

    #[test]
    fn graph_is_not_isotropic() {
        let m = Immersion::from_fn(GridSpec::square(1.0, 9).unwrap(), |u, v| MinkVec::new(u, v, 0.0, 2.0 * u))
            .unwrap();
        let fff = first_fundamental_form(&m).unwrap();
        // E = 1 - 4 = -3, F = 0, G = 1: EG - F^2 = -3 < 0.
        assert!((fff.e.max() + 3.0).abs() < 1e-12 && (fff.g.max() - 1.0).abs() < 1e-12);
        assert!(fff.is_timelike && !fff.is_isotropic);
        assert!(matches!(analyze(&m, &AnalysisOptions::default()), Err(Error::NotIsotropic { .. })));
    }

    #[test]
    fn cylinder_frame() {
        let m = cylinder(65);
        let a = analyze(&m, &AnalysisOptions::default()).unwrap();
        let g = *m.grid();
        assert!((a.functions.nu.max() - 0.5).abs() < 1e-4 && (a.functions.nu.min() - 0.5).abs() < 1e-4);
        for (i, j) in [(10, 20), (32, 32), (60, 3)] {
            let th = (g.u(i) - g.v(j)) * FRAC_1_SQRT_2;
            let n1 = a.frame.frames.at(i, j).n1();
            assert!((n1 - MinkVec::new(-th.cos(), -th.sin(), 0.0, 0.0)).max_abs() < 1e-4);
        }
        assert!(a.functions.beta_max() <= 1e-12);
        assert_eq!(a.invariants.overall, SurfaceClass::ParallelH);
        assert!(a.invariants.k_frame.interior_max_abs() < 1e-4);
        assert!(a.invariants.k_metric.interior_max_abs() < 1e-4);
        let det_min = a.frame.frames.frames.iter().fold(f64::INFINITY, |m, f| m.min(f.det()));
        assert!(det_min > 0.0);
    }

    #[test]
    fn christoffel_of_cylinder_vanish() {
        let c = christoffel_isotropic(&cylinder(33)).unwrap();
        assert!(c.g1_11.interior_max_abs() < 1e-10 && c.g2_22.interior_max_abs() < 1e-10);
        assert!(c.tangential_defect < 1e-3);
    }
}
