//! CSV, JSON and legacy-VTK files.
//!
//! Fields are `u,v,value` rows, immersions `u,v,x1,x2,x3,x4`, both with `v`
//! varying fastest. A triple bundle is a directory holding `lambda.csv`,
//! `mu.csv`, `nu.csv` and `triple.json`.

use std::fs;
use std::path::{Path, PathBuf};

use pnmc_core::analysis::Immersion;
use pnmc_core::frame::FrameField;
use pnmc_core::{CanonicalTriple, Case, GridSpec, MinkVec, ScalarField};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};
use crate::report::{fmt_f64, to_json};

/// Serializable mirror of [`GridSpec`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridJson {
    pub u0: f64,
    pub u1: f64,
    pub v0: f64,
    pub v1: f64,
    pub nu: usize,
    pub nv: usize,
}

impl From<GridSpec> for GridJson {
    fn from(g: GridSpec) -> Self {
        GridJson { u0: g.u0, u1: g.u1, v0: g.v0, v1: g.v1, nu: g.nu, nv: g.nv }
    }
}

impl GridJson {
    pub fn to_grid(self) -> Result<GridSpec> {
        Ok(GridSpec::new(self.u0, self.u1, self.v0, self.v1, self.nu, self.nv)?)
    }
}

/// Sidecar of a triple bundle.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TripleMeta {
    pub case: String,
    pub sign_mu: f64,
    pub grid: GridJson,
}

pub fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    write_text(path, &(to_json(value) + "\n"))
}

fn csv_error(path: &Path, e: csv::Error) -> CliError {
    match e.kind() {
        csv::ErrorKind::Io(_) => match e.into_kind() {
            csv::ErrorKind::Io(io) => CliError::io(path, io),
            _ => unreachable!(),
        },
        _ => CliError::format(path, e.to_string()),
    }
}

fn write_rows(path: &Path, header: &[&str], grid: &GridSpec, row: impl Fn(usize) -> Vec<f64>) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_error(path, e))?;
    w.write_record(header).map_err(|e| csv_error(path, e))?;
    for i in 0..grid.nu {
        for j in 0..grid.nv {
            let mut rec = vec![fmt_f64(grid.u(i)), fmt_f64(grid.v(j))];
            rec.extend(row(grid.index(i, j)).into_iter().map(fmt_f64));
            w.write_record(&rec).map_err(|e| csv_error(path, e))?;
        }
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

/// Reads rows of `header.len()` numbers and recovers the uniform grid.
fn read_rows(path: &Path, header: &[&str]) -> Result<(GridSpec, Vec<Vec<f64>>)> {
    let mut r = csv::Reader::from_path(path).map_err(|e| csv_error(path, e))?;
    let found: Vec<String> = r.headers().map_err(|e| csv_error(path, e))?.iter().map(str::to_string).collect();
    if found != header {
        return Err(CliError::format(path, format!("expected header {}, found {}", header.join(","), found.join(","))));
    }
    let mut rows = Vec::new();
    for (line, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| csv_error(path, e))?;
        let vals = rec
            .iter()
            .map(|s| s.trim().parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| CliError::format(path, format!("row {}: {e}", line + 2)))?;
        if vals.len() != header.len() {
            return Err(CliError::format(path, format!("row {}: expected {} values", line + 2, header.len())));
        }
        rows.push(vals);
    }
    let grid = infer_grid(path, &rows)?;
    Ok((grid, rows))
}

fn infer_grid(path: &Path, rows: &[Vec<f64>]) -> Result<GridSpec> {
    let bad = |m: &str| CliError::format(path, m.to_string());
    let first_u = rows.first().ok_or_else(|| bad("no data rows"))?[0];
    let nv = rows.iter().take_while(|r| r[0] == first_u).count();
    if nv == 0 || !rows.len().is_multiple_of(nv) {
        return Err(bad("rows do not form a rectangular grid with v varying fastest"));
    }
    let nu = rows.len() / nv;
    let (u0, u1) = (rows[0][0], rows[rows.len() - 1][0]);
    let (v0, v1) = (rows[0][1], rows[nv - 1][1]);
    let grid = GridSpec::new(u0, u1, v0, v1, nu, nv).map_err(|e| CliError::format(path, e.to_string()))?;
    let slack = 1e-9 * (1.0 + u0.abs().max(u1.abs()).max(v0.abs()).max(v1.abs()));
    for i in 0..nu {
        for j in 0..nv {
            let r = &rows[grid.index(i, j)];
            if (r[0] - grid.u(i)).abs() > slack || (r[1] - grid.v(j)).abs() > slack {
                return Err(CliError::format(path, format!("row {}: node off the uniform grid", grid.index(i, j) + 2)));
            }
        }
    }
    Ok(grid)
}

pub fn write_field(path: &Path, field: &ScalarField) -> Result<()> {
    let vals = field.values();
    write_rows(path, &["u", "v", "value"], field.grid(), |k| vec![vals[k]])
}

pub fn read_field(path: &Path) -> Result<ScalarField> {
    let (grid, rows) = read_rows(path, &["u", "v", "value"])?;
    Ok(ScalarField::from_values(grid, rows.iter().map(|r| r[2]).collect())?)
}

pub fn write_immersion(path: &Path, m: &Immersion) -> Result<()> {
    let pts = m.points();
    write_rows(path, &["u", "v", "x1", "x2", "x3", "x4"], m.grid(), |k| pts[k].0.to_vec())
}

pub fn read_immersion(path: &Path) -> Result<Immersion> {
    let (grid, rows) = read_rows(path, &["u", "v", "x1", "x2", "x3", "x4"])?;
    let pts = rows.iter().map(|r| MinkVec::new(r[2], r[3], r[4], r[5])).collect();
    Ok(Immersion::new(grid, pts)?)
}

pub fn write_triple(dir: &Path, t: &CanonicalTriple) -> Result<()> {
    create_dir(dir)?;
    write_field(&dir.join("lambda.csv"), &t.lambda)?;
    write_field(&dir.join("mu.csv"), &t.mu)?;
    write_field(&dir.join("nu.csv"), &t.nu)?;
    let meta = TripleMeta { case: t.case.name().to_string(), sign_mu: t.sign_mu(), grid: (*t.grid()).into() };
    write_json(&dir.join("triple.json"), &meta)
}

pub fn read_triple(dir: &Path) -> Result<CanonicalTriple> {
    let meta_path = dir.join("triple.json");
    let meta: TripleMeta = serde_json::from_str(&read_text(&meta_path)?)
        .map_err(|e| CliError::format(&meta_path, e.to_string()))?;
    let case = Case::parse(&meta.case)
        .ok_or_else(|| CliError::format(&meta_path, format!("unknown case {:?}", meta.case)))?;
    let lambda = read_field(&dir.join("lambda.csv"))?;
    let mu = read_field(&dir.join("mu.csv"))?;
    let nu = read_field(&dir.join("nu.csv"))?;
    let grid = meta.grid.to_grid()?;
    for (name, f) in [("lambda.csv", &lambda), ("mu.csv", &mu), ("nu.csv", &nu)] {
        if !same_grid(f.grid(), &grid) {
            return Err(CliError::format(dir.join(name), "grid differs from triple.json"));
        }
    }
    let t = CanonicalTriple::new(lambda, mu, nu, case)?;
    if t.sign_mu() != meta.sign_mu {
        return Err(CliError::format(&meta_path, "sign_mu disagrees with mu.csv"));
    }
    Ok(t)
}

fn same_grid(a: &GridSpec, b: &GridSpec) -> bool {
    let close = |x: f64, y: f64| (x - y).abs() <= 1e-9 * (1.0 + x.abs());
    a.nu == b.nu && a.nv == b.nv && close(a.u0, b.u0) && close(a.u1, b.u1) && close(a.v0, b.v0) && close(a.v1, b.v1)
}

/// Legacy ASCII VTK structured grid: points `(x1, x2, x3)`, scalar `x4`,
/// and, with frames, vectors `n1`, `n2` (spatial parts) plus their
/// fourth components as scalars.
pub fn vtk_string(m: &Immersion, frames: Option<&FrameField>) -> String {
    use std::fmt::Write;
    let g = *m.grid();
    let order: Vec<usize> = (0..g.nv).flat_map(|j| (0..g.nu).map(move |i| g.index(i, j))).collect();
    let mut s = String::new();
    s.push_str("# vtk DataFile Version 3.0\ntimelike surface in R^4_1\nASCII\nDATASET STRUCTURED_GRID\n");
    let _ = writeln!(s, "DIMENSIONS {} {} 1", g.nu, g.nv);
    let _ = writeln!(s, "POINTS {} double", g.len());
    for &k in &order {
        let p = m.points()[k].0;
        let _ = writeln!(s, "{} {} {}", fmt_f64(p[0]), fmt_f64(p[1]), fmt_f64(p[2]));
    }
    let _ = writeln!(s, "POINT_DATA {}", g.len());
    let scalar = |s: &mut String, name: &str, f: &dyn Fn(usize) -> f64| {
        let _ = writeln!(s, "SCALARS {name} double 1\nLOOKUP_TABLE default");
        for &k in &order {
            let _ = writeln!(s, "{}", fmt_f64(f(k)));
        }
    };
    scalar(&mut s, "x4", &|k| m.points()[k].0[3]);
    if let Some(fr) = frames {
        for (name, row) in [("n1", 2usize), ("n2", 3)] {
            let _ = writeln!(s, "VECTORS {name} double");
            for &k in &order {
                let r = fr.frames[k].rows()[row];
                let _ = writeln!(s, "{} {} {}", fmt_f64(r[0]), fmt_f64(r[1]), fmt_f64(r[2]));
            }
            scalar(&mut s, &format!("{name}_x4"), &|k| fr.frames[k].rows()[row][3]);
        }
    }
    s
}

pub fn write_vtk(path: &Path, m: &Immersion, frames: Option<&FrameField>) -> Result<()> {
    write_text(path, &vtk_string(m, frames))
}

/// `dir/name`, for output bundles.
pub fn in_dir(dir: &Path, name: &str) -> PathBuf {
    dir.join(name)
}
