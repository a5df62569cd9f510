//! File parsing and deterministic JSON rendering.
//!
//! Floats are printed with 17 significant digits, which round-trips f64
//! exactly: re-parsing printed output and re-evaluating reproduces the
//! same bytes. Complex numbers are [re, im] pairs; 2-forms are a basis
//! label list plus a sparse upper-triangular coefficient list.

use std::path::Path;

use num_complex::Complex64;
use serde::Deserialize;
use wproj_core::forms::{Frame, TwoForm};
use wproj_core::hvec::Atlas;
use wproj_core::{ChartCoords, ChartId, ComplexVec, HomPoint};

use crate::Failure;

#[derive(Deserialize)]
struct PointFile {
    v: Vec<[f64; 2]>,
    w: Vec<[f64; 2]>,
}

#[derive(Deserialize)]
struct CoordsFile {
    u: Vec<[f64; 2]>,
    fiber: Vec<[f64; 2]>,
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure {
        msg: format!("Io: cannot read {}: {e}", path.display()),
        code: 2,
    })?;
    serde_json::from_str(&text).map_err(|e| Failure {
        msg: format!("Json: {}: {e}", path.display()),
        code: 2,
    })
}

fn to_vec(pairs: &[[f64; 2]]) -> ComplexVec {
    ComplexVec::new(pairs.iter().map(|p| Complex64::new(p[0], p[1])).collect())
}

/// Parse a {"v": [[re,im],...], "w": [[re,im],...]} file into a point.
pub fn read_point(path: &Path) -> Result<HomPoint, Failure> {
    let file: PointFile = read_json(path)?;
    Ok(HomPoint::new(to_vec(&file.v), to_vec(&file.w))?)
}

/// Parse a {"u": [...], "fiber": [...]} file into coordinates on `chart`.
pub fn read_coords(path: &Path, chart: ChartId) -> Result<ChartCoords, Failure> {
    let file: CoordsFile = read_json(path)?;
    Ok(ChartCoords::new(chart, to_vec(&file.u), to_vec(&file.fiber))?)
}

/// 17 significant digits; round-trips f64 exactly.
pub fn fnum(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn fcplx(z: Complex64) -> String {
    format!("[{},{}]", fnum(z.re), fnum(z.im))
}

pub fn fvec(v: &ComplexVec) -> String {
    let parts: Vec<String> = v.iter().map(|z| fcplx(*z)).collect();
    format!("[{}]", parts.join(","))
}

pub fn fcoords(c: &ChartCoords) -> String {
    format!(
        "{{\"chart\":\"{}\",\"u\":{},\"fiber\":{}}}",
        c.chart(),
        fvec(c.u()),
        fvec(c.fiber())
    )
}

/// Differential labels in slot order: holomorphic then conjugate for the
/// first block, then the same for the second block.
fn frame_labels(frame: Frame, first: &str, second: &str) -> Vec<String> {
    let mut out = Vec::with_capacity(frame.dim());
    for i in 0..frame.n() {
        out.push(format!("d{first}{i}"));
    }
    for i in 0..frame.n() {
        out.push(format!("d{first}bar{i}"));
    }
    for i in 0..frame.m() {
        out.push(format!("d{second}{i}"));
    }
    for i in 0..frame.m() {
        out.push(format!("d{second}bar{i}"));
    }
    out
}

/// Labels for the ambient homogeneous frame (dv, dw).
pub fn ambient_labels(frame: Frame) -> Vec<String> {
    frame_labels(frame, "v", "w")
}

/// Labels for a chart frame: the V atlas puts the affine block first, the
/// W atlas puts the fiber block first.
pub fn chart_labels(frame: Frame, chart: ChartId) -> Vec<String> {
    match chart.atlas {
        Atlas::V => frame_labels(frame, "u", "fib"),
        Atlas::W => frame_labels(frame, "fib", "u"),
    }
}

/// Sparse encoding {"basis": [...], "coeff": [[mu,nu,[re,im]],...]} with
/// mu < nu and exact zeros omitted.
pub fn ftwo_form(form: &TwoForm, labels: &[String]) -> String {
    let dim = form.frame().dim();
    let mut entries = Vec::new();
    for mu in 0..dim {
        for nu in (mu + 1)..dim {
            let z = form.get(mu, nu);
            if z.re != 0.0 || z.im != 0.0 {
                entries.push(format!("[{mu},{nu},{}]", fcplx(z)));
            }
        }
    }
    let quoted: Vec<String> = labels.iter().map(|l| format!("\"{l}\"")).collect();
    format!(
        "{{\"basis\":[{}],\"coeff\":[{}]}}",
        quoted.join(","),
        entries.join(",")
    )
}
