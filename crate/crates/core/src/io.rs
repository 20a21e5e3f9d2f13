//! File formats: loop specifications, grid-function JSON, trajectory and
//! loop CSV, snapshot JSON and SVG renderings.
//!
//! Floats are always written with 17 significant digits so that identical
//! inputs produce byte-identical files.

use std::fmt::Write as _;
use std::io;
use std::path::Path;

use num_complex::Complex;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::deform::DeformationField;
use crate::error::{Error, Result};
use crate::flow::Trajectory;
use crate::loopgeom::{closure_defect, curvature_of, immersion_of, CurvatureField, Immersion, Tolerances};
use crate::spectral::Grid;

/// `x` with 17 significant digits in scientific notation.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

struct Digits17;

impl serde_json::ser::Formatter for Digits17 {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        w.write_all(fmt_f64(value).as_bytes())
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, f64::from(value))
    }
}

/// Compact JSON with 17-digit floats and a trailing newline.
pub fn to_json_string<S: Serialize + ?Sized>(value: &S) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, Digits17);
    value.serialize(&mut ser).expect("in-memory JSON serialization");
    buf.push(b'\n');
    String::from_utf8(buf).expect("JSON is UTF-8")
}

/// Curvature given either by Fourier data or by samples on the grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CurvatureSpec {
    Fourier {
        #[serde(default)]
        mean: f64,
        #[serde(default)]
        cos: Vec<f64>,
        #[serde(default)]
        sin: Vec<f64>,
    },
    Samples(Vec<f64>),
}

/// Where a loop comes from: its curvature or the samples `Z(s_i)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LoopSource {
    Curvature { curvature: CurvatureSpec },
    Points {
        #[serde(rename = "Z")]
        z: Vec<[f64; 2]>,
    },
}

/// `{"N": 256, "curvature": {"mean": 1, "cos": [0, 0.5], "sin": []}}` or
/// `{"Z": [[re, im], …]}`. Index `j` of `cos`/`sin` multiplies `cos((j+1)s)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LoopSpec {
    #[serde(rename = "N", default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(flatten)]
    pub source: LoopSource,
}

impl LoopSpec {
    pub fn fourier(n: usize, mean: f64, cos: Vec<f64>, sin: Vec<f64>) -> Self {
        Self {
            n: Some(n),
            source: LoopSource::Curvature {
                curvature: CurvatureSpec::Fourier { mean, cos, sin },
            },
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("loop spec: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// The grid size, from `N` or the sample count; both must agree.
    pub fn grid_size(&self) -> Result<usize> {
        let implied = match &self.source {
            LoopSource::Points { z } => Some(z.len()),
            LoopSource::Curvature {
                curvature: CurvatureSpec::Samples(v),
            } => Some(v.len()),
            LoopSource::Curvature { .. } => None,
        };
        match (self.n, implied) {
            (Some(n), Some(m)) if n != m => Err(Error::GridMismatch(n, m)),
            (Some(n), _) | (None, Some(n)) => Ok(n),
            (None, None) => Err(Error::InvalidInput("loop spec needs \"N\"".into())),
        }
    }

    pub fn grid(&self) -> Result<Grid<f64>> {
        Grid::new(self.grid_size()?)
    }

    pub fn curvature(&self, tol: &Tolerances) -> Result<CurvatureField<f64>> {
        let grid = self.grid()?;
        match &self.source {
            LoopSource::Curvature { curvature } => match curvature {
                CurvatureSpec::Fourier { mean, cos, sin } => {
                    CurvatureField::from_fourier(&grid, *mean, cos, sin)
                }
                CurvatureSpec::Samples(v) => CurvatureField::new(&grid, v.clone()),
            },
            LoopSource::Points { .. } => curvature_of(&self.immersion(tol)?.0, tol),
        }
    }

    /// The loop and its closure defect `|∮ ∂_s Z ds|`.
    pub fn immersion(&self, tol: &Tolerances) -> Result<(Immersion<f64>, f64)> {
        let grid = self.grid()?;
        match &self.source {
            LoopSource::Points { z } => {
                let z = z.iter().map(|p| Complex::new(p[0], p[1])).collect();
                let imm = Immersion::from_samples(&grid, z)?;
                let defect = closure_defect(&curvature_of(&imm, tol)?);
                Ok((imm, defect))
            }
            LoopSource::Curvature { .. } => {
                immersion_of(&self.curvature(tol)?, 0.0, Complex::new(0.0, 0.0), tol)
            }
        }
    }
}

/// `{"N": n, "s": [...], "values": [...]}`.
pub fn grid_function_json(grid: &Grid<f64>, values: &[f64]) -> Value {
    json!({"N": grid.len(), "s": grid.nodes(), "values": values})
}

/// `{"N": n, "s": [...], "vr": [...], "vi": [...]}`.
pub fn deformation_json(grid: &Grid<f64>, v: &DeformationField<f64>) -> Value {
    json!({"N": grid.len(), "s": grid.nodes(), "vr": v.vr, "vi": v.vi})
}

pub fn points_json(z: &[Complex<f64>]) -> Value {
    Value::Array(z.iter().map(|p| json!([p.re, p.im])).collect())
}

/// One row `t,E,mean_k,closure_defect,sup_k` per recorded monitor.
pub fn trajectory_csv(traj: &Trajectory<f64>) -> String {
    let mut out = String::from("t,E,mean_k,closure_defect,sup_k\n");
    for m in &traj.monitors {
        let row = [m.t, m.energy, m.mean, m.closure_defect, m.sup].map(fmt_f64);
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// One row `s,k,re_z,im_z` per grid node.
pub fn loop_csv(k: &CurvatureField<f64>, z: &Immersion<f64>) -> String {
    let mut out = String::from("s,k,re_z,im_z\n");
    for ((s, kv), p) in k.grid().nodes().iter().zip(k.values()).zip(&z.z) {
        let row = [*s, *kv, p.re, p.im].map(fmt_f64);
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// `{"snapshots": [{"t": …, "k": […], "Z": [[re, im], …]}, …]}`.
pub fn snapshots_json(traj: &Trajectory<f64>, loops: Option<&[Immersion<f64>]>) -> Value {
    let snaps: Vec<Value> = traj
        .times
        .iter()
        .zip(&traj.states)
        .enumerate()
        .map(|(i, (t, k))| {
            let mut v = json!({"t": t, "k": k.values()});
            if let Some(z) = loops.and_then(|l| l.get(i)) {
                v["Z"] = points_json(&z.z);
            }
            v
        })
        .collect();
    json!({ "N": traj.final_state().grid().len(), "snapshots": snaps })
}

const VIEW: f64 = 1000.0;
const MARGIN: f64 = 0.05;

struct Frame {
    cx: f64,
    cy: f64,
    scale: f64,
}

impl Frame {
    fn fit<'a>(points: impl Iterator<Item = &'a Complex<f64>>) -> Self {
        let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
        for p in points {
            x0 = x0.min(p.re);
            x1 = x1.max(p.re);
            y0 = y0.min(p.im);
            y1 = y1.max(p.im);
        }
        let span = (x1 - x0).max(y1 - y0).max(f64::MIN_POSITIVE);
        Self {
            cx: 0.5 * (x0 + x1),
            cy: 0.5 * (y0 + y1),
            scale: VIEW * (1.0 - 2.0 * MARGIN) / span,
        }
    }

    fn path(&self, z: &[Complex<f64>], dx: f64) -> String {
        let mut d = String::new();
        for (i, p) in z.iter().enumerate() {
            let x = dx + 0.5 * VIEW + (p.re - self.cx) * self.scale;
            let y = 0.5 * VIEW - (p.im - self.cy) * self.scale;
            let _ = write!(d, "{}{x:.3} {y:.3} ", if i == 0 { "M" } else { "L" });
        }
        d.push('Z');
        format!("<path d=\"{d}\" fill=\"none\" stroke=\"black\" stroke-width=\"2\"/>\n")
    }
}

/// The closed polyline through `Z(s_i)`, fitted to a 1000×1000 view box.
pub fn loop_svg(z: &Immersion<f64>) -> String {
    let frame = Frame::fit(z.z.iter());
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {VIEW} {VIEW}\">\n{}</svg>\n",
        frame.path(&z.z, 0.0)
    )
}

/// Snapshots side by side, one path element each, on a common scale.
pub fn filmstrip_svg(loops: &[Immersion<f64>]) -> String {
    let frame = Frame::fit(loops.iter().flat_map(|z| z.z.iter()));
    let width = VIEW * loops.len().max(1) as f64;
    let mut out = format!("<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {width} {VIEW}\">\n");
    for (i, z) in loops.iter().enumerate() {
        out.push_str(&frame.path(&z.z, VIEW * i as f64));
    }
    out.push_str("</svg>\n");
    out
}
