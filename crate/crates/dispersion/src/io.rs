//! File formats: CSV point sets, JSON boxes, JSON results.
//!
//! Points travel as CSV with one row per point and an optional `x1,...,xd`
//! header. Boxes are JSON objects, `{"dim", "lo", "hi"}` for cube boxes and
//! `{"dim", "a", "b", "periodic": true}` for periodic ones. Floats print in
//! shortest round-trip form, so write-then-read is the identity.

use crate::geometry::{AnyBox, AxisBox, GeometryError, Point, PointSet, TorusBox};
use crate::nets::CoverResult;
use crate::solver::DispersionResult;
use serde::{Deserialize, Serialize};
use serde_json::json;
use std::io::{BufRead, Write};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("geometry: {0}")]
    Geometry(#[from] GeometryError),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("box object needs either lo/hi or a/b with periodic=true")]
    MalformedBox,
    #[error("csv has no data rows")]
    EmptyPoints,
}

/// Write a point set as CSV with a header row.
pub fn write_points_csv<W: Write>(set: &PointSet, out: &mut W) -> Result<(), FormatError> {
    let header: Vec<String> = (1..=set.dim()).map(|i| format!("x{i}")).collect();
    writeln!(out, "{}", header.join(","))?;
    for p in set.points() {
        let row: Vec<String> = p.coords().iter().map(|c| format!("{c}")).collect();
        writeln!(out, "{}", row.join(","))?;
    }
    Ok(())
}

/// Read a point set from CSV; a leading `x1,...,xd` header is optional.
/// The dimension comes from the first data row.
pub fn read_points_csv<R: BufRead>(input: R) -> Result<PointSet, FormatError> {
    let mut points: Vec<Point> = Vec::new();
    for (idx, line) in input.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = trimmed.split(',').map(str::trim).collect();
        let parsed: Result<Vec<f64>, _> = tokens.iter().map(|t| t.parse::<f64>()).collect();
        match parsed {
            Ok(coords) => {
                points.push(Point::new(coords).map_err(|e| FormatError::Parse {
                    line: idx + 1,
                    message: e.to_string(),
                })?);
            }
            Err(_) if points.is_empty() && looks_like_header(&tokens) => continue,
            Err(e) => {
                return Err(FormatError::Parse { line: idx + 1, message: e.to_string() });
            }
        }
    }
    if points.is_empty() {
        return Err(FormatError::EmptyPoints);
    }
    Ok(PointSet::new(points)?)
}

fn looks_like_header(tokens: &[&str]) -> bool {
    tokens.iter().all(|t| {
        let mut chars = t.chars();
        chars.next() == Some('x') && !t[1..].is_empty() && t[1..].chars().all(|c| c.is_ascii_digit())
    })
}

#[derive(Serialize, Deserialize)]
struct CubeBoxJson {
    dim: usize,
    lo: Vec<f64>,
    hi: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct TorusBoxJson {
    dim: usize,
    a: Vec<f64>,
    b: Vec<f64>,
    periodic: bool,
}

pub fn box_to_json(b: &AnyBox) -> serde_json::Value {
    match b {
        AnyBox::Cube(cube) => json!({
            "dim": cube.dim(),
            "lo": cube.intervals().iter().map(|iv| iv.lo()).collect::<Vec<_>>(),
            "hi": cube.intervals().iter().map(|iv| iv.hi()).collect::<Vec<_>>(),
        }),
        AnyBox::Torus(torus) => json!({
            "dim": torus.dim(),
            "a": torus.intervals().iter().map(|iv| iv.a()).collect::<Vec<_>>(),
            "b": torus.intervals().iter().map(|iv| iv.b()).collect::<Vec<_>>(),
            "periodic": true,
        }),
    }
}

pub fn box_from_json(value: &serde_json::Value) -> Result<AnyBox, FormatError> {
    let obj = value.as_object().ok_or(FormatError::MalformedBox)?;
    if obj.get("periodic").and_then(|p| p.as_bool()).unwrap_or(false) {
        let parsed: TorusBoxJson = serde_json::from_value(value.clone())?;
        if parsed.a.len() != parsed.dim || parsed.b.len() != parsed.dim {
            return Err(FormatError::MalformedBox);
        }
        Ok(TorusBox::from_endpoints(&parsed.a, &parsed.b)?.into())
    } else if obj.contains_key("lo") {
        let parsed: CubeBoxJson = serde_json::from_value(value.clone())?;
        if parsed.lo.len() != parsed.dim || parsed.hi.len() != parsed.dim {
            return Err(FormatError::MalformedBox);
        }
        Ok(AxisBox::from_bounds(&parsed.lo, &parsed.hi)?.into())
    } else {
        Err(FormatError::MalformedBox)
    }
}

pub fn parse_box(text: &str) -> Result<AnyBox, FormatError> {
    let value: serde_json::Value = serde_json::from_str(text)?;
    box_from_json(&value)
}

pub fn result_to_json(r: &DispersionResult) -> serde_json::Value {
    let mut value = json!({
        "value": r.value,
        "witness": box_to_json(&r.witness),
        "mode": r.mode,
        "method": r.method,
        "n": r.n,
        "d": r.dim,
    });
    if let Some(note) = &r.note {
        value["note"] = json!(note);
    }
    value
}

pub fn cover_to_json(c: &CoverResult) -> serde_json::Value {
    json!({
        "element": box_to_json(&c.element),
        "family": c.family,
        "ratio": c.ratio,
    })
}
