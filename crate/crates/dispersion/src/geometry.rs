//! Points and axis-parallel boxes in the unit cube, plus their periodic
//! (torus) counterparts.
//!
//! Conventions are deliberately asymmetric and must not be "fixed":
//!
//! * Cube intervals are half-open `[lo, hi)` — the lower face belongs to the
//!   box, the upper face does not.
//! * Torus intervals are open. `(a, b)` with `a < b` is an ordinary open
//!   interval; with `b < a` it is the wrap-around set `[0,1] \ [b, a]` minus
//!   its endpoints. `a == b` is the punctured full circle (everything except
//!   the point `a`) and carries length exactly 1; it only arises as a solver
//!   witness, never from [`TorusInterval::new`].
//!
//! All coordinates are `f64` and predicates compare exactly — no epsilon.
//! Candidate coordinates are copied bit-for-bit from inputs, so tolerance
//! would only introduce ambiguity into emptiness tests.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Errors from constructing or combining geometric values.
#[derive(Debug, Error, PartialEq)]
pub enum GeometryError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("coordinate {value} outside [0,1] at position {index}")]
    CoordinateOutOfRange { value: f64, index: usize },
    #[error("invalid interval [{lo}, {hi}): need 0 <= lo < hi <= 1")]
    InvalidInterval { lo: f64, hi: f64 },
    #[error("invalid torus interval ({a}, {b}): endpoints must lie in [0,1] and differ")]
    InvalidTorusInterval { a: f64, b: f64 },
    #[error("dimension must be at least 1")]
    EmptyDimension,
    #[error("points in a set must share one dimension")]
    MixedDimensions,
}

fn check_unit(value: f64, index: usize) -> Result<(), GeometryError> {
    if !(0.0..=1.0).contains(&value) || value.is_nan() {
        return Err(GeometryError::CoordinateOutOfRange { value, index });
    }
    Ok(())
}

/// A point in the unit cube `[0,1]^d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Point {
    coords: Vec<f64>,
}

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self, GeometryError> {
        if coords.is_empty() {
            return Err(GeometryError::EmptyDimension);
        }
        for (i, &c) in coords.iter().enumerate() {
            check_unit(c, i)?;
        }
        Ok(Point { coords })
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coord(&self, axis: usize) -> f64 {
        self.coords[axis]
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }
}

impl TryFrom<Vec<f64>> for Point {
    type Error = GeometryError;
    fn try_from(v: Vec<f64>) -> Result<Self, Self::Error> {
        Point::new(v)
    }
}

impl From<Point> for Vec<f64> {
    fn from(p: Point) -> Self {
        p.coords
    }
}

/// A finite set of points sharing one dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    points: Vec<Point>,
    dim: usize,
}

impl PointSet {
    /// An empty set still needs a dimension so boxes can be matched to it.
    pub fn empty(dim: usize) -> Result<Self, GeometryError> {
        if dim == 0 {
            return Err(GeometryError::EmptyDimension);
        }
        Ok(PointSet { points: Vec::new(), dim })
    }

    pub fn new(points: Vec<Point>) -> Result<Self, GeometryError> {
        let dim = match points.first() {
            Some(p) => p.dim(),
            None => return Err(GeometryError::EmptyDimension),
        };
        if points.iter().any(|p| p.dim() != dim) {
            return Err(GeometryError::MixedDimensions);
        }
        Ok(PointSet { points, dim })
    }

    pub fn with_dim(points: Vec<Point>, dim: usize) -> Result<Self, GeometryError> {
        if points.is_empty() {
            Self::empty(dim)
        } else {
            let set = Self::new(points)?;
            if set.dim != dim {
                return Err(GeometryError::DimensionMismatch { expected: dim, got: set.dim });
            }
            Ok(set)
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    /// All coordinates of the set along one axis, in point order.
    pub fn axis_coords(&self, axis: usize) -> Vec<f64> {
        self.points.iter().map(|p| p.coord(axis)).collect()
    }
}

/// Half-open interval `[lo, hi)` with `0 <= lo < hi <= 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    lo: f64,
    hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self, GeometryError> {
        if !(lo >= 0.0 && lo < hi && hi <= 1.0) {
            return Err(GeometryError::InvalidInterval { lo, hi });
        }
        Ok(Interval { lo, hi })
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn length(&self) -> f64 {
        self.hi - self.lo
    }

    /// Half-open membership: `lo <= t < hi`.
    pub fn contains(&self, t: f64) -> bool {
        self.lo <= t && t < self.hi
    }
}

/// An axis-parallel box `prod [lo_i, hi_i)` inside the unit cube.
///
/// The volume is computed once at construction; [`AxisBox::recompute_volume`]
/// exists so tests can confirm the cache stays consistent.
#[derive(Debug, Clone, PartialEq)]
pub struct AxisBox {
    intervals: Vec<Interval>,
    volume: f64,
}

impl AxisBox {
    pub fn new(intervals: Vec<Interval>) -> Result<Self, GeometryError> {
        if intervals.is_empty() {
            return Err(GeometryError::EmptyDimension);
        }
        let volume = intervals.iter().fold(1.0, |acc, iv| acc * iv.length());
        Ok(AxisBox { intervals, volume })
    }

    pub fn from_bounds(lo: &[f64], hi: &[f64]) -> Result<Self, GeometryError> {
        if lo.len() != hi.len() {
            return Err(GeometryError::DimensionMismatch { expected: lo.len(), got: hi.len() });
        }
        let intervals = lo
            .iter()
            .zip(hi)
            .map(|(&a, &b)| Interval::new(a, b))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(intervals)
    }

    /// The full cube `[0,1)^d`.
    pub fn full_cube(dim: usize) -> Result<Self, GeometryError> {
        Self::new(vec![Interval::new(0.0, 1.0)?; dim.max(1)])
    }

    pub fn dim(&self) -> usize {
        self.intervals.len()
    }

    pub fn interval(&self, axis: usize) -> Interval {
        self.intervals[axis]
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn volume(&self) -> f64 {
        self.volume
    }

    pub fn recompute_volume(&self) -> f64 {
        self.intervals.iter().fold(1.0, |acc, iv| acc * iv.length())
    }

    pub fn lengths(&self) -> Vec<f64> {
        self.intervals.iter().map(|iv| iv.length()).collect()
    }

    /// Half-open membership on every axis.
    pub fn contains(&self, p: &Point) -> Result<bool, GeometryError> {
        if p.dim() != self.dim() {
            return Err(GeometryError::DimensionMismatch { expected: self.dim(), got: p.dim() });
        }
        Ok(self
            .intervals
            .iter()
            .zip(p.coords())
            .all(|(iv, &c)| iv.contains(c)))
    }

    /// `self` is contained in `outer`: `outer.lo_i <= lo_i` and
    /// `hi_i <= outer.hi_i` on every axis.
    pub fn is_subset_of(&self, outer: &AxisBox) -> Result<bool, GeometryError> {
        if outer.dim() != self.dim() {
            return Err(GeometryError::DimensionMismatch {
                expected: self.dim(),
                got: outer.dim(),
            });
        }
        Ok(self
            .intervals
            .iter()
            .zip(outer.intervals())
            .all(|(inner, out)| out.lo <= inner.lo && inner.hi <= out.hi))
    }
}

/// Open interval on the circle `[0,1)` with endpoints identified.
///
/// * `a < b`: the open interval `(a, b)`.
/// * `b < a`: the wrap-around set `[0,1] \ [b, a]` minus the endpoints.
/// * `a == b`: the punctured circle (length exactly 1, every `t != a`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TorusInterval {
    a: f64,
    b: f64,
}

impl TorusInterval {
    pub fn new(a: f64, b: f64) -> Result<Self, GeometryError> {
        if !(0.0..=1.0).contains(&a) || !(0.0..=1.0).contains(&b) || a == b {
            return Err(GeometryError::InvalidTorusInterval { a, b });
        }
        Ok(TorusInterval { a, b })
    }

    /// Full circle minus the single point `a`. Length counts as exactly 1;
    /// this realizes suprema like the dispersion of one point on the circle.
    pub fn punctured(a: f64) -> Result<Self, GeometryError> {
        if !(0.0..=1.0).contains(&a) {
            return Err(GeometryError::InvalidTorusInterval { a, b: a });
        }
        Ok(TorusInterval { a, b: a })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn is_punctured(&self) -> bool {
        self.a == self.b
    }

    pub fn wraps(&self) -> bool {
        self.b < self.a
    }

    /// Cyclic length `(b - a) mod 1`, except the punctured case counts as 1.
    pub fn length(&self) -> f64 {
        if self.is_punctured() {
            1.0
        } else {
            cyclic_gap(self.a, self.b)
        }
    }

    /// Open membership; on a wrapping axis `t < b || t > a`.
    pub fn contains(&self, t: f64) -> bool {
        if self.a < self.b {
            self.a < t && t < self.b
        } else {
            // wrapping (and the punctured a == b case, where this is t != a)
            t < self.b || t > self.a
        }
    }

    /// Cyclic containment of `self` in `outer`, endpoints allowed to touch.
    ///
    /// Positions are normalized relative to `outer.a`; the map
    /// `t -> ((t - a0) mod 1)` is monotone on the outer arc even after
    /// floating-point rounding, so genuinely nested intervals never fail.
    pub fn is_subset_of(&self, outer: &TorusInterval) -> bool {
        if self.is_punctured() {
            return outer.is_punctured() && self.a == outer.a;
        }
        let u = cyclic_gap(outer.a, self.a);
        let mut v = cyclic_gap(outer.a, self.b);
        if v == 0.0 {
            // inner ends exactly at the outer's start point
            v = 1.0;
        }
        let outer_len = if outer.is_punctured() { 1.0 } else { cyclic_gap(outer.a, outer.b) };
        u <= v && v <= outer_len
    }
}

/// Cyclic distance from `from` forward to `to`: `(to - from) mod 1`.
pub fn cyclic_gap(from: f64, to: f64) -> f64 {
    let d = to - from;
    if d < 0.0 {
        d + 1.0
    } else {
        d
    }
}

/// A periodic axis-parallel box: a product of [`TorusInterval`]s.
#[derive(Debug, Clone, PartialEq)]
pub struct TorusBox {
    intervals: Vec<TorusInterval>,
    volume: f64,
}

impl TorusBox {
    pub fn new(intervals: Vec<TorusInterval>) -> Result<Self, GeometryError> {
        if intervals.is_empty() {
            return Err(GeometryError::EmptyDimension);
        }
        let volume = intervals.iter().fold(1.0, |acc, iv| acc * iv.length());
        Ok(TorusBox { intervals, volume })
    }

    pub fn from_endpoints(a: &[f64], b: &[f64]) -> Result<Self, GeometryError> {
        if a.len() != b.len() {
            return Err(GeometryError::DimensionMismatch { expected: a.len(), got: b.len() });
        }
        let intervals = a
            .iter()
            .zip(b)
            .map(|(&x, &y)| if x == y { TorusInterval::punctured(x) } else { TorusInterval::new(x, y) })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(intervals)
    }

    pub fn dim(&self) -> usize {
        self.intervals.len()
    }

    pub fn interval(&self, axis: usize) -> TorusInterval {
        self.intervals[axis]
    }

    pub fn intervals(&self) -> &[TorusInterval] {
        &self.intervals
    }

    pub fn volume(&self) -> f64 {
        self.volume
    }

    pub fn recompute_volume(&self) -> f64 {
        self.intervals.iter().fold(1.0, |acc, iv| acc * iv.length())
    }

    pub fn lengths(&self) -> Vec<f64> {
        self.intervals.iter().map(|iv| iv.length()).collect()
    }

    pub fn contains(&self, p: &Point) -> Result<bool, GeometryError> {
        if p.dim() != self.dim() {
            return Err(GeometryError::DimensionMismatch { expected: self.dim(), got: p.dim() });
        }
        Ok(self
            .intervals
            .iter()
            .zip(p.coords())
            .all(|(iv, &c)| iv.contains(c)))
    }

    pub fn is_subset_of(&self, outer: &TorusBox) -> Result<bool, GeometryError> {
        if outer.dim() != self.dim() {
            return Err(GeometryError::DimensionMismatch {
                expected: self.dim(),
                got: outer.dim(),
            });
        }
        Ok(self
            .intervals
            .iter()
            .zip(outer.intervals())
            .all(|(inner, out)| inner.is_subset_of(out)))
    }
}

/// Either kind of box, for interfaces that accept both.
#[derive(Debug, Clone, PartialEq)]
pub enum AnyBox {
    Cube(AxisBox),
    Torus(TorusBox),
}

impl AnyBox {
    pub fn dim(&self) -> usize {
        match self {
            AnyBox::Cube(b) => b.dim(),
            AnyBox::Torus(b) => b.dim(),
        }
    }

    pub fn volume(&self) -> f64 {
        match self {
            AnyBox::Cube(b) => b.volume(),
            AnyBox::Torus(b) => b.volume(),
        }
    }

    pub fn is_periodic(&self) -> bool {
        matches!(self, AnyBox::Torus(_))
    }
}

impl From<AxisBox> for AnyBox {
    fn from(b: AxisBox) -> Self {
        AnyBox::Cube(b)
    }
}

impl From<TorusBox> for AnyBox {
    fn from(b: TorusBox) -> Self {
        AnyBox::Torus(b)
    }
}
