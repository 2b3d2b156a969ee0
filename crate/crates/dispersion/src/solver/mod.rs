//! Dispersion solvers: the supremal volume of an empty axis-parallel box.
//!
//! The supremum over half-open boxes need not be attained, so the exact
//! solvers enumerate *candidate* boxes whose sides either sit on the cube
//! boundary or are supported by point coordinates, with a blocking rule that
//! encodes which of those sides could be shrunk infinitesimally:
//!
//! * cube: a point blocks a candidate iff on every axis `p < hi` and
//!   (`p > lo`, or `p == lo` with `lo == 0`). A side supported by a point
//!   coordinate can be pushed past the point at vanishing volume cost; a
//!   side on the cube boundary cannot.
//! * torus: candidate endpoints range over point coordinates and intervals
//!   are open, so points sitting on an endpoint never block. The degenerate
//!   pair `a == b` stands for the full circle minus one point and counts
//!   length exactly 1.
//!
//! Enumerations prune by sorted side length and run in parallel over the
//! first axis's candidate pairs; results are deterministic for any worker
//! count, with ties broken toward the lexicographically smallest witness.

mod cube;
mod grid;
mod torus;

use crate::geometry::{AnyBox, AxisBox, Point, PointSet, TorusBox};
use serde::{Deserialize, Serialize};
use std::sync::atomic::{AtomicU64, Ordering};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum SolverError {
    #[error(
        "candidate budget exceeded: {candidates:.3e} candidate boxes over budget {budget:.3e}; \
         raise the budget or use the grid method"
    )]
    BudgetExceeded { candidates: f64, budget: f64 },
    #[error("grid resolution must be at least 2, got {resolution}")]
    BadResolution { resolution: usize },
}

/// Which box family the dispersion ranges over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Cube,
    Torus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Exact,
    Grid,
}

/// Default cap on enumerated candidate boxes (`n^d (n+1)^d` for the cube,
/// `n^(2d)` for the torus).
pub const DEFAULT_BUDGET: f64 = 1e8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub budget: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig { budget: DEFAULT_BUDGET }
    }
}

impl SolverConfig {
    pub fn with_budget(budget: f64) -> Self {
        SolverConfig { budget }
    }
}

/// A computed dispersion value together with the candidate box achieving it.
#[derive(Debug, Clone, PartialEq)]
pub struct DispersionResult {
    pub value: f64,
    pub witness: AnyBox,
    pub mode: Mode,
    pub method: Method,
    pub n: usize,
    pub dim: usize,
    /// Set when the result relies on a convention (empty torus set, or a
    /// boundary-degenerate instance with no unblocked candidate).
    pub note: Option<String>,
}

/// Exact dispersion over cube boxes: the largest volume of a candidate box
/// no point blocks.
pub fn exact_dispersion_cube(
    set: &PointSet,
    config: &SolverConfig,
) -> Result<DispersionResult, SolverError> {
    let n = set.len() as f64;
    let candidates = n.powi(set.dim() as i32) * (n + 1.0).powi(set.dim() as i32);
    if candidates > config.budget {
        return Err(SolverError::BudgetExceeded { candidates, budget: config.budget });
    }
    Ok(cube::solve(set))
}

/// Exact dispersion over periodic boxes. An empty set has no defined value;
/// by convention it reports 1 (the supremum over the unconstrained family)
/// with an explanatory note.
pub fn exact_dispersion_torus(
    set: &PointSet,
    config: &SolverConfig,
) -> Result<DispersionResult, SolverError> {
    let n = set.len() as f64;
    let candidates = n.powi(2 * set.dim() as i32);
    if candidates > config.budget {
        return Err(SolverError::BudgetExceeded { candidates, budget: config.budget });
    }
    Ok(torus::solve(set))
}

/// Approximate dispersion over boxes with endpoints on the uniform grid
/// `{0, 1/r, ..., 1}`. Always a lower bound on the exact value, and at most
/// `2d/r` below it.
pub fn grid_dispersion(
    set: &PointSet,
    mode: Mode,
    resolution: usize,
) -> Result<DispersionResult, SolverError> {
    if resolution < 2 {
        return Err(SolverError::BadResolution { resolution });
    }
    Ok(match mode {
        Mode::Cube => grid::solve_cube(set, resolution),
        Mode::Torus => grid::solve_torus(set, resolution),
    })
}

/// The cube blocking predicate: does `p` exclude the candidate `[lo, hi)^d`
/// from the supremum? Exposed so witnesses can be re-checked.
pub fn blocks_cube_candidate(p: &Point, candidate: &AxisBox) -> bool {
    debug_assert_eq!(p.dim(), candidate.dim());
    candidate.intervals().iter().zip(p.coords()).all(|(iv, &c)| {
        c < iv.hi() && (c > iv.lo() || (c == iv.lo() && iv.lo() == 0.0))
    })
}

/// The torus blocking predicate: open membership on every axis.
pub fn blocks_torus_candidate(p: &Point, candidate: &TorusBox) -> bool {
    debug_assert_eq!(p.dim(), candidate.dim());
    candidate.intervals().iter().zip(p.coords()).all(|(iv, &c)| iv.contains(c))
}

/// True when no point of the set blocks the witness of `result`.
pub fn witness_is_unblocked(set: &PointSet, result: &DispersionResult) -> bool {
    match &result.witness {
        AnyBox::Cube(b) => set.points().iter().all(|p| !blocks_cube_candidate(p, b)),
        AnyBox::Torus(b) => set.points().iter().all(|p| !blocks_torus_candidate(p, b)),
    }
}

/// A candidate under comparison: volume first, then lexicographic order of
/// the flattened endpoint list `(lo_1, hi_1, lo_2, hi_2, ...)` so that ties
/// resolve identically for any traversal order.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Candidate {
    pub volume: f64,
    pub endpoints: Vec<(f64, f64)>,
}

impl Candidate {
    pub fn better_than(&self, other: &Candidate) -> bool {
        if self.volume != other.volume {
            return self.volume > other.volume;
        }
        for (a, b) in self.endpoints.iter().zip(&other.endpoints) {
            if a.0 != b.0 {
                return a.0 < b.0;
            }
            if a.1 != b.1 {
                return a.1 < b.1;
            }
        }
        false
    }
}

pub(crate) fn merge_best(a: Option<Candidate>, b: Option<Candidate>) -> Option<Candidate> {
    match (a, b) {
        (Some(x), Some(y)) => {
            if x.better_than(&y) {
                Some(x)
            } else {
                Some(y)
            }
        }
        (x, None) => x,
        (None, y) => y,
    }
}

/// Monotone shared lower bound on the best volume, used only for strict
/// pruning so tie candidates are still explored on every worker.
pub(crate) struct VolumeBound(AtomicU64);

impl VolumeBound {
    pub fn new() -> Self {
        VolumeBound(AtomicU64::new(0f64.to_bits()))
    }

    pub fn get(&self) -> f64 {
        f64::from_bits(self.0.load(Ordering::Relaxed))
    }

    /// Bit patterns of nonnegative floats order like the floats themselves.
    pub fn raise(&self, volume: f64) {
        debug_assert!(volume >= 0.0);
        self.0.fetch_max(volume.to_bits(), Ordering::Relaxed);
    }
}
