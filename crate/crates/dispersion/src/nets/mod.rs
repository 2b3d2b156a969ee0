//! Cover families ("nets") for axis-parallel boxes of volume at least `eps`.
//!
//! A `delta`-net is a family of boxes such that every box `B` with
//! `|B| >= eps` contains a member `B0` with `|B0| >= (1 - delta)|B|`. The
//! dinet variant drops `B0 in B` and instead guarantees that every point of
//! `B0` lands inside `B` after clamping to `[eps, 1-eps]` — exactly what a
//! union-bound argument over random points needs.
//!
//! Families are represented implicitly: each construction exposes
//!
//! * a *cover oracle* mapping a concrete box to its approximating member,
//! * an explicit *enumerator*, feasible only at tiny parameters and guarded
//!   by a hard cap,
//! * a *cardinality accountant* returning the size bound in log space.
//!
//! Cardinalities grow astronomically except at toy parameters, while all the
//! downstream point-count arithmetic only needs the cover map and the log of
//! the family size.
//!
//! Three constructions are provided:
//!
//! | name     | guarantee            | regime                          |
//! |----------|----------------------|---------------------------------|
//! | `netgen` | 1/2-net, cube+torus  | any `m >= 2`, `eps in (0,1)`    |
//! | `netd`   | 3/4-net, cube only   | `eps <= 1/4`, `d >= 4 ln(1/eps)`|
//! | `dinet`  | 1/2-dinet, cube only | `eps <= 1/2`, `d >= ln(1/eps)/eps` |

mod dinet;
mod enumerate;
mod netd;
mod netgen;
mod order;

pub use dinet::{dinet_cardinality_bound, dinet_cover, DinetBound, DinetParams};
pub use enumerate::{netgen_enumerate, netgen_family_count, NetGenEnumeration};
pub use netd::{netd_cardinality_bound, netd_cover, NetDBound, NetDParams};
pub use netgen::{
    netgen_cardinality_bound, netgen_cover_cube, netgen_cover_torus, NetGenBound, NetGenParams,
};
pub use order::{AxisOrder, DyadicPartition};

use crate::geometry::{AnyBox, Point};
use serde::Serialize;
use thiserror::Error;

/// Errors from net construction and covering.
#[derive(Debug, Error, PartialEq)]
pub enum NetError {
    #[error("net constructions need dimension >= 2, got {dim}")]
    BadDimension { dim: usize },
    #[error("eps {eps} outside the admissible range {range}")]
    BadEps { eps: f64, range: &'static str },
    #[error("box below volume threshold: volume {volume} < eps {eps}")]
    BoxBelowThreshold { volume: f64, eps: f64 },
    #[error("outside net-d regime: need d >= 4 ln(1/eps) = {need}, got d = {d}")]
    OutsideNetDRegime { d: usize, need: f64 },
    #[error("outside dinet regime: need d >= ln(1/eps)/eps = {need}, got d = {d}")]
    OutsideDinetRegime { d: usize, need: f64 },
    #[error("enumeration bound exceeds cap: log bound {log_bound:.3} > ln(cap) = {log_cap:.3}")]
    EnumerationTooLarge { log_bound: f64, log_cap: f64 },
    #[error("punctured torus intervals cannot be covered")]
    PuncturedUnsupported,
    #[error("box dimension {got} does not match construction dimension {expected}")]
    DimensionMismatch { expected: usize, got: usize },
}

/// Clamp of the unit interval into `[eps, 1-eps]`: coordinates closer than
/// `eps` to the boundary are pulled inward, everything else is untouched.
/// At `eps = 1/2` the band degenerates and everything maps to the midpoint.
///
/// ```
/// use dispersion::nets::boundary_clamp;
/// assert_eq!(boundary_clamp(0.05, 0.1), 0.1);
/// assert_eq!(boundary_clamp(0.5, 0.1), 0.5);
/// assert_eq!(boundary_clamp(0.97, 0.1), 0.9);
/// ```
pub fn boundary_clamp(t: f64, eps: f64) -> f64 {
    debug_assert!((0.0..=1.0).contains(&t));
    debug_assert!(eps > 0.0 && eps <= 0.5);
    if t < eps {
        eps
    } else if t > 1.0 - eps {
        1.0 - eps
    } else {
        t
    }
}

/// Pointwise extension of [`boundary_clamp`] to points.
pub fn clamp_point(p: &Point, eps: f64) -> Point {
    let coords = p.coords().iter().map(|&c| boundary_clamp(c, eps)).collect();
    Point::new(coords).expect("clamp keeps coordinates in [0,1]")
}

/// Identifies which family member a cover oracle produced: the partition (or
/// active subset) and the grid steps that define the member.
///
/// Axis indices inside `Netd`/`Dinet` inner families are positions within the
/// dense/active sub-box; the `dense_axes`/`active_axes` vectors give the
/// mapping back to original axes.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "construction", rename_all = "lowercase")]
pub enum CoverFamily {
    Netgen {
        /// Axes grouped by grid level, coarsest spacing last.
        blocks: Vec<Vec<usize>>,
        /// Per axis: (block, lower grid step, upper grid step).
        grid_steps: Vec<GridStep>,
    },
    Netd {
        dense_axes: Vec<usize>,
        inner: Box<CoverFamily>,
        long_blocks: Vec<Vec<usize>>,
        /// Per long axis: endpoints `lo_step * spacing` and `1 - hi_step * spacing`.
        long_pairs: Vec<LongPair>,
    },
    Dinet {
        active_axes: Vec<usize>,
        inner: Box<CoverFamily>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridStep {
    pub axis: usize,
    pub block: usize,
    pub lo: usize,
    pub hi: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LongPair {
    pub axis: usize,
    pub block: usize,
    pub lo_step: usize,
    pub hi_step: usize,
}

/// A net element produced by a cover oracle, with the family coordinates
/// that identify it and its volume ratio against the covered box.
#[derive(Debug, Clone, PartialEq)]
pub struct CoverResult {
    pub element: AnyBox,
    pub family: CoverFamily,
    pub ratio: f64,
}

/// Smallest grid index `t <= max_idx` with `t * spacing >= x`, comparing the
/// actual products so that inputs already on the grid snap to themselves.
/// `None` if even the last grid value lies below `x`.
pub(crate) fn snap_up_index(x: f64, spacing: f64, max_idx: usize) -> Option<usize> {
    let mut t = ((x / spacing).floor() as i64 - 1).max(0);
    while (t as usize) <= max_idx {
        if (t as f64) * spacing >= x {
            return Some(t as usize);
        }
        t += 1;
    }
    None
}

/// Largest grid index `t <= max_idx` with `t * spacing <= x`.
pub(crate) fn snap_down_index(x: f64, spacing: f64, max_idx: usize) -> usize {
    let mut t = ((x / spacing).floor() as i64 + 1).min(max_idx as i64);
    while t > 0 {
        if (t as f64) * spacing <= x {
            return t as usize;
        }
        t -= 1;
    }
    0
}

/// Largest grid index with `t * spacing < 1`, i.e. `floor(1/spacing)` made
/// robust against the division rounding across an integer.
pub(crate) fn grid_size(spacing: f64) -> usize {
    let mut s = (1.0 / spacing).floor() as i64;
    while s > 0 && (s as f64) * spacing > 1.0 {
        s -= 1;
    }
    while ((s + 1) as f64) * spacing <= 1.0 {
        s += 1;
    }
    s.max(0) as usize
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clamp_cases() {
        assert_eq!(boundary_clamp(0.05, 0.1), 0.1);
        assert_eq!(boundary_clamp(0.1, 0.1), 0.1);
        assert_eq!(boundary_clamp(0.5, 0.1), 0.5);
        assert_eq!(boundary_clamp(0.9, 0.1), 0.9);
        assert_eq!(boundary_clamp(0.97, 0.1), 0.9);
        assert_eq!(boundary_clamp(0.0, 0.25), 0.25);
        assert_eq!(boundary_clamp(1.0, 0.25), 0.75);
    }

    #[test]
    fn snapping_is_idempotent_on_grid_points() {
        let spacing = 0.25f64.powf(0.5) / 32.0; // an irrational-ish spacing
        for t in 0..20 {
            let x = (t as f64) * spacing;
            assert_eq!(snap_up_index(x, spacing, 100), Some(t));
            assert_eq!(snap_down_index(x, spacing, 100), t);
        }
    }

    #[test]
    fn snapping_brackets() {
        let spacing = 1.0 / 64.0;
        let s = grid_size(spacing);
        assert_eq!(s, 64);
        let x = 0.1;
        let up = snap_up_index(x, spacing, s).unwrap();
        let down = snap_down_index(x, spacing, s);
        assert!((up as f64) * spacing >= x);
        assert!((up as f64 - 1.0) * spacing < x);
        assert!((down as f64) * spacing <= x);
        assert!((down as f64 + 1.0) * spacing > x);
    }

    #[test]
    fn grid_size_handles_non_divisors() {
        let spacing = 0.0442; // ~ 1/22.6
        let s = grid_size(spacing);
        assert_eq!(s, 22);
        assert!((s as f64) * spacing <= 1.0);
        assert!(((s + 1) as f64) * spacing > 1.0);
    }
}
