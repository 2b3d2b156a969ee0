//! Exact cube dispersion.
//!
//! Candidates take `lo` from `{0} u {point coords}` and `hi` from
//! `{point coords} u {1}` per axis. The search fixes axes left to right,
//! keeping the set of points that still block on every fixed axis; when that
//! set empties the best completion is the full interval everywhere, and the
//! last axis reduces to the widest valid gap between the surviving
//! coordinates. Interior axes iterate pairs in decreasing length with a
//! strict volume-bound prune, so equal-volume ties all surface and the
//! lexicographically smallest witness wins.
//!
//! Dimension 2 gets a sweep instead: for each left anchor, points enter in
//! x-order while a gap structure maintains the widest y-gap, giving
//! `O(n^2 log n)` overall. Both paths share blocking semantics exactly; a
//! unit test pins them against each other.

use super::{merge_best, Candidate, DispersionResult, Method, Mode, VolumeBound};
use crate::geometry::{AxisBox, Interval, PointSet};
use rayon::prelude::*;
use std::collections::BTreeMap;

pub(super) fn solve(set: &PointSet) -> DispersionResult {
    let dim = set.dim();
    if set.is_empty() {
        return result_from(
            Candidate { volume: 1.0, endpoints: vec![(0.0, 1.0); dim] },
            set,
            None,
        );
    }
    let best = if dim == 2 { sweep_candidate(set) } else { recursive_candidate(set) };
    match best {
        Some(cand) => result_from(cand, set, None),
        None => degenerate(set),
    }
}

/// Every candidate blocked. Only possible when points sit on the lower
/// boundary faces so that no side can escape them; the supremum is then
/// under-approximated by convention.
fn degenerate(set: &PointSet) -> DispersionResult {
    DispersionResult {
        value: 0.0,
        witness: AxisBox::full_cube(set.dim()).expect("valid").into(),
        mode: Mode::Cube,
        method: Method::Exact,
        n: set.len(),
        dim: set.dim(),
        note: Some(
            "every candidate box is blocked by boundary points; reporting 0 \
             (the full-cube witness shown is blocked)"
                .to_string(),
        ),
    }
}

fn result_from(cand: Candidate, set: &PointSet, note: Option<String>) -> DispersionResult {
    let intervals = cand
        .endpoints
        .iter()
        .map(|&(lo, hi)| Interval::new(lo, hi).expect("candidate endpoints are ordered"))
        .collect();
    let witness = AxisBox::new(intervals).expect("candidate box is valid");
    DispersionResult {
        value: cand.volume,
        witness: witness.into(),
        mode: Mode::Cube,
        method: Method::Exact,
        n: set.len(),
        dim: set.dim(),
        note,
    }
}

/// A point keeps blocking the candidate on this axis?
#[inline]
pub(super) fn blocks_axis(c: f64, lo: f64, hi: f64) -> bool {
    c < hi && (c > lo || (c == lo && lo == 0.0))
}

/// Candidate (length, lo, hi) pairs on one axis for the surviving points,
/// longest first, lexicographic within equal lengths.
fn axis_pairs(coords: &[f64], alive: &[u32]) -> Vec<(f64, f64, f64)> {
    let mut vals: Vec<f64> = alive.iter().map(|&i| coords[i as usize]).collect();
    vals.sort_unstable_by(f64::total_cmp);
    vals.dedup();
    let mut lows = Vec::with_capacity(vals.len() + 1);
    if vals.first() != Some(&0.0) {
        lows.push(0.0);
    }
    lows.extend_from_slice(&vals);
    let mut highs = vals;
    if highs.last() != Some(&1.0) {
        highs.push(1.0);
    }
    let mut pairs = Vec::with_capacity(lows.len() * highs.len() / 2);
    for &lo in &lows {
        for &hi in highs.iter().rev() {
            if hi <= lo {
                break;
            }
            pairs.push((hi - lo, lo, hi));
        }
    }
    pairs.sort_unstable_by(|a, b| {
        b.0.total_cmp(&a.0).then(a.1.total_cmp(&b.1)).then(a.2.total_cmp(&b.2))
    });
    pairs
}

/// Widest valid gap between surviving coordinates on the final axis.
/// A gap starting at 0 is invalid when a surviving point sits exactly at 0.
fn best_last_gap(mut vals: Vec<f64>) -> Option<(f64, f64, f64)> {
    vals.sort_unstable_by(f64::total_cmp);
    vals.dedup();
    let has_zero = vals.first() == Some(&0.0);
    let mut best: Option<(f64, f64, f64)> = None;
    let mut prev = 0.0;
    for &v in vals.iter().chain(std::iter::once(&1.0)) {
        let len = v - prev;
        if len > 0.0 && !(prev == 0.0 && has_zero) && best.map_or(true, |(b, _, _)| len > b) {
            best = Some((len, prev, v));
        }
        prev = v;
    }
    best
}

struct Search<'a> {
    coords: Vec<&'a [f64]>,
    dim: usize,
    bound: VolumeBound,
}

fn recursive_candidate(set: &PointSet) -> Option<Candidate> {
    let dim = set.dim();
    let columns: Vec<Vec<f64>> = (0..dim).map(|axis| set.axis_coords(axis)).collect();
    let all: Vec<u32> = (0..set.len() as u32).collect();
    if dim == 1 {
        let (len, lo, hi) = best_last_gap(columns[0].clone())?;
        return Some(Candidate { volume: len, endpoints: vec![(lo, hi)] });
    }
    let search = Search {
        coords: columns.iter().map(|c| c.as_slice()).collect(),
        dim,
        bound: VolumeBound::new(),
    };
    let root_pairs = axis_pairs(search.coords[0], &all);
    root_pairs
        .par_iter()
        .map(|&(len, lo, hi)| {
            if len < search.bound.get() {
                return None;
            }
            let alive: Vec<u32> = all
                .iter()
                .copied()
                .filter(|&i| blocks_axis(search.coords[0][i as usize], lo, hi))
                .collect();
            let mut local = None;
            let mut endpoints = vec![(lo, hi)];
            search.recurse(1, len, &mut endpoints, &alive, &mut local);
            local
        })
        .reduce(|| None, merge_best)
}

impl<'a> Search<'a> {
    fn recurse(
        &self,
        axis: usize,
        partial: f64,
        endpoints: &mut Vec<(f64, f64)>,
        alive: &[u32],
        local: &mut Option<Candidate>,
    ) {
        if alive.is_empty() {
            // nothing blocks: the full interval everywhere is optimal
            let mut full = endpoints.clone();
            full.resize(self.dim, (0.0, 1.0));
            self.consider(partial, full, local);
            return;
        }
        if axis == self.dim - 1 {
            let vals = alive.iter().map(|&i| self.coords[axis][i as usize]).collect();
            if let Some((len, lo, hi)) = best_last_gap(vals) {
                let mut full = endpoints.clone();
                full.push((lo, hi));
                self.consider(partial * len, full, local);
            }
            return;
        }
        for (len, lo, hi) in axis_pairs(self.coords[axis], alive) {
            let ceiling = partial * len;
            if ceiling < self.bound.get() {
                break; // pairs are sorted by length; the rest only get worse
            }
            let next: Vec<u32> = alive
                .iter()
                .copied()
                .filter(|&i| blocks_axis(self.coords[axis][i as usize], lo, hi))
                .collect();
            endpoints.push((lo, hi));
            self.recurse(axis + 1, ceiling, endpoints, &next, local);
            endpoints.pop();
        }
    }

    fn consider(&self, volume: f64, endpoints: Vec<(f64, f64)>, local: &mut Option<Candidate>) {
        let cand = Candidate { volume, endpoints };
        if local.as_ref().map_or(true, |b| cand.better_than(b)) {
            self.bound.raise(cand.volume);
            *local = Some(cand);
        }
    }
}

/// Widest-gap structure over a growing set of y-coordinates: insertion
/// splits one gap into two, queries return the widest valid gap with the
/// smallest start. Keys are f64 bit patterns (order-isomorphic for
/// nonnegative floats).
struct GapSet {
    values: BTreeMap<u64, u32>,
    /// gap length bits -> (gap start bits -> gap end bits)
    gaps: BTreeMap<u64, BTreeMap<u64, u64>>,
}

impl GapSet {
    fn new() -> GapSet {
        let mut gaps = BTreeMap::new();
        gaps.insert(1f64.to_bits(), BTreeMap::from([(0f64.to_bits(), 1f64.to_bits())]));
        GapSet { values: BTreeMap::new(), gaps }
    }

    fn insert(&mut self, y: f64) {
        let bits = y.to_bits();
        if let Some(count) = self.values.get_mut(&bits) {
            *count += 1;
            return;
        }
        let pred = self
            .values
            .range(..bits)
            .next_back()
            .map_or(0.0, |(&b, _)| f64::from_bits(b));
        let succ = self.values.range(bits..).next().map_or(1.0, |(&b, _)| f64::from_bits(b));
        self.remove_gap(pred, succ);
        self.add_gap(pred, y);
        self.add_gap(y, succ);
        self.values.insert(bits, 1);
    }

    fn add_gap(&mut self, lo: f64, hi: f64) {
        let len = hi - lo;
        if len > 0.0 {
            self.gaps.entry(len.to_bits()).or_default().insert(lo.to_bits(), hi.to_bits());
        }
    }

    fn remove_gap(&mut self, lo: f64, hi: f64) {
        let len = hi - lo;
        if len > 0.0 {
            if let Some(starts) = self.gaps.get_mut(&len.to_bits()) {
                starts.remove(&lo.to_bits());
                if starts.is_empty() {
                    self.gaps.remove(&len.to_bits());
                }
            }
        }
    }

    fn best(&self) -> Option<(f64, f64, f64)> {
        let has_zero = self.values.contains_key(&0u64);
        for (&len_bits, starts) in self.gaps.iter().rev() {
            for (&lo_bits, &hi_bits) in starts {
                if has_zero && lo_bits == 0 {
                    continue;
                }
                return Some((
                    f64::from_bits(len_bits),
                    f64::from_bits(lo_bits),
                    f64::from_bits(hi_bits),
                ));
            }
        }
        None
    }
}

/// The two-dimensional sweep. Anchors run over `{0} u {x coords}`; for each
/// anchor, right edges visit the x-coordinates in order while surviving
/// points' y-values feed the gap structure.
fn sweep_candidate(set: &PointSet) -> Option<Candidate> {
    debug_assert_eq!(set.dim(), 2);
    let mut by_x: Vec<(f64, f64)> =
        set.points().iter().map(|p| (p.coord(0), p.coord(1))).collect();
    by_x.sort_unstable_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    let mut anchors: Vec<f64> = Vec::with_capacity(by_x.len() + 1);
    anchors.push(0.0);
    for &(x, _) in &by_x {
        if x < 1.0 && anchors.last() != Some(&x) {
            anchors.push(x);
        }
    }
    anchors
        .par_iter()
        .map(|&anchor| {
            let mut local: Option<Candidate> = None;
            let mut gaps = GapSet::new();
            // points exactly on the lower boundary block anchors at 0
            let mut idx = 0usize;
            if anchor == 0.0 {
                while idx < by_x.len() && by_x[idx].0 == 0.0 {
                    gaps.insert(by_x[idx].1);
                    idx += 1;
                }
            } else {
                idx = by_x.partition_point(|&(x, _)| x <= anchor);
            }
            let consider = |hi_x: f64, gaps: &GapSet, local: &mut Option<Candidate>| {
                if let Some((gap_len, gap_lo, gap_hi)) = gaps.best() {
                    let cand = Candidate {
                        volume: (hi_x - anchor) * gap_len,
                        endpoints: vec![(anchor, hi_x), (gap_lo, gap_hi)],
                    };
                    if local.as_ref().map_or(true, |b| cand.better_than(b)) {
                        *local = Some(cand);
                    }
                }
            };
            while idx < by_x.len() {
                let x = by_x[idx].0;
                if x >= 1.0 {
                    break;
                }
                consider(x, &gaps, &mut local);
                while idx < by_x.len() && by_x[idx].0 == x {
                    gaps.insert(by_x[idx].1);
                    idx += 1;
                }
            }
            consider(1.0, &gaps, &mut local);
            local
        })
        .reduce(|| None, merge_best)
}
