//! Exact torus dispersion.
//!
//! Candidate endpoints range over the point coordinates themselves (the
//! torus has no boundary to anchor to) and intervals are open, so a point
//! sitting on an endpoint never blocks. The degenerate pair `a == b` is the
//! full circle minus that point, counted with length exactly 1 — it realizes
//! suprema like a single point on the circle.

use super::{merge_best, Candidate, DispersionResult, Method, Mode, VolumeBound};
use crate::geometry::{cyclic_gap, PointSet, TorusBox, TorusInterval};
use rayon::prelude::*;

pub(super) fn solve(set: &PointSet) -> DispersionResult {
    let dim = set.dim();
    if set.is_empty() {
        let intervals =
            (0..dim).map(|_| TorusInterval::punctured(0.0).expect("valid")).collect();
        return DispersionResult {
            value: 1.0,
            witness: TorusBox::new(intervals).expect("valid").into(),
            mode: Mode::Torus,
            method: Method::Exact,
            n: 0,
            dim,
            note: Some(
                "periodic dispersion of the empty set is a convention: no box is \
                 constrained, reporting the supremum 1"
                    .to_string(),
            ),
        };
    }
    let best = recursive_candidate(set).expect("nonempty sets always admit a candidate");
    let intervals = best
        .endpoints
        .iter()
        .map(|&(a, b)| {
            if a == b {
                TorusInterval::punctured(a).expect("valid puncture")
            } else {
                TorusInterval::new(a, b).expect("valid interval")
            }
        })
        .collect();
    DispersionResult {
        value: best.volume,
        witness: TorusBox::new(intervals).expect("valid box").into(),
        mode: Mode::Torus,
        method: Method::Exact,
        n: set.len(),
        dim,
        note: None,
    }
}

/// Open cyclic membership, with `b <= a` covering both wrap and puncture.
#[inline]
pub(super) fn blocks_axis(c: f64, a: f64, b: f64) -> bool {
    if a < b {
        a < c && c < b
    } else {
        c < b || c > a
    }
}

fn interval_length(a: f64, b: f64) -> f64 {
    if a == b {
        1.0
    } else {
        cyclic_gap(a, b)
    }
}

/// All candidate intervals on one axis: ordered pairs of distinct surviving
/// coordinates plus the punctured circle at each coordinate, longest first.
fn axis_pairs(coords: &[f64], alive: &[u32]) -> Vec<(f64, f64, f64)> {
    let mut vals: Vec<f64> = alive.iter().map(|&i| coords[i as usize]).collect();
    vals.sort_unstable_by(f64::total_cmp);
    vals.dedup();
    let mut pairs = Vec::with_capacity(vals.len() * vals.len());
    for &a in &vals {
        for &b in &vals {
            pairs.push((interval_length(a, b), a, b));
        }
    }
    pairs.sort_unstable_by(|x, y| {
        y.0.total_cmp(&x.0).then(x.1.total_cmp(&y.1)).then(x.2.total_cmp(&y.2))
    });
    pairs
}

/// Widest cyclic gap between consecutive surviving coordinates; with one
/// distinct coordinate this is the punctured circle.
fn best_cyclic_gap(coords: &[f64], alive: &[u32]) -> (f64, f64, f64) {
    let mut vals: Vec<f64> = alive.iter().map(|&i| coords[i as usize]).collect();
    vals.sort_unstable_by(f64::total_cmp);
    vals.dedup();
    if vals.len() == 1 {
        return (1.0, vals[0], vals[0]);
    }
    let mut best: Option<(f64, f64, f64)> = None;
    for w in vals.windows(2) {
        let len = cyclic_gap(w[0], w[1]);
        if len > 0.0 && best.map_or(true, |(b, _, _)| len > b) {
            best = Some((len, w[0], w[1]));
        }
    }
    let wrap = (cyclic_gap(*vals.last().unwrap(), vals[0]), *vals.last().unwrap(), vals[0]);
    match best {
        Some(b) if b.0 >= wrap.0 => b,
        _ => wrap,
    }
}

struct Search<'a> {
    coords: Vec<&'a [f64]>,
    axis_minima: Vec<f64>,
    dim: usize,
    bound: VolumeBound,
}

fn recursive_candidate(set: &PointSet) -> Option<Candidate> {
    let dim = set.dim();
    let columns: Vec<Vec<f64>> = (0..dim).map(|axis| set.axis_coords(axis)).collect();
    let all: Vec<u32> = (0..set.len() as u32).collect();
    if dim == 1 {
        let (len, a, b) = best_cyclic_gap(&columns[0], &all);
        return Some(Candidate { volume: len, endpoints: vec![(a, b)] });
    }
    let search = Search {
        coords: columns.iter().map(|c| c.as_slice()).collect(),
        axis_minima: columns
            .iter()
            .map(|c| c.iter().copied().fold(f64::INFINITY, f64::min))
            .collect(),
        dim,
        bound: VolumeBound::new(),
    };
    let root_pairs = axis_pairs(search.coords[0], &all);
    root_pairs
        .par_iter()
        .map(|&(len, a, b)| {
            if len < search.bound.get() {
                return None;
            }
            let alive: Vec<u32> = all
                .iter()
                .copied()
                .filter(|&i| blocks_axis(search.coords[0][i as usize], a, b))
                .collect();
            let mut local = None;
            let mut endpoints = vec![(a, b)];
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
            // nothing blocks: puncture the remaining axes at their smallest
            // coordinate, each contributing length exactly 1
            let mut full = endpoints.clone();
            let mut volume = partial;
            for rest in full.len()..self.dim {
                let c = self.axis_minima[rest];
                full.push((c, c));
                volume *= 1.0;
            }
            self.consider(volume, full, local);
            return;
        }
        if axis == self.dim - 1 {
            let (len, a, b) = best_cyclic_gap(self.coords[axis], alive);
            let mut full = endpoints.clone();
            full.push((a, b));
            self.consider(partial * len, full, local);
            return;
        }
        for (len, a, b) in axis_pairs(self.coords[axis], alive) {
            let ceiling = partial * len;
            if ceiling < self.bound.get() {
                break;
            }
            let next: Vec<u32> = alive
                .iter()
                .copied()
                .filter(|&i| blocks_axis(self.coords[axis][i as usize], a, b))
                .collect();
            endpoints.push((a, b));
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

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Point, PointSet};

    fn set_of(coords: &[&[f64]]) -> PointSet {
        PointSet::new(coords.iter().map(|c| Point::new(c.to_vec()).unwrap()).collect()).unwrap()
    }

    #[test]
    fn cyclic_gap_cases() {
        let coords = [0.1, 0.4, 0.8];
        let all = [0u32, 1, 2];
        let (len, a, b) = best_cyclic_gap(&coords, &all);
        assert!((len - 0.4).abs() < 1e-15);
        assert_eq!((a, b), (0.4, 0.8));
        // wrap gap wins
        let coords = [0.4, 0.5, 0.6];
        let (len, a, b) = best_cyclic_gap(&coords, &all);
        assert!((len - 0.8).abs() < 1e-15);
        assert_eq!((a, b), (0.6, 0.4));
        // single distinct value: punctured circle
        let coords = [0.3, 0.3];
        let (len, a, b) = best_cyclic_gap(&coords, &[0, 1]);
        assert_eq!(len, 1.0);
        assert_eq!((a, b), (0.3, 0.3));
    }

    #[test]
    fn grid_points_on_the_torus() {
        // 2x2 grid: every empty periodic box has volume at most 1/2
        let set = set_of(&[&[0.0, 0.0], &[0.5, 0.0], &[0.0, 0.5], &[0.5, 0.5]]);
        let res = solve(&set);
        assert_eq!(res.value, 0.5);
        assert!(super::super::witness_is_unblocked(&set, &res));
    }

    #[test]
    fn lattice_shift_does_not_change_value() {
        let base = [[0.0, 0.0], [0.5, 0.0], [0.0, 0.5], [0.5, 0.5]];
        for shift in [0.13, 0.377, 0.9] {
            let shifted: Vec<Vec<f64>> = base
                .iter()
                .map(|p| p.iter().map(|c| (c + shift) % 1.0).collect())
                .collect();
            let refs: Vec<&[f64]> = shifted.iter().map(|v| v.as_slice()).collect();
            let res = solve(&set_of(&refs));
            assert!((res.value - 0.5).abs() < 1e-12, "shift {shift}");
        }
    }

    #[test]
    fn punctured_axes_fill_unblocked_dimensions() {
        // both points share x = 0.2, so the y-axis candidates can clear the
        // whole circle once x excludes them
        let set = set_of(&[&[0.2, 0.3], &[0.2, 0.7]]);
        let res = solve(&set);
        assert_eq!(res.value, 1.0);
        let crate::geometry::AnyBox::Torus(b) = &res.witness else { panic!() };
        assert!(b.interval(0).is_punctured());
    }
}
