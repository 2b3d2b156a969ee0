//! Grid-restricted dispersion: endpoints on `{0, 1/r, ..., 1}`.
//!
//! Always a lower bound on the exact value and at most `2d/r` below it
//! (each face moves by less than `1/r` when an optimal box shrinks onto the
//! grid). Candidate endpoints snap the point coordinates onto the grid, so
//! the search stays polynomial in `n` regardless of the resolution.

use super::{merge_best, Candidate, DispersionResult, Method, Mode, VolumeBound};
use crate::geometry::{cyclic_gap, AxisBox, Interval, PointSet, TorusBox, TorusInterval};
use rayon::prelude::*;
use std::collections::BTreeSet;

fn gval(t: usize, r: usize) -> f64 {
    t as f64 / r as f64
}

/// Smallest grid step with value at least `x`; comparisons run on the actual
/// grid values so on-grid inputs snap to themselves.
fn snap_up(x: f64, r: usize) -> usize {
    let mut t = ((x * r as f64).floor() as i64 - 1).max(0) as usize;
    while gval(t, r) < x {
        t += 1;
    }
    t
}

/// Largest grid step with value at most `x`.
fn snap_down(x: f64, r: usize) -> usize {
    let mut t = (((x * r as f64).floor() as i64) + 1).min(r as i64) as usize;
    while t > 0 && gval(t, r) > x {
        t -= 1;
    }
    t
}

pub(super) fn solve_cube(set: &PointSet, r: usize) -> DispersionResult {
    let dim = set.dim();
    let best = if set.is_empty() {
        Some(Candidate { volume: 1.0, endpoints: vec![(0.0, 1.0); dim] })
    } else {
        cube_candidate(set, r)
    };
    let (value, witness, note) = match best {
        Some(c) => {
            let intervals = c
                .endpoints
                .iter()
                .map(|&(lo, hi)| Interval::new(lo, hi).expect("grid endpoints ordered"))
                .collect();
            (c.volume, AxisBox::new(intervals).expect("valid"), None)
        }
        None => (
            0.0,
            AxisBox::full_cube(dim).expect("valid"),
            Some("no empty grid box at this resolution".to_string()),
        ),
    };
    DispersionResult {
        value,
        witness: witness.into(),
        mode: Mode::Cube,
        method: Method::Grid,
        n: set.len(),
        dim,
        note,
    }
}

pub(super) fn solve_torus(set: &PointSet, r: usize) -> DispersionResult {
    let dim = set.dim();
    if set.is_empty() {
        let intervals =
            (0..dim).map(|_| TorusInterval::punctured(0.0).expect("valid")).collect();
        return DispersionResult {
            value: 1.0,
            witness: TorusBox::new(intervals).expect("valid").into(),
            mode: Mode::Torus,
            method: Method::Grid,
            n: 0,
            dim,
            note: Some(
                "periodic dispersion of the empty set is a convention: no box is \
                 constrained, reporting the supremum 1"
                    .to_string(),
            ),
        };
    }
    let best = torus_candidate(set, r);
    let (value, witness, note) = match best {
        Some(c) => {
            let intervals = c
                .endpoints
                .iter()
                .map(|&(a, b)| TorusInterval::new(a, b).expect("distinct grid endpoints"))
                .collect();
            (c.volume, TorusBox::new(intervals).expect("valid"), None)
        }
        None => (
            0.0,
            TorusBox::new((0..dim).map(|_| TorusInterval::punctured(0.0).unwrap()).collect())
                .expect("valid"),
            Some("no empty periodic grid box at this resolution".to_string()),
        ),
    };
    DispersionResult {
        value,
        witness: witness.into(),
        mode: Mode::Torus,
        method: Method::Grid,
        n: set.len(),
        dim,
        note,
    }
}

fn sorted_vals(coords: &[f64], alive: &[u32]) -> Vec<f64> {
    let mut vals: Vec<f64> = alive.iter().map(|&i| coords[i as usize]).collect();
    vals.sort_unstable_by(f64::total_cmp);
    vals.dedup();
    vals
}

/// Candidate grid pairs on one cube axis: lower endpoints snap the blocking
/// coordinates up (one step further when the coordinate is exactly 0), upper
/// endpoints snap them down.
fn cube_axis_pairs(coords: &[f64], alive: &[u32], r: usize) -> Vec<(f64, f64, f64)> {
    let vals = sorted_vals(coords, alive);
    let mut lows: BTreeSet<usize> = BTreeSet::from([0]);
    let mut highs: BTreeSet<usize> = BTreeSet::from([r]);
    for &c in &vals {
        lows.insert(snap_up(c, r));
        if c == 0.0 {
            lows.insert(1);
        }
        highs.insert(snap_down(c, r));
    }
    let mut pairs = Vec::new();
    for &lo in &lows {
        for &hi in highs.iter().rev() {
            if hi <= lo {
                break;
            }
            pairs.push((gval(hi, r) - gval(lo, r), gval(lo, r), gval(hi, r)));
        }
    }
    pairs.sort_unstable_by(|a, b| {
        b.0.total_cmp(&a.0).then(a.1.total_cmp(&b.1)).then(a.2.total_cmp(&b.2))
    });
    pairs
}

/// Widest grid interval within any gap of the surviving coordinates.
fn best_grid_gap(coords: &[f64], alive: &[u32], r: usize) -> Option<(f64, f64, f64)> {
    let vals = sorted_vals(coords, alive);
    let has_zero = vals.first() == Some(&0.0);
    let mut best: Option<(f64, f64, f64)> = None;
    let mut prev = 0.0;
    for &v in vals.iter().chain(std::iter::once(&1.0)) {
        if v > prev {
            let mut tlo = snap_up(prev, r);
            if prev == 0.0 && has_zero {
                tlo = tlo.max(1);
            }
            let thi = snap_down(v, r);
            if thi > tlo {
                let len = gval(thi, r) - gval(tlo, r);
                if best.map_or(true, |(b, _, _)| len > b) {
                    best = Some((len, gval(tlo, r), gval(thi, r)));
                }
            }
        }
        prev = v;
    }
    best
}

fn cube_candidate(set: &PointSet, r: usize) -> Option<Candidate> {
    let dim = set.dim();
    let columns: Vec<Vec<f64>> = (0..dim).map(|axis| set.axis_coords(axis)).collect();
    let all: Vec<u32> = (0..set.len() as u32).collect();
    if dim == 1 {
        let (len, lo, hi) = best_grid_gap(&columns[0], &all, r)?;
        return Some(Candidate { volume: len, endpoints: vec![(lo, hi)] });
    }
    let coords: Vec<&[f64]> = columns.iter().map(|c| c.as_slice()).collect();
    let bound = VolumeBound::new();
    cube_axis_pairs(coords[0], &all, r)
        .par_iter()
        .map(|&(len, lo, hi)| {
            if len < bound.get() {
                return None;
            }
            let alive: Vec<u32> = all
                .iter()
                .copied()
                .filter(|&i| super::cube::blocks_axis(coords[0][i as usize], lo, hi))
                .collect();
            let mut local = None;
            let mut endpoints = vec![(lo, hi)];
            cube_recurse(&coords, r, 1, len, &mut endpoints, &alive, &bound, &mut local);
            local
        })
        .reduce(|| None, merge_best)
}

#[allow(clippy::too_many_arguments)]
fn cube_recurse(
    coords: &[&[f64]],
    r: usize,
    axis: usize,
    partial: f64,
    endpoints: &mut Vec<(f64, f64)>,
    alive: &[u32],
    bound: &VolumeBound,
    local: &mut Option<Candidate>,
) {
    let dim = coords.len();
    if alive.is_empty() {
        let mut full = endpoints.clone();
        full.resize(dim, (0.0, 1.0));
        offer(partial, full, bound, local);
        return;
    }
    if axis == dim - 1 {
        if let Some((len, lo, hi)) = best_grid_gap(coords[axis], alive, r) {
            let mut full = endpoints.clone();
            full.push((lo, hi));
            offer(partial * len, full, bound, local);
        }
        return;
    }
    for (len, lo, hi) in cube_axis_pairs(coords[axis], alive, r) {
        let ceiling = partial * len;
        if ceiling < bound.get() {
            break;
        }
        let next: Vec<u32> = alive
            .iter()
            .copied()
            .filter(|&i| super::cube::blocks_axis(coords[axis][i as usize], lo, hi))
            .collect();
        endpoints.push((lo, hi));
        cube_recurse(coords, r, axis + 1, ceiling, &mut *endpoints, &next, bound, local);
        endpoints.pop();
    }
}

fn offer(volume: f64, endpoints: Vec<(f64, f64)>, bound: &VolumeBound, local: &mut Option<Candidate>) {
    let cand = Candidate { volume, endpoints };
    if local.as_ref().map_or(true, |b| cand.better_than(b)) {
        bound.raise(cand.volume);
        *local = Some(cand);
    }
}

/// Candidate periodic grid pairs: snapped coordinates one step either way,
/// all ordered combinations of distinct grid points.
fn torus_axis_pairs(coords: &[f64], alive: &[u32], r: usize) -> Vec<(f64, f64, f64)> {
    let vals = sorted_vals(coords, alive);
    let mut starts: BTreeSet<usize> = BTreeSet::new();
    let mut ends: BTreeSet<usize> = BTreeSet::new();
    for &c in &vals {
        let up = snap_up(c, r) % r;
        starts.insert(up);
        starts.insert((up + 1) % r);
        let down = snap_down(c, r) % r;
        ends.insert(down);
        ends.insert((down + r - 1) % r);
    }
    let mut pairs = Vec::new();
    for &a in &starts {
        for &b in &ends {
            if a == b {
                continue;
            }
            let (av, bv) = (gval(a, r), gval(b, r));
            pairs.push((cyclic_gap(av, bv), av, bv));
        }
    }
    pairs.sort_unstable_by(|x, y| {
        y.0.total_cmp(&x.0).then(x.1.total_cmp(&y.1)).then(x.2.total_cmp(&y.2))
    });
    pairs
}

fn torus_candidate(set: &PointSet, r: usize) -> Option<Candidate> {
    let dim = set.dim();
    let columns: Vec<Vec<f64>> = (0..dim).map(|axis| set.axis_coords(axis)).collect();
    let all: Vec<u32> = (0..set.len() as u32).collect();
    let coords: Vec<&[f64]> = columns.iter().map(|c| c.as_slice()).collect();
    let minima: Vec<f64> =
        columns.iter().map(|c| c.iter().copied().fold(f64::INFINITY, f64::min)).collect();
    let bound = VolumeBound::new();
    if dim == 1 {
        let mut local = None;
        let mut endpoints = Vec::new();
        torus_recurse(&coords, &minima, r, 0, 1.0, &mut endpoints, &all, &bound, &mut local);
        return local;
    }
    torus_axis_pairs(coords[0], &all, r)
        .par_iter()
        .map(|&(len, a, b)| {
            if len < bound.get() {
                return None;
            }
            let alive: Vec<u32> = all
                .iter()
                .copied()
                .filter(|&i| super::torus::blocks_axis(coords[0][i as usize], a, b))
                .collect();
            let mut local = None;
            let mut endpoints = vec![(a, b)];
            torus_recurse(&coords, &minima, r, 1, len, &mut endpoints, &alive, &bound, &mut local);
            local
        })
        .reduce(|| None, merge_best)
}

#[allow(clippy::too_many_arguments)]
fn torus_recurse(
    coords: &[&[f64]],
    minima: &[f64],
    r: usize,
    axis: usize,
    partial: f64,
    endpoints: &mut Vec<(f64, f64)>,
    alive: &[u32],
    bound: &VolumeBound,
    local: &mut Option<Candidate>,
) {
    let dim = coords.len();
    if alive.is_empty() {
        // nothing blocks: give each remaining axis the longest grid
        // interval, anchored at its smallest snapped coordinate
        let mut full = endpoints.clone();
        let mut volume = partial;
        for rest in full.len()..dim {
            let a_t = snap_up(minima[rest], r) % r;
            let b_t = (a_t + r - 1) % r;
            let (av, bv) = (gval(a_t, r), gval(b_t, r));
            volume *= cyclic_gap(av, bv);
            full.push((av, bv));
        }
        offer(volume, full, bound, local);
        return;
    }
    if axis == dim {
        return; // still blocked after all axes
    }
    for (len, a, b) in torus_axis_pairs(coords[axis], alive, r) {
        let ceiling = partial * len;
        if ceiling < bound.get() {
            break;
        }
        let next: Vec<u32> = alive
            .iter()
            .copied()
            .filter(|&i| super::torus::blocks_axis(coords[axis][i as usize], a, b))
            .collect();
        endpoints.push((a, b));
        torus_recurse(coords, minima, r, axis + 1, ceiling, &mut *endpoints, &next, bound, local);
        endpoints.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point;

    fn set_of(coords: &[&[f64]]) -> PointSet {
        PointSet::new(coords.iter().map(|c| Point::new(c.to_vec()).unwrap()).collect()).unwrap()
    }

    #[test]
    fn snapping_is_inclusive() {
        assert_eq!(snap_up(0.5, 2), 1);
        assert_eq!(snap_down(0.5, 2), 1);
        assert_eq!(snap_up(0.4999, 2), 1);
        assert_eq!(snap_down(0.4999, 2), 0);
        assert_eq!(snap_up(0.0, 7), 0);
        assert_eq!(snap_down(1.0, 7), 7);
        for t in 0..=200usize {
            let x = gval(t, 200);
            assert_eq!(snap_up(x, 200), t);
            assert_eq!(snap_down(x, 200), t);
        }
    }

    #[test]
    fn aligned_point_gives_exact_half() {
        let set = set_of(&[&[0.5, 0.5]]);
        let res = solve_cube(&set, 2);
        assert_eq!(res.value, 0.5);
        assert_eq!(res.witness.volume(), 0.5);
    }

    #[test]
    fn grid_value_is_a_lower_bound_with_bounded_gap() {
        // exhaustive cross-check against a brute force over all grid pairs
        for seed in 0..12u64 {
            let mut rng = crate::sampler::stream_rng(seed, 2);
            let set = crate::sampler::sample_uniform_with(4, 2, &mut rng);
            for r in [3usize, 7, 10] {
                let fast = solve_cube(&set, r).value;
                let brute = brute_force_cube(&set, r);
                assert_eq!(fast, brute, "seed {seed}, r {r}");
            }
        }
    }

    fn brute_force_cube(set: &PointSet, r: usize) -> f64 {
        let mut best = 0.0f64;
        for lo0 in 0..r {
            for hi0 in lo0 + 1..=r {
                for lo1 in 0..r {
                    for hi1 in lo1 + 1..=r {
                        let cand = [
                            (gval(lo0, r), gval(hi0, r)),
                            (gval(lo1, r), gval(hi1, r)),
                        ];
                        let blocked = set.points().iter().any(|p| {
                            cand.iter().zip(p.coords()).all(|(&(lo, hi), &c)| {
                                super::super::cube::blocks_axis(c, lo, hi)
                            })
                        });
                        if !blocked {
                            let vol = (cand[0].1 - cand[0].0) * (cand[1].1 - cand[1].0);
                            best = best.max(vol);
                        }
                    }
                }
            }
        }
        best
    }

    #[test]
    fn torus_grid_matches_brute_force() {
        for seed in 0..12u64 {
            let mut rng = crate::sampler::stream_rng(seed, 4);
            let set = crate::sampler::sample_uniform_with(3, 2, &mut rng);
            for r in [3usize, 5, 8] {
                let fast = solve_torus(&set, r).value;
                let brute = brute_force_torus(&set, r);
                assert_eq!(fast, brute, "seed {seed}, r {r}");
            }
        }
    }

    fn brute_force_torus(set: &PointSet, r: usize) -> f64 {
        let mut best = 0.0f64;
        for a0 in 0..r {
            for b0 in 0..r {
                if a0 == b0 {
                    continue;
                }
                for a1 in 0..r {
                    for b1 in 0..r {
                        if a1 == b1 {
                            continue;
                        }
                        let cand = [
                            (gval(a0, r), gval(b0, r)),
                            (gval(a1, r), gval(b1, r)),
                        ];
                        let blocked = set.points().iter().any(|p| {
                            cand.iter().zip(p.coords()).all(|(&(a, b), &c)| {
                                super::super::torus::blocks_axis(c, a, b)
                            })
                        });
                        if !blocked {
                            let vol =
                                cyclic_gap(cand[0].0, cand[0].1) * cyclic_gap(cand[1].0, cand[1].1);
                            best = best.max(vol);
                        }
                    }
                }
            }
        }
        best
    }
}
