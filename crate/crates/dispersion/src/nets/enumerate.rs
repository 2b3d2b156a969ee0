//! Explicit enumeration of the general net, for small parameters only.
//!
//! The family is the union, over all partitions of the axes into the dyadic
//! block sizes, of every box whose endpoints per axis lie on the block's
//! grid. Elements are streamed; a hard cap on the cardinality bound guards
//! against astronomically large parameter choices. Elements shared between
//! partitions are emitted once per partition.

use super::netgen::{netgen_cardinality_bound, NetGenParams};
use super::NetError;
use crate::geometry::{AnyBox, AxisBox, Interval, TorusBox, TorusInterval};

/// Streaming enumeration of every member of the general net.
#[derive(Debug)]
pub struct NetGenEnumeration {
    params: NetGenParams,
    partitions: Vec<Vec<usize>>, // per partition: block index of each axis
    pair_lists: Vec<Vec<(usize, usize)>>, // per block: ordered (lo, hi) grid steps
    partition_idx: usize,
    odometer: Vec<usize>,
    exhausted: bool,
}

/// Enumerate the general net at dimension `m`. Errors when the cardinality
/// bound exceeds `cap`; the actual stream can be much shorter than the bound.
pub fn netgen_enumerate(
    dim: usize,
    eps: f64,
    periodic: bool,
    cap: u64,
) -> Result<NetGenEnumeration, NetError> {
    let bound = netgen_cardinality_bound(dim, eps)?;
    let log_cap = (cap.max(1) as f64).ln();
    if bound.log() > log_cap {
        return Err(NetError::EnumerationTooLarge { log_bound: bound.log(), log_cap });
    }
    let params = NetGenParams::new(dim, eps, periodic)?;
    let pair_lists = (0..params.partition().block_count())
        .map(|j| {
            let s = params.grid_max(j);
            let mut pairs = Vec::new();
            for lo in 0..=s {
                for hi in 0..=s {
                    if lo == hi {
                        continue;
                    }
                    if !periodic && lo > hi {
                        continue;
                    }
                    pairs.push((lo, hi));
                }
            }
            pairs
        })
        .collect();
    let partitions = assignments(dim, params.partition().block_sizes());
    let odometer = vec![0usize; dim];
    Ok(NetGenEnumeration {
        params,
        partitions,
        pair_lists,
        partition_idx: 0,
        odometer,
        exhausted: dim == 0,
    })
}

/// Exact number of elements the enumeration will yield (with multiplicity
/// across partitions).
pub fn netgen_family_count(dim: usize, eps: f64, periodic: bool) -> Result<f64, NetError> {
    let params = NetGenParams::new(dim, eps, periodic)?;
    let part = params.partition();
    let mut per_partition = 1.0;
    for j in 0..part.block_count() {
        let values = (params.grid_max(j) + 1) as f64;
        let pairs = if periodic { values * (values - 1.0) } else { values * (values - 1.0) / 2.0 };
        per_partition *= pairs.powi(part.block_sizes()[j] as i32);
    }
    Ok(part.partition_count() * per_partition)
}

/// All ways to assign `dim` axes to blocks with the given sizes, encoded as
/// a block index per axis, in deterministic lexicographic order.
fn assignments(dim: usize, sizes: &[usize]) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = vec![usize::MAX; dim];
    let mut remaining: Vec<usize> = sizes.to_vec();
    fill(0, dim, &mut current, &mut remaining, &mut out);
    out
}

fn fill(
    axis: usize,
    dim: usize,
    current: &mut Vec<usize>,
    remaining: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    if axis == dim {
        out.push(current.clone());
        return;
    }
    for block in 0..remaining.len() {
        if remaining[block] == 0 {
            continue;
        }
        remaining[block] -= 1;
        current[axis] = block;
        fill(axis + 1, dim, current, remaining, out);
        remaining[block] += 1;
    }
    current[axis] = usize::MAX;
}

impl NetGenEnumeration {
    fn current_box(&self) -> AnyBox {
        let assignment = &self.partitions[self.partition_idx];
        let dim = self.params.dim();
        if self.params.periodic() {
            let intervals: Vec<TorusInterval> = (0..dim)
                .map(|axis| {
                    let block = assignment[axis];
                    let (lo, hi) = self.pair_lists[block][self.odometer[axis]];
                    TorusInterval::new(
                        self.params.grid_value(block, lo),
                        self.params.grid_value(block, hi),
                    )
                    .expect("grid pairs are distinct")
                })
                .collect();
            TorusBox::new(intervals).expect("valid torus member").into()
        } else {
            let intervals: Vec<Interval> = (0..dim)
                .map(|axis| {
                    let block = assignment[axis];
                    let (lo, hi) = self.pair_lists[block][self.odometer[axis]];
                    Interval::new(
                        self.params.grid_value(block, lo),
                        self.params.grid_value(block, hi),
                    )
                    .expect("grid pairs are ordered")
                })
                .collect();
            AxisBox::new(intervals).expect("valid cube member").into()
        }
    }

    fn advance(&mut self) {
        let assignment = &self.partitions[self.partition_idx];
        for axis in (0..self.params.dim()).rev() {
            let block = assignment[axis];
            self.odometer[axis] += 1;
            if self.odometer[axis] < self.pair_lists[block].len() {
                return;
            }
            self.odometer[axis] = 0;
        }
        self.partition_idx += 1;
        if self.partition_idx >= self.partitions.len() {
            self.exhausted = true;
        }
    }
}

impl Iterator for NetGenEnumeration {
    type Item = AnyBox;

    fn next(&mut self) -> Option<AnyBox> {
        if self.exhausted {
            return None;
        }
        let item = self.current_box();
        self.advance();
        Some(item)
    }
}
