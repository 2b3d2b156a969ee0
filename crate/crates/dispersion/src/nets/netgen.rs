//! The general 1/2-net: every axis gets snapped onto a grid whose spacing
//! depends on the axis's length rank, so short axes land on fine grids and
//! long axes on coarse ones. Works identically for cube and torus boxes; the
//! torus variant additionally wraps a lower endpoint past the last grid
//! value back to 0.

use super::order::{AxisOrder, DyadicPartition};
use super::{
    grid_size, snap_down_index, snap_up_index, CoverFamily, CoverResult, GridStep, NetError,
};
use crate::geometry::{AxisBox, Interval, TorusBox, TorusInterval};

/// Derived parameters of the general net in dimension `m`: the dyadic
/// partition of axis ranks together with one grid per block.
///
/// Block `j` (0-based) uses spacing `2^-(k+3) * eps^(2^-j)`; spacings grow
/// with `j` because later blocks hold longer axes.
#[derive(Debug, Clone, PartialEq)]
pub struct NetGenParams {
    dim: usize,
    eps: f64,
    periodic: bool,
    partition: DyadicPartition,
    spacings: Vec<f64>,
    grid_sizes: Vec<usize>,
}

impl NetGenParams {
    pub fn new(dim: usize, eps: f64, periodic: bool) -> Result<NetGenParams, NetError> {
        if !(eps > 0.0 && eps < 1.0) {
            return Err(NetError::BadEps { eps, range: "(0, 1)" });
        }
        let partition = DyadicPartition::new(dim)?;
        let k = partition.levels();
        let base = 2f64.powi(-(k as i32) - 3);
        let spacings: Vec<f64> = (0..partition.block_count())
            .map(|j| base * eps.powf(2f64.powi(-(j as i32))))
            .collect();
        let grid_sizes = spacings.iter().map(|&s| grid_size(s)).collect();
        Ok(NetGenParams { dim, eps, periodic, partition, spacings, grid_sizes })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn periodic(&self) -> bool {
        self.periodic
    }

    pub fn partition(&self) -> &DyadicPartition {
        &self.partition
    }

    /// Grid spacing of the given block.
    pub fn spacing(&self, block: usize) -> f64 {
        self.spacings[block]
    }

    pub fn spacings(&self) -> &[f64] {
        &self.spacings
    }

    /// Largest grid step of the given block; the grid is
    /// `{0, spacing, ..., grid_max(block) * spacing}`.
    pub fn grid_max(&self, block: usize) -> usize {
        self.grid_sizes[block]
    }

    /// The grid value at a step, the one expression both the cover oracle and
    /// the enumerator use, so members match bit for bit.
    pub fn grid_value(&self, block: usize, step: usize) -> f64 {
        (step as f64) * self.spacings[block]
    }
}

/// Size bound of the general net. `log_refined` applies when the dimension is
/// a power of two and is always the smaller exponent; [`NetGenBound::log`]
/// returns the best applicable value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NetGenBound {
    pub dim: usize,
    pub eps: f64,
    pub log_general: f64,
    pub log_refined: Option<f64>,
}

impl NetGenBound {
    pub fn log(&self) -> f64 {
        self.log_refined.unwrap_or(self.log_general)
    }

    /// The bound itself when it fits in an `f64`.
    pub fn value(&self) -> Option<f64> {
        let v = self.log().exp();
        v.is_finite().then_some(v)
    }
}

/// Cardinality bound `(14 m)^(4m) / eps^(2 log2(2m))`, refined to
/// `(24 m)^(2m) / eps^(2 log2 m)` when `m` is a power of two.
pub fn netgen_cardinality_bound(dim: usize, eps: f64) -> Result<NetGenBound, NetError> {
    if dim < 2 {
        return Err(NetError::BadDimension { dim });
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(NetError::BadEps { eps, range: "(0, 1)" });
    }
    let m = dim as f64;
    let log_eps_inv = (1.0 / eps).ln();
    let log_general = 4.0 * m * (14.0 * m).ln() + 2.0 * (2.0 * m).log2() * log_eps_inv;
    let log_refined = dim
        .is_power_of_two()
        .then(|| 2.0 * m * (24.0 * m).ln() + 2.0 * m.log2() * log_eps_inv);
    Ok(NetGenBound { dim, eps, log_general, log_refined })
}

struct SnappedAxis {
    lo_step: usize,
    hi_step: usize,
    lo: f64,
    hi: f64,
}

/// Shared precondition checks; returns the params and the length order.
fn prepare(
    dim: usize,
    volume: f64,
    lengths: &[f64],
    eps: f64,
    periodic: bool,
) -> Result<(NetGenParams, AxisOrder, Vec<usize>), NetError> {
    let params = NetGenParams::new(dim, eps, periodic)?;
    if volume < eps {
        return Err(NetError::BoxBelowThreshold { volume, eps });
    }
    let order = AxisOrder::by_lengths(lengths);
    // block of each axis
    let mut block_of = vec![0usize; dim];
    for (j, axes) in params.partition.blocks_along(&order).iter().enumerate() {
        for &axis in axes {
            block_of[axis] = j;
        }
    }
    // Every axis must dominate its block grid: the axis at rank 2^(j-1) has
    // length at least eps^(2^-j) = 2^(k+3) * spacing(j). Guaranteed by the
    // volume precondition; a violation beyond float noise is a bug.
    let k = params.partition.levels();
    for axis in 0..dim {
        let j = block_of[axis];
        let needed = 2f64.powi(k as i32 + 3) * params.spacing(j) * (1.0 - 1e-9);
        assert!(
            lengths[axis] >= needed,
            "axis {axis} of length {} under the block-{j} grid floor {needed}",
            lengths[axis]
        );
    }
    Ok((params, order, block_of))
}

/// Cover a cube box by its net member: each lower endpoint snaps up and each
/// upper endpoint snaps down to the axis's block grid. The member is inside
/// the box and keeps at least half its volume.
pub fn netgen_cover_cube(b: &AxisBox, eps: f64) -> Result<CoverResult, NetError> {
    let lengths = b.lengths();
    let (params, order, block_of) = prepare(b.dim(), b.volume(), &lengths, eps, false)?;
    let mut snapped = Vec::with_capacity(b.dim());
    for axis in 0..b.dim() {
        let j = block_of[axis];
        let spacing = params.spacing(j);
        let s = params.grid_max(j);
        let iv = b.interval(axis);
        // cube boxes never need the wrap rule: a lower endpoint beyond the
        // last grid value would force the axis under its grid floor
        let lo_step = snap_up_index(iv.lo(), spacing, s)
            .expect("lower endpoint beyond grid despite length floor");
        let hi_step = snap_down_index(iv.hi(), spacing, s);
        snapped.push(SnappedAxis {
            lo_step,
            hi_step,
            lo: params.grid_value(j, lo_step),
            hi: params.grid_value(j, hi_step),
        });
    }
    let intervals = snapped
        .iter()
        .map(|sn| Interval::new(sn.lo, sn.hi).expect("snap keeps intervals nondegenerate"))
        .collect();
    let element = AxisBox::new(intervals).expect("covered box is valid");
    let ratio = element.volume() / b.volume();
    Ok(CoverResult {
        element: element.into(),
        family: family(&params, &order, &block_of, &snapped),
        ratio,
    })
}

/// Torus variant: snapping is cyclic, and a lower endpoint past the last
/// grid value takes `x = 0`.
pub fn netgen_cover_torus(b: &TorusBox, eps: f64) -> Result<CoverResult, NetError> {
    if b.intervals().iter().any(|iv| iv.is_punctured()) {
        return Err(NetError::PuncturedUnsupported);
    }
    let lengths = b.lengths();
    let (params, order, block_of) = prepare(b.dim(), b.volume(), &lengths, eps, true)?;
    let mut snapped = Vec::with_capacity(b.dim());
    for axis in 0..b.dim() {
        let j = block_of[axis];
        let spacing = params.spacing(j);
        let s = params.grid_max(j);
        let iv = b.interval(axis);
        let lo_step = snap_up_index(iv.a(), spacing, s).unwrap_or(0);
        let hi_step = snap_down_index(iv.b(), spacing, s);
        snapped.push(SnappedAxis {
            lo_step,
            hi_step,
            lo: params.grid_value(j, lo_step),
            hi: params.grid_value(j, hi_step),
        });
    }
    let intervals = snapped
        .iter()
        .map(|sn| TorusInterval::new(sn.lo, sn.hi).expect("snap keeps cyclic length positive"))
        .collect();
    let element = TorusBox::new(intervals).expect("covered box is valid");
    let ratio = element.volume() / b.volume();
    Ok(CoverResult {
        element: element.into(),
        family: family(&params, &order, &block_of, &snapped),
        ratio,
    })
}

fn family(
    params: &NetGenParams,
    order: &AxisOrder,
    block_of: &[usize],
    snapped: &[SnappedAxis],
) -> CoverFamily {
    CoverFamily::Netgen {
        blocks: params.partition.blocks_along(order),
        grid_steps: snapped
            .iter()
            .enumerate()
            .map(|(axis, sn)| GridStep {
                axis,
                block: block_of[axis],
                lo: sn.lo_step,
                hi: sn.hi_step,
            })
            .collect(),
    }
}
