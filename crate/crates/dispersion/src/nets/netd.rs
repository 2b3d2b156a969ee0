//! The 3/4-net for non-periodic boxes when `d >= 4 ln(1/eps)`.
//!
//! In this regime most sides of a box of volume `>= eps` are close to 1, so
//! their endpoints only need approximating near the cube faces: the lower
//! endpoint on a grid in `(0, 1]` near 0, the upper endpoint on its mirror
//! near 1, with the admissible pairs thinning out for longer axes. Only the
//! `m = 2^k` shortest axes (with `2^k >= 2 ln(1/eps)`) need the full general
//! net.

use super::netgen::netgen_cover_cube;
use super::order::AxisOrder;
use super::{grid_size, snap_up_index, CoverFamily, CoverResult, LongPair, NetError};
use crate::geometry::{AnyBox, AxisBox, Interval};

/// Derived parameters: the dense dimension `m = 2^k`, the face grids with
/// spacing `1/(8d)`, and the admissible endpoint pairs per block.
#[derive(Debug, Clone, PartialEq)]
pub struct NetDParams {
    dim: usize,
    eps: f64,
    /// `k`: smallest integer with `2^k >= 2 ln(1/eps)`.
    short_levels: u32,
    /// `m = 2^k`, the number of axes covered by the inner general net.
    dense_dim: usize,
    /// `n` with `2^n <= d < 2^(n+1)`.
    dim_level: u32,
    /// Face grid spacing `1/(8d)`.
    spacing: f64,
    /// Largest grid step; the low grid is `{spacing, ..., s * spacing}` and
    /// the high grid its mirror `{1 - spacing, ..., 1 - s * spacing}`.
    grid_max: usize,
    /// Block sizes: `[m, 2^k, 2^(k+1), ..., d - 2^n]`.
    block_sizes: Vec<usize>,
}

impl NetDParams {
    pub fn new(dim: usize, eps: f64) -> Result<NetDParams, NetError> {
        if dim < 4 {
            return Err(NetError::BadDimension { dim });
        }
        if !(eps > 0.0 && eps <= 0.25) {
            return Err(NetError::BadEps { eps, range: "(0, 1/4]" });
        }
        let log_eps_inv = (1.0 / eps).ln();
        if (dim as f64) < 4.0 * log_eps_inv {
            return Err(NetError::OutsideNetDRegime { d: dim, need: 4.0 * log_eps_inv });
        }
        let mut short_levels = 1u32;
        while 2f64.powi(short_levels as i32) < 2.0 * log_eps_inv {
            short_levels += 1;
        }
        let dense_dim = 1usize << short_levels;
        debug_assert!(dense_dim < dim);
        let dim_level = dim.ilog2();
        let spacing = 1.0 / (8.0 * dim as f64);
        let grid_max = grid_size(spacing);
        let mut block_sizes = vec![dense_dim];
        for j in 1..=(dim_level - short_levels) as usize {
            block_sizes.push(1usize << (short_levels as usize + j - 1));
        }
        block_sizes.push(dim - (1usize << dim_level));
        debug_assert_eq!(block_sizes.iter().sum::<usize>(), dim);
        Ok(NetDParams {
            dim,
            eps,
            short_levels,
            dense_dim,
            dim_level,
            spacing,
            grid_max,
            block_sizes,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn dense_dim(&self) -> usize {
        self.dense_dim
    }

    pub fn short_levels(&self) -> u32 {
        self.short_levels
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn grid_max(&self) -> usize {
        self.grid_max
    }

    pub fn block_sizes(&self) -> &[usize] {
        &self.block_sizes
    }

    /// Number of long blocks (excluding the dense block 0).
    pub fn long_block_count(&self) -> usize {
        self.block_sizes.len() - 1
    }

    pub fn low_value(&self, step: usize) -> f64 {
        (step as f64) * self.spacing
    }

    pub fn high_value(&self, step: usize) -> f64 {
        1.0 - (step as f64) * self.spacing
    }

    /// Endpoint proximity threshold of long block `j` (1-based): admissible
    /// pairs have `x <= 2^(1-k-j) ln(1/eps) + spacing` and mirrored `y`.
    pub fn pair_threshold(&self, block: usize) -> f64 {
        debug_assert!((1..=self.long_block_count()).contains(&block));
        let exp = 1 - self.short_levels as i32 - block as i32;
        2f64.powi(exp) * (1.0 / self.eps).ln() + self.spacing
    }

    /// Materialized admissible pair set of a long block, as grid steps into
    /// the low and high grids. Only sensible at desk-scale `d`.
    pub fn pair_set(&self, block: usize) -> Vec<(usize, usize)> {
        let threshold = self.pair_threshold(block);
        let mut pairs = Vec::new();
        for lo in 1..=self.grid_max {
            if self.low_value(lo) > threshold {
                break;
            }
            for hi in 1..=self.grid_max {
                if 1.0 - self.high_value(hi) > threshold {
                    break;
                }
                if self.low_value(lo) < self.high_value(hi) {
                    pairs.push((lo, hi));
                }
            }
        }
        pairs
    }
}

/// Size bound in log space: `6d ln(24m) + 2 log2(m) ln(1/eps)`, plus the
/// headline shape `C d ln ln(1/eps)` for a supplied constant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NetDBound {
    pub dim: usize,
    pub eps: f64,
    pub dense_dim: usize,
    pub log_bound: f64,
    pub headline_log: f64,
}

pub fn netd_cardinality_bound(dim: usize, eps: f64, headline_c: f64) -> Result<NetDBound, NetError> {
    let params = NetDParams::new(dim, eps)?;
    let m = params.dense_dim as f64;
    let log_eps_inv = (1.0 / eps).ln();
    let log_bound = 6.0 * dim as f64 * (24.0 * m).ln() + 2.0 * m.log2() * log_eps_inv;
    let headline_log = headline_c * dim as f64 * log_eps_inv.ln();
    Ok(NetDBound { dim, eps, dense_dim: params.dense_dim, log_bound, headline_log })
}

/// Cover a cube box by a 3/4-net member: the `m` shortest axes through the
/// general net, every longer axis snapped onto the face grids.
pub fn netd_cover(b: &AxisBox, eps: f64) -> Result<CoverResult, NetError> {
    let params = NetDParams::new(b.dim(), eps)?;
    if b.volume() < eps {
        return Err(NetError::BoxBelowThreshold { volume: b.volume(), eps });
    }
    let lengths = b.lengths();
    let order = AxisOrder::by_lengths(&lengths);
    let log_eps_inv = (1.0 / eps).ln();

    let mut dense_axes: Vec<usize> = order.axes_at_ranks(0..params.dense_dim).to_vec();
    dense_axes.sort_unstable();
    let dense_box = AxisBox::new(dense_axes.iter().map(|&a| b.interval(a)).collect())
        .expect("dense sub-box is valid");
    // the product of the m shortest sides is at least the full volume
    let inner = netgen_cover_cube(&dense_box, eps)?;
    let AnyBox::Cube(inner_box) = &inner.element else { unreachable!("inner cover is cubic") };

    let mut intervals: Vec<Option<Interval>> = vec![None; b.dim()];
    for (i, &axis) in dense_axes.iter().enumerate() {
        intervals[axis] = Some(inner_box.interval(i));
    }

    let mut long_blocks = Vec::with_capacity(params.long_block_count());
    let mut long_pairs = Vec::new();
    let mut rank_start = params.dense_dim;
    for block in 1..=params.long_block_count() {
        let size = params.block_sizes[block];
        let axes = order.axes_at_ranks(rank_start..rank_start + size).to_vec();
        rank_start += size;
        let threshold = params.pair_threshold(block);
        // every axis this long exceeds 1 - ln(1/eps)/2^(k+j-1)
        let length_floor =
            1.0 - log_eps_inv / 2f64.powi(params.short_levels as i32 + block as i32 - 1);
        for &axis in &axes {
            let iv = b.interval(axis);
            assert!(
                iv.length() >= length_floor - 1e-9,
                "long axis {axis} of length {} under block-{block} floor {length_floor}",
                iv.length()
            );
            let lo_step = snap_up_index(iv.lo(), params.spacing, params.grid_max)
                .expect("lower endpoint within the face grid")
                .max(1);
            // smallest step with 1 - step * spacing <= hi
            let mut hi_step =
                ((((1.0 - iv.hi()) / params.spacing).floor() as i64) - 1).max(1) as usize;
            while params.high_value(hi_step) > iv.hi() {
                hi_step += 1;
                assert!(hi_step <= params.grid_max, "upper endpoint below the face grid");
            }
            while hi_step > 1 && params.high_value(hi_step - 1) <= iv.hi() {
                hi_step -= 1;
            }
            let x = params.low_value(lo_step);
            let y = params.high_value(hi_step);
            assert!(
                x <= threshold + 1e-9 && y >= 1.0 - threshold - 1e-9,
                "snapped pair ({x}, {y}) outside the block-{block} pair set"
            );
            intervals[axis] = Some(Interval::new(x, y).expect("long axis keeps positive length"));
            long_pairs.push(LongPair { axis, block, lo_step, hi_step });
        }
        long_blocks.push(axes);
    }

    let element = AxisBox::new(intervals.into_iter().map(Option::unwrap).collect())
        .expect("covered box is valid");
    let ratio = element.volume() / b.volume();
    Ok(CoverResult {
        element: element.into(),
        family: CoverFamily::Netd {
            dense_axes,
            inner: Box::new(inner.family),
            long_blocks,
            long_pairs,
        },
        ratio,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn params_at_desk_scale() {
        let p = NetDParams::new(8, 0.25).unwrap();
        assert_eq!(p.short_levels(), 2);
        assert_eq!(p.dense_dim(), 4);
        assert_eq!(p.spacing(), 1.0 / 64.0);
        assert_eq!(p.grid_max(), 64);
        assert_eq!(p.block_sizes(), &[4, 4, 0]);

        let p16 = NetDParams::new(16, 0.25).unwrap();
        assert_eq!(p16.block_sizes(), &[4, 4, 8, 0]);

        // d not a power of two: a ragged final block, no middle blocks
        let p6 = NetDParams::new(6, 0.25).unwrap();
        assert_eq!(p6.block_sizes(), &[4, 2]);
    }

    #[test]
    fn regime_guards() {
        assert!(matches!(
            NetDParams::new(4, 0.01).unwrap_err(),
            NetError::OutsideNetDRegime { .. }
        ));
        assert!(matches!(NetDParams::new(3, 0.25).unwrap_err(), NetError::BadDimension { .. }));
        assert!(matches!(NetDParams::new(8, 0.3).unwrap_err(), NetError::BadEps { .. }));
    }

    #[test]
    fn pair_set_size_respects_the_block_bound() {
        let p = NetDParams::new(8, 0.25).unwrap();
        let pairs = p.pair_set(1);
        assert_eq!(pairs.len(), 529); // 23 low values x 23 high values
        let cap = (8.0 * 8.0 / 2.0 + 1.0) * (8.0 * 8.0 / 2.0 + 1.0);
        assert!((pairs.len() as f64) <= cap);

        for block in 1..=p.long_block_count() {
            let bound = (8.0 * 8.0 / 2f64.powi(block as i32) + 1.0).powi(2);
            assert!((p.pair_set(block).len() as f64) <= bound);
        }
    }

    #[test]
    fn log_bound_values() {
        let b8 = netd_cardinality_bound(8, 0.25, 1000.0).unwrap();
        let expect8 = 48.0 * 96f64.ln() + 4.0 * 4f64.ln();
        assert!((b8.log_bound - expect8).abs() < 1e-12);

        let b16 = netd_cardinality_bound(16, 0.25, 1000.0).unwrap();
        let expect16 = 96.0 * 96f64.ln() + 4.0 * 4f64.ln();
        assert!((b16.log_bound - expect16).abs() < 1e-12);

        // monotone in d at fixed eps
        let mut prev = 0.0;
        for d in [8, 12, 16, 32, 64] {
            let b = netd_cardinality_bound(d, 0.25, 1000.0).unwrap();
            assert!(b.log_bound > prev);
            prev = b.log_bound;
        }

        // headline shape
        assert!((b8.headline_log - 1000.0 * 8.0 * (4f64.ln()).ln()).abs() < 1e-12);
    }

    #[test]
    fn full_cube_cover_snaps_to_face_grid() {
        let b = AxisBox::full_cube(8).unwrap();
        let cover = netd_cover(&b, 0.25).unwrap();
        let AnyBox::Cube(elem) = &cover.element else { panic!() };
        assert!(elem.is_subset_of(&b).unwrap());
        let delta = 1.0 / 64.0;
        let CoverFamily::Netd { long_pairs, dense_axes, .. } = &cover.family else { panic!() };
        assert_eq!(long_pairs.len(), 4);
        for lp in long_pairs {
            assert_eq!(lp.lo_step, 1);
            assert_eq!(lp.hi_step, 1);
            let iv = elem.interval(lp.axis);
            assert_eq!(iv.lo(), delta);
            assert_eq!(iv.hi(), 1.0 - delta);
        }
        // dense axes of the full cube stay at full length
        for &axis in dense_axes {
            assert_eq!(elem.interval(axis).length(), 1.0);
        }
        let expect_ratio = (1.0 - 2.0 * delta).powi(4);
        assert!((cover.ratio - expect_ratio).abs() < 1e-12);
        assert!(cover.ratio >= 0.25);
    }

    #[test]
    fn random_boxes_cover_within_quarter_loss() {
        for trial in 0..50 {
            let b =
                crate::sampler::sample_box_cube(8, 0.25, &mut crate::sampler::stream_rng(7, trial))
                    .unwrap();
            let cover = netd_cover(&b, 0.25).unwrap();
            let AnyBox::Cube(elem) = &cover.element else { panic!() };
            assert!(elem.is_subset_of(&b).unwrap());
            assert!(cover.ratio >= 0.25, "ratio {} below 1/4", cover.ratio);
        }
    }
}
