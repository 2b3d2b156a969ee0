//! Length-rank ordering of box axes and the dyadic partition of axis ranks.
//!
//! Everything downstream keys off one observation: if a box has volume at
//! least `eps`, then its `j`-th shortest side is at least `eps^(1/j)` — the
//! shorter sides need fine grids, the longer ones get away with coarse grids.

use super::NetError;

/// Permutation listing axes in nondecreasing length order, ties broken by
/// ascending axis index (so the order is a deterministic function of input).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxisOrder {
    ranked: Vec<usize>,
}

impl AxisOrder {
    /// Order axes of the given side lengths. The axis at rank `r` has the
    /// `r`-th smallest length (0-based).
    pub fn by_lengths(lengths: &[f64]) -> AxisOrder {
        let mut ranked: Vec<usize> = (0..lengths.len()).collect();
        ranked.sort_by(|&a, &b| {
            lengths[a]
                .partial_cmp(&lengths[b])
                .expect("lengths must not be NaN")
                .then(a.cmp(&b))
        });
        AxisOrder { ranked }
    }

    pub fn dim(&self) -> usize {
        self.ranked.len()
    }

    /// Axis index occupying the given rank.
    pub fn axis_at_rank(&self, rank: usize) -> usize {
        self.ranked[rank]
    }

    /// Axes at the given rank range.
    pub fn axes_at_ranks(&self, ranks: std::ops::Range<usize>) -> &[usize] {
        &self.ranked[ranks]
    }

    pub fn ranked(&self) -> &[usize] {
        &self.ranked
    }
}

/// Partition of `m` axis ranks into blocks of sizes `2, 2, 4, ..., 2^(k-1),
/// m - 2^k`, where `2^k <= m < 2^(k+1)`. Block `j` (0-based) is approximated
/// on its own grid; later blocks hold longer axes and tolerate coarser grids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DyadicPartition {
    dim: usize,
    levels: usize,
    sizes: Vec<usize>,
}

impl DyadicPartition {
    pub fn new(dim: usize) -> Result<DyadicPartition, NetError> {
        if dim < 2 {
            return Err(NetError::BadDimension { dim });
        }
        let levels = dim.ilog2() as usize; // 2^levels <= dim < 2^(levels+1)
        let mut sizes = Vec::with_capacity(levels + 1);
        sizes.push(2);
        for j in 1..levels {
            sizes.push(1 << j);
        }
        sizes.push(dim - (1 << levels));
        debug_assert_eq!(sizes.iter().sum::<usize>(), dim);
        Ok(DyadicPartition { dim, levels, sizes })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `k` with `2^k <= m < 2^(k+1)`; there are `k + 1` blocks, the last one
    /// empty exactly when `m` is a power of two.
    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn block_count(&self) -> usize {
        self.sizes.len()
    }

    pub fn block_sizes(&self) -> &[usize] {
        &self.sizes
    }

    /// Rank range covered by the given block: block 0 holds ranks 0..2,
    /// block j holds ranks `2^j .. 2^(j+1)`, the final block `2^k .. m`.
    pub fn block_ranks(&self, block: usize) -> std::ops::Range<usize> {
        let start: usize = self.sizes[..block].iter().sum();
        start..start + self.sizes[block]
    }

    /// The partition realized along a concrete axis order: block `j` receives
    /// the axes whose lengths rank in `block_ranks(j)`.
    pub fn blocks_along(&self, order: &AxisOrder) -> Vec<Vec<usize>> {
        assert_eq!(order.dim(), self.dim);
        (0..self.block_count())
            .map(|b| order.axes_at_ranks(self.block_ranks(b)).to_vec())
            .collect()
    }

    /// Number of ways to split `m` labelled axes into blocks of these sizes.
    pub fn partition_count(&self) -> f64 {
        let mut remaining = self.dim;
        let mut count = 1.0;
        for &size in &self.sizes {
            count *= binomial(remaining, size);
            remaining -= size;
        }
        count
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    let k = k.min(n - k.min(n));
    let mut acc = 1.0;
    for i in 0..k {
        acc = acc * ((n - i) as f64) / ((i + 1) as f64);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orders_by_length_with_stable_ties() {
        let order = AxisOrder::by_lengths(&[0.9, 0.2, 0.5]);
        assert_eq!(order.ranked(), &[1, 2, 0]);
        let tie = AxisOrder::by_lengths(&[0.5, 0.5]);
        assert_eq!(tie.ranked(), &[0, 1]);
    }

    #[test]
    fn ranked_lengths_beat_eps_roots() {
        // volume 1/8 split evenly over three axes of length 0.5
        let lengths = [0.5, 0.5, 0.5];
        let eps: f64 = 0.125;
        let order = AxisOrder::by_lengths(&lengths);
        for j in 1..=3 {
            let bound = eps.powf(1.0 / j as f64);
            assert!(
                lengths[order.axis_at_rank(j - 1)] >= bound,
                "rank {j} length below eps^(1/{j}) = {bound}"
            );
        }
        // rank 2 (1-based) against eps^(1/2)
        assert!(0.5 >= eps.sqrt() - 1e-15);
        assert!((eps.sqrt() - 0.35355339059327373).abs() < 1e-15);
    }

    #[test]
    fn partition_sizes() {
        assert_eq!(DyadicPartition::new(7).unwrap().block_sizes(), &[2, 2, 3]);
        assert_eq!(DyadicPartition::new(4).unwrap().block_sizes(), &[2, 2, 0]);
        assert_eq!(DyadicPartition::new(2).unwrap().block_sizes(), &[2, 0]);
        assert_eq!(DyadicPartition::new(8).unwrap().block_sizes(), &[2, 2, 4, 0]);
        assert!(DyadicPartition::new(1).is_err());
    }

    #[test]
    fn blocks_follow_the_order() {
        let part = DyadicPartition::new(4).unwrap();
        let order = AxisOrder::by_lengths(&[0.9, 0.1, 0.5, 0.3]);
        let blocks = part.blocks_along(&order);
        assert_eq!(blocks, vec![vec![1, 3], vec![2, 0], vec![]]);
    }

    #[test]
    fn partition_counts() {
        // multinomial(3; 2, 1) = 3, multinomial(4; 2, 2, 0) = 6
        assert_eq!(DyadicPartition::new(3).unwrap().partition_count(), 3.0);
        assert_eq!(DyadicPartition::new(4).unwrap().partition_count(), 6.0);
    }
}
