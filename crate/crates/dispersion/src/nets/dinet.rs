//! The 1/2-dinet for large `eps`: a net "in the sense of dispersion".
//!
//! When `d >= ln(1/eps)/eps`, every box of volume `>= eps` has all but its
//! `m = ceil(ln(1/eps)/eps)` shortest sides longer than `1 - eps`. Such
//! sides need no approximation at all: after clamping a coordinate into
//! `[eps, 1-eps]` it lands inside them automatically. The member therefore
//! covers only the `m` shortest axes with the general net and sets every
//! other axis to the full interval `[0, 1)`.
//!
//! The member is generally *not* inside the covered box; the guarantee is
//! the implication `z in member => clamp(z) in box`, which is exactly what
//! the union bound over clamp-adjusted random points consumes.

use super::netgen::netgen_cover_cube;
use super::order::AxisOrder;
use super::{CoverFamily, CoverResult, NetError};
use crate::geometry::{AnyBox, AxisBox, Interval};

/// Derived parameters: the number of actively covered axes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DinetParams {
    dim: usize,
    /// `m`: smallest integer at least `ln(1/eps)/eps`.
    active_dim: usize,
}

impl DinetParams {
    pub fn new(dim: usize, eps: f64) -> Result<DinetParams, NetError> {
        if dim < 4 {
            return Err(NetError::BadDimension { dim });
        }
        if !(eps > 0.0 && eps <= 0.5) {
            return Err(NetError::BadEps { eps, range: "(0, 1/2]" });
        }
        let need = (1.0 / eps).ln() / eps;
        if (dim as f64) < need {
            return Err(NetError::OutsideDinetRegime { d: dim, need });
        }
        let active_dim = need.ceil() as usize;
        debug_assert!(active_dim >= 2 && active_dim <= dim);
        debug_assert!((active_dim as f64) <= 2.0 * need);
        Ok(DinetParams { dim, active_dim })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn active_dim(&self) -> usize {
        self.active_dim
    }
}

/// Size bound in log space: `9 ln(1/eps) ln(18d) / eps`, plus the
/// intermediate form `(18d)^(4m) / eps^(2 log2(2m))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DinetBound {
    pub dim: usize,
    pub eps: f64,
    pub active_dim: usize,
    pub log_bound: f64,
    pub intermediate_log: f64,
}

pub fn dinet_cardinality_bound(dim: usize, eps: f64) -> Result<DinetBound, NetError> {
    let params = DinetParams::new(dim, eps)?;
    let m = params.active_dim as f64;
    let log_eps_inv = (1.0 / eps).ln();
    let log_bound = 9.0 * log_eps_inv * (18.0 * dim as f64).ln() / eps;
    let intermediate_log =
        4.0 * m * (18.0 * dim as f64).ln() + 2.0 * (2.0 * m).log2() * log_eps_inv;
    Ok(DinetBound { dim, eps, active_dim: params.active_dim, log_bound, intermediate_log })
}

/// Cover a cube box by a dinet member: general net on the `m` shortest axes,
/// full interval everywhere else.
pub fn dinet_cover(b: &AxisBox, eps: f64) -> Result<CoverResult, NetError> {
    let params = DinetParams::new(b.dim(), eps)?;
    if b.volume() < eps {
        return Err(NetError::BoxBelowThreshold { volume: b.volume(), eps });
    }
    let lengths = b.lengths();
    let order = AxisOrder::by_lengths(&lengths);
    let mut active_axes: Vec<usize> = order.axes_at_ranks(0..params.active_dim).to_vec();
    active_axes.sort_unstable();
    let active_box = AxisBox::new(active_axes.iter().map(|&a| b.interval(a)).collect())
        .expect("active sub-box is valid");
    let inner = netgen_cover_cube(&active_box, eps)?;
    let AnyBox::Cube(inner_box) = &inner.element else { unreachable!("inner cover is cubic") };

    let full = Interval::new(0.0, 1.0).expect("unit interval");
    let mut intervals = vec![full; b.dim()];
    for (i, &axis) in active_axes.iter().enumerate() {
        intervals[axis] = inner_box.interval(i);
    }
    let element = AxisBox::new(intervals).expect("covered box is valid");
    let ratio = element.volume() / b.volume();
    Ok(CoverResult {
        element: element.into(),
        family: CoverFamily::Dinet { active_axes, inner: Box::new(inner.family) },
        ratio,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nets::{boundary_clamp, clamp_point};
    use crate::sampler;

    #[test]
    fn active_dim_is_the_rounded_regime_floor() {
        // eps = 1/2: ln(2)/0.5 ~ 1.386, so m = 2
        assert_eq!(DinetParams::new(8, 0.5).unwrap().active_dim(), 2);
        // eps = 0.4: ln(2.5)/0.4 ~ 2.29, so m = 3
        assert_eq!(DinetParams::new(12, 0.4).unwrap().active_dim(), 3);
    }

    #[test]
    fn regime_guard() {
        // ln(20)/0.05 ~ 59.9 > 4
        assert!(matches!(
            DinetParams::new(4, 0.05).unwrap_err(),
            NetError::OutsideDinetRegime { .. }
        ));
        assert!(matches!(DinetParams::new(3, 0.5).unwrap_err(), NetError::BadDimension { .. }));
    }

    #[test]
    fn log_bound_values() {
        let b = dinet_cardinality_bound(100, 0.5).unwrap();
        let expect = 9.0 * 2f64.ln() * 1800f64.ln() * 2.0;
        assert!((b.log_bound - expect).abs() < 1e-12);
        assert!((b.log_bound - 93.5).abs() < 0.1);

        let b8 = dinet_cardinality_bound(8, 0.5).unwrap();
        let expect8 = 9.0 * 2f64.ln() * 144f64.ln() / 0.5;
        assert!((b8.log_bound - expect8).abs() < 1e-12);
        // intermediate form with m = 2: (144)^8 / (1/2)^(2 log2 4)
        let inter = 8.0 * 144f64.ln() + 4.0 * 2f64.ln();
        assert!((b8.intermediate_log - inter).abs() < 1e-12);
    }

    #[test]
    fn bound_grows_like_inverse_eps() {
        let coarse = dinet_cardinality_bound(4000, 0.5).unwrap().log_bound;
        let fine = dinet_cardinality_bound(4000, 0.05).unwrap().log_bound;
        let ratio = fine / coarse;
        let expect = (20f64.ln() / 0.05) / (2f64.ln() / 0.5);
        assert!((ratio - expect).abs() < 1e-9);
    }

    #[test]
    fn full_cube_cover_keeps_half() {
        let b = AxisBox::full_cube(8).unwrap();
        let cover = dinet_cover(&b, 0.5).unwrap();
        let AnyBox::Cube(elem) = &cover.element else { panic!() };
        assert!(cover.ratio >= 0.5);
        let CoverFamily::Dinet { active_axes, .. } = &cover.family else { panic!() };
        assert_eq!(active_axes.len(), 2);
        let full_axes = (0..8).filter(|a| !active_axes.contains(a)).count();
        assert_eq!(full_axes, 6);
        for axis in 0..8 {
            if !active_axes.contains(&axis) {
                assert_eq!(elem.interval(axis).length(), 1.0);
            }
        }
    }

    #[test]
    fn clamped_members_land_in_the_box() {
        let eps = 0.5;
        for trial in 0..50 {
            let b = sampler::sample_box_cube(8, eps, &mut sampler::stream_rng(11, trial)).unwrap();
            let cover = dinet_cover(&b, eps).unwrap();
            let AnyBox::Cube(elem) = &cover.element else { panic!() };
            assert!(cover.ratio >= 0.5);
            // all corners of the member, clamped, must land inside the box
            for mask in 0u32..(1 << 8) {
                let coords: Vec<f64> = (0..8)
                    .map(|axis| {
                        let iv = elem.interval(axis);
                        if mask & (1 << axis) == 0 {
                            iv.lo()
                        } else {
                            iv.hi()
                        }
                    })
                    .map(|c| boundary_clamp(c, eps))
                    .collect();
                let p = crate::geometry::Point::new(coords).unwrap();
                assert!(
                    b.contains(&p).unwrap(),
                    "clamped corner escaped the box on trial {trial}"
                );
            }
            // and random interior points of the member
            let mut rng = sampler::stream_rng(12, trial);
            for _ in 0..50 {
                let coords: Vec<f64> = (0..8)
                    .map(|axis| {
                        let iv = elem.interval(axis);
                        iv.lo() + (iv.hi() - iv.lo()) * rand::Rng::random::<f64>(&mut rng)
                    })
                    .collect();
                let z = crate::geometry::Point::new(coords).unwrap();
                let clamped = clamp_point(&z, eps);
                assert!(b.contains(&clamped).unwrap());
            }
        }
    }
}
