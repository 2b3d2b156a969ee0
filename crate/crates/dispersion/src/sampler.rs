//! Seeded generation of point sets and test boxes.
//!
//! Reproducibility contract: every generator draws from a ChaCha stream
//! addressed by `(seed, stream)`. Identical addresses give bitwise-identical
//! output, and parallel harnesses hand each trial its own stream id so worker
//! count never changes results.

use crate::geometry::{AnyBox, AxisBox, Point, PointSet, TorusBox, TorusInterval};
use crate::nets::boundary_clamp;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum SampleError {
    #[error("dimension must be at least 1")]
    ZeroDimension,
    #[error("adjusted sampling needs eps in (0, 1/2), got {eps:?}")]
    BadAdjustEps { eps: Option<f64> },
    #[error("box sampling needs eps in (0, 1], got {eps}")]
    BadBoxEps { eps: f64 },
    #[error("gave up after {attempts} rejected box draws")]
    RejectionCapExceeded { attempts: u32 },
}

/// The PRNG stream addressed by `(seed, stream)`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Parameters of a point-set draw.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleConfig {
    pub n: usize,
    pub dim: usize,
    pub eps: Option<f64>,
    pub seed: u64,
    pub adjusted: bool,
}

impl SampleConfig {
    pub fn uniform(n: usize, dim: usize, seed: u64) -> SampleConfig {
        SampleConfig { n, dim, eps: None, seed, adjusted: false }
    }

    pub fn adjusted(n: usize, dim: usize, eps: f64, seed: u64) -> SampleConfig {
        SampleConfig { n, dim, eps: Some(eps), seed, adjusted: true }
    }
}

/// `n` points with coordinates independent uniform on `[0, 1)`.
pub fn sample_uniform(config: &SampleConfig) -> Result<PointSet, SampleError> {
    if config.dim == 0 {
        return Err(SampleError::ZeroDimension);
    }
    let mut rng = stream_rng(config.seed, 0);
    Ok(sample_uniform_with(config.n, config.dim, &mut rng))
}

/// Uniform draw from a caller-supplied stream.
pub fn sample_uniform_with(n: usize, dim: usize, rng: &mut ChaCha8Rng) -> PointSet {
    let points = (0..n)
        .map(|_| {
            Point::new((0..dim).map(|_| rng.random::<f64>()).collect())
                .expect("uniform draws live in [0,1)")
        })
        .collect();
    PointSet::with_dim(points, dim).expect("matching dimensions")
}

/// Uniform points pushed through the boundary clamp: every coordinate lands
/// in `[eps, 1-eps]`, with the boundary mass collapsing onto the two atoms.
pub fn sample_adjusted(config: &SampleConfig) -> Result<PointSet, SampleError> {
    if config.dim == 0 {
        return Err(SampleError::ZeroDimension);
    }
    let eps = match config.eps {
        Some(e) if e > 0.0 && e < 0.5 => e,
        other => return Err(SampleError::BadAdjustEps { eps: other }),
    };
    let mut rng = stream_rng(config.seed, 0);
    Ok(sample_adjusted_with(config.n, config.dim, eps, &mut rng))
}

pub fn sample_adjusted_with(n: usize, dim: usize, eps: f64, rng: &mut ChaCha8Rng) -> PointSet {
    let points = (0..n)
        .map(|_| {
            Point::new((0..dim).map(|_| boundary_clamp(rng.random::<f64>(), eps)).collect())
                .expect("clamped draws live in [eps, 1-eps]")
        })
        .collect();
    PointSet::with_dim(points, dim).expect("matching dimensions")
}

const REJECTION_CAP: u32 = 1000;

/// A random box of volume at least `eps`.
///
/// The target volume is uniform on `[eps, 1]` and its log splits over the
/// axes by normalized exponential weights, which exercises both balanced and
/// extreme aspect ratios. Positions are uniform subject to fitting in the
/// cube; on the torus the box may wrap. Draws whose rounded volume dips
/// below `eps` (or, on the torus, whose lengths hit 1) are rejected and
/// retried from the same stream.
pub fn sample_box(d: usize, eps: f64, seed: u64, periodic: bool) -> Result<AnyBox, SampleError> {
    let mut rng = stream_rng(seed, 0);
    if periodic {
        sample_box_torus(d, eps, &mut rng).map(AnyBox::Torus)
    } else {
        sample_box_cube(d, eps, &mut rng).map(AnyBox::Cube)
    }
}

pub fn sample_box_cube(d: usize, eps: f64, rng: &mut ChaCha8Rng) -> Result<AxisBox, SampleError> {
    check_box_params(d, eps)?;
    for _ in 0..REJECTION_CAP {
        let lengths = draw_lengths(d, eps, rng);
        let mut lo = Vec::with_capacity(d);
        let mut hi = Vec::with_capacity(d);
        for &len in &lengths {
            let slack = 1.0 - len;
            let a = slack * rng.random::<f64>();
            lo.push(a);
            hi.push((a + len).min(1.0));
        }
        let Ok(b) = AxisBox::from_bounds(&lo, &hi) else { continue };
        if b.volume() >= eps {
            return Ok(b);
        }
    }
    Err(SampleError::RejectionCapExceeded { attempts: REJECTION_CAP })
}

pub fn sample_box_torus(d: usize, eps: f64, rng: &mut ChaCha8Rng) -> Result<TorusBox, SampleError> {
    check_box_params(d, eps)?;
    for _ in 0..REJECTION_CAP {
        let lengths = draw_lengths(d, eps, rng);
        if lengths.iter().any(|&len| len >= 1.0) {
            continue;
        }
        let mut intervals = Vec::with_capacity(d);
        for &len in &lengths {
            let a = rng.random::<f64>();
            let b = (a + len) % 1.0;
            if a == b {
                intervals.clear();
                break;
            }
            intervals.push(TorusInterval::new(a, b).expect("distinct endpoints"));
        }
        if intervals.len() != d {
            continue;
        }
        let b = TorusBox::new(intervals).expect("valid torus box");
        if b.volume() >= eps && b.volume() < 1.0 {
            return Ok(b);
        }
    }
    Err(SampleError::RejectionCapExceeded { attempts: REJECTION_CAP })
}

fn check_box_params(d: usize, eps: f64) -> Result<(), SampleError> {
    if d == 0 {
        return Err(SampleError::ZeroDimension);
    }
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(SampleError::BadBoxEps { eps });
    }
    Ok(())
}

/// Side lengths multiplying to a volume uniform on `[eps, 1]`.
fn draw_lengths(d: usize, eps: f64, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let volume = eps + (1.0 - eps) * rng.random::<f64>();
    if volume >= 1.0 {
        return vec![1.0; d];
    }
    let log_volume = volume.ln();
    loop {
        let weights: Vec<f64> = (0..d).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
        let total: f64 = weights.iter().sum();
        if total > 0.0 {
            return weights.iter().map(|w| (w / total * log_volume).exp()).collect();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_sample() {
        let set = sample_uniform(&SampleConfig::uniform(0, 3, 1)).unwrap();
        assert_eq!(set.len(), 0);
        assert_eq!(set.dim(), 3);
    }

    #[test]
    fn same_seed_same_points() {
        let cfg = SampleConfig::uniform(100, 4, 42);
        let a = sample_uniform(&cfg).unwrap();
        let b = sample_uniform(&cfg).unwrap();
        assert_eq!(a, b);
        let c = sample_uniform(&SampleConfig::uniform(100, 4, 43)).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn uniform_mean_near_half() {
        let set = sample_uniform(&SampleConfig::uniform(10_000, 1, 7)).unwrap();
        let mean: f64 =
            set.points().iter().map(|p| p.coord(0)).sum::<f64>() / set.len() as f64;
        assert!((0.49..=0.51).contains(&mean), "mean {mean} out of band");
    }

    #[test]
    fn adjusted_lands_in_the_core() {
        let set = sample_adjusted(&SampleConfig::adjusted(10_000, 1, 0.1, 3)).unwrap();
        let mut at_atom = 0usize;
        for p in set.points() {
            let c = p.coord(0);
            assert!((0.1..=0.9).contains(&c));
            if c == 0.1 {
                at_atom += 1;
            }
        }
        // mass of [0, 0.1) collapses onto the atom at 0.1
        let frac = at_atom as f64 / set.len() as f64;
        assert!((frac - 0.1).abs() <= 0.02, "atom mass {frac}");
    }

    #[test]
    fn adjusted_is_a_clamp_fixed_point() {
        let set = sample_adjusted(&SampleConfig::adjusted(500, 3, 0.2, 9)).unwrap();
        for p in set.points() {
            let clamped = crate::nets::clamp_point(p, 0.2);
            assert_eq!(p, &clamped);
        }
    }

    #[test]
    fn adjusted_requires_eps() {
        let cfg = SampleConfig { n: 5, dim: 2, eps: None, seed: 0, adjusted: true };
        assert!(matches!(sample_adjusted(&cfg), Err(SampleError::BadAdjustEps { .. })));
    }

    #[test]
    fn box_volumes_respect_the_floor() {
        let mut rng = stream_rng(5, 0);
        for _ in 0..2000 {
            let b = sample_box_cube(3, 0.25, &mut rng).unwrap();
            assert!(b.volume() >= 0.25);
            assert!(b.volume() <= 1.0);
        }
        let mut rng = stream_rng(5, 1);
        for _ in 0..2000 {
            let b = sample_box_torus(3, 0.25, &mut rng).unwrap();
            assert!(b.volume() >= 0.25);
            assert!(b.volume() < 1.0);
        }
    }

    #[test]
    fn eps_one_forces_the_full_cube() {
        let AnyBox::Cube(b) = sample_box(4, 1.0, 3, false).unwrap() else { panic!() };
        assert_eq!(b.volume(), 1.0);
        for iv in b.intervals() {
            assert_eq!((iv.lo(), iv.hi()), (0.0, 1.0));
        }
    }

    #[test]
    fn interval_of_length_at_least_half() {
        let mut rng = stream_rng(8, 0);
        for _ in 0..200 {
            let b = sample_box_cube(1, 0.5, &mut rng).unwrap();
            assert!(b.interval(0).length() >= 0.5);
        }
    }

    #[test]
    fn torus_at_eps_one_rejects_out() {
        let err = sample_box(2, 1.0, 3, true).unwrap_err();
        assert!(matches!(err, SampleError::RejectionCapExceeded { .. }));
    }
}
