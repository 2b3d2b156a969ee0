//! Randomized verification harness.
//!
//! The cover guarantees are theorems: on every verified trial the oracle
//! must deliver its subset/ratio (or clamp-implication) promise, so these
//! suites tolerate zero failures — any failure is an implementation bug and
//! gets serialized as a reproducible exemplar. The union-bound reproduction
//! is statistical instead: it draws the prescribed number of random points,
//! measures exact dispersion, and compares the empirical success rate with
//! the probability floor.
//!
//! Trials run in parallel; trial `t` always uses PRNG stream `(seed, t)`,
//! so reports are identical for any worker count.

use crate::bounds::{self, BoundsError, LemmaCount};
use crate::geometry::{AnyBox, Point, PointSet};
use crate::io;
use crate::nets::{
    boundary_clamp, dinet_cardinality_bound, dinet_cover, netd_cover, netgen_cardinality_bound,
    netgen_cover_cube, netgen_cover_torus, DinetParams, NetDParams, NetError, NetGenParams,
};
use crate::sampler::{self, SampleError};
use crate::solver::{self, SolverConfig, SolverError};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error(transparent)]
    Net(#[from] NetError),
    #[error(transparent)]
    Sample(#[from] SampleError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Bounds(#[from] BoundsError),
    #[error("{0}")]
    Unsupported(&'static str),
    #[error("point-count search exceeded the cap of {cap}")]
    SearchCapExceeded { cap: usize },
}

/// Net constructions whose subset/ratio guarantee the harness can check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum NetConstruction {
    Netgen,
    Netd,
}

/// Which family (and hence point distribution) the union-bound run uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LemmaSampling {
    /// General net, uniform points.
    Netgen,
    /// Dinet, clamp-adjusted points.
    Dinet,
}

/// A failing trial, reproducible from `(seed, trial)`.
#[derive(Debug, Clone, Serialize)]
pub struct FailureExemplar {
    pub trial: u64,
    pub detail: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sampled_box: Option<serde_json::Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cover: Option<serde_json::Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<Vec<f64>>>,
}

/// Outcome of a randomized suite.
#[derive(Debug, Clone, Serialize)]
pub struct TrialReport {
    pub trials: usize,
    pub failures: usize,
    /// Up to ten failing trials, lowest trial index first.
    pub exemplars: Vec<FailureExemplar>,
    pub seed: u64,
    pub params: serde_json::Value,
}

impl TrialReport {
    fn collect(
        trials: usize,
        seed: u64,
        params: serde_json::Value,
        mut failures: Vec<FailureExemplar>,
    ) -> TrialReport {
        failures.sort_by_key(|f| f.trial);
        let count = failures.len();
        failures.truncate(10);
        TrialReport { trials, failures: count, exemplars: failures, seed, params }
    }

    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

const MAX_EXEMPLAR_POINTS: usize = 64;

fn exemplar_points(set: &PointSet) -> Option<Vec<Vec<f64>>> {
    (set.len() <= MAX_EXEMPLAR_POINTS)
        .then(|| set.points().iter().map(|p| p.coords().to_vec()).collect())
}

/// Check the net guarantee on random boxes of volume at least `eps`: the
/// cover must land inside the box and keep at least half (general net) or a
/// quarter (3/4-net) of its volume. Zero failures expected.
pub fn check_net_property(
    construction: NetConstruction,
    dim: usize,
    eps: f64,
    periodic: bool,
    trials: usize,
    seed: u64,
) -> Result<TrialReport, VerifyError> {
    let ratio_floor = match construction {
        NetConstruction::Netgen => {
            NetGenParams::new(dim, eps, periodic)?;
            0.5
        }
        NetConstruction::Netd => {
            if periodic {
                return Err(VerifyError::Unsupported(
                    "the 3/4-net construction is defined for cube boxes only",
                ));
            }
            NetDParams::new(dim, eps)?;
            0.25
        }
    };
    let failures: Vec<FailureExemplar> = (0..trials as u64)
        .into_par_iter()
        .map(|trial| -> Result<Option<FailureExemplar>, VerifyError> {
            let mut rng = sampler::stream_rng(seed, trial);
            let (sampled, cover) = if periodic {
                let b = sampler::sample_box_torus(dim, eps, &mut rng)?;
                let cover = netgen_cover_torus(&b, eps)?;
                (AnyBox::Torus(b), cover)
            } else {
                let b = sampler::sample_box_cube(dim, eps, &mut rng)?;
                let cover = match construction {
                    NetConstruction::Netgen => netgen_cover_cube(&b, eps)?,
                    NetConstruction::Netd => netd_cover(&b, eps)?,
                };
                (AnyBox::Cube(b), cover)
            };
            let subset = match (&cover.element, &sampled) {
                (AnyBox::Cube(inner), AnyBox::Cube(outer)) => {
                    inner.is_subset_of(outer).expect("dims match")
                }
                (AnyBox::Torus(inner), AnyBox::Torus(outer)) => {
                    inner.is_subset_of(outer).expect("dims match")
                }
                _ => false,
            };
            let ratio_ok = cover.ratio >= ratio_floor;
            if subset && ratio_ok {
                return Ok(None);
            }
            Ok(Some(FailureExemplar {
                trial,
                detail: format!(
                    "subset={subset}, ratio={} (floor {ratio_floor})",
                    cover.ratio
                ),
                sampled_box: Some(io::box_to_json(&sampled)),
                cover: Some(io::cover_to_json(&cover)),
                points: None,
            }))
        })
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .flatten()
        .collect();
    Ok(TrialReport::collect(
        trials,
        seed,
        json!({
            "suite": "net-property",
            "construction": construction,
            "dim": dim,
            "eps": eps,
            "periodic": periodic,
        }),
        failures,
    ))
}

/// Check the dinet guarantee: ratio at least 1/2, and every corner of the
/// member (for `d <= 16`) plus 100 interior samples lands inside the box
/// after clamping. Zero failures expected.
pub fn check_dinet_property(
    dim: usize,
    eps: f64,
    trials: usize,
    seed: u64,
) -> Result<TrialReport, VerifyError> {
    DinetParams::new(dim, eps)?;
    let failures: Vec<FailureExemplar> = (0..trials as u64)
        .into_par_iter()
        .map(|trial| -> Result<Option<FailureExemplar>, VerifyError> {
            let mut rng = sampler::stream_rng(seed, trial);
            let b = sampler::sample_box_cube(dim, eps, &mut rng)?;
            let cover = dinet_cover(&b, eps)?;
            let AnyBox::Cube(element) = &cover.element else { unreachable!("dinet is cubic") };
            let mut detail = Vec::new();
            if cover.ratio < 0.5 {
                detail.push(format!("ratio {} below 1/2", cover.ratio));
            }
            if dim <= 16 {
                'corners: for mask in 0u32..(1u32 << dim) {
                    let corner: Vec<f64> = (0..dim)
                        .map(|axis| {
                            let iv = element.interval(axis);
                            if mask & (1 << axis) == 0 {
                                iv.lo()
                            } else {
                                iv.hi()
                            }
                        })
                        .map(|c| boundary_clamp(c, eps))
                        .collect();
                    let p = Point::new(corner).expect("clamped corner in range");
                    if !b.contains(&p).expect("dims match") {
                        detail.push(format!("clamped corner {mask:b} escapes the box"));
                        break 'corners;
                    }
                }
            }
            for s in 0..100 {
                let coords: Vec<f64> = (0..dim)
                    .map(|axis| {
                        let iv = element.interval(axis);
                        iv.lo() + iv.length() * rand::Rng::random::<f64>(&mut rng)
                    })
                    .map(|c| boundary_clamp(c, eps))
                    .collect();
                let p = Point::new(coords).expect("clamped sample in range");
                if !b.contains(&p).expect("dims match") {
                    detail.push(format!("clamped interior sample {s} escapes the box"));
                    break;
                }
            }
            if detail.is_empty() {
                return Ok(None);
            }
            Ok(Some(FailureExemplar {
                trial,
                detail: detail.join("; "),
                sampled_box: Some(io::box_to_json(&AnyBox::Cube(b))),
                cover: Some(io::cover_to_json(&cover)),
                points: None,
            }))
        })
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .flatten()
        .collect();
    Ok(TrialReport::collect(
        trials,
        seed,
        json!({ "suite": "dinet-property", "dim": dim, "eps": eps }),
        failures,
    ))
}

/// Result of the union-bound reproduction.
#[derive(Debug, Clone, Serialize)]
pub struct LemmaReport {
    #[serde(flatten)]
    pub report: TrialReport,
    /// Points drawn per trial.
    pub points_per_trial: usize,
    /// The count the union bound prescribes (before any override).
    pub prescribed: LemmaCount,
    pub log_family_size: f64,
    pub success_fraction: f64,
    /// `1 - 1/|family|`: the probability the argument guarantees.
    pub success_floor: f64,
}

/// Budget handed to the exact solver inside the harness; the suites'
/// own preconditions (`d <= 3`, lemma-sized `n`) keep instances desk-scale.
const HARNESS_BUDGET: f64 = 1e12;

/// Draw the union-bound point count, measure exact dispersion, and count
/// how often it meets `eps`. A failing trial here is *not* a bug — the
/// guarantee is probabilistic — but the observed fraction should clear the
/// floor by a wide margin.
pub fn monte_carlo_lemma(
    dim: usize,
    eps: f64,
    delta: f64,
    sampling: LemmaSampling,
    trials: usize,
    seed: u64,
    points_override: Option<usize>,
) -> Result<LemmaReport, VerifyError> {
    if dim > 3 {
        return Err(VerifyError::Unsupported(
            "union-bound reproduction needs d <= 3 for the exact solver",
        ));
    }
    let log_family_size = match sampling {
        LemmaSampling::Netgen => netgen_cardinality_bound(dim, eps)?.log(),
        LemmaSampling::Dinet => dinet_cardinality_bound(dim, eps)?.log_bound,
    };
    let prescribed = bounds::lemma_point_count(log_family_size, delta, eps)?;
    let points_per_trial = points_override.unwrap_or(prescribed.count as usize);
    let config = SolverConfig::with_budget(HARNESS_BUDGET);
    let failures: Vec<FailureExemplar> = (0..trials as u64)
        .into_par_iter()
        .map(|trial| -> Result<Option<FailureExemplar>, VerifyError> {
            let mut rng = sampler::stream_rng(seed, trial);
            let set = match sampling {
                LemmaSampling::Netgen => {
                    sampler::sample_uniform_with(points_per_trial, dim, &mut rng)
                }
                LemmaSampling::Dinet => {
                    sampler::sample_adjusted_with(points_per_trial, dim, eps, &mut rng)
                }
            };
            let disp = solver::exact_dispersion_cube(&set, &config)?;
            if disp.value <= eps {
                return Ok(None);
            }
            Ok(Some(FailureExemplar {
                trial,
                detail: format!("dispersion {} above eps {eps}", disp.value),
                sampled_box: Some(io::box_to_json(&disp.witness)),
                cover: None,
                points: exemplar_points(&set),
            }))
        })
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .flatten()
        .collect();
    let report = TrialReport::collect(
        trials,
        seed,
        json!({
            "suite": "union-bound",
            "dim": dim,
            "eps": eps,
            "delta": delta,
            "sampling": sampling,
        }),
        failures,
    );
    let success_fraction = (trials - report.failures) as f64 / trials.max(1) as f64;
    Ok(LemmaReport {
        report,
        points_per_trial,
        prescribed,
        log_family_size,
        success_fraction,
        success_floor: prescribed.success_floor,
    })
}

/// Every `n`-point set on the torus has dispersion at least `d/n`; check it
/// on random sets. Failures indicate a solver bug. Restricted to `n >= 2d`
/// so the implied `eps = d/n` stays in the range the bound is used in.
pub fn torus_lower_consistency(
    dim: usize,
    n: usize,
    sets: usize,
    seed: u64,
) -> Result<TrialReport, VerifyError> {
    if !(2..=3).contains(&dim) {
        return Err(VerifyError::Unsupported("torus consistency check needs d in {2, 3}"));
    }
    if n > 16 {
        return Err(VerifyError::Unsupported("torus consistency check needs n <= 16"));
    }
    if n < 2 * dim {
        return Err(VerifyError::Unsupported("torus consistency check needs n >= 2d"));
    }
    let floor = dim as f64 / n as f64 - 1e-9;
    let config = SolverConfig::with_budget(HARNESS_BUDGET);
    let failures: Vec<FailureExemplar> = (0..sets as u64)
        .into_par_iter()
        .map(|trial| -> Result<Option<FailureExemplar>, VerifyError> {
            let mut rng = sampler::stream_rng(seed, trial);
            let set = sampler::sample_uniform_with(n, dim, &mut rng);
            let disp = solver::exact_dispersion_torus(&set, &config)?;
            if disp.value >= floor {
                return Ok(None);
            }
            Ok(Some(FailureExemplar {
                trial,
                detail: format!("periodic dispersion {} below d/n = {floor}", disp.value),
                sampled_box: Some(io::box_to_json(&disp.witness)),
                cover: None,
                points: exemplar_points(&set),
            }))
        })
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .flatten()
        .collect();
    Ok(TrialReport::collect(
        sets,
        seed,
        json!({ "suite": "torus-lower", "dim": dim, "n": n }),
        failures,
    ))
}

/// Smallest `n` at which the `quantile`-statistic of the trial dispersions
/// drops to `eps`, searched by doubling then bisection.
///
/// Random sets only witness upper bounds, so this is an UPPER estimate of
/// the true count — potentially a strict overestimate (at `eps = 1/2` the
/// single midpoint works, but no random point ever lands there).
pub fn empirical_n(
    eps: f64,
    dim: usize,
    trials_per_n: usize,
    quantile: f64,
    seed: u64,
) -> Result<usize, VerifyError> {
    if dim > 3 {
        return Err(VerifyError::Unsupported("empirical count needs d <= 3"));
    }
    if eps < 0.05 {
        return Err(VerifyError::Unsupported("empirical count needs eps >= 0.05"));
    }
    if !(0.0..=1.0).contains(&quantile) {
        return Err(VerifyError::Unsupported("quantile must lie in [0, 1]"));
    }
    const CAP: usize = 10_000;
    let config = SolverConfig::with_budget(f64::INFINITY);
    let succeeds = |n: usize| -> Result<bool, VerifyError> {
        let mut disps: Vec<f64> = (0..trials_per_n as u64)
            .into_par_iter()
            .map(|trial| -> Result<f64, VerifyError> {
                let stream = ((n as u64) << 32) | trial;
                let mut rng = sampler::stream_rng(seed, stream);
                let set = sampler::sample_uniform_with(n, dim, &mut rng);
                Ok(solver::exact_dispersion_cube(&set, &config)?.value)
            })
            .collect::<Result<Vec<_>, _>>()?;
        disps.sort_unstable_by(f64::total_cmp);
        let idx = (quantile * (disps.len() - 1) as f64).round() as usize;
        Ok(disps[idx] <= eps)
    };
    let mut n = 1usize;
    while !succeeds(n)? {
        n *= 2;
        if n > CAP {
            return Err(VerifyError::SearchCapExceeded { cap: CAP });
        }
    }
    if n == 1 {
        return Ok(1);
    }
    let (mut lo, mut hi) = (n / 2, n); // lo failed, hi succeeded
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if succeeds(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn net_property_small_runs_clean() {
        let r = check_net_property(NetConstruction::Netgen, 3, 0.25, false, 100, 7).unwrap();
        assert_eq!(r.failures, 0, "exemplars: {:?}", r.exemplars);
        let r = check_net_property(NetConstruction::Netgen, 2, 0.5, true, 100, 7).unwrap();
        assert_eq!(r.failures, 0);
        let r = check_net_property(NetConstruction::Netd, 8, 0.25, false, 100, 7).unwrap();
        assert_eq!(r.failures, 0);
    }

    #[test]
    fn dinet_property_small_runs_clean() {
        let r = check_dinet_property(8, 0.5, 100, 3).unwrap();
        assert_eq!(r.failures, 0, "exemplars: {:?}", r.exemplars);
    }

    #[test]
    fn reports_are_deterministic() {
        let a = check_net_property(NetConstruction::Netgen, 2, 0.25, false, 200, 11).unwrap();
        let b = check_net_property(NetConstruction::Netgen, 2, 0.25, false, 200, 11).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    }

    #[test]
    fn regime_guards_propagate() {
        assert!(check_net_property(NetConstruction::Netd, 4, 0.01, false, 10, 1).is_err());
        assert!(check_dinet_property(4, 0.05, 10, 1).is_err());
        assert!(matches!(
            check_net_property(NetConstruction::Netd, 8, 0.25, true, 10, 1),
            Err(VerifyError::Unsupported(_))
        ));
    }

    #[test]
    fn lemma_reproduction_tiny() {
        // a fast scaled-down run; the acceptance suite runs the full one
        let r = monte_carlo_lemma(2, 0.5, 0.5, LemmaSampling::Netgen, 20, 5, None).unwrap();
        assert_eq!(r.points_per_trial, 203);
        assert_eq!(r.report.failures, 0);
        assert!(r.success_fraction >= 0.95);
        // inflating the count can only help
        let r4 =
            monte_carlo_lemma(2, 0.5, 0.5, LemmaSampling::Netgen, 20, 5, Some(4 * 203)).unwrap();
        assert_eq!(r4.report.failures, 0);
    }

    #[test]
    fn dinet_lemma_needs_higher_dim_than_the_solver_allows() {
        // the dinet regime needs d >= 4, the exact solver d <= 3: the
        // combination is honestly unreachable
        let err = monte_carlo_lemma(2, 0.5, 0.5, LemmaSampling::Dinet, 5, 1, None).unwrap_err();
        assert!(matches!(err, VerifyError::Net(NetError::BadDimension { .. })));
    }

    #[test]
    fn torus_floor_holds_on_small_runs() {
        let r = torus_lower_consistency(2, 8, 30, 9).unwrap();
        assert_eq!(r.failures, 0, "exemplars: {:?}", r.exemplars);
    }

    #[test]
    fn empirical_count_brackets() {
        // eps = 0.26 has the explicit ceiling 101
        let n = empirical_n(0.26, 2, 10, 0.0, 31).unwrap();
        assert!(n <= 101, "estimate {n} above the explicit ceiling");
        assert!(n >= 3, "estimate {n} below the trivial floor 1/eps - 1");
    }
}
