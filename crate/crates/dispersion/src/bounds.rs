//! Closed-form bound calculators for the dispersion function `N(eps, d)`
//! (fewest points forcing dispersion at most `eps`) and its companion
//! `disp*(n, d)`, on the cube and on the torus.
//!
//! Upper bounds come as a piecewise regime table; where several regimes
//! apply the minimum wins, since upper bounds compose by `min`. Absolute
//! constants the theory leaves unspecified are explicit parameters
//! ([`DEFAULT_C`] for upper bounds, [`DEFAULT_LRB_C`] for the random-method
//! floor). Potentially huge values always carry a log-space representation;
//! `C^d/eps` overflows an `f64` at quite modest `d`.

use crate::solver::Mode;
use serde::Serialize;
use thiserror::Error;

/// Default absolute constant for the upper-bound formulas; the theory only
/// pins it inside `1 < C < 1000`, so the permissive end is the default.
pub const DEFAULT_C: f64 = 1000.0;

/// Default constant in the random-method lower bound.
pub const DEFAULT_LRB_C: f64 = 1.0;

/// The sharp count at `eps = 1/2`: the all-midpoints point alone brings the
/// dispersion down to `1/2` in any dimension.
pub const KNOWN_N_AT_ONE_HALF: u64 = 1;

#[derive(Debug, Error, PartialEq)]
pub enum BoundsError {
    #[error("union-bound lemma needs log family size >= ln 3, got {log_net_size}")]
    LemmaHypothesis { log_net_size: f64 },
    #[error("delta must lie in (0, 1), got {delta}")]
    BadDelta { delta: f64 },
    #[error("eps {eps} outside the admissible range {range}")]
    BadEps { eps: f64, range: &'static str },
    #[error("dimension must be at least 2, got {d}")]
    BadDim { d: usize },
    #[error("point count {n} below the regime floor {need:.3}")]
    PointFloor { n: usize, need: f64 },
    #[error("the {regime} formula degenerates at these inputs (nonpositive inner logarithm)")]
    DegenerateFormula { regime: &'static str },
}

/// Round down, snapping values within `1e-9` relative of the next integer
/// upward first; `1/(eps - 1/4)` and friends are integer-valued on paper for
/// many inputs but land just below in floating point.
fn robust_floor(x: f64) -> f64 {
    let up = x.ceil();
    if up - x <= 1e-9 * up.abs().max(1.0) {
        up
    } else {
        x.floor()
    }
}

fn robust_ceil(x: f64) -> f64 {
    let down = x.floor();
    if x - down <= 1e-9 * down.abs().max(1.0) {
        down
    } else {
        x.ceil()
    }
}

/// Output of the union-bound point count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LemmaCount {
    /// `ceil(3 log|N| / ((1-delta) eps))`.
    pub count: u64,
    /// The same quantity before rounding, for algebraic comparisons.
    pub raw: f64,
    /// Random points of this count succeed with probability at least
    /// `1 - 1/|N|`.
    pub success_floor: f64,
}

/// Points sufficient for a `delta`-net (or dinet) of the given log size to
/// catch a uniform (resp. clamp-adjusted) sample.
pub fn lemma_point_count(
    log_net_size: f64,
    delta: f64,
    eps: f64,
) -> Result<LemmaCount, BoundsError> {
    if !(log_net_size >= 3f64.ln() - 1e-12) {
        return Err(BoundsError::LemmaHypothesis { log_net_size });
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(BoundsError::BadDelta { delta });
    }
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(BoundsError::BadEps { eps, range: "(0, 1]" });
    }
    let raw = 3.0 * log_net_size / ((1.0 - delta) * eps);
    Ok(LemmaCount {
        count: robust_ceil(raw) as u64,
        raw,
        success_floor: 1.0 - (-log_net_size).exp(),
    })
}

/// A single evaluated bound with its regime label and provenance.
#[derive(Debug, Clone, Serialize)]
pub struct BoundReport {
    pub kind: &'static str,
    pub mode: Mode,
    pub regime: String,
    pub formula: &'static str,
    pub constant: f64,
    pub log_value: f64,
    /// `exp(log_value)` when it fits in an `f64`.
    pub value: Option<f64>,
    pub eps: Option<f64>,
    pub d: usize,
    pub n: Option<usize>,
}

fn finite_exp(log_value: f64) -> Option<f64> {
    let v = log_value.exp();
    v.is_finite().then_some(v)
}

struct Branch {
    regime: &'static str,
    formula: &'static str,
    log_value: f64,
}

/// Upper bound on `N(eps, d)`: the minimum over the applicable regimes.
///
/// Cube regimes (conditions closed on their written side):
/// 1. `eps >= ln^2(d) / (d ln ln(2d))`: `C ln(d) ln(1/eps) / eps^2`
/// 2. `exp(-d) <= eps <=` the threshold above: `C d ln ln(2/eps) / eps`
/// 3. `exp(-C^d) <= eps <= exp(-d)`: `C ln(d) ln(1/eps) / eps`
/// 4. `eps <= exp(-C^d)`: `C^d / eps`
///
/// Torus regimes: `C ln(d) ln(1/eps) / eps` for `eps <= exp(-d)`, else
/// `C d ln(d) / eps`.
pub fn regime_upper_n(
    eps: f64,
    d: usize,
    constant: f64,
    mode: Mode,
) -> Result<BoundReport, BoundsError> {
    if d < 2 {
        return Err(BoundsError::BadDim { d });
    }
    if !(eps > 0.0 && eps <= 0.5) {
        return Err(BoundsError::BadEps { eps, range: "(0, 1/2] (above 1/4 see the explicit large-eps count)" });
    }
    let df = d as f64;
    let log_eps_inv = (1.0 / eps).ln();
    let mut branches: Vec<Branch> = Vec::new();
    match mode {
        Mode::Cube => {
            let knee = df.ln().powi(2) / (df * (2.0 * df).ln().ln());
            if eps >= knee {
                branches.push(Branch {
                    regime: "large-eps",
                    formula: "C ln(d) ln(1/eps) / eps^2",
                    log_value: (constant * df.ln() * log_eps_inv).ln() - 2.0 * eps.ln(),
                });
            }
            if eps <= knee && log_eps_inv <= df {
                branches.push(Branch {
                    regime: "moderate-eps",
                    formula: "C d ln(ln(2/eps)) / eps",
                    log_value: (constant * df * (2.0 / eps).ln().ln()).ln() - eps.ln(),
                });
            }
            // C^d, as exp(d ln C); infinite for large C d, which simply
            // deactivates the tiny regime
            let c_power_d = (df * constant.ln()).exp();
            if log_eps_inv >= df && log_eps_inv <= c_power_d {
                branches.push(Branch {
                    regime: "small-eps",
                    formula: "C ln(d) ln(1/eps) / eps",
                    log_value: (constant * df.ln() * log_eps_inv).ln() - eps.ln(),
                });
            }
            if log_eps_inv >= c_power_d {
                branches.push(Branch {
                    regime: "tiny-eps",
                    formula: "C^d / eps",
                    log_value: df * constant.ln() - eps.ln(),
                });
            }
        }
        Mode::Torus => {
            if log_eps_inv >= df {
                branches.push(Branch {
                    regime: "small-eps",
                    formula: "C ln(d) ln(1/eps) / eps",
                    log_value: (constant * df.ln() * log_eps_inv).ln() - eps.ln(),
                });
            }
            if log_eps_inv <= df {
                branches.push(Branch {
                    regime: "large-eps",
                    formula: "C d ln(d) / eps",
                    log_value: (constant * df * df.ln()).ln() - eps.ln(),
                });
            }
        }
    }
    let best = branches
        .into_iter()
        .filter(|b| b.log_value.is_finite())
        .min_by(|a, b| a.log_value.total_cmp(&b.log_value))
        .ok_or(BoundsError::DegenerateFormula { regime: "upper-N" })?;
    Ok(BoundReport {
        kind: "upper-N",
        mode,
        regime: best.regime.to_string(),
        formula: best.formula,
        constant,
        log_value: best.log_value,
        value: finite_exp(best.log_value),
        eps: Some(eps),
        d,
        n: None,
    })
}

/// Upper bound on the minimal dispersion `disp*(n, d)`.
///
/// Cube: three branches split at `n = d^2 ln^2(ln d)/ln^2(d)` and
/// `n = e^d d ln(d)`, each boundary going to the higher branch. Torus: two
/// branches split at `n = e^d d ln(d)`.
pub fn regime_upper_disp(
    n: usize,
    d: usize,
    constant: f64,
    mode: Mode,
) -> Result<BoundReport, BoundsError> {
    if d < 2 {
        return Err(BoundsError::BadDim { d });
    }
    let df = d as f64;
    let nf = n as f64;
    let floor = match mode {
        Mode::Cube => 2.0 * df.ln(),
        Mode::Torus => 2.0 * df * df.ln(),
    };
    if nf < floor {
        return Err(BoundsError::PointFloor { n, need: floor });
    }
    let high_knee = df.exp() * df * df.ln(); // infinite for d > ~700: fine
    let (regime, formula, log_value) = match mode {
        Mode::Cube => {
            let low_knee = df.powi(2) * df.ln().ln().powi(2) / df.ln().powi(2);
            if nf >= high_knee {
                (
                    "many-points",
                    "C ln(d) ln(n/ln d) / n",
                    (constant * df.ln() * (nf / df.ln()).ln()).ln() - nf.ln(),
                )
            } else if nf >= low_knee {
                let inner = (nf / df).ln();
                if inner <= 1.0 {
                    return Err(BoundsError::DegenerateFormula { regime: "mid-points" });
                }
                ("mid-points", "C d ln(ln(n/d)) / n", (constant * df * inner.ln()).ln() - nf.ln())
            } else {
                (
                    "few-points",
                    "sqrt(C ln(d) ln(n/ln d) / n)",
                    0.5 * ((constant * df.ln() * (nf / df.ln()).ln()).ln() - nf.ln()),
                )
            }
        }
        Mode::Torus => {
            if nf >= high_knee {
                (
                    "many-points",
                    "C ln(d) ln(n/ln d) / n",
                    (constant * df.ln() * (nf / df.ln()).ln()).ln() - nf.ln(),
                )
            } else {
                ("mid-points", "C d ln(d) / n", (constant * df * df.ln()).ln() - nf.ln())
            }
        }
    };
    if !log_value.is_finite() {
        return Err(BoundsError::DegenerateFormula { regime: "upper-disp" });
    }
    Ok(BoundReport {
        kind: "upper-disp",
        mode,
        regime: regime.to_string(),
        formula,
        constant,
        log_value,
        value: finite_exp(log_value),
        eps: None,
        d,
        n: Some(n),
    })
}

/// One lower bound on `N(eps, d)` with its provenance label.
#[derive(Debug, Clone, Serialize)]
pub struct LowerBound {
    pub label: &'static str,
    pub value: Option<f64>,
    pub note: Option<&'static str>,
}

/// All applicable lower bounds on `N(eps, d)`:
///
/// * `trivial`: `1/eps - 1`,
/// * `AHR`: `(1 - 4 eps) log2(d) / (4 eps)`, only for `eps < 1/4`,
/// * `torus`: `d/eps` (periodic boxes),
/// * `random-method`: `max(c ln(1/eps)/eps, d/(2 eps))`, the ceiling for any
///   proof using uniformly random points.
pub fn lower_bounds(eps: f64, d: usize, c_lrb: f64) -> Result<Vec<LowerBound>, BoundsError> {
    if d < 2 {
        return Err(BoundsError::BadDim { d });
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(BoundsError::BadEps { eps, range: "(0, 1)" });
    }
    let df = d as f64;
    let mut out = vec![LowerBound {
        label: "trivial",
        value: Some(1.0 / eps - 1.0),
        note: None,
    }];
    if eps < 0.25 {
        out.push(LowerBound {
            label: "AHR",
            value: Some((1.0 - 4.0 * eps) * df.log2() / (4.0 * eps)),
            note: None,
        });
    } else {
        out.push(LowerBound {
            label: "AHR",
            value: None,
            note: Some("only applicable for eps < 1/4"),
        });
    }
    out.push(LowerBound { label: "torus", value: Some(df / eps), note: None });
    let random = (c_lrb * (1.0 / eps).ln() / eps).max(df / (2.0 * eps));
    out.push(LowerBound { label: "random-method", value: Some(random), note: None });
    Ok(out)
}

/// The explicit count for `eps > 1/4`: `1 + floor(1/(eps - 1/4))`. At
/// `eps = 1/2` the formula is not sharp; [`KNOWN_N_AT_ONE_HALF`] records the
/// exact value there.
pub fn large_eps_count(eps: f64) -> Result<u64, BoundsError> {
    if !(eps > 0.25) {
        return Err(BoundsError::BadEps { eps, range: "(1/4, inf)" });
    }
    Ok(1 + robust_floor(1.0 / (eps - 0.25)) as u64)
}

/// Comparison upper bound from a uniform random draw over a coordinate
/// cover: `8 d log2(33/eps) / eps`.
pub fn rudolf_upper(eps: f64, d: usize) -> f64 {
    8.0 * d as f64 * (33.0 / eps).log2() / eps
}

/// One row of the regime table behind the upper/lower bound picture.
#[derive(Debug, Clone, Serialize)]
pub struct RegimeRow {
    pub eps: f64,
    pub regime: String,
    pub upper_log: f64,
    pub upper: Option<f64>,
    pub lower_trivial: f64,
    pub lower_ahr: Option<f64>,
    pub lower_torus: f64,
    pub lower_random_method: f64,
    pub rudolf: f64,
}

pub fn regime_table_row(
    eps: f64,
    d: usize,
    constant: f64,
    c_lrb: f64,
) -> Result<RegimeRow, BoundsError> {
    let upper = regime_upper_n(eps, d, constant, Mode::Cube)?;
    let lowers = lower_bounds(eps, d, c_lrb)?;
    let find = |label: &str| lowers.iter().find(|l| l.label == label).and_then(|l| l.value);
    Ok(RegimeRow {
        eps,
        regime: upper.regime.clone(),
        upper_log: upper.log_value,
        upper: upper.value,
        lower_trivial: find("trivial").expect("always present"),
        lower_ahr: find("AHR"),
        lower_torus: find("torus").expect("always present"),
        lower_random_method: find("random-method").expect("always present"),
        rudolf: rudolf_upper(eps, d),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lemma_count_arithmetic() {
        let lc = lemma_point_count(3.0, 0.5, 0.25).unwrap();
        assert_eq!(lc.count, 72);
        assert!((lc.raw - 72.0).abs() < 1e-12);
        assert!((lc.success_floor - (1.0 - (-3.0f64).exp())).abs() < 1e-15);

        // delta -> 0, eps = 1: ceil(3 ln 3) = 4
        let lc = lemma_point_count(3f64.ln(), 1e-12, 1.0).unwrap();
        assert_eq!(lc.count, 4);

        // the hypothesis boundary is accepted
        assert!(lemma_point_count(3f64.ln(), 0.5, 0.5).is_ok());
        assert!(matches!(
            lemma_point_count(1.0, 0.5, 0.5),
            Err(BoundsError::LemmaHypothesis { .. })
        ));
    }

    #[test]
    fn torus_upper_arithmetic() {
        let r = regime_upper_n(0.125, 4, 1.0, Mode::Torus).unwrap();
        let expect = 4.0 * 4f64.ln() * 8.0;
        assert!((r.value.unwrap() - expect).abs() < 1e-9);
        assert_eq!(r.regime, "large-eps");
    }

    #[test]
    fn cube_upper_picks_min_of_applicable() {
        // recompute every branch by hand and compare
        let (eps, d, c) = (0.25f64, 16usize, 1.0f64);
        let df = d as f64;
        let knee = df.ln().powi(2) / (df * (2.0 * df).ln().ln());
        assert!(eps < knee, "chosen eps sits below the large-eps knee");
        let mut values = vec![c * df * (2.0 / eps).ln().ln() / eps];
        // C = 1 makes the tiny regime reach up to eps = 1/e
        if (1.0 / eps).ln() >= 1.0 {
            values.push(1.0 / eps);
        }
        let expect = values.iter().cloned().fold(f64::INFINITY, f64::min);
        let r = regime_upper_n(eps, d, c, Mode::Cube).unwrap();
        assert!((r.value.unwrap() - expect).abs() < 1e-9);
        assert_eq!(r.regime, "tiny-eps");
    }

    #[test]
    fn min_rule_over_recomputed_branches() {
        // independent re-evaluation of every branch condition and value
        for &(eps, d, c) in &[
            (0.25f64, 16usize, 1000.0f64),
            (0.01, 8, 1000.0),
            ((-6f64).exp(), 6, 1000.0),
            (1e-9, 4, 1000.0),
            (0.4, 2, 1000.0),
            (0.125, 64, 2.0),
        ] {
            let df = d as f64;
            let l = (1.0 / eps).ln();
            let knee = df.ln().powi(2) / (df * (2.0 * df).ln().ln());
            let cd = (df * c.ln()).exp();
            let mut applicable = Vec::new();
            if eps >= knee {
                applicable.push((c * df.ln() * l).ln() - 2.0 * eps.ln());
            }
            if eps <= knee && l <= df {
                applicable.push((c * df * (2.0 / eps).ln().ln()).ln() - eps.ln());
            }
            if l >= df && l <= cd {
                applicable.push((c * df.ln() * l).ln() - eps.ln());
            }
            if l >= cd {
                applicable.push(df * c.ln() - eps.ln());
            }
            let expect = applicable.iter().cloned().fold(f64::INFINITY, f64::min);
            let r = regime_upper_n(eps, d, c, Mode::Cube).unwrap();
            assert_eq!(r.log_value, expect, "eps={eps}, d={d}, C={c}");
        }
    }

    #[test]
    fn eps_above_half_is_rejected() {
        assert!(matches!(
            regime_upper_n(0.6, 4, 1000.0, Mode::Cube),
            Err(BoundsError::BadEps { .. })
        ));
    }

    #[test]
    fn disp_upper_branches() {
        // d=3, n=1000: above e^3 * 3 ln 3 ~ 66.2, so the many-points branch
        let r = regime_upper_disp(1000, 3, 1.0, Mode::Cube).unwrap();
        assert_eq!(r.regime, "many-points");
        let expect = 3f64.ln() * (1000.0 / 3f64.ln()).ln() / 1000.0;
        assert!((r.value.unwrap() - expect).abs() < 1e-12);

        // exact boundary goes to many-points
        let d = 3usize;
        let boundary = (3f64).exp() * 3.0 * 3f64.ln();
        let n = boundary.ceil() as usize;
        let r = regime_upper_disp(n, d, 1.0, Mode::Cube).unwrap();
        assert_eq!(r.regime, "many-points");

        // torus mid-branch: d=2, n=10 -> C d ln d / n
        let r = regime_upper_disp(10, 2, 1.0, Mode::Torus).unwrap();
        assert_eq!(r.regime, "mid-points");
        let expect = 2.0 * 2f64.ln() / 10.0;
        assert!((r.value.unwrap() - expect).abs() < 1e-15);

        // floor guard
        assert!(matches!(
            regime_upper_disp(2, 16, 1.0, Mode::Torus),
            Err(BoundsError::PointFloor { .. })
        ));
    }

    #[test]
    fn lower_bound_values() {
        let lb = lower_bounds(0.125, 16, 1.0).unwrap();
        let get = |label: &str| lb.iter().find(|l| l.label == label).unwrap().value.unwrap();
        assert_eq!(get("trivial"), 7.0);
        assert_eq!(get("AHR"), 4.0);
        assert_eq!(get("torus"), 128.0);

        // AHR omitted above 1/4
        let lb = lower_bounds(0.3, 16, 1.0).unwrap();
        let ahr = lb.iter().find(|l| l.label == "AHR").unwrap();
        assert!(ahr.value.is_none());
        assert!(ahr.note.is_some());

        // random-method picks the max of the two terms
        let lb = lower_bounds(0.125, 100, 1.0).unwrap();
        assert_eq!(get_from(&lb, "random-method"), 400.0);
        fn get_from(lb: &[LowerBound], label: &str) -> f64 {
            lb.iter().find(|l| l.label == label).unwrap().value.unwrap()
        }
    }

    #[test]
    fn large_eps_counts() {
        assert_eq!(large_eps_count(0.3).unwrap(), 21);
        assert_eq!(large_eps_count(0.5).unwrap(), 5);
        assert_eq!(large_eps_count(0.26).unwrap(), 101);
        assert!(large_eps_count(0.25).is_err());
        assert_eq!(KNOWN_N_AT_ONE_HALF, 1);
    }

    /// Each regime formula is nonincreasing in eps and nondecreasing in d.
    /// The combined min-selector is checked where a single regime stays
    /// active; across a regime switch the piecewise table can jump (the
    /// absolute constant absorbs that in the theory).
    #[test]
    fn upper_bounds_monotone_per_formula() {
        let series = |mode: Mode, d: usize, eps_lo: f64, eps_hi: f64, regime: &str| {
            let mut prev = f64::INFINITY;
            for i in 0..=24 {
                let t = i as f64 / 24.0;
                let eps = eps_lo * (eps_hi / eps_lo).powf(t);
                let r = regime_upper_n(eps, d, DEFAULT_C, mode).unwrap();
                assert_eq!(r.regime, regime, "eps={eps}, d={d}");
                assert!(r.log_value <= prev + 1e-12, "not nonincreasing at eps={eps}, d={d}");
                prev = r.log_value;
            }
        };
        // large-eps at d = 1024: knee ~ 0.023 < the whole eps range
        series(Mode::Cube, 1024, 0.05, 0.25, "large-eps");
        // moderate-eps alone at d = 16 for eps in [1e-6, 0.25]
        series(Mode::Cube, 16, 1e-6, 0.25, "moderate-eps");
        // small-eps alone at d = 4 for ln(1/eps) in (4, C^4)
        series(Mode::Cube, 4, (-12f64).exp(), (-4.1f64).exp(), "small-eps");
        series(Mode::Torus, 8, 1e-3, 0.25, "large-eps");
        series(Mode::Torus, 8, (-20f64).exp(), (-9f64).exp(), "small-eps");

        let d_series = |mode: Mode, eps: f64, dims: &[usize], regime: &str| {
            let mut prev = f64::NEG_INFINITY;
            for &d in dims {
                let r = regime_upper_n(eps, d, DEFAULT_C, mode).unwrap();
                assert_eq!(r.regime, regime, "eps={eps}, d={d}");
                assert!(r.log_value >= prev - 1e-12, "not nondecreasing at eps={eps}, d={d}");
                prev = r.log_value;
            }
        };
        d_series(Mode::Cube, 0.25, &[64, 128, 256, 1024, 4096], "large-eps");
        d_series(Mode::Cube, 1e-4, &[16, 32, 64, 256, 1024], "moderate-eps");
        d_series(Mode::Cube, (-40f64).exp(), &[8, 12, 16, 24, 32], "small-eps");
        d_series(Mode::Torus, 0.1, &[4, 8, 16, 64], "large-eps");

        // the tiny regime only activates for small C; both directions
        let mut prev = f64::INFINITY;
        for i in 0..=10 {
            let eps = 1e-8 * 0.5f64.powi(10 - i); // increasing eps
            let r = regime_upper_n(eps, 4, 2.0, Mode::Cube).unwrap();
            assert_eq!(r.regime, "tiny-eps");
            assert!(r.log_value <= prev + 1e-12);
            prev = r.log_value;
        }
        let mut prev = f64::NEG_INFINITY;
        for d in [2usize, 3, 4] {
            let r = regime_upper_n(1e-10, d, 2.0, Mode::Cube).unwrap();
            assert_eq!(r.regime, "tiny-eps");
            assert!(r.log_value >= prev);
            prev = r.log_value;
        }
    }

    #[test]
    fn rudolf_comparison_value() {
        let v = rudolf_upper(0.25, 4);
        assert!((v - 8.0 * 4.0 * (132f64).log2() / 0.25).abs() < 1e-9);
    }
}
