//! Large-deviations rate functions on a uniform grid over [0, ln m].
//!
//! The single-user curve is the numeric convex conjugate of the guesswork
//! sCGF. The multi-user curve composes single-user curves through the
//! U-min contraction: at each scale x one user is pinned at x, U-1 users
//! contribute their cheapest cost of already being identified (delta) and
//! the remaining V-U the cheapest cost of not yet being identified
//! (gamma); the partition is optimized exactly because the costs are
//! separable.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::golden_max;

use super::renyi::Scgf;

/// Grid points used when no explicit resolution is requested.
pub const DEFAULT_RATE_POINTS: usize = 2048;

/// Search bracket for the conjugate variable.
const ALPHA_MAX: f64 = 64.0;

/// Width tolerance of the golden-section refinement.
const GOLDEN_TOL: f64 = 1e-10;

/// Noise floor for the divergence test's increments.
const DIVERGENCE_EPS: f64 = 1e-9;

/// Discrete convexity tolerance on second differences.
const CONVEXITY_TOL: f64 = 1e-8;

/// A sampled rate function on the uniform grid `x_i = i * x_max / (n-1)`,
/// with `f64::INFINITY` marking scales no string ever attains.
#[derive(Debug, Clone, PartialEq)]
pub struct RateCurve {
    x_max: f64,
    values: Vec<f64>,
    zero_x: f64,
    convex: bool,
}

impl RateCurve {
    pub fn from_values(x_max: f64, values: Vec<f64>, zero_x: f64) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::GridMismatch("a rate curve needs at least 2 points".into()));
        }
        if !(x_max.is_finite() && x_max > 0.0) {
            return Err(Error::GridMismatch(format!("bad grid end {x_max}")));
        }
        let convex = second_difference_violation(&values).is_none();
        Ok(RateCurve {
            x_max,
            values,
            zero_x,
            convex,
        })
    }

    pub fn points(&self) -> usize {
        self.values.len()
    }

    /// End of the grid, ln m.
    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn x_at(&self, i: usize) -> f64 {
        i as f64 * self.x_max / (self.points() - 1) as f64
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// The x at which the curve vanishes (the Shannon entropy for a
    /// single-user curve; the grid argmin for composed curves).
    pub fn zero_x(&self) -> f64 {
        self.zero_x
    }

    /// Did the construction-time second-difference test find the sampled
    /// curve convex on its finite region?
    pub fn is_convex(&self) -> bool {
        self.convex
    }

    /// Linear interpolation; x is clamped to the grid, and any segment
    /// touching the infinite region (other than at its finite endpoint)
    /// evaluates to +inf.
    pub fn value_at(&self, x: f64) -> f64 {
        let x = x.clamp(0.0, self.x_max);
        let step = self.x_max / (self.points() - 1) as f64;
        let pos = x / step;
        let i = (pos.floor() as usize).min(self.points() - 1);
        let frac = pos - i as f64;
        if frac <= 1e-12 || i + 1 == self.points() {
            return self.values[i];
        }
        let (v0, v1) = (self.values[i], self.values[i + 1]);
        if frac >= 1.0 - 1e-12 {
            return v1;
        }
        if v0.is_infinite() || v1.is_infinite() {
            return f64::INFINITY;
        }
        v0 + frac * (v1 - v0)
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    /// CSV with columns x, rate; +inf prints as "inf".
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,rate\n");
        for (i, &v) in self.values.iter().enumerate() {
            out.push_str(&format!("{},{}\n", self.x_at(i), fmt_value(v)));
        }
        out
    }
}

fn fmt_value(v: f64) -> String {
    if v.is_infinite() {
        "inf".to_string()
    } else {
        format!("{v}")
    }
}

/// Index of the most violated second-difference triple, if any, scanning
/// each finite contiguous run of the sampled values.
fn second_difference_violation(values: &[f64]) -> Option<(usize, f64)> {
    let mut worst: Option<(usize, f64)> = None;
    for i in 1..values.len().saturating_sub(1) {
        let (a, b, c) = (values[i - 1], values[i], values[i + 1]);
        if !(a.is_finite() && b.is_finite() && c.is_finite()) {
            continue;
        }
        let second = a - 2.0 * b + c;
        if second < -CONVEXITY_TOL && worst.map_or(true, |(_, w)| second < w) {
            worst = Some((i, second));
        }
    }
    worst
}

/// Numeric convex conjugate of the sCGF on the default grid.
pub fn rate_single(scgf: &Scgf) -> Result<RateCurve> {
    rate_single_with_points(scgf, DEFAULT_RATE_POINTS)
}

/// Numeric convex conjugate of the sCGF: for each grid x, maximize
/// `x*alpha - Lambda(alpha)` over `alpha` in `[-64, 64]` by golden-section
/// refinement, with the kink at alpha = -1 and the zero at alpha = 0
/// always probed exactly. Scales whose supremum still climbs at the
/// bracket edge get the +inf sentinel.
pub fn rate_single_with_points(scgf: &Scgf, points: usize) -> Result<RateCurve> {
    if points < 2 {
        return Err(Error::GridMismatch("rate grid needs at least 2 points".into()));
    }
    let x_max = scgf.renyi().alphabet_log();
    let mut values = Vec::with_capacity(points);
    for i in 0..points {
        let x = i as f64 * x_max / (points - 1) as f64;
        values.push(rate_single_at(scgf, x)?);
    }
    RateCurve::from_values(x_max, values, scgf.renyi().shannon())
}

/// The conjugate at a single x: golden-section refinement plus exact
/// probes of the kink (alpha = -1), the zero (alpha = 0) and the bracket
/// edge.
///
/// The supremum is declared divergent when it sits at the bracket edge
/// and the objective's growth over [a/2, a] is at least as large as over
/// [a/4, a/2]: a linear tail (slope x minus the source's log support
/// size) keeps growing, whereas a converging sup climbs by c/a terms that
/// halve. At the exact boundary of the finite region this takes the
/// left-limit value rather than +inf.
pub fn rate_single_at(scgf: &Scgf, x: f64) -> Result<f64> {
    let mut failure: Option<Error> = None;
    let mut objective = |alpha: f64| -> f64 {
        match scgf.value(alpha) {
            Ok(v) => x * alpha - v,
            Err(e) => {
                failure = Some(e);
                f64::NAN
            }
        }
    };
    let (_, refined) = golden_max(&mut objective, -ALPHA_MAX, ALPHA_MAX, GOLDEN_TOL);
    let at_kink = objective(-1.0);
    let at_zero = objective(0.0);
    let at_edge = objective(ALPHA_MAX);
    let at_half = objective(ALPHA_MAX * 0.5);
    let at_quarter = objective(ALPHA_MAX * 0.25);
    if let Some(e) = failure {
        return Err(Error::Numeric(format!(
            "conjugate refinement failed at x={x}: {e}"
        )));
    }
    let best = refined.max(at_kink).max(at_zero).max(at_edge);
    let d1 = at_edge - at_half;
    let d2 = at_half - at_quarter;
    let diverging = at_edge >= best - 1e-12 && d1 > DIVERGENCE_EPS && d1 > 1.2 * d2;
    Ok(if diverging { f64::INFINITY } else { best })
}

/// Split a rate value into the "already identified" and "not yet
/// identified" contributions at scale x around the Shannon point.
fn split_delta_gamma(value: f64, x: f64, shannon: f64) -> (f64, f64) {
    if x <= shannon {
        (value, 0.0)
    } else {
        (0.0, value)
    }
}

/// delta and gamma component curves of a single-user rate function:
/// pointwise they sum to the rate curve and their product vanishes.
pub fn delta_gamma(rate: &RateCurve, shannon: f64) -> (RateCurve, RateCurve) {
    let mut delta = Vec::with_capacity(rate.points());
    let mut gamma = Vec::with_capacity(rate.points());
    for (i, &v) in rate.values().iter().enumerate() {
        let (d, g) = split_delta_gamma(v, rate.x_at(i), shannon);
        delta.push(d);
        gamma.push(g);
    }
    let delta = RateCurve::from_values(rate.x_max(), delta, shannon).expect("same grid");
    let gamma = RateCurve::from_values(rate.x_max(), gamma, shannon).expect("same grid");
    (delta, gamma)
}

/// A composed multi-user rate curve plus, per grid point, the users whose
/// strings are identified at that scale (the pivot and the delta group).
#[derive(Debug, Clone)]
pub struct MultiRateCurve {
    pub curve: RateCurve,
    /// Per grid point, the ascending user set identified at that scale;
    /// `None` where the rate is infinite.
    pub identified: Vec<Option<Vec<usize>>>,
}

impl MultiRateCurve {
    pub fn convexity_report(&self) -> ConvexityReport {
        convexity_report(&self.curve, Some(&self.identified))
    }
}

/// Rate function for identifying U of V users, composed from the users'
/// single rate curves by minimizing over the pivot user and the exact
/// greedy partition of the rest into identified / unidentified groups.
pub fn rate_multi(singles: &[RateCurve], u: usize) -> Result<MultiRateCurve> {
    let v = singles.len();
    if u < 1 || u > v {
        return Err(Error::OrderStatOutOfRange { u, v });
    }
    let points = singles[0].points();
    let x_max = singles[0].x_max();
    if singles
        .iter()
        .any(|s| s.points() != points || s.x_max() != x_max)
    {
        return Err(Error::GridMismatch(
            "all single-user curves must share one grid".into(),
        ));
    }

    let mut values = Vec::with_capacity(points);
    let mut identified = Vec::with_capacity(points);
    for i in 0..points {
        let x = singles[0].x_at(i);
        let parts: Vec<(f64, f64, f64)> = singles
            .iter()
            .map(|s| {
                let val = s.values()[i];
                let (d, g) = split_delta_gamma(val, x, s.zero_x());
                (val, d, g)
            })
            .collect();

        let mut best = f64::INFINITY;
        let mut best_set: Option<Vec<usize>> = None;
        for pivot in 0..v {
            let mut cost = parts[pivot].0;
            if cost.is_infinite() {
                continue;
            }
            // Order the other users by how much cheaper it is to have
            // identified them than not; -inf means "must identify".
            let mut others: Vec<usize> = (0..v).filter(|&w| w != pivot).collect();
            others.sort_by(|&a, &b| {
                let da = diff(parts[a].1, parts[a].2);
                let db = diff(parts[b].1, parts[b].2);
                da.partial_cmp(&db).unwrap().then(a.cmp(&b))
            });
            let mut set = vec![pivot];
            for (pos, &w) in others.iter().enumerate() {
                if pos < u - 1 {
                    cost += parts[w].1;
                    set.push(w);
                } else {
                    cost += parts[w].2;
                }
            }
            if cost < best {
                best = cost;
                set.sort_unstable();
                best_set = Some(set);
            }
        }
        identified.push(if best.is_finite() { best_set } else { None });
        values.push(best);
    }
    let zero_idx = values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .map(|(i, _)| i)
        .unwrap_or(0);
    let zero_x = singles[0].x_at(zero_idx);
    Ok(MultiRateCurve {
        curve: RateCurve::from_values(x_max, values, zero_x)?,
        identified,
    })
}

fn diff(delta: f64, gamma: f64) -> f64 {
    if gamma.is_infinite() {
        f64::NEG_INFINITY
    } else {
        delta - gamma
    }
}

/// sCGF of the composed guess count: the grid supremum of
/// `alpha * x - I(x)` over the finite region.
pub fn scgf_multi(rate: &RateCurve, alpha: f64) -> f64 {
    let mut best = f64::NEG_INFINITY;
    for (i, &v) in rate.values().iter().enumerate() {
        if v.is_finite() {
            best = best.max(alpha * rate.x_at(i) - v);
        }
    }
    best
}

/// Witness of a convexity violation: three consecutive grid points whose
/// second difference is negative.
#[derive(Debug, Clone, Serialize)]
pub struct ConvexityWitness {
    pub indices: [usize; 3],
    pub xs: [f64; 3],
    pub second_difference: f64,
}

/// A scale at which the cheapest identified user set changes.
#[derive(Debug, Clone, Serialize)]
pub struct SwitchPoint {
    pub index: usize,
    pub x: f64,
    pub before: Vec<usize>,
    pub after: Vec<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvexityReport {
    pub convex: bool,
    pub witness: Option<ConvexityWitness>,
    /// Changes of the identified user set along the grid, when the curve
    /// carries assignment information.
    pub switches: Vec<SwitchPoint>,
}

/// Discrete convexity test on the finite region, with the argmin user
/// assignments (when available) reported wherever they switch.
pub fn convexity_report(
    rate: &RateCurve,
    identified: Option<&[Option<Vec<usize>>]>,
) -> ConvexityReport {
    let witness = second_difference_violation(rate.values()).map(|(i, second)| ConvexityWitness {
        indices: [i - 1, i, i + 1],
        xs: [rate.x_at(i - 1), rate.x_at(i), rate.x_at(i + 1)],
        second_difference: second,
    });
    let mut switches = Vec::new();
    if let Some(sets) = identified {
        for i in 1..sets.len() {
            if let (Some(before), Some(after)) = (&sets[i - 1], &sets[i]) {
                if before != after {
                    switches.push(SwitchPoint {
                        index: i,
                        x: rate.x_at(i),
                        before: before.clone(),
                        after: after.clone(),
                    });
                }
            }
        }
    }
    ConvexityReport {
        convex: witness.is_none(),
        witness,
        switches,
    }
}

/// Point estimate of P(G = n) for strings of length k from the rate curve:
/// exp(-(k I(x) + ln n)) at x = ln(n)/k, 0 where the rate is infinite.
pub fn pmf_approx(rate: &RateCurve, k: usize, n: u128) -> f64 {
    debug_assert!(n >= 1);
    pmf_approx_ln(rate, k, (n as f64).ln())
}

/// Same with ln n supplied directly (for guess indices beyond u128).
pub fn pmf_approx_ln(rate: &RateCurve, k: usize, ln_n: f64) -> f64 {
    let x = ln_n / k as f64;
    let i = rate.value_at(x);
    if i.is_infinite() {
        return 0.0;
    }
    (-(k as f64 * i + ln_n)).exp()
}
