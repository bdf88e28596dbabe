//! Built-in fixture checks runnable from a fresh checkout: the two-user
//! counterexample, the lock-step dominance sweep, the homogeneous closed
//! forms, the mismatched-pair non-convexity and the PMF approximation.

use guesswork_core::asymptotic::{
    avg_growth_exponent, pmf_approx, rate_multi, rate_single_with_points, scgf_multi, RenyiCurve,
    Scgf,
};
use guesswork_core::exact::{
    order_stat_pmf, single_guesswork_pmf, stochastic_dominance, strategy_pmf_exhaustive,
    DominanceRelation, GuessworkPmf,
};
use guesswork_core::sources::{Alphabet, CharacterSource, IidSource, StringDistribution};
use guesswork_core::strategy::{optimal_single_strategy, total_guesswork, u_min, MultiUserStrategy};

use crate::figures::mismatched_pair;

pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn pass(name: &'static str, detail: impl Into<String>) -> Self {
        Check {
            name,
            passed: true,
            detail: detail.into(),
        }
    }

    fn fail(name: &'static str, detail: impl Into<String>) -> Self {
        Check {
            name,
            passed: false,
            detail: detail.into(),
        }
    }

    fn from_result(name: &'static str, result: Result<String, String>) -> Self {
        match result {
            Ok(detail) => Check::pass(name, detail),
            Err(detail) => Check::fail(name, detail),
        }
    }
}

fn iid_dist(probs: Vec<f64>, k: usize) -> StringDistribution {
    let m = probs.len();
    CharacterSource::Iid(IidSource::new(Alphabet::new(m).unwrap(), probs).unwrap())
        .enumerate_distribution(k)
        .unwrap()
}

fn lemma_instances() -> Vec<(Vec<StringDistribution>, &'static str)> {
    vec![
        (
            vec![
                iid_dist(vec![0.6, 0.25, 0.15], 1),
                iid_dist(vec![0.5, 0.4, 0.1], 1),
            ],
            "two ternary users, k=1",
        ),
        (
            vec![iid_dist(vec![0.75, 0.25], 2), iid_dist(vec![0.5, 0.5], 2)],
            "two binary users, k=2",
        ),
        (
            vec![
                iid_dist(vec![0.7, 0.3], 1),
                iid_dist(vec![0.5, 0.5], 1),
                iid_dist(vec![0.9, 0.1], 1),
            ],
            "three binary users, k=1",
        ),
        (
            vec![
                iid_dist(vec![0.5, 0.3, 0.2], 2),
                iid_dist(vec![0.4, 0.35, 0.25], 2),
            ],
            "two ternary users, k=2",
        ),
    ]
}

fn check_single_user_ordering() -> Check {
    const NAME: &str = "single-user-optimal-ordering";
    let dist = iid_dist(vec![0.6, 0.25, 0.15], 1);
    let optimal = single_guesswork_pmf(&dist);
    for seed in 0..50u64 {
        let strategy = MultiUserStrategy::random(1, 3, 1, seed).unwrap();
        let pmf = strategy_pmf_exhaustive(&strategy, std::slice::from_ref(&dist), 1).unwrap();
        let verdict = stochastic_dominance(&optimal, &pmf);
        if !matches!(
            verdict.relation,
            DominanceRelation::Dominates | DominanceRelation::Equal
        ) {
            return Check::fail(NAME, format!("random ordering {seed} beat most-likely-first"));
        }
    }
    Check::pass(NAME, "most-likely-first dominates 50 random orderings")
}

fn check_full_identification_sum() -> Check {
    const NAME: &str = "full-identification-sum-of-ranks";
    let dists = [
        iid_dist(vec![0.6, 0.25, 0.15], 1),
        iid_dist(vec![0.5, 0.4, 0.1], 1),
    ];
    let singles: Vec<_> = dists.iter().map(optimal_single_strategy).collect();
    let expected = [0.3, 0.365, 0.235, 0.085, 0.015];
    for order in [vec![0usize, 1], vec![1, 0]] {
        let rr = MultiUserStrategy::round_robin_with_order(singles.clone(), order).unwrap();
        let pmf = strategy_pmf_exhaustive(&rr, &dists, 2).unwrap();
        for (i, want) in expected.iter().enumerate() {
            let got = pmf.mass_at(i as u64 + 2);
            if (got - want).abs() > 1e-12 {
                return Check::fail(NAME, format!("total {} has mass {got}, want {want}", i + 2));
            }
        }
    }
    Check::pass(
        NAME,
        "U=V total equals the rank convolution for both user orders",
    )
}

fn check_two_user_counterexample() -> Check {
    const NAME: &str = "two-user-counterexample";
    let dists = [
        iid_dist(vec![0.6, 0.25, 0.15], 1),
        iid_dist(vec![0.5, 0.4, 0.1], 1),
    ];
    let lead_first = MultiUserStrategy::from_prefix(2, 3, 1, &[(0, 0), (0, 1)]).unwrap();
    let lead_second = MultiUserStrategy::from_prefix(2, 3, 1, &[(1, 0), (1, 1)]).unwrap();
    let pmf_a = strategy_pmf_exhaustive(&lead_first, &dists, 1).unwrap();
    let pmf_b = strategy_pmf_exhaustive(&lead_second, &dists, 1).unwrap();
    let cdfs = [
        pmf_a.cdf_at(1),
        pmf_a.cdf_at(2),
        pmf_b.cdf_at(1),
        pmf_b.cdf_at(2),
    ];
    let expected = [0.6, 0.85, 0.5, 0.9];
    for (got, want) in cdfs.iter().zip(expected) {
        if (got - want).abs() > 1e-12 {
            return Check::fail(NAME, format!("CDF {got} != {want}"));
        }
    }
    let verdict = stochastic_dominance(&pmf_a, &pmf_b);
    if verdict.relation != DominanceRelation::Incomparable {
        return Check::fail(NAME, format!("expected incomparable, got {:?}", verdict.relation));
    }
    Check::pass(NAME, "CDFs (0.6, 0.85) vs (0.5, 0.9), incomparable")
}

fn check_lock_step_dominance() -> Check {
    const NAME: &str = "lock-step-bound-dominance";
    let mut tested = 0u64;
    for (dists, label) in lemma_instances() {
        let v = dists.len();
        let (m, k) = (dists[0].m(), dists[0].k());
        let per_user: Vec<GuessworkPmf> = dists.iter().map(single_guesswork_pmf).collect();
        for u in 1..=v {
            let bound = order_stat_pmf(&per_user, u).unwrap();
            for seed in 0..100u64 {
                let strategy = MultiUserStrategy::random(v, m, k, seed).unwrap();
                let pmf = strategy_pmf_exhaustive(&strategy, &dists, u).unwrap();
                let verdict = stochastic_dominance(&bound, &pmf);
                if !matches!(
                    verdict.relation,
                    DominanceRelation::Dominates | DominanceRelation::Equal
                ) {
                    return Check::fail(
                        NAME,
                        format!("violated on {label}, u={u}, seed={seed}"),
                    );
                }
                tested += 1;
            }
        }
    }
    Check::pass(NAME, format!("{tested} random strategies dominated"))
}

fn check_order_statistic_example() -> Check {
    const NAME: &str = "both-uniform-bits-order-statistic";
    let pmf = single_guesswork_pmf(&iid_dist(vec![0.5, 0.5], 1));
    let both = order_stat_pmf(&[pmf.clone(), pmf], 2).unwrap();
    if both.mass_at(1) == 0.25 && both.mass_at(2) == 0.75 {
        Check::pass(NAME, "masses exactly (1/4, 3/4)")
    } else {
        Check::fail(
            NAME,
            format!("masses ({}, {})", both.mass_at(1), both.mass_at(2)),
        )
    }
}

fn check_homogeneous_closed_forms() -> Check {
    const NAME: &str = "homogeneous-closed-forms";
    let result = (|| -> Result<String, String> {
        let renyi = RenyiCurve::iid(&IidSource::bernoulli(0.25).unwrap());
        let scgf = Scgf::new(renyi.clone());
        let rate = rate_single_with_points(&scgf, 1024).map_err(|e| e.to_string())?;
        let shannon = renyi.shannon();
        for (u, v) in [(1usize, 1usize), (1, 2), (2, 3), (3, 3)] {
            let multi = rate_multi(&vec![rate.clone(); v], u).map_err(|e| e.to_string())?;
            for i in 0..rate.points() {
                let x = rate.x_at(i);
                let branch = if x <= shannon {
                    u as f64 * rate.values()[i]
                } else {
                    (v - u + 1) as f64 * rate.values()[i]
                };
                let got = multi.curve.values()[i];
                if (got - branch).abs() > 1e-9 {
                    return Err(format!("rate branch mismatch at u={u} v={v} x={x}"));
                }
            }
            let growth = scgf_multi(&multi.curve, 1.0);
            let direct = avg_growth_exponent(&renyi, u, v).map_err(|e| e.to_string())?;
            if (growth - direct).abs() > 1e-4 {
                return Err(format!(
                    "moment growth mismatch at u={u} v={v}: {growth} vs {direct}"
                ));
            }
        }
        Ok("branch forms and moment growth agree for (1,1),(1,2),(2,3),(3,3)".into())
    })();
    Check::from_result(NAME, result)
}

fn check_diminishing_returns() -> Check {
    const NAME: &str = "diminishing-returns";
    let renyi = RenyiCurve::iid(&IidSource::bernoulli(0.25).unwrap());
    let shannon = renyi.shannon();
    let values: Vec<f64> = (0..=10)
        .map(|n| avg_growth_exponent(&renyi, 1, 1 + n).unwrap())
        .collect();
    for w in values.windows(2) {
        if w[0] <= w[1] || w[1] < shannon - 1e-12 {
            return Check::fail(NAME, "growth exponents not decreasing toward the entropy");
        }
    }
    let increments: Vec<f64> = values.windows(2).map(|w| w[0] - w[1]).collect();
    for w in increments.windows(2) {
        if w[0] < w[1] - 1e-12 {
            return Check::fail(NAME, "increments grew with the excess user count");
        }
    }
    Check::pass(
        NAME,
        "exponent decreases toward the entropy with shrinking increments",
    )
}

fn check_mismatched_pair() -> Check {
    const NAME: &str = "mismatched-pair-nonconvexity";
    let result = (|| -> Result<String, String> {
        let pair = mismatched_pair(2048).map_err(|e| e.to_string())?;
        let ln2 = std::f64::consts::LN_2;
        for i in 0..pair.combined.curve.points() {
            let x = pair.combined.curve.x_at(i);
            let got = pair.combined.curve.values()[i];
            if x <= ln2 {
                let expected = pair.bit_rate.values()[i].min(pair.byte_rate.values()[i]);
                if (got - expected).abs() > 1e-6 {
                    return Err(format!("not the pointwise minimum at x={x}"));
                }
            } else if !got.is_infinite() {
                return Err(format!("finite rate {got} beyond one bit at x={x}"));
            }
        }
        let report = pair.combined.convexity_report();
        if report.convex {
            return Err("combined rate unexpectedly convex".into());
        }
        let flip = report
            .switches
            .iter()
            .any(|s| s.before == vec![1] && s.after == vec![0]);
        if !flip {
            return Err("no byte-to-bit switch of the identified user".into());
        }
        Ok("minimum rule, non-convexity and the user switch all hold".into())
    })();
    Check::from_result(NAME, result)
}

fn check_round_robin_sandwich() -> Check {
    const NAME: &str = "round-robin-sandwich";
    let mut swept = 0u64;
    for (dists, label) in lemma_instances() {
        let v = dists.len();
        let n = dists[0].len();
        let singles: Vec<_> = dists.iter().map(optimal_single_strategy).collect();
        let rr = MultiUserStrategy::round_robin(singles.clone()).unwrap();
        for u in 1..=v {
            let mut joint = vec![0usize; v];
            'sweep: loop {
                let ranks: Vec<u64> = (0..v)
                    .map(|user| singles[user].rank_of_index(joint[user]))
                    .collect();
                let bound = u_min(&ranks, u).unwrap();
                let realized: Vec<Vec<u8>> =
                    (0..v).map(|user| dists[user].string_at(joint[user])).collect();
                let total = total_guesswork(&rr, u, &realized).unwrap().total;
                if !(bound <= total && total <= v as u64 * bound) {
                    return Check::fail(
                        NAME,
                        format!("violated on {label}, u={u}, joint={joint:?}"),
                    );
                }
                swept += 1;
                let mut pos = v;
                loop {
                    if pos == 0 {
                        break 'sweep;
                    }
                    pos -= 1;
                    joint[pos] += 1;
                    if joint[pos] < n {
                        break;
                    }
                    joint[pos] = 0;
                }
            }
        }
    }
    Check::pass(NAME, format!("{swept} realized vectors inside the sandwich"))
}

fn check_pmf_approximation() -> Check {
    const NAME: &str = "pmf-approximation";
    let result = (|| -> Result<String, String> {
        let uniform = Scgf::new(RenyiCurve::iid(&IidSource::uniform(2).unwrap()));
        let rate = rate_single_with_points(&uniform, 2048).map_err(|e| e.to_string())?;
        let k = 12;
        for n in [1u128, 7, 512, 4096] {
            let got = pmf_approx(&rate, k, n);
            let expected = 0.5f64.powi(k as i32);
            if ((got - expected) / expected).abs() > 1e-12 {
                return Err(format!("uniform mass at n={n} is {got}, want {expected}"));
            }
        }
        let skew = Scgf::new(RenyiCurve::iid(&IidSource::bernoulli(0.25).unwrap()));
        let rate = rate_single_with_points(&skew, 2048).map_err(|e| e.to_string())?;
        let total: f64 = (1u128..=1024).map(|n| pmf_approx(&rate, 10, n)).sum();
        if !(0.2..5.0).contains(&total) {
            return Err(format!("skewed normalization {total} outside [0.2, 5)"));
        }
        Ok(format!(
            "uniform masses exact, skewed normalization {total:.3} subexponential"
        ))
    })();
    Check::from_result(NAME, result)
}

/// Run every built-in fixture.
pub fn run_all() -> Vec<Check> {
    vec![
        check_single_user_ordering(),
        check_full_identification_sum(),
        check_two_user_counterexample(),
        check_lock_step_dominance(),
        check_order_statistic_example(),
        check_homogeneous_closed_forms(),
        check_diminishing_returns(),
        check_mismatched_pair(),
        check_round_robin_sandwich(),
        check_pmf_approximation(),
    ]
}
