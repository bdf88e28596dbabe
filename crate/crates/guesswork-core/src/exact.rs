//! Exact finite-length guesswork distributions: per-user PMFs from sorted
//! enumeration, the order-statistic PMF of the lock-step lower bound, the
//! exhaustive PMF of an arbitrary strategy, stochastic dominance verdicts
//! and moments. This module is the ground truth the asymptotic results are
//! checked against.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sources::StringDistribution;
use crate::strategy::{u_min, MultiUserStrategy, SingleUserStrategy};

/// Joint outcomes an exhaustive strategy sweep may enumerate.
pub const DEFAULT_JOINT_CAP: u64 = 1 << 20;

/// CDF comparisons treat differences within this as ties.
pub const DOMINANCE_TOL: f64 = 1e-12;

const MAX_WITNESSES: usize = 64;

/// A probability mass function over guess counts `1..=N`.
#[derive(Debug, Clone, PartialEq)]
pub struct GuessworkPmf {
    mass: Vec<f64>,
    cdf: Vec<f64>,
}

impl GuessworkPmf {
    pub fn from_mass(mass: Vec<f64>) -> Result<Self> {
        if mass.is_empty() {
            return Err(Error::InvalidProbabilities("empty mass vector".into()));
        }
        if mass.iter().any(|p| !(p.is_finite() && *p >= -1e-12)) {
            return Err(Error::InvalidProbabilities(
                "guesswork masses must be nonnegative".into(),
            ));
        }
        let mut cdf = Vec::with_capacity(mass.len());
        let mut acc = 0.0;
        for &p in &mass {
            acc += p;
            cdf.push(acc);
        }
        if (acc - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidProbabilities(format!(
                "guesswork masses sum to {acc}, expected 1 within 1e-9"
            )));
        }
        Ok(GuessworkPmf { mass, cdf })
    }

    pub fn support_len(&self) -> usize {
        self.mass.len()
    }

    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    /// P(G = n), zero outside the support.
    pub fn mass_at(&self, n: u64) -> f64 {
        if n == 0 || n as usize > self.mass.len() {
            0.0
        } else {
            self.mass[(n - 1) as usize]
        }
    }

    /// P(G <= n); 1 beyond the support.
    pub fn cdf_at(&self, n: u64) -> f64 {
        if n == 0 {
            0.0
        } else if n as usize >= self.cdf.len() {
            1.0
        } else {
            self.cdf[(n - 1) as usize]
        }
    }

    /// E[G^alpha].
    pub fn moment(&self, alpha: f64) -> f64 {
        self.mass
            .iter()
            .enumerate()
            .map(|(i, &p)| ((i + 1) as f64).powf(alpha) * p)
            .sum()
    }

    pub fn mean(&self) -> f64 {
        self.moment(1.0)
    }

    /// CSV with columns n, mass, cdf.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,mass,cdf\n");
        for (i, (&p, &c)) in self.mass.iter().zip(&self.cdf).enumerate() {
            out.push_str(&format!("{},{},{}\n", i + 1, p, c));
        }
        out
    }
}

/// E[G^alpha] of a PMF.
pub fn moment(pmf: &GuessworkPmf, alpha: f64) -> f64 {
    pmf.moment(alpha)
}

/// PMF of the optimal single-user strategy: the n-th mass is the
/// probability of the n-th most likely string under the canonical
/// tie-break.
pub fn single_guesswork_pmf(dist: &StringDistribution) -> GuessworkPmf {
    let strategy = SingleUserStrategy::optimal(dist);
    let mass: Vec<f64> = (1..=strategy.num_strings())
        .map(|rank| dist.prob_at(strategy.index_of_rank(rank).expect("rank in range")))
        .collect();
    GuessworkPmf::from_mass(mass).expect("sorted distribution is a pmf")
}

/// Exact PMF of the U-th smallest of V independent per-user guess counts.
///
/// For each n the events {G_v <= n} are independent Bernoullis with
/// probabilities F_v(n); P(U-min <= n) = P(at least U successes), computed
/// by the Poisson-binomial recursion and differenced in n. Ties across
/// users are handled exactly because only CDF values enter.
pub fn order_stat_pmf(per_user: &[GuessworkPmf], u: usize) -> Result<GuessworkPmf> {
    let v = per_user.len();
    if u < 1 || u > v {
        return Err(Error::OrderStatOutOfRange { u, v });
    }
    let max_n = per_user.iter().map(|p| p.support_len()).max().unwrap();
    let mut mass = Vec::with_capacity(max_n);
    let mut prev = 0.0;
    let mut coeff = vec![0.0f64; v + 1];
    for n in 1..=max_n as u64 {
        // coeff[j] = P(exactly j of the V events hold).
        coeff.fill(0.0);
        coeff[0] = 1.0;
        for (i, pmf) in per_user.iter().enumerate() {
            let q = pmf.cdf_at(n);
            for j in (1..=i + 1).rev() {
                coeff[j] = coeff[j] * (1.0 - q) + coeff[j - 1] * q;
            }
            coeff[0] *= 1.0 - q;
        }
        let at_least_u: f64 = coeff[u..].iter().sum();
        mass.push((at_least_u - prev).max(0.0));
        prev = at_least_u;
    }
    GuessworkPmf::from_mass(mass)
}

/// Exact PMF of a strategy's guess count, by exhaustive enumeration of the
/// joint string space under the default cap.
pub fn strategy_pmf_exhaustive(
    strategy: &MultiUserStrategy,
    dists: &[StringDistribution],
    u: usize,
) -> Result<GuessworkPmf> {
    strategy_pmf_exhaustive_with_cap(strategy, dists, u, DEFAULT_JOINT_CAP)
}

pub fn strategy_pmf_exhaustive_with_cap(
    strategy: &MultiUserStrategy,
    dists: &[StringDistribution],
    u: usize,
    cap: u64,
) -> Result<GuessworkPmf> {
    let v = strategy.v();
    if dists.len() != v {
        return Err(Error::Config(format!(
            "{} distributions for {v} users",
            dists.len()
        )));
    }
    if u < 1 || u > v {
        return Err(Error::OrderStatOutOfRange { u, v });
    }
    let per_user = strategy.strings_per_user();
    for d in dists {
        if d.len() as u64 != per_user {
            return Err(Error::DomainMismatch(
                "distribution domain does not match the strategy".into(),
            ));
        }
    }
    let needed = (per_user as u128).pow(v as u32);
    if needed > cap as u128 {
        return Err(Error::JointCapExceeded { needed, cap });
    }

    let per_user = per_user as usize;
    let mut mass = vec![0.0f64; strategy.num_queries() as usize];
    let mut indices = vec![0usize; v];
    let mut query_positions = vec![0u64; v];
    loop {
        let mut prob = 1.0;
        for (user, &idx) in indices.iter().enumerate() {
            prob *= dists[user].prob_at(idx);
            query_positions[user] = strategy.query_index(user, idx);
        }
        if prob > 0.0 {
            let stop = u_min(&query_positions, u)?;
            let total: u64 = (0..v)
                .map(|user| strategy.queries_to_user(user, query_positions[user].min(stop)))
                .sum();
            mass[(total - 1) as usize] += prob;
        }
        // Odometer over the joint outcome space.
        let mut pos = v;
        loop {
            if pos == 0 {
                return GuessworkPmf::from_mass(mass);
            }
            pos -= 1;
            indices[pos] += 1;
            if indices[pos] < per_user {
                break;
            }
            indices[pos] = 0;
        }
    }
}

/// How one guess-count distribution compares to another, CDF-pointwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DominanceRelation {
    /// First identifies strings probabilistically sooner (CDF >= everywhere).
    Dominates,
    DominatedBy,
    Equal,
    Incomparable,
}

/// Verdict with witnesses: guess counts at which each direction's CDF
/// inequality strictly fails (up to 64 kept per direction).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DominanceVerdict {
    pub relation: DominanceRelation,
    /// n where CDF_a(n) > CDF_b(n) + tol.
    pub a_above: Vec<u64>,
    /// n where CDF_b(n) > CDF_a(n) + tol.
    pub b_above: Vec<u64>,
}

/// Compare two PMFs for stochastic dominance of the guess count, padding
/// supports to a common length.
pub fn stochastic_dominance(a: &GuessworkPmf, b: &GuessworkPmf) -> DominanceVerdict {
    let max_n = a.support_len().max(b.support_len()) as u64;
    let mut a_above = Vec::new();
    let mut b_above = Vec::new();
    for n in 1..=max_n {
        let fa = a.cdf_at(n);
        let fb = b.cdf_at(n);
        if fa > fb + DOMINANCE_TOL && a_above.len() < MAX_WITNESSES {
            a_above.push(n);
        } else if fb > fa + DOMINANCE_TOL && b_above.len() < MAX_WITNESSES {
            b_above.push(n);
        }
    }
    let relation = match (a_above.is_empty(), b_above.is_empty()) {
        (true, true) => DominanceRelation::Equal,
        (false, true) => DominanceRelation::Dominates,
        (true, false) => DominanceRelation::DominatedBy,
        (false, false) => DominanceRelation::Incomparable,
    };
    DominanceVerdict {
        relation,
        a_above,
        b_above,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sources::{Alphabet, CharacterSource, IidSource};
    use crate::strategy::optimal_single_strategy;

    fn dist_of(probs: Vec<f64>) -> StringDistribution {
        let m = probs.len();
        let s = CharacterSource::Iid(IidSource::new(Alphabet::new(m).unwrap(), probs).unwrap());
        s.enumerate_distribution(1).unwrap()
    }

    fn uniform_bits_k1() -> StringDistribution {
        CharacterSource::Iid(IidSource::uniform(2).unwrap())
            .enumerate_distribution(1)
            .unwrap()
    }

    #[test]
    fn single_pmf_uniform_bits() {
        let pmf = single_guesswork_pmf(&uniform_bits_k1());
        assert_eq!(pmf.mass(), &[0.5, 0.5]);
    }

    #[test]
    fn single_pmf_lemma3_user2() {
        let pmf = single_guesswork_pmf(&dist_of(vec![0.5, 0.4, 0.1]));
        assert_eq!(pmf.mass(), &[0.5, 0.4, 0.1]);
    }

    #[test]
    fn single_pmf_bernoulli_quarter_k2() {
        let s = CharacterSource::Iid(IidSource::bernoulli(0.75).unwrap());
        let pmf = single_guesswork_pmf(&s.enumerate_distribution(2).unwrap());
        assert_eq!(pmf.mass(), &[0.5625, 0.1875, 0.1875, 0.0625]);
    }

    #[test]
    fn single_pmf_is_nonincreasing() {
        let s = CharacterSource::Iid(IidSource::bernoulli(0.7).unwrap());
        let pmf = single_guesswork_pmf(&s.enumerate_distribution(4).unwrap());
        for w in pmf.mass().windows(2) {
            assert!(w[0] >= w[1]);
        }
    }

    #[test]
    fn order_stat_both_uniform_bits() {
        let pmf = single_guesswork_pmf(&uniform_bits_k1());
        let both = order_stat_pmf(&[pmf.clone(), pmf.clone()], 2).unwrap();
        assert_eq!(both.mass(), &[0.25, 0.75]);
        let either = order_stat_pmf(&[pmf.clone(), pmf], 1).unwrap();
        assert_eq!(either.mass(), &[0.75, 0.25]);
    }

    #[test]
    fn order_stat_single_user_is_identity() {
        let pmf = single_guesswork_pmf(&dist_of(vec![0.5, 0.4, 0.1]));
        let out = order_stat_pmf(std::slice::from_ref(&pmf), 1).unwrap();
        for (a, b) in out.mass().iter().zip(pmf.mass()) {
            assert!((a - b).abs() < 1e-15); // CDF differencing round-off only
        }
    }

    #[test]
    fn order_stat_rejects_bad_u() {
        let pmf = single_guesswork_pmf(&uniform_bits_k1());
        assert!(order_stat_pmf(&[pmf.clone()], 0).is_err());
        assert!(order_stat_pmf(&[pmf], 2).is_err());
    }

    #[test]
    fn exhaustive_single_user_matches_sorted_pmf() {
        let dist = dist_of(vec![0.6, 0.25, 0.15]);
        let strat =
            MultiUserStrategy::round_robin(vec![optimal_single_strategy(&dist)]).unwrap();
        let pmf = strategy_pmf_exhaustive(&strat, std::slice::from_ref(&dist), 1).unwrap();
        let direct = single_guesswork_pmf(&dist);
        for n in 1..=3 {
            assert!((pmf.mass_at(n) - direct.mass_at(n)).abs() < 1e-15);
        }
    }

    #[test]
    fn lemma3_prefix_strategies() {
        let d1 = dist_of(vec![0.6, 0.25, 0.15]);
        let d2 = dist_of(vec![0.5, 0.4, 0.1]);
        let dists = [d1, d2];

        // Lead with user 1's two most likely strings.
        let a = MultiUserStrategy::from_prefix(2, 3, 1, &[(0, 0), (0, 1)]).unwrap();
        let pmf_a = strategy_pmf_exhaustive(&a, &dists, 1).unwrap();
        assert!((pmf_a.cdf_at(1) - 0.6).abs() < 1e-12);
        assert!((pmf_a.cdf_at(2) - 0.85).abs() < 1e-12);

        // Lead with user 2's two most likely strings.
        let b = MultiUserStrategy::from_prefix(2, 3, 1, &[(1, 0), (1, 1)]).unwrap();
        let pmf_b = strategy_pmf_exhaustive(&b, &dists, 1).unwrap();
        assert!((pmf_b.cdf_at(1) - 0.5).abs() < 1e-12);
        assert!((pmf_b.cdf_at(2) - 0.9).abs() < 1e-12);

        // Beyond n = 2 the CDFs depend on how the prefixes were completed;
        // the counterexample is carried by n = 1 and n = 2.
        let verdict = stochastic_dominance(&pmf_a, &pmf_b);
        assert_eq!(verdict.relation, DominanceRelation::Incomparable);
        assert!(verdict.a_above.contains(&1));
        assert!(verdict.b_above.contains(&2));
    }

    #[test]
    fn identical_pmfs_are_equal() {
        let pmf = single_guesswork_pmf(&uniform_bits_k1());
        let verdict = stochastic_dominance(&pmf, &pmf);
        assert_eq!(verdict.relation, DominanceRelation::Equal);
        assert!(verdict.a_above.is_empty() && verdict.b_above.is_empty());
    }

    #[test]
    fn moments() {
        let uniform = single_guesswork_pmf(&uniform_bits_k1());
        assert_eq!(uniform.moment(1.0), 1.5);
        assert_eq!(uniform.moment(0.0), 1.0);
        let lemma3 = single_guesswork_pmf(&dist_of(vec![0.6, 0.25, 0.15]));
        assert!((lemma3.moment(1.0) - 1.55).abs() < 1e-12);
    }

    #[test]
    fn csv_has_header_and_rows() {
        let pmf = single_guesswork_pmf(&uniform_bits_k1());
        let csv = pmf.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("n,mass,cdf"));
        assert_eq!(lines.next(), Some("1,0.5,0.5"));
        assert_eq!(lines.next(), Some("2,0.5,1"));
    }

    #[test]
    fn joint_cap_is_enforced() {
        let dist = uniform_bits_k1();
        let strat = MultiUserStrategy::round_robin(vec![
            optimal_single_strategy(&dist),
            optimal_single_strategy(&dist),
        ])
        .unwrap();
        let err = strategy_pmf_exhaustive_with_cap(
            &strat,
            &[dist.clone(), dist],
            1,
            3,
        )
        .unwrap_err();
        assert!(matches!(err, Error::JointCapExceeded { needed: 4, cap: 3 }));
    }
}
