//! Guessing strategies: single-user optimal orderings, multi-user query
//! orders (round-robin and arbitrary explicit tables), and the exact query
//! count of a realized string vector.
//!
//! A single-user strategy is a bijection between `A^k` and ranks
//! `1..=m^k`; the optimal one guesses from most to least likely. Ties are
//! broken by ascending lexicographic string order so rebuilt strategies
//! are always identical.
//!
//! A multi-user strategy orders (user, string) pairs. The number of
//! queries made until `U` of `V` strings are identified stops the count
//! for each user at the moment its string is found or at the global
//! stopping index, whichever comes first.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sources::StringDistribution;

/// An injective ordering of one user's strings, rank 1 first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SingleUserStrategy {
    m: usize,
    k: usize,
    rank_by_index: Vec<u32>,
    index_by_rank: Vec<u32>,
}

impl SingleUserStrategy {
    /// The optimal strategy for `dist`: descending probability, ties by
    /// ascending lexicographic order.
    pub fn optimal(dist: &StringDistribution) -> Self {
        let mut order: Vec<u32> = (0..dist.len() as u32).collect();
        order.sort_unstable_by(|&a, &b| {
            let pa = dist.prob_at(a as usize);
            let pb = dist.prob_at(b as usize);
            pb.partial_cmp(&pa).unwrap().then(a.cmp(&b))
        });
        let mut rank_by_index = vec![0u32; order.len()];
        for (pos, &idx) in order.iter().enumerate() {
            rank_by_index[idx as usize] = pos as u32;
        }
        SingleUserStrategy {
            m: dist.m(),
            k: dist.k(),
            rank_by_index,
            index_by_rank: order,
        }
    }

    /// An arbitrary ordering given as string indices in query order.
    pub fn from_order(m: usize, k: usize, order: Vec<u32>) -> Result<Self> {
        let n = crate::sources::Alphabet::new(m)?.num_strings(k);
        if order.len() as u128 != n {
            return Err(Error::DomainMismatch(format!(
                "ordering has {} entries, expected {n}",
                order.len()
            )));
        }
        let mut rank_by_index = vec![u32::MAX; order.len()];
        for (pos, &idx) in order.iter().enumerate() {
            if idx as usize >= order.len() || rank_by_index[idx as usize] != u32::MAX {
                return Err(Error::DomainMismatch(
                    "ordering is not a bijection over the string domain".into(),
                ));
            }
            rank_by_index[idx as usize] = pos as u32;
        }
        Ok(SingleUserStrategy {
            m,
            k,
            rank_by_index,
            index_by_rank: order,
        })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn num_strings(&self) -> u64 {
        self.rank_by_index.len() as u64
    }

    /// 1-based rank of string `w`.
    pub fn rank_of(&self, w: &[u8]) -> Result<u64> {
        Ok(self.rank_of_index(self.string_index(w)?))
    }

    /// 1-based rank of the string with lexicographic index `idx`.
    pub fn rank_of_index(&self, idx: usize) -> u64 {
        self.rank_by_index[idx] as u64 + 1
    }

    /// Lexicographic index of the string queried at `rank`.
    pub fn index_of_rank(&self, rank: u64) -> Result<usize> {
        if rank < 1 || rank > self.num_strings() {
            return Err(Error::DomainMismatch(format!(
                "rank {rank} outside 1..={}",
                self.num_strings()
            )));
        }
        Ok(self.index_by_rank[(rank - 1) as usize] as usize)
    }

    pub fn string_of_rank(&self, rank: u64) -> Result<Vec<u8>> {
        let mut idx = self.index_of_rank(rank)?;
        let mut w = vec![0u8; self.k];
        for pos in (0..self.k).rev() {
            w[pos] = (idx % self.m) as u8;
            idx /= self.m;
        }
        Ok(w)
    }

    fn string_index(&self, w: &[u8]) -> Result<usize> {
        if w.len() != self.k {
            return Err(Error::LengthMismatch {
                got: w.len(),
                expected: self.k,
            });
        }
        let mut idx = 0usize;
        for &c in w {
            if c as usize >= self.m {
                return Err(Error::CharacterOutOfAlphabet {
                    character: c,
                    m: self.m,
                });
            }
            idx = idx * self.m + c as usize;
        }
        Ok(idx)
    }
}

/// Build the optimal single-user strategy for a distribution.
pub fn optimal_single_strategy(dist: &StringDistribution) -> SingleUserStrategy {
    SingleUserStrategy::optimal(dist)
}

/// The U-th smallest component (ascending, ties counted with multiplicity).
pub fn u_min<T: Ord + Clone>(values: &[T], u: usize) -> Result<T> {
    if u < 1 || u > values.len() {
        return Err(Error::OrderStatOutOfRange {
            u,
            v: values.len(),
        });
    }
    let mut sorted = values.to_vec();
    sorted.sort();
    Ok(sorted[u - 1].clone())
}

/// U-th order statistic of per-user optimal ranks: the count at which the
/// U-th string is identified when every user's list is advanced in lock
/// step, charging one query per round.
pub fn g_opt(ranks: &[u64], u: usize) -> Result<u64> {
    u_min(ranks, u)
}

/// An injective ordering of (user, string) query pairs.
#[derive(Debug, Clone)]
pub enum MultiUserStrategy {
    /// Implicit rank formula: pair (v, w) is queried at position
    /// `(rank_v(w) - 1) * V + slot_v`, where `slot_v` is the user's 1-based
    /// place in the round order. Works at any `k` the single strategies
    /// support.
    RoundRobin {
        singles: Vec<SingleUserStrategy>,
        /// `order[s]` = the user queried in slot `s` of each round.
        order: Vec<usize>,
    },
    /// Explicit query table for small domains.
    Explicit(ExplicitStrategy),
}

#[derive(Debug, Clone)]
pub struct ExplicitStrategy {
    v: usize,
    m: usize,
    k: usize,
    /// `position[v * m^k + idx]` = 1-based query position of pair (v, idx).
    position: Vec<u64>,
    /// Per user, sorted query positions (for counting queries up to n).
    per_user_positions: Vec<Vec<u64>>,
}

impl ExplicitStrategy {
    fn strings_per_user(&self) -> usize {
        self.position.len() / self.v
    }
}

impl MultiUserStrategy {
    /// Interleave single-user strategies one query per user per round, in
    /// user index order.
    pub fn round_robin(singles: Vec<SingleUserStrategy>) -> Result<Self> {
        let order = (0..singles.len()).collect();
        MultiUserStrategy::round_robin_with_order(singles, order)
    }

    /// Round-robin with an explicit user visiting order per round.
    pub fn round_robin_with_order(
        singles: Vec<SingleUserStrategy>,
        order: Vec<usize>,
    ) -> Result<Self> {
        if singles.is_empty() {
            return Err(Error::DomainMismatch("no single-user strategies".into()));
        }
        let (m, k) = (singles[0].m(), singles[0].k());
        if singles.iter().any(|s| s.m() != m || s.k() != k) {
            return Err(Error::DomainMismatch(
                "round-robin needs all strategies over the same string domain".into(),
            ));
        }
        let v = singles.len();
        let mut seen = vec![false; v];
        if order.len() != v || order.iter().any(|&u| u >= v || std::mem::replace(&mut seen[u], true)) {
            return Err(Error::DomainMismatch(
                "round order must be a permutation of the users".into(),
            ));
        }
        Ok(MultiUserStrategy::RoundRobin { singles, order })
    }

    /// Build from the full query sequence of (user, string index) pairs.
    pub fn from_query_sequence(
        v: usize,
        m: usize,
        k: usize,
        sequence: Vec<(usize, u32)>,
    ) -> Result<Self> {
        let per_user = crate::sources::Alphabet::new(m)?.num_strings(k);
        let total = per_user
            .checked_mul(v as u128)
            .filter(|t| *t <= (1u128 << 32))
            .ok_or_else(|| Error::DomainMismatch("explicit table too large".into()))?;
        if sequence.len() as u128 != total {
            return Err(Error::DomainMismatch(format!(
                "query sequence has {} pairs, expected {total}",
                sequence.len()
            )));
        }
        let per_user = per_user as usize;
        let mut position = vec![0u64; sequence.len()];
        for (pos, &(user, idx)) in sequence.iter().enumerate() {
            if user >= v || idx as usize >= per_user {
                return Err(Error::DomainMismatch(format!(
                    "pair ({user}, {idx}) outside the query domain"
                )));
            }
            let slot = user * per_user + idx as usize;
            if position[slot] != 0 {
                return Err(Error::DomainMismatch(format!(
                    "pair ({user}, {idx}) queried twice"
                )));
            }
            position[slot] = pos as u64 + 1;
        }
        let mut per_user_positions = vec![Vec::with_capacity(per_user); v];
        for user in 0..v {
            let mut ps: Vec<u64> = position[user * per_user..(user + 1) * per_user].to_vec();
            ps.sort_unstable();
            per_user_positions[user] = ps;
        }
        Ok(MultiUserStrategy::Explicit(ExplicitStrategy {
            v,
            m,
            k,
            position,
            per_user_positions,
        }))
    }

    /// Complete a query prefix into a full strategy; the remaining pairs
    /// follow in (user, string index) order.
    pub fn from_prefix(v: usize, m: usize, k: usize, prefix: &[(usize, u32)]) -> Result<Self> {
        let per_user = crate::sources::Alphabet::new(m)?.num_strings(k) as usize;
        let mut taken = vec![false; v * per_user];
        let mut sequence = Vec::with_capacity(v * per_user);
        for &(user, idx) in prefix {
            if user >= v || idx as usize >= per_user {
                return Err(Error::DomainMismatch(format!(
                    "prefix pair ({user}, {idx}) outside the query domain"
                )));
            }
            if std::mem::replace(&mut taken[user * per_user + idx as usize], true) {
                return Err(Error::DomainMismatch(format!(
                    "prefix pair ({user}, {idx}) repeated"
                )));
            }
            sequence.push((user, idx));
        }
        for user in 0..v {
            for idx in 0..per_user {
                if !taken[user * per_user + idx] {
                    sequence.push((user, idx as u32));
                }
            }
        }
        MultiUserStrategy::from_query_sequence(v, m, k, sequence)
    }

    /// A seeded Fisher-Yates shuffle of the whole (user, string) pair set.
    pub fn random(v: usize, m: usize, k: usize, seed: u64) -> Result<Self> {
        let per_user = crate::sources::Alphabet::new(m)?.num_strings(k) as usize;
        let mut pairs: Vec<(usize, u32)> = (0..v)
            .flat_map(|user| (0..per_user as u32).map(move |idx| (user, idx)))
            .collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        pairs.shuffle(&mut rng);
        MultiUserStrategy::from_query_sequence(v, m, k, pairs)
    }

    pub fn v(&self) -> usize {
        match self {
            MultiUserStrategy::RoundRobin { singles, .. } => singles.len(),
            MultiUserStrategy::Explicit(e) => e.v,
        }
    }

    pub fn m(&self) -> usize {
        match self {
            MultiUserStrategy::RoundRobin { singles, .. } => singles[0].m(),
            MultiUserStrategy::Explicit(e) => e.m,
        }
    }

    pub fn k(&self) -> usize {
        match self {
            MultiUserStrategy::RoundRobin { singles, .. } => singles[0].k(),
            MultiUserStrategy::Explicit(e) => e.k,
        }
    }

    pub fn strings_per_user(&self) -> u64 {
        match self {
            MultiUserStrategy::RoundRobin { singles, .. } => singles[0].num_strings(),
            MultiUserStrategy::Explicit(e) => e.strings_per_user() as u64,
        }
    }

    /// Total queries in the full ordering, `V * m^k`.
    pub fn num_queries(&self) -> u64 {
        self.strings_per_user() * self.v() as u64
    }

    /// S(v, w): the 1-based position at which pair (user, string index) is
    /// queried.
    pub fn query_index(&self, user: usize, string_index: usize) -> u64 {
        match self {
            MultiUserStrategy::RoundRobin { singles, order } => {
                let v = singles.len() as u64;
                let slot = order.iter().position(|&u| u == user).expect("user in order") as u64 + 1;
                (singles[user].rank_of_index(string_index) - 1) * v + slot
            }
            MultiUserStrategy::Explicit(e) => {
                e.position[user * e.strings_per_user() + string_index]
            }
        }
    }

    /// N_S(v, n): queries addressed to `user` among the first `n` overall.
    pub fn queries_to_user(&self, user: usize, n: u64) -> u64 {
        match self {
            MultiUserStrategy::RoundRobin { singles, order } => {
                let v = singles.len() as u64;
                let slot = order.iter().position(|&u| u == user).expect("user in order") as u64 + 1;
                if n < slot {
                    0
                } else {
                    ((n - slot) / v + 1).min(singles[user].num_strings())
                }
            }
            MultiUserStrategy::Explicit(e) => {
                e.per_user_positions[user].partition_point(|&p| p <= n) as u64
            }
        }
    }
}

/// The audited outcome of guessing one realized string vector.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GuessTrace {
    /// The strings the users actually selected.
    pub realized: Vec<Vec<u8>>,
    /// S(v, w_v) per user: where each user's string sits in the ordering.
    pub query_indices: Vec<u64>,
    /// T(U, V, w): the U-th smallest query index; querying stops here.
    pub stopping_index: u64,
    /// Total queries charged across users.
    pub total: u64,
}

impl GuessTrace {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("trace serializes")
    }
}

/// Count the queries a strategy makes before `u` of the realized strings
/// are identified: each user is charged up to the moment its own string is
/// found or the global stopping index, whichever is earlier.
pub fn total_guesswork(
    strategy: &MultiUserStrategy,
    u: usize,
    realized: &[Vec<u8>],
) -> Result<GuessTrace> {
    let v = strategy.v();
    if realized.len() != v {
        return Err(Error::Config(format!(
            "{} realized strings for {v} users",
            realized.len()
        )));
    }
    if u < 1 || u > v {
        return Err(Error::OrderStatOutOfRange { u, v });
    }
    let m = strategy.m();
    let k = strategy.k();
    let mut query_indices = Vec::with_capacity(v);
    for (user, w) in realized.iter().enumerate() {
        if w.len() != k {
            return Err(Error::LengthMismatch {
                got: w.len(),
                expected: k,
            });
        }
        let mut idx = 0usize;
        for &c in w {
            if c as usize >= m {
                return Err(Error::CharacterOutOfAlphabet { character: c, m });
            }
            idx = idx * m + c as usize;
        }
        query_indices.push(strategy.query_index(user, idx));
    }
    let stopping_index = u_min(&query_indices, u)?;
    let total = (0..v)
        .map(|user| strategy.queries_to_user(user, query_indices[user].min(stopping_index)))
        .sum();
    Ok(GuessTrace {
        realized: realized.to_vec(),
        query_indices,
        stopping_index,
        total,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sources::{Alphabet, CharacterSource, IidSource};

    fn lemma3_user1() -> StringDistribution {
        let s = CharacterSource::Iid(
            IidSource::new(Alphabet::new(3).unwrap(), vec![0.6, 0.25, 0.15]).unwrap(),
        );
        s.enumerate_distribution(1).unwrap()
    }

    fn lemma3_user2() -> StringDistribution {
        let s = CharacterSource::Iid(
            IidSource::new(Alphabet::new(3).unwrap(), vec![0.5, 0.4, 0.1]).unwrap(),
        );
        s.enumerate_distribution(1).unwrap()
    }

    #[test]
    fn optimal_order_sorts_by_probability() {
        let strat = optimal_single_strategy(&lemma3_user1());
        assert_eq!(strat.rank_of(&[0]).unwrap(), 1);
        assert_eq!(strat.rank_of(&[1]).unwrap(), 2);
        assert_eq!(strat.rank_of(&[2]).unwrap(), 3);
    }

    #[test]
    fn uniform_ties_break_lexicographically() {
        let dist = CharacterSource::Iid(IidSource::uniform(2).unwrap())
            .enumerate_distribution(1)
            .unwrap();
        let strat = optimal_single_strategy(&dist);
        assert_eq!(strat.rank_of(&[0]).unwrap(), 1);
        assert_eq!(strat.rank_of(&[1]).unwrap(), 2);
    }

    #[test]
    fn bernoulli_quarter_k2_ranks() {
        let s = CharacterSource::Iid(IidSource::bernoulli(0.75).unwrap());
        let strat = optimal_single_strategy(&s.enumerate_distribution(2).unwrap());
        assert_eq!(strat.rank_of(&[1, 1]).unwrap(), 1);
        assert_eq!(strat.rank_of(&[0, 1]).unwrap(), 2);
        assert_eq!(strat.rank_of(&[1, 0]).unwrap(), 3);
        assert_eq!(strat.rank_of(&[0, 0]).unwrap(), 4);
    }

    #[test]
    fn rank_of_user2_string1() {
        let strat = optimal_single_strategy(&lemma3_user2());
        assert_eq!(strat.rank_of(&[1]).unwrap(), 2);
    }

    #[test]
    fn rank_is_a_bijection() {
        let s = CharacterSource::Iid(IidSource::bernoulli(0.3).unwrap());
        let strat = optimal_single_strategy(&s.enumerate_distribution(3).unwrap());
        let mut seen = vec![false; 8];
        for idx in 0..8 {
            let rank = strat.rank_of_index(idx);
            assert!(!std::mem::replace(&mut seen[(rank - 1) as usize], true));
            assert_eq!(strat.index_of_rank(rank).unwrap(), idx);
        }
    }

    #[test]
    fn rebuilt_strategy_is_identical() {
        let s = CharacterSource::Iid(IidSource::bernoulli(0.75).unwrap());
        let dist = s.enumerate_distribution(3).unwrap();
        assert_eq!(optimal_single_strategy(&dist), optimal_single_strategy(&dist));
    }

    #[test]
    fn unknown_string_is_rejected() {
        let strat = optimal_single_strategy(&lemma3_user1());
        assert!(strat.rank_of(&[3]).is_err());
        assert!(strat.rank_of(&[0, 0]).is_err());
    }

    #[test]
    fn round_robin_interleaving() {
        let singles = vec![
            optimal_single_strategy(&lemma3_user1()),
            optimal_single_strategy(&lemma3_user2()),
        ];
        let rr = MultiUserStrategy::round_robin(singles).unwrap();
        // (user, char) -> expected position
        let expected = [((0, 0), 1), ((1, 0), 2), ((0, 1), 3), ((1, 1), 4), ((0, 2), 5), ((1, 2), 6)];
        for ((user, c), pos) in expected {
            assert_eq!(rr.query_index(user, c), pos);
        }
    }

    #[test]
    fn round_robin_single_user_is_identity() {
        let strat = optimal_single_strategy(&lemma3_user1());
        let rr = MultiUserStrategy::round_robin(vec![strat.clone()]).unwrap();
        for idx in 0..3 {
            assert_eq!(rr.query_index(0, idx), strat.rank_of_index(idx));
        }
    }

    #[test]
    fn round_robin_three_uniform_users() {
        let dist = CharacterSource::Iid(IidSource::uniform(2).unwrap())
            .enumerate_distribution(1)
            .unwrap();
        let singles = vec![optimal_single_strategy(&dist); 3];
        let rr = MultiUserStrategy::round_robin(singles).unwrap();
        // User index 1 (second user) is queried at positions 2 and 5.
        assert_eq!(rr.query_index(1, 0), 2);
        assert_eq!(rr.query_index(1, 1), 5);
    }

    #[test]
    fn u_min_examples() {
        assert_eq!(u_min(&[3, 1, 2], 2).unwrap(), 2);
        assert_eq!(u_min(&[3, 1, 2], 1).unwrap(), 1);
        assert_eq!(u_min(&[3, 1, 2], 3).unwrap(), 3);
        assert_eq!(u_min(&[5, 5, 2], 2).unwrap(), 5);
        assert!(u_min(&[1, 2], 0).is_err());
        assert!(u_min(&[1, 2], 3).is_err());
    }

    #[test]
    fn g_opt_examples() {
        assert_eq!(g_opt(&[2, 2], 2).unwrap(), 2);
        assert_eq!(g_opt(&[3, 1], 1).unwrap(), 1);
        assert_eq!(g_opt(&[4, 1, 2], 2).unwrap(), 2);
    }

    #[test]
    fn lemma3_round_robin_trace() {
        let singles = vec![
            optimal_single_strategy(&lemma3_user1()),
            optimal_single_strategy(&lemma3_user2()),
        ];
        let rr = MultiUserStrategy::round_robin(singles).unwrap();
        let trace = total_guesswork(&rr, 1, &[vec![1], vec![0]]).unwrap();
        assert_eq!(trace.query_indices, vec![3, 2]);
        assert_eq!(trace.stopping_index, 2);
        assert_eq!(trace.total, 2);
    }

    #[test]
    fn u_equals_v_total_is_sum_of_ranks() {
        let dist = CharacterSource::Iid(IidSource::uniform(2).unwrap())
            .enumerate_distribution(1)
            .unwrap();
        let singles = vec![optimal_single_strategy(&dist); 2];
        let rr = MultiUserStrategy::round_robin(singles).unwrap();
        let trace = total_guesswork(&rr, 2, &[vec![1], vec![1]]).unwrap();
        assert_eq!(trace.total, 4);
    }

    #[test]
    fn first_query_hit_counts_one() {
        let singles = vec![
            optimal_single_strategy(&lemma3_user1()),
            optimal_single_strategy(&lemma3_user2()),
        ];
        let rr = MultiUserStrategy::round_robin(singles).unwrap();
        let trace = total_guesswork(&rr, 1, &[vec![0], vec![2]]).unwrap();
        assert_eq!(trace.total, 1);
    }

    #[test]
    fn explicit_table_round_trips_round_robin() {
        let singles = vec![
            optimal_single_strategy(&lemma3_user1()),
            optimal_single_strategy(&lemma3_user2()),
        ];
        let rr = MultiUserStrategy::round_robin(singles).unwrap();
        let seq: Vec<(usize, u32)> = (1..=rr.num_queries())
            .map(|pos| {
                (0..2)
                    .flat_map(|user| (0..3u32).map(move |idx| (user, idx)))
                    .find(|&(user, idx)| rr.query_index(user, idx as usize) == pos)
                    .unwrap()
            })
            .collect();
        let explicit = MultiUserStrategy::from_query_sequence(2, 3, 1, seq).unwrap();
        for user in 0..2 {
            for idx in 0..3 {
                assert_eq!(
                    explicit.query_index(user, idx),
                    rr.query_index(user, idx)
                );
                for n in 0..=6 {
                    assert_eq!(
                        explicit.queries_to_user(user, n),
                        rr.queries_to_user(user, n)
                    );
                }
            }
        }
    }

    #[test]
    fn random_strategy_is_injective_and_seeded() {
        let a = MultiUserStrategy::random(2, 2, 2, 9).unwrap();
        let b = MultiUserStrategy::random(2, 2, 2, 9).unwrap();
        let mut seen = vec![false; 8];
        for user in 0..2 {
            for idx in 0..4 {
                let pos = a.query_index(user, idx);
                assert_eq!(pos, b.query_index(user, idx));
                assert!(!std::mem::replace(&mut seen[(pos - 1) as usize], true));
            }
        }
    }

    #[test]
    fn prefix_completion_preserves_prefix() {
        let s = MultiUserStrategy::from_prefix(2, 3, 1, &[(0, 0), (0, 1)]).unwrap();
        assert_eq!(s.query_index(0, 0), 1);
        assert_eq!(s.query_index(0, 1), 2);
        assert_eq!(s.num_queries(), 6);
    }

    #[test]
    fn trace_serializes_to_json() {
        let singles = vec![
            optimal_single_strategy(&lemma3_user1()),
            optimal_single_strategy(&lemma3_user2()),
        ];
        let rr = MultiUserStrategy::round_robin(singles).unwrap();
        let trace = total_guesswork(&rr, 1, &[vec![1], vec![0]]).unwrap();
        let json = trace.to_json();
        let back: GuessTrace = serde_json::from_str(&json).unwrap();
        assert_eq!(trace, back);
    }
}
