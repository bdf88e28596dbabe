//! Sampling-based guesswork estimation for string lengths beyond
//! enumeration.
//!
//! Realized strings are sampled per user and their optimal-strategy ranks
//! are computed combinatorially: every character-count type with a
//! strictly larger canonical probability contributes its multinomial
//! count, and within the equal-probability class the strings are counted
//! in plain lexicographic order, matching the explicit sort's tie-break
//! exactly. Ranks are exact big integers, so k in the hundreds works with
//! binary alphabets without ever materializing the m^k string space.
//!
//! Trials draw from per-trial ChaCha substreams derived from (seed, trial
//! index): identical configurations produce identical summaries, and the
//! result does not depend on evaluation order.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::GuessworkPmf;
use crate::numeric::{ln_biguint, logsumexp};
use crate::sources::{CharacterSource, IidSource, MultiUserProblem, DEFAULT_ENUMERATION_CAP};
use crate::strategy::{u_min, SingleUserStrategy};

/// Character-count types a combinatorial rank table may hold.
pub const TYPE_TABLE_CAP: u64 = 250_000;

/// Largest alphabet the combinatorial path supports.
pub const TYPE_TABLE_MAX_ALPHABET: usize = 16;

/// Exact tallies are kept when the statistic's support has at most this
/// many values.
const COUNTS_CAP: u128 = 1 << 20;

/// Which statistic a simulation tracks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StrategySelector {
    /// Total queries of the round-robin strategy in user index order.
    RoundRobin,
    /// The U-th order statistic of per-user optimal ranks (the lock-step
    /// lower bound).
    GOptBound,
}

#[derive(Debug, Clone)]
pub struct SimulationConfig {
    pub problem: MultiUserProblem,
    pub selector: StrategySelector,
    pub trials: u64,
    pub seed: u64,
    /// Moment orders to estimate.
    pub alphas: Vec<f64>,
    /// Bins for the per-character log-guesswork histogram over [0, ln m].
    pub bins: usize,
    /// Cap for the explicit-strategy fallback (Markov sources, or alphabets
    /// too rich for the type table).
    pub enumeration_cap: u64,
}

impl SimulationConfig {
    pub fn new(problem: MultiUserProblem, selector: StrategySelector, trials: u64, seed: u64) -> Self {
        SimulationConfig {
            problem,
            selector,
            trials,
            seed,
            alphas: vec![1.0],
            bins: 256,
            enumeration_cap: DEFAULT_ENUMERATION_CAP,
        }
    }
}

/// An estimated guesswork moment with its sampling error.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlphaMoment {
    pub alpha: f64,
    /// Sample mean of G^alpha (+inf when it overflows f64).
    pub mean: f64,
    pub std_error: f64,
    /// (1/k) ln( mean of G^alpha ), computed in log space; finite even when
    /// the moment itself overflows.
    pub log_growth_rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalSummary {
    pub selector: StrategySelector,
    pub trials: u64,
    pub seed: u64,
    pub k: usize,
    pub u: usize,
    pub v: usize,
    pub m: usize,
    /// Histogram of (1/k) ln G over uniform bins spanning [0, ln m].
    pub bin_mass: Vec<f64>,
    /// Sample mean of G and its standard error (sigma / sqrt(trials)).
    pub mean: f64,
    pub mean_std_error: f64,
    /// Sample mean of (1/k) ln G, nats.
    pub mean_log_per_char: f64,
    pub moments: Vec<AlphaMoment>,
    /// Exact tallies over guess counts, kept when the support is small.
    pub counts: Option<Vec<u64>>,
}

impl EmpiricalSummary {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("summary serializes")
    }

    /// CSV of the log-guesswork histogram: bin center in nats, mass.
    pub fn bins_to_csv(&self) -> String {
        let mut out = String::from("x,mass\n");
        let log_m = (self.m as f64).ln();
        let n = self.bin_mass.len();
        for (i, &mass) in self.bin_mass.iter().enumerate() {
            let center = (i as f64 + 0.5) * log_m / n as f64;
            out.push_str(&format!("{center},{mass}\n"));
        }
        out
    }

    /// The empirical PMF over guess counts, when exact tallies were kept.
    pub fn empirical_pmf(&self) -> Option<GuessworkPmf> {
        let counts = self.counts.as_ref()?;
        let mass: Vec<f64> = counts
            .iter()
            .map(|&c| c as f64 / self.trials as f64)
            .collect();
        Some(GuessworkPmf::from_mass(mass).expect("tallies normalize"))
    }
}

/// Ranks and derived statistics of one sampled string vector.
#[derive(Debug, Clone)]
pub struct TrialOutcome {
    /// Optimal-strategy rank of each user's realized string.
    pub ranks: Vec<BigUint>,
    /// U-th smallest rank.
    pub g_opt: BigUint,
    /// Total queries of the round-robin strategy.
    pub round_robin_total: BigUint,
}

enum RankEvaluator {
    /// All characters equally likely: rank is the lexicographic index + 1.
    Uniform,
    Types(TypeTable),
    Explicit(SingleUserStrategy),
}

impl RankEvaluator {
    fn rank(&self, w: &[u8], m: usize) -> Result<BigUint> {
        match self {
            RankEvaluator::Uniform => {
                let mut r = BigUint::zero();
                for &c in w {
                    r = r * m + c;
                }
                Ok(r + 1u32)
            }
            RankEvaluator::Types(table) => table.rank(w),
            RankEvaluator::Explicit(strategy) => Ok(BigUint::from(strategy.rank_of(w)?)),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum KeyMode {
    /// Canonical probability products fit in normal f64 range.
    Direct,
    /// Long strings: canonical log-probability sums.
    Log,
}

struct TypeEntry {
    char_counts: Vec<u32>,
    key: f64,
    count: BigUint,
}

/// All character-count types of length k, sorted by descending canonical
/// probability, with prefix sums for O(log) rank lookups.
struct TypeTable {
    source: IidSource,
    k: usize,
    mode: KeyMode,
    entries: Vec<TypeEntry>,
    /// cum[i] = total string count of entries[..i].
    cum: Vec<BigUint>,
}

fn count_types(k: usize, m: usize) -> u128 {
    // C(k + m - 1, m - 1), saturating.
    let mut acc: u128 = 1;
    for i in 0..m - 1 {
        acc = acc.saturating_mul((k + m - 1 - i) as u128);
        acc /= (i + 1) as u128;
    }
    acc
}

impl TypeTable {
    fn build(source: &IidSource, k: usize) -> Result<Self> {
        let m = source.alphabet().size();
        if m > TYPE_TABLE_MAX_ALPHABET {
            return Err(Error::UnsupportedModel(format!(
                "combinatorial ranking supports alphabets up to {TYPE_TABLE_MAX_ALPHABET}, got {m}"
            )));
        }
        let types = count_types(k, m);
        if types > TYPE_TABLE_CAP as u128 {
            return Err(Error::UnsupportedModel(format!(
                "{types} character-count types exceed the table cap of {TYPE_TABLE_CAP}"
            )));
        }
        let mut factorials = Vec::with_capacity(k + 1);
        factorials.push(BigUint::one());
        for i in 1..=k {
            let prev = factorials[i - 1].clone();
            factorials.push(prev * i);
        }

        let min_positive = source
            .class_probs()
            .iter()
            .copied()
            .filter(|p| *p > 0.0)
            .fold(f64::INFINITY, f64::min);
        let mode = if k as f64 * min_positive.log2() >= -1000.0 {
            KeyMode::Direct
        } else {
            KeyMode::Log
        };

        let mut entries = Vec::with_capacity(types as usize);
        let mut counts = vec![0u32; m];
        collect_types(source, k, &mut counts, 0, mode, &factorials, &mut entries);
        // Descending key; equal keys in a fixed order (any fixed order
        // works, the rank only ever sums whole tied groups).
        entries.sort_by(|a, b| {
            b.key
                .partial_cmp(&a.key)
                .unwrap()
                .then_with(|| a.char_counts.cmp(&b.char_counts))
        });
        let mut cum = Vec::with_capacity(entries.len() + 1);
        cum.push(BigUint::zero());
        for e in &entries {
            let acc = cum.last().unwrap() + &e.count;
            cum.push(acc);
        }
        Ok(TypeTable {
            source: source.clone(),
            k,
            mode,
            entries,
            cum,
        })
    }

    fn key_of_char_counts(&self, char_counts: &[u32]) -> f64 {
        let class_counts = self.source.class_counts_of_char_counts(char_counts);
        match self.mode {
            KeyMode::Direct => self.source.prob_of_class_counts(&class_counts),
            KeyMode::Log => self.source.log_prob_of_class_counts(&class_counts),
        }
    }

    fn rank(&self, w: &[u8]) -> Result<BigUint> {
        if w.len() != self.k {
            return Err(Error::LengthMismatch {
                got: w.len(),
                expected: self.k,
            });
        }
        let m = self.source.alphabet().size();
        let mut char_counts = vec![0u32; m];
        for &c in w {
            if c as usize >= m {
                return Err(Error::CharacterOutOfAlphabet { character: c, m });
            }
            char_counts[c as usize] += 1;
        }
        let key = self.key_of_char_counts(&char_counts);
        let lo = self.entries.partition_point(|e| e.key > key);
        let hi = self.entries.partition_point(|e| e.key >= key);
        let mut rank = self.cum[lo].clone();
        for e in &self.entries[lo..hi] {
            rank += lex_count_below(&e.char_counts, &e.count, w);
        }
        Ok(rank + 1u32)
    }
}

fn collect_types(
    source: &IidSource,
    remaining: usize,
    counts: &mut Vec<u32>,
    from_char: usize,
    mode: KeyMode,
    factorials: &[BigUint],
    out: &mut Vec<TypeEntry>,
) {
    let m = counts.len();
    if from_char == m - 1 {
        counts[m - 1] = remaining as u32;
        let class_counts = source.class_counts_of_char_counts(counts);
        let key = match mode {
            KeyMode::Direct => source.prob_of_class_counts(&class_counts),
            KeyMode::Log => source.log_prob_of_class_counts(&class_counts),
        };
        let k = factorials.len() - 1;
        let mut count = factorials[k].clone();
        for &n in counts.iter() {
            count /= &factorials[n as usize];
        }
        out.push(TypeEntry {
            char_counts: counts.clone(),
            key,
            count,
        });
        counts[m - 1] = 0;
        return;
    }
    for n in 0..=remaining {
        counts[from_char] = n as u32;
        collect_types(source, remaining - n, counts, from_char + 1, mode, factorials, out);
    }
    counts[from_char] = 0;
}

/// Strings of character-count type `t` (with multinomial count `total`)
/// that are lexicographically smaller than `w`.
fn lex_count_below(t: &[u32], total: &BigUint, w: &[u8]) -> BigUint {
    let mut remaining = t.to_vec();
    let mut ways = total.clone();
    let mut positions_left = w.len() as u64;
    let mut count = BigUint::zero();
    for &c in w {
        for smaller in 0..c {
            let r = remaining[smaller as usize];
            if r > 0 {
                count += &ways * r / positions_left;
            }
        }
        let rc = remaining[c as usize];
        if rc == 0 {
            return count;
        }
        ways = ways * rc / positions_left;
        remaining[c as usize] -= 1;
        positions_left -= 1;
    }
    count
}

/// Rank (1-based) of `w` under the optimal strategy of an i.i.d. source,
/// computed without enumerating the string space. Agrees exactly with the
/// explicit strategy's rank wherever both are defined.
pub fn rank_by_type_counting(source: &IidSource, w: &[u8]) -> Result<BigUint> {
    if source.is_uniform() {
        let m = source.alphabet().size();
        let mut r = BigUint::zero();
        for &c in w {
            if c as usize >= m {
                return Err(Error::CharacterOutOfAlphabet { character: c, m });
            }
            r = r * m + c;
        }
        return Ok(r + 1u32);
    }
    TypeTable::build(source, w.len())?.rank(w)
}

/// A prepared simulation: per-user rank evaluators plus the trial driver.
pub struct Simulator {
    config: SimulationConfig,
    evaluators: Vec<RankEvaluator>,
}

impl Simulator {
    pub fn new(config: SimulationConfig) -> Result<Self> {
        if config.trials < 1 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        if config.bins < 1 {
            return Err(Error::Config("bins must be at least 1".into()));
        }
        let k = config.problem.k();
        let mut evaluators = Vec::with_capacity(config.problem.v());
        for source in config.problem.sources() {
            evaluators.push(build_evaluator(source, k, config.enumeration_cap)?);
        }
        Ok(Simulator { config, evaluators })
    }

    pub fn config(&self) -> &SimulationConfig {
        &self.config
    }

    /// Run one trial on its own deterministic substream.
    pub fn trial(&self, index: u64) -> TrialOutcome {
        let problem = &self.config.problem;
        let mut rng = ChaCha8Rng::seed_from_u64(self.config.seed);
        rng.set_stream(index);
        let m = problem.alphabet().size();
        let k = problem.k();
        let v = problem.v();
        let mut ranks = Vec::with_capacity(v);
        for (source, evaluator) in problem.sources().iter().zip(&self.evaluators) {
            let w = source.sample_string(k, &mut rng);
            let rank = evaluator
                .rank(&w, m)
                .expect("sampled strings are in the evaluator domain");
            ranks.push(rank);
        }
        let g_opt = u_min(&ranks, problem.u()).expect("u validated");

        // Round-robin in user index order: pair (v, w) sits at query
        // position (rank - 1) * V + (v + 1).
        let positions: Vec<BigUint> = ranks
            .iter()
            .enumerate()
            .map(|(user, rank)| (rank - 1u32) * v + (user + 1))
            .collect();
        let stop = u_min(&positions, problem.u()).expect("u validated");
        let mut total = BigUint::zero();
        for (user, pos) in positions.iter().enumerate() {
            let n = pos.min(&stop);
            let slot = BigUint::from(user + 1);
            if *n >= slot {
                total += (n - slot) / v + 1u32;
            }
        }
        TrialOutcome {
            ranks,
            g_opt,
            round_robin_total: total,
        }
    }

    pub fn run(&self) -> EmpiricalSummary {
        let config = &self.config;
        let problem = &config.problem;
        let (v, k, m) = (problem.v(), problem.k(), problem.alphabet().size());
        let log_m = problem.alphabet().log_size();
        let per_user = problem.alphabet().num_strings(k);
        let max_support = match config.selector {
            StrategySelector::RoundRobin => per_user.saturating_mul(v as u128),
            StrategySelector::GOptBound => per_user,
        };
        let mut counts = if max_support <= COUNTS_CAP {
            Some(vec![0u64; max_support as usize])
        } else {
            None
        };

        let trials = config.trials;
        let mut log_values = Vec::with_capacity(trials as usize);
        let mut bin_hits = vec![0u64; config.bins];
        for index in 0..trials {
            let outcome = self.trial(index);
            let g = match config.selector {
                StrategySelector::RoundRobin => outcome.round_robin_total,
                StrategySelector::GOptBound => outcome.g_opt,
            };
            if let Some(tally) = counts.as_mut() {
                tally[g.to_u64().expect("within counts cap") as usize - 1] += 1;
            }
            let ln_g = ln_biguint(&g);
            let x = ln_g / k.max(1) as f64;
            let bin = ((x / log_m) * config.bins as f64).floor();
            let bin = (bin.max(0.0) as usize).min(config.bins - 1);
            bin_hits[bin] += 1;
            log_values.push(ln_g);
        }

        let n = trials as f64;
        let bin_mass = bin_hits.iter().map(|&h| h as f64 / n).collect();
        let g_values: Vec<f64> = log_values.iter().map(|l| l.exp()).collect();
        let (mean, mean_std_error) = mean_and_std_error(&g_values);
        let mean_log_per_char = log_values.iter().sum::<f64>() / n / k.max(1) as f64;
        let moments = config
            .alphas
            .iter()
            .map(|&alpha| {
                let powered: Vec<f64> = log_values.iter().map(|l| (alpha * l).exp()).collect();
                let (m_mean, m_err) = mean_and_std_error(&powered);
                let scaled: Vec<f64> = log_values.iter().map(|l| alpha * l).collect();
                let log_growth_rate = (logsumexp(&scaled) - n.ln()) / k.max(1) as f64;
                AlphaMoment {
                    alpha,
                    mean: m_mean,
                    std_error: m_err,
                    log_growth_rate,
                }
            })
            .collect();

        EmpiricalSummary {
            selector: config.selector,
            trials,
            seed: config.seed,
            k,
            u: problem.u(),
            v,
            m,
            bin_mass,
            mean,
            mean_std_error,
            mean_log_per_char,
            moments,
            counts,
        }
    }
}

fn build_evaluator(source: &CharacterSource, k: usize, cap: u64) -> Result<RankEvaluator> {
    match source {
        CharacterSource::Iid(iid) => {
            if iid.is_uniform() {
                return Ok(RankEvaluator::Uniform);
            }
            match TypeTable::build(iid, k) {
                Ok(table) => Ok(RankEvaluator::Types(table)),
                Err(table_err) => {
                    let dist = source.enumerate_distribution_with_cap(k, cap).map_err(|_| {
                        Error::UnsupportedModel(format!(
                            "source not rankable at k={k}: {table_err}; explicit enumeration also exceeds the cap of {cap}"
                        ))
                    })?;
                    Ok(RankEvaluator::Explicit(SingleUserStrategy::optimal(&dist)))
                }
            }
        }
        CharacterSource::Markov(_) => {
            let dist = source.enumerate_distribution_with_cap(k, cap).map_err(|_| {
                Error::UnsupportedModel(format!(
                    "Markov ranking needs full enumeration; m^{k} exceeds the cap of {cap}"
                ))
            })?;
            Ok(RankEvaluator::Explicit(SingleUserStrategy::optimal(&dist)))
        }
    }
}

fn mean_and_std_error(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 || !mean.is_finite() {
        return (mean, if mean.is_finite() { 0.0 } else { f64::INFINITY });
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Estimate the guesswork distribution of a problem by seeded sampling.
pub fn estimate_distribution(config: &SimulationConfig) -> Result<EmpiricalSummary> {
    Ok(Simulator::new(config.clone())?.run())
}
