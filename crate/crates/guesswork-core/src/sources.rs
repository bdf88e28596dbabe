//! Character sources and the string distributions they induce.
//!
//! A source emits one character of `{0, .., m-1}` per position, either
//! i.i.d. or as a first-order Markov chain. For a length `k` it induces a
//! distribution over the m^k strings of `A^k`, which the exact machinery
//! enumerates in full (zero-probability strings included, so guesswork
//! ranks always span `1..=m^k`).
//!
//! I.i.d. string probabilities are evaluated canonically: the character
//! probabilities are grouped into classes of exactly equal value and the
//! product is taken as `prod_c class_prob^count` in ascending class order.
//! Every path that touches an i.i.d. probability (point evaluation, full
//! enumeration, combinatorial ranking) goes through the same computation,
//! so strings of equal type get bit-identical values and tie-breaking is
//! consistent across the exact and combinatorial engines.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Entries a full string enumeration may hold before it is refused.
pub const DEFAULT_ENUMERATION_CAP: u64 = 1 << 24;

/// Tolerance for "sums to one" checks on input probability vectors.
const INPUT_SUM_TOL: f64 = 1e-12;

/// A finite character alphabet `{0, .., m-1}` with `2 <= m <= 256`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Alphabet {
    size: usize,
}

impl Alphabet {
    pub fn new(size: usize) -> Result<Self> {
        if !(2..=256).contains(&size) {
            return Err(Error::BadAlphabetSize(size));
        }
        Ok(Alphabet { size })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// ln m, the per-character scale of every log-guesswork axis.
    pub fn log_size(&self) -> f64 {
        (self.size as f64).ln()
    }

    pub fn contains(&self, c: u8) -> bool {
        (c as usize) < self.size
    }

    fn check_string(&self, w: &[u8]) -> Result<()> {
        for &c in w {
            if !self.contains(c) {
                return Err(Error::CharacterOutOfAlphabet {
                    character: c,
                    m: self.size,
                });
            }
        }
        Ok(())
    }

    /// m^k as u128 (for cap checks before anything is allocated).
    pub fn num_strings(&self, k: usize) -> u128 {
        let mut acc: u128 = 1;
        for _ in 0..k {
            acc = acc.saturating_mul(self.size as u128);
        }
        acc
    }
}

fn validate_probs(probs: &[f64], what: &str) -> Result<()> {
    if probs.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
        return Err(Error::InvalidProbabilities(format!(
            "{what} must be finite and nonnegative"
        )));
    }
    let sum: f64 = probs.iter().sum();
    if (sum - 1.0).abs() > INPUT_SUM_TOL {
        return Err(Error::InvalidProbabilities(format!(
            "{what} sums to {sum}, expected 1 within {INPUT_SUM_TOL:e}"
        )));
    }
    Ok(())
}

/// An i.i.d. character source.
#[derive(Debug, Clone, PartialEq)]
pub struct IidSource {
    alphabet: Alphabet,
    char_probs: Vec<f64>,
    /// Distinct probability values, ascending.
    class_probs: Vec<f64>,
    /// Character -> index into `class_probs`.
    class_of: Vec<usize>,
}

impl IidSource {
    pub fn new(alphabet: Alphabet, char_probs: Vec<f64>) -> Result<Self> {
        if char_probs.len() != alphabet.size() {
            return Err(Error::InvalidProbabilities(format!(
                "expected {} character probabilities, got {}",
                alphabet.size(),
                char_probs.len()
            )));
        }
        validate_probs(&char_probs, "character probabilities")?;
        let mut class_probs: Vec<f64> = char_probs.clone();
        class_probs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        class_probs.dedup();
        let class_of = char_probs
            .iter()
            .map(|p| class_probs.iter().position(|q| q == p).unwrap())
            .collect();
        Ok(IidSource {
            alphabet,
            char_probs,
            class_probs,
            class_of,
        })
    }

    /// Bernoulli(p) over bits, with p the probability of character 1.
    pub fn bernoulli(p: f64) -> Result<Self> {
        IidSource::new(Alphabet::new(2)?, vec![1.0 - p, p])
    }

    pub fn uniform(m: usize) -> Result<Self> {
        let alphabet = Alphabet::new(m)?;
        Ok(IidSource::new(alphabet, vec![1.0 / m as f64; m])?)
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn char_probs(&self) -> &[f64] {
        &self.char_probs
    }

    pub fn char_prob(&self, c: u8) -> f64 {
        self.char_probs[c as usize]
    }

    /// All characters carry the same probability.
    pub fn is_uniform(&self) -> bool {
        self.class_probs.len() == 1
    }

    pub(crate) fn class_probs(&self) -> &[f64] {
        &self.class_probs
    }

    pub(crate) fn class_counts(&self, w: &[u8]) -> Vec<u32> {
        let mut counts = vec![0u32; self.class_probs.len()];
        for &c in w {
            counts[self.class_of[c as usize]] += 1;
        }
        counts
    }

    pub(crate) fn class_counts_of_char_counts(&self, char_counts: &[u32]) -> Vec<u32> {
        let mut counts = vec![0u32; self.class_probs.len()];
        for (c, &n) in char_counts.iter().enumerate() {
            counts[self.class_of[c]] += n;
        }
        counts
    }

    /// Canonical probability of any string with the given per-class counts.
    pub(crate) fn prob_of_class_counts(&self, counts: &[u32]) -> f64 {
        let mut acc = 1.0;
        for (p, &n) in self.class_probs.iter().zip(counts) {
            if n > 0 {
                acc *= p.powi(n as i32);
            }
        }
        acc
    }

    /// Canonical log-probability of the same (for lengths where the direct
    /// product underflows).
    pub(crate) fn log_prob_of_class_counts(&self, counts: &[u32]) -> f64 {
        let mut acc = 0.0;
        for (p, &n) in self.class_probs.iter().zip(counts) {
            if n > 0 {
                acc += n as f64 * p.ln();
            }
        }
        acc
    }

    pub fn string_probability(&self, w: &[u8]) -> Result<f64> {
        self.alphabet.check_string(w)?;
        Ok(self.prob_of_class_counts(&self.class_counts(w)))
    }

    pub fn log_string_probability(&self, w: &[u8]) -> Result<f64> {
        self.alphabet.check_string(w)?;
        Ok(self.log_prob_of_class_counts(&self.class_counts(w)))
    }
}

/// A first-order Markov character source.
#[derive(Debug, Clone, PartialEq)]
pub struct MarkovSource {
    alphabet: Alphabet,
    initial: Vec<f64>,
    /// Row-major m x m, row = current character.
    transition: Vec<f64>,
}

impl MarkovSource {
    /// Build with an explicit starting distribution.
    pub fn new(alphabet: Alphabet, initial: Vec<f64>, transition: Vec<Vec<f64>>) -> Result<Self> {
        let m = alphabet.size();
        if initial.len() != m {
            return Err(Error::InvalidProbabilities(format!(
                "initial distribution has {} entries, expected {m}",
                initial.len()
            )));
        }
        validate_probs(&initial, "initial distribution")?;
        let flat = Self::validate_transition(m, transition)?;
        Ok(MarkovSource {
            alphabet,
            initial,
            transition: flat,
        })
    }

    /// Build with the stationary distribution as the starting distribution.
    pub fn with_stationary_initial(alphabet: Alphabet, transition: Vec<Vec<f64>>) -> Result<Self> {
        let m = alphabet.size();
        let flat = Self::validate_transition(m, transition)?;
        let initial = crate::numeric::stationary_distribution(&flat, m)?;
        Ok(MarkovSource {
            alphabet,
            initial,
            transition: flat,
        })
    }

    /// The paper's 2-state chain: a = P(1 after 0), b = P(0 after 1),
    /// started from its stationary distribution.
    pub fn two_state(a: f64, b: f64) -> Result<Self> {
        if !(a > 0.0 && a < 1.0 && b > 0.0 && b < 1.0) {
            return Err(Error::InvalidProbabilities(
                "two-state parameters must lie in (0,1)".into(),
            ));
        }
        MarkovSource::with_stationary_initial(
            Alphabet::new(2)?,
            vec![vec![1.0 - a, a], vec![b, 1.0 - b]],
        )
    }

    fn validate_transition(m: usize, rows: Vec<Vec<f64>>) -> Result<Vec<f64>> {
        if rows.len() != m {
            return Err(Error::InvalidProbabilities(format!(
                "transition matrix has {} rows, expected {m}",
                rows.len()
            )));
        }
        let mut flat = Vec::with_capacity(m * m);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != m {
                return Err(Error::InvalidProbabilities(format!(
                    "transition row {i} has {} entries, expected {m}",
                    row.len()
                )));
            }
            validate_probs(row, &format!("transition row {i}"))?;
            flat.extend_from_slice(row);
        }
        Ok(flat)
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn initial(&self) -> &[f64] {
        &self.initial
    }

    pub fn transition(&self, from: u8, to: u8) -> f64 {
        self.transition[from as usize * self.alphabet.size() + to as usize]
    }

    pub(crate) fn transition_flat(&self) -> &[f64] {
        &self.transition
    }

    pub fn is_irreducible(&self) -> bool {
        let m = self.alphabet.size();
        let adj: Vec<bool> = self.transition.iter().map(|p| *p > 0.0).collect();
        crate::numeric::strongly_connected(&adj, m)
    }

    pub fn string_probability(&self, w: &[u8]) -> Result<f64> {
        self.alphabet.check_string(w)?;
        let mut iter = w.iter();
        let Some(&first) = iter.next() else {
            return Ok(1.0);
        };
        let mut acc = self.initial[first as usize];
        let mut prev = first;
        for &c in iter {
            acc *= self.transition(prev, c);
            prev = c;
        }
        Ok(acc)
    }

    pub fn log_string_probability(&self, w: &[u8]) -> Result<f64> {
        self.alphabet.check_string(w)?;
        let mut iter = w.iter();
        let Some(&first) = iter.next() else {
            return Ok(0.0);
        };
        let mut acc = self.initial[first as usize].ln();
        let mut prev = first;
        for &c in iter {
            acc += self.transition(prev, c).ln();
            prev = c;
        }
        Ok(acc)
    }
}

/// JSON description of a character source.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum SourceSpec {
    Iid {
        m: usize,
        probs: Vec<f64>,
    },
    Markov {
        m: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        initial: Option<Vec<f64>>,
        transition: Vec<Vec<f64>>,
    },
}

/// Either kind of per-character model.
#[derive(Debug, Clone, PartialEq)]
pub enum CharacterSource {
    Iid(IidSource),
    Markov(MarkovSource),
}

impl CharacterSource {
    pub fn alphabet(&self) -> &Alphabet {
        match self {
            CharacterSource::Iid(s) => s.alphabet(),
            CharacterSource::Markov(s) => s.alphabet(),
        }
    }

    pub fn from_spec(spec: &SourceSpec) -> Result<Self> {
        match spec {
            SourceSpec::Iid { m, probs } => Ok(CharacterSource::Iid(IidSource::new(
                Alphabet::new(*m)?,
                probs.clone(),
            )?)),
            SourceSpec::Markov {
                m,
                initial,
                transition,
            } => {
                let alphabet = Alphabet::new(*m)?;
                let source = match initial {
                    Some(init) => MarkovSource::new(alphabet, init.clone(), transition.clone())?,
                    None => MarkovSource::with_stationary_initial(alphabet, transition.clone())?,
                };
                Ok(CharacterSource::Markov(source))
            }
        }
    }

    pub fn to_spec(&self) -> SourceSpec {
        match self {
            CharacterSource::Iid(s) => SourceSpec::Iid {
                m: s.alphabet().size(),
                probs: s.char_probs().to_vec(),
            },
            CharacterSource::Markov(s) => {
                let m = s.alphabet().size();
                SourceSpec::Markov {
                    m,
                    initial: Some(s.initial().to_vec()),
                    transition: (0..m)
                        .map(|i| s.transition_flat()[i * m..(i + 1) * m].to_vec())
                        .collect(),
                }
            }
        }
    }

    pub fn from_json(json: &str) -> Result<Self> {
        let spec: SourceSpec =
            serde_json::from_str(json).map_err(|e| Error::Config(format!("source JSON: {e}")))?;
        CharacterSource::from_spec(&spec)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_spec()).expect("source spec serializes")
    }

    pub fn string_probability(&self, w: &[u8]) -> Result<f64> {
        match self {
            CharacterSource::Iid(s) => s.string_probability(w),
            CharacterSource::Markov(s) => s.string_probability(w),
        }
    }

    pub fn log_string_probability(&self, w: &[u8]) -> Result<f64> {
        match self {
            CharacterSource::Iid(s) => s.log_string_probability(w),
            CharacterSource::Markov(s) => s.log_string_probability(w),
        }
    }

    /// Draw one length-`k` string. The same rng state always yields the
    /// same string.
    pub fn sample_string<R: Rng + ?Sized>(&self, k: usize, rng: &mut R) -> Vec<u8> {
        let mut out = Vec::with_capacity(k);
        match self {
            CharacterSource::Iid(s) => {
                for _ in 0..k {
                    out.push(sample_char(s.char_probs(), rng));
                }
            }
            CharacterSource::Markov(s) => {
                if k == 0 {
                    return out;
                }
                let mut prev = sample_char(s.initial(), rng);
                out.push(prev);
                let m = s.alphabet().size();
                for _ in 1..k {
                    let row = &s.transition_flat()[prev as usize * m..(prev as usize + 1) * m];
                    prev = sample_char(row, rng);
                    out.push(prev);
                }
            }
        }
        out
    }

    /// Full distribution over `A^k` under the default enumeration cap.
    pub fn enumerate_distribution(&self, k: usize) -> Result<StringDistribution> {
        self.enumerate_distribution_with_cap(k, DEFAULT_ENUMERATION_CAP)
    }

    pub fn enumerate_distribution_with_cap(&self, k: usize, cap: u64) -> Result<StringDistribution> {
        let needed = self.alphabet().num_strings(k);
        if needed > cap as u128 {
            return Err(Error::EnumerationCapExceeded { needed, cap });
        }
        let m = self.alphabet().size();
        let total = needed as usize;
        let probs = match self {
            CharacterSource::Iid(s) => {
                let mut probs = vec![0.0f64; total];
                let mut counts = vec![0u32; s.class_probs().len()];
                fill_iid(s, &mut counts, k, 0, &mut probs);
                probs
            }
            CharacterSource::Markov(s) => {
                if k == 0 {
                    vec![1.0]
                } else {
                    let mut probs = s.initial().to_vec();
                    for _ in 1..k {
                        let mut next = vec![0.0f64; probs.len() * m];
                        for (prefix, &p) in probs.iter().enumerate() {
                            let last = prefix % m;
                            for c in 0..m {
                                next[prefix * m + c] = p * s.transition_flat()[last * m + c];
                            }
                        }
                        probs = next;
                    }
                    probs
                }
            }
        };
        Ok(StringDistribution { m, k, probs })
    }
}

fn sample_char<R: Rng + ?Sized>(probs: &[f64], rng: &mut R) -> u8 {
    let x: f64 = rng.random();
    let mut acc = 0.0;
    for (c, &p) in probs.iter().enumerate() {
        acc += p;
        if x < acc {
            return c as u8;
        }
    }
    // Round-off tail: fall back to the last character with positive mass.
    probs
        .iter()
        .rposition(|&p| p > 0.0)
        .expect("a probability vector has positive mass") as u8
}

fn fill_iid(s: &IidSource, counts: &mut Vec<u32>, remaining: usize, base: usize, out: &mut [f64]) {
    if remaining == 0 {
        out[base] = s.prob_of_class_counts(counts);
        return;
    }
    let m = s.alphabet().size();
    for c in 0..m {
        counts[s.class_of[c]] += 1;
        fill_iid(s, counts, remaining - 1, base * m + c, out);
        counts[s.class_of[c]] -= 1;
    }
}

/// The probability of every string in `A^k`, indexed lexicographically.
///
/// Zero-probability strings are kept so ranks span all of `1..=m^k`.
#[derive(Debug, Clone, PartialEq)]
pub struct StringDistribution {
    m: usize,
    k: usize,
    probs: Vec<f64>,
}

impl StringDistribution {
    pub fn from_probs(m: usize, k: usize, probs: Vec<f64>) -> Result<Self> {
        let expected = Alphabet::new(m)?.num_strings(k);
        if probs.len() as u128 != expected {
            return Err(Error::InvalidProbabilities(format!(
                "expected {expected} string probabilities, got {}",
                probs.len()
            )));
        }
        let dist = StringDistribution { m, k, probs };
        dist.validate()?;
        Ok(dist)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob_at(&self, index: usize) -> f64 {
        self.probs[index]
    }

    /// Lexicographic index of `w` (most significant character first).
    pub fn index_of(&self, w: &[u8]) -> Result<usize> {
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

    pub fn string_at(&self, mut index: usize) -> Vec<u8> {
        let mut w = vec![0u8; self.k];
        for pos in (0..self.k).rev() {
            w[pos] = (index % self.m) as u8;
            index /= self.m;
        }
        w
    }

    pub fn probability_of(&self, w: &[u8]) -> Result<f64> {
        Ok(self.probs[self.index_of(w)?])
    }

    pub fn entries(&self) -> impl Iterator<Item = (Vec<u8>, f64)> + '_ {
        (0..self.len()).map(|i| (self.string_at(i), self.probs[i]))
    }

    /// Total mass must be 1 within 1e-9.
    pub fn validate(&self) -> Result<()> {
        if self.probs.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
            return Err(Error::InvalidProbabilities(
                "string probabilities must be finite and nonnegative".into(),
            ));
        }
        let sum: f64 = self.probs.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidProbabilities(format!(
                "string distribution sums to {sum}, expected 1 within 1e-9"
            )));
        }
        Ok(())
    }
}

/// V independent users, a target count U and a common string length k.
#[derive(Debug, Clone)]
pub struct MultiUserProblem {
    sources: Vec<CharacterSource>,
    u: usize,
    k: usize,
}

impl MultiUserProblem {
    pub fn new(sources: Vec<CharacterSource>, u: usize, k: usize) -> Result<Self> {
        if sources.is_empty() {
            return Err(Error::Config("a problem needs at least one user".into()));
        }
        if u < 1 || u > sources.len() {
            return Err(Error::OrderStatOutOfRange {
                u,
                v: sources.len(),
            });
        }
        let m = sources[0].alphabet().size();
        if sources.iter().any(|s| s.alphabet().size() != m) {
            return Err(Error::Config(
                "all users must draw from the same alphabet".into(),
            ));
        }
        Ok(MultiUserProblem { sources, u, k })
    }

    pub fn sources(&self) -> &[CharacterSource] {
        &self.sources
    }

    pub fn v(&self) -> usize {
        self.sources.len()
    }

    pub fn u(&self) -> usize {
        self.u
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn alphabet(&self) -> &Alphabet {
        self.sources[0].alphabet()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn uniform_bits() -> CharacterSource {
        CharacterSource::Iid(IidSource::uniform(2).unwrap())
    }

    #[test]
    fn uniform_bit_string_probability() {
        let s = uniform_bits();
        assert_eq!(s.string_probability(&[0, 1, 0]).unwrap(), 1.0 / 8.0);
    }

    #[test]
    fn symmetric_markov_is_memoryless() {
        let s = CharacterSource::Markov(MarkovSource::two_state(0.5, 0.5).unwrap());
        for w in [[0, 0, 0, 0], [0, 1, 0, 1], [1, 1, 1, 0]] {
            assert_eq!(s.string_probability(&w).unwrap(), 1.0 / 16.0);
        }
    }

    #[test]
    fn byte_source_double_zero() {
        let probs = vec![0.55, 0.1, 0.1, 0.05, 0.05, 0.05, 0.05, 0.05];
        let s = IidSource::new(Alphabet::new(8).unwrap(), probs).unwrap();
        assert!((s.string_probability(&[0, 0]).unwrap() - 0.3025).abs() < 1e-15);
    }

    #[test]
    fn character_out_of_alphabet_is_rejected() {
        let s = uniform_bits();
        assert!(matches!(
            s.string_probability(&[0, 2]),
            Err(Error::CharacterOutOfAlphabet { character: 2, m: 2 })
        ));
    }

    #[test]
    fn enumerate_uniform_bits_k2() {
        let dist = uniform_bits().enumerate_distribution(2).unwrap();
        assert_eq!(dist.len(), 4);
        for i in 0..4 {
            assert_eq!(dist.prob_at(i), 0.25);
        }
    }

    #[test]
    fn enumerate_bernoulli_quarter() {
        let s = CharacterSource::Iid(IidSource::bernoulli(0.75).unwrap());
        let dist = s.enumerate_distribution(2).unwrap();
        assert_eq!(dist.probability_of(&[1, 1]).unwrap(), 0.5625);
        assert_eq!(dist.probability_of(&[0, 1]).unwrap(), 0.1875);
        assert_eq!(dist.probability_of(&[1, 0]).unwrap(), 0.1875);
        assert_eq!(dist.probability_of(&[0, 0]).unwrap(), 0.0625);
    }

    #[test]
    fn markov_stationary_initial_k1() {
        let s = CharacterSource::Markov(MarkovSource::two_state(0.1, 0.3).unwrap());
        let dist = s.enumerate_distribution(1).unwrap();
        assert!((dist.prob_at(0) - 0.75).abs() < 1e-12);
        assert!((dist.prob_at(1) - 0.25).abs() < 1e-12);
    }

    #[test]
    fn enumeration_matches_point_probability_exactly() {
        let s = CharacterSource::Iid(
            IidSource::new(Alphabet::new(3).unwrap(), vec![0.5, 0.2, 0.3]).unwrap(),
        );
        let dist = s.enumerate_distribution(4).unwrap();
        for (w, p) in dist.entries() {
            assert_eq!(p, s.string_probability(&w).unwrap());
        }
        let markov = CharacterSource::Markov(MarkovSource::two_state(0.2, 0.45).unwrap());
        let dist = markov.enumerate_distribution(5).unwrap();
        for (w, p) in dist.entries() {
            assert_eq!(p, markov.string_probability(&w).unwrap());
        }
    }

    #[test]
    fn enumeration_cap_is_reported() {
        let err = uniform_bits().enumerate_distribution_with_cap(10, 512).unwrap_err();
        match err {
            Error::EnumerationCapExceeded { needed, cap } => {
                assert_eq!(needed, 1024);
                assert_eq!(cap, 512);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn sampling_is_reproducible() {
        let s = uniform_bits();
        let mut rng1 = ChaCha8Rng::seed_from_u64(7);
        let mut rng2 = ChaCha8Rng::seed_from_u64(7);
        assert_eq!(s.sample_string(32, &mut rng1), s.sample_string(32, &mut rng2));
    }

    #[test]
    fn degenerate_source_samples_zeros() {
        let s = CharacterSource::Iid(
            IidSource::new(Alphabet::new(2).unwrap(), vec![1.0, 0.0]).unwrap(),
        );
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert_eq!(s.sample_string(6, &mut rng), vec![0; 6]);
    }

    #[test]
    fn bernoulli_sampling_frequency() {
        let s = CharacterSource::Iid(IidSource::bernoulli(0.75).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let trials = 100_000usize;
        let ones = (0..trials)
            .filter(|_| s.sample_string(1, &mut rng)[0] == 1)
            .count();
        let phat = ones as f64 / trials as f64;
        let sigma = (0.75f64 * 0.25 / trials as f64).sqrt();
        assert!(
            (phat - 0.75).abs() < 3.0 * sigma,
            "phat {phat} outside 3 sigma band"
        );
    }

    #[test]
    fn source_json_round_trip() {
        let json = r#"{"type":"iid","m":2,"probs":[0.25,0.75]}"#;
        let s = CharacterSource::from_json(json).unwrap();
        assert_eq!(s.string_probability(&[1]).unwrap(), 0.75);
        let back = CharacterSource::from_json(&s.to_json()).unwrap();
        assert_eq!(s, back);

        let mjson = r#"{"type":"markov","m":2,"transition":[[0.9,0.1],[0.3,0.7]]}"#;
        let m = CharacterSource::from_json(mjson).unwrap();
        // Stationary initial is the default.
        assert!((m.string_probability(&[0]).unwrap() - 0.75).abs() < 1e-12);
    }

    #[test]
    fn problem_validates_target_count() {
        let sources = vec![uniform_bits(), uniform_bits()];
        assert!(MultiUserProblem::new(sources.clone(), 3, 1).is_err());
        assert!(MultiUserProblem::new(sources, 2, 1).is_ok());
    }

    #[test]
    fn permuted_strings_share_one_probability() {
        // 0.1*0.2*0.7 associates differently depending on evaluation order;
        // the canonical class product makes all six permutations identical.
        let s = IidSource::new(Alphabet::new(3).unwrap(), vec![0.1, 0.2, 0.7]).unwrap();
        let reference = s.string_probability(&[0, 1, 2]).unwrap();
        for w in [[0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]] {
            assert_eq!(s.string_probability(&w).unwrap(), reference);
        }
    }
}
