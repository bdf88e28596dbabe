//! Specific Renyi entropy of i.i.d. and Markov character sources, and the
//! scaled cumulant generating function of single-user guesswork.

use crate::error::{Error, Result};
use crate::numeric::{log_spectral_radius, max_mean_cycle, stationary_distribution};
use crate::sources::{IidSource, MarkovSource};

/// Orders within this of 1 are routed to the dedicated Shannon branch,
/// avoiding the 1/(1-beta) cancellation.
const SHANNON_GUARD: f64 = 1e-6;

/// Evaluator for the specific Renyi entropy R(beta) of a character source,
/// in nats per character. R(1) is the Shannon entropy, R(inf) the
/// min-entropy; R is nonincreasing in beta.
#[derive(Debug, Clone)]
pub struct RenyiCurve {
    kind: RenyiKind,
    shannon: f64,
    min_entropy: f64,
    alphabet_log: f64,
}

#[derive(Debug, Clone)]
enum RenyiKind {
    Iid {
        /// Strictly positive character probabilities.
        positive_probs: Vec<f64>,
        max_prob: f64,
    },
    Markov {
        m: usize,
        /// ln P_ij, NEG_INFINITY for forbidden transitions.
        log_transition: Vec<f64>,
    },
}

impl RenyiCurve {
    pub fn iid(source: &IidSource) -> Self {
        let positive_probs: Vec<f64> = source
            .char_probs()
            .iter()
            .copied()
            .filter(|p| *p > 0.0)
            .collect();
        let max_prob = positive_probs.iter().cloned().fold(0.0, f64::max);
        let shannon = -positive_probs.iter().map(|p| p * p.ln()).sum::<f64>();
        RenyiCurve {
            kind: RenyiKind::Iid {
                positive_probs,
                max_prob,
            },
            shannon,
            min_entropy: -max_prob.ln(),
            alphabet_log: source.alphabet().log_size(),
        }
    }

    /// Per-character entropies of the chain; the asymptotics do not depend
    /// on the starting distribution.
    pub fn markov(source: &MarkovSource) -> Result<Self> {
        if !source.is_irreducible() {
            return Err(Error::ReducibleChain);
        }
        let m = source.alphabet().size();
        let log_transition: Vec<f64> = source
            .transition_flat()
            .iter()
            .map(|p| if *p > 0.0 { p.ln() } else { f64::NEG_INFINITY })
            .collect();
        let pi = stationary_distribution(source.transition_flat(), m)?;
        let mut shannon = 0.0;
        for i in 0..m {
            for j in 0..m {
                let p = source.transition_flat()[i * m + j];
                if p > 0.0 {
                    shannon -= pi[i] * p * p.ln();
                }
            }
        }
        // Min-entropy rate: the most likely length-k string follows the
        // best cycle of per-step log-probabilities.
        let min_entropy = -max_mean_cycle(&log_transition, m);
        Ok(RenyiCurve {
            kind: RenyiKind::Markov { m, log_transition },
            shannon,
            min_entropy,
            alphabet_log: source.alphabet().log_size(),
        })
    }

    /// R(beta) in nats; `beta` must be positive or +inf.
    pub fn value(&self, beta: f64) -> Result<f64> {
        if beta.is_nan() || beta <= 0.0 {
            return Err(Error::BadRenyiOrder(beta));
        }
        if beta.is_infinite() {
            return Ok(self.min_entropy);
        }
        self.eval(beta)
    }

    fn eval(&self, beta: f64) -> Result<f64> {
        if (beta - 1.0).abs() < SHANNON_GUARD {
            return Ok(self.shannon);
        }
        match &self.kind {
            RenyiKind::Iid {
                positive_probs,
                max_prob,
            } => {
                // Factor out the largest probability so the power sum stays
                // in [1, m] at any beta.
                let scaled: f64 = positive_probs
                    .iter()
                    .map(|p| (p / max_prob).powf(beta))
                    .sum();
                Ok((beta * max_prob.ln() + scaled.ln()) / (1.0 - beta))
            }
            RenyiKind::Markov { m, log_transition } => {
                let tilted: Vec<f64> = log_transition.iter().map(|w| beta * w).collect();
                let log_root = log_spectral_radius(&tilted, *m)?;
                Ok(log_root / (1.0 - beta))
            }
        }
    }

    /// R(1), the specific Shannon entropy (nats).
    pub fn shannon(&self) -> f64 {
        self.shannon
    }

    /// R(inf), the specific min-entropy (nats).
    pub fn min_entropy(&self) -> f64 {
        self.min_entropy
    }

    /// ln m for the source alphabet; the natural end of every rate grid.
    pub fn alphabet_log(&self) -> f64 {
        self.alphabet_log
    }
}

/// Specific Renyi entropy of an i.i.d. source (nats).
pub fn renyi_iid(source: &IidSource, beta: f64) -> Result<f64> {
    RenyiCurve::iid(source).value(beta)
}

/// Specific Renyi entropy of a Markov source via the tilted transition
/// matrix spectral radius (nats).
pub fn renyi_markov(source: &MarkovSource, beta: f64) -> Result<f64> {
    RenyiCurve::markov(source)?.value(beta)
}

/// Scaled cumulant generating function of single-user guesswork:
/// alpha * R(1/(1+alpha)) above alpha = -1, clamped at -R(inf) below.
#[derive(Debug, Clone)]
pub struct Scgf {
    renyi: RenyiCurve,
}

impl Scgf {
    pub fn new(renyi: RenyiCurve) -> Self {
        Scgf { renyi }
    }

    pub fn renyi(&self) -> &RenyiCurve {
        &self.renyi
    }

    pub fn value(&self, alpha: f64) -> Result<f64> {
        if alpha <= -1.0 {
            return Ok(-self.renyi.min_entropy());
        }
        if alpha == 0.0 {
            return Ok(0.0);
        }
        let beta = 1.0 / (1.0 + alpha);
        Ok(alpha * self.renyi.eval(beta)?)
    }
}

/// Lambda(alpha) for a single user (nats).
pub fn scgf_single(renyi: &RenyiCurve, alpha: f64) -> Result<f64> {
    Scgf::new(renyi.clone()).value(alpha)
}

/// Exponential growth rate of the average guesswork for V homogeneous
/// users of which U must be identified: R((V-U+1)/(V-U+2)) in nats.
pub fn avg_growth_exponent(renyi: &RenyiCurve, u: usize, v: usize) -> Result<f64> {
    if u < 1 || u > v {
        return Err(Error::OrderStatOutOfRange { u, v });
    }
    let n = (v - u) as f64;
    renyi.value((n + 1.0) / (n + 2.0))
}
