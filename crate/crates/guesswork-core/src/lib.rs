//! Quantifying brute-force security of multi-user systems.
//!
//! `V` users select strings of length `k` over a finite alphabet, each
//! from its own character source; an inquisitor who can test one (user,
//! string) pair at a time wants `U` of the strings. This crate provides
//!
//! - exact finite-length analysis: optimal single-user orderings,
//!   round-robin and arbitrary multi-user strategies, their guess-count
//!   distributions by exhaustive enumeration, the order-statistic
//!   distribution of the lock-step lower bound, and stochastic-dominance
//!   verdicts ([`exact`], [`strategy`]);
//! - long-string asymptotics: specific Renyi entropies of i.i.d. and
//!   Markov sources, guesswork sCGFs, large-deviations rate functions for
//!   single users and for the U-of-V problem, average-guesswork growth
//!   exponents and a PMF approximation ([`asymptotic`]);
//! - seeded Monte Carlo estimation with combinatorial rank evaluation for
//!   string lengths far beyond enumeration ([`monte_carlo`]).

pub mod asymptotic;
pub mod error;
pub mod exact;
pub mod monte_carlo;
mod numeric;
pub mod sources;
pub mod strategy;

pub use error::{Error, Result};
