//! JSON problem configuration consumed by every subcommand.

use std::path::Path;

use serde::Deserialize;

use guesswork_core::sources::{CharacterSource, MultiUserProblem, SourceSpec};

use crate::error::CliError;

/// Which multi-user statistic file-producing commands work with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StrategyChoice {
    /// The round-robin strategy's total query count.
    RoundRobin,
    /// The U-th order statistic of per-user optimal ranks.
    GOpt,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    pub sources: Vec<SourceSpec>,
    pub u: usize,
    pub k: usize,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub trials: Option<u64>,
    #[serde(default)]
    pub strategy: Option<StrategyChoice>,
    #[serde(default)]
    pub grid: Option<usize>,
    #[serde(default)]
    pub alphas: Option<Vec<f64>>,
    #[serde(default)]
    pub bins: Option<usize>,
    #[serde(default)]
    pub key_length: Option<usize>,
}

impl ProblemConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        let config: ProblemConfig = serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        if config.sources.is_empty() {
            return Err(CliError::Config("at least one source is required".into()));
        }
        if config.u < 1 || config.u > config.sources.len() {
            return Err(CliError::Config(format!(
                "u = {} outside 1..={}",
                config.u,
                config.sources.len()
            )));
        }
        Ok(config)
    }

    pub fn build_sources(&self) -> Result<Vec<CharacterSource>, CliError> {
        self.sources
            .iter()
            .map(|spec| CharacterSource::from_spec(spec).map_err(CliError::from))
            .collect()
    }

    pub fn problem(&self) -> Result<MultiUserProblem, CliError> {
        Ok(MultiUserProblem::new(self.build_sources()?, self.u, self.k)?)
    }

    /// All users share one source description.
    pub fn is_homogeneous(&self) -> bool {
        self.sources.windows(2).all(|w| w[0] == w[1])
    }
}

/// Enumeration caps, overridable through the GUESSWORK_CAP variable (one
/// value applied to both the per-user string cap and the joint sweep cap).
#[derive(Debug, Clone, Copy)]
pub struct Caps {
    pub enumeration: u64,
    pub joint: u64,
}

pub fn caps_from_env() -> Result<Caps, CliError> {
    match std::env::var("GUESSWORK_CAP") {
        Ok(raw) => {
            let cap: u64 = raw
                .parse()
                .map_err(|_| CliError::Config(format!("GUESSWORK_CAP must be an integer, got {raw:?}")))?;
            Ok(Caps {
                enumeration: cap,
                joint: cap,
            })
        }
        Err(_) => Ok(Caps {
            enumeration: guesswork_core::sources::DEFAULT_ENUMERATION_CAP,
            joint: guesswork_core::exact::DEFAULT_JOINT_CAP,
        }),
    }
}
