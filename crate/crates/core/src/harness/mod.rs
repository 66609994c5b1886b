//! The end-to-end pipeline behind the command-line tool: solving, match
//! simulation, estimation over an episode log, the exact unbiasedness
//! oracle, and reporting.

mod estimate;
mod log;
mod oracle;
mod simulate;
mod solve;

pub use estimate::{
    decomposition_text, estimate_log, read_samples, samples_to_text, EstimationPlan, EstimationResult, ValueSource,
    MIVAT_VALUE_PA,
};
pub use log::{EpisodeLog, LogHeader};
pub use oracle::{run_oracle, OracleCheck, OracleConfig, OracleReport};
pub use simulate::{sample_episode, simulate};
pub use solve::{solve, SolveFiles};

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::game::BaseGame;
use crate::solver::{fixed_agent, AgentKind};
use crate::strategy::BehaviorStrategy;

/// Where an agent's strategy comes from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AgentSpec {
    Fixed(AgentKind),
    File(PathBuf),
}

impl AgentSpec {
    pub fn load(&self, game: BaseGame) -> Result<BehaviorStrategy> {
        match self {
            AgentSpec::Fixed(kind) => Ok(fixed_agent(*kind, game)),
            AgentSpec::File(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| Error::usage(format!("cannot read strategy `{}`: {e}", path.display())))?;
                let s = BehaviorStrategy::parse(&text)?;
                s.validate(1e-9)?;
                Ok(s)
            }
        }
    }
}

impl FromStr for AgentSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.parse::<AgentKind>() {
            Ok(kind) => Ok(AgentSpec::Fixed(kind)),
            Err(_) if !s.is_empty() && !s.contains(char::is_whitespace) => Ok(AgentSpec::File(PathBuf::from(s))),
            Err(_) => Err(Error::usage(format!("bad agent `{s}`"))),
        }
    }
}

impl fmt::Display for AgentSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AgentSpec::Fixed(kind) => write!(f, "{kind}"),
            AgentSpec::File(path) => write!(f, "{}", path.display()),
        }
    }
}

/// Runs `f` on a pool with `workers` threads, or rayon's default when 0.
pub fn with_workers<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::usage(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(f))
}
