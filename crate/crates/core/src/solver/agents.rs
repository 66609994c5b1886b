use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::game::{Action, BaseGame, GameDescriptor, GameTree};
use crate::strategy::BehaviorStrategy;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AgentKind {
    /// Every legal action with equal probability.
    Uniform,
    /// Check/call or bet/raise with equal probability, never folds.
    CallRaise,
}

impl FromStr for AgentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(AgentKind::Uniform),
            "callraise" | "call_raise" => Ok(AgentKind::CallRaise),
            _ => Err(Error::usage(format!("unknown agent `{s}`"))),
        }
    }
}

impl fmt::Display for AgentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AgentKind::Uniform => write!(f, "uniform"),
            AgentKind::CallRaise => write!(f, "callraise"),
        }
    }
}

/// Strategy table for a fixed agent covering both seats of `game`.
pub fn fixed_agent(kind: AgentKind, game: BaseGame) -> BehaviorStrategy {
    let tree = GameTree::build(GameDescriptor {
        base: game,
        seat_extended: false,
    });
    let mut out = BehaviorStrategy::new();
    for info in tree.infosets() {
        let dist = match kind {
            AgentKind::Uniform => {
                let p = 1.0 / info.actions.len() as f64;
                info.actions.iter().map(|&a| (a, p)).collect()
            }
            AgentKind::CallRaise => {
                if info.actions.contains(&Action::Raise) {
                    vec![(Action::Call, 0.5), (Action::Raise, 0.5)]
                } else {
                    vec![(Action::Call, 1.0)]
                }
            }
        };
        out.insert(info.key.clone(), dist);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn call_raise_never_folds() {
        let s = fixed_agent(AgentKind::CallRaise, BaseGame::Leduc);
        // facing a bet with one raise left
        assert_eq!(s.probability("2|Qs||r", Action::Fold).unwrap(), 0.0);
        assert_eq!(s.probability("2|Qs||r", Action::Call).unwrap(), 0.5);
        assert_eq!(s.probability("2|Qs||r", Action::Raise).unwrap(), 0.5);
        // cap reached: fold or call only
        assert_eq!(s.probability("1|Qs||rr", Action::Call).unwrap(), 1.0);
        s.validate(1e-12).unwrap();
    }

    #[test]
    fn uniform_mixes_evenly() {
        let s = fixed_agent(AgentKind::Uniform, BaseGame::Leduc);
        let third = s.probability("2|Qs||r", Action::Raise).unwrap();
        assert!((third - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(s.len(), 936);
        s.validate(1e-12).unwrap();
    }

    #[test]
    fn agent_names_parse() {
        assert_eq!("callraise".parse::<AgentKind>().unwrap(), AgentKind::CallRaise);
        assert!("random".parse::<AgentKind>().is_err());
    }
}
