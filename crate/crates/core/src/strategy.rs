//! Behaviour strategies and their text format.
//!
//! A strategy maps an information-set key to a distribution over that
//! information set's legal actions. Keys are seat-qualified, so one table
//! can describe an agent playing either seat.
//!
//! File format, one information set per line:
//!
//! ```text
//! <infoset_key> <action>:<prob> <action>:<prob> ...
//! ```
//!
//! Probabilities are written with 17 significant digits and round-trip
//! exactly. Lines starting with `#` are comments.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::game::{Action, PlayerId};

#[derive(Debug, Clone, Default, PartialEq)]
pub struct BehaviorStrategy {
    table: BTreeMap<String, Vec<(Action, f64)>>,
}

impl BehaviorStrategy {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, key: impl Into<String>, dist: Vec<(Action, f64)>) {
        self.table.insert(key.into(), dist);
    }

    pub fn get(&self, key: &str) -> Option<&[(Action, f64)]> {
        self.table.get(key).map(|v| v.as_slice())
    }

    pub fn probability(&self, key: &str, action: Action) -> Result<f64> {
        let dist = self.get(key).ok_or_else(|| Error::MissingInfoset(key.to_string()))?;
        Ok(dist.iter().find(|(a, _)| *a == action).map(|&(_, p)| p).unwrap_or(0.0))
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &[(Action, f64)])> {
        self.table.iter().map(|(k, v)| (k.as_str(), v.as_slice()))
    }

    /// Checks every distribution is non-negative and sums to one.
    pub fn validate(&self, tol: f64) -> Result<()> {
        for (key, dist) in &self.table {
            let mut sum = 0.0;
            for &(a, p) in dist {
                if p.is_nan() || p < 0.0 {
                    return Err(Error::corruption(format!("negative probability for `{a}` at `{key}`")));
                }
                sum += p;
            }
            if (sum - 1.0).abs() > tol {
                return Err(Error::corruption(format!("probabilities at `{key}` sum to {sum}")));
            }
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (key, dist) in &self.table {
            out.push_str(key);
            for (a, p) in dist {
                let _ = write!(out, " {a}:{p:.16e}");
            }
            out.push('\n');
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut table = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut fields = line.split_whitespace();
            let key = fields.next().expect("non-empty line");
            let dist = fields
                .map(|f| parse_pair(f).map_err(|msg| Error::Parse { line: i + 1, msg }))
                .collect::<Result<Vec<_>>>()?;
            if dist.is_empty() {
                return Err(Error::Parse {
                    line: i + 1,
                    msg: format!("no actions for `{key}`"),
                });
            }
            table.insert(key.to_string(), dist);
        }
        Ok(BehaviorStrategy { table })
    }
}

pub(crate) fn parse_pair(field: &str) -> std::result::Result<(Action, f64), String> {
    let (a, v) = field
        .split_once(':')
        .ok_or_else(|| format!("expected <action>:<number>, got `{field}`"))?;
    let action = a.parse::<Action>().map_err(|e| e.to_string())?;
    let value = v.parse::<f64>().map_err(|_| format!("bad number `{v}`"))?;
    Ok((action, value))
}

/// Strategies for the two non-chance players. Either may be unknown,
/// which is the normal situation for an opponent under evaluation.
#[derive(Debug, Clone, Default)]
pub struct Profile {
    players: [Option<Arc<BehaviorStrategy>>; 2],
}

impl Profile {
    pub fn new(x: Option<Arc<BehaviorStrategy>>, y: Option<Arc<BehaviorStrategy>>) -> Self {
        Profile { players: [x, y] }
    }

    pub fn full(x: Arc<BehaviorStrategy>, y: Arc<BehaviorStrategy>) -> Self {
        Profile::new(Some(x), Some(y))
    }

    /// Both players use the same table.
    pub fn self_play(s: Arc<BehaviorStrategy>) -> Self {
        Profile::new(Some(s.clone()), Some(s))
    }

    pub fn get(&self, p: PlayerId) -> Option<&Arc<BehaviorStrategy>> {
        self.players[p.index()].as_ref()
    }

    pub fn is_complete(&self) -> bool {
        self.players.iter().all(|p| p.is_some())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parse_rejects_garbage() {
        assert!(BehaviorStrategy::parse("1|Js|| c0.5").is_err());
        assert!(BehaviorStrategy::parse("1|Js||").is_err());
        let s = BehaviorStrategy::parse("# header\n1|Js|| k:0.25 r:0.75\n").unwrap();
        assert_eq!(s.probability("1|Js||", Action::Call).unwrap(), 0.25);
        assert_eq!(s.probability("1|Js||", Action::Fold).unwrap(), 0.0);
        assert!(matches!(
            s.probability("2|Js||", Action::Call),
            Err(Error::MissingInfoset(_))
        ));
    }

    #[test]
    fn validate_flags_bad_sums() {
        let mut s = BehaviorStrategy::new();
        s.insert("k", vec![(Action::Call, 0.5), (Action::Raise, 0.4)]);
        assert!(s.validate(1e-9).is_err());
    }

    proptest! {
        #[test]
        fn text_round_trip(weights in prop::collection::vec(prop::collection::vec(1e-6f64..1.0, 2..4), 1..20)) {
            let mut s = BehaviorStrategy::new();
            for (i, w) in weights.iter().enumerate() {
                let total: f64 = w.iter().sum();
                let acts = [Action::Fold, Action::Call, Action::Raise];
                s.insert(format!("{}|Qh||{}", 1 + i % 2, "r".repeat(i)),
                    w.iter().zip(acts).map(|(p, a)| (a, p / total)).collect());
            }
            let back = BehaviorStrategy::parse(&s.to_text()).unwrap();
            prop_assert_eq!(back, s);
        }
    }
}
