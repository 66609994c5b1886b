use std::fmt;

use crate::error::{Error, Result};
use crate::game::{Action, GameTree, NodeId, PlayerId};

/// One observed game of the seat-extended game: the whole action sequence,
/// chance outcomes included, and agent `x`'s chip result.
#[derive(Debug, Clone, PartialEq)]
pub struct Episode {
    pub id: u64,
    /// Seat of agent `x`, 1 or 2.
    pub x_seat: u8,
    pub actions: Vec<Action>,
    pub outcome: f64,
}

impl Episode {
    /// Replays the actions and checks the logged seat and outcome.
    pub fn terminal(&self, tree: &GameTree) -> Result<NodeId> {
        let z = tree
            .find(&self.actions)
            .map_err(|e| Error::corruption(format!("episode {}: {e}", self.id)))?;
        let node = tree.node(z);
        if !node.is_terminal() {
            return Err(Error::corruption(format!("episode {} does not end the game", self.id)));
        }
        if node.state.x_seat().map(|s| s as u8 + 1) != Some(self.x_seat) {
            return Err(Error::corruption(format!("episode {}: seat mismatch", self.id)));
        }
        if node.utility[PlayerId::X.index()] != self.outcome {
            return Err(Error::corruption(format!(
                "episode {}: logged outcome {} but replay gives {}",
                self.id,
                self.outcome,
                node.utility[PlayerId::X.index()]
            )));
        }
        Ok(z)
    }

    /// `<id> <x seat> <tokens...> = <outcome>`
    pub fn parse_line(line: &str, line_no: usize) -> Result<Episode> {
        let err = |msg: String| Error::Parse { line: line_no, msg };
        let (lhs, rhs) = line
            .split_once(" = ")
            .ok_or_else(|| err("missing ` = <outcome>`".into()))?;
        let mut fields = lhs.split_whitespace();
        let id = fields
            .next()
            .and_then(|f| f.parse().ok())
            .ok_or_else(|| err("bad episode id".into()))?;
        let x_seat = match fields.next() {
            Some("1") => 1,
            Some("2") => 2,
            _ => return Err(err("seat must be 1 or 2".into())),
        };
        let actions = fields
            .map(|t| t.parse::<Action>().map_err(|e| err(e.to_string())))
            .collect::<Result<Vec<_>>>()?;
        let outcome = rhs
            .trim()
            .parse()
            .map_err(|_| err(format!("bad outcome `{}`", rhs.trim())))?;
        Ok(Episode {
            id,
            x_seat,
            actions,
            outcome,
        })
    }
}

impl fmt::Display for Episode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.id, self.x_seat)?;
        for a in &self.actions {
            write!(f, " {a}")?;
        }
        write!(f, " = {}", self.outcome)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{extend_with_seat_chance, GameDescriptor};

    #[test]
    fn line_round_trip_and_replay() {
        let tree = GameTree::build(extend_with_seat_chance(GameDescriptor::leduc()));
        let ep = Episode::parse_line("17 2 x2 Qs Ks c r f = 1", 1).unwrap();
        assert_eq!(ep.to_string(), "17 2 x2 Qs Ks c r f = 1");
        let z = ep.terminal(&tree).unwrap();
        assert!(tree.node(z).is_terminal());
        let bad = Episode {
            outcome: -1.0,
            ..ep.clone()
        };
        assert!(matches!(bad.terminal(&tree), Err(Error::DataCorruption(_))));
        let short = Episode {
            actions: ep.actions[..4].to_vec(),
            ..ep
        };
        assert!(short.terminal(&tree).is_err());
        assert!(Episode::parse_line("1 3 x1 = 0", 4).is_err());
    }
}
