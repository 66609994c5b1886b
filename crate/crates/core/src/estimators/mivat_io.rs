use std::collections::HashMap;

use super::{check_denominator, CompensatedSum, MivatTables};
use crate::error::{Error, Result};
use crate::game::{GameTree, NodeId, NodeKind, ResolvedProfile};
use crate::partitions::PaSpec;

/// Which imaginary terminals are averaged with an observed one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum IoGrouping {
    /// Terminals the unknown players cannot tell apart: same public
    /// actions and cards, other private cards for the known players.
    PrivateCards,
    /// As above, and a terminal reached by a known player's action is
    /// also grouped with every game-ending alternative to that action.
    EndingActions,
}

/// MIVAT with imaginary observations: the reach-weighted average of MIVAT
/// values over a group of terminals with equal unknown-player reach.
#[derive(Debug, Clone)]
pub struct MivatIoTables {
    pub pa: PaSpec,
    pub grouping: IoGrouping,
    group_of: Vec<Option<usize>>,
    values: Vec<Option<f64>>,
    keys: Vec<String>,
}

impl MivatIoTables {
    pub fn build(
        tree: &GameTree,
        profile: &ResolvedProfile,
        mivat: &MivatTables,
        pa: PaSpec,
        grouping: IoGrouping,
    ) -> Result<Self> {
        let reach = tree.contributor_reach(profile, true, pa.players_mask())?;
        let mut index: HashMap<String, usize> = HashMap::new();
        let mut keys = Vec::new();
        let mut members: Vec<Vec<NodeId>> = Vec::new();
        let mut group_of = vec![None; tree.len()];
        for &z in tree.terminals() {
            let parent = tree.node(z).parent.expect("terminal below the root");
            let key = match tree.node(parent).kind {
                NodeKind::Decision { player, .. } if grouping == IoGrouping::EndingActions && pa.contains(player) => {
                    format!("A:{}", pa.view_key(&tree.node(parent).state))
                }
                _ => format!("B:{}", pa.view_key(&tree.node(z).state)),
            };
            let g = *index.entry(key.clone()).or_insert_with(|| {
                keys.push(key);
                members.push(Vec::new());
                members.len() - 1
            });
            members[g].push(z);
            group_of[z] = Some(g);
        }
        let values = members
            .iter()
            .map(|ms| {
                let weight: f64 = ms.iter().map(|&z| reach[z]).sum();
                (weight >= 1e-300).then(|| {
                    ms.iter()
                        .map(|&z| reach[z] / weight * mivat.value(tree, z))
                        .collect::<CompensatedSum>()
                        .value()
                })
            })
            .collect();
        Ok(MivatIoTables {
            pa,
            grouping,
            group_of,
            values,
            keys,
        })
    }

    pub fn estimate(&self, z: NodeId) -> Result<f64> {
        let g = self.group_of[z].ok_or_else(|| Error::usage("estimates need a terminal state"))?;
        match self.values[g] {
            Some(v) => Ok(v),
            None => check_denominator(0.0, || self.keys[g].clone()),
        }
    }
}
