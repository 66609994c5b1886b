use super::{centred_expectation, total, EstimateSample};
use crate::error::{Error, Result};
use crate::game::{GameTree, NodeId, NodeKind, PlayerId};
use crate::solver::ValueFunction;

/// MIVAT: the terminal value plus one control variate per chance event,
/// each taken under the true chance distribution at that event.
#[derive(Debug, Clone)]
pub struct MivatTables {
    pub player: PlayerId,
    /// Per chance node: the correction for each observed outcome.
    corrections: Vec<Vec<f64>>,
    keys: Vec<String>,
}

impl MivatTables {
    pub fn build(tree: &GameTree, values: &ValueFunction, player: PlayerId) -> Result<Self> {
        let mut corrections = vec![Vec::new(); tree.len()];
        let mut keys = vec![String::new(); tree.len()];
        for (id, node) in tree.nodes().iter().enumerate() {
            if node.kind != NodeKind::Chance {
                continue;
            }
            let key = values.pa.view_key(&node.state);
            let u = node
                .actions
                .iter()
                .map(|&a| values.get_for(&key, a, player))
                .collect::<Result<Vec<_>>>()?;
            corrections[id] = (0..u.len())
                .map(|o| centred_expectation(&node.chance_probs, &u, o))
                .collect();
            keys[id] = key;
        }
        Ok(MivatTables {
            player,
            corrections,
            keys,
        })
    }

    pub fn estimate(&self, tree: &GameTree, z: NodeId) -> Result<EstimateSample> {
        let node = tree.node(z);
        if !node.is_terminal() {
            return Err(Error::usage("estimates need a terminal state"));
        }
        let base = node.utility[self.player.index()];
        let terms = self.terms(tree, z);
        Ok(EstimateSample {
            value: total(base, terms.iter().map(|t| t.1)),
            base,
            terms,
        })
    }

    /// MIVAT value without the decomposition.
    pub fn value(&self, tree: &GameTree, z: NodeId) -> f64 {
        let base = tree.node(z).utility[self.player.index()];
        total(base, self.terms(tree, z).into_iter().map(|t| t.1))
    }

    fn terms(&self, tree: &GameTree, z: NodeId) -> Vec<(String, f64)> {
        let path = tree.path(z);
        path.windows(2)
            .filter(|w| tree.node(w[0]).kind == NodeKind::Chance)
            .map(|w| {
                let i = tree.action_index(w[1]).expect("child of parent");
                (self.keys[w[0]].clone(), self.corrections[w[0]][i])
            })
            .collect()
    }
}
