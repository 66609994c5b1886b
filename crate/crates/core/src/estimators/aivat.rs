use super::{centred_expectation, check_denominator, total, CompensatedSum, EstimateSample};
use crate::error::{Error, Result};
use crate::game::{GameTree, NodeId, PlayerId, ResolvedProfile};
use crate::partitions::{build_h_partition, build_w_partition, decompose_path, HPartition, PaSpec, WPartition};
use crate::solver::ValueFunction;

/// AIVAT prepared for one known-player set: a correction per (part,
/// observed action) and a base value per terminal part.
#[derive(Debug, Clone)]
pub struct AivatTables {
    pub pa: PaSpec,
    pub player: PlayerId,
    pub hp: HPartition,
    pub wp: WPartition,
    corrections: Vec<Vec<Option<f64>>>,
    /// Per terminal node.
    base: Vec<Option<f64>>,
}

impl AivatTables {
    /// `profile` must resolve the strategies of every known player.
    pub fn build(
        tree: &GameTree,
        profile: &ResolvedProfile,
        values: &ValueFunction,
        pa: PaSpec,
        player: PlayerId,
    ) -> Result<Self> {
        let hp = build_h_partition(tree, pa);
        let wp = build_w_partition(tree, pa, &hp);
        Self::with_partitions(tree, profile, values, hp, wp, player)
    }

    pub fn with_partitions(
        tree: &GameTree,
        profile: &ResolvedProfile,
        values: &ValueFunction,
        hp: HPartition,
        wp: WPartition,
        player: PlayerId,
    ) -> Result<Self> {
        let pa = hp.pa;
        values.check_covers(&hp)?;
        let reach = tree.contributor_reach(profile, true, pa.players_mask())?;

        let mut corrections = Vec::with_capacity(hp.len());
        for part in &hp.parts {
            let weight: f64 = part.members.iter().map(|&h| reach[h]).sum();
            if weight < 1e-300 {
                corrections.push(vec![None; part.actions.len()]);
                continue;
            }
            // Probability of each extended action at a member drawn in
            // proportion to the known players' reach.
            let mut probs = vec![0.0; part.actions.len()];
            for &h in &part.members {
                let w = reach[h] / weight;
                for (i, &a) in tree.node(h).actions.iter().enumerate() {
                    let j = part.action_index(a).expect("A(H) contains member actions");
                    probs[j] += w * tree.action_prob(profile, h, i).expect("known player");
                }
            }
            let u = part
                .actions
                .iter()
                .map(|&a| values.get_for(&part.key, a, player))
                .collect::<Result<Vec<_>>>()?;
            corrections.push(
                (0..u.len())
                    .map(|o| (probs[o] > 0.0).then(|| centred_expectation(&probs, &u, o)))
                    .collect(),
            );
        }

        // Centred on the observed terminal so that equal payoffs across a
        // part return that payoff exactly.
        let mut base = vec![None; tree.len()];
        for part in &wp.parts {
            let weight: f64 = part.members.iter().map(|&z| reach[z]).sum();
            if weight < 1e-300 {
                continue;
            }
            for &z in &part.members {
                let v = tree.node(z).utility[player.index()];
                let mut s = CompensatedSum::new(v);
                for &other in &part.members {
                    s.add(reach[other] / weight * (tree.node(other).utility[player.index()] - v));
                }
                base[z] = Some(s.value());
            }
        }

        Ok(AivatTables {
            pa,
            player,
            hp,
            wp,
            corrections,
            base,
        })
    }

    /// Base value of the terminal part containing `z`.
    pub fn base_value(&self, z: NodeId) -> Result<f64> {
        let w = self
            .wp
            .part_of(z)
            .ok_or_else(|| Error::usage("estimates need a terminal state"))?;
        match self.base[z] {
            Some(v) => Ok(v),
            None => check_denominator(0.0, || format!("terminal part {}", self.wp.parts[w].key)),
        }
    }

    pub fn correction(&self, part: usize, action_index: usize) -> Result<f64> {
        match self.corrections[part][action_index] {
            Some(k) => Ok(k),
            None => check_denominator(0.0, || {
                let p = &self.hp.parts[part];
                format!("part {} action {}", p.key, p.actions[action_index])
            }),
        }
    }

    pub fn estimate(&self, tree: &GameTree, z: NodeId) -> Result<EstimateSample> {
        if !tree.node(z).is_terminal() {
            return Err(Error::usage("estimates need a terminal state"));
        }
        let path = decompose_path(tree, &self.hp, &self.wp, z)?;
        let base = self.base_value(z)?;
        let terms = path
            .steps
            .iter()
            .map(|s| {
                Ok((
                    self.hp.parts[s.part].key.clone(),
                    self.correction(s.part, s.action_index)?,
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(EstimateSample {
            value: total(base, terms.iter().map(|t| t.1)),
            base,
            terms,
        })
    }
}
