use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::Result;
use crate::estimators::Episode;
use crate::game::{GameTree, NodeKind, PlayerId, ResolvedProfile};

/// Plays one game of the seat-extended tree. The RNG is seeded by the
/// master seed with the episode index as stream, so an episode does not
/// depend on which worker plays it.
pub fn sample_episode(tree: &GameTree, profile: &ResolvedProfile, seed: u64, id: u64) -> Episode {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    let mut node = tree.root();
    let mut actions = Vec::new();
    while !tree.node(node).is_terminal() {
        let n = tree.node(node);
        let probs: &[f64] = match n.kind {
            NodeKind::Chance => &n.chance_probs,
            NodeKind::Decision { infoset, .. } => profile.infoset_probs(infoset).expect("resolved profile"),
            NodeKind::Terminal => unreachable!(),
        };
        let i = inverse_cdf(probs, rng.random());
        actions.push(n.actions[i]);
        node = n.children[i];
    }
    let z = tree.node(node);
    Episode {
        id,
        x_seat: z.state.x_seat().expect("seated") as u8 + 1,
        actions,
        outcome: z.utility[PlayerId::X.index()],
    }
}

/// First index whose cumulative probability exceeds `r`, skipping
/// zero-probability actions.
fn inverse_cdf(probs: &[f64], r: f64) -> usize {
    let mut acc = 0.0;
    let mut last = 0;
    for (i, &p) in probs.iter().enumerate() {
        if p <= 0.0 {
            continue;
        }
        acc += p;
        last = i;
        if r < acc {
            return i;
        }
    }
    last
}

/// Simulates `games` episodes in parallel; the result is ordered by id.
pub fn simulate(tree: &GameTree, profile: &ResolvedProfile, games: u64, seed: u64) -> Result<Vec<Episode>> {
    if !profile.is_complete() {
        return Err(crate::error::Error::usage(
            "simulation needs strategies for both agents",
        ));
    }
    Ok((0..games)
        .into_par_iter()
        .map(|id| sample_episode(tree, profile, seed, id))
        .collect())
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::game::{extend_with_seat_chance, BaseGame, GameDescriptor};
    use crate::harness::with_workers;
    use crate::solver::{fixed_agent, AgentKind};
    use crate::stats::summarize;
    use crate::strategy::Profile;

    #[test]
    fn inverse_cdf_skips_zero_mass() {
        assert_eq!(inverse_cdf(&[0.0, 1.0], 0.0), 1);
        assert_eq!(inverse_cdf(&[0.5, 0.5, 0.0], 0.9999999), 1);
        assert_eq!(inverse_cdf(&[0.25, 0.25, 0.5], 0.3), 1);
    }

    #[test]
    fn deterministic_across_worker_counts() {
        let tree = GameTree::build(extend_with_seat_chance(GameDescriptor::leduc()));
        let u = Arc::new(fixed_agent(AgentKind::Uniform, BaseGame::Leduc));
        let profile = tree.resolve(&Profile::self_play(u)).unwrap();
        let a = with_workers(1, || simulate(&tree, &profile, 500, 3)).unwrap().unwrap();
        let b = with_workers(4, || simulate(&tree, &profile, 500, 3)).unwrap().unwrap();
        assert_eq!(a, b);
        for ep in &a {
            ep.terminal(&tree).unwrap();
        }
    }

    #[test]
    fn kuhn_uniform_mean_matches_enumeration() {
        let tree = GameTree::build(GameDescriptor::kuhn());
        let ext = GameTree::build(extend_with_seat_chance(GameDescriptor::kuhn()));
        let u = Arc::new(fixed_agent(AgentKind::Uniform, BaseGame::Kuhn));
        let base_profile = tree.resolve(&Profile::self_play(u.clone())).unwrap();
        let exact: f64 = tree
            .enumerate_terminals(&base_profile)
            .unwrap()
            .iter()
            .map(|&(z, p)| p * tree.node(z).utility[0])
            .sum();
        // seat 1's value, estimated from the games where x sits in seat 1
        let profile = ext.resolve(&Profile::self_play(u)).unwrap();
        let eps = simulate(&ext, &profile, 1_000_000, 11).unwrap();
        let seat_one = eps.iter().filter(|e| e.x_seat == 1).map(|e| e.outcome);
        let row = summarize(seat_one, "seat1").unwrap();
        assert!((row.mean - exact).abs() < 3.0 * row.stderr, "{} vs {exact}", row.mean);
        let share = eps.iter().filter(|e| e.x_seat == 1).count() as f64 / eps.len() as f64;
        assert!((share - 0.5).abs() < 0.005);
    }
}
