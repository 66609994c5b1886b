use crate::error::{Error, Result};
use crate::game::{GameTree, NodeKind, PlayerId, ResolvedProfile};

/// Expected utility `responder` earns by best-responding to the other
/// player's strategy in `profile`. Only the opponent's strategy is read.
pub fn best_response_value(tree: &GameTree, profile: &ResolvedProfile, responder: PlayerId) -> Result<f64> {
    let opponent = responder.opponent();
    if !profile.has(tree, opponent) {
        return Err(Error::usage(format!("no strategy for player {opponent}")));
    }
    let reach = tree.contributor_reach(profile, true, [opponent == PlayerId::X, opponent == PlayerId::Y])?;

    let max_depth = tree.nodes().iter().map(|n| n.depth).max().unwrap_or(0);
    let mut by_depth: Vec<Vec<usize>> = vec![Vec::new(); max_depth + 1];
    for (id, n) in tree.nodes().iter().enumerate() {
        by_depth[n.depth].push(id);
    }
    let mut infosets_by_depth: Vec<Vec<usize>> = vec![Vec::new(); max_depth + 1];
    for (i, info) in tree.infosets().iter().enumerate() {
        if info.player == responder {
            infosets_by_depth[tree.node(info.nodes[0]).depth].push(i);
        }
    }

    // Reach-weighted value below each node: sum over terminals of
    // opponent-and-chance reach times the responder's utility.
    let mut value = vec![0.0; tree.len()];
    for depth in (0..=max_depth).rev() {
        for &id in &by_depth[depth] {
            let node = tree.node(id);
            match node.kind {
                NodeKind::Terminal => value[id] = reach[id] * node.utility[responder.index()],
                NodeKind::Chance => value[id] = node.children.iter().map(|&c| value[c]).sum(),
                NodeKind::Decision { player, .. } if player != responder => {
                    value[id] = node.children.iter().map(|&c| value[c]).sum()
                }
                NodeKind::Decision { .. } => {}
            }
        }
        for &i in &infosets_by_depth[depth] {
            let info = &tree.infosets()[i];
            let best = (0..info.actions.len())
                .max_by(|&a, &b| {
                    let va: f64 = info.nodes.iter().map(|&h| value[tree.node(h).children[a]]).sum();
                    let vb: f64 = info.nodes.iter().map(|&h| value[tree.node(h).children[b]]).sum();
                    va.total_cmp(&vb)
                })
                .expect("non-empty action set");
            for &h in &info.nodes {
                value[h] = value[tree.node(h).children[best]];
            }
        }
    }
    Ok(value[tree.root()])
}

/// Mean of both players' best-response values: zero exactly at an
/// equilibrium of a zero-sum game.
pub fn exploitability(tree: &GameTree, profile: &ResolvedProfile) -> Result<f64> {
    let a = best_response_value(tree, profile, PlayerId::X)?;
    let b = best_response_value(tree, profile, PlayerId::Y)?;
    Ok((a + b) / 2.0)
}
