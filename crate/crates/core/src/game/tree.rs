use std::collections::HashMap;

use super::{Action, Actor, GameDescriptor, GameState, PlayerId};
use crate::error::{Error, Result};
use crate::strategy::{BehaviorStrategy, Profile};

pub type NodeId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeKind {
    Chance,
    Decision { player: PlayerId, infoset: usize },
    Terminal,
}

#[derive(Debug, Clone)]
pub struct Node {
    pub state: GameState,
    pub parent: Option<NodeId>,
    pub depth: usize,
    pub kind: NodeKind,
    pub actions: Vec<Action>,
    pub children: Vec<NodeId>,
    /// Chance probabilities aligned with `actions`; empty elsewhere.
    pub chance_probs: Vec<f64>,
    /// Utility per player id; zero for non-terminal nodes.
    pub utility: [f64; 2],
}

impl Node {
    pub fn is_terminal(&self) -> bool {
        self.kind == NodeKind::Terminal
    }

    pub fn actor(&self) -> Option<Actor> {
        match self.kind {
            NodeKind::Chance => Some(Actor::Chance),
            NodeKind::Decision { player, .. } => Some(Actor::Player(player)),
            NodeKind::Terminal => None,
        }
    }

    pub fn child_for(&self, action: Action) -> Option<NodeId> {
        self.actions.iter().position(|&a| a == action).map(|i| self.children[i])
    }
}

/// An information set of the materialised tree. Agents `x` and `y` never
/// share one, even when they use the same seat-qualified key.
#[derive(Debug, Clone)]
pub struct InfoSet {
    pub key: String,
    pub player: PlayerId,
    pub actions: Vec<Action>,
    pub nodes: Vec<NodeId>,
}

/// The complete game tree. Node ids are assigned in pre-order, so every
/// parent has a smaller id than its children.
#[derive(Debug, Clone)]
pub struct GameTree {
    game: GameDescriptor,
    nodes: Vec<Node>,
    infosets: Vec<InfoSet>,
    infoset_index: HashMap<(PlayerId, String), usize>,
    terminals: Vec<NodeId>,
}

impl GameTree {
    pub fn build(game: GameDescriptor) -> GameTree {
        let mut tree = GameTree {
            game,
            nodes: Vec::new(),
            infosets: Vec::new(),
            infoset_index: HashMap::new(),
            terminals: Vec::new(),
        };
        tree.expand(game.initial_state(), None, 0);
        tree
    }

    fn expand(&mut self, state: GameState, parent: Option<NodeId>, depth: usize) -> NodeId {
        let id = self.nodes.len();
        let (kind, actions, chance_probs, utility) = match state.actor() {
            None => {
                self.terminals.push(id);
                let u = state.utility().expect("terminal utility");
                (NodeKind::Terminal, Vec::new(), Vec::new(), u)
            }
            Some(Actor::Chance) => {
                let dist = state.chance_distribution().expect("chance node");
                let (a, p) = dist.into_iter().unzip();
                (NodeKind::Chance, a, p, [0.0; 2])
            }
            Some(Actor::Player(player)) => {
                let actions = state.legal_actions().expect("decision node");
                let key = state.infoset_key().expect("decision key");
                let next = self.infosets.len();
                let infoset = *self.infoset_index.entry((player, key.clone())).or_insert(next);
                if infoset == next {
                    self.infosets.push(InfoSet {
                        key,
                        player,
                        actions: actions.clone(),
                        nodes: Vec::new(),
                    });
                }
                debug_assert_eq!(self.infosets[infoset].actions, actions);
                self.infosets[infoset].nodes.push(id);
                (NodeKind::Decision { player, infoset }, actions, Vec::new(), [0.0; 2])
            }
        };
        self.nodes.push(Node {
            state: state.clone(),
            parent,
            depth,
            kind,
            actions: actions.clone(),
            children: Vec::with_capacity(actions.len()),
            chance_probs,
            utility,
        });
        for a in actions {
            let child_state = state.apply(a).expect("legal action");
            let child = self.expand(child_state, Some(id), depth + 1);
            self.nodes[id].children.push(child);
        }
        id
    }

    pub fn game(&self) -> GameDescriptor {
        self.game
    }

    pub fn root(&self) -> NodeId {
        0
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id]
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn terminals(&self) -> &[NodeId] {
        &self.terminals
    }

    pub fn infosets(&self) -> &[InfoSet] {
        &self.infosets
    }

    pub fn infoset_id(&self, player: PlayerId, key: &str) -> Option<usize> {
        self.infoset_index.get(&(player, key.to_string())).copied()
    }

    /// Follows `history` from the root.
    pub fn find(&self, history: &[Action]) -> Result<NodeId> {
        let mut id = self.root();
        for &a in history {
            id = self.nodes[id].child_for(a).ok_or_else(|| Error::IllegalAction {
                state: self.nodes[id].state.to_string(),
                action: a.to_string(),
            })?;
        }
        Ok(id)
    }

    /// Node ids from the root down to `id`, inclusive.
    pub fn path(&self, id: NodeId) -> Vec<NodeId> {
        let mut path = vec![id];
        let mut cur = id;
        while let Some(p) = self.nodes[cur].parent {
            path.push(p);
            cur = p;
        }
        path.reverse();
        path
    }

    /// Position of `child` among its parent's children.
    pub fn action_index(&self, child: NodeId) -> Option<usize> {
        let parent = self.nodes[child].parent?;
        self.nodes[parent].children.iter().position(|&c| c == child)
    }

    /// Copy of the tree with terminal utilities replaced. Used to build toy
    /// games with a known answer on top of the poker structure.
    pub fn with_utilities(&self, f: impl Fn(&GameState) -> [f64; 2]) -> GameTree {
        let mut out = self.clone();
        for &z in &self.terminals {
            out.nodes[z].utility = f(&self.nodes[z].state);
        }
        out
    }

    /// Looks up each information set's distribution in the profile.
    /// Players without a strategy stay unresolved.
    pub fn resolve(&self, profile: &Profile) -> Result<ResolvedProfile> {
        let mut probs = Vec::with_capacity(self.infosets.len());
        for info in &self.infosets {
            let entry = match profile.get(info.player) {
                None => None,
                Some(s) => Some(resolve_infoset(s, info)?),
            };
            probs.push(entry);
        }
        Ok(ResolvedProfile { probs })
    }

    /// Probability of taking the `i`-th action at `id`, if known.
    pub fn action_prob(&self, profile: &ResolvedProfile, id: NodeId, i: usize) -> Option<f64> {
        let node = &self.nodes[id];
        match node.kind {
            NodeKind::Chance => Some(node.chance_probs[i]),
            NodeKind::Decision { infoset, .. } => profile.probs[infoset].as_ref().map(|v| v[i]),
            NodeKind::Terminal => None,
        }
    }

    /// Per-contributor reach of every node. Contributors without a strategy
    /// are reported as NaN.
    pub fn reach_vectors(&self, profile: &ResolvedProfile) -> Vec<ReachVector> {
        let mut out = vec![ReachVector::ROOT; self.nodes.len()];
        for id in 0..self.nodes.len() {
            let node = &self.nodes[id];
            for (i, &child) in node.children.iter().enumerate() {
                let mut r = out[id];
                let p = self.action_prob(profile, id, i).unwrap_or(f64::NAN);
                match node.kind {
                    NodeKind::Chance => r.chance *= p,
                    NodeKind::Decision { player, .. } => r.players[player.index()] *= p,
                    NodeKind::Terminal => unreachable!(),
                }
                out[child] = r;
            }
        }
        out
    }

    /// Reach restricted to a set of contributors; the product of their
    /// decision probabilities along each history.
    pub fn contributor_reach(&self, profile: &ResolvedProfile, chance: bool, players: [bool; 2]) -> Result<Vec<f64>> {
        for p in PlayerId::BOTH {
            if players[p.index()] && !profile.has(self, p) {
                return Err(Error::usage(format!("no strategy for player {p}")));
            }
        }
        let mut out = vec![1.0; self.nodes.len()];
        for id in 0..self.nodes.len() {
            let node = &self.nodes[id];
            let include = match node.kind {
                NodeKind::Chance => chance,
                NodeKind::Decision { player, .. } => players[player.index()],
                NodeKind::Terminal => continue,
            };
            for (i, &child) in node.children.iter().enumerate() {
                out[child] = if include {
                    out[id] * self.action_prob(profile, id, i).expect("resolved")
                } else {
                    out[id]
                };
            }
        }
        Ok(out)
    }

    /// Expected utility of `player` below every node under a full profile.
    pub fn expected_values(&self, profile: &ResolvedProfile, player: PlayerId) -> Result<Vec<f64>> {
        if !profile.is_complete() {
            return Err(Error::usage("expected values need strategies for both players"));
        }
        let mut ev = vec![0.0; self.nodes.len()];
        for id in (0..self.nodes.len()).rev() {
            let node = &self.nodes[id];
            ev[id] = if node.is_terminal() {
                node.utility[player.index()]
            } else {
                node.children
                    .iter()
                    .enumerate()
                    .map(|(i, &c)| self.action_prob(profile, id, i).expect("resolved") * ev[c])
                    .sum()
            };
        }
        Ok(ev)
    }

    /// Every terminal with its reach probability under a full profile.
    pub fn enumerate_terminals(&self, profile: &ResolvedProfile) -> Result<Vec<(NodeId, f64)>> {
        let reach = self.contributor_reach(profile, true, [true, true])?;
        Ok(self.terminals.iter().map(|&z| (z, reach[z])).collect())
    }
}

fn resolve_infoset(strategy: &BehaviorStrategy, info: &InfoSet) -> Result<Vec<f64>> {
    let dist = strategy
        .get(&info.key)
        .ok_or_else(|| Error::MissingInfoset(info.key.clone()))?;
    for &(a, p) in dist {
        if p > 0.0 && !info.actions.contains(&a) {
            return Err(Error::corruption(format!(
                "strategy plays illegal action `{a}` at `{}`",
                info.key
            )));
        }
    }
    let probs: Vec<f64> = info
        .actions
        .iter()
        .map(|a| dist.iter().find(|(b, _)| b == a).map(|&(_, p)| p).unwrap_or(0.0))
        .collect();
    let sum: f64 = probs.iter().sum();
    if (sum - 1.0).abs() > 1e-9 || probs.iter().any(|p| p.is_nan() || *p < 0.0) {
        return Err(Error::corruption(format!(
            "strategy at `{}` is not a distribution (sum {sum})",
            info.key
        )));
    }
    Ok(probs)
}

/// A profile bound to one tree: per-information-set action probabilities.
#[derive(Debug, Clone)]
pub struct ResolvedProfile {
    probs: Vec<Option<Vec<f64>>>,
}

impl ResolvedProfile {
    pub fn infoset_probs(&self, infoset: usize) -> Option<&[f64]> {
        self.probs[infoset].as_deref()
    }

    pub fn has(&self, tree: &GameTree, player: PlayerId) -> bool {
        tree.infosets
            .iter()
            .zip(&self.probs)
            .filter(|(info, _)| info.player == player)
            .all(|(_, p)| p.is_some())
    }

    pub fn is_complete(&self) -> bool {
        self.probs.iter().all(|p| p.is_some())
    }

    /// Builds a resolved profile directly from per-infoset vectors.
    pub fn from_vectors(probs: Vec<Option<Vec<f64>>>) -> Self {
        ResolvedProfile { probs }
    }
}

/// Reach probability split by contributor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReachVector {
    pub chance: f64,
    pub players: [f64; 2],
}

impl ReachVector {
    pub const ROOT: ReachVector = ReachVector {
        chance: 1.0,
        players: [1.0, 1.0],
    };

    /// π(h): product over all contributors.
    pub fn product(&self) -> f64 {
        self.chance * self.players[0] * self.players[1]
    }

    /// π_T(h) for the contributors in T.
    pub fn restricted(&self, chance: bool, players: [bool; 2]) -> f64 {
        let mut r = if chance { self.chance } else { 1.0 };
        for (known, reach) in players.iter().zip(self.players) {
            if *known {
                r *= reach;
            }
        }
        r
    }
}

/// Reach vector of a single state, replaying its history under `profile`.
pub fn reach_vector(state: &GameState, profile: &Profile) -> Result<ReachVector> {
    let mut r = ReachVector::ROOT;
    let mut cur = state.game().initial_state();
    for &a in state.history() {
        match cur.actor() {
            Some(Actor::Chance) => {
                let p = cur
                    .chance_distribution()?
                    .into_iter()
                    .find(|(b, _)| *b == a)
                    .map(|(_, p)| p)
                    .unwrap_or(0.0);
                r.chance *= p;
            }
            Some(Actor::Player(pl)) => {
                let s = profile
                    .get(pl)
                    .ok_or_else(|| Error::usage(format!("no strategy for player {pl}")))?;
                let key = cur.infoset_key().expect("decision key");
                r.players[pl.index()] *= s.probability(&key, a)?;
            }
            None => unreachable!("history continues past a terminal"),
        }
        cur = cur.apply(a)?;
    }
    Ok(r)
}
