//! Correction-term partition over the states where a known-strategy player
//! (or chance) acts, and the matching partition of terminal states.
//!
//! Parts are keyed by what the unknown players can observe: the seat
//! assignment, the public betting and board, the unknown players' own
//! private cards, and a `??` placeholder for every private card dealt to a
//! known player. States sharing a key pass through the same opponent
//! information sets with the same opponent actions, so they have identical
//! opponent reach under every opponent strategy; they also have identical
//! history length, so no member can be a prefix of another.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::game::{Action, Actor, GameState, GameTree, NodeId, NodeKind, PlayerId, ResolvedProfile};

/// The players whose strategies are known. Chance is always a member.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PaSpec {
    players: [bool; 2],
}

impl PaSpec {
    pub const C: PaSpec = PaSpec {
        players: [false, false],
    };
    pub const CX: PaSpec = PaSpec { players: [true, false] };
    pub const CY: PaSpec = PaSpec { players: [false, true] };
    pub const CXY: PaSpec = PaSpec { players: [true, true] };
    pub const ALL: [PaSpec; 4] = [PaSpec::C, PaSpec::CX, PaSpec::CY, PaSpec::CXY];

    pub fn contains(&self, p: PlayerId) -> bool {
        self.players[p.index()]
    }

    pub fn players_mask(&self) -> [bool; 2] {
        self.players
    }

    pub fn members(&self) -> Vec<PlayerId> {
        PlayerId::BOTH.into_iter().filter(|&p| self.contains(p)).collect()
    }

    /// P_o: the players outside P_a.
    pub fn opponents(&self) -> Vec<PlayerId> {
        PlayerId::BOTH.into_iter().filter(|&p| !self.contains(p)).collect()
    }

    pub fn acts_at(&self, actor: Actor) -> bool {
        match actor {
            Actor::Chance => true,
            Actor::Player(p) => self.contains(p),
        }
    }

    /// Seats whose private cards are invisible to the unknown players.
    pub fn hidden_seats(&self, state: &GameState) -> [bool; 2] {
        let mut hidden = [false; 2];
        for (seat, h) in hidden.iter_mut().enumerate() {
            *h = state.player_at_seat(seat).map(|p| self.contains(p)).unwrap_or(false);
        }
        hidden
    }

    pub fn view_key(&self, state: &GameState) -> String {
        state.view_key(self.hidden_seats(state))
    }
}

impl fmt::Display for PaSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "c")?;
        if self.players[0] {
            write!(f, "x")?;
        }
        if self.players[1] {
            write!(f, "y")?;
        }
        Ok(())
    }
}

impl FromStr for PaSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<PaSpec> {
        match s {
            "c" => Ok(PaSpec::C),
            "cx" => Ok(PaSpec::CX),
            "cy" => Ok(PaSpec::CY),
            "cxy" => Ok(PaSpec::CXY),
            _ => Err(Error::usage(format!("bad P_a `{s}` (expected c, cx, cy or cxy)"))),
        }
    }
}

pub type PartId = usize;

#[derive(Debug, Clone)]
pub struct HPart {
    pub key: String,
    pub members: Vec<NodeId>,
    /// A(H): union of the members' legal actions, canonical order.
    pub actions: Vec<Action>,
}

impl HPart {
    pub fn action_index(&self, a: Action) -> Option<usize> {
        self.actions.binary_search(&a).ok()
    }
}

#[derive(Debug, Clone)]
pub struct HPartition {
    pub pa: PaSpec,
    pub parts: Vec<HPart>,
    part_of: Vec<Option<PartId>>,
}

impl HPartition {
    /// Assembles a partition from explicit member groups. No property is
    /// checked here; see [`validate_partitions`].
    pub fn from_groups(tree: &GameTree, pa: PaSpec, groups: Vec<(String, Vec<NodeId>)>) -> Self {
        let mut part_of = vec![None; tree.len()];
        let parts = groups
            .into_iter()
            .enumerate()
            .map(|(id, (key, members))| {
                let mut actions = BTreeSet::new();
                for &m in &members {
                    part_of[m] = Some(id);
                    actions.extend(tree.node(m).actions.iter().copied());
                }
                HPart {
                    key,
                    members,
                    actions: actions.into_iter().collect(),
                }
            })
            .collect();
        HPartition { pa, parts, part_of }
    }

    pub fn part_of(&self, node: NodeId) -> Option<PartId> {
        self.part_of[node]
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn find(&self, key: &str) -> Option<PartId> {
        self.parts.iter().position(|p| p.key == key)
    }

    pub fn to_text(&self, tree: &GameTree) -> String {
        let mut out = String::new();
        for part in &self.parts {
            out.push_str(&part.key);
            out.push_str(" actions=");
            let acts: Vec<String> = part.actions.iter().map(|a| a.to_string()).collect();
            out.push_str(&acts.join(","));
            out.push_str(" members=");
            let ms: Vec<String> = part
                .members
                .iter()
                .map(|&m| history_string(&tree.node(m).state))
                .collect();
            out.push_str(&ms.join(","));
            out.push('\n');
        }
        out
    }
}

fn history_string(state: &GameState) -> String {
    let toks: Vec<String> = state.history().iter().map(|a| a.to_string()).collect();
    if toks.is_empty() {
        "root".into()
    } else {
        toks.join("-")
    }
}

/// Groups every P_a-acting state by its opponent-view key.
pub fn build_h_partition(tree: &GameTree, pa: PaSpec) -> HPartition {
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut groups: Vec<(String, Vec<NodeId>)> = Vec::new();
    for (id, node) in tree.nodes().iter().enumerate() {
        let Some(actor) = node.actor() else { continue };
        if !pa.acts_at(actor) {
            continue;
        }
        let key = pa.view_key(&node.state);
        let slot = *index.entry(key.clone()).or_insert_with(|| {
            groups.push((key, Vec::new()));
            groups.len() - 1
        });
        groups[slot].1.push(id);
    }
    HPartition::from_groups(tree, pa, groups)
}

#[derive(Debug, Clone)]
pub struct WPart {
    pub key: String,
    pub members: Vec<NodeId>,
}

#[derive(Debug, Clone)]
pub struct WPartition {
    pub parts: Vec<WPart>,
    part_of: Vec<Option<usize>>,
}

impl WPartition {
    pub fn from_groups(tree: &GameTree, groups: Vec<(String, Vec<NodeId>)>) -> Self {
        let mut part_of = vec![None; tree.len()];
        let parts = groups
            .into_iter()
            .enumerate()
            .map(|(id, (key, members))| {
                for &m in &members {
                    part_of[m] = Some(id);
                }
                WPart { key, members }
            })
            .collect();
        WPartition { parts, part_of }
    }

    pub fn part_of(&self, z: NodeId) -> Option<usize> {
        self.part_of[z]
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }
}

/// Token for `action` taken at `state` as the unknown players see it.
fn public_token(pa: PaSpec, state: &GameState, action: Action) -> String {
    let hidden = pa.hidden_seats(state);
    match action {
        Action::Deal(c) if state.board().is_none() && state.hole_cards()[1].is_none() => {
            let seat = if state.hole_cards()[0].is_none() { 0 } else { 1 };
            if hidden[seat] {
                "??".into()
            } else {
                c.to_string()
            }
        }
        Action::DealPair(a, b) => {
            let show = |seat: usize, c: crate::game::Card| {
                if hidden[seat] {
                    "??".to_string()
                } else {
                    c.to_string()
                }
            };
            format!("{}{}", show(0, a), show(1, b))
        }
        other => state.action_token(other),
    }
}

/// Deepest strict prefix of `z` where a P_a member acts.
pub fn last_pa_prefix(tree: &GameTree, pa: PaSpec, z: NodeId) -> Option<NodeId> {
    let mut cur = tree.node(z).parent;
    while let Some(h) = cur {
        if let Some(actor) = tree.node(h).actor() {
            if pa.acts_at(actor) {
                return Some(h);
            }
        }
        cur = tree.node(h).parent;
    }
    None
}

/// Groups terminals by the part of their deepest P_a prefix plus the
/// publicly visible actions from that prefix onwards.
pub fn build_w_partition(tree: &GameTree, pa: PaSpec, hp: &HPartition) -> WPartition {
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut groups: Vec<(String, Vec<NodeId>)> = Vec::new();
    for &z in tree.terminals() {
        let key = match last_pa_prefix(tree, pa, z).and_then(|h| hp.part_of(h).map(|p| (h, p))) {
            Some((h, part)) => {
                let zs = &tree.node(z).state;
                let start = tree.node(h).depth;
                let mut cur = tree.node(h).state.clone();
                let mut suffix = Vec::new();
                for &a in &zs.history()[start..] {
                    suffix.push(public_token(pa, &cur, a));
                    cur = cur.apply(a).expect("replay of a tree history");
                }
                format!("{}#{}", hp.parts[part].key, suffix.join(""))
            }
            None => format!("{}#", pa.view_key(&tree.node(z).state)),
        };
        let slot = *index.entry(key.clone()).or_insert_with(|| {
            groups.push((key, Vec::new()));
            groups.len() - 1
        });
        groups[slot].1.push(z);
    }
    WPartition::from_groups(tree, groups)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PathStep {
    pub part: PartId,
    pub member: NodeId,
    pub action: Action,
    /// Index of `action` within the part's extended action set.
    pub action_index: usize,
}

/// Every part crossed by a terminal's history, in history order, plus the
/// terminal's W part. Parts not listed contribute nothing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathDecomposition {
    pub steps: Vec<PathStep>,
    pub w_part: usize,
}

pub fn decompose_path(tree: &GameTree, hp: &HPartition, wp: &WPartition, z: NodeId) -> Result<PathDecomposition> {
    if !tree.node(z).is_terminal() {
        return Err(Error::usage("path decomposition needs a terminal state"));
    }
    let path = tree.path(z);
    let mut steps = Vec::new();
    for w in path.windows(2) {
        let (h, child) = (w[0], w[1]);
        if let Some(part) = hp.part_of(h) {
            let i = tree.action_index(child).expect("child of parent");
            let action = tree.node(h).actions[i];
            let action_index = hp.parts[part]
                .action_index(action)
                .expect("A(H) contains every member action");
            steps.push(PathStep {
                part,
                member: h,
                action,
                action_index,
            });
        }
    }
    let w_part = wp
        .part_of(z)
        .ok_or_else(|| Error::corruption("terminal outside the W partition"))?;
    Ok(PathDecomposition { steps, w_part })
}

#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    /// Property 1: two members with different opponent reach.
    OpponentReach {
        part: String,
        a: NodeId,
        b: NodeId,
        diff: f64,
    },
    /// Property 2: a member is a prefix of another member.
    Prefix {
        part: String,
        ancestor: NodeId,
        descendant: NodeId,
    },
    /// Property 3: recorded A(H) differs from the members' union.
    Actions {
        part: String,
    },
    /// A P_a state outside every part, or a non-P_a state inside one.
    Coverage {
        node: NodeId,
    },
    WOpponentReach {
        part: String,
        a: NodeId,
        b: NodeId,
        diff: f64,
    },
    /// Members disagree on whether a P_a player acted.
    WActedFlag {
        part: String,
    },
    /// Deepest P_a prefixes of two members lie in different H parts.
    WPrefixPart {
        part: String,
        a: NodeId,
        b: NodeId,
    },
    WCoverage {
        node: NodeId,
    },
}

#[derive(Debug, Clone, Default)]
pub struct PartitionDiagnostics {
    pub violations: Vec<Violation>,
}

impl PartitionDiagnostics {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Random behaviour for the given players' information sets, everything
/// else unresolved.
pub fn random_strategies(tree: &GameTree, players: [bool; 2], rng: &mut impl Rng) -> ResolvedProfile {
    let probs = tree
        .infosets()
        .iter()
        .map(|info| {
            players[info.player.index()].then(|| {
                let w: Vec<f64> = info.actions.iter().map(|_| rng.random::<f64>() + 1e-3).collect();
                let s: f64 = w.iter().sum();
                w.into_iter().map(|x| x / s).collect()
            })
        })
        .collect();
    ResolvedProfile::from_vectors(probs)
}

/// Checks the three H properties and the three W conditions, drawing
/// `trials` random opponent strategies for the reach-equality checks.
pub fn validate_partitions(
    tree: &GameTree,
    pa: PaSpec,
    hp: &HPartition,
    wp: &WPartition,
    trials: usize,
    seed: u64,
) -> PartitionDiagnostics {
    let mut diag = PartitionDiagnostics::default();
    let tol = 1e-12;

    for (id, node) in tree.nodes().iter().enumerate() {
        let should = node.actor().map(|a| pa.acts_at(a)).unwrap_or(false);
        if should != hp.part_of(id).is_some() {
            diag.violations.push(Violation::Coverage { node: id });
        }
        if node.is_terminal() != wp.part_of(id).is_some() {
            diag.violations.push(Violation::WCoverage { node: id });
        }
    }

    for part in &hp.parts {
        let union: BTreeSet<Action> = part
            .members
            .iter()
            .flat_map(|&m| tree.node(m).actions.iter().copied())
            .collect();
        if union.into_iter().collect::<Vec<_>>() != part.actions {
            diag.violations.push(Violation::Actions { part: part.key.clone() });
        }
        let members: BTreeSet<NodeId> = part.members.iter().copied().collect();
        for &m in &part.members {
            let mut cur = tree.node(m).parent;
            while let Some(h) = cur {
                if members.contains(&h) {
                    diag.violations.push(Violation::Prefix {
                        part: part.key.clone(),
                        ancestor: h,
                        descendant: m,
                    });
                }
                cur = tree.node(h).parent;
            }
        }
    }

    let prefix_part = |z: NodeId| last_pa_prefix(tree, pa, z).and_then(|h| hp.part_of(h));
    for part in &wp.parts {
        let flags: BTreeSet<bool> = part.members.iter().map(|&z| pa_player_acted(tree, pa, z)).collect();
        if flags.len() > 1 {
            diag.violations.push(Violation::WActedFlag { part: part.key.clone() });
        }
        if let Some(&first) = part.members.first() {
            let p0 = prefix_part(first);
            for &z in &part.members[1..] {
                if prefix_part(z) != p0 {
                    diag.violations.push(Violation::WPrefixPart {
                        part: part.key.clone(),
                        a: first,
                        b: z,
                    });
                    break;
                }
            }
        }
    }

    let opponents = {
        let m = pa.players_mask();
        [!m[0], !m[1]]
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..trials {
        let profile = random_strategies(tree, opponents, &mut rng);
        let reach = tree
            .contributor_reach(&profile, false, opponents)
            .expect("opponent strategies resolved");
        for part in &hp.parts {
            if let Some(v) = first_mismatch(&part.members, &reach, tol) {
                diag.violations.push(Violation::OpponentReach {
                    part: part.key.clone(),
                    a: v.0,
                    b: v.1,
                    diff: v.2,
                });
            }
        }
        for part in &wp.parts {
            if let Some(v) = first_mismatch(&part.members, &reach, tol) {
                diag.violations.push(Violation::WOpponentReach {
                    part: part.key.clone(),
                    a: v.0,
                    b: v.1,
                    diff: v.2,
                });
            }
        }
        if !diag.violations.is_empty() {
            break;
        }
    }
    diag
}

fn first_mismatch(members: &[NodeId], reach: &[f64], tol: f64) -> Option<(NodeId, NodeId, f64)> {
    let (&first, rest) = members.split_first()?;
    rest.iter().find_map(|&m| {
        let diff = (reach[m] - reach[first]).abs();
        (diff > tol).then_some((first, m, diff))
    })
}

fn pa_player_acted(tree: &GameTree, pa: PaSpec, z: NodeId) -> bool {
    let mut cur = tree.node(z).parent;
    while let Some(h) = cur {
        if let NodeKind::Decision { player, .. } = tree.node(h).kind {
            if pa.contains(player) {
                return true;
            }
        }
        cur = tree.node(h).parent;
    }
    false
}
