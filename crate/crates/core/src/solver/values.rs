//! Value functions: one scalar per (correction part, action), read by the
//! estimators as the expected value of the evaluated player after that
//! action is taken in any state of the part.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use rand::Rng;

use crate::error::{Error, Result};
use crate::game::{Action, GameTree, NodeKind, PlayerId, ResolvedProfile};
use crate::partitions::{HPartition, PaSpec};
use crate::strategy::parse_pair;

#[derive(Debug, Clone, PartialEq)]
pub struct ValueFunction {
    /// Known-player set whose part keys index the table.
    pub pa: PaSpec,
    /// Player whose winnings the values estimate.
    pub perspective: PlayerId,
    table: BTreeMap<String, Vec<(Action, f64)>>,
}

impl ValueFunction {
    pub fn new(pa: PaSpec, perspective: PlayerId) -> Self {
        ValueFunction {
            pa,
            perspective,
            table: BTreeMap::new(),
        }
    }

    pub fn insert(&mut self, part_key: impl Into<String>, action: Action, value: f64) {
        let row = self.table.entry(part_key.into()).or_default();
        match row.iter_mut().find(|(a, _)| *a == action) {
            Some(slot) => slot.1 = value,
            None => {
                row.push((action, value));
                row.sort_by_key(|e| e.0);
            }
        }
    }

    pub fn get(&self, part_key: &str, action: Action) -> Result<f64> {
        self.table
            .get(part_key)
            .and_then(|row| row.iter().find(|(a, _)| *a == action))
            .map(|&(_, v)| v)
            .ok_or_else(|| Error::MissingValue {
                part: part_key.to_string(),
                action: action.to_string(),
            })
    }

    /// Value for `player`, negating when it is the other player.
    pub fn get_for(&self, part_key: &str, action: Action, player: PlayerId) -> Result<f64> {
        let v = self.get(part_key, action)?;
        Ok(if player == self.perspective { v } else { -v })
    }

    pub fn len(&self) -> usize {
        self.table.values().map(|r| r.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, Action, f64)> {
        self.table
            .iter()
            .flat_map(|(k, row)| row.iter().map(move |&(a, v)| (k.as_str(), a, v)))
    }

    /// The same value `c` for every part and action of `hp`.
    pub fn constant(hp: &HPartition, perspective: PlayerId, c: f64) -> Self {
        Self::from_fn(hp, perspective, |_, _| c)
    }

    /// Independent uniform draws in `[-scale, scale]`.
    pub fn random(hp: &HPartition, perspective: PlayerId, scale: f64, rng: &mut impl Rng) -> Self {
        Self::from_fn(hp, perspective, |_, _| scale * (2.0 * rng.random::<f64>() - 1.0))
    }

    pub fn from_fn(hp: &HPartition, perspective: PlayerId, mut f: impl FnMut(&str, Action) -> f64) -> Self {
        let mut vf = ValueFunction::new(hp.pa, perspective);
        for part in &hp.parts {
            let row = part.actions.iter().map(|&a| (a, f(&part.key, a))).collect();
            vf.table.insert(part.key.clone(), row);
        }
        vf
    }

    /// Checks every (part, action) of `hp` has an entry.
    pub fn check_covers(&self, hp: &HPartition) -> Result<()> {
        if hp.pa != self.pa {
            return Err(Error::usage(format!(
                "value function is keyed for P_a={} but P_a={} was requested",
                self.pa, hp.pa
            )));
        }
        for part in &hp.parts {
            for &a in &part.actions {
                self.get(&part.key, a)?;
            }
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("# pa={} perspective={}\n", self.pa, self.perspective);
        for (key, row) in &self.table {
            out.push_str(key);
            for (a, v) in row {
                let _ = write!(out, " {a}:{v:.16e}");
            }
            out.push('\n');
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        let (pa, perspective) = match lines.next() {
            Some((_, header)) => parse_header(header).ok_or_else(|| Error::Parse {
                line: 1,
                msg: "expected `# pa=<spec> perspective=<x|y>` header".into(),
            })?,
            None => {
                return Err(Error::Parse {
                    line: 1,
                    msg: "empty value file".into(),
                })
            }
        };
        let mut vf = ValueFunction::new(pa, perspective);
        for (i, line) in lines {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut fields = line.split_whitespace();
            let key = fields.next().expect("non-empty line");
            for f in fields {
                let (a, v) = parse_pair(f).map_err(|msg| Error::Parse { line: i + 1, msg })?;
                vf.insert(key, a, v);
            }
        }
        Ok(vf)
    }
}

fn parse_header(line: &str) -> Option<(PaSpec, PlayerId)> {
    let rest = line.strip_prefix('#')?.trim();
    let mut pa = None;
    let mut persp = None;
    for field in rest.split_whitespace() {
        match field.split_once('=')? {
            ("pa", v) => pa = v.parse().ok(),
            ("perspective", "x") => persp = Some(PlayerId::X),
            ("perspective", "y") => persp = Some(PlayerId::Y),
            _ => {}
        }
    }
    Some((pa?, persp?))
}

/// Exact value function plus the parts whose values fell back to uniform
/// known-player weights because the profile never reaches them.
#[derive(Debug, Clone)]
pub struct ExactValues {
    pub values: ValueFunction,
    pub zero_reach_parts: Vec<String>,
}

/// For each part H and action a: the expected value of `perspective` after
/// a, averaged over every state the unknown players cannot tell apart from
/// the successor, weighted by the known players' reach (chance included).
pub fn exact_values(
    tree: &GameTree,
    profile: &ResolvedProfile,
    hp: &HPartition,
    perspective: PlayerId,
) -> Result<ExactValues> {
    let pa = hp.pa;
    let ev = tree.expected_values(profile, perspective)?;
    let reach = tree.contributor_reach(profile, true, pa.players_mask())?;
    let uniform = uniform_reach(tree, pa);

    // Accumulate per class of successor states: (weighted value, weight,
    // fallback weighted value, fallback weight).
    let mut classes: HashMap<String, [f64; 4]> = HashMap::new();
    for (id, node) in tree.nodes().iter().enumerate() {
        if node.parent.is_none() {
            continue;
        }
        let e = classes.entry(pa.view_key(&node.state)).or_default();
        e[0] += reach[id] * ev[id];
        e[1] += reach[id];
        e[2] += uniform[id] * ev[id];
        e[3] += uniform[id];
    }

    let mut vf = ValueFunction::new(pa, perspective);
    let mut zero_reach_parts = Vec::new();
    for part in &hp.parts {
        let mut flagged = false;
        for &a in &part.actions {
            let child = part
                .members
                .iter()
                .find_map(|&h| tree.node(h).child_for(a))
                .expect("A(H) is the union of member actions");
            let s = classes[&pa.view_key(&tree.node(child).state)];
            let v = if s[1] > 0.0 {
                s[0] / s[1]
            } else {
                flagged = true;
                s[2] / s[3]
            };
            vf.insert(part.key.clone(), a, v);
        }
        if flagged {
            zero_reach_parts.push(part.key.clone());
        }
    }
    Ok(ExactValues {
        values: vf,
        zero_reach_parts,
    })
}

/// Chance reach times uniform-policy reach of the known players.
fn uniform_reach(tree: &GameTree, pa: PaSpec) -> Vec<f64> {
    let mut out = vec![1.0; tree.len()];
    for (id, node) in tree.nodes().iter().enumerate() {
        for (i, &c) in node.children.iter().enumerate() {
            let p = match node.kind {
                NodeKind::Chance => node.chance_probs[i],
                NodeKind::Decision { player, .. } if pa.contains(player) => 1.0 / node.actions.len() as f64,
                _ => 1.0,
            };
            out[c] = out[id] * p;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::game::{extend_with_seat_chance, BaseGame, GameDescriptor};
    use crate::partitions::build_h_partition;
    use crate::solver::{fixed_agent, AgentKind};
    use crate::strategy::Profile;

    fn uniform_profile(tree: &GameTree, game: BaseGame) -> ResolvedProfile {
        let u = Arc::new(fixed_agent(AgentKind::Uniform, game));
        tree.resolve(&Profile::self_play(u)).unwrap()
    }

    #[test]
    fn kuhn_first_decision_matches_brute_force() {
        let tree = GameTree::build(GameDescriptor::kuhn());
        let profile = uniform_profile(&tree, BaseGame::Kuhn);
        let hp = build_h_partition(&tree, PaSpec::CX);
        let vf = exact_values(&tree, &profile, &hp, PlayerId::X).unwrap().values;
        // hand-rolled Kuhn with both players uniform, from x's first action
        let sd = |win: bool, stake: f64| if win { stake } else { -stake };
        let check = |win: bool| 0.5 * sd(win, 1.0) + 0.5 * (-0.5 + 0.5 * sd(win, 2.0));
        let bet = |win: bool| 0.5 * 1.0 + 0.5 * sd(win, 2.0);
        // y holds the queen: x holds the jack or the king with equal reach
        let q_check = (check(false) + check(true)) / 2.0;
        let q_bet = (bet(false) + bet(true)) / 2.0;
        assert!((vf.get("*|??Qs||", Action::Call).unwrap() - q_check).abs() < 1e-12);
        assert!((vf.get("*|??Qs||", Action::Raise).unwrap() - q_bet).abs() < 1e-12);
        // y holds the jack: x always wins the showdown
        assert!((vf.get("*|??Js||", Action::Call).unwrap() - check(true)).abs() < 1e-12);
        assert!((vf.get("*|??Ks||", Action::Raise).unwrap() - bet(false)).abs() < 1e-12);
    }

    #[test]
    fn full_information_values_are_node_values() {
        let tree = GameTree::build(GameDescriptor::kuhn());
        let profile = uniform_profile(&tree, BaseGame::Kuhn);
        let hp = build_h_partition(&tree, PaSpec::C);
        let vf = exact_values(&tree, &profile, &hp, PlayerId::X).unwrap().values;
        let ev = tree.expected_values(&profile, PlayerId::X).unwrap();
        let root = tree.node(tree.root());
        for (a, &c) in root.actions.iter().zip(&root.children) {
            let key = PaSpec::C.view_key(&root.state);
            assert!((vf.get(&key, *a).unwrap() - ev[c]).abs() < 1e-12);
        }
    }

    #[test]
    fn constant_payoffs_give_constant_values() {
        let tree = GameTree::build(extend_with_seat_chance(GameDescriptor::leduc())).with_utilities(|_| [1.5, -1.5]);
        let u = Arc::new(fixed_agent(AgentKind::CallRaise, BaseGame::Leduc));
        let profile = tree.resolve(&Profile::self_play(u)).unwrap();
        for pa in PaSpec::ALL {
            let hp = build_h_partition(&tree, pa);
            let out = exact_values(&tree, &profile, &hp, PlayerId::X).unwrap();
            assert!(out.values.iter().all(|(_, _, v)| (v - 1.5).abs() < 1e-12));
        }
    }

    #[test]
    fn zero_reach_parts_are_flagged_and_bounded() {
        // call_raise never folds, so lines after x folds are unreachable
        let tree = GameTree::build(extend_with_seat_chance(GameDescriptor::leduc()));
        let cr = Arc::new(fixed_agent(AgentKind::CallRaise, BaseGame::Leduc));
        let profile = tree.resolve(&Profile::self_play(cr)).unwrap();
        let hp = build_h_partition(&tree, PaSpec::CX);
        let out = exact_values(&tree, &profile, &hp, PlayerId::X).unwrap();
        assert!(out.zero_reach_parts.iter().all(|k| !k.ends_with("||")));
        assert!(!out.zero_reach_parts.is_empty());
        out.values.check_covers(&hp).unwrap();
        for (_, _, v) in out.values.iter() {
            assert!(v.abs() <= 13.0);
        }
    }

    #[test]
    fn member_order_does_not_matter() {
        let tree = GameTree::build(extend_with_seat_chance(GameDescriptor::leduc()));
        let profile = uniform_profile(&tree, BaseGame::Leduc);
        let hp = build_h_partition(&tree, PaSpec::CX);
        let mut shuffled = hp.clone();
        for part in &mut shuffled.parts {
            part.members.reverse();
        }
        let a = exact_values(&tree, &profile, &hp, PlayerId::X).unwrap().values;
        let b = exact_values(&tree, &profile, &shuffled, PlayerId::X).unwrap().values;
        assert_eq!(a, b);
    }

    #[test]
    fn text_round_trip_and_errors() {
        let tree = GameTree::build(GameDescriptor::kuhn());
        let hp = build_h_partition(&tree, PaSpec::CXY);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let vf = ValueFunction::random(&hp, PlayerId::X, 2.0, &mut rng);
        let back = ValueFunction::parse(&vf.to_text()).unwrap();
        assert_eq!(back, vf);
        assert!(matches!(vf.get("nope", Action::Call), Err(Error::MissingValue { .. })));
        assert_eq!(
            vf.get_for("*|????||", Action::Call, PlayerId::Y).unwrap(),
            -vf.get("*|????||", Action::Call).unwrap()
        );
        assert!(ValueFunction::parse("*|||| c:1\n").is_err());
    }
}
