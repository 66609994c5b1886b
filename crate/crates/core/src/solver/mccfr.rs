//! External-sampling Monte Carlo CFR on a base (not seat-extended) game.
//!
//! Each iteration traverses once per player: the traverser's actions are
//! all explored, chance and opponent actions are sampled. Alongside the
//! regrets the solver records the traverser's sampled values after chance
//! and opponent actions, grouped by what the traverser can observe. Those
//! running means estimate the opponent-known values used by the estimators.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::best_response::exploitability;
use super::values::ValueFunction;
use crate::error::Result;
use crate::game::{extend_with_seat_chance, Action, BaseGame, GameDescriptor, GameTree, NodeKind, PlayerId};
use crate::partitions::{build_h_partition, PaSpec};
use crate::strategy::{BehaviorStrategy, Profile};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveReport {
    pub iterations: u64,
    pub exploitability: f64,
    pub seed: u64,
}

#[derive(Debug, Clone)]
pub struct SolveOutput {
    /// Average strategy for both seats.
    pub strategy: BehaviorStrategy,
    /// Sampled values for the seat-extended game, known players chance and x.
    pub values: ValueFunction,
    pub report: SolveReport,
}

struct Tables {
    offsets: Vec<usize>,
    regrets: Vec<f64>,
    strategy_sum: Vec<f64>,
    /// Per node and per hidden seat: observation class of the node.
    class_of: Vec<[u32; 2]>,
    class_sums: Vec<(f64, u64)>,
}

pub struct Mccfr {
    tree: GameTree,
    tables: Tables,
    class_keys: Vec<String>,
    rng: ChaCha8Rng,
    seed: u64,
    iterations: u64,
}

impl Mccfr {
    pub fn new(game: BaseGame, seed: u64) -> Self {
        let tree = GameTree::build(GameDescriptor {
            base: game,
            seat_extended: false,
        });
        let mut offsets = Vec::with_capacity(tree.infosets().len() + 1);
        let mut total = 0;
        for info in tree.infosets() {
            offsets.push(total);
            total += info.actions.len();
        }
        offsets.push(total);

        let mut index: HashMap<String, u32> = HashMap::new();
        let mut class_keys = Vec::new();
        let mut class_of = Vec::with_capacity(tree.len());
        for node in tree.nodes() {
            let mut ids = [0u32; 2];
            for (hidden_seat, id) in ids.iter_mut().enumerate() {
                let mut hidden = [false; 2];
                hidden[hidden_seat] = true;
                let key = format!("{}{}", hidden_seat + 1, &node.state.view_key(hidden)[1..]);
                *id = *index.entry(key.clone()).or_insert_with(|| {
                    class_keys.push(key);
                    (class_keys.len() - 1) as u32
                });
            }
            class_of.push(ids);
        }
        let classes = class_keys.len();
        Mccfr {
            tree,
            tables: Tables {
                offsets,
                regrets: vec![0.0; total],
                strategy_sum: vec![0.0; total],
                class_of,
                class_sums: vec![(0.0, 0); classes],
            },
            class_keys,
            rng: ChaCha8Rng::seed_from_u64(seed),
            seed,
            iterations: 0,
        }
    }

    pub fn tree(&self) -> &GameTree {
        &self.tree
    }

    pub fn iterations(&self) -> u64 {
        self.iterations
    }

    pub fn run(&mut self, iterations: u64) {
        for _ in 0..iterations {
            for traverser in 0..2 {
                traverse(&self.tree, &mut self.tables, &mut self.rng, self.tree.root(), traverser);
            }
            self.iterations += 1;
        }
    }

    /// Normalised strategy sums; uniform where an information set was
    /// never reached by an opponent traversal.
    pub fn average_strategy(&self) -> BehaviorStrategy {
        let mut out = BehaviorStrategy::new();
        for (i, info) in self.tree.infosets().iter().enumerate() {
            let range = self.tables.offsets[i]..self.tables.offsets[i + 1];
            let sums = &self.tables.strategy_sum[range];
            let total: f64 = sums.iter().sum();
            let n = sums.len() as f64;
            let dist = info
                .actions
                .iter()
                .zip(sums)
                .map(|(&a, &s)| (a, if total > 0.0 { s / total } else { 1.0 / n }))
                .collect();
            out.insert(info.key.clone(), dist);
        }
        out
    }

    /// Running mean of the recorded values for one observation class, from
    /// the point of view of the player whose cards were hidden.
    fn class_value(&self, key: &str) -> Option<f64> {
        let i = self.class_keys.iter().position(|k| k == key)?;
        let (sum, n) = self.tables.class_sums[i];
        (n > 0).then(|| -sum / n as f64)
    }

    /// The sampled values re-keyed for the seat-extended game with chance
    /// and x known, from x's perspective. Classes never sampled get 0;
    /// the second field counts them.
    pub fn learned_values(&self) -> (ValueFunction, usize) {
        let ext = GameTree::build(extend_with_seat_chance(self.tree.game()));
        let pa = PaSpec::CX;
        let hp = build_h_partition(&ext, pa);
        let lookup: HashMap<&str, f64> = self
            .class_keys
            .iter()
            .filter_map(|k| self.class_value(k).map(|v| (k.as_str(), v)))
            .collect();
        let mut vf = ValueFunction::new(pa, PlayerId::X);
        let mut missing = 0;
        let mut child_value = |child: usize| -> f64 {
            match lookup.get(pa.view_key(&ext.node(child).state).as_str()) {
                Some(&v) => v,
                None => {
                    missing += 1;
                    0.0
                }
            }
        };
        for part in &hp.parts {
            for &a in &part.actions {
                let child = part
                    .members
                    .iter()
                    .find_map(|&h| ext.node(h).child_for(a))
                    .expect("A(H) is the union of member actions");
                let v = if matches!(a, Action::Seat(_)) {
                    let deal = ext.node(child);
                    deal.children
                        .iter()
                        .zip(&deal.chance_probs)
                        .map(|(&g, &p)| p * child_value(g))
                        .sum()
                } else {
                    child_value(child)
                };
                vf.insert(part.key.clone(), a, v);
            }
        }
        (vf, missing)
    }
}

fn regret_matching(regrets: &[f64], out: &mut [f64]) {
    let pos: f64 = regrets.iter().map(|r| r.max(0.0)).sum();
    if pos > 0.0 {
        for (o, r) in out.iter_mut().zip(regrets) {
            *o = r.max(0.0) / pos;
        }
    } else {
        out.fill(1.0 / regrets.len() as f64);
    }
}

fn sample(probs: &[f64], rng: &mut ChaCha8Rng) -> usize {
    let r: f64 = rng.random();
    let mut acc = 0.0;
    for (i, p) in probs.iter().enumerate() {
        acc += p;
        if r < acc {
            return i;
        }
    }
    probs.len() - 1
}

fn traverse(tree: &GameTree, t: &mut Tables, rng: &mut ChaCha8Rng, id: usize, traverser: usize) -> f64 {
    let node = tree.node(id);
    let watcher = 1 - traverser;
    match node.kind {
        NodeKind::Terminal => node.utility[traverser],
        NodeKind::Chance => {
            let i = sample(&node.chance_probs, rng);
            let child = node.children[i];
            let v = traverse(tree, t, rng, child, traverser);
            record(t, child, watcher, v);
            v
        }
        NodeKind::Decision { player, infoset } => {
            let off = t.offsets[infoset];
            let n = node.actions.len();
            let mut sigma = [0.0; 3];
            regret_matching(&t.regrets[off..off + n], &mut sigma[..n]);
            if player.index() == traverser {
                let mut values = [0.0; 3];
                let mut node_value = 0.0;
                for (i, value) in values[..n].iter_mut().enumerate() {
                    *value = traverse(tree, t, rng, node.children[i], traverser);
                    node_value += sigma[i] * *value;
                }
                for (regret, value) in t.regrets[off..off + n].iter_mut().zip(&values) {
                    *regret += value - node_value;
                }
                node_value
            } else {
                for (total, p) in t.strategy_sum[off..off + n].iter_mut().zip(&sigma) {
                    *total += p;
                }
                let i = sample(&sigma[..n], rng);
                let child = node.children[i];
                let v = traverse(tree, t, rng, child, traverser);
                record(t, child, watcher, v);
                v
            }
        }
    }
}

fn record(t: &mut Tables, child: usize, hidden_seat: usize, value: f64) {
    let c = t.class_of[child][hidden_seat] as usize;
    t.class_sums[c].0 += value;
    t.class_sums[c].1 += 1;
}

/// Trains for `iterations` and measures the average strategy's
/// exploitability exactly.
pub fn mccfr_train(game: BaseGame, iterations: u64, seed: u64) -> Result<SolveOutput> {
    let mut solver = Mccfr::new(game, seed);
    solver.run(iterations);
    let strategy = solver.average_strategy();
    let resolved = solver
        .tree()
        .resolve(&Profile::self_play(std::sync::Arc::new(strategy.clone())))?;
    let exploitability = exploitability(solver.tree(), &resolved)?;
    let (values, _) = solver.learned_values();
    Ok(SolveOutput {
        strategy,
        values,
        report: SolveReport {
            iterations,
            exploitability,
            seed: solver.seed,
        },
    })
}
