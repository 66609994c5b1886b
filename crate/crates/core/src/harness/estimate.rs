use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::estimators::{
    AivatTables, Episode, EstimateSample, Estimator, EstimatorKind, EstimatorSpec, IoGrouping, MivatIoTables,
    MivatTables,
};
use crate::game::{GameTree, PlayerId};
use crate::partitions::{build_h_partition, PaSpec};
use crate::solver::{exact_values, ValueFunction};
use crate::stats::{compare, Accumulator, ReductionRow, SummaryRow};
use crate::strategy::{BehaviorStrategy, Profile};

/// Keying of the exact values MIVAT uses when no value file is given.
pub const MIVAT_VALUE_PA: PaSpec = PaSpec::CX;

#[derive(Debug, Clone)]
pub enum ValueSource {
    /// Exact values of agent `x`'s strategy in self-play.
    Exact,
    File(ValueFunction),
}

/// Prepared estimators, all evaluating agent `x`.
#[derive(Debug, Clone)]
pub struct EstimationPlan {
    pub specs: Vec<EstimatorSpec>,
    pub estimators: Vec<Estimator>,
    /// Value-function parts that fell back to uniform weights.
    pub zero_reach_parts: usize,
}

impl EstimationPlan {
    pub fn build(
        tree: &GameTree,
        x: Arc<BehaviorStrategy>,
        y: Option<Arc<BehaviorStrategy>>,
        specs: &[EstimatorSpec],
        source: &ValueSource,
    ) -> Result<Self> {
        let player = PlayerId::X;
        let mut cache: HashMap<PaSpec, ValueFunction> = HashMap::new();
        let mut zero_reach_parts = 0;
        let mut values_for = |pa: PaSpec, any_keying: bool| -> Result<ValueFunction> {
            if let ValueSource::File(vf) = source {
                if any_keying || vf.pa == pa {
                    return Ok(vf.clone());
                }
                return Err(Error::usage(format!(
                    "value file is keyed for P_a={} but P_a={pa} was requested",
                    vf.pa
                )));
            }
            if let Some(vf) = cache.get(&pa) {
                return Ok(vf.clone());
            }
            let self_play = tree.resolve(&Profile::self_play(x.clone()))?;
            let hp = build_h_partition(tree, pa);
            let out = exact_values(tree, &self_play, &hp, player)?;
            zero_reach_parts += out.zero_reach_parts.len();
            cache.insert(pa, out.values.clone());
            Ok(out.values)
        };
        let known = |pa: PaSpec| -> Result<_> {
            let y = if pa.contains(PlayerId::Y) {
                Some(
                    y.clone()
                        .ok_or_else(|| Error::usage(format!("P_a={pa} needs a strategy for y")))?,
                )
            } else {
                None
            };
            tree.resolve(&Profile::new(Some(x.clone()), y))
        };

        let mut estimators = Vec::with_capacity(specs.len());
        for spec in specs {
            let e = match spec.kind {
                EstimatorKind::Chips => Estimator::Chips(player),
                EstimatorKind::Mivat => {
                    let vf = values_for(MIVAT_VALUE_PA, true)?;
                    Estimator::Mivat(MivatTables::build(tree, &vf, player)?)
                }
                EstimatorKind::MivatIo | EstimatorKind::MivatIoEnd => {
                    let vf = values_for(MIVAT_VALUE_PA, true)?;
                    let mivat = MivatTables::build(tree, &vf, player)?;
                    let grouping = if spec.kind == EstimatorKind::MivatIo {
                        IoGrouping::PrivateCards
                    } else {
                        IoGrouping::EndingActions
                    };
                    let io = MivatIoTables::build(tree, &known(spec.pa)?, &mivat, spec.pa, grouping)?;
                    Estimator::MivatIo(io)
                }
                EstimatorKind::Aivat => {
                    let vf = values_for(spec.pa, false)?;
                    Estimator::Aivat(AivatTables::build(tree, &known(spec.pa)?, &vf, spec.pa, player)?)
                }
            };
            estimators.push(e);
        }
        Ok(EstimationPlan {
            specs: specs.to_vec(),
            estimators,
            zero_reach_parts,
        })
    }

    pub fn labels(&self) -> Vec<String> {
        self.specs.iter().map(|s| s.to_string()).collect()
    }
}

#[derive(Debug, Clone)]
pub struct EstimationResult {
    pub labels: Vec<String>,
    /// `samples[e][i]`: estimator `e` on episode `i`.
    pub samples: Vec<Vec<EstimateSample>>,
    pub rows: Vec<SummaryRow>,
    /// Against the chip count when present, else the first estimator.
    pub reductions: Vec<ReductionRow>,
}

impl EstimationResult {
    pub fn values(&self, label: &str) -> Option<Vec<f64>> {
        let e = self.labels.iter().position(|l| l == label)?;
        Some(self.samples[e].iter().map(|s| s.value).collect())
    }

    pub fn row(&self, label: &str) -> Option<&SummaryRow> {
        self.rows.iter().find(|r| r.label == label)
    }
}

/// Replays every episode and evaluates every estimator on it.
pub fn estimate_log(tree: &GameTree, episodes: &[Episode], plan: &EstimationPlan) -> Result<EstimationResult> {
    let per_episode = episodes
        .par_iter()
        .map(|ep| {
            let z = ep.terminal(tree)?;
            plan.estimators
                .iter()
                .map(|e| {
                    e.evaluate(tree, z)
                        .map_err(|err| Error::corruption(format!("episode {}: {err}", ep.id)))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;

    let labels = plan.labels();
    let mut samples: Vec<Vec<EstimateSample>> = vec![Vec::with_capacity(episodes.len()); labels.len()];
    for row in per_episode {
        for (e, s) in row.into_iter().enumerate() {
            samples[e].push(s);
        }
    }
    let rows = labels
        .iter()
        .zip(&samples)
        .map(|(label, ss)| {
            let mut acc = Accumulator::new();
            acc.extend(ss.iter().map(|s| s.value));
            acc.summary(label.clone())
        })
        .collect::<Result<Vec<_>>>()?;
    let baseline = rows
        .iter()
        .find(|r| r.label == "chips")
        .or(rows.first())
        .ok_or_else(|| Error::usage("no estimators requested"))?;
    let reductions = compare(baseline, &rows)?;
    Ok(EstimationResult {
        labels,
        samples,
        rows,
        reductions,
    })
}

/// `<episode_id> <estimator> <value>` lines, episode-major.
pub fn samples_to_text(episodes: &[Episode], result: &EstimationResult) -> String {
    let mut out = String::new();
    for (i, ep) in episodes.iter().enumerate() {
        for (label, ss) in result.labels.iter().zip(&result.samples) {
            let _ = writeln!(out, "{} {} {:.11e}", ep.id, label, ss[i].value);
        }
    }
    out
}

/// Base value and every correction term per episode and estimator.
pub fn decomposition_text(episodes: &[Episode], result: &EstimationResult) -> String {
    let mut out = String::new();
    for (i, ep) in episodes.iter().enumerate() {
        for (label, ss) in result.labels.iter().zip(&result.samples) {
            let s = &ss[i];
            let _ = write!(out, "{} {} base:{:.11e}", ep.id, label, s.base);
            for (key, k) in &s.terms {
                let _ = write!(out, " {key}:{k:.11e}");
            }
            out.push('\n');
        }
    }
    out
}

/// Parses a samples file into per-estimator value lists in first-seen order.
pub fn read_samples(text: &str) -> Result<Vec<(String, Vec<f64>)>> {
    let mut out: Vec<(String, Vec<f64>)> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let err = |msg: &str| Error::Parse {
            line: i + 1,
            msg: msg.to_string(),
        };
        let [id, label, value] = fields[..] else {
            return Err(err("expected `<episode_id> <estimator> <value>`"));
        };
        id.parse::<u64>().map_err(|_| err("bad episode id"))?;
        let v: f64 = value.parse().map_err(|_| err("bad value"))?;
        match out.iter_mut().find(|(l, _)| l == label) {
            Some((_, vs)) => vs.push(v),
            None => out.push((label.to_string(), vec![v])),
        }
    }
    Ok(out)
}
