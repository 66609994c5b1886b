//! Exact unbiasedness checks by full enumeration: for random strategy
//! profiles and random value functions, the reach-weighted mean of every
//! estimator must equal the game value, and every correction part must
//! have zero mean on its own.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::estimators::{AivatTables, CompensatedSum, IoGrouping, MivatIoTables, MivatTables};
use crate::game::{extend_with_seat_chance, BaseGame, GameDescriptor, GameTree, PlayerId, ResolvedProfile};
use crate::partitions::{build_h_partition, build_w_partition, PaSpec};
use crate::solver::ValueFunction;

#[derive(Debug, Clone, Copy)]
pub struct OracleConfig {
    pub game: BaseGame,
    pub trials: usize,
    pub seed: u64,
    /// Added to every AIVAT estimate; a sensitivity hook for tests.
    pub bias: f64,
    pub estimate_tol: f64,
    pub part_tol: f64,
}

impl OracleConfig {
    pub fn new(game: BaseGame, trials: usize, seed: u64) -> Self {
        OracleConfig {
            game,
            trials,
            seed,
            bias: 0.0,
            estimate_tol: 1e-9,
            part_tol: 1e-10,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleCheck {
    pub trial: usize,
    pub pa: PaSpec,
    /// `aivat`, `mivat`, `mivat_io`, `mivat_io_end`, `base` or `parts`.
    pub name: &'static str,
    pub expected: f64,
    pub observed: f64,
    pub tolerance: f64,
    /// For `parts`: the part with the largest mean.
    pub detail: String,
}

impl OracleCheck {
    pub fn error(&self) -> f64 {
        (self.observed - self.expected).abs()
    }

    pub fn passed(&self) -> bool {
        self.error() <= self.tolerance
    }
}

impl fmt::Display for OracleCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} trial={} pa={} {} expected={:.12} observed={:.12} err={:.3e} tol={:.0e}",
            if self.passed() { "PASS" } else { "FAIL" },
            self.trial,
            self.pa,
            self.name,
            self.expected,
            self.observed,
            self.error(),
            self.tolerance
        )?;
        if !self.detail.is_empty() {
            write!(f, " {}", self.detail)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default)]
pub struct OracleReport {
    pub checks: Vec<OracleCheck>,
}

impl OracleReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed())
    }

    pub fn failures(&self) -> impl Iterator<Item = &OracleCheck> {
        self.checks.iter().filter(|c| !c.passed())
    }

    pub fn max_error(&self, name: &str) -> f64 {
        self.checks
            .iter()
            .filter(|c| c.name == name)
            .map(|c| c.error())
            .fold(0.0, f64::max)
    }
}

/// Random behaviour for both agents; with `sparse`, about a quarter of the
/// actions get probability zero (never all of an information set's).
pub fn random_profile(tree: &GameTree, sparse: bool, rng: &mut impl Rng) -> ResolvedProfile {
    let probs = tree
        .infosets()
        .iter()
        .map(|info| {
            let mut w: Vec<f64> = info.actions.iter().map(|_| rng.random::<f64>() + 1e-3).collect();
            if sparse {
                let keep = rng.random_range(0..w.len());
                for (i, x) in w.iter_mut().enumerate() {
                    if i != keep && rng.random::<f64>() < 0.25 {
                        *x = 0.0;
                    }
                }
            }
            let s: f64 = w.iter().sum();
            Some(w.into_iter().map(|x| x / s).collect())
        })
        .collect();
    ResolvedProfile::from_vectors(probs)
}

pub fn run_oracle(config: &OracleConfig) -> Result<OracleReport> {
    let tree = GameTree::build(extend_with_seat_chance(GameDescriptor {
        base: config.game,
        seat_extended: false,
    }));
    let scale = config.game.max_pot();
    let player = PlayerId::X;
    let mut report = OracleReport::default();
    for trial in 0..config.trials {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        rng.set_stream(trial as u64);
        let profile = random_profile(&tree, trial % 2 == 1, &mut rng);
        let reach = tree.contributor_reach(&profile, true, [true, true])?;
        let reached: Vec<(usize, f64)> = tree
            .terminals()
            .iter()
            .map(|&z| (z, reach[z]))
            .filter(|&(_, p)| p > 0.0)
            .collect();
        let truth = reached
            .iter()
            .map(|&(z, p)| p * tree.node(z).utility[player.index()])
            .collect::<CompensatedSum>()
            .value();

        for pa in PaSpec::ALL {
            let hp = build_h_partition(&tree, pa);
            let wp = build_w_partition(&tree, pa, &hp);
            let values = ValueFunction::random(&hp, player, scale, &mut rng);
            let mivat = MivatTables::build(&tree, &values, player)?;
            let io = MivatIoTables::build(&tree, &profile, &mivat, pa, IoGrouping::PrivateCards)?;
            let io_end = MivatIoTables::build(&tree, &profile, &mivat, pa, IoGrouping::EndingActions)?;
            let aivat = AivatTables::with_partitions(&tree, &profile, &values, hp, wp, player)?;

            let mut sums = [CompensatedSum::default(); 5];
            let mut parts = vec![CompensatedSum::default(); aivat.hp.len()];
            for &(z, p) in &reached {
                let sample = aivat.estimate(&tree, z)?;
                sums[0].add(p * (sample.value + config.bias));
                sums[1].add(p * mivat.value(&tree, z));
                sums[2].add(p * io.estimate(z)?);
                sums[3].add(p * io_end.estimate(z)?);
                sums[4].add(p * sample.base);
                let path = crate::partitions::decompose_path(&tree, &aivat.hp, &aivat.wp, z)?;
                for (step, (_, k)) in path.steps.iter().zip(&sample.terms) {
                    parts[step.part].add(p * k);
                }
            }
            for (name, s) in ["aivat", "mivat", "mivat_io", "mivat_io_end", "base"]
                .into_iter()
                .zip(sums)
            {
                report.checks.push(OracleCheck {
                    trial,
                    pa,
                    name,
                    expected: truth,
                    observed: s.value(),
                    tolerance: config.estimate_tol,
                    detail: String::new(),
                });
            }
            let (worst, mean) = parts
                .iter()
                .enumerate()
                .map(|(i, s)| (i, s.value()))
                .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
                .unwrap_or((0, 0.0));
            report.checks.push(OracleCheck {
                trial,
                pa,
                name: "parts",
                expected: 0.0,
                observed: mean,
                tolerance: config.part_tol,
                detail: format!("worst_part={}", aivat.hp.parts[worst].key),
            });
        }
    }
    Ok(report)
}
