//! Per-episode value estimators: chip count, MIVAT, MIVAT with imaginary
//! observations, and AIVAT.
//!
//! Each estimator is prepared once for a game tree, the known strategies
//! and a value function, after which evaluating an episode is a replay to
//! its terminal plus table lookups. Prepared estimators are immutable and
//! can be shared between threads.

mod aivat;
mod episode;
mod mivat;
mod mivat_io;

pub use aivat::AivatTables;
pub use episode::Episode;
pub use mivat::MivatTables;
pub use mivat_io::{IoGrouping, MivatIoTables};

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::game::{GameTree, NodeId, PlayerId};
use crate::partitions::PaSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EstimatorKind {
    Chips,
    Mivat,
    MivatIo,
    /// MIVAT+IO that also averages over game-ending alternative actions.
    MivatIoEnd,
    Aivat,
}

/// An estimator name plus the known-player set it uses. The set is
/// ignored by chips and MIVAT.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct EstimatorSpec {
    pub kind: EstimatorKind,
    pub pa: PaSpec,
}

impl EstimatorSpec {
    pub fn new(kind: EstimatorKind, pa: PaSpec) -> Self {
        EstimatorSpec { kind, pa }
    }

    /// Parses `chips`, `mivat`, `mivat_io[:pa]`, `mivat_io_end[:pa]` or
    /// `aivat[:pa]`, with
    /// `default_pa` filling in a missing set.
    pub fn parse(s: &str, default_pa: PaSpec) -> Result<Self> {
        let (name, pa) = match s.split_once(':') {
            Some((n, p)) => (n, p.parse()?),
            None => (s, default_pa),
        };
        let kind = match name {
            "chips" => EstimatorKind::Chips,
            "mivat" => EstimatorKind::Mivat,
            "mivat_io" => EstimatorKind::MivatIo,
            "mivat_io_end" => EstimatorKind::MivatIoEnd,
            "aivat" => EstimatorKind::Aivat,
            _ => return Err(Error::usage(format!("unknown estimator `{name}`"))),
        };
        Ok(EstimatorSpec { kind, pa })
    }

    pub fn parse_list(s: &str, default_pa: PaSpec) -> Result<Vec<Self>> {
        s.split(',')
            .filter(|t| !t.trim().is_empty())
            .map(|t| Self::parse(t.trim(), default_pa))
            .collect()
    }
}

impl fmt::Display for EstimatorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            EstimatorKind::Chips => write!(f, "chips"),
            EstimatorKind::Mivat => write!(f, "mivat"),
            EstimatorKind::MivatIo => write!(f, "mivat_io:{}", self.pa),
            EstimatorKind::MivatIoEnd => write!(f, "mivat_io_end:{}", self.pa),
            EstimatorKind::Aivat => write!(f, "aivat:{}", self.pa),
        }
    }
}

impl FromStr for EstimatorSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        EstimatorSpec::parse(s, PaSpec::CX)
    }
}

/// One estimate with its additive pieces: the base (terminal value or
/// AIVAT base value) and every correction term in history order.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimateSample {
    pub value: f64,
    pub base: f64,
    pub terms: Vec<(String, f64)>,
}

impl EstimateSample {
    pub fn plain(value: f64) -> Self {
        EstimateSample {
            value,
            base: value,
            terms: Vec::new(),
        }
    }
}

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn new(start: f64) -> Self {
        CompensatedSum { sum: start, carry: 0.0 }
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = CompensatedSum::default();
        for x in iter {
            s.add(x);
        }
        s
    }
}

/// Expected value of `values` under `probs` minus the observed entry's
/// value: the zero-mean control variate shared by MIVAT and AIVAT.
pub(crate) fn centred_expectation(probs: &[f64], values: &[f64], observed: usize) -> f64 {
    let u_obs = values[observed];
    probs
        .iter()
        .zip(values)
        .map(|(&p, &u)| p * (u - u_obs))
        .collect::<CompensatedSum>()
        .value()
}

/// Sums a base value and correction terms in order.
pub(crate) fn total(base: f64, terms: impl IntoIterator<Item = f64>) -> f64 {
    let mut s = CompensatedSum::new(base);
    for t in terms {
        s.add(t);
    }
    s.value()
}

pub(crate) fn check_denominator(d: f64, what: impl FnOnce() -> String) -> Result<f64> {
    if d.is_finite() && d >= 1e-300 {
        Ok(d)
    } else {
        Err(Error::corruption(format!("zero reach denominator at {}", what())))
    }
}

/// A prepared estimator for one evaluated player.
#[derive(Debug, Clone)]
pub enum Estimator {
    Chips(PlayerId),
    Mivat(MivatTables),
    MivatIo(MivatIoTables),
    Aivat(AivatTables),
}

impl Estimator {
    pub fn evaluate(&self, tree: &GameTree, z: NodeId) -> Result<EstimateSample> {
        match self {
            Estimator::Chips(p) => Ok(EstimateSample::plain(chips_estimate(tree, z, *p)?)),
            Estimator::Mivat(t) => t.estimate(tree, z),
            Estimator::MivatIo(t) => Ok(EstimateSample::plain(t.estimate(z)?)),
            Estimator::Aivat(t) => t.estimate(tree, z),
        }
    }
}

pub fn chips_estimate(tree: &GameTree, z: NodeId, player: PlayerId) -> Result<f64> {
    let node = tree.node(z);
    if !node.is_terminal() {
        return Err(Error::usage("estimates need a terminal state"));
    }
    Ok(node.utility[player.index()])
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn spec_labels() {
        let s = EstimatorSpec::parse("aivat", PaSpec::CXY).unwrap();
        assert_eq!(s.to_string(), "aivat:cxy");
        let list = EstimatorSpec::parse_list("chips,mivat,mivat_io,aivat:cx", PaSpec::CXY).unwrap();
        assert_eq!(list.len(), 4);
        assert_eq!(list[2].to_string(), "mivat_io:cxy");
        assert!(EstimatorSpec::parse("divat", PaSpec::CX).is_err());
        assert!(EstimatorSpec::parse("aivat:xy", PaSpec::CX).is_err());
    }

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let mut s = CompensatedSum::new(1e16);
        for _ in 0..10 {
            s.add(1.0);
        }
        s.add(-1e16);
        assert_eq!(s.value(), 10.0);
    }

    #[test]
    fn centred_expectation_of_constant_is_zero() {
        assert_eq!(centred_expectation(&[0.2, 0.3, 0.5], &[4.0, 4.0, 4.0], 1), 0.0);
        let k = centred_expectation(&[0.5, 0.5], &[1.0, 3.0], 0);
        assert_eq!(k, 1.0);
    }

    proptest! {
        #[test]
        fn centred_expectation_is_zero_mean(
            raw in prop::collection::vec(0.01f64..1.0, 2..6),
            vals in prop::collection::vec(-10.0f64..10.0, 6),
        ) {
            let s: f64 = raw.iter().sum();
            let probs: Vec<f64> = raw.iter().map(|p| p / s).collect();
            let values = &vals[..probs.len()];
            let mean: f64 = (0..probs.len())
                .map(|o| probs[o] * centred_expectation(&probs, values, o))
                .sum();
            prop_assert!(mean.abs() < 1e-12);
        }
    }
}
