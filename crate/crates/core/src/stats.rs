//! Sample summaries and paired variance-reduction comparisons.

use std::fmt::Write as _;

use crate::error::{Error, Result};

/// Mergeable single-pass accumulator (Welford, with Chan's merge).
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Accumulator {
    n: u64,
    mean: f64,
    m2: f64,
}

impl Accumulator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let delta = x - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn merge(&mut self, other: &Accumulator) {
        if other.n == 0 {
            return;
        }
        if self.n == 0 {
            *self = *other;
            return;
        }
        let n = self.n + other.n;
        let delta = other.mean - self.mean;
        let (na, nb) = (self.n as f64, other.n as f64);
        self.mean += delta * nb / n as f64;
        self.m2 += other.m2 + delta * delta * na * nb / n as f64;
        self.n = n;
    }

    pub fn count(&self) -> u64 {
        self.n
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Sample variance with the n-1 denominator.
    pub fn variance(&self) -> f64 {
        if self.n < 2 {
            f64::NAN
        } else {
            self.m2 / (self.n - 1) as f64
        }
    }

    pub fn summary(&self, label: impl Into<String>) -> Result<SummaryRow> {
        if self.n < 2 {
            return Err(Error::Statistics(format!(
                "need at least 2 samples to summarize, got {}",
                self.n
            )));
        }
        let sd = self.variance().max(0.0).sqrt();
        let stderr = sd / (self.n as f64).sqrt();
        Ok(SummaryRow {
            label: label.into(),
            n: self.n,
            mean: self.mean,
            sd,
            stderr,
            ci_lo: self.mean - 1.96 * stderr,
            ci_hi: self.mean + 1.96 * stderr,
        })
    }
}

impl Extend<f64> for Accumulator {
    fn extend<I: IntoIterator<Item = f64>>(&mut self, iter: I) {
        for x in iter {
            self.push(x);
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub label: String,
    pub n: u64,
    pub mean: f64,
    pub sd: f64,
    pub stderr: f64,
    /// 95% normal-approximation interval.
    pub ci_lo: f64,
    pub ci_hi: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReductionRow {
    pub label: String,
    pub sd_ratio: f64,
    /// Games of the baseline needed to match one game of this estimator.
    pub data_factor: f64,
    pub sd_reduction_percent: f64,
}

pub fn summarize(samples: impl IntoIterator<Item = f64>, label: impl Into<String>) -> Result<SummaryRow> {
    let mut acc = Accumulator::new();
    acc.extend(samples);
    acc.summary(label)
}

/// Reduction of each row's SD against `baseline`. Rows must be paired
/// samples from the same episodes.
pub fn compare(baseline: &SummaryRow, rows: &[SummaryRow]) -> Result<Vec<ReductionRow>> {
    if baseline.sd <= 0.0 {
        return Err(Error::Statistics(format!(
            "baseline `{}` has zero standard deviation",
            baseline.label
        )));
    }
    rows.iter()
        .map(|r| {
            if r.n != baseline.n {
                return Err(Error::Statistics(format!(
                    "`{}` has {} samples but baseline has {}",
                    r.label, r.n, baseline.n
                )));
            }
            let ratio = r.sd / baseline.sd;
            Ok(ReductionRow {
                label: r.label.clone(),
                sd_ratio: ratio,
                data_factor: 1.0 / (ratio * ratio),
                sd_reduction_percent: 100.0 * (1.0 - ratio),
            })
        })
        .collect()
}

pub const CSV_HEADER: &str = "estimator,n,mean,sd,stderr,ci_lo,ci_hi,sd_ratio,data_factor";

pub fn to_csv(rows: &[SummaryRow], reductions: &[ReductionRow]) -> String {
    let mut out = format!("{CSV_HEADER}\n");
    for (r, d) in rows.iter().zip(reductions) {
        let _ = writeln!(
            out,
            "{},{},{:.9},{:.9},{:.9},{:.9},{:.9},{:.9},{:.6}",
            r.label, r.n, r.mean, r.sd, r.stderr, r.ci_lo, r.ci_hi, d.sd_ratio, d.data_factor
        );
    }
    out
}

/// Aligned table: estimator, mean, SD, SD reduction and data factor.
pub fn to_table(rows: &[SummaryRow], reductions: &[ReductionRow]) -> String {
    let width = rows.iter().map(|r| r.label.len()).max().unwrap_or(9).max(9);
    let mut out = format!(
        "{:<width$}  {:>10}  {:>10}  {:>10}  {:>9}  {:>11}\n",
        "estimator", "mean", "sd", "stderr", "sd red.", "data factor"
    );
    for (r, d) in rows.iter().zip(reductions) {
        let _ = writeln!(
            out,
            "{:<width$}  {:>10.5}  {:>10.5}  {:>10.5}  {:>8.1}%  {:>11.2}",
            r.label, r.mean, r.sd, r.stderr, d.sd_reduction_percent, d.data_factor
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    #[test]
    fn hand_computed() {
        let r = summarize([1.0, 2.0, 3.0], "a").unwrap();
        assert_eq!((r.mean, r.sd), (2.0, 1.0));
        assert!((r.stderr - 1.0 / 3f64.sqrt()).abs() < 1e-15);
        assert!((r.ci_hi - r.mean - 1.96 * r.stderr).abs() < 1e-15);
        assert_eq!(summarize([4.0; 10], "c").unwrap().sd, 0.0);
        assert!(summarize([1.0], "short").is_err());
    }

    #[test]
    fn standard_normal_draws() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let n = 1_000_000;
        let r = summarize((0..n).map(|_| StandardNormal.sample(&mut rng)), "z").unwrap();
        assert!(r.mean.abs() < 4.0 / (n as f64).sqrt());
        assert!((r.sd - 1.0).abs() < 0.01);
    }

    #[test]
    fn reductions() {
        let base = SummaryRow {
            label: "chips".into(),
            n: 10,
            mean: 0.0,
            sd: 3.0,
            stderr: 0.0,
            ci_lo: 0.0,
            ci_hi: 0.0,
        };
        let row = SummaryRow {
            label: "aivat".into(),
            sd: 1.0,
            ..base.clone()
        };
        let out = compare(&base, &[base.clone(), row]).unwrap();
        assert_eq!((out[0].sd_ratio, out[0].data_factor), (1.0, 1.0));
        assert!((out[1].sd_ratio - 1.0 / 3.0).abs() < 1e-15);
        assert!((out[1].data_factor - 9.0).abs() < 1e-12);
        // 0.00643 / 3.513 is a 99.8% reduction
        let tiny = SummaryRow {
            sd: 0.00643,
            ..base.clone()
        };
        let big = SummaryRow {
            sd: 3.513,
            ..base.clone()
        };
        let pct = compare(&big, &[tiny]).unwrap()[0].sd_reduction_percent;
        assert!((pct - 99.8).abs() < 0.05);
        let flat = SummaryRow {
            sd: 0.0,
            ..base.clone()
        };
        assert!(compare(&flat, std::slice::from_ref(&base)).is_err());
        let unpaired = SummaryRow { n: 11, ..base.clone() };
        assert!(compare(&base, &[unpaired]).is_err());
    }

    #[test]
    fn csv_and_table_layout() {
        let rows = vec![
            summarize([1.0, 3.0], "chips").unwrap(),
            summarize([1.5, 2.5], "aivat:cx").unwrap(),
        ];
        let red = compare(&rows[0], &rows).unwrap();
        let csv = to_csv(&rows, &red);
        assert!(csv.starts_with(CSV_HEADER));
        assert_eq!(csv.lines().count(), 3);
        assert!(csv.lines().nth(2).unwrap().starts_with("aivat:cx,2,2.0"));
        let table = to_table(&rows, &red);
        assert!(table.contains("50.0%"));
    }

    proptest! {
        #[test]
        fn permutation_invariant(xs in prop::collection::vec(-100.0f64..100.0, 2..200), seed in any::<u64>()) {
            let a = summarize(xs.iter().copied(), "a").unwrap();
            let mut ys = xs.clone();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rand::seq::SliceRandom::shuffle(ys.as_mut_slice(), &mut rng);
            let b = summarize(ys, "b").unwrap();
            prop_assert!((a.mean - b.mean).abs() <= 1e-9 * (1.0 + a.mean.abs()));
            prop_assert!((a.sd - b.sd).abs() <= 1e-9 * (1.0 + a.sd));
        }

        #[test]
        fn merge_matches_concatenation(xs in prop::collection::vec(-100.0f64..100.0, 4..200), cut in 1usize..3) {
            let split = xs.len() * cut / 4;
            let mut left = Accumulator::new();
            left.extend(xs[..split].iter().copied());
            let mut right = Accumulator::new();
            right.extend(xs[split..].iter().copied());
            left.merge(&right);
            let whole = summarize(xs.iter().copied(), "w").unwrap();
            let merged = left.summary("m").unwrap();
            prop_assert_eq!(merged.n, whole.n);
            prop_assert!((merged.mean - whole.mean).abs() <= 1e-12 * (1.0 + whole.mean.abs()));
            prop_assert!((merged.sd - whole.sd).abs() <= 1e-9 * (1.0 + whole.sd));
        }
    }
}
