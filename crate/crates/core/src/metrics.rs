//! Per-cycle level snapshots and their aggregation across runs.

use std::collections::{BTreeMap, BTreeSet};

use crate::agent::Gender;
use crate::bias::BiasMechanism;
use crate::company::{Company, LEVELS};

/// z for a two-sided 95% normal interval.
pub const Z_95: f64 = 1.96;

#[derive(Debug, Clone, PartialEq)]
pub struct SnapshotRecord {
    pub run_index: u64,
    pub cycle: u32,
    pub level: usize,
    pub n_agents: usize,
    pub n_men: usize,
    pub n_women: usize,
    pub pct_male: f64,
    /// Mean successes minus failures; `None` when the level has no men.
    pub mean_net_success_men: Option<f64>,
    pub mean_net_success_women: Option<f64>,
    /// Mean cumulative bias events per woman, by mechanism; `None` when the
    /// level has no women.
    pub mean_bias_count_women: Option<[f64; BiasMechanism::COUNT]>,
}

impl SnapshotRecord {
    pub fn mean_net_success(&self, gender: Gender) -> Option<f64> {
        match gender {
            Gender::Man => self.mean_net_success_men,
            Gender::Woman => self.mean_net_success_women,
        }
    }

    pub fn mean_bias_count(&self, mechanism: BiasMechanism) -> Option<f64> {
        self.mean_bias_count_women.map(|m| m[mechanism.index()])
    }
}

/// One record per level, taken right after a promotion cycle.
pub fn snapshot(company: &Company, cycle: u32, run_index: u64) -> Vec<SnapshotRecord> {
    (1..=LEVELS)
        .map(|level| {
            let roster = company.level(level);
            let mut n_men = 0usize;
            let mut net = [0i64; 2];
            let mut bias = [0u64; BiasMechanism::COUNT];
            for a in roster {
                match a.gender {
                    Gender::Man => {
                        n_men += 1;
                        net[0] += a.net_success();
                    }
                    Gender::Woman => {
                        net[1] += a.net_success();
                        for m in BiasMechanism::ALL {
                            bias[m.index()] += u64::from(a.bias_events().get(m));
                        }
                    }
                }
            }
            let n_agents = roster.len();
            let n_women = n_agents - n_men;
            let mean = |total: f64, n: usize| (n > 0).then(|| total / n as f64);
            SnapshotRecord {
                run_index,
                cycle,
                level,
                n_agents,
                n_men,
                n_women,
                pct_male: if n_agents == 0 { 0.0 } else { n_men as f64 / n_agents as f64 },
                mean_net_success_men: mean(net[0] as f64, n_men),
                mean_net_success_women: mean(net[1] as f64, n_women),
                mean_bias_count_women: (n_women > 0).then(|| bias.map(|b| b as f64 / n_women as f64)),
            }
        })
        .collect()
}

/// Mean with a normal-approximation 95% interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summary {
    pub mean: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub n: usize,
}

/// Summarizes `values`; the interval is `mean ± 1.96 s / sqrt(n)` with `s` the
/// sample standard deviation, and collapses to the mean when `n == 1`.
/// The result does not depend on the order of `values`.
pub fn summarize(values: &[f64]) -> Option<Summary> {
    if values.is_empty() {
        return None;
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let mean = sorted.iter().sum::<f64>() / n as f64;
    let half = if n < 2 {
        0.0
    } else {
        let ss: f64 = sorted.iter().map(|v| (v - mean).powi(2)).sum();
        let sd = (ss / (n - 1) as f64).sqrt();
        Z_95 * sd / (n as f64).sqrt()
    };
    Some(Summary {
        mean,
        ci_low: mean - half,
        ci_high: mean + half,
        n,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Facet {
    None,
    Gender(Gender),
    Mechanism(BiasMechanism),
}

#[derive(Debug, Clone, PartialEq)]
pub struct AggregateRecord {
    pub cycle: u32,
    pub level: usize,
    pub facet: Facet,
    pub metric: &'static str,
    pub mean: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub n_runs: usize,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Aggregates {
    pub composition: Vec<AggregateRecord>,
    pub performance: Vec<AggregateRecord>,
    pub bias_counts: Vec<AggregateRecord>,
    pub warnings: Vec<String>,
}

pub const METRIC_PCT_MALE: &str = "pct_male";
pub const METRIC_NET_SUCCESS: &str = "mean_net_success";
pub const METRIC_BIAS_COUNT: &str = "mean_count_per_woman";

impl Aggregates {
    fn find(records: &[AggregateRecord], cycle: u32, level: usize, facet: Facet) -> Option<&AggregateRecord> {
        records
            .iter()
            .find(|r| r.cycle == cycle && r.level == level && r.facet == facet)
    }

    pub fn pct_male(&self, cycle: u32, level: usize) -> Option<&AggregateRecord> {
        Self::find(&self.composition, cycle, level, Facet::None)
    }

    pub fn net_success(&self, cycle: u32, level: usize, gender: Gender) -> Option<&AggregateRecord> {
        Self::find(&self.performance, cycle, level, Facet::Gender(gender))
    }

    pub fn bias_count(&self, cycle: u32, level: usize, mechanism: BiasMechanism) -> Option<&AggregateRecord> {
        Self::find(&self.bias_counts, cycle, level, Facet::Mechanism(mechanism))
    }

    pub fn last_cycle(&self) -> Option<u32> {
        self.composition.iter().map(|r| r.cycle).max()
    }
}

type Groups = BTreeMap<(u32, usize, Facet), Vec<f64>>;

fn collect(groups: Groups, metric: &'static str) -> Vec<AggregateRecord> {
    groups
        .into_iter()
        .filter_map(|((cycle, level, facet), values)| {
            summarize(&values).map(|s| AggregateRecord {
                cycle,
                level,
                facet,
                metric,
                mean: s.mean,
                ci_low: s.ci_low,
                ci_high: s.ci_high,
                n_runs: s.n,
            })
        })
        .collect()
}

/// Aggregates snapshots from any number of runs, grouped by cycle and level.
/// Missing women-only or men-only values are skipped, so `n_runs` may be
/// smaller than the number of runs for those records.
pub fn aggregate(snapshots: &[SnapshotRecord]) -> Aggregates {
    let mut composition = Groups::new();
    let mut performance = Groups::new();
    let mut bias_counts = Groups::new();
    let runs: BTreeSet<u64> = snapshots.iter().map(|s| s.run_index).collect();

    for s in snapshots {
        composition
            .entry((s.cycle, s.level, Facet::None))
            .or_default()
            .push(s.pct_male);
        for g in Gender::ALL {
            if let Some(v) = s.mean_net_success(g) {
                performance.entry((s.cycle, s.level, Facet::Gender(g))).or_default().push(v);
            }
        }
        for m in BiasMechanism::ALL {
            if let Some(v) = s.mean_bias_count(m) {
                bias_counts.entry((s.cycle, s.level, Facet::Mechanism(m))).or_default().push(v);
            }
        }
    }

    let mut warnings = Vec::new();
    if runs.len() == 1 {
        let msg = "aggregating a single run: confidence intervals are degenerate".to_string();
        log::warn!("{msg}");
        warnings.push(msg);
    }

    Aggregates {
        composition: collect(composition, METRIC_PCT_MALE),
        performance: collect(performance, METRIC_NET_SUCCESS),
        bias_counts: collect(bias_counts, METRIC_BIAS_COUNT),
        warnings,
    }
}
