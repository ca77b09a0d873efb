//! CSV and JSON outputs.
//!
//! Long-format CSV, UTF-8, LF line endings, a header row, and reals written
//! with six significant digits. Missing values (for example women-only
//! metrics on a level without women) are empty fields.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::bias::BiasMechanism;
use crate::error::{Error, Result};
use crate::harness::{Replications, SweepCell};
use crate::metrics::{AggregateRecord, Facet};
use crate::agent::Gender;

pub const COMPOSITION_CSV: &str = "composition.csv";
pub const PERFORMANCE_CSV: &str = "performance.csv";
pub const BIAS_COUNTS_CSV: &str = "bias_counts.csv";
pub const AGGREGATE_COMPOSITION_CSV: &str = "aggregate_composition.csv";
pub const AGGREGATE_PERFORMANCE_CSV: &str = "aggregate_performance.csv";
pub const AGGREGATE_BIAS_COUNTS_CSV: &str = "aggregate_bias_counts.csv";
pub const RESOLVED_CONFIG_JSON: &str = "resolved_config.json";
pub const MANIFEST_JSON: &str = "manifest.json";

/// Formats a real with six significant digits, like C's `%g`.
pub fn format_real(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific format has an exponent");
    let exp: i32 = exp.parse().expect("exponent is an integer");
    if (-4..6).contains(&exp) {
        let decimals = (5 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    } else {
        format!("{}e{exp}", trim_zeros(mantissa))
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(format_real).unwrap_or_default()
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<PathBuf> {
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|e| Error::io(&path, e))?;
    Ok(path)
}

fn facet_name(facet: Facet) -> &'static str {
    match facet {
        Facet::None => "",
        Facet::Gender(g) => g.name(),
        Facet::Mechanism(m) => m.name(),
    }
}

fn aggregate_csv(scenario_id: &str, facet_column: Option<&str>, records: &[AggregateRecord]) -> String {
    let mut out = String::from("scenario_id,cycle,level,");
    if let Some(col) = facet_column {
        out.push_str(col);
        out.push(',');
    }
    out.push_str("metric,mean,ci_low,ci_high,n_runs\n");
    for r in records {
        let _ = write!(out, "{scenario_id},{},{},", r.cycle, r.level);
        if facet_column.is_some() {
            let _ = write!(out, "{},", facet_name(r.facet));
        }
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            r.metric,
            format_real(r.mean),
            format_real(r.ci_low),
            format_real(r.ci_high),
            r.n_runs
        );
    }
    out
}

#[derive(Debug, Serialize)]
struct RunManifest<'a> {
    scenario_id: &'a str,
    n_runs: u32,
    master_seed: u64,
    n_cycles: u32,
    files: Vec<&'static str>,
    warnings: &'a [String],
}

/// Writes the per-run and aggregate CSVs, the resolved configuration and a
/// manifest into `out_dir`, creating it if needed.
pub fn write_outputs(out_dir: &Path, scenario_id: &str, reps: &Replications) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let mut written = Vec::new();

    let mut composition = String::from("scenario_id,run,cycle,level,n_agents,n_men,n_women,pct_male\n");
    let mut performance = String::from("scenario_id,run,cycle,level,gender,mean_net_success\n");
    let mut bias = String::from("scenario_id,run,cycle,level,mechanism,mean_count_per_woman\n");
    for s in &reps.snapshots {
        let _ = writeln!(
            composition,
            "{scenario_id},{},{},{},{},{},{},{}",
            s.run_index,
            s.cycle,
            s.level,
            s.n_agents,
            s.n_men,
            s.n_women,
            format_real(s.pct_male)
        );
        for g in Gender::ALL {
            let _ = writeln!(
                performance,
                "{scenario_id},{},{},{},{},{}",
                s.run_index,
                s.cycle,
                s.level,
                g.name(),
                opt(s.mean_net_success(g))
            );
        }
        for m in BiasMechanism::ALL {
            let _ = writeln!(
                bias,
                "{scenario_id},{},{},{},{},{}",
                s.run_index,
                s.cycle,
                s.level,
                m.name(),
                opt(s.mean_bias_count(m))
            );
        }
    }
    written.push(write_file(out_dir, COMPOSITION_CSV, &composition)?);
    written.push(write_file(out_dir, PERFORMANCE_CSV, &performance)?);
    written.push(write_file(out_dir, BIAS_COUNTS_CSV, &bias)?);

    let agg = &reps.aggregates;
    written.push(write_file(out_dir, AGGREGATE_COMPOSITION_CSV, &aggregate_csv(scenario_id, None, &agg.composition))?);
    written.push(write_file(
        out_dir,
        AGGREGATE_PERFORMANCE_CSV,
        &aggregate_csv(scenario_id, Some("gender"), &agg.performance),
    )?);
    written.push(write_file(
        out_dir,
        AGGREGATE_BIAS_COUNTS_CSV,
        &aggregate_csv(scenario_id, Some("mechanism"), &agg.bias_counts),
    )?);

    written.push(write_file(out_dir, RESOLVED_CONFIG_JSON, &reps.config.to_json_string())?);

    let manifest = RunManifest {
        scenario_id,
        n_runs: reps.n_runs,
        master_seed: reps.master_seed,
        n_cycles: reps.config.n_sim / reps.config.n_promotion,
        files: vec![
            COMPOSITION_CSV,
            PERFORMANCE_CSV,
            BIAS_COUNTS_CSV,
            AGGREGATE_COMPOSITION_CSV,
            AGGREGATE_PERFORMANCE_CSV,
            AGGREGATE_BIAS_COUNTS_CSV,
            RESOLVED_CONFIG_JSON,
        ],
        warnings: &agg.warnings,
    };
    let mut text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    text.push('\n');
    written.push(write_file(out_dir, MANIFEST_JSON, &text)?);
    Ok(written)
}

#[derive(Debug, Serialize)]
struct SweepEntry {
    value: String,
    scenario_id: String,
    dir: String,
}

#[derive(Debug, Serialize)]
struct SweepManifest<'a> {
    base: &'a str,
    param: &'a str,
    n_runs: u32,
    master_seed: u64,
    cells: Vec<SweepEntry>,
}

/// Scenario id for one sweep cell.
pub fn sweep_scenario_id(base_id: &str, cell: &SweepCell) -> String {
    format!("{base_id}@{}", cell.label())
}

/// Lists the cells of a sweep in `out_dir/manifest.json`. Each cell's files
/// live in `out_dir/<key>=<value>/`.
pub fn write_sweep_manifest(out_dir: &Path, base_id: &str, cells: &[SweepCell], n_runs: u32, master_seed: u64) -> Result<PathBuf> {
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let manifest = SweepManifest {
        base: base_id,
        param: cells.first().map_or("", |c| c.key.as_str()),
        n_runs,
        master_seed,
        cells: cells
            .iter()
            .map(|c| SweepEntry {
                value: c.value.clone(),
                scenario_id: sweep_scenario_id(base_id, c),
                dir: c.label(),
            })
            .collect(),
    };
    let mut text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    text.push('\n');
    write_file(out_dir, MANIFEST_JSON, &text)
}
