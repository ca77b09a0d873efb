//! Acceptance gate: one PASS/FAIL line per criterion, non-zero exit if any fails.
//!
//! Runs at full scale (100 replications per scenario), so expect a minute or
//! two on a single core.

use std::fs;
use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::Instant;

use rand::rngs::StdRng;
use rand::SeedableRng;
use rand_distr::{Distribution, Normal};

use ladder_core::bias::{apply_project_outcome, r2_to_d, BiasMechanism};
use ladder_core::{
    default_parallelism, presets, run_replications, run_simulation_observed, sweep, Gender, InvariantChecker,
    ProjectKind, Replications, ScenarioConfig, LEVELS,
};

const RUNS: u32 = 100;
const SEED: u64 = 42;
const CYCLE: u32 = 20;

struct Gate {
    failed: Vec<u32>,
}

impl Gate {
    fn record(&mut self, id: u32, name: &str, pass: bool, detail: String) {
        let tag = if pass { "PASS" } else { "FAIL" };
        println!("[{tag}] {id:>2} {name}: {detail}");
        if !pass {
            self.failed.push(id);
        }
    }
}

fn replicate(preset: &str) -> Replications {
    replicate_config(&presets::resolve(preset).expect("built-in preset"))
}

fn replicate_config(cfg: &ScenarioConfig) -> Replications {
    run_replications(cfg, RUNS, SEED, default_parallelism()).expect("replications complete")
}

fn pct(r: &Replications, cycle: u32, level: usize) -> f64 {
    r.aggregates.pct_male(cycle, level).expect("composition record").mean
}

/// OLS of credit on a woman indicator over successful individual projects.
fn effect_size(gate: &mut Gate) {
    let start = Instant::now();
    let gap = r2_to_d(0.022).expect("valid r2");
    let mut rng = StdRng::seed_from_u64(SEED);
    let credit = Normal::new(10.0, 1.0).expect("valid normal");
    let n = 100_000;
    let (mut x, mut y) = (Vec::with_capacity(n), Vec::with_capacity(n));
    for i in 0..n {
        let gender = if i % 2 == 0 { Gender::Man } else { Gender::Woman };
        let c = credit.sample(&mut rng);
        let out = apply_project_outcome(ProjectKind::Individual, gender, None, c, true, gap);
        x.push(if gender == Gender::Woman { 1.0 } else { 0.0 });
        y.push(out.delta);
    }
    let nf = n as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    let sxy: f64 = x.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    let r2 = sxy * sxy / (sxx * syy);
    // The slope is the women-minus-men mean difference.
    let gap_pct = -(sxy / sxx) / 10.0 * 100.0;
    let secs = start.elapsed().as_secs_f64();
    let pass = (r2 - 0.022).abs() <= 0.005 && (gap_pct - 3.0).abs() <= 0.3 && secs < 5.0;
    gate.record(
        1,
        "effect size",
        pass,
        format!("r2 = {r2:.4} (0.022 ± 0.005), gap = {gap_pct:.3}% (3 ± 0.3), {secs:.2}s (< 5)"),
    );
}

fn unbiased_parity(gate: &mut Gate, r: &Replications) {
    let worst = r
        .aggregates
        .composition
        .iter()
        .max_by(|a, b| (a.mean - 0.5).abs().total_cmp(&(b.mean - 0.5).abs()))
        .expect("records");
    // Absolute slack only absorbs summation rounding at the band edges.
    let pass = r.aggregates.composition.iter().all(|a| (a.mean - 0.5).abs() <= 0.03 + 1e-12);
    gate.record(
        2,
        "unbiased parity",
        pass,
        format!("furthest from 0.5: {:.4} at cycle {} level {} (within [0.47, 0.53])", worst.mean, worst.cycle, worst.level),
    );
}

fn glass_ceiling(gate: &mut Gate, r: &Replications) {
    let (l1, l2, l5, l8) = (pct(r, CYCLE, 1), pct(r, CYCLE, 2), pct(r, CYCLE, 5), pct(r, CYCLE, 8));
    let pass = l8 - l1 >= 0.15 && l8 > 0.55 && l1 < 0.50 && l8 > l5 && l5 > l2;
    gate.record(
        3,
        "glass ceiling",
        pass,
        format!("level 1 = {l1:.3}, 2 = {l2:.3}, 5 = {l5:.3}, 8 = {l8:.3}, 8 minus 1 = {:.1}pp", (l8 - l1) * 100.0),
    );
}

fn frequency_over_magnitude(gate: &mut Gate, r: &Replications) {
    let count = |level, m| r.aggregates.bias_count(CYCLE, level, m).map(|a| a.mean);
    let mut failures = Vec::new();
    for level in 1..=LEVELS {
        let stretch = count(level, BiasMechanism::PenaltyStretchProject);
        let ind = count(level, BiasMechanism::RewardIndividualSuccess);
        let grp = count(level, BiasMechanism::RewardGroupSuccess);
        match (stretch, ind, grp) {
            (Some(s), Some(i), Some(g)) if i > s && g > s => {}
            _ => failures.push(level),
        }
    }
    let top = |m| count(LEVELS, m).unwrap_or(f64::NAN);
    gate.record(
        4,
        "frequency over magnitude",
        failures.is_empty(),
        format!(
            "level 8: individual success {:.2}, group success {:.2}, stretch {:.2}; failing levels {failures:?}",
            top(BiasMechanism::RewardIndividualSuccess),
            top(BiasMechanism::RewardGroupSuccess),
            top(BiasMechanism::PenaltyStretchProject),
        ),
    );
}

fn success_differential(gate: &mut Gate, biased: &Replications, unbiased: &Replications) {
    let interval = |r: &Replications, level, g| {
        r.aggregates
            .net_success(CYCLE, level, g)
            .map(|a| (a.mean, a.ci_low, a.ci_high))
    };
    let mut detail = Vec::new();
    let mut pass = true;
    for level in 6..=LEVELS {
        match (interval(biased, level, Gender::Woman), interval(biased, level, Gender::Man)) {
            (Some(w), Some(m)) => {
                pass &= w.0 > m.0 && w.1 > m.2;
                detail.push(format!("L{level} women {:.2} [{:.2}, {:.2}] men {:.2} [{:.2}, {:.2}]", w.0, w.1, w.2, m.0, m.1, m.2));
            }
            _ => {
                pass = false;
                detail.push(format!("L{level} missing a group"));
            }
        }
    }
    let separated: Vec<usize> = (1..=LEVELS)
        .filter(|&level| match (interval(unbiased, level, Gender::Woman), interval(unbiased, level, Gender::Man)) {
            (Some(w), Some(m)) => w.1 > m.2 || m.1 > w.2,
            _ => true,
        })
        .collect();
    pass &= separated.is_empty();
    gate.record(
        5,
        "success differential",
        pass,
        format!("{}; unbiased levels with separated intervals: {separated:?}", detail.join("; ")),
    );
}

fn norms_sweep(gate: &mut Gate) {
    let base = presets::resolve("norms").expect("preset");
    let values: Vec<String> = ["0", "0.2", "0.4", "0.6", "0.8", "1"].iter().map(|s| s.to_string()).collect();
    let cells = sweep(&base, "norms.w", &values, RUNS, SEED, default_parallelism()).expect("sweep completes");
    let macro_only = &cells[0].1;
    let meso_only = &cells[values.len() - 1].1;
    let at_20 = pct(macro_only, CYCLE, LEVELS);
    let peak = (1..=CYCLE).map(|c| pct(meso_only, c, LEVELS)).fold(f64::MIN, f64::max);
    let pass = at_20 > 0.5 && peak < 0.5;
    gate.record(
        6,
        "norms",
        pass,
        format!("w = 0: level 8 at cycle {CYCLE} = {at_20:.3} (> 0.5); w = 1: level 8 peak = {peak:.3} (< 0.5)"),
    );
}

fn intervention(gate: &mut Gate) {
    let mut pass = true;
    let mut detail = Vec::new();
    for cycles in [3, 6, 9] {
        let r = replicate(&format!("intervention-no-macro-{cycles}cycles"));
        let last = r.aggregates.last_cycle().expect("cycles");
        let max = (2..=LEVELS).map(|l| pct(&r, last, l)).fold(f64::MIN, f64::max);
        pass &= max <= 0.40;
        detail.push(format!("w=1/{cycles}: max L2-8 {max:.3} (<= 0.40)"));
    }
    for cycles in [3, 6, 9] {
        let r = replicate(&format!("intervention-moderate-macro-{cycles}cycles"));
        let last = r.aggregates.last_cycle().expect("cycles");
        let top = pct(&r, last, LEVELS);
        pass &= top >= 0.50;
        detail.push(format!("w=0.4/{cycles}: L8 {top:.3} (>= 0.50)"));
    }
    gate.record(7, "intervention persistence", pass, detail.join(", "));
}

fn structural_invariants(gate: &mut Gate) {
    let cfg = presets::resolve("all-biases").expect("preset");
    let cycles = cfg.n_sim / cfg.n_promotion;
    let mut violations = 0;
    let mut bad_snapshots = 0;
    for run in 0..u64::from(RUNS) {
        let mut checker = InvariantChecker::new();
        let r = run_simulation_observed(&cfg, SEED, run, &mut checker).expect("run completes");
        violations += checker.violations.total();
        if checker.cycles_seen != cycles || r.snapshots.len() != cycles as usize * LEVELS {
            bad_snapshots += 1;
        }
    }
    gate.record(
        8,
        "structural invariants",
        violations == 0 && bad_snapshots == 0,
        format!("{violations} invariant violations, {bad_snapshots} runs with wrong snapshot counts over {RUNS} runs"),
    );
}

fn csv_bytes(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = fs::read_dir(dir)
        .expect("output dir")
        .map(|e| e.expect("entry").path())
        .filter(|p| p.extension().is_some_and(|e| e == "csv"))
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).expect("read csv")))
        .collect();
    files.sort();
    files
}

fn determinism(gate: &mut Gate) {
    let tmp = tempfile::tempdir().expect("tempdir");
    let mut outputs = Vec::new();
    for (i, threads) in [1, 1, 8, 8].into_iter().enumerate() {
        let out = tmp.path().join(format!("run{i}"));
        let status = Command::new(env!("CARGO_BIN_EXE_ladder"))
            .args(["run", "--preset", "all-biases", "--runs", "100", "--seed", "42", "--parallelism"])
            .arg(threads.to_string())
            .arg("--out")
            .arg(&out)
            .output()
            .expect("spawn ladder");
        assert!(status.status.success(), "ladder failed: {}", String::from_utf8_lossy(&status.stderr));
        outputs.push(csv_bytes(&out));
    }
    let n_files = outputs[0].len();
    let identical = n_files == 6 && outputs.iter().all(|o| *o == outputs[0]);
    gate.record(
        9,
        "determinism",
        identical,
        format!("{n_files} CSV files, 4 invocations (parallelism 1, 1, 8, 8) byte-identical: {identical}"),
    );
}

fn constant_norms_equivalence(gate: &mut Gate) {
    let mut constant = ScenarioConfig::default();
    constant.bias.r2 = 0.022;
    constant.bias.r2_group = 0.022;
    let mut macro_only = ScenarioConfig::default();
    macro_only.norms.enabled = true;
    macro_only.norms.w = 0.0;
    macro_only.norms.b_macro = 0.022;
    macro_only.norms.b_macro_group = 0.022;
    let a = replicate_config(&constant);
    let b = replicate_config(&macro_only);
    let same = a.snapshots == b.snapshots;
    gate.record(
        10,
        "constant bias equals macro-only norms",
        same,
        format!("{} snapshot rows, identical: {same}", a.snapshots.len()),
    );
}

fn main() -> ExitCode {
    // `cargo test -- --list` and friends probe test binaries; nothing to list here.
    if std::env::args().any(|a| a == "--list") {
        return ExitCode::SUCCESS;
    }
    let start = Instant::now();
    let mut gate = Gate { failed: Vec::new() };

    effect_size(&mut gate);
    let unbiased = replicate("no-biases");
    unbiased_parity(&mut gate, &unbiased);
    let biased = replicate("all-biases");
    glass_ceiling(&mut gate, &biased);
    frequency_over_magnitude(&mut gate, &biased);
    success_differential(&mut gate, &biased, &unbiased);
    norms_sweep(&mut gate);
    intervention(&mut gate);
    structural_invariants(&mut gate);
    determinism(&mut gate);
    constant_norms_equivalence(&mut gate);

    println!(
        "acceptance: {} of 10 passed in {:.0}s",
        10 - gate.failed.len(),
        start.elapsed().as_secs_f64()
    );
    if gate.failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("failed criteria: {:?}", gate.failed);
        ExitCode::FAILURE
    }
}
