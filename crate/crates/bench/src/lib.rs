//! Fixtures shared by the benchmarks.

use ladder_core::company::init_company;
use ladder_core::{presets, Company, RngStream, ScenarioConfig};

/// A preset shortened to `cycles` promotion cycles.
pub fn scenario(preset: &str, cycles: u32) -> ScenarioConfig {
    let mut cfg = presets::resolve(preset).expect("built-in preset");
    cfg.n_sim = cfg.n_promotion * cycles;
    cfg
}

/// A freshly initialized company for `cfg`.
pub fn company(cfg: &ScenarioConfig, seed: u64) -> Company {
    init_company(cfg, &mut RngStream::new(seed, 0))
}
