//! Agent-based simulation of how small, repeated gender biases in credit
//! assignment shape the composition of an eight-level corporate hierarchy.
//!
//! Start with [`ScenarioConfig`] (or a preset from [`presets`]), then call
//! [`run_simulation`] for one run or [`run_replications`] for many.

pub mod agent;
pub mod bias;
pub mod company;
pub mod config;
pub mod error;
pub mod harness;
pub mod intervention;
pub mod metrics;
pub mod norms;
pub mod observe;
pub mod output;
pub mod presets;
pub mod rng;
pub mod scheduler;

pub use agent::{rank_order, Agent, AgentId, BiasCounts, Gender};
pub use bias::{r2_to_d, BiasMechanism, BiasParams, CreditGaps};
pub use company::{Company, PromotionPolicy, DEFAULT_CAPACITIES, LEVELS};
pub use config::{is_sweepable, RunControls, ScenarioConfig, KEYS};
pub use error::{Error, Result};
pub use harness::{default_parallelism, run_replications, sweep, sweep_cells, Replications, SweepCell};
pub use intervention::{InterventionParams, TurnRange};
pub use metrics::{aggregate, AggregateRecord, Aggregates, Facet, SnapshotRecord};
pub use norms::{LevelNorms, NormsParams};
pub use observe::{InvariantChecker, NoopObserver, RunObserver};
pub use output::{format_real, write_outputs};
pub use presets::Preset;
pub use rng::RngStream;
pub use scheduler::{run_simulation, run_simulation_observed, ProjectKind, RunResult, TurnKind, TurnPlan};
