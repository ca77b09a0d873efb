use std::fmt;

use serde::{Deserialize, Serialize};

use crate::bias::BiasMechanism;
use crate::rng::RngStream;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Gender {
    Man,
    Woman,
}

impl Gender {
    pub const ALL: [Gender; 2] = [Gender::Man, Gender::Woman];

    pub fn name(self) -> &'static str {
        match self {
            Gender::Man => "man",
            Gender::Woman => "woman",
        }
    }
}

impl fmt::Display for Gender {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Unique within one run; allocated in creation order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct AgentId(pub u64);

/// Cumulative count of bias events per mechanism.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BiasCounts([u32; BiasMechanism::COUNT]);

impl BiasCounts {
    pub fn get(&self, mechanism: BiasMechanism) -> u32 {
        self.0[mechanism.index()]
    }

    pub fn total(&self) -> u64 {
        self.0.iter().map(|&c| u64::from(c)).sum()
    }

    pub(crate) fn increment(&mut self, mechanism: BiasMechanism) {
        self.0[mechanism.index()] += 1;
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Agent {
    pub id: AgentId,
    pub gender: Gender,
    /// Perceived promotability; the score promotions rank on.
    pub promotability: f64,
    successes: u32,
    failures: u32,
    bias_events: BiasCounts,
}

impl Agent {
    pub fn new(id: AgentId, gender: Gender, promotability: f64) -> Self {
        Self {
            id,
            gender,
            promotability,
            successes: 0,
            failures: 0,
            bias_events: BiasCounts::default(),
        }
    }

    pub fn successes(&self) -> u32 {
        self.successes
    }

    pub fn failures(&self) -> u32 {
        self.failures
    }

    /// Successes minus failures.
    pub fn net_success(&self) -> i64 {
        i64::from(self.successes) - i64::from(self.failures)
    }

    pub fn bias_events(&self) -> &BiasCounts {
        &self.bias_events
    }

    pub fn is_woman(&self) -> bool {
        self.gender == Gender::Woman
    }

    pub(crate) fn record_outcome(&mut self, success: bool) {
        if success {
            self.successes += 1;
        } else {
            self.failures += 1;
        }
    }

    pub(crate) fn record_bias(&mut self, mechanism: BiasMechanism) {
        self.bias_events.increment(mechanism);
    }
}

/// Creates an agent with promotability drawn from `Normal(mu_o, sigma_o)`.
pub fn create_agent(id: AgentId, gender: Gender, rng: &mut RngStream, mu_o: f64, sigma_o: f64) -> Agent {
    Agent::new(id, gender, rng.normal(mu_o, sigma_o))
}

/// Promotion order: higher promotability first, lower id breaks ties.
pub fn rank_order(a: &Agent, b: &Agent) -> std::cmp::Ordering {
    b.promotability
        .total_cmp(&a.promotability)
        .then_with(|| a.id.cmp(&b.id))
}
