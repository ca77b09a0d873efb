//! Built-in experiment presets. Each preset lists only the keys it changes
//! from the defaults.

use serde_json::{json, Value};

use crate::config::ScenarioConfig;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Lit {
    Real(f64),
    Count(u32),
    Flag(bool),
    Range(u32, u32),
}

impl Lit {
    pub fn to_value(self) -> Value {
        match self {
            Lit::Real(x) => json!(x),
            Lit::Count(n) => json!(n),
            Lit::Flag(b) => json!(b),
            Lit::Range(a, b) => json!([a, b]),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Preset {
    pub name: &'static str,
    pub description: &'static str,
    pub overrides: &'static [(&'static str, Lit)],
}

impl Preset {
    pub fn config(&self) -> ScenarioConfig {
        let mut cfg = ScenarioConfig::default();
        for &(key, lit) in self.overrides {
            cfg.set(key, &lit.to_value()).expect("preset keys are valid");
        }
        cfg
    }
}

use Lit::*;

const NORMS: [(&str, Lit); 5] = [
    ("norms.enabled", Flag(true)),
    ("norms.b_macro", Real(0.01)),
    ("norms.b_macro_group", Real(0.01)),
    ("norms.p_m", Real(0.7)),
    ("p_male", Real(0.2)),
];

macro_rules! intervention {
    ($name:literal, $desc:literal, $w:expr, $end:expr) => {
        Preset {
            name: $name,
            description: $desc,
            overrides: &[
                ("n_sim", Count(1600)),
                ("norms.enabled", Flag(true)),
                ("norms.b_macro", Real(0.01)),
                ("norms.b_macro_group", Real(0.01)),
                ("norms.w0", Real(0.0)),
                ("norms.w", Real($w)),
                ("intervention.k", Real(70.0)),
                ("intervention.i_range", Range(168, $end)),
                ("bias.p_female", Real(0.0)),
            ],
        }
    };
}

pub const PRESETS: &[Preset] = &[
    Preset {
        name: "no-biases",
        description: "Unbiased model; all defaults",
        overrides: &[],
    },
    Preset {
        name: "penalty-stretch-project",
        description: "Women need 20% more successes to qualify for stretch projects",
        overrides: &[("bias.p_female", Real(0.2))],
    },
    Preset {
        name: "penalty-non-altruism",
        description: "Women who complain about shortchanged group credit are discounted",
        overrides: &[("bias.p_com", Real(0.1)), ("bias.f_dis", Real(0.9))],
    },
    Preset {
        name: "penalty-mixed-group-failure",
        description: "Mixed-group bias on failed projects only",
        overrides: &[("bias.r2_group", Real(0.022)), ("bias.on_success", Flag(false))],
    },
    Preset {
        name: "reward-mixed-group-success",
        description: "Mixed-group bias on successful projects only",
        overrides: &[("bias.r2_group", Real(0.022)), ("bias.on_failure", Flag(false))],
    },
    Preset {
        name: "penalty-individual-failure",
        description: "Individual-project bias on failed projects only",
        overrides: &[("bias.r2", Real(0.022)), ("bias.on_success", Flag(false))],
    },
    Preset {
        name: "reward-individual-success",
        description: "Individual-project bias on successful projects only",
        overrides: &[("bias.r2", Real(0.022)), ("bias.on_failure", Flag(false))],
    },
    Preset {
        name: "all-biases",
        description: "All six mechanisms active",
        overrides: &[
            ("bias.r2", Real(0.022)),
            ("bias.r2_group", Real(0.022)),
            ("bias.p_com", Real(0.1)),
            ("bias.f_dis", Real(0.9)),
            ("bias.p_female", Real(0.2)),
        ],
    },
    Preset {
        name: "norms",
        description: "Hierarchical norms in a company that starts 80% women; sweep norms.w",
        overrides: &NORMS,
    },
    Preset {
        name: "norms-all-biases",
        description: "As `norms`, with the complaint and stretch-project mechanisms also active",
        overrides: &[
            NORMS[0],
            NORMS[1],
            NORMS[2],
            NORMS[3],
            NORMS[4],
            ("bias.p_com", Real(0.1)),
            ("bias.f_dis", Real(0.9)),
            ("bias.p_female", Real(0.2)),
        ],
    },
    intervention!("intervention-moderate-macro-3cycles", "70% quota over turns 168-240, w = 0.4", 0.4, 240),
    intervention!("intervention-moderate-macro-6cycles", "70% quota over turns 168-312, w = 0.4", 0.4, 312),
    intervention!("intervention-moderate-macro-9cycles", "70% quota over turns 168-384, w = 0.4", 0.4, 384),
    intervention!("intervention-low-macro-3cycles", "70% quota over turns 168-240, w = 0.7", 0.7, 240),
    intervention!("intervention-low-macro-6cycles", "70% quota over turns 168-312, w = 0.7", 0.7, 312),
    intervention!("intervention-low-macro-9cycles", "70% quota over turns 168-384, w = 0.7", 0.7, 384),
    intervention!("intervention-no-macro-3cycles", "70% quota over turns 168-240, w = 1", 1.0, 240),
    intervention!("intervention-no-macro-6cycles", "70% quota over turns 168-312, w = 1", 1.0, 312),
    intervention!("intervention-no-macro-9cycles", "70% quota over turns 168-384, w = 1", 1.0, 384),
];

pub fn find(name: &str) -> Option<&'static Preset> {
    PRESETS.iter().find(|p| p.name == name)
}

/// The resolved, validated configuration for a preset.
pub fn resolve(name: &str) -> Result<ScenarioConfig> {
    let preset = find(name).ok_or_else(|| Error::UnknownPreset(name.to_string()))?;
    let cfg = preset.config();
    cfg.validate()?;
    Ok(cfg)
}
