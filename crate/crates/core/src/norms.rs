//! Per-level bias strength from organizational (meso) and societal (macro)
//! gender norms.
//!
//! `r2_i = w * B_meso_i + (1 - w) * B_macro`, with
//! `B_meso_i = (P_{i+1} - 0.5) / (P_m - 0.5) * B_macro`, where `P_{i+1}` is the
//! share of men one level up. The top level has no level above and mirrors
//! society: `B_meso_8 = B_macro`.

use serde::{Deserialize, Serialize};

use crate::bias::{BiasParams, CreditGaps};
use crate::company::{Company, LEVELS};
use crate::error::Result;

/// Bound on |r2_i| so the credit gap stays finite.
pub const R2_CLAMP: f64 = 0.99;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormsParams {
    /// Use the norms model; otherwise the constant `r2` values apply everywhere.
    pub enabled: bool,
    pub b_macro: f64,
    pub b_macro_group: f64,
    /// Societal expectation of the share of men at a level.
    pub p_m: f64,
    /// Meso weight (from the intervention start onward).
    pub w: f64,
    /// Meso weight before the intervention starts.
    pub w0: f64,
}

impl Default for NormsParams {
    fn default() -> Self {
        Self {
            enabled: false,
            b_macro: 0.01,
            b_macro_group: 0.01,
            p_m: 0.7,
            w: 0.0,
            w0: 0.0,
        }
    }
}

pub fn meso_norm(p_next: f64, p_m: f64, b_macro: f64) -> f64 {
    (p_next - 0.5) / (p_m - 0.5) * b_macro
}

pub fn effective_r2(w: f64, b_meso: f64, b_macro: f64) -> f64 {
    (w * b_meso + (1.0 - w) * b_macro).clamp(-R2_CLAMP, R2_CLAMP)
}

/// Variance explained by gender at each level, entry level first.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevelNorms {
    pub r2_by_level: [f64; LEVELS],
    pub r2_group_by_level: [f64; LEVELS],
}

impl LevelNorms {
    pub fn constant(r2: f64, r2_group: f64) -> Self {
        Self {
            r2_by_level: [r2; LEVELS],
            r2_group_by_level: [r2_group; LEVELS],
        }
    }

    /// Norms in force for this turn: from composition when the model is
    /// enabled, otherwise the constant bias parameters.
    pub fn for_turn(company: &Company, norms: &NormsParams, bias: &BiasParams, w_current: f64) -> Self {
        if norms.enabled {
            compute_level_norms(company, norms, w_current)
        } else {
            Self::constant(bias.r2, bias.r2_group)
        }
    }

    pub fn r2(&self, level: usize) -> f64 {
        self.r2_by_level[level - 1]
    }

    pub fn r2_group(&self, level: usize) -> f64 {
        self.r2_group_by_level[level - 1]
    }

    pub fn gaps(&self) -> Result<[CreditGaps; LEVELS]> {
        let mut out = [CreditGaps::default(); LEVELS];
        for (i, g) in out.iter_mut().enumerate() {
            *g = CreditGaps::from_r2(self.r2_by_level[i], self.r2_group_by_level[i])?;
        }
        Ok(out)
    }
}

pub fn compute_level_norms(company: &Company, params: &NormsParams, w_current: f64) -> LevelNorms {
    let mut r2_by_level = [0.0; LEVELS];
    let mut r2_group_by_level = [0.0; LEVELS];
    for level in 1..=LEVELS {
        let i = level - 1;
        if level == LEVELS {
            r2_by_level[i] = effective_r2(w_current, params.b_macro, params.b_macro);
            r2_group_by_level[i] = effective_r2(w_current, params.b_macro_group, params.b_macro_group);
        } else {
            let p_next = company.male_fraction(level + 1);
            let meso = meso_norm(p_next, params.p_m, params.b_macro);
            let meso_group = meso_norm(p_next, params.p_m, params.b_macro_group);
            r2_by_level[i] = effective_r2(w_current, meso, params.b_macro);
            r2_group_by_level[i] = effective_r2(w_current, meso_group, params.b_macro_group);
        }
    }
    LevelNorms {
        r2_by_level,
        r2_group_by_level,
    }
}
