//! Interpersonal bias mechanisms applied during project evaluation and
//! stretch-project allocation.
//!
//! Bias strength is configured as variance explained (`r2`) and converted to a
//! credit gap `d` with the point-biserial relation. A positive gap works
//! against women, a negative gap against men.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::agent::{Agent, AgentId, Gender};
use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::scheduler::ProjectKind;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BiasMechanism {
    RewardIndividualSuccess,
    PenaltyIndividualFailure,
    RewardGroupSuccess,
    PenaltyGroupFailure,
    PenaltyNonAltruism,
    PenaltyStretchProject,
}

impl BiasMechanism {
    pub const COUNT: usize = 6;

    pub const ALL: [BiasMechanism; Self::COUNT] = [
        BiasMechanism::RewardIndividualSuccess,
        BiasMechanism::PenaltyIndividualFailure,
        BiasMechanism::RewardGroupSuccess,
        BiasMechanism::PenaltyGroupFailure,
        BiasMechanism::PenaltyNonAltruism,
        BiasMechanism::PenaltyStretchProject,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            BiasMechanism::RewardIndividualSuccess => "reward_individual_success",
            BiasMechanism::PenaltyIndividualFailure => "penalty_individual_failure",
            BiasMechanism::RewardGroupSuccess => "reward_group_success",
            BiasMechanism::PenaltyGroupFailure => "penalty_group_failure",
            BiasMechanism::PenaltyNonAltruism => "penalty_non_altruism",
            BiasMechanism::PenaltyStretchProject => "penalty_stretch_project",
        }
    }
}

impl fmt::Display for BiasMechanism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BiasParams {
    /// Variance explained by gender in individual and stretch project credit.
    pub r2: f64,
    /// Variance explained by gender in mixed-gender group project credit.
    pub r2_group: f64,
    /// Chance a woman complains after a biased mixed-group success.
    pub p_com: f64,
    /// Multiplier applied to promotability when she does.
    pub f_dis: f64,
    /// Extra share of successes women need to qualify for stretch projects.
    pub p_female: f64,
    /// Apply evaluation bias to successful projects.
    pub on_success: bool,
    /// Apply evaluation bias to failed projects.
    pub on_failure: bool,
}

impl Default for BiasParams {
    fn default() -> Self {
        Self {
            r2: 0.0,
            r2_group: 0.0,
            p_com: 0.0,
            f_dis: 1.0,
            p_female: 0.0,
            on_success: true,
            on_failure: true,
        }
    }
}

impl BiasParams {
    /// Whether evaluation bias applies to a project with this outcome.
    pub fn applies_to(&self, success: bool) -> bool {
        if success {
            self.on_success
        } else {
            self.on_failure
        }
    }
}

/// Converts variance explained into a credit gap with unit credit variance:
/// `d = sign(r2) * 2 * sqrt(|r2|) / sqrt(1 - |r2|)`.
pub fn r2_to_d(r2: f64) -> Result<f64> {
    if r2.is_nan() || r2.abs() >= 1.0 {
        return Err(Error::Calibration(r2));
    }
    let r = r2.abs().sqrt();
    Ok(r2.signum() * 2.0 * r / (1.0 - r2.abs()).sqrt())
}

/// Credit gaps in force at one level.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CreditGaps {
    pub individual: f64,
    pub group: f64,
}

impl CreditGaps {
    pub fn from_r2(r2: f64, r2_group: f64) -> Result<Self> {
        Ok(Self {
            individual: r2_to_d(r2)?,
            group: r2_to_d(r2_group)?,
        })
    }

    pub fn for_kind(&self, kind: ProjectKind) -> f64 {
        match kind {
            ProjectKind::Group => self.group,
            ProjectKind::Individual | ProjectKind::Stretch => self.individual,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MemberOutcome {
    pub delta: f64,
    /// Set when a bias term was applied against this member.
    pub event: Option<BiasMechanism>,
}

/// Promotability change for one project member.
///
/// `teammate` is the other member's gender for group projects. Same-gender
/// pairs are never biased. `gap` is the credit gap for this project kind at
/// the member's level; the disadvantaged gender gets `c - |gap|` on success
/// and `-(c + |gap|)` on failure.
pub fn apply_project_outcome(
    kind: ProjectKind,
    gender: Gender,
    teammate: Option<Gender>,
    credit: f64,
    success: bool,
    gap: f64,
) -> MemberOutcome {
    let base = if success { credit } else { -credit };
    let mixed = match kind {
        ProjectKind::Group => teammate.is_some_and(|t| t != gender),
        ProjectKind::Individual | ProjectKind::Stretch => true,
    };
    let disadvantaged = if gap > 0.0 { Gender::Woman } else { Gender::Man };
    if !mixed || gap == 0.0 || gender != disadvantaged {
        return MemberOutcome {
            delta: base,
            event: None,
        };
    }
    let gap = gap.abs();
    let (delta, event) = match (kind, success) {
        (ProjectKind::Group, true) => (credit - gap, BiasMechanism::RewardGroupSuccess),
        (ProjectKind::Group, false) => (-(credit + gap), BiasMechanism::PenaltyGroupFailure),
        (_, true) => (credit - gap, BiasMechanism::RewardIndividualSuccess),
        (_, false) => (-(credit + gap), BiasMechanism::PenaltyIndividualFailure),
    };
    MemberOutcome {
        delta,
        event: Some(event),
    }
}

/// After a mixed-group success in which she was shortchanged, the woman
/// complains with probability `p_com`, and her promotability is scaled by
/// `f_dis`. Returns whether she complained.
pub fn maybe_complain(woman: &mut Agent, p_com: f64, f_dis: f64, rng: &mut RngStream) -> bool {
    if p_com <= 0.0 || !rng.bernoulli(p_com) {
        return false;
    }
    woman.promotability *= f_dis;
    woman.record_bias(BiasMechanism::PenaltyNonAltruism);
    true
}

/// Success threshold women must meet for stretch projects: the mean success
/// count of the prequalified men (0 if there are none), scaled by `1 + p_female`.
pub fn stretch_threshold<'a>(prequalified: impl IntoIterator<Item = &'a Agent>, p_female: f64) -> (f64, f64) {
    let (sum, n) = prequalified
        .into_iter()
        .filter(|a| a.gender == Gender::Man)
        .fold((0u64, 0u64), |(s, n), a| (s + u64::from(a.successes()), n + 1));
    let n_avg = if n == 0 { 0.0 } else { sum as f64 / n as f64 };
    (n_avg, n_avg * (1.0 + p_female))
}

/// Does `agent` clear the stretch threshold? Men always do.
pub fn stretch_eligible(agent: &Agent, threshold: f64) -> bool {
    agent.gender == Gender::Man || f64::from(agent.successes()) >= threshold
}

#[derive(Debug, Clone, PartialEq)]
pub struct StretchScreen {
    pub n_avg: f64,
    pub threshold: f64,
    pub qualified: Vec<AgentId>,
    /// Women who were prequalified but failed the success test.
    pub excluded: Vec<AgentId>,
}

/// Screens a prequalified group for stretch projects.
pub fn stretch_qualify(prequalified: &[&Agent], p_female: f64) -> StretchScreen {
    let (n_avg, threshold) = stretch_threshold(prequalified.iter().copied(), p_female);
    let (qualified, excluded): (Vec<&Agent>, Vec<&Agent>) =
        prequalified.iter().copied().partition(|a| stretch_eligible(a, threshold));
    StretchScreen {
        n_avg,
        threshold,
        qualified: qualified.iter().map(|a| a.id).collect(),
        excluded: excluded.iter().map(|a| a.id).collect(),
    }
}
