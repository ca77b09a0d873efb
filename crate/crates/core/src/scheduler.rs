//! The per-turn loop: project assignment, resolution, stretch turns and
//! promotion cycles for one run.

use crate::agent::{rank_order, Agent, Gender};
use crate::bias::{apply_project_outcome, maybe_complain, stretch_eligible, stretch_threshold, BiasMechanism, CreditGaps, MemberOutcome};
use crate::company::{init_company, round_count, Company, CycleSummary, PromotionPolicy, LEVELS};
use crate::config::ScenarioConfig;
use crate::error::Result;
use crate::intervention::{current_w, intervention_active};
use crate::metrics::{snapshot, SnapshotRecord};
use crate::norms::LevelNorms;
use crate::observe::{NoopObserver, ProjectRecord, RunObserver};
use crate::rng::RngStream;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProjectKind {
    Individual,
    Group,
    Stretch,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TurnKind {
    Traditional,
    Stretch,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TurnPlan {
    pub turn_index: u32,
    pub kind: TurnKind,
    pub is_promotion_boundary: bool,
}

impl TurnPlan {
    pub fn new(turn_index: u32, n_stretch: u32, n_promotion: u32) -> Self {
        let kind = if turn_index.is_multiple_of(n_stretch) {
            TurnKind::Stretch
        } else {
            TurnKind::Traditional
        };
        Self {
            turn_index,
            kind,
            is_promotion_boundary: turn_index.is_multiple_of(n_promotion),
        }
    }
}

/// A project assigned to one or two agents of the same level. Members are
/// indices into that level's roster.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Project {
    pub kind: ProjectKind,
    pub lead: usize,
    pub partner: Option<usize>,
}

impl Project {
    fn solo(kind: ProjectKind, lead: usize) -> Self {
        Self {
            kind,
            lead,
            partner: None,
        }
    }

    pub fn members(&self) -> impl Iterator<Item = usize> {
        std::iter::once(self.lead).chain(self.partner)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Assignment {
    pub projects: Vec<Project>,
    /// Women passed over for a stretch project by the success test.
    pub stretch_excluded: Vec<usize>,
}

/// Gives every agent of one level exactly one project for this turn.
///
/// On a traditional turn a random `p_individual` share works alone and the
/// rest are paired at random (an odd one out works alone). On a stretch turn
/// the top `p_stretch` share by promotability is screened first; women who
/// fail the success test are skipped and the next-ranked agent is considered
/// instead, so the number of stretch projects stays constant.
pub fn assign_projects(roster: &[Agent], plan: &TurnPlan, config: &ScenarioConfig, rng: &mut RngStream) -> Assignment {
    let n = roster.len();
    let mut assignment = Assignment {
        projects: Vec::with_capacity(n),
        stretch_excluded: Vec::new(),
    };
    let (mut pool, n_individual) = match plan.kind {
        TurnKind::Traditional => ((0..n).collect::<Vec<_>>(), round_count(n as f64 * config.p_individual)),
        TurnKind::Stretch => {
            let slots = round_count(n as f64 * config.p_stretch).min(n);
            let (chosen, excluded) = select_stretch(roster, slots, config.bias.p_female);
            let mut taken = vec![false; n];
            for &i in &chosen {
                taken[i] = true;
                assignment.projects.push(Project::solo(ProjectKind::Stretch, i));
            }
            assignment.stretch_excluded = excluded;
            let rest: Vec<usize> = (0..n).filter(|&i| !taken[i]).collect();
            let n_ind = round_count(n as f64 * (1.0 - config.p_stretch) * config.p_individual);
            (rest, n_ind)
        }
    };

    rand::seq::SliceRandom::shuffle(pool.as_mut_slice(), rng);
    let n_individual = n_individual.min(pool.len());
    let (solo, paired) = pool.split_at(n_individual);
    assignment
        .projects
        .extend(solo.iter().map(|&i| Project::solo(ProjectKind::Individual, i)));
    let mut pairs = paired.chunks_exact(2);
    for pair in pairs.by_ref() {
        assignment.projects.push(Project {
            kind: ProjectKind::Group,
            lead: pair[0],
            partner: Some(pair[1]),
        });
    }
    if let [odd] = pairs.remainder() {
        assignment.projects.push(Project::solo(ProjectKind::Individual, *odd));
    }
    assignment
}

/// Picks `slots` stretch recipients by rank. Returns (chosen, excluded women).
fn select_stretch(roster: &[Agent], slots: usize, p_female: f64) -> (Vec<usize>, Vec<usize>) {
    if slots == 0 {
        return (Vec::new(), Vec::new());
    }
    let mut ranked: Vec<usize> = (0..roster.len()).collect();
    ranked.sort_unstable_by(|&i, &j| rank_order(&roster[i], &roster[j]));
    if p_female <= 0.0 {
        ranked.truncate(slots);
        return (ranked, Vec::new());
    }

    let (_, threshold) = stretch_threshold(ranked[..slots].iter().map(|&i| &roster[i]), p_female);
    let mut chosen = Vec::with_capacity(slots);
    let mut excluded = Vec::new();
    for &i in &ranked {
        if chosen.len() == slots {
            break;
        }
        if stretch_eligible(&roster[i], threshold) {
            chosen.push(i);
        } else {
            excluded.push(i);
        }
    }
    (chosen, excluded)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Resolution {
    pub credit: f64,
    pub success: bool,
    pub outcomes: [Option<MemberOutcome>; 2],
    pub complained: bool,
}

/// Draws credit and outcome for one project and applies them to its members.
pub fn resolve_project(
    roster: &mut [Agent],
    project: &Project,
    gaps: CreditGaps,
    config: &ScenarioConfig,
    rng: &mut RngStream,
) -> Resolution {
    let (mu, sigma) = match project.kind {
        ProjectKind::Stretch => (config.mu_st, config.sigma_st),
        ProjectKind::Individual | ProjectKind::Group => (config.mu_r, config.sigma_r),
    };
    let credit = rng.non_negative_normal(mu, sigma);
    let success = rng.bernoulli(config.p_s);
    let gap = if config.bias.applies_to(success) {
        gaps.for_kind(project.kind)
    } else {
        0.0
    };

    let lead_gender = roster[project.lead].gender;
    let partner_gender = project.partner.map(|p| roster[p].gender);
    let mut outcomes = [None, None];
    let mut complainant = None;
    let members = [
        (project.lead, partner_gender),
        (project.partner.unwrap_or(project.lead), Some(lead_gender)),
    ];
    let n_members = if project.partner.is_some() { 2 } else { 1 };
    for (slot, &(idx, teammate)) in members[..n_members].iter().enumerate() {
        let agent = &mut roster[idx];
        let outcome = apply_project_outcome(project.kind, agent.gender, teammate, credit, success, gap);
        agent.promotability += outcome.delta;
        agent.record_outcome(success);
        if let Some(m) = outcome.event {
            agent.record_bias(m);
            if m == BiasMechanism::RewardGroupSuccess && agent.gender == Gender::Woman {
                complainant = Some(idx);
            }
        }
        outcomes[slot] = Some(outcome);
    }

    let complained = match complainant {
        Some(idx) => maybe_complain(&mut roster[idx], config.bias.p_com, config.bias.f_dis, rng),
        None => false,
    };
    Resolution {
        credit,
        success,
        outcomes,
        complained,
    }
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub run_index: u64,
    pub master_seed: u64,
    pub snapshots: Vec<SnapshotRecord>,
    pub cycles: Vec<CycleSummary>,
    pub company: Company,
}

pub fn run_simulation(config: &ScenarioConfig, master_seed: u64, run_index: u64) -> Result<RunResult> {
    run_simulation_observed(config, master_seed, run_index, &mut NoopObserver)
}

/// Runs turns `1..=n_sim`, recording a snapshot of every level after each
/// promotion cycle.
pub fn run_simulation_observed(
    config: &ScenarioConfig,
    master_seed: u64,
    run_index: u64,
    observer: &mut dyn RunObserver,
) -> Result<RunResult> {
    config.validate()?;
    let mut rng = RngStream::new(master_seed, run_index);
    let mut company = init_company(config, &mut rng);
    observer.on_start(&company);
    let n_cycles = (config.n_sim / config.n_promotion) as usize;
    let mut snapshots = Vec::with_capacity(n_cycles * LEVELS);
    let mut cycles = Vec::with_capacity(n_cycles);

    for turn in 1..=config.n_sim {
        let plan = TurnPlan::new(turn, config.n_stretch, config.n_promotion);
        let w = current_w(turn, &config.intervention, &config.norms);
        let norms = LevelNorms::for_turn(&company, &config.norms, &config.bias, w);
        observer.on_turn_start(&plan, &norms);
        let gaps = norms.gaps()?;

        for level in 1..=LEVELS {
            let assignment = assign_projects(company.level(level), &plan, config, &mut rng);
            let roster = company.level_mut(level);
            for &i in &assignment.stretch_excluded {
                roster[i].record_bias(BiasMechanism::PenaltyStretchProject);
            }
            observer.on_assignment(&plan, level, roster, &assignment);
            for project in &assignment.projects {
                let before: [Option<Gender>; 2] = [Some(roster[project.lead].gender), project.partner.map(|p| roster[p].gender)];
                let resolution = resolve_project(roster, project, gaps[level - 1], config, &mut rng);
                observer.on_project(&ProjectRecord {
                    turn,
                    level,
                    kind: project.kind,
                    genders: before,
                    gaps: gaps[level - 1],
                    resolution,
                });
            }
        }

        if plan.is_promotion_boundary {
            let cycle = cycles.len() as u32 + 1;
            let iv = &config.intervention;
            let policy = if iv.k > 0.0 && intervention_active(turn, iv.i_range) {
                PromotionPolicy::Quota { k: iv.k }
            } else {
                PromotionPolicy::Merit
            };
            let summary = company.run_promotion_cycle(policy, config, &mut rng, observer);
            observer.on_cycle_end(cycle, &company, &summary);
            snapshots.extend(snapshot(&company, cycle, run_index));
            cycles.push(summary);
        }
    }

    Ok(RunResult {
        run_index,
        master_seed,
        snapshots,
        cycles,
        company,
    })
}
