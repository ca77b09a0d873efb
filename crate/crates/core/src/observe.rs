//! Hooks into a running simulation, and a checker for the structural
//! invariants every run must satisfy.

use std::collections::HashMap;

use crate::agent::{rank_order, Agent, AgentId, Gender};
use crate::bias::CreditGaps;
use crate::company::{Company, CycleSummary, PromotionPolicy, LEVELS};
use crate::norms::LevelNorms;
use crate::scheduler::{Assignment, ProjectKind, Resolution, TurnPlan};

pub struct PromotionEvent<'a> {
    pub dest_level: usize,
    pub policy: PromotionPolicy,
    /// Source roster (level `dest_level - 1`) before anyone moves.
    pub source: &'a [Agent],
    /// Indices into `source` chosen for promotion.
    pub chosen: &'a [usize],
}

#[derive(Debug, Clone, Copy)]
pub struct ProjectRecord {
    pub turn: u32,
    pub level: usize,
    pub kind: ProjectKind,
    pub genders: [Option<Gender>; 2],
    pub gaps: CreditGaps,
    pub resolution: Resolution,
}

#[allow(unused_variables)]
pub trait RunObserver {
    fn on_start(&mut self, company: &Company) {}
    fn on_turn_start(&mut self, plan: &TurnPlan, norms: &LevelNorms) {}
    fn on_assignment(&mut self, plan: &TurnPlan, level: usize, roster: &[Agent], assignment: &Assignment) {}
    fn on_project(&mut self, record: &ProjectRecord) {}
    fn on_promotion(&mut self, event: &PromotionEvent<'_>) {}
    fn on_cycle_end(&mut self, cycle: u32, company: &Company, summary: &CycleSummary) {}
}

pub struct NoopObserver;

impl RunObserver for NoopObserver {}

/// Violation counts per invariant.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Violations {
    pub capacity: usize,
    pub merit_order: usize,
    pub assignment: usize,
    pub level_moves: usize,
}

impl Violations {
    pub fn total(&self) -> usize {
        self.capacity + self.merit_order + self.assignment + self.level_moves
    }
}

/// Checks roster conservation, merit ordering of merit promotions,
/// exhaustive project assignment, and that agents only ever move up by one
/// level per cycle.
#[derive(Debug, Default)]
pub struct InvariantChecker {
    pub violations: Violations,
    pub cycles_seen: u32,
    last_level: HashMap<AgentId, usize>,
}

impl InvariantChecker {
    pub fn new() -> Self {
        Self::default()
    }
}

impl RunObserver for InvariantChecker {
    fn on_start(&mut self, company: &Company) {
        self.last_level = (1..=LEVELS)
            .flat_map(|level| company.level(level).iter().map(move |a| (a.id, level)))
            .collect();
    }

    fn on_assignment(&mut self, _plan: &TurnPlan, _level: usize, roster: &[Agent], assignment: &Assignment) {
        let mut seen = vec![0u8; roster.len()];
        for p in &assignment.projects {
            let size_ok = match p.kind {
                ProjectKind::Group => p.partner.is_some(),
                ProjectKind::Individual | ProjectKind::Stretch => p.partner.is_none(),
            };
            if !size_ok {
                self.violations.assignment += 1;
            }
            for m in p.members() {
                match seen.get_mut(m) {
                    Some(s) => *s += 1,
                    None => self.violations.assignment += 1,
                }
            }
        }
        if seen.iter().any(|&s| s != 1) {
            self.violations.assignment += 1;
        }
    }

    fn on_promotion(&mut self, event: &PromotionEvent<'_>) {
        if event.policy != PromotionPolicy::Merit || event.chosen.is_empty() {
            return;
        }
        let mut chosen = vec![false; event.source.len()];
        for &i in event.chosen {
            chosen[i] = true;
        }
        let worst_chosen = event
            .chosen
            .iter()
            .map(|&i| &event.source[i])
            .max_by(|a, b| rank_order(a, b));
        let best_kept = event
            .source
            .iter()
            .zip(&chosen)
            .filter(|(_, &c)| !c)
            .map(|(a, _)| a)
            .min_by(|a, b| rank_order(a, b));
        if let (Some(w), Some(b)) = (worst_chosen, best_kept) {
            if rank_order(w, b) != std::cmp::Ordering::Less {
                self.violations.merit_order += 1;
            }
        }
    }

    fn on_cycle_end(&mut self, _cycle: u32, company: &Company, _summary: &CycleSummary) {
        self.cycles_seen += 1;
        if !company.is_at_capacity() {
            self.violations.capacity += 1;
        }
        let mut now = HashMap::with_capacity(self.last_level.len());
        for level in 1..=LEVELS {
            for a in company.level(level) {
                let ok = match self.last_level.get(&a.id) {
                    Some(&prev) => level == prev || level == prev + 1,
                    None => level == 1,
                };
                if !ok {
                    self.violations.level_moves += 1;
                }
                now.insert(a.id, level);
            }
        }
        self.last_level = now;
    }
}
