//! The eight-level company: initialization, attrition and promotion cycles.

use crate::agent::{create_agent, rank_order, Agent, AgentId, Gender};
use crate::config::ScenarioConfig;
use crate::intervention::quota_promote;
use crate::observe::{PromotionEvent, RunObserver};
use crate::rng::RngStream;

pub const LEVELS: usize = 8;

/// Positions per level, entry level first.
pub const DEFAULT_CAPACITIES: [usize; LEVELS] = [500, 350, 200, 150, 100, 75, 40, 10];

/// Rounds a fractional head count half-up.
pub fn round_count(x: f64) -> usize {
    // The epsilon keeps products such as 350 * 0.15 on the intended side of .5.
    (x + 0.5 + 1e-9).floor().max(0.0) as usize
}

/// How vacancies above the entry level are filled during a cycle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PromotionPolicy {
    Merit,
    /// Guarantee at least `k` percent women at every level above entry.
    Quota { k: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct CycleSummary {
    /// Agents removed by attrition, per level.
    pub departures: [usize; LEVELS],
    /// Agents promoted into each level (index 0 is always zero).
    pub promoted_into: [usize; LEVELS],
    pub hires: usize,
}

#[derive(Debug, Clone)]
pub struct Company {
    levels: Vec<Vec<Agent>>,
    capacities: [usize; LEVELS],
    next_id: u64,
}

/// Fills every level to capacity with exactly `round(N_i * p_male)` men per level,
/// placed in random roster order.
pub fn init_company(config: &ScenarioConfig, rng: &mut RngStream) -> Company {
    let mut company = Company {
        levels: Vec::with_capacity(LEVELS),
        capacities: config.capacities,
        next_id: 0,
    };
    for &capacity in &config.capacities {
        let n_men = round_count(capacity as f64 * config.p_male).min(capacity);
        let mut genders: Vec<Gender> = (0..capacity)
            .map(|i| if i < n_men { Gender::Man } else { Gender::Woman })
            .collect();
        rand::seq::SliceRandom::shuffle(genders.as_mut_slice(), rng);
        let roster = genders
            .into_iter()
            .map(|g| {
                let id = company.allocate_id();
                create_agent(id, g, rng, config.mu_o, config.sigma_o)
            })
            .collect();
        company.levels.push(roster);
    }
    company
}

/// Indices of the `n` highest-ranked agents in `roster`, best first.
pub fn top_by_rank(roster: &[Agent], n: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..roster.len()).collect();
    let n = n.min(idx.len());
    if n < idx.len() && n > 0 {
        idx.select_nth_unstable_by(n, |&i, &j| rank_order(&roster[i], &roster[j]));
    }
    idx.truncate(n);
    idx.sort_unstable_by(|&i, &j| rank_order(&roster[i], &roster[j]));
    idx
}

impl Company {
    /// Builds a company from explicit rosters; ids continue after the largest one present.
    pub fn from_rosters(levels: Vec<Vec<Agent>>, capacities: [usize; LEVELS]) -> Self {
        assert_eq!(levels.len(), LEVELS, "a company has exactly {LEVELS} levels");
        let next_id = levels
            .iter()
            .flatten()
            .map(|a| a.id.0 + 1)
            .max()
            .unwrap_or(0);
        Self {
            levels,
            capacities,
            next_id,
        }
    }

    fn allocate_id(&mut self) -> AgentId {
        let id = AgentId(self.next_id);
        self.next_id += 1;
        id
    }

    /// Roster of `level` (1-based, 8 is the top).
    pub fn level(&self, level: usize) -> &[Agent] {
        &self.levels[level - 1]
    }

    pub(crate) fn level_mut(&mut self, level: usize) -> &mut [Agent] {
        &mut self.levels[level - 1]
    }

    pub fn capacities(&self) -> &[usize; LEVELS] {
        &self.capacities
    }

    pub fn capacity(&self, level: usize) -> usize {
        self.capacities[level - 1]
    }

    pub fn count(&self, level: usize, gender: Gender) -> usize {
        self.level(level).iter().filter(|a| a.gender == gender).count()
    }

    /// Share of men at `level`; zero for an empty roster.
    pub fn male_fraction(&self, level: usize) -> f64 {
        let roster = self.level(level);
        if roster.is_empty() {
            return 0.0;
        }
        self.count(level, Gender::Man) as f64 / roster.len() as f64
    }

    pub fn agents(&self) -> impl Iterator<Item = &Agent> {
        self.levels.iter().flatten()
    }

    pub fn is_at_capacity(&self) -> bool {
        self.levels
            .iter()
            .zip(&self.capacities)
            .all(|(roster, &cap)| roster.len() == cap)
    }

    /// Removes `round(N_i * p_leave)` uniformly chosen agents from every level.
    /// Returns the vacancies opened per level.
    pub fn apply_attrition(&mut self, p_leave: f64, rng: &mut RngStream) -> [usize; LEVELS] {
        let mut vacancies = [0; LEVELS];
        for (i, roster) in self.levels.iter_mut().enumerate() {
            let leaving = round_count(self.capacities[i] as f64 * p_leave).min(roster.len());
            let chosen = rand::seq::index::sample(rng, roster.len(), leaving).into_vec();
            take_indices(roster, &chosen);
            vacancies[i] = leaving;
        }
        vacancies
    }

    /// Moves the `n` highest-ranked agents at `level` up one level.
    pub fn promote_standard(&mut self, level: usize, n: usize) -> Vec<AgentId> {
        assert!((1..LEVELS).contains(&level), "cannot promote out of level {level}");
        let chosen = top_by_rank(self.level(level), n);
        self.promote_indices(level, &chosen)
    }

    pub(crate) fn promote_indices(&mut self, level: usize, indices: &[usize]) -> Vec<AgentId> {
        let moved = take_indices(&mut self.levels[level - 1], indices);
        let ids = moved.iter().map(|a| a.id).collect();
        self.levels[level].extend(moved);
        ids
    }

    pub(crate) fn hire(&mut self, gender: Gender, rng: &mut RngStream, mu_o: f64, sigma_o: f64) -> AgentId {
        let id = self.allocate_id();
        self.levels[0].push(create_agent(id, gender, rng, mu_o, sigma_o));
        id
    }

    /// Attrition, then top-down promotions (8 from 7, 7 from 6, ...), then
    /// entry-level hiring. Every roster is back at capacity afterwards.
    pub fn run_promotion_cycle(
        &mut self,
        policy: PromotionPolicy,
        config: &ScenarioConfig,
        rng: &mut RngStream,
        observer: &mut dyn RunObserver,
    ) -> CycleSummary {
        let departures = self.apply_attrition(config.p_leave, rng);
        let mut vacancies = departures;
        let mut promoted_into = [0; LEVELS];

        for dest in (2..=LEVELS).rev() {
            let source = dest - 1;
            let n_vac = vacancies[dest - 1];
            debug_assert!(n_vac <= self.level(source).len(), "infeasible cascade at level {dest}");
            let chosen = match policy {
                PromotionPolicy::Merit => top_by_rank(self.level(source), n_vac),
                PromotionPolicy::Quota { k } => {
                    quota_promote(self.level(source), self.level(dest), self.capacity(dest), n_vac, k).indices
                }
            };
            observer.on_promotion(&PromotionEvent {
                dest_level: dest,
                policy,
                source: self.level(source),
                chosen: &chosen,
            });
            let moved = self.promote_indices(source, &chosen).len();
            promoted_into[dest - 1] = moved;
            vacancies[source - 1] += moved;
        }

        let hires = self.capacities[0].saturating_sub(self.levels[0].len());
        for _ in 0..hires {
            let gender = if rng.bernoulli(config.p_male) { Gender::Man } else { Gender::Woman };
            self.hire(gender, rng, config.mu_o, config.sigma_o);
        }

        CycleSummary {
            departures,
            promoted_into,
            hires,
        }
    }
}

/// Removes the agents at `indices` (any order, no duplicates), keeping the
/// relative order of the rest. Returns them in `indices` order.
fn take_indices(roster: &mut Vec<Agent>, indices: &[usize]) -> Vec<Agent> {
    if indices.is_empty() {
        return Vec::new();
    }
    let mut slot: Vec<Option<usize>> = vec![None; roster.len()];
    for (pos, &i) in indices.iter().enumerate() {
        slot[i] = Some(pos);
    }
    let mut taken: Vec<Option<Agent>> = vec![None; indices.len()];
    let mut kept = Vec::with_capacity(roster.len() - indices.len());
    for (agent, s) in roster.drain(..).zip(slot) {
        match s {
            Some(pos) => taken[pos] = Some(agent),
            None => kept.push(agent),
        }
    }
    *roster = kept;
    taken.into_iter().map(|a| a.expect("index taken once")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::ScenarioConfig;
    use crate::observe::NoopObserver;

    fn company_with(level_7: Vec<Agent>) -> Company {
        let mut levels: Vec<Vec<Agent>> = vec![Vec::new(); LEVELS];
        levels[6] = level_7;
        Company::from_rosters(levels, DEFAULT_CAPACITIES)
    }

    #[test]
    fn round_count_is_half_up() {
        assert_eq!(round_count(500.0 * 0.15), 75);
        assert_eq!(round_count(350.0 * 0.15), 53);
        assert_eq!(round_count(10.0 * 0.15), 2);
        assert_eq!(round_count(40.0 * 0.2), 8);
        assert_eq!(round_count(0.0), 0);
    }

    #[test]
    fn init_splits_each_level_exactly() {
        let cfg = ScenarioConfig::default();
        let c = init_company(&cfg, &mut RngStream::new(1, 0));
        assert!(c.is_at_capacity());
        assert_eq!(c.count(8, Gender::Man), 5);
        assert_eq!(c.count(8, Gender::Woman), 5);
        for level in 1..=LEVELS {
            assert_eq!(c.count(level, Gender::Man), round_count(c.capacity(level) as f64 * 0.5));
        }
        let ids: std::collections::HashSet<_> = c.agents().map(|a| a.id).collect();
        assert_eq!(ids.len(), DEFAULT_CAPACITIES.iter().sum::<usize>());
    }

    #[test]
    fn init_with_twenty_percent_men() {
        let cfg = ScenarioConfig {
            p_male: 0.2,
            ..ScenarioConfig::default()
        };
        let c = init_company(&cfg, &mut RngStream::new(5, 0));
        assert_eq!(c.count(7, Gender::Man), 8);
        assert_eq!(c.count(7, Gender::Woman), 32);
    }

    #[test]
    fn init_all_men() {
        let cfg = ScenarioConfig {
            p_male: 1.0,
            ..ScenarioConfig::default()
        };
        let c = init_company(&cfg, &mut RngStream::new(5, 0));
        assert!(c.agents().all(|a| a.gender == Gender::Man));
    }

    #[test]
    fn attrition_removes_rounded_share() {
        let cfg = ScenarioConfig::default();
        let mut rng = RngStream::new(2, 0);
        let mut c = init_company(&cfg, &mut rng);
        let vac = c.apply_attrition(0.15, &mut rng);
        assert_eq!(vac, [75, 53, 30, 23, 15, 11, 6, 2]);
        for level in 1..=LEVELS {
            assert_eq!(c.level(level).len(), c.capacity(level) - vac[level - 1]);
        }
        let none = c.apply_attrition(0.0, &mut rng);
        assert_eq!(none, [0; LEVELS]);
    }

    #[test]
    fn promote_standard_takes_top_and_breaks_ties_by_id() {
        let roster = vec![
            Agent::new(AgentId(10), Gender::Man, 40.0),
            Agent::new(AgentId(7), Gender::Woman, 51.2),
            Agent::new(AgentId(3), Gender::Man, 51.2),
            Agent::new(AgentId(1), Gender::Woman, 70.0),
        ];
        let mut c = company_with(roster);
        let ids = c.promote_standard(7, 2);
        assert_eq!(ids, vec![AgentId(1), AgentId(3)]);
        assert_eq!(c.level(8).len(), 2);
        assert_eq!(c.level(7).iter().map(|a| a.id.0).collect::<Vec<_>>(), vec![10, 7]);
    }

    #[test]
    fn cycle_restores_capacity_and_cascades() {
        let cfg = ScenarioConfig::default();
        let mut rng = RngStream::new(9, 0);
        let mut c = init_company(&cfg, &mut rng);
        let s = c.run_promotion_cycle(PromotionPolicy::Merit, &cfg, &mut rng, &mut NoopObserver);
        assert!(c.is_at_capacity());
        assert_eq!(s.promoted_into[7], s.departures[7]);
        for dest in 2..LEVELS {
            // vacancies at dest = own attrition + promotions out of dest
            assert_eq!(s.promoted_into[dest - 1], s.departures[dest - 1] + s.promoted_into[dest]);
        }
        assert_eq!(s.hires, s.departures[0] + s.promoted_into[1]);
    }

    #[test]
    fn take_indices_preserves_order() {
        let mut v: Vec<Agent> = (0..5).map(|i| Agent::new(AgentId(i), Gender::Man, 0.0)).collect();
        let t = take_indices(&mut v, &[3, 0]);
        assert_eq!(t.iter().map(|a| a.id.0).collect::<Vec<_>>(), vec![3, 0]);
        assert_eq!(v.iter().map(|a| a.id.0).collect::<Vec<_>>(), vec![1, 2, 4]);
    }
}
