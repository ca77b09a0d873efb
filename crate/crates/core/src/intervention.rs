//! Quota-based promotion policy and the meso-weight switch that accompanies it.

use serde::{Deserialize, Serialize};

use crate::agent::{rank_order, Agent, Gender};
use crate::norms::NormsParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TurnRange {
    pub start: u32,
    pub end: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InterventionParams {
    /// Target percentage of women at every level above entry.
    pub k: f64,
    /// Inclusive range of turns during which promotions follow the quota.
    pub i_range: TurnRange,
}

impl Default for InterventionParams {
    fn default() -> Self {
        Self {
            k: 0.0,
            i_range: TurnRange { start: 0, end: 0 },
        }
    }
}

pub fn intervention_active(turn_index: u32, range: TurnRange) -> bool {
    range.start <= turn_index && turn_index <= range.end
}

/// Meso weight in force on `turn_index`: `w0` before the intervention starts,
/// `w` from then on (including after the quota window closes).
pub fn current_w(turn_index: u32, intervention: &InterventionParams, norms: &NormsParams) -> f64 {
    if turn_index < intervention.i_range.start {
        norms.w0
    } else {
        norms.w
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuotaSelection {
    /// Indices into the source roster, quota picks first.
    pub indices: Vec<usize>,
    /// How many of `indices` were promoted to meet the quota.
    pub quota_women: usize,
}

/// Chooses `n_vac` agents from `source` to fill `dest`.
///
/// The quota target is `ceil(capacity * k / 100) - (women already at dest)`,
/// limited by the vacancies and by the women available below. The best-ranked
/// women fill the target; the remaining slots go to the best-ranked agents of
/// either gender.
pub fn quota_promote(source: &[Agent], dest: &[Agent], dest_capacity: usize, n_vac: usize, k: f64) -> QuotaSelection {
    let n_vac = n_vac.min(source.len());
    let n_f = dest.iter().filter(|a| a.is_woman()).count();
    let required = (dest_capacity as f64 * k / 100.0 - 1e-9).ceil().max(0.0) as usize;

    let mut ranked: Vec<usize> = (0..source.len()).collect();
    ranked.sort_unstable_by(|&i, &j| rank_order(&source[i], &source[j]));

    let women: Vec<usize> = ranked
        .iter()
        .copied()
        .filter(|&i| source[i].gender == Gender::Woman)
        .collect();
    let target = required.saturating_sub(n_f).min(n_vac).min(women.len());

    let mut taken = vec![false; source.len()];
    let mut indices = Vec::with_capacity(n_vac);
    for &i in &women[..target] {
        taken[i] = true;
        indices.push(i);
    }
    for &i in &ranked {
        if indices.len() == n_vac {
            break;
        }
        if !taken[i] {
            taken[i] = true;
            indices.push(i);
        }
    }
    QuotaSelection {
        indices,
        quota_women: target,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::agent::AgentId;
    use crate::company::top_by_rank;
    use proptest::prelude::*;

    fn roster(spec: &[(Gender, f64)], first_id: u64) -> Vec<Agent> {
        spec.iter()
            .enumerate()
            .map(|(i, &(g, p))| Agent::new(AgentId(first_id + i as u64), g, p))
            .collect()
    }

    fn dest_with_women(n_women: usize, n: usize) -> Vec<Agent> {
        (0..n)
            .map(|i| {
                let g = if i < n_women { Gender::Woman } else { Gender::Man };
                Agent::new(AgentId(1000 + i as u64), g, 0.0)
            })
            .collect()
    }

    #[test]
    fn active_window_is_inclusive() {
        let r = TurnRange { start: 168, end: 240 };
        assert!(intervention_active(168, r));
        assert!(intervention_active(240, r));
        assert!(!intervention_active(241, r));
        assert!(!intervention_active(167, r));
    }

    #[test]
    fn weight_switches_once_and_persists() {
        let iv = InterventionParams {
            k: 70.0,
            i_range: TurnRange { start: 168, end: 240 },
        };
        let norms = NormsParams {
            w0: 0.0,
            w: 0.4,
            ..NormsParams::default()
        };
        assert_eq!(current_w(100, &iv, &norms), 0.0);
        assert_eq!(current_w(167, &iv, &norms), 0.0);
        assert_eq!(current_w(168, &iv, &norms), 0.4);
        assert_eq!(current_w(1500, &iv, &norms), 0.4);
    }

    #[test]
    fn quota_fills_target_with_top_women() {
        use Gender::*;
        let source = roster(
            &[(Man, 90.0), (Man, 80.0), (Woman, 70.0), (Woman, 60.0), (Woman, 50.0)],
            0,
        );
        // n=10, K=70, n_f=5 leaves 5 filled + 2 vacancies.
        let dest = dest_with_women(5, 8);
        let sel = quota_promote(&source, &dest, 10, 2, 70.0);
        assert_eq!(sel.quota_women, 2);
        assert_eq!(sel.indices, vec![2, 3]);
    }

    #[test]
    fn quota_already_met_falls_back_to_merit() {
        use Gender::*;
        let source = roster(&[(Man, 90.0), (Woman, 10.0), (Man, 80.0)], 0);
        let dest = dest_with_women(7, 8);
        let sel = quota_promote(&source, &dest, 10, 2, 70.0);
        assert_eq!(sel.quota_women, 0);
        assert_eq!(sel.indices, vec![0, 2]);
    }

    #[test]
    fn quota_limited_by_available_women() {
        use Gender::*;
        let source = roster(&[(Man, 90.0), (Man, 80.0), (Woman, 10.0), (Man, 70.0)], 0);
        let dest = dest_with_women(4, 7);
        let sel = quota_promote(&source, &dest, 10, 3, 70.0);
        assert_eq!(sel.quota_women, 1);
        assert_eq!(sel.indices, vec![2, 0, 1]);
    }

    proptest! {
        #[test]
        fn zero_quota_equals_merit(ps in proptest::collection::vec((any::<bool>(), -100.0f64..100.0), 1..60), n in 0usize..60, n_f in 0usize..10) {
            let spec: Vec<(Gender, f64)> = ps.iter().map(|&(m, p)| (if m { Gender::Man } else { Gender::Woman }, p)).collect();
            let source = roster(&spec, 0);
            let dest = dest_with_women(n_f, 10);
            let n = n.min(source.len());
            let sel = quota_promote(&source, &dest, 20, n, 0.0);
            prop_assert_eq!(sel.indices, top_by_rank(&source, n));
        }

        #[test]
        fn quota_women_are_top_women(ps in proptest::collection::vec((any::<bool>(), -100.0f64..100.0), 1..60), n in 0usize..60, n_f in 0usize..10, k in 0.0f64..=100.0) {
            let spec: Vec<(Gender, f64)> = ps.iter().map(|&(m, p)| (if m { Gender::Man } else { Gender::Woman }, p)).collect();
            let source = roster(&spec, 0);
            let dest = dest_with_women(n_f, 10);
            let n = n.min(source.len());
            let sel = quota_promote(&source, &dest, 20, n, k);
            prop_assert_eq!(sel.indices.len(), n);
            let mut women: Vec<&Agent> = source.iter().filter(|a| a.is_woman()).collect();
            women.sort_by(|a, b| rank_order(a, b));
            for (slot, &i) in sel.indices[..sel.quota_women].iter().enumerate() {
                prop_assert_eq!(source[i].id, women[slot].id);
            }
            let women_after = n_f + sel.indices.iter().filter(|&&i| source[i].is_woman()).count();
            let required = (20.0 * k / 100.0 - 1e-9).ceil() as usize;
            let women_below = women.len();
            if women_below >= required.saturating_sub(n_f) && n >= required.saturating_sub(n_f) {
                prop_assert!(women_after >= required.min(n_f + n));
            }
        }
    }
}
