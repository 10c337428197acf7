//! Survival selection: shrinking a combined population back to capacity.
//!
//! All engines keep every front before the critical front `F_i*`, discard
//! every front after it, and remove individuals from `F_i*` by smallest
//! `(crowding distance, tie key)`. They differ in which crowding distance is
//! used:
//!
//! * [`select_classic`]: the distance computed once before any removal.
//! * [`select_current_cd`]: the distance of the individuals still present,
//!   maintained incrementally by a [`SelectionWorkspace`].
//! * [`naive_current_cd_oracle`]: same contract as `select_current_cd`, but
//!   recomputes every distance from scratch after each removal.
//! * [`select_steady_state`]: one removal from `N + 1` individuals.
//!
//! Tie keys are drawn from the supplied generator once per selection, for
//! the members of `F_i*` in position order, so two engines given clones of
//! the same generator see identical keys.

mod heap;
mod workspace;

pub use heap::{IndexedMinHeap, QueueKey};
pub use workspace::{Removal, SelectionWorkspace};

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::ranking::{crowding_distance, FrontPartition};
use crate::rng::RngHandle;
use crate::types::{Individual, Population};

/// Removed individuals in removal order, with their crowding distance at
/// the moment of removal.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RemovalTrace {
    pub removals: Vec<Removal>,
}

impl RemovalTrace {
    pub fn len(&self) -> usize {
        self.removals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.removals.is_empty()
    }

    /// Largest at-removal crowding distance, if anything was removed.
    pub fn max_cdis(&self) -> Option<f64> {
        self.removals.iter().map(|r| r.cdis).max_by(f64::total_cmp)
    }
}

#[derive(Debug, Clone)]
pub struct Survival {
    pub population: Population,
    pub trace: RemovalTrace,
    /// Priority-queue operations (current-crowding-distance engine only).
    pub queue_operations: u64,
}

impl Survival {
    pub fn survivor_ids(&self) -> Vec<u64> {
        self.population.members().iter().map(|x| x.id).collect()
    }
}

/// Which survival engine to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Engine {
    Classic,
    CurrentCd,
}

impl std::str::FromStr for Engine {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "classic" | "initial-cd" => Ok(Self::Classic),
            "current-cd" | "current" => Ok(Self::CurrentCd),
            other => Err(Error::Config(format!("unknown selection engine {other:?}"))),
        }
    }
}

impl std::fmt::Display for Engine {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Classic => "classic",
            Self::CurrentCd => "current-cd",
        })
    }
}

/// Runs `engine` on `combined`.
pub fn select(
    engine: Engine,
    combined: Vec<Individual>,
    capacity: usize,
    partition: &FrontPartition,
    rng: &mut RngHandle,
) -> Result<Survival> {
    match engine {
        Engine::Classic => select_classic(combined, capacity, partition, rng),
        Engine::CurrentCd => select_current_cd(combined, capacity, partition, rng),
    }
}

/// Draws a fresh tie key for every member of `front`, in the order given.
pub fn assign_tie_keys(pop: &mut [Individual], front: &[usize], rng: &mut RngHandle) {
    for &i in front {
        pop[i].tie_key = rng.unit();
    }
}

struct Plan {
    critical: usize,
    removals: usize,
}

fn plan(combined: &[Individual], capacity: usize, partition: &FrontPartition) -> Result<Plan> {
    debug_assert_eq!(partition.total(), combined.len());
    let (critical, before) = partition.critical_front(capacity).ok_or(Error::Underfull {
        capacity,
        available: combined.len(),
    })?;
    Ok(Plan {
        critical,
        removals: before + partition.fronts[critical].len() - capacity,
    })
}

fn by_key(pop: &[Individual], a: usize, b: usize) -> Ordering {
    let (x, y) = (&pop[a], &pop[b]);
    x.cdis
        .unwrap_or(f64::INFINITY)
        .total_cmp(&y.cdis.unwrap_or(f64::INFINITY))
        .then(x.tie_key.total_cmp(&y.tie_key))
        .then(a.cmp(&b))
}

fn assemble(
    combined: Vec<Individual>,
    capacity: usize,
    keep: &[bool],
    trace: RemovalTrace,
    queue_operations: u64,
) -> Survival {
    let members: Vec<Individual> = combined
        .into_iter()
        .zip(keep)
        .filter_map(|(x, &k)| k.then_some(x))
        .collect();
    debug_assert_eq!(members.len(), capacity);
    Survival {
        population: Population::new(members, capacity),
        trace,
        queue_operations,
    }
}

fn keep_mask(len: usize, partition: &FrontPartition, critical: usize) -> Vec<bool> {
    let mut keep = vec![false; len];
    for front in &partition.fronts[..=critical] {
        for &i in front {
            keep[i] = true;
        }
    }
    keep
}

fn require_crowding(pop: &[Individual], front: &[usize]) -> Result<()> {
    match front.iter().find(|&&i| pop[i].cdis.is_none()) {
        Some(&i) => Err(Error::MissingCrowding { id: pop[i].id }),
        None => Ok(()),
    }
}

/// Classic NSGA-II selection: removes the individuals of `F_i*` with the
/// smallest crowding distance computed before any removal. Requires `cdis`
/// on `F_i*`.
pub fn select_classic(
    mut combined: Vec<Individual>,
    capacity: usize,
    partition: &FrontPartition,
    rng: &mut RngHandle,
) -> Result<Survival> {
    let plan = plan(&combined, capacity, partition)?;
    let front = &partition.fronts[plan.critical];
    require_crowding(&combined, front)?;
    assign_tie_keys(&mut combined, front, rng);

    let mut order = front.clone();
    order.sort_unstable_by(|&a, &b| by_key(&combined, a, b));
    let mut keep = keep_mask(combined.len(), partition, plan.critical);
    let mut trace = RemovalTrace::default();
    for &i in &order[..plan.removals] {
        keep[i] = false;
        trace.removals.push(Removal {
            id: combined[i].id,
            objectives: combined[i].obj(),
            cdis: combined[i].cdis.unwrap_or(f64::INFINITY),
        });
    }
    Ok(assemble(combined, capacity, &keep, trace, 0))
}

/// Removes, one at a time, an individual of `F_i*` with the smallest current
/// crowding distance, updating only the affected neighbours.
pub fn select_current_cd(
    combined: Vec<Individual>,
    capacity: usize,
    partition: &FrontPartition,
    rng: &mut RngHandle,
) -> Result<Survival> {
    select_current_cd_checked(combined, capacity, partition, rng, false)
}

/// [`select_current_cd`] that, when `validate` is set, asserts workspace
/// consistency after every removal.
pub fn select_current_cd_checked(
    mut combined: Vec<Individual>,
    capacity: usize,
    partition: &FrontPartition,
    rng: &mut RngHandle,
    validate: bool,
) -> Result<Survival> {
    let plan = plan(&combined, capacity, partition)?;
    let front = &partition.fronts[plan.critical];
    assign_tie_keys(&mut combined, front, rng);

    let mut ws = SelectionWorkspace::new(&combined, front);
    let mut trace = RemovalTrace::default();
    for _ in 0..plan.removals {
        let removal = ws.remove_min().expect("front larger than removal count");
        trace.removals.push(removal);
        if validate {
            assert!(ws.is_consistent(), "selection workspace out of sync");
        }
    }
    let mut keep = keep_mask(combined.len(), partition, plan.critical);
    for &i in front {
        keep[i] = false;
    }
    for i in ws.surviving_positions() {
        keep[i] = true;
    }
    Ok(assemble(
        combined,
        capacity,
        &keep,
        trace,
        ws.queue_operations(),
    ))
}

/// Reference engine for [`select_current_cd`]: recomputes the crowding
/// distance of all remaining members of `F_i*` from scratch before every
/// removal. Survivors keep the crowding distance they had on entry.
pub fn naive_current_cd_oracle(
    mut combined: Vec<Individual>,
    capacity: usize,
    partition: &FrontPartition,
    rng: &mut RngHandle,
) -> Result<Survival> {
    let plan = plan(&combined, capacity, partition)?;
    let front = &partition.fronts[plan.critical];
    assign_tie_keys(&mut combined, front, rng);

    let entry: Vec<Option<f64>> = combined.iter().map(|x| x.cdis).collect();
    let mut remaining = front.clone();
    let mut trace = RemovalTrace::default();
    for _ in 0..plan.removals {
        crowding_distance(&mut combined, &remaining);
        let (slot, &victim) = remaining
            .iter()
            .enumerate()
            .min_by(|a, b| by_key(&combined, *a.1, *b.1))
            .expect("front larger than removal count");
        trace.removals.push(Removal {
            id: combined[victim].id,
            objectives: combined[victim].obj(),
            cdis: combined[victim].cdis.unwrap_or(f64::INFINITY),
        });
        remaining.remove(slot);
    }
    for (x, c) in combined.iter_mut().zip(entry) {
        x.cdis = c;
    }
    let mut keep = keep_mask(combined.len(), partition, plan.critical);
    for &i in front {
        keep[i] = false;
    }
    for &i in &remaining {
        keep[i] = true;
    }
    Ok(assemble(combined, capacity, &keep, trace, 0))
}

/// Steady-state selection: from `capacity + 1` individuals, removes the one
/// in the last front with the smallest `(cdis, tie key)`. A singleton last
/// front is removed outright (its crowding distance is infinite).
pub fn select_steady_state(
    mut combined: Vec<Individual>,
    capacity: usize,
    partition: &FrontPartition,
    rng: &mut RngHandle,
) -> Result<Survival> {
    if combined.len() != capacity + 1 {
        return Err(Error::SteadyStateSize {
            expected: capacity + 1,
            actual: combined.len(),
        });
    }
    let last = partition
        .fronts
        .last()
        .ok_or(Error::Empty("steady-state selection on an empty partition"))?;
    if last.len() > 1 {
        require_crowding(&combined, last)?;
    }
    assign_tie_keys(&mut combined, last, rng);
    let victim = *last
        .iter()
        .min_by(|&&a, &&b| by_key(&combined, a, b))
        .expect("fronts are non-empty");
    let trace = RemovalTrace {
        removals: vec![Removal {
            id: combined[victim].id,
            objectives: combined[victim].obj(),
            cdis: combined[victim].cdis.unwrap_or(f64::INFINITY),
        }],
    };
    let mut keep = vec![true; combined.len()];
    keep[victim] = false;
    Ok(assemble(combined, capacity, &keep, trace, 0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::eval_one_min_max;
    use crate::ranking::{crowding_up_to, non_dominated_sort};
    use crate::types::{Genome, Objectives};

    fn omm_population(values: &[u32], n: u32) -> Vec<Individual> {
        values
            .iter()
            .enumerate()
            .map(|(i, &v)| {
                Individual::with_objectives(i as u64, Genome::zeros(1), Objectives::new(v, n - v))
            })
            .collect()
    }

    fn prepared(mut pop: Vec<Individual>, capacity: usize) -> (Vec<Individual>, FrontPartition) {
        let p = non_dominated_sort(&mut pop);
        let (crit, _) = p
            .critical_front(capacity)
            .unwrap_or((p.len().saturating_sub(1), 0));
        crowding_up_to(&mut pop, &p, crit);
        (pop, p)
    }

    fn f1_values(s: &Survival) -> Vec<u32> {
        let mut v: Vec<u32> = s.population.members().iter().map(|x| x.obj().f1).collect();
        v.sort_unstable();
        v
    }

    #[test]
    fn classic_on_adversarial_six() {
        let (pop, p) = prepared(omm_population(&[0, 1, 2, 3, 4, 6], 6), 3);
        let s = select_classic(pop, 3, &p, &mut RngHandle::new(1)).unwrap();
        assert_eq!(f1_values(&s), vec![0, 4, 6]);
        assert_eq!(s.trace.len(), 3);
    }

    #[test]
    fn classic_distinct_distances_ignore_ties() {
        let (pop, p) = prepared(omm_population(&[0, 1, 3, 6, 10], 10), 3);
        // Inner distances: f1=1 -> 0.6, f1=3 -> 1.0, f1=6 -> 1.4.
        for seed in 0..10 {
            let s = select_classic(pop.clone(), 3, &p, &mut RngHandle::new(seed)).unwrap();
            assert_eq!(f1_values(&s), vec![0, 6, 10]);
        }
    }

    #[test]
    fn classic_requires_crowding() {
        let mut pop = omm_population(&[0, 1, 2], 2);
        let p = non_dominated_sort(&mut pop);
        assert!(matches!(
            select_classic(pop, 2, &p, &mut RngHandle::new(0)),
            Err(Error::MissingCrowding { .. })
        ));
    }

    #[test]
    fn underfull_is_an_error() {
        let (pop, p) = prepared(omm_population(&[0, 1], 1), 2);
        assert!(matches!(
            select_current_cd(pop, 3, &p, &mut RngHandle::new(0)),
            Err(Error::Underfull { .. })
        ));
    }

    #[test]
    fn oracle_first_removal_on_adversarial_six() {
        let (pop, p) = prepared(omm_population(&[0, 1, 2, 3, 4, 6], 6), 3);
        let s = naive_current_cd_oracle(pop, 3, &p, &mut RngHandle::new(3)).unwrap();
        let first = s.trace.removals[0];
        assert!(first.id >= 1 && first.id <= 3);
        assert!((first.cdis - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn zero_removals_is_identity() {
        let (pop, p) = prepared(omm_population(&[0, 2, 5], 5), 3);
        let s = naive_current_cd_oracle(pop.clone(), 3, &p, &mut RngHandle::new(0)).unwrap();
        assert!(s.trace.is_empty());
        assert_eq!(s.survivor_ids(), vec![0, 1, 2]);
        let s = select_current_cd(pop, 3, &p, &mut RngHandle::new(0)).unwrap();
        assert!(s.trace.is_empty());
    }

    #[test]
    fn current_cd_matches_oracle_with_duplicates() {
        let mut rng = RngHandle::new(77);
        for case in 0..300 {
            let n = 1 + rng.index(12);
            let size = 1 + rng.index(16);
            let pop: Vec<Individual> = (0..size)
                .map(|i| {
                    let g = Genome::random(n, &mut rng);
                    let o = eval_one_min_max(&g);
                    Individual::with_objectives(i as u64, g, o)
                })
                .collect();
            let capacity = 1 + rng.index(size);
            let (pop, p) = prepared(pop, capacity);
            let a = select_current_cd_checked(
                pop.clone(),
                capacity,
                &p,
                &mut RngHandle::new(case),
                true,
            )
            .unwrap();
            let b = naive_current_cd_oracle(pop, capacity, &p, &mut RngHandle::new(case)).unwrap();
            assert_eq!(a.survivor_ids(), b.survivor_ids(), "case {case}");
            assert_eq!(a.trace, b.trace, "case {case}");
        }
    }

    #[test]
    fn steady_state_examples() {
        let (pop, p) = prepared(omm_population(&[0, 2, 6], 6), 2);
        let s = select_steady_state(pop, 2, &p, &mut RngHandle::new(0)).unwrap();
        assert_eq!(f1_values(&s), vec![0, 6]);

        let (pop, p) = prepared(omm_population(&[0, 2, 6], 6), 2);
        assert!(matches!(
            select_steady_state(pop, 3, &p, &mut RngHandle::new(0)),
            Err(Error::SteadyStateSize { .. })
        ));
    }

    #[test]
    fn steady_state_equals_single_oracle_step() {
        let mut rng = RngHandle::new(5);
        for case in 0..100 {
            let n = 8 + rng.index(10) as u32;
            let values: Vec<u32> = (0..9).map(|_| rng.index(n as usize + 1) as u32).collect();
            let (pop, p) = prepared(omm_population(&values, n), 8);
            let a = select_steady_state(pop.clone(), 8, &p, &mut RngHandle::new(case)).unwrap();
            let b = naive_current_cd_oracle(pop, 8, &p, &mut RngHandle::new(case)).unwrap();
            assert_eq!(a.survivor_ids(), b.survivor_ids());
            assert_eq!(a.trace, b.trace);
        }
    }

    fn random_omm(
        rng: &mut RngHandle,
        n: usize,
        size: usize,
        with_extremes: bool,
    ) -> Vec<Individual> {
        let mut genomes: Vec<Genome> = (0..size).map(|_| Genome::random(n, rng)).collect();
        if with_extremes {
            genomes[rng.index(size / 2)] = Genome::zeros(n);
            genomes[size / 2 + rng.index(size - size / 2)] = Genome::ones(n);
        }
        genomes
            .into_iter()
            .enumerate()
            .map(|(i, g)| {
                let o = eval_one_min_max(&g);
                Individual::with_objectives(i as u64, g, o)
            })
            .collect()
    }

    fn run_engine(
        which: usize,
        pop: Vec<Individual>,
        cap: usize,
        p: &FrontPartition,
        seed: u64,
    ) -> Survival {
        let mut rng = RngHandle::new(seed);
        match which {
            0 => select_classic(pop, cap, p, &mut rng),
            1 => select_current_cd(pop, cap, p, &mut rng),
            _ => select_steady_state(pop, cap, p, &mut rng),
        }
        .unwrap()
    }

    #[test]
    fn extremes_and_infinite_distances_survive() {
        let mut rng = RngHandle::new(31);
        for case in 0..300 {
            let n = 4 + rng.index(30);
            let cap = 4 + rng.index(20);
            for which in 0..3 {
                let size = if which == 2 { cap + 1 } else { 2 * cap };
                let (pop, p) = prepared(random_omm(&mut rng, n, size, true), cap);
                let infinite: Vec<u64> = pop
                    .iter()
                    .filter(|x| x.cdis == Some(f64::INFINITY))
                    .map(|x| x.id)
                    .collect();
                let s = run_engine(which, pop, cap, &p, case);
                let v = f1_values(&s);
                assert_eq!((v[0], *v.last().unwrap()), (0, n as u32));
                let ids = s.survivor_ids();
                assert!(infinite.iter().all(|id| ids.contains(id)));
            }
        }
    }

    #[test]
    fn removal_bound_with_extremes_present() {
        let mut rng = RngHandle::new(8);
        for case in 0..300 {
            let n = 10 + rng.index(200);
            let cap = 4 + rng.index(40);
            for which in 1..3 {
                let size = if which == 2 { cap + 1 } else { 2 * cap };
                let (pop, p) = prepared(random_omm(&mut rng, n, size, true), cap);
                let s = run_engine(which, pop, cap, &p, case);
                let limit = 4.0 / (cap as f64 - 3.0);
                assert!(s.trace.removals.iter().all(|r| r.cdis < limit));
            }
        }
    }

    #[test]
    fn steady_state_removes_unique_finite() {
        let (pop, p) = prepared(omm_population(&[0, 0, 5, 10, 10], 10), 4);
        let finite: Vec<u64> = pop
            .iter()
            .filter(|x| x.cdis.unwrap().is_finite())
            .map(|x| x.id)
            .collect();
        assert_eq!(finite.len(), 1);
        let s = select_steady_state(pop, 4, &p, &mut RngHandle::new(0)).unwrap();
        assert_eq!(s.trace.removals[0].id, finite[0]);
    }

    #[test]
    fn queue_operations_are_logarithmic_per_removal() {
        let mut rng = RngHandle::new(4);
        for case in 0..100 {
            let cap = 4 + rng.index(200);
            let (pop, p) = prepared(random_omm(&mut rng, 300, 2 * cap, false), cap);
            let r = 2 * cap;
            let s = select_current_cd(pop, cap, &p, &mut RngHandle::new(case)).unwrap();
            let bound = 8.0 * (r - cap) as f64 * (r as f64).log2();
            assert!(
                (s.queue_operations as f64) <= bound,
                "{} > {bound}",
                s.queue_operations
            );
        }
    }

    /// Sorted f1 values and the gap containing `h + 0.5`.
    fn gap_around(values: &[u32], h: u32) -> u32 {
        let lo = values.iter().copied().filter(|&v| v <= h).max();
        let hi = values.iter().copied().filter(|&v| v > h).min();
        match (lo, hi) {
            (Some(a), Some(b)) => b - a,
            _ => u32::MAX,
        }
    }

    #[test]
    fn removals_never_open_long_gaps() {
        let mut rng = RngHandle::new(12);
        for case in 0..200 {
            let n = 20 + rng.index(200);
            let cap = 4 + rng.index(30);
            let limit = (2.0 * n as f64 / (cap as f64 - 3.0)).max(1.0);
            for which in 1..3 {
                let size = if which == 2 { cap + 1 } else { 2 * cap };
                let (pop, p) = prepared(random_omm(&mut rng, n, size, true), cap);
                let mut before: Vec<u32> = pop.iter().map(|x| x.obj().f1).collect();
                before.sort_unstable();
                let after = f1_values(&run_engine(which, pop, cap, &p, case));
                for h in 0..n as u32 {
                    let g = gap_around(&after, h);
                    if f64::from(g) > limit {
                        assert!(gap_around(&before, h) >= g, "case {case} h={h}");
                    }
                }
            }
        }
    }
}
