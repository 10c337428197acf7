//! Optimizer loops: generational NSGA-II with initial or current crowding
//! distance, and the steady-state NSGA-II producing one offspring per
//! iteration.
//!
//! An [`Optimizer`] advances one generation (one iteration for the
//! steady-state variant) per [`Optimizer::step`]. It keeps the population in
//! ascending id order, counts fitness evaluations, tracks the set of covered
//! first-objective values and, on `OneMinMax` with `N >= 4`, checks the
//! runtime guarantees proven for the variant. Broken guarantees are recorded
//! as [`Violation`]s rather than panics so that a harness can report them.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::FrontSubset;
use crate::problems::{Evaluator, Problem, ProblemKind};
use crate::ranking::{crowding_distance, crowding_up_to, non_dominated_sort};
use crate::rng::RngHandle;
use crate::survival::{
    select_classic, select_current_cd, select_steady_state, RemovalTrace, Survival,
};
use crate::types::{random_population, Individual};
use crate::variation::{mutate, select_parents, MatingScheme, MutationOp};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Variant {
    /// Removal by the crowding distance computed once per generation.
    ClassicCd,
    /// Removal one at a time by the current crowding distance.
    CurrentCd,
    /// One offspring per iteration, one removal.
    SteadyState,
}

impl Variant {
    pub const ALL: [Variant; 3] = [Variant::ClassicCd, Variant::CurrentCd, Variant::SteadyState];

    pub fn is_steady_state(self) -> bool {
        self == Variant::SteadyState
    }

    /// Mating scheme used when none is configured.
    pub fn default_mating(self) -> MatingScheme {
        match self {
            Variant::SteadyState => MatingScheme::Random,
            _ => MatingScheme::Fair,
        }
    }

    /// Iterations that correspond to one generation of a generational run.
    pub fn iterations_per_generation(self, capacity: usize) -> u64 {
        match self {
            Variant::SteadyState => capacity as u64,
            _ => 1,
        }
    }
}

impl std::str::FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "classic" | "initial-cd" => Ok(Self::ClassicCd),
            "current-cd" => Ok(Self::CurrentCd),
            "steady-state" => Ok(Self::SteadyState),
            other => Err(Error::Config(format!(
                "unknown variant {other:?} (expected classic, current-cd or steady-state)"
            ))),
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::ClassicCd => "classic",
            Self::CurrentCd => "current-cd",
            Self::SteadyState => "steady-state",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlgorithmConfig {
    pub variant: Variant,
    pub problem: Problem,
    /// Population size `N`.
    pub capacity: usize,
    pub mating: MatingScheme,
    pub mutation: MutationOp,
    /// Generations for the generational variants, iterations for the
    /// steady-state variant.
    pub max_generations: u64,
    pub seed: u64,
}

impl AlgorithmConfig {
    /// `OneMinMax` of size `n` with the variant's default mating scheme and
    /// one-bit mutation.
    pub fn one_min_max(
        variant: Variant,
        n: usize,
        capacity: usize,
        max_generations: u64,
        seed: u64,
    ) -> Self {
        Self {
            variant,
            problem: Problem::one_min_max(n),
            capacity,
            mating: variant.default_mating(),
            mutation: MutationOp::OneBit,
            max_generations,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.problem.n == 0 {
            return Err(Error::Config("problem size must be positive".into()));
        }
        if self.problem.n > u32::MAX as usize / 2 {
            return Err(Error::Config(format!(
                "problem size {} is too large",
                self.problem.n
            )));
        }
        if self.capacity < 2 {
            return Err(Error::Config(format!(
                "population size must be at least 2, got {}",
                self.capacity
            )));
        }
        if self.variant.is_steady_state() && self.mating == MatingScheme::Fair {
            return Err(Error::Config(
                "fair mating selection is not defined for the steady-state variant".into(),
            ));
        }
        Ok(())
    }

    /// The proven guarantees are checked only on `OneMinMax` with `N >= 4`.
    pub fn guarantees_apply(&self) -> bool {
        self.problem.kind == ProblemKind::OneMinMax && self.capacity >= 4
    }

    /// Whether the removal bound and the gap guarantee are checked: current
    /// crowding distance, and steady state without tournament mating.
    pub fn approximation_guarantee_applies(&self) -> bool {
        self.guarantees_apply()
            && match self.variant {
                Variant::ClassicCd => false,
                Variant::CurrentCd => true,
                Variant::SteadyState => self.mating != MatingScheme::BinaryTournament,
            }
    }

    /// `max{2n / (N - 3), 1}`.
    pub fn mei_limit(&self) -> f64 {
        (2.0 * self.problem.n as f64 / (self.capacity as f64 - 3.0)).max(1.0)
    }

    /// `4 / (N - 3)`.
    pub fn removal_limit(&self) -> f64 {
        4.0 / (self.capacity as f64 - 3.0)
    }
}

/// A broken runtime guarantee.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Violation {
    ExtremeLost {
        generation: u64,
    },
    MaxF1Decreased {
        generation: u64,
        before: u32,
        after: u32,
    },
    RemovalBound {
        generation: u64,
        cdis: f64,
        limit: f64,
    },
    MeiIncreased {
        generation: u64,
        before: u32,
        after: u32,
    },
    MeiAboveLimit {
        generation: u64,
        mei: u32,
        limit: f64,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Self::ExtremeLost { generation } => {
                write!(f, "generation {generation}: an extreme point was lost")
            }
            Self::MaxF1Decreased {
                generation,
                before,
                after,
            } => {
                write!(
                    f,
                    "generation {generation}: largest f1 dropped from {before} to {after}"
                )
            }
            Self::RemovalBound {
                generation,
                cdis,
                limit,
            } => {
                write!(f, "generation {generation}: removed an individual with crowding distance {cdis} >= {limit}")
            }
            Self::MeiIncreased {
                generation,
                before,
                after,
            } => {
                write!(
                    f,
                    "generation {generation}: MEI rose from {before} to {after} above the limit"
                )
            }
            Self::MeiAboveLimit {
                generation,
                mei,
                limit,
            } => {
                write!(
                    f,
                    "generation {generation}: MEI {mei} exceeds the settled limit {limit}"
                )
            }
        }
    }
}

/// State of the population after one generation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GenerationRecord {
    /// 0 for the initial population.
    pub generation: u64,
    pub evaluations: u64,
    pub extremes: bool,
    pub mei: u32,
    pub distinct: usize,
    pub max_f1: u32,
    /// Largest at-removal crowding distance of this generation's selection.
    pub max_removal_cdis: Option<f64>,
}

/// Everything recorded by [`run`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunTrace {
    pub config: AlgorithmConfig,
    pub records: Vec<GenerationRecord>,
    /// Sorted distinct f1 values of each generation, parallel to `records`.
    pub coverage: Vec<Vec<u32>>,
    /// First generation whose population holds both extremes.
    pub t0: Option<u64>,
    /// First generation at or after `t0` with `MEI <= L`, when checked.
    pub t1: Option<u64>,
    pub violations: Vec<Violation>,
    /// Removals checked against the crowding-distance bound.
    pub checked_removals: u64,
}

/// Whether the population holds an individual maximising each objective
/// (for `OneMinMax`: `0^n` and `1^n`).
pub fn detect_extremes(members: &[Individual], problem: Problem) -> bool {
    let top = problem.max_value();
    let mut first = false;
    let mut second = false;
    for x in members {
        let o = x.obj();
        first |= o.f1 == top;
        second |= o.f2 == top;
    }
    first && second
}

/// Multiset of first-objective values with a cached maximal empty interval.
#[derive(Debug, Clone)]
struct Coverage {
    counts: Vec<u32>,
    distinct: usize,
    mei: u32,
    min: u32,
    max: u32,
    dirty: bool,
}

impl Coverage {
    fn new(n: usize) -> Self {
        Self {
            counts: vec![0; n + 1],
            distinct: 0,
            mei: 0,
            min: 0,
            max: 0,
            dirty: true,
        }
    }

    fn rebuild(&mut self, members: &[Individual]) {
        self.counts.iter_mut().for_each(|c| *c = 0);
        self.distinct = 0;
        for x in members {
            self.add(x.obj().f1);
        }
        self.dirty = true;
    }

    fn add(&mut self, v: u32) {
        let c = &mut self.counts[v as usize];
        *c += 1;
        if *c == 1 {
            self.distinct += 1;
            self.dirty = true;
        }
    }

    fn remove(&mut self, v: u32) {
        let c = &mut self.counts[v as usize];
        *c -= 1;
        if *c == 0 {
            self.distinct -= 1;
            self.dirty = true;
        }
    }

    fn refresh(&mut self) {
        if !self.dirty {
            return;
        }
        let mut prev: Option<u32> = None;
        let mut mei = 0;
        let mut min = 0;
        for (v, &c) in self.counts.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let v = v as u32;
            match prev {
                Some(p) => mei = mei.max(v - p),
                None => min = v,
            }
            prev = Some(v);
        }
        self.mei = mei;
        self.min = min;
        self.max = prev.unwrap_or(0);
        self.dirty = false;
    }

    fn values(&self) -> Vec<u32> {
        (0..self.counts.len() as u32)
            .filter(|&v| self.counts[v as usize] > 0)
            .collect()
    }
}

#[derive(Debug, Clone, Default)]
struct Monitor {
    t0: Option<u64>,
    t1: Option<u64>,
    prev_mei: u32,
    prev_max_f1: u32,
    violations: Vec<Violation>,
    checked_removals: u64,
}

/// Step-wise optimizer.
#[derive(Debug, Clone)]
pub struct Optimizer {
    config: AlgorithmConfig,
    rng: RngHandle,
    evaluator: Evaluator,
    population: Vec<Individual>,
    next_id: u64,
    generation: u64,
    coverage: Coverage,
    last_removals: RemovalTrace,
    monitor: Monitor,
}

impl Optimizer {
    /// Validates `config` and evaluates a uniformly random initial
    /// population (generation 0).
    pub fn new(config: AlgorithmConfig) -> Result<Self> {
        config.validate()?;
        let mut rng = RngHandle::new(config.seed);
        let mut evaluator = Evaluator::new(config.problem);
        let mut population =
            random_population(config.problem.n, config.capacity, &mut rng)?.into_members();
        for x in &mut population {
            evaluator.evaluate_individual(x);
        }
        let mut coverage = Coverage::new(config.problem.n);
        coverage.rebuild(&population);
        let mut opt = Self {
            config,
            rng,
            evaluator,
            next_id: population.len() as u64,
            population,
            generation: 0,
            coverage,
            last_removals: RemovalTrace::default(),
            monitor: Monitor::default(),
        };
        if config.mating == MatingScheme::BinaryTournament {
            opt.rank_population();
        }
        opt.observe(false);
        Ok(opt)
    }

    pub fn config(&self) -> &AlgorithmConfig {
        &self.config
    }

    pub fn generation(&self) -> u64 {
        self.generation
    }

    pub fn evaluations(&self) -> u64 {
        self.evaluator.evaluations()
    }

    /// Current population, by ascending id.
    pub fn population(&self) -> &[Individual] {
        &self.population
    }

    /// Removals of the most recent survival selection.
    pub fn last_removals(&self) -> &RemovalTrace {
        &self.last_removals
    }

    pub fn t0(&self) -> Option<u64> {
        self.monitor.t0
    }

    pub fn t1(&self) -> Option<u64> {
        self.monitor.t1
    }

    pub fn violations(&self) -> &[Violation] {
        &self.monitor.violations
    }

    pub fn checked_removals(&self) -> u64 {
        self.monitor.checked_removals
    }

    pub fn extremes_present(&self) -> bool {
        let top = self.config.problem.max_value();
        match self.config.problem.kind {
            ProblemKind::OneMinMax => {
                self.coverage.counts[0] > 0 && self.coverage.counts[top as usize] > 0
            }
            ProblemKind::Lotz => detect_extremes(&self.population, self.config.problem),
        }
    }

    /// Maximal empty interval of the population's f1 values.
    pub fn mei(&mut self) -> u32 {
        self.coverage.refresh();
        self.coverage.mei
    }

    /// Sorted distinct f1 values of the population.
    pub fn coverage(&self) -> FrontSubset {
        FrontSubset::new(self.config.problem.n as u32, self.coverage.values())
            .expect("population is nonempty and evaluated")
    }

    pub fn record(&mut self) -> GenerationRecord {
        self.coverage.refresh();
        GenerationRecord {
            generation: self.generation,
            evaluations: self.evaluations(),
            extremes: self.extremes_present(),
            mei: self.coverage.mei,
            distinct: self.coverage.distinct,
            max_f1: self.coverage.max,
            max_removal_cdis: self.last_removals.max_cdis(),
        }
    }

    /// Runs one generation (one iteration for steady state).
    pub fn step(&mut self) -> Result<()> {
        let r_has_extremes = match self.config.variant {
            Variant::SteadyState => self.step_steady_state()?,
            _ => self.step_generational()?,
        };
        self.generation += 1;
        if self.config.mating == MatingScheme::BinaryTournament {
            self.rank_population();
        }
        self.observe(r_has_extremes);
        Ok(())
    }

    fn rank_population(&mut self) {
        let partition = non_dominated_sort(&mut self.population);
        crowding_up_to(
            &mut self.population,
            &partition,
            partition.len().saturating_sub(1),
        );
    }

    fn offspring(&mut self, parents: &[usize]) -> Vec<Individual> {
        parents
            .iter()
            .map(|&p| {
                let genome = mutate(
                    &self.population[p].genome,
                    self.config.mutation,
                    &mut self.rng,
                );
                let objectives = self.evaluator.evaluate(&genome);
                let child = Individual::with_objectives(self.next_id, genome, objectives);
                self.next_id += 1;
                child
            })
            .collect()
    }

    fn combined_has_extremes(&self, combined: &[Individual]) -> bool {
        detect_extremes(combined, self.config.problem)
    }

    fn step_generational(&mut self) -> Result<bool> {
        let n_cap = self.config.capacity;
        let parents = select_parents(&self.population, self.config.mating, n_cap, &mut self.rng)?;
        let children = self.offspring(&parents);
        let mut combined = std::mem::take(&mut self.population);
        combined.extend(children);
        let r_has_extremes = self.combined_has_extremes(&combined);

        let partition = non_dominated_sort(&mut combined);
        let survival: Survival = match self.config.variant {
            Variant::ClassicCd => {
                if let Some((critical, _)) = partition.critical_front(n_cap) {
                    crowding_distance(&mut combined, &partition.fronts[critical]);
                }
                select_classic(combined, n_cap, &partition, &mut self.rng)?
            }
            _ => select_current_cd(combined, n_cap, &partition, &mut self.rng)?,
        };
        self.population = survival.population.into_members();
        self.last_removals = survival.trace;
        self.coverage.rebuild(&self.population);
        Ok(r_has_extremes)
    }

    fn step_steady_state(&mut self) -> Result<bool> {
        let parents = select_parents(&self.population, self.config.mating, 1, &mut self.rng)?;
        let children = self.offspring(&parents);
        let child_f1 = children[0].obj().f1;
        let mut combined = std::mem::take(&mut self.population);
        combined.extend(children);
        let r_has_extremes = self.combined_has_extremes(&combined);

        let partition = non_dominated_sort(&mut combined);
        if let Some(last) = partition.fronts.last() {
            crowding_distance(&mut combined, last);
        }
        let survival =
            select_steady_state(combined, self.config.capacity, &partition, &mut self.rng)?;
        self.population = survival.population.into_members();
        self.coverage.add(child_f1);
        for r in &survival.trace.removals {
            self.coverage.remove(r.objectives.f1);
        }
        self.last_removals = survival.trace;
        Ok(r_has_extremes)
    }

    fn observe(&mut self, r_has_extremes: bool) {
        self.coverage.refresh();
        let g = self.generation;
        let mei = self.coverage.mei;
        let max_f1 = self.coverage.max;
        let extremes = self.extremes_present();
        let config = self.config;
        let m = &mut self.monitor;

        if config.guarantees_apply() && g > 0 {
            if m.t0.is_some() && !extremes {
                m.violations.push(Violation::ExtremeLost { generation: g });
            }
            if max_f1 < m.prev_max_f1 {
                m.violations.push(Violation::MaxF1Decreased {
                    generation: g,
                    before: m.prev_max_f1,
                    after: max_f1,
                });
            }
            if config.approximation_guarantee_applies() && r_has_extremes {
                let limit = config.removal_limit();
                for r in &self.last_removals.removals {
                    m.checked_removals += 1;
                    if r.cdis >= limit {
                        m.violations.push(Violation::RemovalBound {
                            generation: g,
                            cdis: r.cdis,
                            limit,
                        });
                    }
                }
            }
            if config.approximation_guarantee_applies() && m.t0.is_some() {
                let limit = config.mei_limit();
                if f64::from(m.prev_mei) > limit {
                    if mei > m.prev_mei {
                        m.violations.push(Violation::MeiIncreased {
                            generation: g,
                            before: m.prev_mei,
                            after: mei,
                        });
                    }
                } else if f64::from(mei) > limit {
                    m.violations.push(Violation::MeiAboveLimit {
                        generation: g,
                        mei,
                        limit,
                    });
                }
            }
        }

        if m.t0.is_none() && extremes {
            m.t0 = Some(g);
        }
        if m.t0.is_some() && m.t1.is_none() && f64::from(mei) <= config.mei_limit() {
            m.t1 = Some(g);
        }
        m.prev_mei = mei;
        m.prev_max_f1 = max_f1;
    }
}

/// Runs `config.max_generations` steps and records every generation,
/// including the full f1 coverage.
pub fn run(config: AlgorithmConfig) -> Result<RunTrace> {
    let mut coverage = Vec::new();
    let mut records = Vec::new();
    let opt = run_with(config, |opt, record| {
        coverage.push(opt.coverage.values());
        records.push(*record);
    })?;
    Ok(RunTrace {
        config,
        records,
        coverage,
        t0: opt.t0(),
        t1: opt.t1(),
        violations: opt.violations().to_vec(),
        checked_removals: opt.checked_removals(),
    })
}

/// Runs `config.max_generations` steps, calling `observer` on generation 0
/// and after every step. Returns the final optimizer state.
pub fn run_with(
    config: AlgorithmConfig,
    mut observer: impl FnMut(&Optimizer, &GenerationRecord),
) -> Result<Optimizer> {
    let mut opt = Optimizer::new(config)?;
    let record = opt.record();
    observer(&opt, &record);
    for _ in 0..config.max_generations {
        opt.step()?;
        let record = opt.record();
        observer(&opt, &record);
    }
    Ok(opt)
}
