//! Synthetic combined populations on which the classic selection leaves
//! large uncovered stretches of the `OneMinMax` front, and Monte-Carlo
//! trials that run one survival selection on them.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::{mei, FrontSubset};
use crate::problems::eval_one_min_max;
use crate::ranking::{crowding_distance, non_dominated_sort};
use crate::rng::RngHandle;
use crate::stats::quartiles;
use crate::survival::{select, Engine};
use crate::types::{Genome, Individual};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ScenarioKind {
    /// One individual per first-objective value `0..=n`, `n` odd.
    FullCoverage,
    /// A dense block `0..=n/3 + 1` followed by every second value up to `n`.
    Adversarial,
}

impl std::str::FromStr for ScenarioKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full-coverage" => Ok(Self::FullCoverage),
            "adversarial" => Ok(Self::Adversarial),
            other => Err(Error::Config(format!(
                "unknown scenario {other:?} (expected full-coverage or adversarial)"
            ))),
        }
    }
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::FullCoverage => "full-coverage",
            Self::Adversarial => "adversarial",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Scenario {
    pub kind: ScenarioKind,
    pub n: usize,
}

impl Scenario {
    pub fn new(kind: ScenarioKind, n: usize) -> Result<Self> {
        match kind {
            ScenarioKind::FullCoverage if n < 7 || n.is_multiple_of(2) => Err(Error::Scenario(
                format!("full coverage needs an odd n >= 7, got {n}"),
            )),
            ScenarioKind::Adversarial if n < 3 || !n.is_multiple_of(3) => Err(Error::Scenario(
                format!("adversarial construction needs a positive multiple of 3, got {n}"),
            )),
            _ => Ok(Self { kind, n }),
        }
    }

    /// Population size `N`, half the size of the combined population.
    pub fn capacity(&self) -> usize {
        match self.kind {
            ScenarioKind::FullCoverage => self.n.div_ceil(2),
            ScenarioKind::Adversarial => self.n / 3 + 1,
        }
    }

    /// The combined population, ids ascending with f1.
    pub fn build(&self) -> Vec<Individual> {
        match self.kind {
            ScenarioKind::FullCoverage => population_with_f1(self.n, 0..=self.n as u32),
            ScenarioKind::Adversarial => {
                let third = (self.n / 3) as u32;
                let dense = 0..=third + 1;
                let sparse = (1..=third).map(|i| third + 2 * i);
                population_with_f1(self.n, dense.chain(sparse))
            }
        }
    }
}

/// Genome `1^(n-k) 0^k`, whose first objective (number of zeros) is `k`.
pub fn representative(n: usize, k: u32) -> Genome {
    let mut g = Genome::ones(n);
    for i in n - k as usize..n {
        g.set(i, false);
    }
    g
}

fn population_with_f1(n: usize, values: impl IntoIterator<Item = u32>) -> Vec<Individual> {
    values
        .into_iter()
        .enumerate()
        .map(|(id, k)| {
            let genome = representative(n, k);
            let objectives = eval_one_min_max(&genome);
            Individual::with_objectives(id as u64, genome, objectives)
        })
        .collect()
}

/// Combined population for [`ScenarioKind::FullCoverage`]. Fails for even
/// `n` or `n < 7`.
pub fn build_full_coverage(n: usize) -> Result<Vec<Individual>> {
    Ok(Scenario::new(ScenarioKind::FullCoverage, n)?.build())
}

/// Combined population for [`ScenarioKind::Adversarial`]. Fails unless `n`
/// is a positive multiple of 3.
pub fn build_adversarial(n: usize) -> Result<Vec<Individual>> {
    Ok(Scenario::new(ScenarioKind::Adversarial, n)?.build())
}

/// Half of `combined` chosen by: keep the smallest f1, drop the next two,
/// keep the fourth, then alternately drop and keep in increasing f1.
pub fn alternating_keep(combined: &[Individual]) -> Vec<Individual> {
    let mut sorted: Vec<&Individual> = combined.iter().collect();
    sorted.sort_by_key(|x| (x.obj().f1, x.id));
    sorted
        .into_iter()
        .enumerate()
        .filter(|&(i, _)| i == 0 || (i >= 3 && i % 2 == 1))
        .map(|(_, x)| x.clone())
        .collect()
}

/// MEI values of repeated single survival selections.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialStats {
    pub samples: Vec<u32>,
    /// Nearest-rank quartiles of `samples`.
    pub quartiles: [u32; 3],
}

impl TrialStats {
    pub fn from_samples(samples: Vec<u32>) -> Result<Self> {
        let mut sorted = samples.clone();
        let quartiles = quartiles(&mut sorted).ok_or(Error::Empty("trial samples"))?;
        Ok(Self { samples, quartiles })
    }

    pub fn fraction_at_least(&self, threshold: f64) -> f64 {
        self.fraction(|m| f64::from(m) >= threshold)
    }

    pub fn fraction_at_most(&self, threshold: f64) -> f64 {
        self.fraction(|m| f64::from(m) <= threshold)
    }

    fn fraction(&self, pred: impl Fn(u32) -> bool) -> f64 {
        self.samples.iter().filter(|&&m| pred(m)).count() as f64 / self.samples.len() as f64
    }
}

/// Survivors of one selection on the scenario's combined population.
pub fn select_once(
    scenario: Scenario,
    engine: Engine,
    rng: &mut RngHandle,
) -> Result<Vec<Individual>> {
    let mut combined = scenario.build();
    let capacity = scenario.capacity();
    let partition = non_dominated_sort(&mut combined);
    if engine == Engine::Classic {
        if let Some((critical, _)) = partition.critical_front(capacity) {
            crowding_distance(&mut combined, &partition.fronts[critical]);
        }
    }
    Ok(select(engine, combined, capacity, &partition, rng)?
        .population
        .into_members())
}

/// MEI of the survivors of one selection, with its own random stream.
pub fn run_trial(scenario: Scenario, engine: Engine, seed: u64) -> Result<u32> {
    let survivors = select_once(scenario, engine, &mut RngHandle::new(seed))?;
    Ok(mei(&FrontSubset::from_population(
        scenario.n as u32,
        &survivors,
    )?))
}

/// Seed of trial `index` for a master seed; trials are independent of
/// each other and of execution order.
pub fn trial_seed(master: u64, index: u64) -> u64 {
    crate::rng::substream_seed(master, index)
}

/// Runs `trials` independent selections. The master seed is drawn from
/// `rng`; trial `i` uses [`trial_seed`]`(master, i)`.
pub fn run_selection_trials(
    scenario: Scenario,
    engine: Engine,
    trials: usize,
    rng: &mut RngHandle,
) -> Result<TrialStats> {
    let master = rand::RngCore::next_u64(rng);
    let samples = (0..trials as u64)
        .map(|i| run_trial(scenario, engine, trial_seed(master, i)))
        .collect::<Result<Vec<u32>>>()?;
    TrialStats::from_samples(samples)
}
