//! Runs every `(variant, N, run)` of an experiment on a bounded worker pool
//! and pools the MEI values inside each window.

use nsga_approx::algorithms::{AlgorithmConfig, Optimizer, Variant, Violation};
use nsga_approx::problems::Problem;
use nsga_approx::rng::derive_seed;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{ExperimentConfig, Window};
use crate::error::Result;
use crate::summary::{quartiles, steady_state_block_stats, BlockStats, QuartileSummary};

/// One row of a per-run trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunRecord {
    pub run: usize,
    pub seed: u64,
    pub variant: Variant,
    #[serde(rename = "N")]
    pub capacity: usize,
    pub gen_post_t0: u64,
    pub gen_raw: u64,
    pub mei: u32,
    pub extremes: bool,
    pub evals: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Setting {
    pub variant: Variant,
    pub capacity: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RunStatus {
    Ok,
    /// A proven guarantee was broken.
    Violation,
    /// Both extremes were not found within the safety cap.
    Timeout,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunOutcome {
    pub setting: Setting,
    pub run: usize,
    pub seed: u64,
    pub status: RunStatus,
    pub t0: Option<u64>,
    /// Trace rows of the generations inside some window.
    pub records: Vec<RunRecord>,
    /// MEI values per window, in the order of the configured windows.
    pub window_samples: Vec<Vec<u32>>,
    pub violations: Vec<Violation>,
    pub checked_removals: u64,
    /// Per-block MEI statistics after `t0` (steady state only).
    pub blocks: Vec<BlockStats>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub config: ExperimentConfig,
    pub outcomes: Vec<RunOutcome>,
    pub summaries: Vec<QuartileSummary>,
}

impl ExperimentResult {
    pub fn violations(&self) -> usize {
        self.outcomes.iter().map(|o| o.violations.len()).sum()
    }

    pub fn timeouts(&self) -> usize {
        self.outcomes
            .iter()
            .filter(|o| o.status == RunStatus::Timeout)
            .count()
    }

    /// 0 when every run succeeded, 2 on a broken guarantee, 3 when some run
    /// did not find both extremes.
    pub fn exit_code(&self) -> i32 {
        if self.violations() > 0 {
            crate::EXIT_VIOLATION
        } else if self.timeouts() > 0 {
            crate::EXIT_TIMEOUT
        } else {
            0
        }
    }

    pub fn summary(
        &self,
        variant: Variant,
        capacity: usize,
        window: Window,
    ) -> Option<&QuartileSummary> {
        self.summaries
            .iter()
            .find(|s| s.variant == variant && s.capacity == capacity && s.window == window)
    }
}

fn variant_index(v: Variant) -> u64 {
    match v {
        Variant::ClassicCd => 0,
        Variant::CurrentCd => 1,
        Variant::SteadyState => 2,
    }
}

/// Seed of run `run` of `setting`; independent of the other settings in the
/// experiment.
pub fn run_seed(master: u64, setting: Setting, run: usize) -> u64 {
    derive_seed(
        master,
        &[
            variant_index(setting.variant),
            setting.capacity as u64,
            run as u64,
        ],
    )
}

pub fn algorithm_config(config: &ExperimentConfig, setting: Setting, seed: u64) -> AlgorithmConfig {
    AlgorithmConfig {
        variant: setting.variant,
        problem: Problem::one_min_max(config.n),
        capacity: setting.capacity,
        mating: config.mating_for(setting.variant),
        mutation: config.mutation,
        max_generations: 0,
        seed,
    }
}

/// Runs until both extremes are present, then through the end of the last
/// window. Stops early, with [`RunStatus::Timeout`], at the safety cap.
pub fn execute_run(config: &ExperimentConfig, setting: Setting, run: usize) -> Result<RunOutcome> {
    let seed = run_seed(config.seed, setting, run);
    let mut opt = Optimizer::new(algorithm_config(config, setting, seed))?;
    let scale = setting.variant.iterations_per_generation(setting.capacity);
    let cap = config.safety_cap.saturating_mul(scale);

    while opt.t0().is_none() && opt.generation() < cap {
        opt.step()?;
    }
    let mut outcome = RunOutcome {
        setting,
        run,
        seed,
        status: RunStatus::Ok,
        t0: opt.t0(),
        records: Vec::new(),
        window_samples: vec![Vec::new(); config.windows.len()],
        violations: Vec::new(),
        checked_removals: 0,
        blocks: Vec::new(),
    };
    let Some(t0) = opt.t0() else {
        outcome.status = RunStatus::Timeout;
        outcome.violations = opt.violations().to_vec();
        return Ok(outcome);
    };

    let horizon = config.horizon() * scale;
    let mut post_t0_mei = Vec::new();
    for post in 1..=horizon {
        opt.step()?;
        let rec = opt.record();
        if setting.variant.is_steady_state() {
            post_t0_mei.push((post, rec.mei));
        }
        let mut in_window = false;
        for (w, samples) in config.windows.iter().zip(&mut outcome.window_samples) {
            if w.contains(post, scale) {
                samples.push(rec.mei);
                in_window = true;
            }
        }
        if in_window {
            outcome.records.push(RunRecord {
                run,
                seed,
                variant: setting.variant,
                capacity: setting.capacity,
                gen_post_t0: post,
                gen_raw: t0 + post,
                mei: rec.mei,
                extremes: rec.extremes,
                evals: rec.evaluations,
            });
        }
    }
    if setting.variant.is_steady_state() {
        outcome.blocks = steady_state_block_stats(post_t0_mei, setting.capacity);
    }
    outcome.violations = opt.violations().to_vec();
    outcome.checked_removals = opt.checked_removals();
    if !outcome.violations.is_empty() {
        outcome.status = RunStatus::Violation;
    }
    Ok(outcome)
}

/// All settings in configuration order: variants outermost, then
/// population sizes.
pub fn settings(config: &ExperimentConfig) -> Vec<Setting> {
    config
        .variants
        .iter()
        .flat_map(|&variant| {
            config
                .pop_sizes
                .iter()
                .map(move |&capacity| Setting { variant, capacity })
        })
        .collect()
}

/// Runs the whole grid on `config.workers` threads. Results do not depend
/// on the worker count.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentResult> {
    config.validate()?;
    let jobs: Vec<(Setting, usize)> = settings(config)
        .into_iter()
        .flat_map(|s| (0..config.runs).map(move |r| (s, r)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()?;
    let outcomes = pool.install(|| {
        jobs.par_iter()
            .map(|&(s, r)| execute_run(config, s, r))
            .collect::<Result<Vec<_>>>()
    })?;
    let summaries = summarize(config, &outcomes)?;
    Ok(ExperimentResult {
        config: config.clone(),
        outcomes,
        summaries,
    })
}

/// Pools window samples over the runs of each setting that found both
/// extremes.
pub fn summarize(
    config: &ExperimentConfig,
    outcomes: &[RunOutcome],
) -> Result<Vec<QuartileSummary>> {
    let mut out = Vec::new();
    for setting in settings(config) {
        for (i, &window) in config.windows.iter().enumerate() {
            let mut pooled: Vec<u32> = outcomes
                .iter()
                .filter(|o| o.setting == setting && o.status != RunStatus::Timeout)
                .flat_map(|o| o.window_samples[i].iter().copied())
                .collect();
            if pooled.is_empty() {
                continue;
            }
            let [q1, q2, q3] = quartiles(&mut pooled)?;
            out.push(QuartileSummary {
                variant: setting.variant,
                capacity: setting.capacity,
                window,
                q1,
                q2,
                q3,
                samples: pooled.len(),
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> ExperimentConfig {
        ExperimentConfig {
            n: 30,
            pop_sizes: vec![8],
            runs: 3,
            windows: vec![Window::new(1, 5), Window::new(20, 25)],
            workers: 1,
            ..Default::default()
        }
    }

    #[test]
    fn window_samples_have_expected_sizes() {
        let r = run_experiment(&small()).unwrap();
        assert_eq!(r.outcomes.len(), 9);
        for s in &r.summaries {
            let scale = s.variant.iterations_per_generation(8) as usize;
            let len = (s.window.end - s.window.start + 1) as usize;
            assert_eq!(s.samples, 3 * len * scale);
            assert!(s.q1 <= s.q2 && s.q2 <= s.q3);
        }
        assert_eq!(r.exit_code(), 0);
        let ss = r
            .outcomes
            .iter()
            .find(|o| o.setting.variant == Variant::SteadyState)
            .unwrap();
        assert_eq!(ss.blocks.len(), 25);
    }

    #[test]
    fn results_do_not_depend_on_worker_count() {
        let a = run_experiment(&small()).unwrap();
        let b = run_experiment(&ExperimentConfig {
            workers: 3,
            ..small()
        })
        .unwrap();
        assert_eq!(a.outcomes, b.outcomes);
        assert_eq!(a.summaries, b.summaries);
    }

    #[test]
    fn timeouts_are_flagged_and_excluded() {
        let config = ExperimentConfig {
            safety_cap: 1,
            variants: vec![Variant::CurrentCd],
            n: 200,
            ..small()
        };
        let r = run_experiment(&config).unwrap();
        assert!(r.outcomes.iter().all(|o| o.status == RunStatus::Timeout));
        assert!(r.summaries.is_empty());
        assert_eq!(r.exit_code(), 3);
    }

    #[test]
    fn seeds_are_distinct_per_setting_and_run() {
        let s1 = Setting {
            variant: Variant::CurrentCd,
            capacity: 8,
        };
        let s2 = Setting {
            variant: Variant::SteadyState,
            capacity: 8,
        };
        assert_ne!(run_seed(1, s1, 0), run_seed(1, s2, 0));
        assert_ne!(run_seed(1, s1, 0), run_seed(1, s1, 1));
        assert_eq!(run_seed(1, s1, 0), run_seed(1, s1, 0));
    }
}
