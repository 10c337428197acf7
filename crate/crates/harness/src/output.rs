//! CSV and JSON output. All files are UTF-8 with a header row and LF line
//! endings.

use std::fs;
use std::path::{Path, PathBuf};

use nsga_approx::algorithms::{RunTrace, Variant};
use nsga_approx::scenarios::{Scenario, TrialStats};
use nsga_approx::survival::Engine;

use crate::error::{HarnessError, Result};
use crate::experiment::{ExperimentResult, RunRecord};
use crate::summary::{BlockStats, QuartileSummary};

fn writer(path: &Path) -> Result<csv::Writer<fs::File>> {
    let file = fs::File::create(path).map_err(|e| HarnessError::io(path, e))?;
    Ok(csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(file))
}

fn flag(b: bool) -> &'static str {
    if b {
        "1"
    } else {
        "0"
    }
}

pub fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))
}

pub fn write_quartiles(path: &Path, summaries: &[QuartileSummary]) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(["variant", "N", "window", "q1", "q2", "q3", "samples"])?;
    for s in summaries {
        w.write_record([
            s.variant.to_string(),
            s.capacity.to_string(),
            s.window.to_string(),
            s.q1.to_string(),
            s.q2.to_string(),
            s.q3.to_string(),
            s.samples.to_string(),
        ])?;
    }
    w.flush().map_err(|e| HarnessError::io(path, e))
}

pub fn write_run_records(path: &Path, records: &[RunRecord]) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record([
        "run",
        "seed",
        "variant",
        "N",
        "gen_post_t0",
        "gen_raw",
        "mei",
        "extremes",
        "evals",
    ])?;
    for r in records {
        w.write_record([
            r.run.to_string(),
            r.seed.to_string(),
            r.variant.to_string(),
            r.capacity.to_string(),
            r.gen_post_t0.to_string(),
            r.gen_raw.to_string(),
            r.mei.to_string(),
            flag(r.extremes).to_string(),
            r.evals.to_string(),
        ])?;
    }
    w.flush().map_err(|e| HarnessError::io(path, e))
}

pub fn write_blocks(path: &Path, blocks: &[BlockStats]) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(["block", "min", "median", "max", "len", "partial"])?;
    for b in blocks {
        w.write_record([
            b.block.to_string(),
            b.min.to_string(),
            b.median.to_string(),
            b.max.to_string(),
            b.len.to_string(),
            flag(b.partial).to_string(),
        ])?;
    }
    w.flush().map_err(|e| HarnessError::io(path, e))
}

/// Writes `table1.csv`, one `trace_<variant>_<N>_<run>.csv` per run, one
/// `blocks_steady-state_<N>.csv` for run 0 of each steady-state setting and
/// `runs.json` with the status of every run. Returns the written paths.
pub fn write_experiment(dir: &Path, result: &ExperimentResult) -> Result<Vec<PathBuf>> {
    ensure_dir(dir)?;
    let mut written = Vec::new();
    let table = dir.join("table1.csv");
    write_quartiles(&table, &result.summaries)?;
    written.push(table);
    for o in &result.outcomes {
        let s = o.setting;
        let path = dir.join(format!("trace_{}_{}_{}.csv", s.variant, s.capacity, o.run));
        write_run_records(&path, &o.records)?;
        written.push(path);
        if s.variant == Variant::SteadyState && o.run == 0 {
            let path = dir.join(format!("blocks_{}_{}.csv", s.variant, s.capacity));
            write_blocks(&path, &o.blocks)?;
            written.push(path);
        }
    }
    let status: Vec<serde_json::Value> = result
        .outcomes
        .iter()
        .map(|o| {
            serde_json::json!({
                "variant": o.setting.variant.to_string(),
                "N": o.setting.capacity,
                "run": o.run,
                "seed": o.seed,
                "status": o.status,
                "t0": o.t0,
                "checked_removals": o.checked_removals,
                "violations": o.violations.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
            })
        })
        .collect();
    let path = dir.join("runs.json");
    let text = serde_json::to_string_pretty(&status)? + "\n";
    fs::write(&path, text).map_err(|e| HarnessError::io(&path, e))?;
    written.push(path);
    Ok(written)
}

/// Full per-generation trace of a single run.
pub fn write_trace(path: &Path, trace: &RunTrace) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record([
        "generation",
        "gen_post_t0",
        "evals",
        "extremes",
        "mei",
        "distinct",
        "max_f1",
    ])?;
    for r in &trace.records {
        let post = match trace.t0 {
            Some(t0) if r.generation >= t0 => (r.generation - t0).to_string(),
            _ => String::new(),
        };
        w.write_record([
            r.generation.to_string(),
            post,
            r.evaluations.to_string(),
            flag(r.extremes).to_string(),
            r.mei.to_string(),
            r.distinct.to_string(),
            r.max_f1.to_string(),
        ])?;
    }
    w.flush().map_err(|e| HarnessError::io(path, e))
}

pub fn scenario_file_name(scenario: &Scenario, engine: Engine) -> String {
    format!("scenario_{}_{}.csv", scenario.kind, engine)
}

pub fn write_scenario(path: &Path, stats: &TrialStats) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(["trial", "mei"])?;
    for (i, m) in stats.samples.iter().enumerate() {
        w.write_record([i.to_string(), m.to_string()])?;
    }
    w.flush().map_err(|e| HarnessError::io(path, e))
}
