//! Quartiles of pooled MEI samples and per-block statistics of steady-state
//! runs.

use nsga_approx::algorithms::{RunTrace, Variant};
use nsga_approx::stats;
use serde::{Deserialize, Serialize};

use crate::config::Window;
use crate::error::{HarnessError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuartileSummary {
    pub variant: Variant,
    #[serde(rename = "N")]
    pub capacity: usize,
    pub window: Window,
    pub q1: u32,
    pub q2: u32,
    pub q3: u32,
    pub samples: usize,
}

/// Nearest-rank quartiles at ranks `ceil(m/4)`, `ceil(m/2)`, `ceil(3m/4)`.
pub fn quartiles(samples: &mut [u32]) -> Result<[u32; 3]> {
    stats::quartiles(samples)
        .ok_or_else(|| HarnessError::Config("quartiles of an empty sample".into()))
}

/// MEI statistics of one block of `N` consecutive post-`t0` iterations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockStats {
    pub block: u64,
    pub min: u32,
    pub median: u32,
    pub max: u32,
    pub len: usize,
    /// The block has fewer than `N` iterations.
    pub partial: bool,
}

/// Groups `(post-t0 iteration g >= 1, mei)` pairs into blocks
/// `ceil(g / N)` and reports min, nearest-rank median and max per block.
pub fn steady_state_block_stats(
    samples: impl IntoIterator<Item = (u64, u32)>,
    capacity: usize,
) -> Vec<BlockStats> {
    let n = capacity as u64;
    let mut out = Vec::new();
    let mut current: Option<u64> = None;
    let mut buf: Vec<u32> = Vec::with_capacity(capacity);
    let mut flush = |block: u64, buf: &mut Vec<u32>| {
        if let Some([min, median, max]) = stats::min_median_max(buf) {
            out.push(BlockStats {
                block,
                min,
                median,
                max,
                len: buf.len(),
                partial: buf.len() < capacity,
            });
        }
        buf.clear();
    };
    for (g, mei) in samples {
        if g == 0 {
            continue;
        }
        let block = g.div_ceil(n);
        if current != Some(block) {
            if let Some(b) = current {
                flush(b, &mut buf);
            }
            current = Some(block);
        }
        buf.push(mei);
    }
    if let Some(b) = current {
        flush(b, &mut buf);
    }
    out
}

/// Block statistics of the generations after `t0` of a recorded trace.
pub fn block_stats_from_trace(trace: &RunTrace) -> Vec<BlockStats> {
    let Some(t0) = trace.t0 else {
        return Vec::new();
    };
    steady_state_block_stats(
        trace
            .records
            .iter()
            .filter(|r| r.generation > t0)
            .map(|r| (r.generation - t0, r.mei)),
        trace.config.capacity,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use nsga_approx::algorithms::{run, AlgorithmConfig};

    #[test]
    fn quartile_examples() {
        assert_eq!(quartiles(&mut [4, 3, 2, 1]).unwrap(), [1, 2, 3]);
        assert_eq!(quartiles(&mut [7; 5]).unwrap(), [7, 7, 7]);
        assert!(quartiles(&mut []).is_err());
    }

    #[test]
    fn blocks_follow_ceiling_rule() {
        let samples = (1..=7u64).map(|g| (g, g as u32));
        let b = steady_state_block_stats(samples, 3);
        assert_eq!(b.len(), 3);
        assert_eq!((b[0].block, b[0].min, b[0].median, b[0].max), (1, 1, 2, 3));
        assert_eq!((b[1].block, b[1].min, b[1].max), (2, 4, 6));
        assert_eq!((b[2].block, b[2].len, b[2].partial), (3, 1, true));
        assert!(!b[0].partial);
    }

    #[test]
    fn constant_trace_gives_flat_blocks() {
        let b = steady_state_block_stats((1..=20u64).map(|g| (g, 5)), 4);
        assert!(b.iter().all(|s| s.min == 5 && s.median == 5 && s.max == 5));
    }

    #[test]
    fn from_trace_uses_post_t0_generations() {
        let c = AlgorithmConfig::one_min_max(Variant::SteadyState, 12, 5, 400, 3);
        let t = run(c).unwrap();
        let t0 = t.t0.unwrap();
        let b = block_stats_from_trace(&t);
        let total: usize = b.iter().map(|s| s.len).sum();
        assert_eq!(total as u64, 400 - t0);
    }
}
