//! Experiment configuration: `key=value` files with `#` comments, overridden
//! by command-line flags.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use nsga_approx::algorithms::Variant;
use nsga_approx::variation::{MatingScheme, MutationOp};
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};

/// Inclusive range of generations after `t0`. For the steady-state variant
/// both ends are scaled by `N`: `[(start - 1) N + 1 ..= end N]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Window {
    pub start: u64,
    pub end: u64,
}

impl Window {
    pub fn new(start: u64, end: u64) -> Self {
        Self { start, end }
    }

    /// First and last post-`t0` step of the window for `scale` steps per
    /// generation.
    pub fn steps(&self, scale: u64) -> (u64, u64) {
        ((self.start - 1) * scale + 1, self.end * scale)
    }

    pub fn contains(&self, post_t0: u64, scale: u64) -> bool {
        let (lo, hi) = self.steps(scale);
        (lo..=hi).contains(&post_t0)
    }
}

impl fmt::Display for Window {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.start, self.end)
    }
}

impl FromStr for Window {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let (a, b) = s
            .split_once("..")
            .ok_or_else(|| format!("window {s:?} is not of the form start..end"))?;
        let start = a
            .trim()
            .parse()
            .map_err(|_| format!("bad window start {a:?}"))?;
        let end = b
            .trim()
            .parse()
            .map_err(|_| format!("bad window end {b:?}"))?;
        Ok(Self { start, end })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub n: usize,
    pub pop_sizes: Vec<usize>,
    pub variants: Vec<Variant>,
    /// `None` selects each variant's default: fair for the generational
    /// variants, random for steady state.
    pub mating: Option<MatingScheme>,
    pub mutation: MutationOp,
    pub runs: usize,
    pub seed: u64,
    pub windows: Vec<Window>,
    pub out: PathBuf,
    pub workers: usize,
    /// Generations allowed for finding both extremes (scaled by `N` for
    /// steady state).
    pub safety_cap: u64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            n: 601,
            pop_sizes: vec![301, 151, 76],
            variants: Variant::ALL.to_vec(),
            mating: None,
            mutation: MutationOp::OneBit,
            runs: 20,
            seed: 2022,
            windows: vec![Window::new(1, 100), Window::new(3001, 3100)],
            out: PathBuf::from("results"),
            workers: std::thread::available_parallelism().map_or(1, |n| n.get()),
            safety_cap: 1_000_000,
        }
    }
}

impl ExperimentConfig {
    /// Parses `key=value` lines on top of the defaults. Blank lines and
    /// text after `#` are ignored.
    pub fn parse(text: &str) -> Result<Self> {
        let mut config = Self::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| HarnessError::ConfigLine {
                line: i + 1,
                message,
            };
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| err(format!("expected key=value, found {line:?}")))?;
            config.set(key.trim(), value.trim()).map_err(err)?;
        }
        config.validate()?;
        Ok(config)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        Self::parse(&text)
    }

    fn set(&mut self, key: &str, value: &str) -> std::result::Result<(), String> {
        match key {
            "n" => self.n = parse_value(key, value)?,
            "pop_sizes" | "pop_size" => self.pop_sizes = parse_list(key, value)?,
            "variants" | "variant" => self.variants = parse_list(key, value)?,
            "mating" => {
                self.mating = match value {
                    "default" => None,
                    v => Some(parse_value(key, v)?),
                }
            }
            "mutation" => self.mutation = parse_value(key, value)?,
            "runs" => self.runs = parse_value(key, value)?,
            "seed" => self.seed = parse_value(key, value)?,
            "windows" => self.windows = parse_list(key, value)?,
            "out" => self.out = PathBuf::from(value),
            "workers" => self.workers = parse_value(key, value)?,
            "safety_cap" => self.safety_cap = parse_value(key, value)?,
            _ => return Err(format!("unknown key {key:?}")),
        }
        Ok(())
    }

    /// Applies command-line overrides and revalidates.
    pub fn apply(&mut self, o: &Overrides) -> Result<()> {
        if let Some(n) = o.n {
            self.n = n;
        }
        if let Some(p) = &o.pop_sizes {
            self.pop_sizes = p.clone();
        }
        if let Some(v) = o.variant {
            self.variants = vec![v];
        }
        if let Some(m) = o.mating {
            self.mating = Some(m);
        }
        if let Some(m) = o.mutation {
            self.mutation = m;
        }
        if let Some(r) = o.runs {
            self.runs = r;
        }
        if let Some(s) = o.seed {
            self.seed = s;
        }
        if let Some(out) = &o.out {
            self.out = out.clone();
        }
        if let Some(w) = o.workers {
            self.workers = w;
        }
        self.validate()
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(HarnessError::Config(m));
        if self.n == 0 {
            return fail("n must be positive".into());
        }
        if self.runs == 0 {
            return fail("runs must be at least 1".into());
        }
        if self.workers == 0 {
            return fail("workers must be at least 1".into());
        }
        if self.safety_cap == 0 {
            return fail("safety_cap must be positive".into());
        }
        if self.pop_sizes.is_empty() || self.variants.is_empty() || self.windows.is_empty() {
            return fail("pop_sizes, variants and windows must be nonempty".into());
        }
        if let Some(&p) = self.pop_sizes.iter().find(|&&p| p < 2) {
            return fail(format!("population size {p} is below 2"));
        }
        if let Some(w) = self
            .windows
            .iter()
            .find(|w| w.start == 0 || w.start > w.end)
        {
            return fail(format!("window {w} must satisfy 1 <= start <= end"));
        }
        if self.mating == Some(MatingScheme::Fair) && self.variants.contains(&Variant::SteadyState)
        {
            return fail(
                "fair mating selection is not defined for the steady-state variant".into(),
            );
        }
        Ok(())
    }

    pub fn mating_for(&self, variant: Variant) -> MatingScheme {
        self.mating.unwrap_or(variant.default_mating())
    }

    /// Last post-`t0` generation covered by any window.
    pub fn horizon(&self) -> u64 {
        self.windows.iter().map(|w| w.end).max().unwrap_or(0)
    }
}

/// Values given on the command line; each replaces the file value.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub n: Option<usize>,
    pub pop_sizes: Option<Vec<usize>>,
    pub variant: Option<Variant>,
    pub mating: Option<MatingScheme>,
    pub mutation: Option<MutationOp>,
    pub runs: Option<usize>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub workers: Option<usize>,
}

fn parse_value<T: FromStr>(key: &str, value: &str) -> std::result::Result<T, String>
where
    T::Err: fmt::Display,
{
    value
        .parse()
        .map_err(|e| format!("invalid value {value:?} for {key}: {e}"))
}

fn parse_list<T: FromStr>(key: &str, value: &str) -> std::result::Result<Vec<T>, String>
where
    T::Err: fmt::Display,
{
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse_value(key, s))
        .collect()
}
