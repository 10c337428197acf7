//! Benchmark objective functions.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::{Genome, Individual, Objectives};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProblemKind {
    OneMinMax,
    /// LeadingOnes / TrailingZeros. Exploratory only.
    Lotz,
}

impl FromStr for ProblemKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "oneminmax" | "one-min-max" | "omm" => Ok(Self::OneMinMax),
            "lotz" => Ok(Self::Lotz),
            other => Err(Error::Config(format!("unknown problem {other:?}"))),
        }
    }
}

impl fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::OneMinMax => "oneminmax",
            Self::Lotz => "lotz",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Problem {
    pub kind: ProblemKind,
    pub n: usize,
}

impl Problem {
    pub fn one_min_max(n: usize) -> Self {
        Self {
            kind: ProblemKind::OneMinMax,
            n,
        }
    }

    pub fn lotz(n: usize) -> Self {
        Self {
            kind: ProblemKind::Lotz,
            n,
        }
    }

    pub fn evaluate(&self, x: &Genome) -> Objectives {
        debug_assert_eq!(x.len(), self.n, "genome length does not match problem size");
        match self.kind {
            ProblemKind::OneMinMax => eval_one_min_max(x),
            ProblemKind::Lotz => eval_lotz(x),
        }
    }

    /// Largest attainable value of either objective.
    pub fn max_value(&self) -> u32 {
        self.n as u32
    }
}

/// `(number of zeros, number of ones)`.
pub fn eval_one_min_max(x: &Genome) -> Objectives {
    let ones = x.count_ones();
    Objectives::new(x.len() as u32 - ones, ones)
}

/// `(leading ones, trailing zeros)`.
pub fn eval_lotz(x: &Genome) -> Objectives {
    Objectives::new(x.leading_ones(), x.trailing_zeros())
}

/// Problem wrapper that counts fitness evaluations.
#[derive(Debug, Clone)]
pub struct Evaluator {
    problem: Problem,
    evaluations: u64,
}

impl Evaluator {
    pub fn new(problem: Problem) -> Self {
        Self {
            problem,
            evaluations: 0,
        }
    }

    pub fn problem(&self) -> Problem {
        self.problem
    }

    pub fn evaluations(&self) -> u64 {
        self.evaluations
    }

    pub fn evaluate(&mut self, x: &Genome) -> Objectives {
        self.evaluations += 1;
        self.problem.evaluate(x)
    }

    pub fn evaluate_individual(&mut self, ind: &mut Individual) {
        ind.objectives = Some(self.evaluate(&ind.genome));
    }
}
