//! Mating selection and mutation.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::RngHandle;
use crate::types::{Genome, Individual};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MatingScheme {
    /// Every member is a parent exactly once.
    Fair,
    /// Uniform draws with replacement.
    Random,
    /// Two uniform draws with replacement; lower rank wins, then larger
    /// crowding distance, then a fair coin.
    BinaryTournament,
}

impl FromStr for MatingScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fair" => Ok(Self::Fair),
            "random" => Ok(Self::Random),
            "tournament" | "binary-tournament" => Ok(Self::BinaryTournament),
            other => Err(Error::Config(format!("unknown mating scheme {other:?}"))),
        }
    }
}

impl fmt::Display for MatingScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Fair => "fair",
            Self::Random => "random",
            Self::BinaryTournament => "tournament",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MutationOp {
    /// Flip one uniformly chosen bit.
    OneBit,
    /// Flip every bit independently with probability `1/n`.
    BitWise,
}

impl FromStr for MutationOp {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "one-bit" | "onebit" => Ok(Self::OneBit),
            "bitwise" | "bit-wise" => Ok(Self::BitWise),
            other => Err(Error::Config(format!(
                "unknown mutation operator {other:?}"
            ))),
        }
    }
}

impl fmt::Display for MutationOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::OneBit => "one-bit",
            Self::BitWise => "bitwise",
        })
    }
}

/// Positions in `pop` of the `count` individuals that will each create one
/// offspring.
pub fn select_parents(
    pop: &[Individual],
    scheme: MatingScheme,
    count: usize,
    rng: &mut RngHandle,
) -> Result<Vec<usize>> {
    if pop.is_empty() {
        return Err(Error::Empty("mating selection on an empty population"));
    }
    match scheme {
        MatingScheme::Fair => {
            if count != pop.len() {
                return Err(Error::Config(format!(
                    "fair selection produces exactly {} parents, {count} requested",
                    pop.len()
                )));
            }
            Ok((0..count).collect())
        }
        MatingScheme::Random => Ok((0..count).map(|_| rng.index(pop.len())).collect()),
        MatingScheme::BinaryTournament => {
            for x in pop {
                if x.rank.is_none() || x.cdis.is_none() {
                    return Err(Error::MissingCrowding { id: x.id });
                }
            }
            Ok((0..count)
                .map(|_| {
                    let a = rng.index(pop.len());
                    let b = rng.index(pop.len());
                    tournament_winner(pop, a, b, rng)
                })
                .collect())
        }
    }
}

fn tournament_winner(pop: &[Individual], a: usize, b: usize, rng: &mut RngHandle) -> usize {
    let (x, y) = (&pop[a], &pop[b]);
    match x.rank.cmp(&y.rank) {
        std::cmp::Ordering::Less => return a,
        std::cmp::Ordering::Greater => return b,
        std::cmp::Ordering::Equal => {}
    }
    let (cx, cy) = (x.cdis.unwrap_or(0.0), y.cdis.unwrap_or(0.0));
    match cx.total_cmp(&cy) {
        std::cmp::Ordering::Greater => a,
        std::cmp::Ordering::Less => b,
        std::cmp::Ordering::Equal => {
            if rng.coin() {
                a
            } else {
                b
            }
        }
    }
}

/// Mutated copy of `x`; `x` itself is left unchanged.
pub fn mutate(x: &Genome, op: MutationOp, rng: &mut RngHandle) -> Genome {
    let mut y = x.clone();
    let n = x.len();
    match op {
        MutationOp::OneBit => y.flip(rng.index(n)),
        MutationOp::BitWise => {
            let p = 1.0 / n as f64;
            for i in 0..n {
                if rng.bernoulli(p) {
                    y.flip(i);
                }
            }
        }
    }
    y
}
