//! Genomes, objective vectors, individuals and populations.

use std::fmt;

use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::RngHandle;

/// Fixed-length bit string, packed into 64-bit words.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Genome {
    words: Vec<u64>,
    len: usize,
}

impl Genome {
    pub fn zeros(len: usize) -> Self {
        Self {
            words: vec![0; len.div_ceil(64)],
            len,
        }
    }

    pub fn ones(len: usize) -> Self {
        let mut g = Self::zeros(len);
        for i in 0..len {
            g.set(i, true);
        }
        g
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        let mut g = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            g.set(i, b);
        }
        g
    }

    /// Each bit i.i.d. uniform.
    pub fn random(len: usize, rng: &mut RngHandle) -> Self {
        let mut g = Self::zeros(len);
        for w in g.words.iter_mut() {
            *w = rng.next_u64();
        }
        g.clear_padding();
        g
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(
            i < self.len,
            "bit index {i} out of range for length {}",
            self.len
        );
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn set(&mut self, i: usize, value: bool) {
        assert!(
            i < self.len,
            "bit index {i} out of range for length {}",
            self.len
        );
        let mask = 1u64 << (i % 64);
        if value {
            self.words[i / 64] |= mask;
        } else {
            self.words[i / 64] &= !mask;
        }
    }

    pub fn flip(&mut self, i: usize) {
        assert!(
            i < self.len,
            "bit index {i} out of range for length {}",
            self.len
        );
        self.words[i / 64] ^= 1u64 << (i % 64);
    }

    pub fn count_ones(&self) -> u32 {
        self.words.iter().map(|w| w.count_ones()).sum()
    }

    pub fn hamming(&self, other: &Genome) -> u32 {
        assert_eq!(self.len, other.len);
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a ^ b).count_ones())
            .sum()
    }

    pub fn leading_ones(&self) -> u32 {
        (0..self.len).take_while(|&i| self.get(i)).count() as u32
    }

    pub fn trailing_zeros(&self) -> u32 {
        (0..self.len).rev().take_while(|&i| !self.get(i)).count() as u32
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(|i| self.get(i))
    }

    fn clear_padding(&mut self) {
        let rem = self.len % 64;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }
}

impl std::str::FromStr for Genome {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::Config(format!("invalid bit character {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_bits(&bits))
    }
}

impl fmt::Display for Genome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for Genome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Genome({self})")
    }
}

/// Objective vector `(f1, f2)`; both objectives are maximized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Objectives {
    pub f1: u32,
    pub f2: u32,
}

impl Objectives {
    pub const fn new(f1: u32, f2: u32) -> Self {
        Self { f1, f2 }
    }

    /// Value of objective `k` (0 or 1).
    #[inline]
    pub fn get(&self, k: usize) -> u32 {
        match k {
            0 => self.f1,
            1 => self.f2,
            _ => panic!("objective index {k} out of range"),
        }
    }

    pub fn dominates(&self, other: &Objectives) -> bool {
        strictly_dominates(*self, *other)
    }
}

/// `u` is at least as good as `v` in both objectives and better in one.
pub fn strictly_dominates(u: Objectives, v: Objectives) -> bool {
    u.f1 >= v.f1 && u.f2 >= v.f2 && (u.f1 > v.f1 || u.f2 > v.f2)
}

#[derive(Debug, Clone)]
pub struct Individual {
    /// Unique within any population, so duplicate genotypes stay distinguishable.
    pub id: u64,
    pub genome: Genome,
    pub objectives: Option<Objectives>,
    /// Front index, starting at 1.
    pub rank: Option<u32>,
    /// Crowding distance; may be `f64::INFINITY`.
    pub cdis: Option<f64>,
    /// Random second-priority key in `[0, 1)`, redrawn at each selection.
    pub tie_key: f64,
}

impl Individual {
    pub fn new(id: u64, genome: Genome) -> Self {
        Self {
            id,
            genome,
            objectives: None,
            rank: None,
            cdis: None,
            tie_key: 0.0,
        }
    }

    pub fn with_objectives(id: u64, genome: Genome, objectives: Objectives) -> Self {
        Self {
            objectives: Some(objectives),
            ..Self::new(id, genome)
        }
    }

    /// Objective vector of an evaluated individual.
    ///
    /// Panics if the individual has not been evaluated.
    #[inline]
    pub fn obj(&self) -> Objectives {
        match self.objectives {
            Some(o) => o,
            None => panic!("individual {} is not evaluated", self.id),
        }
    }
}

/// Ordered collection of individuals with a fixed capacity `N`.
#[derive(Debug, Clone)]
pub struct Population {
    members: Vec<Individual>,
    capacity: usize,
}

impl Population {
    pub fn new(members: Vec<Individual>, capacity: usize) -> Self {
        Self { members, capacity }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn members(&self) -> &[Individual] {
        &self.members
    }

    pub fn members_mut(&mut self) -> &mut [Individual] {
        &mut self.members
    }

    pub fn into_members(self) -> Vec<Individual> {
        self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.members.len() == self.capacity
    }

    /// Largest id in the population, if any.
    pub fn max_id(&self) -> Option<u64> {
        self.members.iter().map(|m| m.id).max()
    }
}

/// `capacity` individuals with uniformly random genomes of length `n`, ids
/// `0..capacity`, not yet evaluated.
pub fn random_population(n: usize, capacity: usize, rng: &mut RngHandle) -> Result<Population> {
    if n == 0 {
        return Err(Error::Config("problem size must be at least 1".into()));
    }
    if capacity == 0 {
        return Err(Error::Config("population size must be at least 1".into()));
    }
    let members = (0..capacity)
        .map(|id| Individual::new(id as u64, Genome::random(n, rng)))
        .collect();
    Ok(Population::new(members, capacity))
}
