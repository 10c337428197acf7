//! Current-crowding-distance bookkeeping: a priority queue keyed by
//! `(current cdis, tie key)` and, per objective, a doubly-linked list of the
//! surviving individuals in sorted order.
//!
//! Removing an individual only changes the crowding distance of its (at most
//! four) list neighbours, unless it was the unique holder of an extreme
//! objective value, in which case the normalising range shrinks and every
//! key is refreshed. The latter needs every remaining individual to have
//! infinite crowding distance first, so it only happens on tiny fronts.

use crate::ranking::{crowding_term, order_by_value_then_id};
use crate::types::{Individual, Objectives};

use super::heap::{IndexedMinHeap, QueueKey};

const NIL: u32 = u32::MAX;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Removal {
    pub id: u64,
    pub objectives: Objectives,
    /// Crowding distance at the moment of removal.
    pub cdis: f64,
}

#[derive(Debug, Clone, Default)]
struct SortedList {
    prev: Vec<u32>,
    next: Vec<u32>,
    head: u32,
    tail: u32,
}

impl SortedList {
    fn from_order(len: usize, order: &[usize]) -> Self {
        let mut list = Self {
            prev: vec![NIL; len],
            next: vec![NIL; len],
            head: NIL,
            tail: NIL,
        };
        for w in order.windows(2) {
            list.next[w[0]] = w[1] as u32;
            list.prev[w[1]] = w[0] as u32;
        }
        if let (Some(&h), Some(&t)) = (order.first(), order.last()) {
            list.head = h as u32;
            list.tail = t as u32;
        }
        list
    }

    fn unlink(&mut self, i: usize) -> (u32, u32) {
        let (p, n) = (self.prev[i], self.next[i]);
        if p == NIL {
            self.head = n;
        } else {
            self.next[p as usize] = n;
        }
        if n == NIL {
            self.tail = p;
        } else {
            self.prev[n as usize] = p;
        }
        self.prev[i] = NIL;
        self.next[i] = NIL;
        (p, n)
    }

    fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        let mut cur = self.head;
        std::iter::from_fn(move || {
            (cur != NIL).then(|| {
                let i = cur as usize;
                cur = self.next[i];
                i
            })
        })
    }
}

/// Selection state over one front. Local item `i` refers to `front[i]`.
#[derive(Debug, Clone)]
pub struct SelectionWorkspace {
    positions: Vec<usize>,
    ids: Vec<u64>,
    values: [Vec<u32>; 2],
    tie: Vec<f64>,
    lists: [SortedList; 2],
    heap: IndexedMinHeap,
}

impl SelectionWorkspace {
    /// Builds the lists and queue for `front` (slice positions into `pop`),
    /// using each individual's current `tie_key`.
    pub fn new(pop: &[Individual], front: &[usize]) -> Self {
        let len = front.len();
        let ids: Vec<u64> = front.iter().map(|&i| pop[i].id).collect();
        let values: [Vec<u32>; 2] = [
            front.iter().map(|&i| pop[i].obj().f1).collect(),
            front.iter().map(|&i| pop[i].obj().f2).collect(),
        ];
        let lists = [0, 1].map(|k| {
            let order = order_by_value_then_id(values[k].iter().copied().zip(ids.iter().copied()));
            SortedList::from_order(len, &order)
        });
        let mut ws = Self {
            positions: front.to_vec(),
            ids,
            values,
            tie: front.iter().map(|&i| pop[i].tie_key).collect(),
            lists,
            heap: IndexedMinHeap::with_capacity(len),
        };
        for i in 0..len {
            let key = QueueKey::new(ws.current_cdis(i), ws.tie[i]);
            ws.heap.push(i, key);
        }
        ws
    }

    pub fn remaining(&self) -> usize {
        self.heap.len()
    }

    pub fn queue_operations(&self) -> u64 {
        self.heap.operations()
    }

    /// Slice positions of the individuals still present.
    pub fn surviving_positions(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.positions.len())
            .filter(|&i| self.heap.contains(i))
            .map(|i| self.positions[i])
    }

    fn range(&self, k: usize) -> u32 {
        let l = &self.lists[k];
        if l.head == NIL {
            0
        } else {
            self.values[k][l.tail as usize] - self.values[k][l.head as usize]
        }
    }

    /// Crowding distance of local item `i` from its current list neighbours.
    pub fn current_cdis(&self, i: usize) -> f64 {
        let mut c = 0.0;
        for k in 0..2 {
            let l = &self.lists[k];
            let (p, n) = (l.prev[i], l.next[i]);
            if p == NIL || n == NIL {
                return f64::INFINITY;
            }
            c += crowding_term(
                self.values[k][p as usize],
                self.values[k][n as usize],
                self.range(k),
            );
        }
        c
    }

    /// Removes an individual with the smallest `(current cdis, tie key)` and
    /// refreshes the keys its removal affects.
    pub fn remove_min(&mut self) -> Option<Removal> {
        let (x, key) = self.heap.pop_min()?;
        let ranges = [self.range(0), self.range(1)];
        let mut touched = [NIL; 4];
        for k in 0..2 {
            let (p, n) = self.lists[k].unlink(x);
            touched[2 * k] = p;
            touched[2 * k + 1] = n;
        }
        if ranges != [self.range(0), self.range(1)] {
            for i in 0..self.positions.len() {
                if self.heap.contains(i) {
                    self.refresh(i);
                }
            }
        } else {
            for (j, &t) in touched.iter().enumerate() {
                if t != NIL && !touched[..j].contains(&t) {
                    self.refresh(t as usize);
                }
            }
        }
        Some(Removal {
            id: self.ids[x],
            objectives: Objectives::new(self.values[0][x], self.values[1][x]),
            cdis: key.cdis,
        })
    }

    fn refresh(&mut self, i: usize) {
        let key = QueueKey::new(self.current_cdis(i), self.tie[i]);
        self.heap.update_key(i, key);
    }

    /// Every queued key equals the crowding distance implied by the current
    /// neighbourhoods, and both lists are sorted by `(value, id)`.
    pub fn is_consistent(&self) -> bool {
        for i in 0..self.positions.len() {
            if let Some(key) = self.heap.key(i) {
                if key.cdis.to_bits() != self.current_cdis(i).to_bits() {
                    return false;
                }
            }
        }
        (0..2).all(|k| {
            let items: Vec<usize> = self.lists[k].iter().collect();
            items.len() == self.heap.len()
                && items.windows(2).all(|w| {
                    (self.values[k][w[0]], self.ids[w[0]]) < (self.values[k][w[1]], self.ids[w[1]])
                })
        })
    }
}
