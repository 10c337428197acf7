//! Non-dominated sorting and crowding distance.
//!
//! Both routines address individuals by their position in the slice they are
//! given, which plays the role of the handle array: positions are stable for
//! the lifetime of a selection step, ids are not required to be dense.

use crate::types::{Individual, Objectives};

/// Fronts `F_1, F_2, ...` as lists of slice positions, each in ascending
/// position order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FrontPartition {
    pub fronts: Vec<Vec<usize>>,
}

impl FrontPartition {
    pub fn len(&self) -> usize {
        self.fronts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fronts.is_empty()
    }

    pub fn total(&self) -> usize {
        self.fronts.iter().map(Vec::len).sum()
    }

    /// Zero-based index `i*` of the first front at which the cumulative size
    /// reaches `capacity`, together with the number of individuals in the
    /// fronts before it. `None` if all fronts together are smaller than
    /// `capacity`.
    pub fn critical_front(&self, capacity: usize) -> Option<(usize, usize)> {
        let mut before = 0;
        for (i, f) in self.fronts.iter().enumerate() {
            if before + f.len() >= capacity {
                return Some((i, before));
            }
            before += f.len();
        }
        None
    }
}

/// Splits `pop` into fronts and writes each individual's 1-based rank.
///
/// Bi-objective sweep: individuals are visited by decreasing `f1` (then
/// decreasing `f2`); the members of one front, visited in that order, have
/// non-decreasing `f2`, so a front dominates the visited point exactly when its
/// latest member has `f2` at least as large and is not an identical vector.
/// Whether a front dominates is monotone in the front index, so the target
/// front is found by binary search.
pub fn non_dominated_sort(pop: &mut [Individual]) -> FrontPartition {
    if pop.is_empty() {
        return FrontPartition::default();
    }

    // Vectors with equal coordinate sum are equal or incomparable.
    let first = pop[0].obj();
    let sum = first.f1 as u64 + first.f2 as u64;
    if pop.iter().all(|x| {
        let o = x.obj();
        o.f1 as u64 + o.f2 as u64 == sum
    }) {
        for x in pop.iter_mut() {
            x.rank = Some(1);
        }
        return FrontPartition {
            fronts: vec![(0..pop.len()).collect()],
        };
    }

    let mut order: Vec<usize> = (0..pop.len()).collect();
    order.sort_unstable_by(|&a, &b| {
        let (oa, ob) = (pop[a].obj(), pop[b].obj());
        ob.f1.cmp(&oa.f1).then(ob.f2.cmp(&oa.f2)).then(a.cmp(&b))
    });

    let mut fronts: Vec<Vec<usize>> = Vec::new();
    let mut last: Vec<Objectives> = Vec::new();
    for idx in order {
        let p = pop[idx].obj();
        let target = last.partition_point(|q| q.f2 >= p.f2 && *q != p);
        if target == fronts.len() {
            fronts.push(Vec::new());
            last.push(p);
        }
        fronts[target].push(idx);
        last[target] = p;
    }
    for (rank, front) in fronts.iter_mut().enumerate() {
        front.sort_unstable();
        for &i in front.iter() {
            pop[i].rank = Some(rank as u32 + 1);
        }
    }
    FrontPartition { fronts }
}

/// Contribution of one objective to an inner individual's crowding
/// distance: the gap between its two neighbours normalised by the range of
/// that objective. A zero range contributes nothing.
#[inline]
pub fn crowding_term(below: u32, above: u32, range: u32) -> f64 {
    if range == 0 {
        0.0
    } else {
        (above - below) as f64 / range as f64
    }
}

/// The two per-objective orders used for a crowding-distance computation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CrowdingAssignment {
    /// `orders[k]` lists the front's slice positions by ascending
    /// `(f_k, id)`.
    pub orders: [Vec<usize>; 2],
}

/// Indices `0..len` of `(value, id)` pairs in ascending lexicographic order.
///
/// Populations are usually stored by ascending id with objective values
/// bounded by a small multiple of their size; that case is handled by a
/// stable counting sort.
pub fn order_by_value_then_id(pairs: impl IntoIterator<Item = (u32, u64)>) -> Vec<usize> {
    let pairs: Vec<(u32, u64)> = pairs.into_iter().collect();
    let max_value = pairs.iter().map(|p| p.0).max().unwrap_or(0) as usize;
    let ids_ascending = pairs.windows(2).all(|w| w[0].1 < w[1].1);
    if ids_ascending && max_value <= 4 * pairs.len() + 64 {
        let mut start = vec![0usize; max_value + 2];
        for &(v, _) in &pairs {
            start[v as usize + 1] += 1;
        }
        for v in 1..start.len() {
            start[v] += start[v - 1];
        }
        let mut order = vec![0usize; pairs.len()];
        for (i, &(v, _)) in pairs.iter().enumerate() {
            order[start[v as usize]] = i;
            start[v as usize] += 1;
        }
        return order;
    }
    let mut keys: Vec<u128> = pairs
        .iter()
        .enumerate()
        .map(|(i, &(v, id))| {
            debug_assert!(i < u32::MAX as usize);
            (v as u128) << 96 | (id as u128) << 32 | i as u128
        })
        .collect();
    keys.sort_unstable();
    keys.into_iter()
        .map(|key| (key & 0xffff_ffff) as usize)
        .collect()
}

/// Front positions sorted by ascending `(objective k, id)`.
pub fn objective_order(pop: &[Individual], front: &[usize], k: usize) -> Vec<usize> {
    order_by_value_then_id(front.iter().map(|&i| (pop[i].obj().get(k), pop[i].id)))
        .into_iter()
        .map(|j| front[j])
        .collect()
}

/// Crowding distance of every individual in `front`, written to its `cdis`.
///
/// For each objective the front is sorted by ascending value, ties by
/// ascending id; the first and last individual get `+inf`, every other one
/// adds the normalised gap between its two neighbours.
pub fn crowding_distance(pop: &mut [Individual], front: &[usize]) -> CrowdingAssignment {
    let orders = [
        objective_order(pop, front, 0),
        objective_order(pop, front, 1),
    ];
    for &i in front {
        pop[i].cdis = Some(0.0);
    }
    for (k, order) in orders.iter().enumerate() {
        let (Some(&lo), Some(&hi)) = (order.first(), order.last()) else {
            continue;
        };
        let range = pop[hi].obj().get(k) - pop[lo].obj().get(k);
        pop[lo].cdis = Some(f64::INFINITY);
        pop[hi].cdis = Some(f64::INFINITY);
        for w in order.windows(3) {
            let term = crowding_term(pop[w[0]].obj().get(k), pop[w[2]].obj().get(k), range);
            let c = pop[w[1]].cdis.get_or_insert(0.0);
            *c += term;
        }
    }
    CrowdingAssignment { orders }
}

/// Crowding distance for every front up to and including `last_front`.
pub fn crowding_up_to(pop: &mut [Individual], partition: &FrontPartition, last_front: usize) {
    for front in partition.fronts.iter().take(last_front + 1) {
        crowding_distance(pop, front);
    }
}
