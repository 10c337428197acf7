//! Approximation quality of a set of `OneMinMax` objective vectors.
//!
//! On `OneMinMax` every objective vector is `(k, n - k)`, so a set of
//! vectors is described by its distinct first-objective values, a
//! [`FrontSubset`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::Individual;

/// Distinct first-objective values of a point set on the `OneMinMax` front.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrontSubset {
    n: u32,
    values: Vec<u32>,
}

impl FrontSubset {
    /// Sorts and deduplicates `values`. Fails if it is empty or a value
    /// exceeds `n`.
    pub fn new(n: u32, values: impl IntoIterator<Item = u32>) -> Result<Self> {
        let mut values: Vec<u32> = values.into_iter().collect();
        if values.is_empty() {
            return Err(Error::Empty("front subset"));
        }
        values.sort_unstable();
        values.dedup();
        if let Some(&value) = values.iter().find(|&&v| v > n) {
            return Err(Error::OutOfRange { value, n });
        }
        Ok(Self { n, values })
    }

    /// First-objective values of an evaluated population.
    pub fn from_population(n: u32, members: &[Individual]) -> Result<Self> {
        Self::new(n, members.iter().map(|x| x.obj().f1))
    }

    /// Every value `0..=n`.
    pub fn full(n: u32) -> Self {
        Self {
            n,
            values: (0..=n).collect(),
        }
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn values(&self) -> &[u32] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn has_extremes(&self) -> bool {
        self.values[0] == 0 && self.values[self.values.len() - 1] == self.n
    }

    fn gaps(&self) -> impl Iterator<Item = u32> + '_ {
        self.values.windows(2).map(|w| w[1] - w[0])
    }

    fn require_extremes(&self) -> Result<()> {
        if self.has_extremes() {
            Ok(())
        } else {
            Err(Error::MissingExtremes { n: self.n })
        }
    }
}

/// Reference point for the hypervolume; both coordinates are at most zero.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ReferencePoint {
    pub r1: f64,
    pub r2: f64,
}

impl ReferencePoint {
    pub fn new(r1: f64, r2: f64) -> Result<Self> {
        if r1 <= 0.0 && r2 <= 0.0 {
            Ok(Self { r1, r2 })
        } else {
            Err(Error::Config(format!(
                "reference point ({r1}, {r2}) must not exceed the origin"
            )))
        }
    }

    pub fn origin() -> Self {
        Self::default()
    }

    /// Area dominated by the whole front, before subtracting gap triangles.
    pub fn base_area(&self, n: u32) -> f64 {
        let n = f64::from(n);
        -self.r1 * n - self.r2 * n + self.r1 * self.r2 + 0.5 * n * n
    }
}

/// Largest gap between consecutive values; 0 for a single value.
pub fn mei(s: &FrontSubset) -> u32 {
    s.gaps().max().unwrap_or(0)
}

/// Smallest maximal empty interval reachable with `capacity` points
/// including both extremes: `ceil(n / (capacity - 1))`.
pub fn mei_opt(n: u32, capacity: u32) -> Result<u32> {
    if capacity < 2 {
        return Err(Error::Config(format!(
            "optimal maximal empty interval needs capacity at least 2, got {capacity}"
        )));
    }
    Ok(n.div_ceil(capacity - 1))
}

fn eps_parts(s: &FrontSubset) -> Result<(f64, f64)> {
    s.require_extremes()?;
    let m = mei(s);
    if m >= s.n {
        return Err(Error::Degenerate { n: s.n });
    }
    Ok((f64::from(m), f64::from(s.n - m)))
}

/// Upper bound on the multiplicative epsilon: `mei / (n - mei)`.
pub fn eps_upper(s: &FrontSubset) -> Result<f64> {
    let (m, rest) = eps_parts(s)?;
    Ok(m / rest)
}

/// Lower bound on the multiplicative epsilon: `(mei - 1) / (n - mei)`.
pub fn eps_lower(s: &FrontSubset) -> Result<f64> {
    let (m, rest) = eps_parts(s)?;
    Ok((m - 1.0) / rest)
}

fn eps_to_cover(u: u32, v: u32) -> f64 {
    if v <= u {
        0.0
    } else if u == 0 {
        f64::INFINITY
    } else {
        f64::from(v) / f64::from(u) - 1.0
    }
}

/// Smallest `eps` such that every front point `(k, n - k)` is
/// `eps`-dominated by some member of `s`, by enumeration of all pairs.
pub fn eps_exact(s: &FrontSubset) -> Result<f64> {
    s.require_extremes()?;
    let n = s.n;
    let mut worst = 0.0f64;
    for k in 0..=n {
        let best = s
            .values
            .iter()
            .map(|&j| eps_to_cover(j, k).max(eps_to_cover(n - j, n - k)))
            .fold(f64::INFINITY, f64::min);
        worst = worst.max(best);
    }
    Ok(worst)
}

/// Hypervolume from the closed form `A - sum(gap^2) / 2`.
pub fn hv_exact(s: &FrontSubset, r: ReferencePoint) -> Result<f64> {
    s.require_extremes()?;
    let squares: f64 = s.gaps().map(|g| 0.5 * f64::from(g) * f64::from(g)).sum();
    Ok(r.base_area(s.n) - squares)
}

/// Hypervolume as the area of the union of the boxes `[r, u]`, by a
/// staircase sweep in decreasing first objective.
pub fn hv_union_oracle(s: &FrontSubset, r: ReferencePoint) -> f64 {
    let mut area = 0.0;
    let mut height = r.r2;
    for &j in s.values.iter().rev() {
        let (u1, u2) = (f64::from(j), f64::from(s.n - j));
        if u2 > height {
            area += (u1 - r.r1) * (u2 - height);
            height = u2;
        }
    }
    area
}

/// Interval `[A - (|S| - 1) mei^2 / 2, A - n / (2 (|S| - 1))]` containing
/// the hypervolume of `s`.
pub fn hv_bounds(s: &FrontSubset, r: ReferencePoint) -> Result<(f64, f64)> {
    s.require_extremes()?;
    if s.len() < 2 {
        return Err(Error::Degenerate { n: s.n });
    }
    let segments = (s.len() - 1) as f64;
    let a = r.base_area(s.n);
    let m = f64::from(mei(s));
    Ok((
        a - segments * m * m / 2.0,
        a - f64::from(s.n) / (2.0 * segments),
    ))
}

/// Interval containing the largest hypervolume reachable with `capacity`
/// points.
pub fn hv_opt_bounds(n: u32, capacity: u32, r: ReferencePoint) -> Result<(f64, f64)> {
    let m = f64::from(mei_opt(n, capacity)?);
    let segments = f64::from(capacity - 1);
    let a = r.base_area(n);
    Ok((
        a - segments * m * m / 2.0,
        a - f64::from(n) / (2.0 * segments),
    ))
}

/// Evenly spaced subset `min((i - 1) ceil(n / (N - 1)), n)` for `i = 1..=N`.
pub fn evenly_spaced(n: u32, capacity: u32) -> Result<FrontSubset> {
    let step = mei_opt(n, capacity)?;
    FrontSubset::new(n, (0..capacity).map(|i| (i * step).min(n)))
}

/// All measures for one subset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub n: u32,
    pub size: usize,
    pub mei: u32,
    /// Both extremes `0` and `n` are covered; the epsilon and hypervolume
    /// bounds are only defined in that case.
    pub extremes: bool,
    /// Only one distinct value, so `mei` is 0 by convention.
    pub singleton: bool,
    pub eps_lower: Option<f64>,
    pub eps_exact: Option<f64>,
    pub eps_upper: Option<f64>,
    pub hv: f64,
    pub hv_lower: Option<f64>,
    pub hv_upper: Option<f64>,
}

impl MetricReport {
    pub fn compute(s: &FrontSubset, r: ReferencePoint) -> Self {
        let bounds = hv_bounds(s, r).ok();
        Self {
            n: s.n,
            size: s.len(),
            mei: mei(s),
            extremes: s.has_extremes(),
            singleton: s.len() == 1,
            eps_lower: eps_lower(s).ok(),
            eps_exact: eps_exact(s).ok(),
            eps_upper: eps_upper(s).ok(),
            hv: hv_union_oracle(s, r),
            hv_lower: bounds.map(|b| b.0),
            hv_upper: bounds.map(|b| b.1),
        }
    }
}

/// Exhaustive-enumeration references for small `n`.
pub mod exhaustive {
    use super::*;

    /// Smallest `mei` over all subsets of `0..=n` with at most `capacity`
    /// values that contain both `0` and `n`.
    pub fn mei_opt(n: u32, capacity: u32) -> Option<u32> {
        assert!(n <= 20, "exhaustive enumeration is limited to n <= 20");
        if capacity < 2 {
            return None;
        }
        let inner = n.saturating_sub(1);
        let mut best = None;
        for mask in 0u32..(1 << inner) {
            let ends = if n == 0 { 1 } else { 2 };
            if mask.count_ones() + ends > capacity {
                continue;
            }
            let values = std::iter::once(0)
                .chain((1..n).filter(|&v| mask & (1 << (v - 1)) != 0))
                .chain(std::iter::once(n));
            let m = super::mei(&FrontSubset::new(n, values).expect("values in range"));
            best = Some(best.map_or(m, |b: u32| b.min(m)));
        }
        best
    }

    /// Largest union-of-boxes hypervolume over all nonempty subsets of
    /// `0..=n` with at most `capacity` values.
    pub fn hv_opt(n: u32, capacity: u32, r: ReferencePoint) -> f64 {
        assert!(n <= 20, "exhaustive enumeration is limited to n <= 20");
        let mut best = f64::NEG_INFINITY;
        for mask in 1u32..(1 << (n + 1)) {
            if mask.count_ones() > capacity {
                continue;
            }
            let values = (0..=n).filter(|&v| mask & (1 << v) != 0);
            let s = FrontSubset::new(n, values).expect("values in range");
            best = best.max(hv_union_oracle(&s, r));
        }
        best
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const TOL: f64 = 1e-9;

    fn subset(n: u32, v: &[u32]) -> FrontSubset {
        FrontSubset::new(n, v.iter().copied()).unwrap()
    }

    #[test]
    fn subset_validation() {
        assert!(matches!(FrontSubset::new(3, []), Err(Error::Empty(_))));
        assert!(matches!(
            FrontSubset::new(3, [0, 4]),
            Err(Error::OutOfRange { value: 4, n: 3 })
        ));
        assert_eq!(subset(6, &[6, 0, 3, 3]).values(), &[0, 3, 6]);
    }

    #[test]
    fn mei_examples() {
        assert_eq!(mei(&FrontSubset::full(10)), 1);
        assert_eq!(mei(&subset(6, &[0, 3, 6])), 3);
        assert_eq!(mei(&subset(6, &[0, 4, 6])), 4);
        assert_eq!(mei(&subset(6, &[2])), 0);
    }

    #[test]
    fn mei_opt_examples() {
        assert_eq!(mei_opt(601, 301).unwrap(), 3);
        assert_eq!(mei_opt(601, 151).unwrap(), 5);
        assert_eq!(mei_opt(601, 76).unwrap(), 9);
        assert_eq!(mei_opt(6, 7).unwrap(), 1);
        assert_eq!(mei_opt(12, 4).unwrap(), 4);
        assert!(mei_opt(12, 1).is_err());
        assert_eq!(exhaustive::mei_opt(12, 4), Some(4));
    }

    #[test]
    fn mei_opt_matches_enumeration() {
        for n in 1..=12 {
            for cap in 2..=6 {
                assert_eq!(
                    exhaustive::mei_opt(n, cap),
                    Some(mei_opt(n, cap).unwrap()),
                    "n={n} N={cap}"
                );
            }
        }
    }

    #[test]
    fn eps_examples() {
        let full = FrontSubset::full(10);
        assert!((eps_upper(&full).unwrap() - 1.0 / 9.0).abs() < TOL);
        assert_eq!(eps_lower(&full).unwrap(), 0.0);
        assert_eq!(eps_exact(&full).unwrap(), 0.0);

        let s = subset(6, &[0, 3, 6]);
        assert!((eps_upper(&s).unwrap() - 1.0).abs() < TOL);
        assert!((eps_lower(&s).unwrap() - 2.0 / 3.0).abs() < TOL);
        assert!((eps_exact(&s).unwrap() - 2.0 / 3.0).abs() < TOL);

        let s = subset(6, &[0, 4, 6]);
        assert!((eps_upper(&s).unwrap() - 2.0).abs() < TOL);
        assert!((eps_lower(&s).unwrap() - 1.5).abs() < TOL);
    }

    #[test]
    fn eps_errors() {
        assert!(matches!(
            eps_upper(&subset(6, &[0, 3])),
            Err(Error::MissingExtremes { n: 6 })
        ));
        assert!(matches!(
            eps_lower(&subset(6, &[0, 6])),
            Err(Error::Degenerate { n: 6 })
        ));
        assert!(matches!(
            eps_exact(&subset(6, &[3, 6])),
            Err(Error::MissingExtremes { .. })
        ));
    }

    #[test]
    fn hv_examples() {
        let o = ReferencePoint::origin();
        assert!((hv_exact(&FrontSubset::full(2), o).unwrap() - 1.0).abs() < TOL);
        assert!((hv_union_oracle(&FrontSubset::full(2), o) - 1.0).abs() < TOL);
        let r = ReferencePoint::new(-1.0, -1.0).unwrap();
        assert!((hv_exact(&subset(6, &[0, 3, 6]), r).unwrap() - 22.0).abs() < TOL);
        assert!(hv_exact(&subset(6, &[0, 6]), o).unwrap().abs() < TOL);
        assert!((hv_union_oracle(&subset(10, &[4]), o) - 24.0).abs() < TOL);
        assert!(ReferencePoint::new(0.5, 0.0).is_err());
    }

    #[test]
    fn hv_bound_examples() {
        let o = ReferencePoint::origin();
        let s = subset(6, &[0, 3, 6]);
        let (lo, hi) = hv_bounds(&s, o).unwrap();
        assert!((lo - 9.0).abs() < TOL && (hi - 16.5).abs() < TOL);
        assert!((hv_exact(&s, o).unwrap() - 9.0).abs() < TOL);

        let full = FrontSubset::full(20);
        let (lo, hi) = hv_bounds(&full, o).unwrap();
        let exact = hv_exact(&full, o).unwrap();
        assert!((exact - (200.0 - 10.0)).abs() < TOL);
        assert!(lo <= exact + TOL && exact <= hi + TOL);

        let (lo, hi) = hv_opt_bounds(12, 4, o).unwrap();
        assert!((lo - 48.0).abs() < TOL && (hi - 70.0).abs() < TOL);
        let best = exhaustive::hv_opt(12, 4, o);
        assert!(lo <= best && best <= hi);
        assert!(hv_opt_bounds(5, 1, o).is_err());
    }

    #[test]
    fn evenly_spaced_lies_in_optimal_interval() {
        let r = ReferencePoint::new(-2.0, -0.5).unwrap();
        for n in 1..60 {
            for cap in 2..12 {
                let s = evenly_spaced(n, cap).unwrap();
                assert!(s.len() <= cap as usize);
                let (lo, hi) = hv_opt_bounds(n, cap, r).unwrap();
                let hv = hv_exact(&s, r).unwrap();
                assert!(lo <= hv + TOL && hv <= hi + TOL, "n={n} N={cap}");
            }
        }
    }

    #[test]
    fn report_flags() {
        let rep = MetricReport::compute(&subset(6, &[3]), ReferencePoint::origin());
        assert!(rep.singleton && !rep.extremes);
        assert_eq!(rep.mei, 0);
        assert_eq!(rep.eps_upper, None);
        assert!((rep.hv - 9.0).abs() < TOL);
        let rep = MetricReport::compute(&subset(6, &[0, 3, 6]), ReferencePoint::origin());
        assert_eq!(rep.hv_lower, Some(9.0));
    }

    fn arb_subset() -> impl Strategy<Value = FrontSubset> {
        (1u32..40).prop_flat_map(|n| {
            proptest::collection::vec(0..=n, 0..12)
                .prop_map(move |v| FrontSubset::new(n, v.into_iter().chain([0, n])).unwrap())
        })
    }

    proptest! {
        #[test]
        fn sandwich_and_hv_agreement(s in arb_subset(), r1 in -5.0f64..=0.0, r2 in -5.0f64..=0.0) {
            let r = ReferencePoint::new(r1, r2).unwrap();
            let exact = hv_exact(&s, r).unwrap();
            prop_assert!((exact - hv_union_oracle(&s, r)).abs() < 1e-9);
            if s.len() >= 2 {
                let (lo, hi) = hv_bounds(&s, r).unwrap();
                prop_assert!(lo <= exact + 1e-9 && exact <= hi + 1e-9);
            }
            if mei(&s) < s.n() {
                let e = eps_exact(&s).unwrap();
                prop_assert!(eps_lower(&s).unwrap() <= e + 1e-9);
                prop_assert!(e <= eps_upper(&s).unwrap() + 1e-9);
            }
        }

        #[test]
        fn adding_a_point_never_shrinks_hv(s in arb_subset(), extra in 0u32..40) {
            let r = ReferencePoint::origin();
            let bigger = FrontSubset::new(s.n(), s.values().iter().copied().chain([extra.min(s.n())])).unwrap();
            prop_assert!(hv_union_oracle(&bigger, r) >= hv_union_oracle(&s, r) - 1e-9);
        }

        #[test]
        fn mei_is_order_independent(mut v in proptest::collection::vec(0u32..50, 1..20), seed in any::<u64>()) {
            let a = mei(&FrontSubset::new(50, v.clone()).unwrap());
            let k = (seed as usize) % v.len();
            v.rotate_left(k);
            v.reverse();
            prop_assert_eq!(a, mei(&FrontSubset::new(50, v).unwrap()));
        }
    }
}
