//! Small order statistics used by the run summaries.

/// Nearest-rank quantile: the element at rank `ceil(q * m)` (1-based, at
/// least 1) of the sorted sample. Returns `None` for an empty sample.
pub fn nearest_rank<T: Copy + Ord>(sorted: &[T], q: f64) -> Option<T> {
    if sorted.is_empty() {
        return None;
    }
    let m = sorted.len();
    let rank = ((q * m as f64).ceil() as usize).clamp(1, m);
    Some(sorted[rank - 1])
}

/// First, second and third quartile by nearest rank. Sorts `sample`.
pub fn quartiles<T: Copy + Ord>(sample: &mut [T]) -> Option<[T; 3]> {
    sample.sort_unstable();
    Some([
        nearest_rank(sample, 0.25)?,
        nearest_rank(sample, 0.5)?,
        nearest_rank(sample, 0.75)?,
    ])
}

/// Minimum, nearest-rank median and maximum. Sorts `sample`.
pub fn min_median_max<T: Copy + Ord>(sample: &mut [T]) -> Option<[T; 3]> {
    sample.sort_unstable();
    Some([
        *sample.first()?,
        nearest_rank(sample, 0.5)?,
        *sample.last()?,
    ])
}
