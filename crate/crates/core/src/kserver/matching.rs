//! Minimum-cost perfect matching between configurations.

use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::metric::MetricSpace;
use crate::scalar::Scalar;

use super::Configuration;

type Buf<T> = SmallVec<[T; 8]>;

/// Solves the square assignment problem with the O(n³) shortest augmenting
/// path method (Hungarian algorithm with potentials).
///
/// Returns the optimal total cost and `assignment[row] = column`.
pub fn min_cost_assignment<T: Scalar>(n: usize, cost: impl Fn(usize, usize) -> T) -> (T, Vec<usize>) {
    if n == 0 {
        return (T::zero(), Vec::new());
    }
    let inf = T::infinity();
    // 1-based with a virtual column 0, following the classic formulation.
    let mut u: Buf<T> = SmallVec::from_elem(T::zero(), n + 1);
    let mut v: Buf<T> = SmallVec::from_elem(T::zero(), n + 1);
    let mut p: Buf<usize> = SmallVec::from_elem(0, n + 1);
    let mut way: Buf<usize> = SmallVec::from_elem(0, n + 1);
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0;
        let mut minv: Buf<T> = SmallVec::from_elem(inf, n + 1);
        let mut used: Buf<bool> = SmallVec::from_elem(false, n + 1);
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = inf;
            let mut j1 = 0;
            for j in 1..=n {
                if !used[j] {
                    let cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] = u[p[j]] + delta;
                    v[j] = v[j] - delta;
                } else {
                    minv[j] = minv[j] - delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut assignment = vec![0; n];
    for j in 1..=n {
        assignment[p[j] - 1] = j - 1;
    }
    // Sum the original entries so integer inputs give exact totals.
    let total = assignment.iter().enumerate().map(|(i, &j)| cost(i, j)).sum();
    (total, assignment)
}

/// Minimal total distance to move the servers of `a` onto `b`.
pub fn config_distance<T: Scalar>(a: &Configuration, b: &Configuration, space: &MetricSpace<T>) -> Result<T> {
    if a.k() != b.k() {
        return Err(Error::LengthMismatch { expected: a.k(), got: b.k() });
    }
    Ok(matching_distance(a.positions(), b.positions(), space))
}

/// Matching distance between two sorted position lists of equal length.
///
/// Shared points are matched to themselves first; some optimal matching
/// always does so by the triangle inequality.
pub(crate) fn matching_distance<T: Scalar>(a: &[usize], b: &[usize], space: &MetricSpace<T>) -> T {
    let mut left: Buf<usize> = SmallVec::new();
    let mut right: Buf<usize> = SmallVec::new();
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
            std::cmp::Ordering::Less => {
                left.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                right.push(b[j]);
                j += 1;
            }
        }
    }
    left.extend_from_slice(&a[i..]);
    right.extend_from_slice(&b[j..]);
    match left.len() {
        0 => T::zero(),
        1 => space.dist(left[0], right[0]),
        n => min_cost_assignment(n, |x, y| space.dist(left[x], right[y])).0,
    }
}
