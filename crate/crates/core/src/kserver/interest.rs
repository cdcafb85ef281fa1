use crate::error::{Error, Result};
use crate::metric::MetricSpace;
use crate::scalar::Scalar;

/// Online bound D on pairwise distances inside the set of interest:
/// twice the largest distance from a fixed reference point. Each insertion
/// is O(1) and D never decreases.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterestBound<T> {
    reference: usize,
    radius: T,
}

impl<T: Scalar> InterestBound<T> {
    pub fn new(reference: usize) -> Self {
        Self { reference, radius: T::zero() }
    }

    pub fn reference(&self) -> usize {
        self.reference
    }

    pub fn insert(&mut self, point: usize, space: &MetricSpace<T>) {
        self.radius = self.radius.max(space.dist(self.reference, point));
    }

    /// D = 2 · max_p d(reference, p).
    pub fn bound(&self) -> T {
        self.radius + self.radius
    }
}

/// D for an explicit interest set; `reference` must belong to it.
pub fn interest_bound_d<T: Scalar>(interest: &[usize], reference: usize, space: &MetricSpace<T>) -> Result<T> {
    if !interest.contains(&reference) {
        return Err(Error::Instance(format!("reference point {reference} is not in the set of interest")));
    }
    let mut b = InterestBound::new(reference);
    for &p in interest {
        if p >= space.len() {
            return Err(Error::OutOfRange { index: p, size: space.len() });
        }
        b.insert(p, space);
    }
    Ok(b.bound())
}
