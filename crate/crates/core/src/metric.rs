//! Finite metric spaces.
//!
//! Points are dense indices `0..n`. A [`MetricSpace`] can only be obtained
//! through validation, so every instance satisfies the metric axioms.

use std::fmt;

use thiserror::Error;

use crate::scalar::Scalar;

/// First violated metric axiom, with witnessing indices.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricError {
    #[error("empty metric: at least one point is required")]
    Empty,
    #[error("matrix is not square: row {row} has {len} entries, expected {expected}")]
    NotSquare { row: usize, len: usize, expected: usize },
    #[error("entry ({p},{q}) is negative or not a number: {value}")]
    Negative { p: usize, q: usize, value: f64 },
    #[error("entry ({p},{p}) on the diagonal is {value}, expected 0")]
    NonZeroDiagonal { p: usize, value: f64 },
    #[error("zero distance between distinct points {p} and {q}")]
    ZeroOffDiagonal { p: usize, q: usize },
    #[error("symmetry violation at ({p},{q}): {forward} != {backward}")]
    Asymmetric { p: usize, q: usize, forward: f64, backward: f64 },
    #[error("triangle violation: d({p},{q})={direct} > d({p},{via})+d({via},{q})={detour}")]
    Triangle { p: usize, q: usize, via: usize, direct: f64, detour: f64 },
    #[error("points have mixed dimensions: point {index} has {got}, expected {expected}")]
    MixedDimensions { index: usize, expected: usize, got: usize },
    #[error("points must have at least one coordinate")]
    ZeroDimension,
    #[error("edge {index} ({p},{q}) has nonpositive weight {weight}")]
    NonPositiveWeight { index: usize, p: usize, q: usize, weight: f64 },
    #[error("edge {index} references vertex {vertex}, but the graph has {n} vertices")]
    UnknownVertex { index: usize, vertex: usize, n: usize },
    #[error("graph is disconnected: no path between {p} and {q}")]
    Disconnected { p: usize, q: usize },
}

/// Immutable finite metric space with a cached diameter.
#[derive(Clone, PartialEq)]
pub struct MetricSpace<T> {
    n: usize,
    dist: Vec<T>,
    diameter: T,
}

impl<T: Scalar> MetricSpace<T> {
    /// Validates an explicit distance matrix.
    pub fn from_matrix(matrix: &[Vec<T>]) -> Result<Self, MetricError> {
        let n = matrix.len();
        if n == 0 {
            return Err(MetricError::Empty);
        }
        for (row, entries) in matrix.iter().enumerate() {
            if entries.len() != n {
                return Err(MetricError::NotSquare { row, len: entries.len(), expected: n });
            }
        }
        let dist: Vec<T> = matrix.iter().flat_map(|row| row.iter().copied()).collect();
        Self::check(n, &dist)?;
        Ok(Self::new_unchecked(n, dist))
    }

    /// Euclidean distances between coordinate vectors.
    pub fn from_points(points: &[Vec<T>]) -> Result<Self, MetricError> {
        let first = points.first().ok_or(MetricError::Empty)?;
        let dim = first.len();
        if dim == 0 {
            return Err(MetricError::ZeroDimension);
        }
        for (index, p) in points.iter().enumerate() {
            if p.len() != dim {
                return Err(MetricError::MixedDimensions { index, expected: dim, got: p.len() });
            }
        }
        let n = points.len();
        let mut dist = vec![T::zero(); n * n];
        for p in 0..n {
            for q in (p + 1)..n {
                let d = points[p]
                    .iter()
                    .zip(&points[q])
                    .map(|(&a, &b)| (a - b) * (a - b))
                    .sum::<T>()
                    .sqrt();
                dist[p * n + q] = d;
                dist[q * n + p] = d;
            }
        }
        // Duplicate points would break identity of indiscernibles; rounding can
        // also bend the triangle inequality on non-integer coordinates.
        Self::check(n, &dist)?;
        Ok(Self::new_unchecked(n, dist))
    }

    /// Shortest-path closure of an undirected weighted graph on vertices
    /// `0..=max index`.
    pub fn from_graph(edges: &[(usize, usize, T)]) -> Result<Self, MetricError> {
        let n = edges.iter().map(|&(p, q, _)| p.max(q) + 1).max().unwrap_or(1);
        Self::from_graph_with_order(n, edges)
    }

    /// Like [`MetricSpace::from_graph`] with an explicit vertex count, so
    /// isolated trailing vertices are reported as disconnected.
    pub fn from_graph_with_order(n: usize, edges: &[(usize, usize, T)]) -> Result<Self, MetricError> {
        if n == 0 {
            return Err(MetricError::Empty);
        }
        let inf = T::infinity();
        let mut dist = vec![inf; n * n];
        for p in 0..n {
            dist[p * n + p] = T::zero();
        }
        for (index, &(p, q, w)) in edges.iter().enumerate() {
            for vertex in [p, q] {
                if vertex >= n {
                    return Err(MetricError::UnknownVertex { index, vertex, n });
                }
            }
            if w.is_nan() || w <= T::zero() {
                return Err(MetricError::NonPositiveWeight { index, p, q, weight: w.as_f64() });
            }
            if p != q && w < dist[p * n + q] {
                dist[p * n + q] = w;
                dist[q * n + p] = w;
            }
        }
        // Floyd-Warshall
        for via in 0..n {
            for p in 0..n {
                let dpv = dist[p * n + via];
                if dpv == inf {
                    continue;
                }
                for q in 0..n {
                    let cand = dpv + dist[via * n + q];
                    if cand < dist[p * n + q] {
                        dist[p * n + q] = cand;
                    }
                }
            }
        }
        for p in 0..n {
            for q in 0..n {
                if dist[p * n + q] == inf {
                    return Err(MetricError::Disconnected { p, q });
                }
            }
        }
        Self::check(n, &dist)?;
        Ok(Self::new_unchecked(n, dist))
    }

    fn new_unchecked(n: usize, dist: Vec<T>) -> Self {
        let diameter = dist.iter().copied().fold(T::zero(), T::max);
        Self { n, dist, diameter }
    }

    fn check(n: usize, dist: &[T]) -> Result<(), MetricError> {
        let at = |p: usize, q: usize| dist[p * n + q];
        for p in 0..n {
            for q in 0..n {
                let v = at(p, q);
                if v.is_nan() || v < T::zero() {
                    return Err(MetricError::Negative { p, q, value: v.as_f64() });
                }
            }
        }
        for p in 0..n {
            if at(p, p) != T::zero() {
                return Err(MetricError::NonZeroDiagonal { p, value: at(p, p).as_f64() });
            }
        }
        for p in 0..n {
            for q in (p + 1)..n {
                if at(p, q) != at(q, p) {
                    return Err(MetricError::Asymmetric {
                        p,
                        q,
                        forward: at(p, q).as_f64(),
                        backward: at(q, p).as_f64(),
                    });
                }
                if at(p, q) == T::zero() {
                    return Err(MetricError::ZeroOffDiagonal { p, q });
                }
            }
        }
        for p in 0..n {
            for q in 0..n {
                for via in 0..n {
                    let detour = at(p, via) + at(via, q);
                    if at(p, q) > detour + T::TOLERANCE {
                        return Err(MetricError::Triangle {
                            p,
                            q,
                            via,
                            direct: at(p, q).as_f64(),
                            detour: detour.as_f64(),
                        });
                    }
                }
            }
        }
        Ok(())
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn dist(&self, p: usize, q: usize) -> T {
        self.dist[p * self.n + q]
    }

    /// Row `p` of the distance matrix.
    #[inline]
    pub fn row(&self, p: usize) -> &[T] {
        &self.dist[p * self.n..(p + 1) * self.n]
    }

    /// Maximum distance over all pairs (Δ).
    #[inline]
    pub fn diameter(&self) -> T {
        self.diameter
    }

    pub fn to_matrix(&self) -> Vec<Vec<T>> {
        (0..self.n).map(|p| self.row(p).to_vec()).collect()
    }

    /// Smallest distance between distinct points, `None` for a single point.
    pub fn min_positive_distance(&self) -> Option<T> {
        (0..self.n)
            .flat_map(|p| ((p + 1)..self.n).map(move |q| (p, q)))
            .map(|(p, q)| self.dist(p, q))
            .reduce(T::min)
    }
}

impl<T: fmt::Debug> fmt::Debug for MetricSpace<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MetricSpace")
            .field("n", &self.n)
            .field("diameter", &self.diameter)
            .finish_non_exhaustive()
    }
}

/// Checks a square matrix against the metric axioms.
pub fn validate_metric<T: Scalar>(matrix: &[Vec<T>]) -> Result<MetricSpace<T>, MetricError> {
    MetricSpace::from_matrix(matrix)
}

pub fn metric_from_points<T: Scalar>(points: &[Vec<T>]) -> Result<MetricSpace<T>, MetricError> {
    MetricSpace::from_points(points)
}

pub fn metric_from_graph<T: Scalar>(edges: &[(usize, usize, T)]) -> Result<MetricSpace<T>, MetricError> {
    MetricSpace::from_graph(edges)
}
