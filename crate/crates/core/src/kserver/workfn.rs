//! Work function over configurations drawn from the set of interest.

use std::time::Instant;

use crate::error::{Error, Result};
use crate::metric::MetricSpace;
use crate::scalar::{le_tol, Scalar};
use crate::trace::{RunTrace, StepRecord};

use super::matching::matching_distance;
use super::rank::{multiset_count, next_multiset, MultisetRanker};
use super::{Configuration, InterestBound, KServerInstance};

const NO_POSITION: usize = usize::MAX;

/// ω over every k-multiset of the set of interest, stored densely in colex
/// order of interest positions.
#[derive(Debug, Clone)]
pub struct ConfigWorkFunction<T> {
    ranker: MultisetRanker,
    /// Interest position -> point index, in insertion order.
    interest: Vec<usize>,
    /// Point index -> interest position.
    position: Vec<usize>,
    table: Vec<T>,
    scratch: Vec<T>,
    step: usize,
}

impl<T: Scalar> ConfigWorkFunction<T> {
    /// Fresh work function for a phase starting in `start`:
    /// ω(A) = d(start, A) over multisets of the start's own points.
    pub fn new(space: &MetricSpace<T>, start: &Configuration) -> Self {
        let k = start.k();
        let interest: Vec<usize> = start.distinct().collect();
        let mut position = vec![NO_POSITION; space.len()];
        for (i, &p) in interest.iter().enumerate() {
            position[p] = i;
        }
        let mut ranker = MultisetRanker::new(k);
        ranker.ensure(interest.len() + 1);
        let m = interest.len();
        let mut table = Vec::with_capacity(multiset_count(m, k) as usize);
        let mut c = vec![0usize; k];
        let mut points = vec![0usize; k];
        loop {
            for (dst, &pos) in points.iter_mut().zip(&c) {
                *dst = interest[pos];
            }
            points.sort_unstable();
            table.push(matching_distance(start.positions(), &points, space));
            if !next_multiset(&mut c, m) {
                break;
            }
        }
        Self { ranker, interest, position, table, scratch: Vec::new(), step: 0 }
    }

    pub fn k(&self) -> usize {
        self.ranker.k()
    }

    /// Requests absorbed in this phase.
    pub fn step(&self) -> usize {
        self.step
    }

    /// Points of the set of interest, in insertion order.
    pub fn interest(&self) -> &[usize] {
        &self.interest
    }

    pub fn contains_point(&self, point: usize) -> bool {
        self.position.get(point).is_some_and(|&p| p != NO_POSITION)
    }

    /// Number of stored configurations.
    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    fn rank_of(&self, config: &Configuration) -> Option<usize> {
        let mut c: smallvec::SmallVec<[usize; 8]> = smallvec::SmallVec::with_capacity(config.k());
        for &p in config.positions() {
            let pos = *self.position.get(p)?;
            if pos == NO_POSITION {
                return None;
            }
            c.push(pos);
        }
        c.sort_unstable();
        Some(self.ranker.rank(&c))
    }

    /// ω(config), or `None` when config leaves the set of interest.
    pub fn value(&self, config: &Configuration) -> Option<T> {
        if config.k() != self.k() {
            return None;
        }
        self.rank_of(config).map(|r| self.table[r])
    }

    pub fn min_value(&self) -> T {
        self.table.iter().copied().fold(T::infinity(), T::min)
    }

    /// All (configuration, ω) pairs in storage order.
    pub fn entries(&self) -> Vec<(Configuration, T)> {
        let k = self.k();
        let m = self.interest.len();
        let mut out = Vec::with_capacity(self.table.len());
        let mut c = vec![0usize; k];
        let mut rank = 0;
        loop {
            out.push((Configuration::new(c.iter().map(|&pos| self.interest[pos])), self.table[rank]));
            rank += 1;
            if !next_multiset(&mut c, m) {
                break;
            }
        }
        out
    }

    /// Configurations attaining the minimum (exact comparison).
    pub fn minimizers(&self) -> Vec<Configuration> {
        let min = self.min_value();
        self.entries().into_iter().filter(|(_, v)| *v == min).map(|(c, _)| c).collect()
    }

    /// Adds `point` to the set of interest, filling the new configurations by
    /// ω(A) = min over old y of ω(A − point + y) + d(y, point), in colex order
    /// so every right-hand side is already known.
    fn extend(&mut self, point: usize, space: &MetricSpace<T>) {
        if self.contains_point(point) {
            return;
        }
        let k = self.k();
        let m = self.interest.len();
        self.interest.push(point);
        self.position[point] = m;
        self.ranker.ensure(m + 1);
        let to_new: Vec<T> = self.interest[..m].iter().map(|&y| space.dist(y, point)).collect();
        let new_total = multiset_count(m + 1, k) as usize;
        self.table.reserve(new_total - self.table.len());
        // New multisets are exactly those whose largest element is m; their
        // colex order follows the order of the remaining k-1 elements.
        let mut c = vec![0usize; k];
        c[k - 1] = m;
        loop {
            // Replace the last copy of m; earlier slots hold smaller values.
            let mut best = T::infinity();
            for (y, &dy) in to_new.iter().enumerate() {
                let v = self.table[self.ranker.rank_replacing(&c, k - 1, y)] + dy;
                if v < best {
                    best = v;
                }
            }
            debug_assert_eq!(self.ranker.rank(&c), self.table.len());
            self.table.push(best);
            if k == 1 || !next_multiset(&mut c[..k - 1], m + 1) {
                break;
            }
        }
        debug_assert_eq!(self.table.len(), new_total);
    }

    /// Absorbs request `r`: ω′(A) = min_{x∈A} [ω(A − x + r) + d(x, r)].
    pub fn absorb(&mut self, r: usize, space: &MetricSpace<T>) {
        self.extend(r, space);
        let k = self.k();
        let m = self.interest.len();
        let p = self.position[r];
        let to_r: Vec<T> = self.interest.iter().map(|&x| space.dist(x, r)).collect();
        self.scratch.clear();
        self.scratch.reserve(self.table.len());
        let mut c = vec![0usize; k];
        loop {
            let mut best = T::infinity();
            for i in 0..k {
                if i > 0 && c[i] == c[i - 1] {
                    continue;
                }
                let v = self.table[self.ranker.rank_replacing(&c, i, p)] + to_r[c[i]];
                if v < best {
                    best = v;
                }
            }
            self.scratch.push(best);
            if !next_multiset(&mut c, m) {
                break;
            }
        }
        std::mem::swap(&mut self.table, &mut self.scratch);
        self.step += 1;
    }

    /// Value-returning form of [`ConfigWorkFunction::absorb`].
    pub fn absorbed(&self, r: usize, space: &MetricSpace<T>) -> Self {
        let mut next = self.clone();
        next.absorb(r, space);
        next
    }

    /// 1-Lipschitz check under the configuration distance, over all pairs.
    pub fn is_lipschitz(&self, space: &MetricSpace<T>) -> bool {
        let entries = self.entries();
        entries.iter().all(|(a, va)| {
            entries.iter().all(|(b, vb)| le_tol((*va - *vb).abs(), matching_distance(a.positions(), b.positions(), space)))
        })
    }
}

/// WFA decision for request `r` given the already absorbed work function:
/// the single-server move x -> r minimizing ω′(current − x + r) + d(x, r),
/// ties by smaller move, then lower x. Returns (next, moved distance, x).
pub(crate) fn wfa_choose<T: Scalar>(
    wf: &ConfigWorkFunction<T>,
    current: &Configuration,
    r: usize,
    space: &MetricSpace<T>,
) -> (Configuration, T, Option<usize>) {
    if current.contains(r) {
        return (current.clone(), T::zero(), None);
    }
    let mut best: Option<(T, T, usize, Configuration)> = None;
    for x in current.distinct() {
        let next = current.replace(x, r).expect("x is in current");
        let moved = space.dist(x, r);
        let v = wf.value(&next).expect("current lies in the set of interest") + moved;
        let better = match &best {
            None => true,
            Some((bv, bm, bx, _)) => v < *bv || (v == *bv && (moved < *bm || (moved == *bm && x < *bx))),
        };
        if better {
            best = Some((v, moved, x, next));
        }
    }
    let (_, moved, x, next) = best.expect("k >= 1");
    (next, moved, Some(x))
}

/// Phase-start work function for `instance`, starting in `start`.
pub fn wf_init<T: Scalar>(instance: &KServerInstance<T>, start: &Configuration) -> Result<ConfigWorkFunction<T>> {
    if start.k() != instance.k() {
        return Err(Error::LengthMismatch { expected: instance.k(), got: start.k() });
    }
    if let Some(&p) = start.positions().iter().find(|&&p| p >= instance.space().len()) {
        return Err(Error::OutOfRange { index: p, size: instance.space().len() });
    }
    Ok(ConfigWorkFunction::new(instance.space(), start))
}

/// Free-function form of [`ConfigWorkFunction::absorbed`].
pub fn wf_absorb<T: Scalar>(wf: &ConfigWorkFunction<T>, r: usize, space: &MetricSpace<T>) -> ConfigWorkFunction<T> {
    wf.absorbed(r, space)
}

/// One WFA step: absorb `r`, then serve it with a single server move.
pub fn wfa_kserver_step<T: Scalar>(
    wf: &ConfigWorkFunction<T>,
    current: &Configuration,
    r: usize,
    space: &MetricSpace<T>,
) -> Result<(Configuration, ConfigWorkFunction<T>, T)> {
    if current.k() != wf.k() {
        return Err(Error::LengthMismatch { expected: wf.k(), got: current.k() });
    }
    if r >= space.len() {
        return Err(Error::OutOfRange { index: r, size: space.len() });
    }
    if let Some(&p) = current.positions().iter().find(|&&p| !wf.contains_point(p)) {
        return Err(Error::Instance(format!("server at {p} is outside the set of interest")));
    }
    let next_wf = wf.absorbed(r, space);
    let (next, moved, _) = wfa_choose(&next_wf, current, r, space);
    Ok((next, next_wf, moved))
}

/// Full-history WFA over the whole request sequence.
///
/// Requests already covered by a server are recorded with zero cost and not
/// absorbed, matching the bounded runner so both make identical decisions
/// until the first restart.
pub fn wfa_run_kserver<T: Scalar>(instance: &KServerInstance<T>) -> RunTrace<T, Configuration> {
    let space = instance.space();
    let mut current = instance.initial().clone();
    let mut wf = ConfigWorkFunction::new(space, &current);
    let mut bound = InterestBound::new(current.first().expect("k >= 1"));
    for p in current.distinct() {
        bound.insert(p, space);
    }
    let mut total = T::zero();
    let mut rows = Vec::with_capacity(instance.requests().len());
    for (step, &r) in instance.requests().iter().enumerate() {
        let started = Instant::now();
        let covered = current.contains(r);
        let (moved, from) = if covered {
            (T::zero(), None)
        } else {
            wf.absorb(r, space);
            bound.insert(r, space);
            let (next, moved, from) = wfa_choose(&wf, &current, r, space);
            current = next;
            (moved, from)
        };
        let elapsed_ns = started.elapsed().as_nanos() as u64;
        total = total + moved;
        rows.push(StepRecord {
            step,
            phase: 0,
            state: current.clone(),
            step_cost: moved,
            cumulative_cost: total,
            covered,
            interest_bound: Some(bound.bound()),
            threshold: None,
            restarted: false,
            elapsed_ns,
            moved_from: from,
        });
    }
    RunTrace { rows }
}
