//! Metrical task systems: cost evaluation, the offline optimum and the
//! Work Function Algorithm over an explicit state set.

use std::time::Instant;

use crate::error::{Error, Result};
use crate::metric::MetricSpace;
use crate::scalar::{le_tol, Scalar};
use crate::trace::{RunTrace, StepRecord};

/// States of the task system are the points of `space`; `requests[i][s]` is
/// the cost of serving request `i + 1` in state `s` (may be `+inf`).
#[derive(Debug, Clone, PartialEq)]
pub struct MtsInstance<T> {
    space: MetricSpace<T>,
    initial: usize,
    requests: Vec<Vec<T>>,
}

impl<T: Scalar> MtsInstance<T> {
    pub fn new(space: MetricSpace<T>, initial: usize, requests: Vec<Vec<T>>) -> Result<Self> {
        let n = space.len();
        if initial >= n {
            return Err(Error::OutOfRange { index: initial, size: n });
        }
        for (i, costs) in requests.iter().enumerate() {
            if costs.len() != n {
                return Err(Error::Instance(format!(
                    "request {i} has {} costs, expected {n}",
                    costs.len()
                )));
            }
            if let Some(s) = costs.iter().position(|c| c.is_nan() || *c < T::zero()) {
                return Err(Error::Instance(format!("request {i}: cost at state {s} is negative")));
            }
        }
        Ok(Self { space, initial, requests })
    }

    pub fn space(&self) -> &MetricSpace<T> {
        &self.space
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn requests(&self) -> &[Vec<T>] {
        &self.requests
    }

    pub fn state_count(&self) -> usize {
        self.space.len()
    }

    /// Finite stand-in for an infinite task cost: larger than the cost of
    /// any schedule that avoids infinite entries.
    pub fn infinite_cost_sentinel(&self) -> T {
        let finite: T = self
            .requests
            .iter()
            .flatten()
            .copied()
            .filter(|c| c.is_finite())
            .sum();
        self.space.diameter() * T::from_usize(self.requests.len()).unwrap_or_else(T::max_value)
            + finite
            + T::one()
    }

    /// Request costs with every infinite entry replaced by the sentinel.
    pub fn finite_requests(&self) -> Vec<Vec<T>> {
        let sentinel = self.infinite_cost_sentinel();
        self.requests
            .iter()
            .map(|r| r.iter().map(|&c| if c.is_finite() { c } else { sentinel }).collect())
            .collect()
    }

    /// Same metric and requests, different start state.
    pub fn with_initial(&self, initial: usize, requests: Vec<Vec<T>>) -> Result<Self> {
        Self::new(self.space.clone(), initial, requests)
    }
}

/// Work function over states for the requests absorbed so far.
#[derive(Debug, Clone, PartialEq)]
pub struct StateWorkFunction<T> {
    pub values: Vec<T>,
    pub step: usize,
}

impl<T: Scalar> StateWorkFunction<T> {
    /// ω₀(s) = d(start, s).
    pub fn new(space: &MetricSpace<T>, start: usize) -> Self {
        Self { values: space.row(start).to_vec(), step: 0 }
    }

    /// ω′(s) = min_t [ω(t) + c(t) + d(t, s)].
    pub fn absorb(&self, costs: &[T], space: &MetricSpace<T>) -> Result<Self> {
        let n = space.len();
        if costs.len() != n {
            return Err(Error::LengthMismatch { expected: n, got: costs.len() });
        }
        let paid: Vec<T> = self.values.iter().zip(costs).map(|(&w, &c)| w + c).collect();
        let values = (0..n)
            .map(|s| {
                let row = space.row(s);
                paid.iter().zip(row).map(|(&p, &d)| p + d).fold(T::infinity(), T::min)
            })
            .collect();
        Ok(Self { values, step: self.step + 1 })
    }

    pub fn min_value(&self) -> T {
        self.values.iter().copied().fold(T::infinity(), T::min)
    }

    /// |ω(s) − ω(t)| ≤ d(s, t) within tolerance.
    pub fn is_lipschitz(&self, space: &MetricSpace<T>) -> bool {
        let n = self.values.len();
        (0..n).all(|s| (0..n).all(|t| le_tol((self.values[s] - self.values[t]).abs(), space.dist(s, t))))
    }
}

/// Σ [d(s_{i−1}, s_i) + c(r_i, s_i)] with s₀ the instance's initial state.
pub fn mts_sequence_cost<T: Scalar>(instance: &MtsInstance<T>, schedule: &[usize]) -> Result<T> {
    schedule_cost_from(instance.space(), instance.initial(), instance.requests(), schedule)
}

pub(crate) fn schedule_cost_from<T: Scalar>(
    space: &MetricSpace<T>,
    start: usize,
    requests: &[Vec<T>],
    schedule: &[usize],
) -> Result<T> {
    if schedule.len() != requests.len() {
        return Err(Error::LengthMismatch { expected: requests.len(), got: schedule.len() });
    }
    let mut prev = start;
    let mut total = T::zero();
    for (costs, &s) in requests.iter().zip(schedule) {
        if s >= space.len() {
            return Err(Error::OutOfRange { index: s, size: space.len() });
        }
        total = total + space.dist(prev, s) + costs[s];
        prev = s;
    }
    Ok(total)
}

/// Exact offline optimum by forward dynamic programming.
///
/// Ties are broken toward the lowest state index, both in the predecessor
/// choice and in the final argmin. Returns `+inf` when every schedule hits an
/// infinite task cost.
pub fn opt_offline_mts<T: Scalar>(instance: &MtsInstance<T>) -> (T, Vec<usize>) {
    let requests = instance.finite_requests();
    let (w, schedule) = opt_from(instance.space(), instance.initial(), &requests);
    if w >= instance.infinite_cost_sentinel() {
        (T::infinity(), schedule)
    } else {
        (w, schedule)
    }
}

/// DP core over finite costs from an arbitrary start state.
pub(crate) fn opt_from<T: Scalar>(space: &MetricSpace<T>, start: usize, requests: &[Vec<T>]) -> (T, Vec<usize>) {
    let n = space.len();
    // Layer 0: only the start state is occupied.
    let mut layer: Vec<T> = (0..n).map(|s| if s == start { T::zero() } else { T::infinity() }).collect();
    let mut back: Vec<Vec<usize>> = Vec::with_capacity(requests.len());
    for costs in requests {
        let mut next = vec![T::zero(); n];
        let mut pred = vec![0usize; n];
        for s in 0..n {
            let mut arg = 0;
            let mut val = T::infinity();
            for (t, &w) in layer.iter().enumerate() {
                let v = w + space.dist(t, s);
                if v < val {
                    val = v;
                    arg = t;
                }
            }
            next[s] = val + costs[s];
            pred[s] = arg;
        }
        layer = next;
        back.push(pred);
    }
    if requests.is_empty() {
        return (T::zero(), Vec::new());
    }
    let mut end = 0;
    for s in 1..n {
        if layer[s] < layer[end] {
            end = s;
        }
    }
    let w = layer[end];
    let mut schedule = vec![0; requests.len()];
    let mut cur = end;
    for i in (0..requests.len()).rev() {
        schedule[i] = cur;
        cur = back[i][cur];
    }
    (w, schedule)
}

/// One WFA step: absorb the request, then move to
/// argmin_s [ω′(s) + d(current, s)], ties by smaller ω′(s), then lower index.
pub fn wfa_mts_step<T: Scalar>(
    wf: &StateWorkFunction<T>,
    current: usize,
    costs: &[T],
    space: &MetricSpace<T>,
) -> Result<(usize, StateWorkFunction<T>, T)> {
    if current >= space.len() {
        return Err(Error::OutOfRange { index: current, size: space.len() });
    }
    let next_wf = wf.absorb(costs, space)?;
    let next = wfa_choose(&next_wf, current, space);
    let step_cost = space.dist(current, next) + costs[next];
    Ok((next, next_wf, step_cost))
}

pub(crate) fn wfa_choose<T: Scalar>(wf: &StateWorkFunction<T>, current: usize, space: &MetricSpace<T>) -> usize {
    let row = space.row(current);
    let mut best = 0;
    for s in 1..wf.values.len() {
        let (v, bv) = (wf.values[s] + row[s], wf.values[best] + row[best]);
        if v < bv || (v == bv && wf.values[s] < wf.values[best]) {
            best = s;
        }
    }
    best
}

/// Full-history WFA from ω₀(s) = d(s₀, s).
pub fn wfa_run_mts<T: Scalar>(instance: &MtsInstance<T>) -> RunTrace<T, usize> {
    let space = instance.space();
    let finite = instance.finite_requests();
    let mut wf = StateWorkFunction::new(space, instance.initial());
    let mut current = instance.initial();
    let mut total = T::zero();
    let mut rows = Vec::with_capacity(finite.len());
    for (step, (costs, raw)) in finite.iter().zip(instance.requests()).enumerate() {
        let started = Instant::now();
        let (next, next_wf, _) = wfa_mts_step(&wf, current, costs, space).expect("instance validated");
        let elapsed_ns = started.elapsed().as_nanos() as u64;
        let step_cost = space.dist(current, next) + raw[next];
        total = total + step_cost;
        wf = next_wf;
        current = next;
        rows.push(StepRecord {
            step,
            phase: 0,
            state: current,
            step_cost,
            cumulative_cost: total,
            covered: false,
            interest_bound: Some(space.diameter()),
            threshold: None,
            restarted: false,
            elapsed_ns,
            moved_from: None,
        });
    }
    RunTrace { rows }
}

/// Δ: the diameter of the state space.
pub fn mts_delta<T: Scalar>(instance: &MtsInstance<T>) -> T {
    instance.space().diameter()
}
