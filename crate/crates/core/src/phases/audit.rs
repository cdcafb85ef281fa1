//! Post-hoc audit of a phased run against offline optima.
//!
//! Each phase is treated as the first phase of the remaining suffix: the
//! suffix optimum from the phase's start state gives x (its state at the
//! phase's last request), W₁ and W₂; the phase-local optimum gives Y and y;
//! the optimum of the later phases from the phase's end state gives W′.

use std::fmt::Debug;
use std::ops::Range;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::kserver::{kserver_schedule_cost, matching_distance, opt_kserver_from, Configuration, KServerInstance};
use crate::mts::{opt_from, schedule_cost_from, MtsInstance};
use crate::scalar::{le_tol, Scalar};
use crate::trace::RunTrace;

use super::params::PhaseParams;

/// Offline oracle over contiguous request ranges of one instance.
pub trait PhaseOracle<T: Scalar>: Sync {
    type State: Clone + PartialEq + Debug + Send + Sync;

    fn request_count(&self) -> usize;

    fn initial_state(&self) -> Self::State;

    /// Optimal cost of serving `range` from `start` and the state after each
    /// request.
    fn optimum(&self, start: &Self::State, range: Range<usize>) -> Result<(T, Vec<Self::State>)>;

    fn schedule_cost(&self, start: &Self::State, range: Range<usize>, schedule: &[Self::State]) -> T;

    fn distance(&self, a: &Self::State, b: &Self::State) -> T;
}

impl<T: Scalar> PhaseOracle<T> for MtsInstance<T> {
    type State = usize;

    fn request_count(&self) -> usize {
        self.requests().len()
    }

    fn initial_state(&self) -> usize {
        self.initial()
    }

    fn optimum(&self, start: &usize, range: Range<usize>) -> Result<(T, Vec<usize>)> {
        let finite = self.finite_requests();
        let (_, schedule) = opt_from(self.space(), *start, &finite[range.clone()]);
        let cost = schedule_cost_from(self.space(), *start, &self.requests()[range], &schedule)?;
        Ok((cost, schedule))
    }

    fn schedule_cost(&self, start: &usize, range: Range<usize>, schedule: &[usize]) -> T {
        schedule_cost_from(self.space(), *start, &self.requests()[range], schedule).expect("schedule fits range")
    }

    fn distance(&self, a: &usize, b: &usize) -> T {
        self.space().dist(*a, *b)
    }
}

impl<T: Scalar> PhaseOracle<T> for KServerInstance<T> {
    type State = Configuration;

    fn request_count(&self) -> usize {
        self.requests().len()
    }

    fn initial_state(&self) -> Configuration {
        self.initial().clone()
    }

    fn optimum(&self, start: &Configuration, range: Range<usize>) -> Result<(T, Vec<Configuration>)> {
        opt_kserver_from(self.space(), start, &self.requests()[range])
    }

    fn schedule_cost(&self, start: &Configuration, _range: Range<usize>, schedule: &[Configuration]) -> T {
        kserver_schedule_cost(self.space(), start, schedule)
    }

    fn distance(&self, a: &Configuration, b: &Configuration) -> T {
        matching_distance(a.positions(), b.positions(), self.space())
    }
}

/// Audit record for one phase.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseRecord<T, S> {
    pub phase: usize,
    pub first_step: usize,
    /// j_i: last step of the phase.
    pub last_step: usize,
    /// z_{i−1}
    pub start: S,
    /// z_i
    pub online_end: S,
    /// C_i
    pub online_cost: T,
    /// Y_i
    pub phase_opt: T,
    /// y_i
    pub phase_opt_end: S,
    /// x_i: state of the suffix optimum at j_i.
    pub suffix_opt_state: S,
    /// Optimum of the suffix starting at this phase (W for the first phase).
    pub suffix_opt: T,
    /// W₁: suffix-optimum cost up to j_i.
    pub suffix_opt_head: T,
    /// W₂ = suffix_opt − W₁.
    pub suffix_opt_tail: T,
    /// W′: optimum of the later phases from z_i.
    pub rest_opt: T,
    /// α(α+ε)(d(x,y) + d(z,x))/ε
    pub required_cost: T,
    /// False for the final phase, where no condition is needed.
    pub condition_required: bool,
    pub condition_holds: bool,
    /// Y ≤ W₁ + d(x,y)
    pub phase_opt_minimal: bool,
    /// W′ ≤ W₂ + d(z,x)
    pub rest_opt_minimal: bool,
    /// C_i ≤ α·Y_i
    pub within_alpha: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseAudit<T, S> {
    pub alpha: T,
    pub epsilon: T,
    pub phases: Vec<PhaseRecord<T, S>>,
    /// C: total online cost.
    pub total_cost: T,
    /// W: whole-sequence optimum.
    pub opt_cost: T,
    /// C ≤ (α+ε)·W
    pub competitive: bool,
}

impl<T: Scalar, S> PhaseAudit<T, S> {
    /// Every phase that needed the restart condition satisfied it.
    pub fn verdict(&self) -> bool {
        self.phases.iter().all(|p| !p.condition_required || p.condition_holds)
    }

    /// The minimality inequalities hold on every phase.
    pub fn minimality_holds(&self) -> bool {
        self.phases.iter().all(|p| p.phase_opt_minimal && p.rest_opt_minimal)
    }
}

/// Recomputes the offline quantities for every phase of `trace`.
pub fn audit_condition1<T: Scalar, O: PhaseOracle<T>>(
    trace: &RunTrace<T, O::State>,
    oracle: &O,
    params: &PhaseParams<T>,
) -> Result<PhaseAudit<T, O::State>> {
    params.validate()?;
    let n = oracle.request_count();
    if trace.len() != n {
        return Err(Error::Trace(format!("trace has {} rows, instance has {n} requests", trace.len())));
    }
    trace.check_invariants().map_err(Error::Trace)?;
    let spans = trace.phases();
    let ends = trace.phase_end_states();
    let mut starts = Vec::with_capacity(spans.len());
    starts.push(oracle.initial_state());
    starts.extend(ends.iter().take(spans.len().saturating_sub(1)).cloned());
    let scale = params.alpha * (params.alpha + params.epsilon) / params.epsilon;
    let last = spans.len().saturating_sub(1);

    let phases = spans
        .par_iter()
        .enumerate()
        .map(|(i, span)| {
            let z_prev = &starts[i];
            let z = &ends[i];
            let phase_range = span.first_step..span.last_step + 1;
            let (y_cost, y_sched) = oracle.optimum(z_prev, phase_range.clone())?;
            let (w, w_sched) = oracle.optimum(z_prev, span.first_step..n)?;
            let head = &w_sched[..span.len()];
            let w1 = oracle.schedule_cost(z_prev, phase_range, head);
            let w2 = w - w1;
            let rest = if span.last_step + 1 < n { oracle.optimum(z, span.last_step + 1..n)?.0 } else { T::zero() };
            let x = head.last().expect("phases are nonempty").clone();
            let y = y_sched.last().expect("phases are nonempty").clone();
            let dxy = oracle.distance(&x, &y);
            let dzx = oracle.distance(z, &x);
            let required = scale * (dxy + dzx);
            Ok(PhaseRecord {
                phase: span.phase,
                first_step: span.first_step,
                last_step: span.last_step,
                start: z_prev.clone(),
                online_end: z.clone(),
                online_cost: span.cost,
                phase_opt: y_cost,
                phase_opt_end: y,
                suffix_opt_state: x,
                suffix_opt: w,
                suffix_opt_head: w1,
                suffix_opt_tail: w2,
                rest_opt: rest,
                required_cost: required,
                condition_required: i < last,
                condition_holds: le_tol(required, span.cost),
                phase_opt_minimal: le_tol(y_cost, w1 + dxy),
                rest_opt_minimal: le_tol(rest, w2 + dzx),
                within_alpha: le_tol(span.cost, params.alpha * y_cost),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let total_cost = trace.total_cost();
    let opt_cost = match phases.first() {
        Some(p) => p.suffix_opt,
        None => T::zero(),
    };
    Ok(PhaseAudit {
        alpha: params.alpha,
        epsilon: params.epsilon,
        phases,
        total_cost,
        opt_cost,
        competitive: le_tol(total_cost, (params.alpha + params.epsilon) * opt_cost),
    })
}
