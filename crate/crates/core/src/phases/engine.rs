//! Restart engine: runs an online stepper phase by phase, discarding the
//! whole history whenever the accumulated phase cost reaches the threshold.

use std::collections::BTreeSet;
use std::time::Instant;

use crate::error::{Error, Result};
use crate::kserver::{wfa_choose, ConfigWorkFunction, Configuration, InterestBound, KServerInstance};
use crate::mts::{wfa_choose as mts_choose, MtsInstance, StateWorkFunction};
use crate::scalar::Scalar;
use crate::trace::{RunTrace, StepRecord};

use super::params::{kserver_threshold, mts_threshold, PhaseParams};

/// Outcome of serving one stored request.
#[derive(Debug, Clone, PartialEq)]
pub struct Served<T, S> {
    pub next: S,
    pub cost: T,
    pub moved_from: Option<usize>,
}

/// An online algorithm that can forget its history and restart from a
/// given state.
pub trait PhaseStepper<T: Scalar> {
    type State: Clone + PartialEq;

    fn request_count(&self) -> usize;

    /// Starts a phase with empty history in `start`.
    fn restart(&mut self, start: &Self::State);

    /// Serves request `index` from `current`; `None` when the request is
    /// already covered and is not stored.
    fn serve(&mut self, current: &Self::State, index: usize) -> Option<Served<T, Self::State>>;

    /// Restart threshold for the current phase.
    fn threshold(&self, params: &PhaseParams<T>) -> T;

    /// Value reported in the D column.
    fn interest_bound(&self) -> T;
}

/// Debug hooks for the engine.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunOptions {
    /// Steps after which a phase is closed regardless of the threshold.
    /// Only used to exercise the auditor's negative path.
    pub force_restart_at: BTreeSet<usize>,
}

/// Drives `stepper` over all requests, restarting whenever the phase cost
/// reaches the threshold in force after the step.
pub fn run_phased<T: Scalar, S: PhaseStepper<T>>(
    stepper: &mut S,
    initial: &S::State,
    params: &PhaseParams<T>,
    options: &RunOptions,
) -> Result<RunTrace<T, S::State>> {
    params.validate()?;
    let n = stepper.request_count();
    stepper.restart(initial);
    let mut current = initial.clone();
    let mut phase = 0;
    let mut phase_cost = T::zero();
    let mut total = T::zero();
    let mut rows = Vec::with_capacity(n);
    for step in 0..n {
        let started = Instant::now();
        let served = stepper.serve(&current, step);
        let covered = served.is_none();
        let (cost, moved_from) = match served {
            Some(s) => {
                current = s.next;
                (s.cost, s.moved_from)
            }
            None => (T::zero(), None),
        };
        phase_cost = phase_cost + cost;
        total = total + cost;
        let threshold = stepper.threshold(params);
        let bound = stepper.interest_bound();
        let restarted = (!covered && phase_cost >= threshold) || options.force_restart_at.contains(&step);
        if restarted {
            stepper.restart(&current);
        }
        let elapsed_ns = started.elapsed().as_nanos() as u64;
        rows.push(StepRecord {
            step,
            phase,
            state: current.clone(),
            step_cost: cost,
            cumulative_cost: total,
            covered,
            interest_bound: Some(bound),
            threshold: Some(threshold),
            restarted,
            elapsed_ns,
            moved_from,
        });
        if restarted {
            phase += 1;
            phase_cost = T::zero();
        }
    }
    Ok(RunTrace { rows })
}

/// WFA over an MTS instance as a restartable stepper.
pub struct MtsStepper<'a, T> {
    instance: &'a MtsInstance<T>,
    finite: Vec<Vec<T>>,
    wf: StateWorkFunction<T>,
}

impl<'a, T: Scalar> MtsStepper<'a, T> {
    pub fn new(instance: &'a MtsInstance<T>) -> Self {
        Self {
            instance,
            finite: instance.finite_requests(),
            wf: StateWorkFunction::new(instance.space(), instance.initial()),
        }
    }
}

impl<T: Scalar> PhaseStepper<T> for MtsStepper<'_, T> {
    type State = usize;

    fn request_count(&self) -> usize {
        self.finite.len()
    }

    fn restart(&mut self, start: &usize) {
        self.wf = StateWorkFunction::new(self.instance.space(), *start);
    }

    fn serve(&mut self, current: &usize, index: usize) -> Option<Served<T, usize>> {
        let space = self.instance.space();
        self.wf = self.wf.absorb(&self.finite[index], space).expect("validated instance");
        let next = mts_choose(&self.wf, *current, space);
        let cost = space.dist(*current, next) + self.instance.requests()[index][next];
        Some(Served { next, cost, moved_from: None })
    }

    fn threshold(&self, params: &PhaseParams<T>) -> T {
        mts_threshold(params, self.instance.space().diameter()).expect("validated params")
    }

    fn interest_bound(&self) -> T {
        self.instance.space().diameter()
    }
}

/// WFA over a k-server instance; the work function lives on the phase's
/// set of interest and covered requests are skipped.
pub struct KServerStepper<'a, T> {
    instance: &'a KServerInstance<T>,
    wf: ConfigWorkFunction<T>,
    bound: InterestBound<T>,
}

impl<'a, T: Scalar> KServerStepper<'a, T> {
    pub fn new(instance: &'a KServerInstance<T>) -> Self {
        let start = instance.initial();
        let mut s = Self {
            instance,
            wf: ConfigWorkFunction::new(instance.space(), start),
            bound: InterestBound::new(start.first().expect("k >= 1")),
        };
        s.restart(start);
        s
    }

    /// Work function of the current phase.
    pub fn work_function(&self) -> &ConfigWorkFunction<T> {
        &self.wf
    }
}

impl<T: Scalar> PhaseStepper<T> for KServerStepper<'_, T> {
    type State = Configuration;

    fn request_count(&self) -> usize {
        self.instance.requests().len()
    }

    fn restart(&mut self, start: &Configuration) {
        let space = self.instance.space();
        self.wf = ConfigWorkFunction::new(space, start);
        self.bound = InterestBound::new(start.first().expect("k >= 1"));
        for p in start.distinct() {
            self.bound.insert(p, space);
        }
    }

    fn serve(&mut self, current: &Configuration, index: usize) -> Option<Served<T, Configuration>> {
        let r = self.instance.requests()[index];
        if current.contains(r) {
            return None;
        }
        let space = self.instance.space();
        self.wf.absorb(r, space);
        self.bound.insert(r, space);
        let (next, cost, moved_from) = wfa_choose(&self.wf, current, r, space);
        Some(Served { next, cost, moved_from })
    }

    fn threshold(&self, params: &PhaseParams<T>) -> T {
        kserver_threshold(params, self.bound.bound()).expect("validated params")
    }

    fn interest_bound(&self) -> T {
        self.bound.bound()
    }
}

/// Bounded-history WFA on an MTS instance.
pub fn run_phased_mts<T: Scalar>(
    instance: &MtsInstance<T>,
    params: &PhaseParams<T>,
    options: &RunOptions,
) -> Result<RunTrace<T, usize>> {
    if params.k.is_some() {
        return Err(Error::Params("k is set but the instance is an MTS".into()));
    }
    let mut stepper = MtsStepper::new(instance);
    run_phased(&mut stepper, &instance.initial(), params, options)
}

/// Bounded-history WFA on a k-server instance.
pub fn run_phased_kserver<T: Scalar>(
    instance: &KServerInstance<T>,
    params: &PhaseParams<T>,
    options: &RunOptions,
) -> Result<RunTrace<T, Configuration>> {
    match params.k {
        Some(k) if k == instance.k() => {}
        Some(k) => return Err(Error::Params(format!("k = {k} but the instance has {} servers", instance.k()))),
        None => return Err(Error::Params("k-server mode needs k".into())),
    }
    let mut stepper = KServerStepper::new(instance);
    run_phased(&mut stepper, instance.initial(), params, options)
}
