//! Runners that turn an instance and an algorithm id into a trace and a
//! summary.

use std::collections::BTreeSet;
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use boundedwfa_core::kserver::{opt_offline_kserver, wfa_run_kserver, OPT_CAPACITY};
use boundedwfa_core::mts::{opt_offline_mts, wfa_run_mts};
use boundedwfa_core::phases::{run_phased_kserver, run_phased_mts};
use boundedwfa_core::{Configuration, KServerInstance, MtsInstance, PhaseParams, RunOptions, RunTrace, StepRecord};

use crate::error::{HarnessError, Result};
use crate::instance::Instance;
use crate::trace_csv::{fmt_float, write_trace, TraceMeta};

/// Estimated inner-loop iterations above which the exact oracle is refused.
pub const OPT_WORK_LIMIT: f64 = 5e8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    WfaFull,
    WfaBounded,
    Opt,
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::WfaFull => "wfa-full",
            Self::WfaBounded => "wfa-bounded",
            Self::Opt => "opt",
        })
    }
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "wfa-full" => Ok(Self::WfaFull),
            "wfa-bounded" => Ok(Self::WfaBounded),
            "opt" => Ok(Self::Opt),
            other => Err(format!("unknown algorithm {other:?} (expected wfa-full, wfa-bounded or opt)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentParams {
    pub epsilon: f64,
    /// Defaults to 2|S| − 1 (MTS) or 2k − 1 (k-server).
    pub alpha: Option<f64>,
    /// Lower bound on the cost of a stored request; only reported.
    pub delta: Option<f64>,
    /// Seed of the generator that produced the instance, if known.
    pub seed: Option<u64>,
    pub force_restart_at: BTreeSet<usize>,
    /// Compute the offline optimum for the ratio column when tractable.
    pub compute_opt: bool,
}

impl Default for ExperimentParams {
    fn default() -> Self {
        Self { epsilon: 1.0, alpha: None, delta: None, seed: None, force_restart_at: BTreeSet::new(), compute_opt: true }
    }
}

impl ExperimentParams {
    pub fn phase_params(&self, instance: &Instance) -> PhaseParams<f64> {
        let mut p = match instance {
            Instance::Mts(i) => PhaseParams::for_mts(i.state_count(), self.epsilon),
            Instance::KServer(i) => PhaseParams::for_kserver(i.k(), self.epsilon),
        };
        if let Some(alpha) = self.alpha {
            p = p.with_alpha(alpha);
        }
        if let Some(delta) = self.delta {
            p = p.with_delta(delta);
        }
        p
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Trace {
    Mts(RunTrace<f64, usize>),
    KServer(RunTrace<f64, Configuration>),
}

impl Trace {
    pub fn total_cost(&self) -> f64 {
        match self {
            Self::Mts(t) => t.total_cost(),
            Self::KServer(t) => t.total_cost(),
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Self::Mts(t) => t.len(),
            Self::KServer(t) => t.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Aggregates reported for one run.
#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub instance: String,
    pub algorithm: String,
    pub requests: usize,
    pub total_cost: f64,
    pub opt_cost: Option<f64>,
    /// total_cost / opt_cost; 1 when both are zero.
    pub ratio: Option<f64>,
    pub phases: usize,
    /// Most stored (non-covered) requests in one phase.
    pub max_history: usize,
    pub p50_ns: Option<u64>,
    pub p99_ns: Option<u64>,
    /// p99 of each contiguous quarter of the run.
    pub quarter_p99_ns: [Option<u64>; 4],
}

/// Nearest-rank percentile of `samples` (sorted in place).
pub fn percentile(samples: &mut [u64], p: f64) -> Option<u64> {
    if samples.is_empty() {
        return None;
    }
    samples.sort_unstable();
    let rank = ((p / 100.0) * samples.len() as f64).ceil() as usize;
    Some(samples[rank.clamp(1, samples.len()) - 1])
}

/// p99 of the elapsed times in each quarter `[i·n/4, (i+1)·n/4)`.
pub fn quarter_p99<T, S>(rows: &[StepRecord<T, S>]) -> [Option<u64>; 4] {
    let n = rows.len();
    std::array::from_fn(|q| {
        let mut times: Vec<u64> = rows[q * n / 4..(q + 1) * n / 4].iter().map(|r| r.elapsed_ns).collect();
        percentile(&mut times, 99.0)
    })
}

pub fn ratio(total: f64, opt: f64) -> f64 {
    if opt == 0.0 {
        if total == 0.0 {
            1.0
        } else {
            f64::INFINITY
        }
    } else {
        total / opt
    }
}

impl Summary {
    pub fn from_trace<S: Clone + PartialEq>(meta: &TraceMeta, trace: &RunTrace<f64, S>, opt_cost: Option<f64>) -> Self {
        let mut times: Vec<u64> = trace.rows.iter().map(|r| r.elapsed_ns).collect();
        let total_cost = trace.total_cost();
        Self {
            instance: meta.instance.clone(),
            algorithm: meta.algorithm.clone(),
            requests: trace.len(),
            total_cost,
            opt_cost,
            ratio: opt_cost.map(|w| ratio(total_cost, w)),
            phases: trace.phase_count(),
            max_history: trace.max_history_len(),
            p50_ns: percentile(&mut times, 50.0),
            p99_ns: percentile(&mut times, 99.0),
            quarter_p99_ns: quarter_p99(&trace.rows),
        }
    }

    /// `key=value` lines for terminal output.
    pub fn render(&self) -> String {
        let opt = |x: Option<u64>| x.map_or_else(|| "-".to_string(), |v| v.to_string());
        let quarters: Vec<String> = self.quarter_p99_ns.iter().map(|&q| opt(q)).collect();
        format!(
            "instance={}\nalgorithm={}\nrequests={}\ntotal_cost={}\nopt_cost={}\nratio={}\nphases={}\nmax_history={}\np50_ns={}\np99_ns={}\nquarter_p99_ns={}\n",
            self.instance,
            self.algorithm,
            self.requests,
            fmt_float(self.total_cost),
            self.opt_cost.map_or_else(|| "-".into(), fmt_float),
            self.ratio.map_or_else(|| "-".into(), fmt_float),
            self.phases,
            self.max_history,
            opt(self.p50_ns),
            opt(self.p99_ns),
            quarters.join(","),
        )
    }
}

#[derive(Debug, Clone)]
pub struct Experiment {
    pub meta: TraceMeta,
    pub trace: Trace,
    pub summary: Summary,
}

/// Rough iteration count of the exact oracle.
pub fn opt_work(instance: &Instance) -> f64 {
    match instance {
        Instance::Mts(i) => {
            let s = i.state_count() as f64;
            i.requests().len() as f64 * s * s
        }
        Instance::KServer(i) => {
            let mut universe: Vec<usize> = i.initial().positions().iter().chain(i.requests()).copied().collect();
            universe.sort_unstable();
            universe.dedup();
            // Layers hold the k-multisets over the points seen so far that contain the request.
            let layer = binomial(universe.len() + i.k() - 2, i.k() - 1);
            i.requests().len() as f64 * layer * layer
        }
    }
}

fn binomial(n: usize, r: usize) -> f64 {
    (0..r).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

pub fn opt_tractable(instance: &Instance) -> bool {
    let capacity_ok = match instance {
        Instance::Mts(_) => true,
        Instance::KServer(i) => {
            let mut universe: Vec<usize> = i.initial().positions().iter().chain(i.requests()).copied().collect();
            universe.sort_unstable();
            universe.dedup();
            binomial(universe.len() + i.k() - 1, i.k()) <= OPT_CAPACITY as f64
        }
    };
    capacity_ok && opt_work(instance) <= OPT_WORK_LIMIT
}

/// Optimal cost, or an error when the oracle cannot run on `instance`.
pub fn opt_cost(instance: &Instance) -> Result<f64> {
    if !opt_tractable(instance) {
        return Err(HarnessError::Intractable("offline optimum"));
    }
    Ok(match instance {
        Instance::Mts(i) => opt_offline_mts(i).0,
        Instance::KServer(i) => opt_offline_kserver(i)?.0,
    })
}

fn mts_opt_trace(instance: &MtsInstance<f64>) -> RunTrace<f64, usize> {
    let (_, schedule) = opt_offline_mts(instance);
    let space = instance.space();
    let mut current = instance.initial();
    let mut total = 0.0;
    let rows = schedule
        .iter()
        .zip(instance.requests())
        .enumerate()
        .map(|(step, (&s, costs))| {
            let step_cost = space.dist(current, s) + costs[s];
            total += step_cost;
            current = s;
            StepRecord {
                step,
                phase: 0,
                state: s,
                step_cost,
                cumulative_cost: total,
                covered: false,
                interest_bound: None,
                threshold: None,
                restarted: false,
                elapsed_ns: 0,
                moved_from: None,
            }
        })
        .collect();
    RunTrace { rows }
}

fn kserver_opt_trace(instance: &KServerInstance<f64>) -> Result<RunTrace<f64, Configuration>> {
    let (_, schedule) = opt_offline_kserver(instance)?;
    let space = instance.space();
    let mut current = instance.initial().clone();
    let mut total = 0.0;
    let mut rows = Vec::with_capacity(schedule.len());
    for (step, (next, &r)) in schedule.into_iter().zip(instance.requests()).enumerate() {
        let covered = current.contains(r);
        let step_cost = boundedwfa_core::kserver::config_distance(&current, &next, space)?;
        total += step_cost;
        let moved_from = single_departure(&current, &next);
        current = next;
        rows.push(StepRecord {
            step,
            phase: 0,
            state: current.clone(),
            step_cost,
            cumulative_cost: total,
            covered,
            interest_bound: None,
            threshold: None,
            restarted: false,
            elapsed_ns: 0,
            moved_from,
        });
    }
    Ok(RunTrace { rows })
}

/// The point a single server left when `from` and `to` differ in one server.
fn single_departure(from: &Configuration, to: &Configuration) -> Option<usize> {
    let mut left: Vec<usize> = from.positions().to_vec();
    for p in to.positions() {
        if let Some(i) = left.iter().position(|q| q == p) {
            left.swap_remove(i);
        }
    }
    match left[..] {
        [p] => Some(p),
        _ => None,
    }
}

/// Runs `algorithm` on `instance`, writing the CSV trace to `sink` if given.
pub fn run_experiment(
    instance: &Instance,
    fingerprint: &str,
    algorithm: Algorithm,
    params: &ExperimentParams,
    sink: Option<&mut dyn Write>,
) -> Result<Experiment> {
    let phase_params = params.phase_params(instance);
    let bounded = algorithm == Algorithm::WfaBounded;
    let meta = TraceMeta {
        instance: fingerprint.to_string(),
        algorithm: algorithm.to_string(),
        alpha: bounded.then_some(phase_params.alpha),
        epsilon: bounded.then_some(phase_params.epsilon),
        delta: params.delta,
        seed: params.seed,
    };
    let options = RunOptions { force_restart_at: params.force_restart_at.clone() };
    let trace = match (instance, algorithm) {
        (_, Algorithm::Opt) if !opt_tractable(instance) => return Err(HarnessError::Intractable("offline optimum")),
        (Instance::Mts(i), Algorithm::WfaFull) => Trace::Mts(wfa_run_mts(i)),
        (Instance::Mts(i), Algorithm::WfaBounded) => Trace::Mts(run_phased_mts(i, &phase_params, &options)?),
        (Instance::Mts(i), Algorithm::Opt) => Trace::Mts(mts_opt_trace(i)),
        (Instance::KServer(i), Algorithm::WfaFull) => Trace::KServer(wfa_run_kserver(i)),
        (Instance::KServer(i), Algorithm::WfaBounded) => Trace::KServer(run_phased_kserver(i, &phase_params, &options)?),
        (Instance::KServer(i), Algorithm::Opt) => Trace::KServer(kserver_opt_trace(i)?),
    };
    let opt = match algorithm {
        Algorithm::Opt => Some(trace.total_cost()),
        _ if params.compute_opt && opt_tractable(instance) => Some(opt_cost(instance)?),
        _ => None,
    };
    let summary = match &trace {
        Trace::Mts(t) => Summary::from_trace(&meta, t, opt),
        Trace::KServer(t) => Summary::from_trace(&meta, t, opt),
    };
    if let Some(out) = sink {
        let requests: Vec<String> = (0..instance.request_count()).map(|s| instance.request_label(s)).collect();
        match &trace {
            Trace::Mts(t) => write_trace(out, &meta, &requests, t)?,
            Trace::KServer(t) => write_trace(out, &meta, &requests, t)?,
        }
    }
    Ok(Experiment { meta, trace, summary })
}
