//! Exact offline optimum for k-server by dynamic programming.

use crate::error::{Error, Result};
use crate::metric::MetricSpace;
use crate::scalar::Scalar;

use super::matching::matching_distance;
use super::rank::{multiset_count, next_multiset};
use super::{Configuration, KServerInstance};

/// Largest number of k-multisets over the full interest set the DP accepts.
pub const OPT_CAPACITY: u128 = 1_000_000;

/// Optimal cost and the configuration after each request.
///
/// Layer `t` holds the configurations over the points seen so far (start
/// positions and requests `1..=t`) that contain `r_t`; some optimal schedule
/// is lazy and therefore stays inside these layers. Predecessor ties go to
/// the lowest canonical configuration, as does the final argmin.
pub fn opt_offline_kserver<T: Scalar>(instance: &KServerInstance<T>) -> Result<(T, Vec<Configuration>)> {
    opt_kserver_from(instance.space(), instance.initial(), instance.requests())
}

pub fn opt_kserver_from<T: Scalar>(
    space: &MetricSpace<T>,
    start: &Configuration,
    requests: &[usize],
) -> Result<(T, Vec<Configuration>)> {
    let k = start.k();
    let mut universe: Vec<usize> = start.positions().iter().chain(requests).copied().collect();
    universe.sort_unstable();
    universe.dedup();
    let needed = multiset_count(universe.len(), k);
    if needed > OPT_CAPACITY {
        return Err(Error::Capacity { what: "offline optimum configurations", needed, limit: OPT_CAPACITY });
    }
    if let Some(&r) = requests.iter().find(|&&r| r >= space.len()) {
        return Err(Error::OutOfRange { index: r, size: space.len() });
    }

    let mut seen: Vec<usize> = start.distinct().collect();
    let mut layer: Vec<(Configuration, T)> = vec![(start.clone(), T::zero())];
    let mut back: Vec<Vec<usize>> = Vec::with_capacity(requests.len());
    let mut layers: Vec<Vec<Configuration>> = Vec::with_capacity(requests.len());
    for &r in requests {
        if let Err(at) = seen.binary_search(&r) {
            seen.insert(at, r);
        }
        let mut next = layer_configs(&seen, k, r);
        next.sort_unstable();
        let mut values = Vec::with_capacity(next.len());
        let mut preds = Vec::with_capacity(next.len());
        for a in &next {
            let mut best = T::infinity();
            let mut arg = 0;
            for (i, (b, v)) in layer.iter().enumerate() {
                let cand = *v + matching_distance(b.positions(), a.positions(), space);
                if cand < best {
                    best = cand;
                    arg = i;
                }
            }
            values.push(best);
            preds.push(arg);
        }
        layers.push(next.clone());
        layer = next.into_iter().zip(values).collect();
        back.push(preds);
    }
    if requests.is_empty() {
        return Ok((T::zero(), Vec::new()));
    }
    let mut end = 0;
    for i in 1..layer.len() {
        if layer[i].1 < layer[end].1 {
            end = i;
        }
    }
    let w = layer[end].1;
    let mut schedule = vec![layer[end].0.clone(); requests.len()];
    let mut idx = end;
    for t in (0..requests.len()).rev() {
        schedule[t] = layers[t][idx].clone();
        idx = back[t][idx];
    }
    Ok((w, schedule))
}

/// All k-multisets over `points` that contain `r`.
fn layer_configs(points: &[usize], k: usize, r: usize) -> Vec<Configuration> {
    if k == 1 {
        return vec![Configuration::from([r])];
    }
    let m = points.len();
    let mut out = Vec::new();
    let mut c = vec![0usize; k - 1];
    loop {
        out.push(Configuration::new(c.iter().map(|&i| points[i]).chain(std::iter::once(r))));
        if !next_multiset(&mut c, m) {
            break;
        }
    }
    out
}

/// Total movement of a configuration schedule starting from `start`.
pub fn kserver_schedule_cost<T: Scalar>(
    space: &MetricSpace<T>,
    start: &Configuration,
    schedule: &[Configuration],
) -> T {
    let mut prev = start;
    let mut total = T::zero();
    for a in schedule {
        total = total + matching_distance(prev.positions(), a.positions(), space);
        prev = a;
    }
    total
}
