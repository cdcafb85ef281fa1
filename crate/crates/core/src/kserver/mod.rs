//! The k-server problem: configurations, matching distance, the work
//! function over the set of interest, WFA and the offline optimum.

mod config;
mod interest;
mod matching;
mod opt;
mod rank;
mod workfn;

pub use config::Configuration;
pub use interest::{interest_bound_d, InterestBound};
pub use matching::{config_distance, min_cost_assignment};
pub use opt::{kserver_schedule_cost, opt_kserver_from, opt_offline_kserver, OPT_CAPACITY};
pub use workfn::{wf_absorb, wf_init, wfa_kserver_step, wfa_run_kserver, ConfigWorkFunction};

pub(crate) use matching::matching_distance;
pub(crate) use workfn::wfa_choose;

use crate::error::{Error, Result};
use crate::metric::MetricSpace;
use crate::scalar::Scalar;

/// k servers in a finite metric space, an initial configuration and a
/// sequence of requested points.
#[derive(Debug, Clone, PartialEq)]
pub struct KServerInstance<T> {
    space: MetricSpace<T>,
    initial: Configuration,
    requests: Vec<usize>,
}

impl<T: Scalar> KServerInstance<T> {
    pub fn new(space: MetricSpace<T>, k: usize, initial: Configuration, requests: Vec<usize>) -> Result<Self> {
        if k == 0 {
            return Err(Error::Instance("k must be at least 1".into()));
        }
        if initial.k() != k {
            return Err(Error::LengthMismatch { expected: k, got: initial.k() });
        }
        let n = space.len();
        if let Some(&p) = initial.positions().iter().chain(&requests).find(|&&p| p >= n) {
            return Err(Error::OutOfRange { index: p, size: n });
        }
        Ok(Self { space, initial, requests })
    }

    pub fn space(&self) -> &MetricSpace<T> {
        &self.space
    }

    pub fn k(&self) -> usize {
        self.initial.k()
    }

    pub fn initial(&self) -> &Configuration {
        &self.initial
    }

    pub fn requests(&self) -> &[usize] {
        &self.requests
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn instance_validation() {
        let s = MetricSpace::from_points(&[vec![0.0], vec![5.0]]).unwrap();
        assert!(KServerInstance::new(s.clone(), 1, Configuration::from([0]), vec![1]).is_ok());
        assert!(KServerInstance::new(s.clone(), 0, Configuration::new([]), vec![]).is_err());
        assert!(KServerInstance::new(s.clone(), 2, Configuration::from([0]), vec![]).is_err());
        assert!(KServerInstance::new(s.clone(), 1, Configuration::from([2]), vec![]).is_err());
        assert!(KServerInstance::new(s, 1, Configuration::from([0]), vec![3]).is_err());
    }
}
