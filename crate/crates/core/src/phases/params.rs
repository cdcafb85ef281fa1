use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Restart parameters.
///
/// `alpha` is the competitive ratio of the wrapped algorithm, `epsilon` the
/// slack added to it, `delta_lb` an optional lower bound on the cost of a
/// stored request, and `k` the server count in k-server mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseParams<T> {
    pub alpha: T,
    pub epsilon: T,
    pub delta_lb: Option<T>,
    pub k: Option<usize>,
}

impl<T: Scalar> PhaseParams<T> {
    /// MTS mode with α = 2|S| − 1.
    pub fn for_mts(states: usize, epsilon: T) -> Self {
        Self { alpha: T::from_usize(2 * states - 1).expect("small count"), epsilon, delta_lb: None, k: None }
    }

    /// k-server mode with α = 2k − 1.
    pub fn for_kserver(k: usize, epsilon: T) -> Self {
        Self { alpha: T::from_usize(2 * k - 1).expect("small count"), epsilon, delta_lb: None, k: Some(k) }
    }

    pub fn with_alpha(mut self, alpha: T) -> Self {
        self.alpha = alpha;
        self
    }

    pub fn with_delta(mut self, delta_lb: T) -> Self {
        self.delta_lb = Some(delta_lb);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !self.epsilon.is_finite() || self.epsilon <= T::zero() {
            return Err(Error::Params(format!("epsilon must be positive and finite, got {}", self.epsilon)));
        }
        if !self.alpha.is_finite() || self.alpha < T::one() {
            return Err(Error::Params(format!("alpha must be at least 1, got {}", self.alpha)));
        }
        if let Some(d) = self.delta_lb {
            if d.is_nan() || d <= T::zero() {
                return Err(Error::Params(format!("delta must be positive, got {d}")));
            }
        }
        if self.k == Some(0) {
            return Err(Error::Params("k must be at least 1".into()));
        }
        Ok(())
    }

    /// α(α+ε)/ε: the factor the distance budget is scaled by.
    pub(crate) fn scale(&self) -> T {
        self.alpha * (self.alpha + self.epsilon) / self.epsilon
    }
}

fn check_epsilon<T: Scalar>(params: &PhaseParams<T>) -> Result<()> {
    if params.epsilon.is_nan() || params.epsilon <= T::zero() {
        return Err(Error::Params(format!("epsilon must be positive, got {}", params.epsilon)));
    }
    Ok(())
}

/// MTS trigger: 2·α·(α+ε)·Δ/ε.
pub fn mts_threshold<T: Scalar>(params: &PhaseParams<T>, delta_cap: T) -> Result<T> {
    check_epsilon(params)?;
    Ok(params.scale() * (delta_cap + delta_cap))
}

/// k-server trigger: 2·α·(α+ε)·(k−1)·D/ε.
pub fn kserver_threshold<T: Scalar>(params: &PhaseParams<T>, d: T) -> Result<T> {
    check_epsilon(params)?;
    let k = params.k.ok_or_else(|| Error::Params("k-server threshold needs k".into()))?;
    if k == 0 {
        return Err(Error::Params("k must be at least 1".into()));
    }
    let servers = T::from_usize(k - 1).expect("small count");
    Ok(params.scale() * (d + d) * servers)
}

/// ⌈threshold(cap)/δ⌉: the phase length bound for stored requests costing at
/// least δ each with the distance bound never above `cap`. The request that
/// closes a phase is stored as well, so a phase can hold one more request
/// when threshold/δ is an integer (k = 1: threshold 0, one request per phase).
pub fn phase_length_bound<T: Scalar>(params: &PhaseParams<T>, cap: T) -> Result<u64> {
    let delta = params
        .delta_lb
        .ok_or_else(|| Error::Params("phase length bound needs a lower bound delta".into()))?;
    if delta.is_nan() || delta <= T::zero() {
        return Err(Error::Params(format!("delta must be positive, got {delta}")));
    }
    let threshold = match params.k {
        Some(_) => kserver_threshold(params, cap)?,
        None => mts_threshold(params, cap)?,
    };
    (threshold / delta)
        .ceil()
        .to_u64()
        .ok_or_else(|| Error::Params("phase length bound does not fit in 64 bits".into()))
}
