//! Per-step run records shared by every runner.

use crate::scalar::Scalar;

/// One processed request.
#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord<T, S> {
    pub step: usize,
    /// Zero-based phase index.
    pub phase: usize,
    /// State (MTS) or configuration (k-server) after the step.
    pub state: S,
    pub step_cost: T,
    pub cumulative_cost: T,
    /// The request was already covered by a server and was not stored.
    pub covered: bool,
    /// Online bound D on the set of interest (k-server) or Δ (MTS).
    pub interest_bound: Option<T>,
    /// Restart threshold in force after the step; `None` for unbounded runners.
    pub threshold: Option<T>,
    /// The phase closed after this step.
    pub restarted: bool,
    pub elapsed_ns: u64,
    /// Point the moving server left (k-server only).
    pub moved_from: Option<usize>,
}

/// Contiguous block of steps processed with one history.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseSpan<T> {
    pub phase: usize,
    pub first_step: usize,
    pub last_step: usize,
    pub cost: T,
    /// Stored (non-covered) requests.
    pub history_len: usize,
    pub restarted: bool,
}

impl<T> PhaseSpan<T> {
    pub fn len(&self) -> usize {
        self.last_step + 1 - self.first_step
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunTrace<T, S> {
    pub rows: Vec<StepRecord<T, S>>,
}

impl<T, S> Default for RunTrace<T, S> {
    fn default() -> Self {
        Self { rows: Vec::new() }
    }
}

impl<T: Scalar, S: Clone + PartialEq> RunTrace<T, S> {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn total_cost(&self) -> T {
        self.rows.last().map_or(T::zero(), |r| r.cumulative_cost)
    }

    /// Number of phases; an empty run still has one (empty) phase.
    pub fn phase_count(&self) -> usize {
        self.rows.last().map_or(1, |r| r.phase + 1)
    }

    pub fn phases(&self) -> Vec<PhaseSpan<T>> {
        let mut spans: Vec<PhaseSpan<T>> = Vec::new();
        for row in &self.rows {
            match spans.last_mut() {
                Some(span) if span.phase == row.phase => {
                    span.last_step = row.step;
                    span.cost = span.cost + row.step_cost;
                    span.history_len += usize::from(!row.covered);
                    span.restarted = row.restarted;
                }
                _ => spans.push(PhaseSpan {
                    phase: row.phase,
                    first_step: row.step,
                    last_step: row.step,
                    cost: row.step_cost,
                    history_len: usize::from(!row.covered),
                    restarted: row.restarted,
                }),
            }
        }
        spans
    }

    /// End state of each phase (z_1, z_2, ...).
    pub fn phase_end_states(&self) -> Vec<S> {
        self.phases().iter().map(|p| self.rows[p.last_step].state.clone()).collect()
    }

    pub fn max_history_len(&self) -> usize {
        self.phases().iter().map(|p| p.history_len).max().unwrap_or(0)
    }

    /// Checks the structural invariants: consecutive steps, prefix sums,
    /// nondecreasing phases that only advance right after a restart.
    ///
    /// Prefix sums are compared with a slack that grows with the row index,
    /// so traces read back from rounded text still pass.
    pub fn check_invariants(&self) -> Result<(), String> {
        let mut sum = T::zero();
        for (i, row) in self.rows.iter().enumerate() {
            if row.step != i {
                return Err(format!("row {i} has step {}", row.step));
            }
            sum = sum + row.step_cost;
            let slack = T::TOLERANCE * T::of((i + 1) as f64) * sum.abs().max(T::one());
            if (sum - row.cumulative_cost).abs() > slack {
                return Err(format!("row {i}: cumulative {} != prefix sum {}", row.cumulative_cost, sum));
            }
            if row.step_cost < T::zero() {
                return Err(format!("row {i}: negative step cost"));
            }
            if i > 0 {
                let prev = &self.rows[i - 1];
                let expected = prev.phase + usize::from(prev.restarted);
                if row.phase != expected {
                    return Err(format!("row {i}: phase {} after phase {} (restarted={})", row.phase, prev.phase, prev.restarted));
                }
            } else if row.phase != 0 {
                return Err("first row must be in phase 0".into());
            }
        }
        Ok(())
    }

    /// Row-for-row equality of everything the algorithm decided; timing and
    /// the threshold column are excluded.
    pub fn same_decisions(&self, other: &Self) -> bool {
        self.rows.len() == other.rows.len()
            && self.rows.iter().zip(&other.rows).all(|(a, b)| {
                a.step == b.step
                    && a.phase == b.phase
                    && a.state == b.state
                    && a.step_cost == b.step_cost
                    && a.cumulative_cost == b.cumulative_cost
                    && a.covered == b.covered
                    && a.interest_bound == b.interest_bound
                    && a.restarted == b.restarted
                    && a.moved_from == b.moved_from
            })
    }
}
