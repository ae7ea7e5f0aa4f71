//! Subsystem timescales and the sampling-rate-matching predicates.
//!
//! Four timescales govern how decorrelated consecutive samples are:
//! the laser coherence time `Tc`, the interferometer delay `Td`, the
//! photodiode response time `Tr`, and the sampling period `Ts`. The two
//! predicates checked here are `Td >> Tc` (phase decorrelation, with the
//! dominance threshold `k` standing in for ">>") and `Ts - Td > Tr`
//! (adjacent-sample decorrelation).

use crate::error::{Error, Result};

/// The four timescales plus the dominance threshold used for ">>".
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimingBudget {
    /// Laser coherence time (s).
    pub tc_s: f64,
    /// Interferometer delay (s).
    pub td_s: f64,
    /// Photodiode response time (s).
    pub tr_s: f64,
    /// Sampling period (s).
    pub ts_s: f64,
    /// Threshold `k` interpreting "much greater than"; default 10.
    pub dominance_factor: f64,
}

/// Outcome of the two matching predicates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BudgetCheck {
    /// `Td >= k * Tc`
    pub phase_decorrelated: bool,
    /// `Ts - Td > Tr`
    pub sample_decorrelated: bool,
}

pub const DEFAULT_DOMINANCE_FACTOR: f64 = 10.0;

impl TimingBudget {
    pub fn new(tc_s: f64, td_s: f64, tr_s: f64, ts_s: f64) -> Result<Self> {
        Self::with_dominance(tc_s, td_s, tr_s, ts_s, DEFAULT_DOMINANCE_FACTOR)
    }

    pub fn with_dominance(
        tc_s: f64,
        td_s: f64,
        tr_s: f64,
        ts_s: f64,
        dominance_factor: f64,
    ) -> Result<Self> {
        for (name, v) in [("tc", tc_s), ("td", td_s), ("tr", tr_s), ("ts", ts_s)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidModel(alloc::format!(
                    "timing budget requires {name} > 0, got {v}"
                )));
            }
        }
        if !(dominance_factor >= 1.0) {
            return Err(Error::InvalidModel(alloc::format!(
                "dominance factor must be >= 1, got {dominance_factor}"
            )));
        }
        Ok(Self {
            tc_s,
            td_s,
            tr_s,
            ts_s,
            dominance_factor,
        })
    }
}

/// Evaluate both matching predicates.
pub fn check_budget(b: &TimingBudget) -> BudgetCheck {
    BudgetCheck {
        phase_decorrelated: b.td_s >= b.dominance_factor * b.tc_s,
        sample_decorrelated: b.ts_s - b.td_s > b.tr_s,
    }
}

/// Supremum sampling rate satisfying the sample-decorrelation condition;
/// callers must sample strictly below it.
pub fn max_sample_rate(b: &TimingBudget) -> f64 {
    1.0 / (b.td_s + b.tr_s)
}
