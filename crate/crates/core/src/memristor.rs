//! The feedback law of the memristive coupler: maps the history of
//! update-mode detection probabilities to the reflectivity R used at the next
//! time step, and the reflectivity to the interferometer phase.
//!
//! Two live rules plus the no-feedback control:
//!
//! - moving average: R = (1/m)·Σ (a·p₂ + b) over the last m observed steps;
//! - exponential moving average: R ← R + (p₂ − R)/m_d, a weighted average of
//!   the whole history with geometrically decaying weights;
//! - frozen: R held constant.
//!
//! Updates are causal: the reflectivity applied at step t is a function of
//! outcomes up to step t−1 only, never of the step that consumes it.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Feedback rule selecting how measurement history drives the reflectivity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "rule")]
pub enum FeedbackRule {
    /// Windowed average of a·p₂ + b over the last `m` steps.
    MovingAverage { m: usize, a: f64, b: f64 },
    /// Recursive update R ← R + (p₂ − R)/m_d with memory decay m_d ≥ 1.
    ExpMovingAverage { m_d: f64 },
    /// No feedback; reflectivity pinned at `r`.
    Frozen { r: f64 },
}

impl FeedbackRule {
    pub fn validate(&self) -> Result<()> {
        match *self {
            FeedbackRule::MovingAverage { m, a, b } => {
                if m < 1 {
                    return Err(domain("moving-average window must be at least 1"));
                }
                if !a.is_finite() || !b.is_finite() {
                    return Err(domain("feedback gain and offset must be finite"));
                }
            }
            FeedbackRule::ExpMovingAverage { m_d } => {
                if m_d.is_nan() || m_d < 1.0 {
                    return Err(domain(format!("memory decay {m_d} must be >= 1")));
                }
            }
            FeedbackRule::Frozen { r } => {
                if !(0.0..=1.0).contains(&r) {
                    return Err(domain(format!("frozen reflectivity {r} outside [0, 1]")));
                }
            }
        }
        Ok(())
    }

    /// True when the rule carries no memory of past outcomes.
    pub fn is_frozen(&self) -> bool {
        matches!(self, FeedbackRule::Frozen { .. })
    }
}

/// Internal phase of the coupler realizing reflectivity `r`:
/// θ = 2·arccos(√r), so that cos²(θ/2) = r.
pub fn phase_of(r: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&r) {
        return Err(domain(format!("reflectivity {r} outside [0, 1]")));
    }
    Ok(2.0 * r.sqrt().acos())
}

/// Memristor state: current reflectivity plus whatever history its rule
/// needs. A value type; [`MemristorState::updated`] returns the successor.
#[derive(Debug, Clone, PartialEq)]
pub struct MemristorState {
    r: f64,
    p2_history: VecDeque<f64>,
    t: u64,
    clamp_events: u64,
}

impl MemristorState {
    pub fn new(r0: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&r0) {
            return Err(domain(format!("initial reflectivity {r0} outside [0, 1]")));
        }
        Ok(Self {
            r: r0,
            p2_history: VecDeque::new(),
            t: 0,
            clamp_events: 0,
        })
    }

    /// Reflectivity to apply at the current step.
    #[inline]
    pub fn reflectivity(&self) -> f64 {
        self.r
    }

    /// Number of updates consumed so far.
    #[inline]
    pub fn step_count(&self) -> u64 {
        self.t
    }

    /// How many updates had to be clamped back into [0, 1].
    #[inline]
    pub fn clamp_events(&self) -> u64 {
        self.clamp_events
    }

    /// Consumes this step's update-mode probability and returns the state
    /// whose reflectivity the *next* step will use. Before the window fills,
    /// the moving average runs over the entries available so far.
    #[must_use = "updated returns the successor state"]
    pub fn updated(&self, rule: &FeedbackRule, p2: f64) -> Result<MemristorState> {
        if !(0.0..=1.0).contains(&p2) {
            return Err(domain(format!("update probability {p2} outside [0, 1]")));
        }
        let mut next = self.clone();
        next.t += 1;
        match *rule {
            FeedbackRule::MovingAverage { m, a, b } => {
                next.p2_history.push_back(p2);
                while next.p2_history.len() > m {
                    next.p2_history.pop_front();
                }
                let mean = next.p2_history.iter().map(|&p| a * p + b).sum::<f64>()
                    / next.p2_history.len() as f64;
                if !(0.0..=1.0).contains(&mean) {
                    next.clamp_events += 1;
                }
                next.r = mean.clamp(0.0, 1.0);
            }
            FeedbackRule::ExpMovingAverage { m_d } => {
                next.p2_history.clear();
                next.p2_history.push_back(p2);
                next.r = self.r + (p2 - self.r) / m_d;
            }
            FeedbackRule::Frozen { .. } => {
                next.p2_history.clear();
                next.p2_history.push_back(p2);
            }
        }
        Ok(next)
    }
}

/// Solved recursion of the exponential moving average after feeding the whole
/// probability sequence:
///
/// R_t = (1 − 1/m_d)^t · R₀ + (1/m_d)·Σᵢ (1 − 1/m_d)^{t−1−i} · p₂ᵢ
pub fn closed_form_ema(r0: f64, p2_seq: &[f64], m_d: f64) -> f64 {
    // Explicit weighted sum, deliberately evaluated term by term rather than
    // through the recursion it solves, so the two routes stay independent.
    let q = 1.0 - 1.0 / m_d;
    let t = p2_seq.len();
    let mut total = q.powi(t as i32) * r0;
    for (i, &p) in p2_seq.iter().enumerate() {
        total += q.powi((t - 1 - i) as i32) * p / m_d;
    }
    total
}
