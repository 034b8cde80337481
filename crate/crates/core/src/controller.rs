//! Per-frame drift-plus-penalty controller.
//!
//! At the start of frame `n` the controller observes the event and picks the
//! action minimizing
//!
//! ```text
//! V·(ŷ − θ[n]·T̂) + Σ_l Q_l[n]·(ẑ_l − c_l·T̂)
//! ```
//!
//! After the frame it folds the realized `(y, T, z)` into the running
//! accumulation `D` and refreshes the trimmed pseudo average
//! `θ[n+1] = clip(D / (n+1)^δ, 0, θmax)`, then advances the virtual queues
//! `Q_l[n+1] = max(Q_l[n] + z_l − c_l·T, 0)`. Both updates read the frame-`n`
//! values of `θ` and `Q`, so the θ update runs first.

use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::RenewalModel;

pub const DEFAULT_V: f64 = 100.0;
pub const DEFAULT_DELTA: f64 = 0.7;

/// Conditional expectations of penalty, frame length and resource use for
/// one `(event, action)` pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerformanceTriple {
    pub y_hat: f64,
    /// At least 1.
    pub t_hat: f64,
    pub z_hat: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ControllerParams {
    /// Penalty weight `V`.
    pub v: f64,
    /// Exponent `δ` of the pseudo-average divisor `n^δ`.
    pub delta: f64,
    /// Ceiling of the trimmed pseudo average.
    pub theta_max: f64,
}

impl ControllerParams {
    pub fn new(v: f64, delta: f64, theta_max: f64) -> Result<Self> {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::Config(format!("V must be positive, got {v}")));
        }
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(Error::Config(format!(
                "delta must be positive, got {delta}"
            )));
        }
        if !(theta_max > 0.0 && theta_max.is_finite()) {
            return Err(Error::Config(format!(
                "theta_max must be positive, got {theta_max}"
            )));
        }
        Ok(Self {
            v,
            delta,
            theta_max,
        })
    }
}

/// Realized frame plus the controller state right after it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameRecord {
    pub n: u64,
    pub event: usize,
    pub action: usize,
    /// Penalty in model units (before any shift).
    pub y: f64,
    pub t: f64,
    pub z: Vec<f64>,
    /// Term added to the accumulation on this frame, computed from the
    /// pre-update `θ[n]` and `Q[n]`.
    pub summand: f64,
    pub theta_after: f64,
    pub queues_after: Vec<f64>,
}

/// Result of folding one frame into the pseudo average.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaUpdate {
    pub summand: f64,
    pub accumulation: f64,
    pub theta: f64,
}

/// `[x]` clipped to `[0, theta_max]`.
pub fn clip_theta(x: f64, theta_max: f64) -> f64 {
    if x > theta_max {
        theta_max
    } else if x < 0.0 {
        0.0
    } else {
        x
    }
}

/// `Q'_l = max(Q_l + z_l − c_l·T, 0)` component-wise.
pub fn update_queues(queues: &[f64], z: &[f64], t: f64, levels: &[f64]) -> Result<Vec<f64>> {
    check_len("resource vector", queues.len(), z.len())?;
    check_len("constraint levels", queues.len(), levels.len())?;
    Ok(queues
        .iter()
        .zip(z)
        .zip(levels)
        .map(|((q, z), c)| (q + z - c * t).max(0.0))
        .collect())
}

fn check_len(what: &'static str, expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::Dimension {
            what,
            expected,
            got,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ControllerState {
    n: u64,
    queues: Vec<f64>,
    theta: f64,
    accumulation: f64,
    params: ControllerParams,
    levels: Vec<f64>,
}

impl ControllerState {
    /// Fresh state at frame 0: empty queues, `θ = 0`, `D = 0`.
    pub fn new(params: ControllerParams, levels: Vec<f64>) -> Result<Self> {
        if let Some(c) = levels.iter().find(|c| !(**c >= 0.0 && c.is_finite())) {
            return Err(Error::Config(format!(
                "constraint level {c} must be nonnegative"
            )));
        }
        Ok(Self {
            n: 0,
            queues: vec![0.0; levels.len()],
            theta: 0.0,
            accumulation: 0.0,
            params,
            levels,
        })
    }

    /// Rebuilds a state from stored fields; `theta` is recomputed from the
    /// accumulation so the pair stays consistent.
    pub fn from_parts(
        params: ControllerParams,
        levels: Vec<f64>,
        n: u64,
        queues: Vec<f64>,
        accumulation: f64,
    ) -> Result<Self> {
        check_len("queue vector", levels.len(), queues.len())?;
        if let Some(q) = queues.iter().find(|q| !(**q >= 0.0)) {
            return Err(Error::Config(format!(
                "queue backlog {q} must be nonnegative"
            )));
        }
        let mut state = Self::new(params, levels)?;
        state.n = n;
        state.queues = queues;
        state.accumulation = accumulation;
        state.theta = if n == 0 {
            0.0
        } else {
            clip_theta(
                accumulation / (n as f64).powf(params.delta),
                params.theta_max,
            )
        };
        Ok(state)
    }

    /// Overrides `θ` (clipped to the ceiling) without touching `D`. Only for
    /// probing the scoring rule at arbitrary operating points.
    pub fn with_theta(mut self, theta: f64) -> Self {
        self.theta = clip_theta(theta, self.params.theta_max);
        self
    }

    pub fn frame(&self) -> u64 {
        self.n
    }

    pub fn queues(&self) -> &[f64] {
        &self.queues
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// Un-clipped pseudo average `D[n−1] / n^δ`; zero at frame 0.
    pub fn theta_hat(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            self.accumulation / (self.n as f64).powf(self.params.delta)
        }
    }

    pub fn accumulation(&self) -> f64 {
        self.accumulation
    }

    pub fn params(&self) -> &ControllerParams {
        &self.params
    }

    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    pub fn queue_norm(&self) -> f64 {
        self.queues.iter().map(|q| q * q).sum::<f64>().sqrt()
    }

    /// `V·(ŷ − θ·T̂) + Σ_l Q_l·(ẑ_l − c_l·T̂)`.
    pub fn dpp_score(&self, perf: &PerformanceTriple) -> Result<f64> {
        check_len(
            "expected resource vector",
            self.queues.len(),
            perf.z_hat.len(),
        )?;
        let drift: f64 = self
            .queues
            .iter()
            .zip(&perf.z_hat)
            .zip(&self.levels)
            .map(|((q, z), c)| q * (z - c * perf.t_hat))
            .sum();
        Ok(self.params.v * (perf.y_hat - self.theta * perf.t_hat) + drift)
    }

    /// Index of the action with the smallest score; ties go to the lowest
    /// index.
    pub fn select_action(&self, event: usize, model: &dyn RenewalModel) -> Result<usize> {
        let shift = model.penalty_shift();
        let mut best: Option<(usize, f64)> = None;
        for a in 0..model.num_actions() {
            let mut perf = model.expectations(event, a)?;
            perf.y_hat += shift * perf.t_hat;
            let score = self.dpp_score(&perf)?;
            if score.is_nan() {
                return Err(Error::Model(format!(
                    "score of action {a} under event {event} is NaN"
                )));
            }
            if best.is_none_or(|(_, s)| score < s) {
                best = Some((a, score));
            }
        }
        best.map(|(a, _)| a)
            .ok_or_else(|| Error::Model("model has no actions".into()))
    }

    /// Summand `y − θ·T + (1/V)·Σ_l Q_l·(z_l − c_l·T)` at the current state,
    /// and the accumulation and trimmed average it leads to. `y` must already
    /// include any penalty shift.
    pub fn theta_update(&self, y: f64, t: f64, z: &[f64]) -> Result<ThetaUpdate> {
        check_len("resource vector", self.queues.len(), z.len())?;
        let queue_term: f64 = self
            .queues
            .iter()
            .zip(z)
            .zip(&self.levels)
            .map(|((q, z), c)| q * (z - c * t))
            .sum();
        let summand = y - self.theta * t + queue_term / self.params.v;
        let accumulation = self.accumulation + summand;
        let divisor = ((self.n + 1) as f64).powf(self.params.delta);
        Ok(ThetaUpdate {
            summand,
            accumulation,
            theta: clip_theta(accumulation / divisor, self.params.theta_max),
        })
    }

    /// Runs one frame: sample the event, choose the action, realize the
    /// outcome, then update `θ` and the queues from the frame-`n` state.
    pub fn step(&mut self, model: &dyn RenewalModel, rng: &mut dyn RngCore) -> Result<FrameRecord> {
        let event = model.sample_event(rng);
        let action = self.select_action(event, model)?;
        let outcome = model.realize(event, action, rng)?;
        if !(outcome.t >= 1.0) {
            return Err(Error::Model(format!(
                "frame length {} below 1 for event {event}, action {action}",
                outcome.t
            )));
        }
        let shifted_y = outcome.y + model.penalty_shift() * outcome.t;
        let update = self.theta_update(shifted_y, outcome.t, &outcome.z)?;
        let queues = update_queues(&self.queues, &outcome.z, outcome.t, &self.levels)?;

        let record = FrameRecord {
            n: self.n,
            event,
            action,
            y: outcome.y,
            t: outcome.t,
            z: outcome.z,
            summand: update.summand,
            theta_after: update.theta,
            queues_after: queues.clone(),
        };
        self.accumulation = update.accumulation;
        self.theta = update.theta;
        self.queues = queues;
        self.n += 1;
        Ok(record)
    }
}
