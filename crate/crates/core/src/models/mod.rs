//! Renewal-system models: what happens on a frame given the observed event
//! and the chosen action.
//!
//! A model exposes the conditional expectations `(ŷ, T̂, ẑ)` for every
//! `(event, action)` pair, which the controller needs to score actions, and a
//! sampler for the realized outcome of a frame. Events and actions are
//! addressed by index; every event shares the same finite action set.

mod file_download;
mod synthetic;

pub use file_download::{FileDownloadModel, FilePenalty, FILE_ACTIONS, FILE_CHANNELS, FILE_DELAYS};
pub use synthetic::{OutcomeSpec, SyntheticConfig, SyntheticEntry, SyntheticEvent, SyntheticModel};

use rand::{Rng, RngCore};

use crate::controller::PerformanceTriple;
use crate::error::{Error, Result};

/// Tolerance on the total mass of an event distribution.
pub const PROBABILITY_TOLERANCE: f64 = 1e-12;

/// Realized outcome of one frame.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub y: f64,
    /// Frame length in slots, at least 1.
    pub t: f64,
    pub z: Vec<f64>,
}

pub trait RenewalModel: Send + Sync {
    /// Probability of each event; sums to one.
    fn event_probabilities(&self) -> &[f64];

    fn num_actions(&self) -> usize;

    /// Constraint levels `c_l`; the model has `L = c.len()` resources.
    fn constraint_levels(&self) -> &[f64];

    fn expectations(&self, event: usize, action: usize) -> Result<PerformanceTriple>;

    fn realize(&self, event: usize, action: usize, rng: &mut dyn RngCore) -> Result<Outcome>;

    /// Constant `s` such that the controller optimizes `y + s·T` instead of
    /// `y`. Lets models with negative penalties keep the optimal ratio
    /// nonnegative. Reported averages stay in the original units.
    fn penalty_shift(&self) -> f64 {
        0.0
    }

    fn num_events(&self) -> usize {
        self.event_probabilities().len()
    }

    fn num_constraints(&self) -> usize {
        self.constraint_levels().len()
    }

    fn event_label(&self, event: usize) -> String {
        event.to_string()
    }

    fn action_label(&self, action: usize) -> String {
        action.to_string()
    }

    /// Draws an event index by inversion of the cumulative distribution.
    fn sample_event(&self, rng: &mut dyn RngCore) -> usize {
        let probs = self.event_probabilities();
        let u: f64 = rng.random();
        let mut acc = 0.0;
        let mut last_positive = 0;
        for (i, &p) in probs.iter().enumerate() {
            if p > 0.0 {
                last_positive = i;
            }
            acc += p;
            if u < acc {
                return i;
            }
        }
        last_positive
    }
}

/// Checks that `probs` is a probability vector within
/// [`PROBABILITY_TOLERANCE`].
pub fn validate_probabilities(probs: &[f64]) -> Result<()> {
    if probs.is_empty() {
        return Err(Error::Model("event space is empty".into()));
    }
    if let Some((i, p)) = probs
        .iter()
        .enumerate()
        .find(|(_, p)| !p.is_finite() || **p < 0.0)
    {
        return Err(Error::Model(format!(
            "event {i} has invalid probability {p}"
        )));
    }
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > PROBABILITY_TOLERANCE {
        return Err(Error::Model(format!(
            "event probabilities sum to {total}, expected 1"
        )));
    }
    Ok(())
}

/// Default truncation ceiling: 1.5 times the largest per-pair ratio
/// `(ŷ + shift·T̂) / T̂`. Falls back to 1 when every ratio is zero or below.
pub fn auto_theta_max(model: &dyn RenewalModel) -> Result<f64> {
    let shift = model.penalty_shift();
    let mut best = f64::NEG_INFINITY;
    for e in 0..model.num_events() {
        for a in 0..model.num_actions() {
            let perf = model.expectations(e, a)?;
            best = best.max((perf.y_hat + shift * perf.t_hat) / perf.t_hat);
        }
    }
    if best.is_finite() && best > 0.0 {
        Ok(1.5 * best)
    } else {
        Ok(1.0)
    }
}
