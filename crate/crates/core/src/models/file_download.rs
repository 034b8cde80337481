//! Single-user file downloading over a time-varying channel, reduced to one
//! decision per renewal frame.
//!
//! A frame starts in the active state. The user observes the channel quality
//! `ω` and a delay weight `s`, then picks a service level `α`. The download
//! completes during that slot with probability `φ = α·ω`; on completion the
//! system idles for a geometric number of slots (success probability
//! `λ = 0.5`, support `{1, 2, ...}`) before the next file arrives. Otherwise
//! the next frame begins in the following slot. So `T = 1` with probability
//! `1 − φ` and `T = 1 + G` with probability `φ`, giving `E[T] = 1 + 2αω`.
//!
//! Events are the 9 equiprobable `(ω, s)` pairs, enumerated row-major with
//! `ω` outer and `s` inner.

use rand::{Rng, RngCore};

use super::{Outcome, RenewalModel};
use crate::controller::PerformanceTriple;
use crate::error::{Error, Result};

pub const FILE_CHANNELS: [f64; 3] = [0.2, 0.5, 0.8];
pub const FILE_DELAYS: [f64; 3] = [1.0, 3.0, 5.0];
pub const FILE_ACTIONS: [f64; 4] = [0.0, 0.3, 0.6, 0.9];
const FILE_POWER: [f64; 4] = [0.0, 1.0, 2.0, 4.0];
const IDLE_TO_ACTIVE: f64 = 0.5;
const POWER_BUDGET: f64 = 1.0;

/// How the per-frame penalty is charged.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FilePenalty {
    /// `y = α·s`: the delay weight scaled by the chosen service level.
    #[default]
    ServiceWeighted,
    /// `y = s`: every frame has exactly one active slot, which costs its
    /// delay weight regardless of the action.
    ActiveSlot,
}

#[derive(Debug, Clone)]
pub struct FileDownloadModel {
    probs: Vec<f64>,
    levels: Vec<f64>,
    penalty: FilePenalty,
}

impl Default for FileDownloadModel {
    fn default() -> Self {
        Self::new(FilePenalty::default())
    }
}

impl FileDownloadModel {
    pub fn new(penalty: FilePenalty) -> Self {
        let n = FILE_CHANNELS.len() * FILE_DELAYS.len();
        Self {
            probs: vec![1.0 / n as f64; n],
            levels: vec![POWER_BUDGET],
            penalty,
        }
    }

    pub fn penalty(&self) -> FilePenalty {
        self.penalty
    }

    /// `(ω, s)` for an event index.
    pub fn event_values(&self, event: usize) -> Result<(f64, f64)> {
        if event >= self.probs.len() {
            return Err(Error::Model(format!("event index {event} out of range")));
        }
        Ok((
            FILE_CHANNELS[event / FILE_DELAYS.len()],
            FILE_DELAYS[event % FILE_DELAYS.len()],
        ))
    }

    pub fn event_index(&self, omega: f64, s: f64) -> Result<usize> {
        let w = lookup(&FILE_CHANNELS, omega, "channel state")?;
        let d = lookup(&FILE_DELAYS, s, "delay weight")?;
        Ok(w * FILE_DELAYS.len() + d)
    }

    pub fn action_index(&self, alpha: f64) -> Result<usize> {
        lookup(&FILE_ACTIONS, alpha, "service level")
    }

    /// Expectations addressed by value rather than index; values outside the
    /// model's tables are rejected.
    pub fn expectations_for(&self, omega: f64, s: f64, alpha: f64) -> Result<PerformanceTriple> {
        let e = self.event_index(omega, s)?;
        let a = self.action_index(alpha)?;
        self.expectations(e, a)
    }

    /// Download success probability `φ = α·ω`.
    pub fn success_probability(&self, event: usize, action: usize) -> Result<f64> {
        let (omega, _) = self.event_values(event)?;
        Ok(self.alpha(action)? * omega)
    }

    fn alpha(&self, action: usize) -> Result<f64> {
        FILE_ACTIONS
            .get(action)
            .copied()
            .ok_or_else(|| Error::Model(format!("action index {action} out of range")))
    }

    fn frame_penalty(&self, alpha: f64, s: f64) -> f64 {
        match self.penalty {
            FilePenalty::ServiceWeighted => alpha * s,
            FilePenalty::ActiveSlot => s,
        }
    }

    /// Smallest `B` with `E[e^{ηX} | ω, α] ≤ B` for `X` each of `y`, `T` and
    /// `K = |p(α) − T|`, over all pairs. Computed from the exact frame-length
    /// distribution; the geometric tail is summed until it is negligible.
    pub fn exponential_bound(&self, eta: f64) -> Result<f64> {
        if !(eta > 0.0 && eta < -(1.0 - IDLE_TO_ACTIVE).ln()) {
            return Err(Error::Config(format!(
                "exponent {eta} outside (0, ln 2): frame length has no such moment"
            )));
        }
        let mut bound: f64 = 0.0;
        for e in 0..self.num_events() {
            let (_, s) = self.event_values(e)?;
            for (a, &alpha) in FILE_ACTIONS.iter().enumerate() {
                let phi = self.success_probability(e, a)?;
                let power = FILE_POWER[a];
                // (length, probability) pairs of the frame-length law.
                let mut mgf_t = (1.0 - phi) * eta.exp();
                let mut mgf_k = (1.0 - phi) * (eta * (power - 1.0).abs()).exp();
                let mut g_prob = IDLE_TO_ACTIVE;
                let mut g = 1.0;
                while phi > 0.0 && g_prob > 1e-300 {
                    let t = 1.0 + g;
                    mgf_t += phi * g_prob * (eta * t).exp();
                    mgf_k += phi * g_prob * (eta * (power - t).abs()).exp();
                    g_prob *= 1.0 - IDLE_TO_ACTIVE;
                    g += 1.0;
                    if g > 5000.0 {
                        break;
                    }
                }
                let mgf_y = (eta * self.frame_penalty(alpha, s)).exp();
                bound = bound.max(mgf_t).max(mgf_k).max(mgf_y);
            }
        }
        Ok(bound)
    }
}

fn lookup(table: &[f64], value: f64, what: &str) -> Result<usize> {
    table
        .iter()
        .position(|&v| (v - value).abs() < 1e-12)
        .ok_or_else(|| Error::Model(format!("{what} {value} is not in {table:?}")))
}

impl RenewalModel for FileDownloadModel {
    fn event_probabilities(&self) -> &[f64] {
        &self.probs
    }

    fn num_actions(&self) -> usize {
        FILE_ACTIONS.len()
    }

    fn constraint_levels(&self) -> &[f64] {
        &self.levels
    }

    fn expectations(&self, event: usize, action: usize) -> Result<PerformanceTriple> {
        let (omega, s) = self.event_values(event)?;
        let alpha = self.alpha(action)?;
        Ok(PerformanceTriple {
            y_hat: self.frame_penalty(alpha, s),
            t_hat: 1.0 + 2.0 * alpha * omega,
            z_hat: vec![FILE_POWER[action]],
        })
    }

    fn realize(&self, event: usize, action: usize, rng: &mut dyn RngCore) -> Result<Outcome> {
        let (omega, s) = self.event_values(event)?;
        let alpha = self.alpha(action)?;
        let phi = alpha * omega;
        let mut t = 1.0;
        if phi > 0.0 && rng.random_bool(phi) {
            // Idle period: geometric on {1, 2, ...}.
            t += 1.0;
            while !rng.random_bool(IDLE_TO_ACTIVE) {
                t += 1.0;
            }
        }
        Ok(Outcome {
            y: self.frame_penalty(alpha, s),
            t,
            z: vec![FILE_POWER[action]],
        })
    }

    fn event_label(&self, event: usize) -> String {
        match self.event_values(event) {
            Ok((w, s)) => format!("w={w},s={s}"),
            Err(_) => event.to_string(),
        }
    }

    fn action_label(&self, action: usize) -> String {
        FILE_ACTIONS
            .get(action)
            .map(|a| a.to_string())
            .unwrap_or_else(|| action.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-12
    }

    #[test]
    fn expectation_table_values() {
        let m = FileDownloadModel::default();
        let p = m.expectations_for(0.5, 3.0, 0.6).unwrap();
        assert!(close(p.y_hat, 1.8) && close(p.t_hat, 1.6) && p.z_hat == vec![2.0]);

        for &w in &FILE_CHANNELS {
            for &s in &FILE_DELAYS {
                let p = m.expectations_for(w, s, 0.0).unwrap();
                assert_eq!((p.y_hat, p.t_hat, p.z_hat.clone()), (0.0, 1.0, vec![0.0]));
            }
        }

        let p = m.expectations_for(0.8, 5.0, 0.9).unwrap();
        assert!(close(p.y_hat, 4.5) && close(p.t_hat, 2.44) && p.z_hat == vec![4.0]);
    }

    #[test]
    fn out_of_table_inputs_rejected() {
        let m = FileDownloadModel::default();
        assert!(m.expectations_for(0.3, 3.0, 0.6).is_err());
        assert!(m.expectations_for(0.5, 2.0, 0.6).is_err());
        assert!(m.expectations_for(0.5, 3.0, 0.5).is_err());
        assert!(m.expectations(9, 0).is_err());
        assert!(m.expectations(0, 4).is_err());
    }

    #[test]
    fn event_enumeration_is_row_major() {
        let m = FileDownloadModel::default();
        assert_eq!(m.event_values(0).unwrap(), (0.2, 1.0));
        assert_eq!(m.event_values(1).unwrap(), (0.2, 3.0));
        assert_eq!(m.event_values(3).unwrap(), (0.5, 1.0));
        assert_eq!(m.event_values(8).unwrap(), (0.8, 5.0));
        assert_eq!(m.event_index(0.8, 5.0).unwrap(), 8);
    }

    #[test]
    fn success_probability_range() {
        let m = FileDownloadModel::default();
        for e in 0..9 {
            for a in 0..4 {
                let phi = m.success_probability(e, a).unwrap();
                assert!((0.0..=0.72 + 1e-12).contains(&phi));
            }
        }
    }

    #[test]
    fn idle_action_is_one_slot() {
        let m = FileDownloadModel::default();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for e in 0..9 {
            for _ in 0..200 {
                let o = m.realize(e, 0, &mut rng).unwrap();
                assert_eq!(
                    o,
                    Outcome {
                        y: 0.0,
                        t: 1.0,
                        z: vec![0.0]
                    }
                );
            }
        }
    }

    #[test]
    fn active_slot_penalty_ignores_action() {
        let m = FileDownloadModel::new(FilePenalty::ActiveSlot);
        let p = m.expectations_for(0.5, 3.0, 0.6).unwrap();
        assert_eq!(p.y_hat, 3.0);
        assert!(close(p.t_hat, 1.6));
    }

    #[test]
    fn exponential_bound_dominates_default_pair() {
        let m = FileDownloadModel::default();
        let b = m.exponential_bound(0.3).unwrap();
        // The largest penalty 4.5 alone forces B ≥ e^{1.35}.
        assert!(b >= (0.3f64 * 4.5).exp() - 1e-12);
        assert!(m.exponential_bound(0.7).is_err());
    }
}
