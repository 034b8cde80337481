//! Reference computations shared by the integration tests. Everything here
//! is written from the model tables directly and does not call the oracle.

#![allow(dead_code, clippy::needless_range_loop)]

use rand::Rng;
use renewal_opt::models::{FileDownloadModel, FilePenalty, RenewalModel};

/// Dense copy of a model's expectation table.
pub struct Table {
    pub probs: Vec<f64>,
    pub y: Vec<Vec<f64>>,
    pub t: Vec<Vec<f64>>,
    pub z: Vec<Vec<Vec<f64>>>,
    pub c: Vec<f64>,
}

impl Table {
    pub fn of(model: &dyn RenewalModel) -> Table {
        let (ne, na) = (model.num_events(), model.num_actions());
        let mut y = vec![vec![0.0; na]; ne];
        let mut t = vec![vec![0.0; na]; ne];
        let mut z = vec![vec![Vec::new(); na]; ne];
        for e in 0..ne {
            for a in 0..na {
                let p = model.expectations(e, a).unwrap();
                y[e][a] = p.y_hat;
                t[e][a] = p.t_hat;
                z[e][a] = p.z_hat;
            }
        }
        Table {
            probs: model.event_probabilities().to_vec(),
            y,
            t,
            z,
            c: model.constraint_levels().to_vec(),
        }
    }

    pub fn events(&self) -> usize {
        self.probs.len()
    }

    pub fn actions(&self) -> usize {
        self.y[0].len()
    }

    /// Penalty ratio and per-resource ratios of a randomized policy.
    pub fn ratios(&self, policy: &[Vec<f64>]) -> (f64, Vec<f64>) {
        let (mut ey, mut et) = (0.0, 0.0);
        let mut ez = vec![0.0; self.c.len()];
        for e in 0..self.events() {
            for a in 0..self.actions() {
                let w = self.probs[e] * policy[e][a];
                ey += w * self.y[e][a];
                et += w * self.t[e][a];
                for (l, acc) in ez.iter_mut().enumerate() {
                    *acc += w * self.z[e][a][l];
                }
            }
        }
        (ey / et, ez.iter().map(|z| z / et).collect())
    }

    pub fn feasible(&self, policy: &[Vec<f64>], tol: f64) -> bool {
        let (_, r) = self.ratios(policy);
        r.iter().zip(&self.c).all(|(r, c)| *r <= c + tol)
    }
}

pub fn one_hot(choice: &[usize], actions: usize) -> Vec<Vec<f64>> {
    choice
        .iter()
        .map(|&a| {
            (0..actions)
                .map(|b| if a == b { 1.0 } else { 0.0 })
                .collect()
        })
        .collect()
}

/// Best feasible deterministic policy by exhaustive enumeration, with the
/// largest slack among its constraints (negative when binding is tight).
pub fn best_deterministic(table: &Table) -> Option<(f64, Vec<usize>)> {
    let (ne, na) = (table.events(), table.actions());
    let total = (na as u64).pow(ne as u32);
    let mut best: Option<(f64, Vec<usize>)> = None;
    let mut choice = vec![0usize; ne];
    for code in 0..total {
        let mut k = code;
        for slot in choice.iter_mut() {
            *slot = (k % na as u64) as usize;
            k /= na as u64;
        }
        let policy = one_hot(&choice, na);
        if !table.feasible(&policy, 1e-12) {
            continue;
        }
        let (obj, _) = table.ratios(&policy);
        if best.as_ref().is_none_or(|(b, _)| obj < *b) {
            best = Some((obj, choice.clone()));
        }
    }
    best
}

/// Uniform draw from the simplex in `n` dimensions.
pub fn random_simplex<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    let w: Vec<f64> = (0..n)
        .map(|_| -rng.random::<f64>().max(1e-300).ln())
        .collect();
    let s: f64 = w.iter().sum();
    w.into_iter().map(|x| x / s).collect()
}

/// Rejection-samples `count` feasible row-stochastic policies.
pub fn random_feasible_policies<R: Rng>(
    rng: &mut R,
    table: &Table,
    count: usize,
) -> Vec<Vec<Vec<f64>>> {
    let mut out = Vec::with_capacity(count);
    let mut tries = 0u64;
    while out.len() < count {
        tries += 1;
        assert!(tries < 1_000_000_000, "feasible region too small to sample");
        let policy: Vec<Vec<f64>> = (0..table.events())
            .map(|_| random_simplex(rng, table.actions()))
            .collect();
        if table.feasible(&policy, 0.0) {
            out.push(policy);
        }
    }
    out
}

pub fn file_model() -> FileDownloadModel {
    FileDownloadModel::new(FilePenalty::ServiceWeighted)
}

pub fn file_active_model() -> FileDownloadModel {
    FileDownloadModel::new(FilePenalty::ActiveSlot)
}

/// Violation counts from re-checking a run frame by frame.
#[derive(Debug, Default, Clone, Copy, PartialEq, Eq)]
pub struct Audit {
    pub frames: usize,
    pub probes: usize,
    pub negative_queue: usize,
    pub trim: usize,
    pub norm_increment: usize,
    pub equivalence: usize,
    pub argmin: usize,
    pub summand: usize,
    pub accumulation: usize,
}

impl Audit {
    pub fn clean(&self) -> bool {
        self.negative_queue
            + self.trim
            + self.norm_increment
            + self.equivalence
            + self.argmin
            + self.summand
            + self.accumulation
            == 0
    }
}

fn l2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Steps a fresh controller for `frames` frames and re-derives every
/// per-frame invariant from the pre-step state. `probes` equivalence probes
/// are drawn uniformly from `(0, θmax)` on each frame.
pub fn audit_run(
    model: &dyn RenewalModel,
    params: renewal_opt::ControllerParams,
    frames: usize,
    seed: u64,
    probes: usize,
) -> Audit {
    use rand::SeedableRng;
    use renewal_opt::ControllerState;

    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut probe_rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let levels = model.constraint_levels().to_vec();
    let shift = model.penalty_shift();
    let mut state = ControllerState::new(params, levels.clone()).unwrap();
    let mut out = Audit::default();
    let mut summands = Vec::with_capacity(frames);

    for _ in 0..frames {
        let before = state.clone();
        let rec = state.step(model, &mut rng).unwrap();
        out.frames += 1;
        let (q0, theta0) = (before.queues(), before.theta());

        // Argmin dominance by direct re-scoring of every action.
        let score = |a: usize| {
            let p = model.expectations(rec.event, a).unwrap();
            let drift: f64 = q0
                .iter()
                .zip(&p.z_hat)
                .zip(&levels)
                .map(|((q, z), c)| q * (z - c * p.t_hat))
                .sum();
            params.v * (p.y_hat + shift * p.t_hat - theta0 * p.t_hat) + drift
        };
        let chosen = score(rec.action);
        if (0..model.num_actions()).any(|a| score(a) < chosen) {
            out.argmin += 1;
        }

        let y = rec.y + shift * rec.t;
        let queue_term: f64 = q0
            .iter()
            .zip(&rec.z)
            .zip(&levels)
            .map(|((q, z), c)| q * (z - c * rec.t))
            .sum();
        let summand = y - theta0 * rec.t + queue_term / params.v;
        if (summand - rec.summand).abs() > 1e-9 * summand.abs().max(1.0) {
            out.summand += 1;
        }
        summands.push(rec.summand);

        let q1 = state.queues();
        if q1.iter().any(|&q| q < 0.0) {
            out.negative_queue += 1;
        }
        let k = l2(&rec
            .z
            .iter()
            .zip(&levels)
            .map(|(z, c)| z - c * rec.t)
            .collect::<Vec<_>>());
        if l2(q1) - l2(q0) > k + 1e-9 {
            out.norm_increment += 1;
        }

        let (theta, hat) = (state.theta(), state.theta_hat());
        if !(0.0..=params.theta_max).contains(&theta) {
            out.trim += 1;
        }
        let recomputed: f64 = summands.iter().sum();
        let d = state.accumulation();
        if (recomputed - d).abs() > 1e-9 * recomputed.abs().max(d.abs()).max(1.0) {
            out.accumulation += 1;
        }
        let hat_full = recomputed / (summands.len() as f64).powf(params.delta);
        let expected = hat_full.clamp(0.0, params.theta_max);
        if (expected - theta).abs() > 1e-9 * expected.abs().max(1.0) {
            out.trim += 1;
        }

        for _ in 0..probes {
            let x = probe_rng.random::<f64>() * params.theta_max;
            if x <= 0.0 {
                continue;
            }
            out.probes += 1;
            if (theta >= x) != (hat >= x) || (theta <= x) != (hat <= x) {
                out.equivalence += 1;
            }
        }
    }
    out
}

/// Sample mean of `T` for one pair against the closed form `1 + 2αω`.
#[derive(Debug, Clone, Copy)]
pub struct MeanCheck {
    pub event: usize,
    pub action: usize,
    pub mean: f64,
    pub std_err: f64,
    pub expected: f64,
}

impl MeanCheck {
    pub fn z_score(&self) -> f64 {
        if self.std_err == 0.0 {
            if self.mean == self.expected {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            (self.mean - self.expected) / self.std_err
        }
    }
}

/// Monte-Carlo frame lengths for every pair of the file model.
pub fn frame_length_checks(model: &FileDownloadModel, samples: usize, seed: u64) -> Vec<MeanCheck> {
    use rand::SeedableRng;
    use renewal_opt::models::{FILE_ACTIONS, FILE_CHANNELS, FILE_DELAYS};

    let mut out = Vec::new();
    for (wi, &omega) in FILE_CHANNELS.iter().enumerate() {
        for si in 0..FILE_DELAYS.len() {
            let event = wi * FILE_DELAYS.len() + si;
            for (action, &alpha) in FILE_ACTIONS.iter().enumerate() {
                let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(
                    seed ^ ((event * 8 + action) as u64) << 32,
                );
                let (mut s1, mut s2) = (0.0, 0.0);
                for _ in 0..samples {
                    let t = model.realize(event, action, &mut rng).unwrap().t;
                    s1 += t;
                    s2 += t * t;
                }
                let n = samples as f64;
                let mean = s1 / n;
                let var = (s2 / n - mean * mean).max(0.0) * n / (n - 1.0);
                out.push(MeanCheck {
                    event,
                    action,
                    mean,
                    std_err: (var / n).sqrt(),
                    expected: 1.0 + 2.0 * alpha * omega,
                });
            }
        }
    }
    out
}
