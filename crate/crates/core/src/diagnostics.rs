//! Analysis quantities computed from recorded runs: frame increment norms
//! `K[n]`, the queue-drift constants, exponential queue moments, the
//! log-capped pseudo average `θ̃[n]` with its truncation events, the
//! partial sums `F[n]`, and the hitting times of `θ̃` below a target.
//!
//! Everything here is post-processing over [`FrameRecord`] series; nothing
//! feeds back into the controller.

use serde::{Deserialize, Serialize};

use crate::controller::FrameRecord;
use crate::error::{Error, Result};

/// Default offset of the hitting-time target above `θ*`.
pub const DEFAULT_TARGET_OFFSET: f64 = 0.1;

/// `‖z − c·T‖₂`.
pub fn k_norm(z: &[f64], t: f64, levels: &[f64]) -> Result<f64> {
    if z.len() != levels.len() {
        return Err(Error::Dimension {
            what: "resource vector",
            expected: levels.len(),
            got: z.len(),
        });
    }
    Ok(z.iter()
        .zip(levels)
        .map(|(z, c)| (z - c * t).powi(2))
        .sum::<f64>()
        .sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundInputs {
    /// Exponent with `E[e^{ηX}] ≤ B` for penalty, frame length and `K`.
    pub eta: f64,
    #[serde(rename = "B")]
    pub b: f64,
    /// Slack of the best strictly feasible stationary policy.
    pub xi: f64,
    #[serde(rename = "V")]
    pub v: f64,
    pub theta_max: f64,
    #[serde(rename = "L")]
    pub num_constraints: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundConstants {
    pub r: f64,
    pub sigma: f64,
    pub rho: f64,
    #[serde(rename = "Gamma")]
    pub gamma: f64,
    #[serde(rename = "C0")]
    pub c0: f64,
    /// Bound on `E[e^{r‖Q[n]‖}]` valid for every frame.
    #[serde(rename = "D")]
    pub d: f64,
}

impl BoundConstants {
    /// A nonpositive `C₀` makes the drift threshold meaningless.
    pub fn is_vacuous(&self) -> bool {
        self.c0 <= 0.0
    }
}

/// Drift constants for `R[n] = ‖Q[n]‖`.
///
/// `r = min{η, ξη²/(8B)}` is the minimizer of `1 − rξ/2 + (2B/η²)r²` when
/// `η` is not binding, which keeps `ρ < 1`.
pub fn bound_constants(inp: &BoundInputs) -> Result<BoundConstants> {
    let BoundInputs {
        eta,
        b,
        xi,
        v,
        theta_max,
        ..
    } = *inp;
    for (name, x) in [
        ("eta", eta),
        ("B", b),
        ("xi", xi),
        ("V", v),
        ("theta_max", theta_max),
    ] {
        if !(x > 0.0 && x.is_finite()) {
            return Err(Error::Config(format!("{name} must be positive, got {x}")));
        }
    }
    let r = eta.min(xi * eta * eta / (8.0 * b));
    let rho = 1.0 - r * xi / 2.0 + (2.0 * b / (eta * eta)) * r * r;
    if !(rho < 1.0) {
        return Err(Error::Internal(format!(
            "drift factor rho = {rho} is not below 1"
        )));
    }
    // Consistent inputs have ξ ≤ E[K] ≤ ln(B)/η, which keeps ρ positive.
    if rho <= 0.0 {
        return Err(Error::Config(format!(
            "drift factor rho = {rho} is not positive; slack xi = {xi} is too large for eta = {eta}, B = {b}"
        )));
    }
    let c0 = 2.0 * b * b / (v * xi * eta * eta) + 2.0 * (theta_max + 1.0) * b / (xi * eta)
        - xi / (4.0 * v);
    let sigma = c0 * v;
    let d = 1.0 + b * (r * sigma).exp() / (1.0 - rho);
    let out = BoundConstants {
        r,
        sigma,
        rho,
        gamma: b,
        c0,
        d,
    };
    if out.is_vacuous() {
        log::warn!("C0 = {c0} is not positive; the queue bound is vacuous");
    }
    Ok(out)
}

/// `‖Q[n]‖` before each frame, followed by the norm after the last frame
/// (`N + 1` values; the first is always 0).
pub fn queue_norms(records: &[FrameRecord]) -> Vec<f64> {
    std::iter::once(0.0)
        .chain(records.iter().map(|r| norm(&r.queues_after)))
        .collect()
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Cross-run mean of `e^{r‖Q[n]‖}` at one frame index.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentPoint {
    pub mean: f64,
    pub std_err: f64,
}

/// Per-frame sample mean and standard error of `e^{r‖Q[n]‖}` across
/// independent runs. `runs[k]` is a queue-norm series from
/// [`queue_norms`]; series are truncated to the shortest.
pub fn empirical_exp_moment(runs: &[Vec<f64>], r: f64) -> Result<Vec<MomentPoint>> {
    if runs.len() < 2 {
        return Err(Error::Config(format!(
            "exponential moment is a cross-run statistic; got {} run(s)",
            runs.len()
        )));
    }
    if !(r >= 0.0) {
        return Err(Error::Config(format!(
            "exponent r must be nonnegative, got {r}"
        )));
    }
    let len = runs.iter().map(Vec::len).min().unwrap_or(0);
    let k = runs.len() as f64;
    Ok((0..len)
        .map(|n| {
            let vals: Vec<f64> = runs.iter().map(|run| (r * run[n]).exp()).collect();
            let mean = vals.iter().sum::<f64>() / k;
            let var = vals.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (k - 1.0);
            MomentPoint {
                mean,
                std_err: (var / k).sqrt(),
            }
        })
        .collect())
}

/// Parameters of the log-growing summand cap.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationParams {
    pub eta: f64,
    pub r: f64,
    pub v: f64,
    pub delta: f64,
}

impl TruncationParams {
    /// `(2/η + 4√L/(ηrV))·log²(i+1)`.
    pub fn cap(&self, i: u64, num_constraints: usize) -> f64 {
        let coeff =
            2.0 / self.eta + 4.0 * (num_constraints as f64).sqrt() / (self.eta * self.r * self.v);
        coeff * ((i + 1) as f64).ln().powi(2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct TruncationFlags {
    /// `y_i − θ_i·T_i > (2/η)·log²(i+1)`
    pub a: bool,
    /// `‖Q_i‖ > (2√L/r)·log(i+1)`
    pub b: bool,
    /// `K_i > (2/η)·log(i+1)`
    pub e: bool,
}

impl TruncationFlags {
    pub fn any(&self) -> bool {
        self.a || self.b || self.e
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedSeries {
    /// `θ̃[0..=N]`, with `θ̃[0] = 0`.
    pub theta_tilde: Vec<f64>,
    /// `min(summand_i, cap_i)` per frame.
    pub capped: Vec<f64>,
    pub flags: Vec<TruncationFlags>,
    /// `K_i` per frame.
    pub k: Vec<f64>,
}

/// Pre-frame `(θ_i, Q_i)` for each record: the post-update snapshot of the
/// previous record, or zeros for the first frame.
fn pre_frame_states<'a>(
    records: &'a [FrameRecord],
    num_constraints: usize,
) -> impl Iterator<Item = (f64, std::borrow::Cow<'a, [f64]>)> + 'a {
    let zeros = vec![0.0; num_constraints];
    std::iter::once((0.0, std::borrow::Cow::Owned(zeros))).chain(records.iter().map(|r| {
        (
            r.theta_after,
            std::borrow::Cow::Borrowed(r.queues_after.as_slice()),
        )
    }))
}

/// Caps each summand at its log-growing threshold and recomputes the pseudo
/// average; also flags the three events under which a frame can exceed the
/// cap.
pub fn truncated_series(
    records: &[FrameRecord],
    levels: &[f64],
    params: &TruncationParams,
) -> Result<TruncatedSeries> {
    let nl = levels.len();
    let sqrt_l = (nl as f64).sqrt();
    let mut theta_tilde = Vec::with_capacity(records.len() + 1);
    theta_tilde.push(0.0);
    let mut capped = Vec::with_capacity(records.len());
    let mut flags = Vec::with_capacity(records.len());
    let mut ks = Vec::with_capacity(records.len());
    let mut acc = 0.0;

    for ((i, rec), (_, queues)) in records
        .iter()
        .enumerate()
        .zip(pre_frame_states(records, nl))
    {
        let i = i as u64;
        let k = k_norm(&rec.z, rec.t, levels)?;
        if queues.len() != nl {
            return Err(Error::Dimension {
                what: "queue snapshot",
                expected: nl,
                got: queues.len(),
            });
        }
        let queue_term: f64 = queues
            .iter()
            .zip(&rec.z)
            .zip(levels)
            .map(|((q, z), c)| q * (z - c * rec.t))
            .sum();
        let log1 = ((i + 1) as f64).ln();
        // y_i − θ_i T_i, in the units the controller optimized.
        let net_penalty = rec.summand - queue_term / params.v;
        flags.push(TruncationFlags {
            a: net_penalty > 2.0 / params.eta * log1 * log1,
            b: norm(&queues) > 2.0 * sqrt_l / params.r * log1,
            e: k > 2.0 / params.eta * log1,
        });
        let c = rec.summand.min(params.cap(i, nl));
        acc += c;
        capped.push(c);
        ks.push(k);
        theta_tilde.push(acc / ((i + 1) as f64).powf(params.delta));
    }
    Ok(TruncatedSeries {
        theta_tilde,
        capped,
        flags,
        k: ks,
    })
}

/// Un-clipped pseudo average `θ̂[n] = (Σ_{i<n} summand_i) / n^δ` for
/// `n = 0..=N`, with `θ̂[0] = 0`.
pub fn theta_hat_series(records: &[FrameRecord], delta: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(records.len() + 1);
    out.push(0.0);
    let mut acc = 0.0;
    for (i, r) in records.iter().enumerate() {
        acc += r.summand;
        out.push(acc / ((i + 1) as f64).powf(delta));
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HittingTimeSeries {
    pub target: f64,
    /// Visit indices `n_k`, increasing, with `n_1 = 0`.
    pub n_k: Vec<u64>,
    /// `S_{n_k} = n_{k+1} − n_k`; one shorter than `n_k`.
    #[serde(rename = "S")]
    pub s: Vec<u64>,
}

/// Indices where `θ̃[n] < target`, each visit counted separately, and the
/// gaps between them. Index 0 is always the first visit.
pub fn hitting_times(theta_tilde: &[f64], target: f64) -> HittingTimeSeries {
    let mut n_k: Vec<u64> = Vec::new();
    for (n, &x) in theta_tilde.iter().enumerate() {
        if n == 0 || x < target {
            n_k.push(n as u64);
        }
    }
    let s = n_k.windows(2).map(|w| w[1] - w[0]).collect();
    HittingTimeSeries { target, n_k, s }
}

/// `F[n] = Σ_{i=n_k}^{n−1} capped_i` for `n = n_k..=N`.
pub fn f_process(capped: &[f64], n_k: u64) -> Result<Vec<f64>> {
    let start = n_k as usize;
    if start > capped.len() {
        return Err(Error::Config(format!(
            "visit index {n_k} beyond series of {} frames",
            capped.len()
        )));
    }
    let mut out = Vec::with_capacity(capped.len() - start + 1);
    let mut acc = 0.0;
    out.push(0.0);
    for c in &capped[start..] {
        acc += c;
        out.push(acc);
    }
    Ok(out)
}

/// Counts frames `n ∈ (n_k, n_{k+1}]` with `θ̃[n] ≥ target` but `F[n] < 0`.
/// The excursion after the last visit runs to the end of the series.
pub fn comparison_violations(series: &TruncatedSeries, hits: &HittingTimeSeries) -> Result<usize> {
    let last = series.theta_tilde.len().saturating_sub(1) as u64;
    let mut violations = 0;
    for (k, &start) in hits.n_k.iter().enumerate() {
        let end = hits.n_k.get(k + 1).copied().unwrap_or(last);
        let f = f_process(&series.capped, start)?;
        for n in start + 1..=end {
            let tilde = series.theta_tilde[n as usize];
            if tilde >= hits.target && f[(n - start) as usize] < 0.0 {
                violations += 1;
            }
        }
    }
    Ok(violations)
}

/// One row of the per-frame diagnostics table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticRow {
    pub n: u64,
    pub theta_hat: f64,
    pub theta: f64,
    pub theta_tilde: f64,
    pub q_norm: f64,
    #[serde(rename = "K")]
    pub k: f64,
    pub flag_a: bool,
    pub flag_b: bool,
    pub flag_e: bool,
}

/// Joins the per-frame series into rows; row `n` describes the state at the
/// start of frame `n` and that frame's `K` and flags.
pub fn diagnostic_rows(
    records: &[FrameRecord],
    levels: &[f64],
    params: &TruncationParams,
) -> Result<Vec<DiagnosticRow>> {
    let series = truncated_series(records, levels, params)?;
    let hats = theta_hat_series(records, params.delta);
    Ok(records
        .iter()
        .enumerate()
        .zip(pre_frame_states(records, levels.len()))
        .map(|((i, rec), (theta, queues))| DiagnosticRow {
            n: rec.n,
            theta_hat: hats[i],
            theta,
            theta_tilde: series.theta_tilde[i],
            q_norm: norm(&queues),
            k: series.k[i],
            flag_a: series.flags[i].a,
            flag_b: series.flags[i].b,
            flag_e: series.flags[i].e,
        })
        .collect())
}
