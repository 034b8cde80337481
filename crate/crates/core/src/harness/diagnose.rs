use serde::{Deserialize, Serialize};

use super::config::BoundInputsConfig;
use crate::controller::{ControllerParams, FrameRecord};
use crate::diagnostics::{
    bound_constants, comparison_violations, diagnostic_rows, hitting_times, truncated_series,
    BoundConstants, BoundInputs, DiagnosticRow, HittingTimeSeries, TruncationParams,
};
use crate::error::Result;

pub struct DiagnoseInputs<'a> {
    pub records: &'a [FrameRecord],
    pub levels: &'a [f64],
    pub params: ControllerParams,
    pub bound: BoundInputsConfig,
    /// Optimal ratio in the controller's (shifted) units.
    pub theta_star: f64,
    /// Hitting-time target is `theta_star + target_offset`.
    pub target_offset: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnoseReport {
    pub constants: BoundConstants,
    #[serde(skip)]
    pub rows: Vec<DiagnosticRow>,
    pub hitting: HittingTimeSeries,
    pub truncation_events: usize,
    /// Frames where `θ̃[n]` sits at or above the target but the partial sum
    /// `F[n]` since the last visit is negative. Always zero for a correct
    /// record series.
    pub comparison_violations: usize,
}

pub fn diagnose(inp: &DiagnoseInputs<'_>) -> Result<DiagnoseReport> {
    let constants = bound_constants(&BoundInputs {
        eta: inp.bound.eta,
        b: inp.bound.b,
        xi: inp.bound.xi,
        v: inp.params.v,
        theta_max: inp.params.theta_max,
        num_constraints: inp.levels.len(),
    })?;
    let tp = TruncationParams {
        eta: inp.bound.eta,
        r: constants.r,
        v: inp.params.v,
        delta: inp.params.delta,
    };
    let series = truncated_series(inp.records, inp.levels, &tp)?;
    let hitting = hitting_times(&series.theta_tilde, inp.theta_star + inp.target_offset);
    let violations = comparison_violations(&series, &hitting)?;
    Ok(DiagnoseReport {
        constants,
        rows: diagnostic_rows(inp.records, inp.levels, &tp)?,
        truncation_events: series.flags.iter().filter(|f| f.any()).count(),
        comparison_violations: violations,
        hitting,
    })
}
