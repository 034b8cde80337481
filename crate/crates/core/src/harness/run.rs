use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::config::RunConfig;
use super::diagnose::{diagnose, DiagnoseInputs};
use super::io;
use super::rng::run_rng;
use crate::controller::{ControllerParams, ControllerState, FrameRecord};
use crate::error::{Error, Result};
use crate::models::RenewalModel;

/// Time averages of one run. Ratios are taken over slots, not frames.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    /// `Σy / ΣT`, in model units (no penalty shift).
    pub avg_penalty_ratio: f64,
    /// `Σz_l / ΣT` per resource.
    pub avg_resource_ratios: Vec<f64>,
    /// `(1/N)·Σ_{n<N} ‖Q[n]‖`.
    pub avg_queue: f64,
    pub final_theta: f64,
    pub frames: u64,
    pub slots: f64,
    pub wall_time_secs: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Budget {
    Frames(u64),
    /// Run until `ΣT` reaches this many slots.
    Slots(f64),
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub summary: RunSummary,
    /// Empty unless records were requested.
    pub records: Vec<FrameRecord>,
    pub state: ControllerState,
}

/// Runs the controller on `model` from a fresh state.
pub fn simulate(
    model: &dyn RenewalModel,
    params: ControllerParams,
    budget: Budget,
    seed: u64,
    keep_records: bool,
) -> Result<RunOutcome> {
    let start = Instant::now();
    let nl = model.num_constraints();
    let mut state = ControllerState::new(params, model.constraint_levels().to_vec())?;
    let mut rng = run_rng(seed);
    let mut records = Vec::new();
    let (mut sum_y, mut slots, mut sum_q) = (0.0, 0.0, 0.0);
    let mut sum_z = vec![0.0; nl];

    loop {
        let done = match budget {
            Budget::Frames(n) => state.frame() >= n,
            Budget::Slots(s) => slots >= s,
        };
        if done {
            break;
        }
        sum_q += state.queue_norm();
        let rec = state.step(model, &mut rng)?;
        sum_y += rec.y;
        slots += rec.t;
        for (acc, z) in sum_z.iter_mut().zip(&rec.z) {
            *acc += z;
        }
        if keep_records {
            records.push(rec);
        }
    }

    let frames = state.frame();
    if frames == 0 {
        return Err(Error::Config("run budget allows no frames".into()));
    }
    let summary = RunSummary {
        avg_penalty_ratio: sum_y / slots,
        avg_resource_ratios: sum_z.iter().map(|z| z / slots).collect(),
        avg_queue: sum_q / frames as f64,
        final_theta: state.theta(),
        frames,
        slots,
        wall_time_secs: start.elapsed().as_secs_f64(),
    };
    Ok(RunOutcome {
        summary,
        records,
        state,
    })
}

/// Controller parameters for `config` on an already loaded model.
pub fn resolve_params(config: &RunConfig, model: &dyn RenewalModel) -> Result<ControllerParams> {
    ControllerParams::new(config.v, config.delta, config.theta_max.resolve(model)?)
}

fn budget(config: &RunConfig) -> Budget {
    match config.slot_budget {
        Some(s) => Budget::Slots(s),
        None => Budget::Frames(config.frames),
    }
}

/// Runs `config` against an already loaded model without writing files.
pub fn run_with_model(
    config: &RunConfig,
    model: &dyn RenewalModel,
    seed: u64,
) -> Result<RunOutcome> {
    config.validate()?;
    let params = resolve_params(config, model)?;
    simulate(
        model,
        params,
        budget(config),
        seed,
        config.records || config.diagnostics,
    )
}

/// Loads the model, runs, and writes `<output>.summary.json` plus, when
/// requested, `<output>.records.csv`, `<output>.diagnostics.csv` and
/// `<output>.hitting.json`.
pub fn run(config: &RunConfig) -> Result<RunOutcome> {
    config.validate()?;
    let model = config.model.load()?;
    let outcome = run_with_model(config, model.as_ref(), config.seed)?;
    let Some(prefix) = &config.output else {
        return Ok(outcome);
    };
    let nl = model.num_constraints();
    io::write_json(&io::with_suffix(prefix, ".summary.json"), &outcome.summary)?;
    if config.records || config.diagnostics {
        io::write_records_file(
            &io::with_suffix(prefix, ".records.csv"),
            &outcome.records,
            nl,
        )?;
    }
    if config.diagnostics {
        let bound = match config.bound_inputs {
            Some(b) => b,
            None => config.model.default_bound_inputs()?.ok_or_else(|| {
                Error::Config(
                    "diagnostics on a synthetic model need bound_inputs (eta, B, xi)".into(),
                )
            })?,
        };
        let oracle = crate::oracle::solve_model(model.as_ref())?;
        let theta_star = oracle
            .theta_star
            .ok_or_else(|| Error::Config("model is infeasible; no hitting-time target".into()))?;
        let report = diagnose(&DiagnoseInputs {
            records: &outcome.records,
            levels: model.constraint_levels(),
            params: *outcome.state.params(),
            bound,
            theta_star: theta_star + model.penalty_shift(),
            target_offset: crate::diagnostics::DEFAULT_TARGET_OFFSET,
        })?;
        io::write_diagnostics_file(&io::with_suffix(prefix, ".diagnostics.csv"), &report.rows)?;
        io::write_json(&io::with_suffix(prefix, ".hitting.json"), &report.hitting)?;
    }
    Ok(outcome)
}
