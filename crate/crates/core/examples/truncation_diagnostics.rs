//! Bound constants, truncation events, hitting times and the comparison
//! check on a recorded run.
//!
//! ```text
//! cargo run --release --example truncation_diagnostics -- [file|file_active] [frames]
//! ```

use std::env;

use renewal_opt::diagnostics::{self, TruncationParams};
use renewal_opt::harness::{diagnose, simulate, Budget, DiagnoseInputs, ModelSelection, ThetaMax};
use renewal_opt::{oracle, ControllerParams};

fn main() -> renewal_opt::Result<()> {
    let sel: ModelSelection = env::args()
        .nth(1)
        .as_deref()
        .unwrap_or("file_active")
        .parse()?;
    let frames: u64 = env::args()
        .nth(2)
        .and_then(|s| s.parse().ok())
        .unwrap_or(20_000);
    let model = sel.load()?;
    let bound = sel
        .default_bound_inputs()?
        .expect("file models have default bound inputs");
    let params = ControllerParams::new(30.0, 0.7, ThetaMax::Auto.resolve(model.as_ref())?)?;
    let theta_star = oracle::solve_model(model.as_ref())?
        .theta_star
        .unwrap_or(0.0);

    let out = simulate(model.as_ref(), params, Budget::Frames(frames), 5, true)?;
    let report = diagnose(&DiagnoseInputs {
        records: &out.records,
        levels: model.constraint_levels(),
        params,
        bound,
        theta_star,
        target_offset: diagnostics::DEFAULT_TARGET_OFFSET,
    })?;

    let c = &report.constants;
    println!("eta={} B={:.4} xi={}", bound.eta, bound.b, bound.xi);
    println!(
        "r={:.3e} rho={:.6} sigma={:.1} C0={:.3} D={:.3e}",
        c.r, c.rho, c.sigma, c.c0, c.d
    );
    if c.is_vacuous() {
        println!("(drift bound is vacuous at these inputs)");
    }
    println!(
        "frames with a truncation event: {}",
        report.truncation_events
    );
    println!(
        "visits below target {:.3}: {}, longest excursion {} frames",
        report.hitting.target,
        report.hitting.n_k.len(),
        report.hitting.s.iter().max().copied().unwrap_or(0)
    );
    println!("comparison violations: {}", report.comparison_violations);

    // Exponential queue moment across a few independent runs.
    let runs: Vec<Vec<f64>> = (0..4)
        .map(|seed| {
            simulate(
                model.as_ref(),
                params,
                Budget::Frames(2_000),
                100 + seed,
                true,
            )
            .map(|o| diagnostics::queue_norms(&o.records))
        })
        .collect::<renewal_opt::Result<_>>()?;
    let moments = diagnostics::empirical_exp_moment(&runs, c.r)?;
    for n in [10usize, 100, 1000, 2000] {
        let m = moments[n];
        println!("E[exp(r|Q[{n}]|)] ~ {:.4} +/- {:.4}", m.mean, m.std_err);
    }

    let trunc = TruncationParams {
        eta: bound.eta,
        r: c.r,
        v: params.v,
        delta: params.delta,
    };
    println!(
        "summand cap at frame 1000: {:.1}",
        trunc.cap(1000, model.num_constraints())
    );
    Ok(())
}
