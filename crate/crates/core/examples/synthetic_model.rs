//! A table-driven model loaded from JSON: oracle optimum and an online run.
//!
//! ```text
//! cargo run --release --example synthetic_model -- [model.json]
//! ```

use std::env;
use std::path::PathBuf;

use renewal_opt::harness::{simulate, Budget, ThetaMax};
use renewal_opt::models::{RenewalModel, SyntheticModel};
use renewal_opt::{oracle, ControllerParams};

fn main() -> renewal_opt::Result<()> {
    let default = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples/data/two_channel.json");
    let path = env::args().nth(1).map_or(default, PathBuf::from);
    let model = SyntheticModel::from_path(&path)?;
    let best = oracle::solve_model(&model)?;
    println!(
        "{}: {} events, {} actions, oracle {:?}",
        path.display(),
        model.num_events(),
        model.num_actions(),
        best.status
    );

    let theta_max = ThetaMax::Auto.resolve(&model)?;
    for v in [10.0, 100.0, 1000.0] {
        let params = ControllerParams::new(v, 0.7, theta_max)?;
        let s = simulate(&model, params, Budget::Frames(100_000), 3, false)?.summary;
        println!(
            "V={v:<6} penalty {:.4} (optimum {:.4})  resource {:?}  queue {:.2}",
            s.avg_penalty_ratio,
            best.theta_star.unwrap_or(f64::NAN),
            s.avg_resource_ratios,
            s.avg_queue
        );
    }
    Ok(())
}
