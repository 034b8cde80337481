//! Sensitivity of the penalty gap to the pseudo-average exponent delta.
//!
//! ```text
//! cargo run --release --example delta_sweep -- [config.json]
//! ```

use std::env;
use std::path::PathBuf;

use renewal_opt::harness::{replication_means, sweep_with_model, SweepConfig};
use renewal_opt::oracle;

fn main() -> renewal_opt::Result<()> {
    let default = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples/data/delta_sweep.json");
    let path = env::args().nth(1).map_or(default, PathBuf::from);
    let config = SweepConfig::from_path(&path)?;
    let model = config.base.model.load()?;
    let theta_star = oracle::solve_model(model.as_ref())?
        .theta_star
        .unwrap_or(f64::NAN);

    let rows = sweep_with_model(&config, model.as_ref())?;
    let theta = replication_means(&rows, |s| s.final_theta);
    println!("theta* = {theta_star:.4}");
    println!(
        "{:>8} {:>6} {:>10} {:>12}",
        "V", "delta", "gap", "final theta"
    );
    for ((v, d, p), (_, _, t)) in replication_means(&rows, |s| s.avg_penalty_ratio)
        .into_iter()
        .zip(theta)
    {
        println!("{v:>8} {d:>6} {:>+10.5} {t:>12.4}", p - theta_star);
    }
    Ok(())
}
