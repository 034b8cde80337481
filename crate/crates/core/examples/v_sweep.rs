//! Penalty, power and queue size against V, averaged over replications.
//!
//! ```text
//! cargo run --release --example v_sweep -- [config.json] [out.csv]
//! ```

use std::env;
use std::path::PathBuf;

use renewal_opt::harness::{io, replication_means, sweep_with_model, SweepConfig};
use renewal_opt::oracle;

fn main() -> renewal_opt::Result<()> {
    let default = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples/data/v_sweep.json");
    let path = env::args().nth(1).map_or(default, PathBuf::from);
    let config = SweepConfig::from_path(&path)?;
    let model = config.base.model.load()?;
    let theta_star = oracle::solve_model(model.as_ref())?
        .theta_star
        .unwrap_or(f64::NAN);

    let rows = sweep_with_model(&config, model.as_ref())?;
    if let Some(out) = env::args().nth(2) {
        io::write_sweep_file(out.as_ref(), &rows, model.num_constraints())?;
    }

    let penalty = replication_means(&rows, |s| s.avg_penalty_ratio);
    let power = replication_means(&rows, |s| s.avg_resource_ratios[0]);
    let queue = replication_means(&rows, |s| s.avg_queue);
    println!("theta* = {theta_star:.4}");
    println!(
        "{:>8} {:>6} {:>10} {:>10} {:>8} {:>10}",
        "V", "delta", "penalty", "gap", "power", "queue"
    );
    for ((p, w), q) in penalty.iter().zip(&power).zip(&queue) {
        println!(
            "{:>8} {:>6} {:>10.5} {:>+10.5} {:>8.4} {:>10.2}",
            p.0,
            p.1,
            p.2,
            p.2 - theta_star,
            w.2,
            q.2
        );
    }
    Ok(())
}
