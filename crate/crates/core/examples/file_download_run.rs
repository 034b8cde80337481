//! One controller run on the file-download model, compared with the optimal
//! stationary policy.
//!
//! ```text
//! cargo run --release --example file_download_run -- [file|file_active] [V] [delta] [frames]
//! ```

use std::env;

use renewal_opt::harness::{run_with_model, ModelSelection, RunConfig};
use renewal_opt::oracle;

fn main() -> renewal_opt::Result<()> {
    let args: Vec<String> = env::args().skip(1).collect();
    let model_sel: ModelSelection = args.first().map_or("file_active", String::as_str).parse()?;
    let mut config = RunConfig::new(model_sel);
    if let Some(v) = args.get(1) {
        config.v = v
            .parse()
            .map_err(|_| renewal_opt::Error::Config(format!("bad V {v}")))?;
    }
    if let Some(d) = args.get(2) {
        config.delta = d
            .parse()
            .map_err(|_| renewal_opt::Error::Config(format!("bad delta {d}")))?;
    }
    if let Some(n) = args.get(3) {
        config.frames = n
            .parse()
            .map_err(|_| renewal_opt::Error::Config(format!("bad frames {n}")))?;
    }

    let model = config.model.load()?;
    let best = oracle::solve_model(model.as_ref())?;
    let out = run_with_model(&config, model.as_ref(), config.seed)?;
    let s = &out.summary;

    println!(
        "model {}  V={}  delta={}  frames={}",
        config.model, config.v, config.delta, s.frames
    );
    println!("slots            {}", s.slots);
    println!("penalty ratio    {:.5}", s.avg_penalty_ratio);
    if let Some(theta_star) = best.theta_star {
        println!("optimum          {theta_star:.5}");
        println!("gap              {:+.5}", s.avg_penalty_ratio - theta_star);
    }
    println!(
        "power per slot   {:.5}  (budget {})",
        s.avg_resource_ratios[0],
        model.constraint_levels()[0]
    );
    println!("mean queue       {:.3}", s.avg_queue);
    println!("final theta      {:.5}", s.final_theta);
    Ok(())
}
