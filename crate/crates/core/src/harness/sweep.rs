//! Parallel grids over `(V, δ, replication)`.

use rayon::prelude::*;

use super::config::SweepConfig;
use super::rng::derive_seed;
use super::run::{run_with_model, RunSummary};
use crate::error::{Error, Result};
use crate::models::RenewalModel;

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub v: f64,
    pub delta: f64,
    pub rep: usize,
    pub seed: u64,
    /// Failure message when this point did not complete.
    pub result: std::result::Result<RunSummary, String>,
}

/// Runs every grid point on `model`, up to `config.parallelism` at a time.
/// Rows come back sorted by `(V, δ, rep)`; a failing point is reported in
/// its row and does not stop the others.
pub fn sweep_with_model(config: &SweepConfig, model: &dyn RenewalModel) -> Result<Vec<SweepRow>> {
    config.validate()?;
    let jobs: Vec<(usize, usize, usize)> = (0..config.v_list.len())
        .flat_map(|vi| {
            (0..config.delta_list.len())
                .flat_map(move |di| (0..config.replications).map(move |rep| (vi, di, rep)))
        })
        .collect();

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.parallelism)
        .build()
        .map_err(|e| Error::Internal(format!("thread pool: {e}")))?;

    let mut rows: Vec<SweepRow> = pool.install(|| {
        jobs.par_iter()
            .map(|&(vi, di, rep)| {
                let mut point = config.base.clone();
                point.v = config.v_list[vi];
                point.delta = config.delta_list[di];
                point.records = false;
                point.diagnostics = false;
                let seed = derive_seed(config.base.seed, vi, di, rep);
                let result = run_with_model(&point, model, seed)
                    .map(|o| o.summary)
                    .map_err(|e| {
                        log::warn!(
                            "sweep point V={} delta={} rep={rep} failed: {e}",
                            point.v,
                            point.delta
                        );
                        e.to_string()
                    });
                SweepRow {
                    v: point.v,
                    delta: point.delta,
                    rep,
                    seed,
                    result,
                }
            })
            .collect()
    });
    rows.sort_by(|a, b| {
        a.v.total_cmp(&b.v)
            .then(a.delta.total_cmp(&b.delta))
            .then(a.rep.cmp(&b.rep))
    });
    Ok(rows)
}

/// Loads the model named in `config.base` and runs the sweep.
pub fn sweep(config: &SweepConfig) -> Result<Vec<SweepRow>> {
    let model = config.base.model.load()?;
    sweep_with_model(config, model.as_ref())
}

/// Mean of a summary column over replications at each `(V, δ)`, in row
/// order. Failed rows are skipped.
pub fn replication_means(
    rows: &[SweepRow],
    column: impl Fn(&RunSummary) -> f64,
) -> Vec<(f64, f64, f64)> {
    let mut out: Vec<(f64, f64, f64)> = Vec::new();
    let mut count = 0usize;
    for row in rows {
        let Ok(s) = &row.result else { continue };
        match out.last_mut() {
            Some(last) if last.0 == row.v && last.1 == row.delta => {
                last.2 += column(s);
                count += 1;
            }
            _ => {
                if let Some(last) = out.last_mut() {
                    last.2 /= count as f64;
                }
                out.push((row.v, row.delta, column(s)));
                count = 1;
            }
        }
    }
    if let Some(last) = out.last_mut() {
        last.2 /= count as f64;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::config::{ModelSelection, RunConfig};
    use crate::harness::run::run_with_model;
    use crate::models::{FileDownloadModel, FilePenalty};

    fn base(frames: u64) -> RunConfig {
        let mut b = RunConfig::new(ModelSelection::FileDownloadActiveSlot);
        b.frames = frames;
        b.seed = 77;
        b
    }

    #[test]
    fn degenerate_sweep_matches_single_run() {
        let model = FileDownloadModel::new(FilePenalty::ActiveSlot);
        let cfg = SweepConfig {
            base: base(2000),
            v_list: vec![100.0],
            delta_list: vec![0.7],
            replications: 1,
            parallelism: 1,
        };
        let rows = sweep_with_model(&cfg, &model).unwrap();
        assert_eq!(rows.len(), 1);
        let single = run_with_model(&cfg.base, &model, cfg.base.seed)
            .unwrap()
            .summary;
        let mut got = rows[0].result.clone().unwrap();
        got.wall_time_secs = single.wall_time_secs;
        assert_eq!(got, single);
    }

    #[test]
    fn rows_sorted_and_counted() {
        let model = FileDownloadModel::new(FilePenalty::ActiveSlot);
        let cfg = SweepConfig {
            base: base(300),
            v_list: vec![30.0, 3.0],
            delta_list: vec![0.9, 0.5],
            replications: 3,
            parallelism: 4,
        };
        let rows = sweep_with_model(&cfg, &model).unwrap();
        assert_eq!(rows.len(), 12);
        assert_eq!((rows[0].v, rows[0].delta, rows[0].rep), (3.0, 0.5, 0));
        assert_eq!((rows[11].v, rows[11].delta, rows[11].rep), (30.0, 0.9, 2));
        let means = replication_means(&rows, |s| s.frames as f64);
        assert_eq!(means.len(), 4);
        assert!(means.iter().all(|m| m.2 == 300.0));
    }

    #[test]
    fn failed_points_are_recorded() {
        let model = FileDownloadModel::default();
        let mut b = base(10);
        b.theta_max = crate::harness::config::ThetaMax::Fixed(1.0);
        let cfg = SweepConfig {
            base: b,
            v_list: vec![1.0],
            delta_list: vec![0.7],
            replications: 2,
            parallelism: 2,
        };
        let rows = sweep_with_model(&cfg, &model).unwrap();
        assert!(rows.iter().all(|r| r.result.is_ok()));
    }
}
