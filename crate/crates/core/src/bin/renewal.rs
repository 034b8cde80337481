use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use renewal_opt::harness::{
    self, io, BoundInputsConfig, DiagnoseInputs, ModelSelection, RunConfig, SweepConfig, ThetaMax,
};
use renewal_opt::{oracle, ControllerParams, Error, Result};

#[derive(Parser)]
#[command(
    name = "renewal",
    version,
    about = "Online control of constrained renewal systems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the controller once and print the summary as JSON.
    Run {
        #[arg(long, default_value = "file")]
        model: ModelSelection,
        #[arg(long, default_value_t = harness::config::DEFAULT_FRAMES)]
        frames: u64,
        /// Stop once this many slots have elapsed instead of after --frames.
        #[arg(long)]
        slot_budget: Option<f64>,
        #[arg(long = "V", allow_negative_numbers = true, default_value_t = renewal_opt::controller::DEFAULT_V)]
        v: f64,
        #[arg(long, allow_negative_numbers = true, default_value_t = renewal_opt::controller::DEFAULT_DELTA)]
        delta: f64,
        #[arg(long, default_value = "auto")]
        theta_max: ThetaMax,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also write per-frame records.
        #[arg(long)]
        records: bool,
        /// Also write records, the diagnostics table and hitting times.
        #[arg(long)]
        diagnostics: bool,
        #[arg(long)]
        eta: Option<f64>,
        #[arg(long = "B")]
        b: Option<f64>,
        #[arg(long)]
        xi: Option<f64>,
        /// Output path prefix.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a (V, delta, replication) grid from a JSON config and write CSV.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// CSV destination; defaults to `<base.output>.sweep.csv`, else stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the optimal stationary policy as JSON.
    Oracle {
        #[arg(long, default_value = "file")]
        model: ModelSelection,
    },
    /// Analyse a records CSV produced by `run --records`.
    Diagnose {
        #[arg(long)]
        records: PathBuf,
        #[arg(long)]
        eta: Option<f64>,
        #[arg(long = "B")]
        b: Option<f64>,
        #[arg(long)]
        xi: Option<f64>,
        /// Model the records came from; supplies c, theta* and defaults.
        #[arg(long, default_value = "file")]
        model: ModelSelection,
        #[arg(long = "V", allow_negative_numbers = true, default_value_t = renewal_opt::controller::DEFAULT_V)]
        v: f64,
        #[arg(long, allow_negative_numbers = true, default_value_t = renewal_opt::controller::DEFAULT_DELTA)]
        delta: f64,
        #[arg(long, default_value = "auto")]
        theta_max: ThetaMax,
        /// Hitting-time target is theta* plus this offset.
        #[arg(long, default_value_t = renewal_opt::diagnostics::DEFAULT_TARGET_OFFSET)]
        target_offset: f64,
        /// Prefix for the diagnostics CSV and hitting-time JSON.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn bound_inputs(
    model: &ModelSelection,
    eta: Option<f64>,
    b: Option<f64>,
    xi: Option<f64>,
) -> Result<Option<BoundInputsConfig>> {
    match (eta, b, xi) {
        (Some(eta), Some(b), Some(xi)) => Ok(Some(BoundInputsConfig { eta, b, xi })),
        (None, None, None) => Ok(None),
        _ => {
            let defaults = model.default_bound_inputs()?.ok_or_else(|| {
                Error::Config("give all of --eta, --B and --xi for this model".into())
            })?;
            Ok(Some(BoundInputsConfig {
                eta: eta.unwrap_or(defaults.eta),
                b: b.unwrap_or(defaults.b),
                xi: xi.unwrap_or(defaults.xi),
            }))
        }
    }
}

fn print_json<T: serde::Serialize>(value: &T) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

fn execute(cmd: Command) -> Result<()> {
    match cmd {
        Command::Run {
            model,
            frames,
            slot_budget,
            v,
            delta,
            theta_max,
            seed,
            records,
            diagnostics,
            eta,
            b,
            xi,
            out,
        } => {
            let bound = bound_inputs(&model, eta, b, xi)?;
            let config = RunConfig {
                model,
                frames,
                slot_budget,
                v,
                delta,
                theta_max,
                seed,
                output: out,
                records,
                diagnostics,
                bound_inputs: bound,
            };
            print_json(&harness::run(&config)?.summary)
        }
        Command::Sweep { config, out } => {
            let cfg = SweepConfig::from_path(&config)?;
            let model = cfg.base.model.load()?;
            let rows = harness::sweep_with_model(&cfg, model.as_ref())?;
            let failed = rows.iter().filter(|r| r.result.is_err()).count();
            let nl = model.num_constraints();
            let dest = out.or_else(|| {
                cfg.base
                    .output
                    .as_ref()
                    .map(|p| io::with_suffix(p, ".sweep.csv"))
            });
            match dest {
                Some(path) => {
                    io::write_sweep_file(&path, &rows, nl)?;
                    eprintln!("wrote {} rows to {}", rows.len(), path.display());
                }
                None => io::write_sweep(std::io::stdout().lock(), &rows, nl)?,
            }
            if failed > 0 {
                eprintln!("{failed} sweep point(s) failed");
            }
            Ok(())
        }
        Command::Oracle { model } => {
            let m = model.load()?;
            print_json(&oracle::solve_model(m.as_ref())?)
        }
        Command::Diagnose {
            records,
            eta,
            b,
            xi,
            model,
            v,
            delta,
            theta_max,
            target_offset,
            out,
        } => {
            let m = model.load()?;
            let bound = bound_inputs(&model, eta, b, xi)?
                .or(model.default_bound_inputs()?)
                .ok_or_else(|| Error::Config("give --eta, --B and --xi for this model".into()))?;
            let (recs, nl) = io::read_records_file(&records)?;
            if nl != m.num_constraints() {
                return Err(Error::Dimension {
                    what: "records resource columns",
                    expected: m.num_constraints(),
                    got: nl,
                });
            }
            let params = ControllerParams::new(v, delta, theta_max.resolve(m.as_ref())?)?;
            let theta_star = oracle::solve_model(m.as_ref())?.theta_star.ok_or_else(|| {
                Error::Config("model is infeasible; no hitting-time target".into())
            })?;
            let report = harness::diagnose(&DiagnoseInputs {
                records: &recs,
                levels: m.constraint_levels(),
                params,
                bound,
                theta_star: theta_star + m.penalty_shift(),
                target_offset,
            })?;
            if let Some(prefix) = out {
                io::write_diagnostics_file(
                    &io::with_suffix(&prefix, ".diagnostics.csv"),
                    &report.rows,
                )?;
                io::write_json(&io::with_suffix(&prefix, ".hitting.json"), &report.hitting)?;
            }
            print_json(&report)
        }
    }
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
