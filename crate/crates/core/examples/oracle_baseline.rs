//! Optimal stationary randomized policies from the linear-fractional program.

use renewal_opt::models::{FileDownloadModel, FilePenalty, RenewalModel};
use renewal_opt::oracle;

fn show(name: &str, model: &dyn RenewalModel) -> renewal_opt::Result<()> {
    let sol = oracle::solve_model(model)?;
    println!("{name}: status {:?}", sol.status);
    let Some(theta) = sol.theta_star else {
        return Ok(());
    };
    let ratios = sol
        .achieved_ratios
        .as_ref()
        .expect("optimal solutions carry ratios");
    println!(
        "  theta* = {theta:.6}, resource ratio = {:.6}",
        ratios.constraints[0]
    );
    for (e, row) in sol.policy.iter().enumerate() {
        let cells: Vec<String> = row
            .iter()
            .enumerate()
            .filter(|(_, &p)| p > 1e-12)
            .map(|(a, p)| format!("alpha={} w.p. {p:.3}", model.action_label(a)))
            .collect();
        println!("  {:<12} {}", model.event_label(e), cells.join(", "));
    }
    Ok(())
}

fn main() -> renewal_opt::Result<()> {
    show(
        "service-weighted penalty",
        &FileDownloadModel::new(FilePenalty::ServiceWeighted),
    )?;
    show(
        "active-slot penalty",
        &FileDownloadModel::new(FilePenalty::ActiveSlot),
    )
}
