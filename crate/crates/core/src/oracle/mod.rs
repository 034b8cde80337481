//! Exact offline baseline over randomized stationary policies.
//!
//! For a finite model the best ratio `E[ŷ]/E[T̂]` subject to
//! `E[ẑ_l]/E[T̂] ≤ c_l` is a linear fractional program in the policy
//! `p(a|e)`. The Charnes–Cooper substitution `w(e,a) = P(e)·p(a|e)·t`,
//! `t = 1/E[T̂]` turns it into an LP, which [`simplex`] solves exactly.

pub mod simplex;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::RenewalModel;
use simplex::{simplex_solve, LinearProgram, LpStatus, Relation};

/// Tabulated expectations of a finite model.
#[derive(Debug, Clone, PartialEq)]
pub struct LfpInstance {
    pub probs: Vec<f64>,
    /// `y_hat[e][a]`
    pub y_hat: Vec<Vec<f64>>,
    pub t_hat: Vec<Vec<f64>>,
    /// `z_hat[e][a][l]`
    pub z_hat: Vec<Vec<Vec<f64>>>,
    pub levels: Vec<f64>,
}

impl LfpInstance {
    pub fn num_events(&self) -> usize {
        self.probs.len()
    }

    pub fn num_actions(&self) -> usize {
        self.y_hat.first().map_or(0, Vec::len)
    }

    pub fn num_constraints(&self) -> usize {
        self.levels.len()
    }

    fn var(&self, e: usize, a: usize) -> usize {
        e * self.num_actions() + a
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OracleStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

/// Objective and resource ratios of a stationary policy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolicyRatios {
    pub objective: f64,
    pub constraints: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleSolution {
    pub theta_star: Option<f64>,
    /// Row-stochastic `policy[e][a] = p(a|e)`; empty unless optimal.
    pub policy: Vec<Vec<f64>>,
    pub status: OracleStatus,
    pub achieved_ratios: Option<PolicyRatios>,
}

/// Tabulates `(ŷ, T̂, ẑ)` for every `(event, action)` pair. Penalties are
/// taken unshifted.
pub fn build_lfp(model: &dyn RenewalModel) -> Result<LfpInstance> {
    let (ne, na, nl) = (
        model.num_events(),
        model.num_actions(),
        model.num_constraints(),
    );
    if ne == 0 || na == 0 {
        return Err(Error::Model("model has no events or no actions".into()));
    }
    let mut inst = LfpInstance {
        probs: model.event_probabilities().to_vec(),
        y_hat: vec![vec![0.0; na]; ne],
        t_hat: vec![vec![0.0; na]; ne],
        z_hat: vec![vec![Vec::new(); na]; ne],
        levels: model.constraint_levels().to_vec(),
    };
    for e in 0..ne {
        for a in 0..na {
            let p = model.expectations(e, a)?;
            let finite =
                p.y_hat.is_finite() && p.t_hat.is_finite() && p.z_hat.iter().all(|z| z.is_finite());
            if !finite || p.t_hat < 1.0 || p.z_hat.len() != nl {
                return Err(Error::Table {
                    event: model.event_label(e),
                    action: model.action_label(a),
                    reason: "expectations must be finite with t_hat >= 1 and L resources".into(),
                });
            }
            inst.y_hat[e][a] = p.y_hat;
            inst.t_hat[e][a] = p.t_hat;
            inst.z_hat[e][a] = p.z_hat;
        }
    }
    Ok(inst)
}

/// LP over `w(e,a) ≥ 0` (index `e·A + a`) and `t ≥ 0` (last index):
///
/// ```text
/// min   Σ w(e,a)·ŷ(e,a)
/// s.t.  Σ w(e,a)·T̂(e,a)                  = 1
///       Σ w(e,a)·(ẑ_l(e,a) − c_l·T̂(e,a)) ≤ 0      for each l
///       Σ_a w(e,a) − P(e)·t              = 0      for each e
/// ```
pub fn charnes_cooper(inst: &LfpInstance) -> LinearProgram {
    let (ne, na) = (inst.num_events(), inst.num_actions());
    let nv = ne * na + 1;
    let t_var = nv - 1;

    let mut objective = vec![0.0; nv];
    let mut normalization = vec![0.0; nv];
    for e in 0..ne {
        for a in 0..na {
            objective[inst.var(e, a)] = inst.y_hat[e][a];
            normalization[inst.var(e, a)] = inst.t_hat[e][a];
        }
    }
    let mut lp = LinearProgram::new(objective);
    lp.add(normalization, Relation::Eq, 1.0);

    for (l, &c) in inst.levels.iter().enumerate() {
        let mut row = vec![0.0; nv];
        for e in 0..ne {
            for a in 0..na {
                row[inst.var(e, a)] = inst.z_hat[e][a][l] - c * inst.t_hat[e][a];
            }
        }
        lp.add(row, Relation::Le, 0.0);
    }

    for e in 0..ne {
        let mut row = vec![0.0; nv];
        for a in 0..na {
            row[inst.var(e, a)] = 1.0;
        }
        row[t_var] = -inst.probs[e];
        lp.add(row, Relation::Eq, 0.0);
    }
    lp
}

/// Objective and constraint ratios of `policy` (`policy[e][a] = p(a|e)`).
pub fn evaluate_policy(inst: &LfpInstance, policy: &[Vec<f64>]) -> Result<PolicyRatios> {
    if policy.len() != inst.num_events() {
        return Err(Error::Dimension {
            what: "policy rows",
            expected: inst.num_events(),
            got: policy.len(),
        });
    }
    let nl = inst.num_constraints();
    let (mut num_y, mut den) = (0.0, 0.0);
    let mut num_z = vec![0.0; nl];
    for (e, row) in policy.iter().enumerate() {
        if row.len() != inst.num_actions() {
            return Err(Error::Dimension {
                what: "policy row",
                expected: inst.num_actions(),
                got: row.len(),
            });
        }
        for (a, &p) in row.iter().enumerate() {
            let w = inst.probs[e] * p;
            num_y += w * inst.y_hat[e][a];
            den += w * inst.t_hat[e][a];
            for (nz, z) in num_z.iter_mut().zip(&inst.z_hat[e][a]) {
                *nz += w * z;
            }
        }
    }
    Ok(PolicyRatios {
        objective: num_y / den,
        constraints: num_z.iter().map(|z| z / den).collect(),
    })
}

/// Solves the fractional program and recovers the optimal policy.
pub fn solve(inst: &LfpInstance) -> Result<OracleSolution> {
    let lp = charnes_cooper(inst);
    let sol = simplex_solve(&lp)?;
    match sol.status {
        LpStatus::Infeasible => {
            return Ok(OracleSolution {
                theta_star: None,
                policy: Vec::new(),
                status: OracleStatus::Infeasible,
                achieved_ratios: None,
            })
        }
        LpStatus::Unbounded => {
            return Err(Error::Internal(
                "fractional program reported unbounded despite T̂ ≥ 1 normalization".into(),
            ))
        }
        LpStatus::Optimal => {}
    }

    let (ne, na) = (inst.num_events(), inst.num_actions());
    let t = sol.x[ne * na];
    if !(t > 0.0) {
        return Err(Error::Internal(format!(
            "scaling variable t = {t} at optimum"
        )));
    }
    let policy: Vec<Vec<f64>> = (0..ne)
        .map(|e| {
            let mass = inst.probs[e] * t;
            if mass > 0.0 {
                let mut row: Vec<f64> = (0..na)
                    .map(|a| (sol.x[inst.var(e, a)] / mass).max(0.0))
                    .collect();
                let total: f64 = row.iter().sum();
                row.iter_mut().for_each(|p| *p /= total);
                row
            } else {
                // Zero-probability events never occur; any row will do.
                let mut row = vec![0.0; na];
                row[0] = 1.0;
                row
            }
        })
        .collect();
    let achieved = evaluate_policy(inst, &policy)?;
    Ok(OracleSolution {
        theta_star: Some(sol.objective),
        policy,
        status: OracleStatus::Optimal,
        achieved_ratios: Some(achieved),
    })
}

/// [`build_lfp`] followed by [`solve`].
pub fn solve_model(model: &dyn RenewalModel) -> Result<OracleSolution> {
    solve(&build_lfp(model)?)
}
