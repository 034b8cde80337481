//! Dense two-phase tableau simplex with Bland's rule.
//!
//! Handles `min cᵀx` subject to rows `aᵀx {≤, ≥, =} b` and `x ≥ 0`. Sized
//! for the small programs produced by the Charnes–Cooper reduction; no
//! attempt is made at sparsity or numerical refactorization.

#![allow(clippy::needless_range_loop)]

use crate::error::{Error, Result};

/// Phase-1 objective above this means the program is infeasible.
pub const FEASIBILITY_TOLERANCE: f64 = 1e-9;
/// Reduced costs above `-OPTIMALITY_TOLERANCE` count as nonnegative.
pub const OPTIMALITY_TOLERANCE: f64 = 1e-9;
const PIVOT_TOLERANCE: f64 = 1e-12;
const MAX_PIVOTS: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub coeffs: Vec<f64>,
    pub relation: Relation,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct LinearProgram {
    /// Cost vector; its length fixes the number of variables.
    pub objective: Vec<f64>,
    pub constraints: Vec<Constraint>,
}

impl LinearProgram {
    pub fn new(objective: Vec<f64>) -> Self {
        Self {
            objective,
            constraints: Vec::new(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn add(&mut self, coeffs: Vec<f64>, relation: Relation, rhs: f64) -> &mut Self {
        self.constraints.push(Constraint {
            coeffs,
            relation,
            rhs,
        });
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Basic solution; meaningful only when `status` is optimal.
    pub x: Vec<f64>,
    pub objective: f64,
}

struct Tableau {
    rows: Vec<Vec<f64>>,
    /// Reduced costs; the last entry holds minus the objective value.
    costs: Vec<f64>,
    basis: Vec<usize>,
    /// Columns that may enter the basis.
    allowed: Vec<bool>,
}

impl Tableau {
    fn rhs_col(&self) -> usize {
        self.costs.len() - 1
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let width = self.costs.len();
        let p = self.rows[row][col];
        for j in 0..width {
            self.rows[row][j] /= p;
        }
        let pivot_row = self.rows[row].clone();
        for (i, r) in self.rows.iter_mut().enumerate() {
            if i == row {
                continue;
            }
            let f = r[col];
            if f != 0.0 {
                for j in 0..width {
                    r[j] -= f * pivot_row[j];
                }
            }
        }
        let f = self.costs[col];
        if f != 0.0 {
            for j in 0..width {
                self.costs[j] -= f * pivot_row[j];
            }
        }
        self.basis[row] = col;
    }

    /// Bland's rule iterations until optimal or unbounded.
    fn optimize(&mut self) -> Result<LpStatus> {
        let rhs = self.rhs_col();
        for _ in 0..MAX_PIVOTS {
            let entering =
                (0..rhs).find(|&j| self.allowed[j] && self.costs[j] < -OPTIMALITY_TOLERANCE);
            let Some(col) = entering else {
                return Ok(LpStatus::Optimal);
            };
            let mut leaving: Option<(usize, f64)> = None;
            for (i, r) in self.rows.iter().enumerate() {
                let a = r[col];
                if a > PIVOT_TOLERANCE {
                    let ratio = r[rhs] / a;
                    let better = match leaving {
                        None => true,
                        Some((k, best)) => {
                            ratio < best || (ratio == best && self.basis[i] < self.basis[k])
                        }
                    };
                    if better {
                        leaving = Some((i, ratio));
                    }
                }
            }
            match leaving {
                Some((row, _)) => self.pivot(row, col),
                None => return Ok(LpStatus::Unbounded),
            }
        }
        Err(Error::Internal(format!(
            "simplex did not terminate within {MAX_PIVOTS} pivots"
        )))
    }

    fn set_costs(&mut self, cost: &[f64]) {
        let rhs = self.rhs_col();
        self.costs.iter_mut().for_each(|c| *c = 0.0);
        self.costs[..cost.len()].copy_from_slice(cost);
        for (i, r) in self.rows.iter().enumerate() {
            let cb = cost.get(self.basis[i]).copied().unwrap_or(0.0);
            if cb != 0.0 {
                for j in 0..=rhs {
                    self.costs[j] -= cb * r[j];
                }
            }
        }
    }
}

/// Solves `lp` by phase-1 / phase-2 simplex.
pub fn simplex_solve(lp: &LinearProgram) -> Result<LpSolution> {
    let n = lp.num_vars();
    for c in &lp.constraints {
        if c.coeffs.len() != n {
            return Err(Error::Dimension {
                what: "constraint row",
                expected: n,
                got: c.coeffs.len(),
            });
        }
    }

    // Normalize to nonnegative right-hand sides.
    let rows: Vec<(Vec<f64>, Relation, f64)> = lp
        .constraints
        .iter()
        .map(|c| {
            if c.rhs < 0.0 {
                let flipped = match c.relation {
                    Relation::Le => Relation::Ge,
                    Relation::Ge => Relation::Le,
                    Relation::Eq => Relation::Eq,
                };
                (c.coeffs.iter().map(|a| -a).collect(), flipped, -c.rhs)
            } else {
                (c.coeffs.clone(), c.relation, c.rhs)
            }
        })
        .collect();

    let m = rows.len();
    let num_slack = rows.iter().filter(|r| r.1 != Relation::Eq).count();
    let num_art = rows.iter().filter(|r| r.1 != Relation::Le).count();
    let art_start = n + num_slack;
    let width = art_start + num_art + 1;

    let mut tab = Tableau {
        rows: Vec::with_capacity(m),
        costs: vec![0.0; width],
        basis: Vec::with_capacity(m),
        allowed: vec![true; width - 1],
    };
    let (mut slack, mut art) = (n, art_start);
    for (coeffs, relation, rhs) in rows {
        let mut row = vec![0.0; width];
        row[..n].copy_from_slice(&coeffs);
        row[width - 1] = rhs;
        match relation {
            Relation::Le => {
                row[slack] = 1.0;
                tab.basis.push(slack);
                slack += 1;
            }
            Relation::Ge => {
                row[slack] = -1.0;
                row[art] = 1.0;
                tab.basis.push(art);
                slack += 1;
                art += 1;
            }
            Relation::Eq => {
                row[art] = 1.0;
                tab.basis.push(art);
                art += 1;
            }
        }
        tab.rows.push(row);
    }

    if num_art > 0 {
        let mut phase1 = vec![0.0; width - 1];
        phase1[art_start..].iter_mut().for_each(|c| *c = 1.0);
        tab.set_costs(&phase1);
        if tab.optimize()? != LpStatus::Optimal {
            return Err(Error::Internal("phase 1 reported an unbounded ray".into()));
        }
        let infeasibility = -tab.costs[width - 1];
        if infeasibility > FEASIBILITY_TOLERANCE {
            return Ok(LpSolution {
                status: LpStatus::Infeasible,
                x: vec![0.0; n],
                objective: f64::NAN,
            });
        }
        // Drive zero-valued artificials out of the basis; rows where that is
        // impossible are linearly dependent and get dropped.
        let mut i = 0;
        while i < tab.rows.len() {
            if tab.basis[i] >= art_start {
                let col = (0..art_start).find(|&j| tab.rows[i][j].abs() > PIVOT_TOLERANCE);
                match col {
                    Some(j) => tab.pivot(i, j),
                    None => {
                        tab.rows.remove(i);
                        tab.basis.remove(i);
                        continue;
                    }
                }
            }
            i += 1;
        }
        tab.allowed[art_start..].iter_mut().for_each(|a| *a = false);
    }

    tab.set_costs(&lp.objective);
    let status = tab.optimize()?;
    let mut x = vec![0.0; n];
    for (i, &b) in tab.basis.iter().enumerate() {
        if b < n {
            x[b] = tab.rows[i][width - 1];
        }
    }
    let objective = match status {
        LpStatus::Optimal => lp.objective.iter().zip(&x).map(|(c, v)| c * v).sum(),
        LpStatus::Unbounded => f64::NEG_INFINITY,
        LpStatus::Infeasible => f64::NAN,
    };
    Ok(LpSolution {
        status,
        x,
        objective,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_variable_lower_bound() {
        let mut lp = LinearProgram::new(vec![1.0]);
        lp.add(vec![1.0], Relation::Ge, 1.0);
        let sol = simplex_solve(&lp).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.x[0] - 1.0).abs() < 1e-12);
        assert!((sol.objective - 1.0).abs() < 1e-12);
    }

    #[test]
    fn negative_upper_bound_is_infeasible() {
        let mut lp = LinearProgram::new(vec![1.0]);
        lp.add(vec![1.0], Relation::Le, -1.0);
        lp.add(vec![1.0], Relation::Ge, 0.0);
        assert_eq!(simplex_solve(&lp).unwrap().status, LpStatus::Infeasible);
    }

    #[test]
    fn unbounded_ray_detected() {
        let mut lp = LinearProgram::new(vec![-1.0, 0.0]);
        lp.add(vec![1.0, -1.0], Relation::Le, 1.0);
        assert_eq!(simplex_solve(&lp).unwrap().status, LpStatus::Unbounded);
    }

    #[test]
    fn textbook_maximization() {
        // max 3x + 5y s.t. x ≤ 4, 2y ≤ 12, 3x + 2y ≤ 18 → (2, 6), value 36.
        let mut lp = LinearProgram::new(vec![-3.0, -5.0]);
        lp.add(vec![1.0, 0.0], Relation::Le, 4.0)
            .add(vec![0.0, 2.0], Relation::Le, 12.0)
            .add(vec![3.0, 2.0], Relation::Le, 18.0);
        let sol = simplex_solve(&lp).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.objective + 36.0).abs() < 1e-9);
        assert!((sol.x[0] - 2.0).abs() < 1e-9 && (sol.x[1] - 6.0).abs() < 1e-9);
    }

    #[test]
    fn redundant_equalities_are_dropped() {
        let mut lp = LinearProgram::new(vec![1.0, 2.0]);
        lp.add(vec![1.0, 1.0], Relation::Eq, 1.0)
            .add(vec![2.0, 2.0], Relation::Eq, 2.0);
        let sol = simplex_solve(&lp).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.objective - 1.0).abs() < 1e-12);
    }

    #[test]
    fn degenerate_cycling_example_terminates() {
        // Beale's example cycles under the largest-coefficient rule.
        let mut lp = LinearProgram::new(vec![-0.75, 150.0, -0.02, 6.0]);
        lp.add(vec![0.25, -60.0, -0.04, 9.0], Relation::Le, 0.0)
            .add(vec![0.5, -90.0, -0.02, 3.0], Relation::Le, 0.0)
            .add(vec![0.0, 0.0, 1.0, 0.0], Relation::Le, 1.0);
        let sol = simplex_solve(&lp).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.objective + 0.05).abs() < 1e-9);
    }

    #[test]
    fn row_length_checked() {
        let mut lp = LinearProgram::new(vec![1.0, 1.0]);
        lp.add(vec![1.0], Relation::Le, 1.0);
        assert!(simplex_solve(&lp).is_err());
    }
}
