//! Dense linear programming: a bounded-variable revised primal simplex.

mod simplex;

pub use simplex::{BoundedSimplex, Outcome};

use thiserror::Error;

use crate::tol;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LpError {
    #[error("malformed linear program: {0}")]
    Dimension(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("simplex iteration limit {0} reached")]
    IterationLimit(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LpOptions {
    pub max_iterations: usize,
    /// Consecutive degenerate pivots before switching to Bland's rule.
    pub bland_after: usize,
    pub refactor_every: usize,
}

impl Default for LpOptions {
    fn default() -> Self {
        Self {
            max_iterations: 1_000_000,
            bland_after: 50,
            refactor_every: 100,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
struct Row {
    coeffs: Vec<f64>,
    sense: Sense,
    rhs: f64,
}

/// `max c^T x` subject to dense rows and variable bounds.
///
/// Variables default to `[0, inf)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    objective: Vec<f64>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    rows: Vec<Row>,
}

impl LinearProgram {
    pub fn new(objective: Vec<f64>) -> Self {
        let n = objective.len();
        Self {
            objective,
            lower: vec![0.0; n],
            upper: vec![f64::INFINITY; n],
            rows: Vec::new(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn objective(&self) -> &[f64] {
        &self.objective
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn set_bounds(&mut self, j: usize, lower: f64, upper: f64) {
        self.lower[j] = lower;
        self.upper[j] = upper;
    }

    pub fn add_row(&mut self, coeffs: Vec<f64>, sense: Sense, rhs: f64) -> usize {
        assert_eq!(
            coeffs.len(),
            self.num_vars(),
            "row length must match the variable count"
        );
        self.rows.push(Row { coeffs, sense, rhs });
        self.rows.len() - 1
    }

    pub fn add_sparse_row(&mut self, entries: &[(usize, f64)], sense: Sense, rhs: f64) -> usize {
        let mut coeffs = vec![0.0; self.num_vars()];
        for &(j, a) in entries {
            coeffs[j] += a;
        }
        self.add_row(coeffs, sense, rhs)
    }

    pub fn row(&self, i: usize) -> (&[f64], Sense, f64) {
        let r = &self.rows[i];
        (&r.coeffs, r.sense, r.rhs)
    }

    pub fn objective_value(&self, x: &[f64]) -> f64 {
        self.objective.iter().zip(x).map(|(c, v)| c * v).sum()
    }

    /// Largest bound or row violation of `x`, each scaled by the row magnitude.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let mut worst: f64 = 0.0;
        for (j, &v) in x.iter().enumerate() {
            worst = worst.max(self.lower[j] - v).max(v - self.upper[j]);
        }
        for row in &self.rows {
            let mut lhs = 0.0;
            let mut scale = row.rhs.abs().max(1.0);
            for (a, v) in row.coeffs.iter().zip(x) {
                lhs += a * v;
                scale = scale.max((a * v).abs());
            }
            let excess = match row.sense {
                Sense::Le => lhs - row.rhs,
                Sense::Ge => row.rhs - lhs,
                Sense::Eq => (lhs - row.rhs).abs(),
            };
            worst = worst.max(excess / scale);
        }
        worst
    }

    fn check(&self) -> Result<(), LpError> {
        let n = self.num_vars();
        for j in 0..n {
            if self.lower[j] > self.upper[j] || self.lower[j].is_nan() || self.upper[j].is_nan() {
                return Err(LpError::Dimension(format!(
                    "variable {j} has an empty bound interval"
                )));
            }
            if self.lower[j] == f64::INFINITY || self.upper[j] == f64::NEG_INFINITY {
                return Err(LpError::Dimension(format!(
                    "variable {j} has an infinite fixed bound"
                )));
            }
        }
        if self.objective.iter().any(|c| !c.is_finite()) {
            return Err(LpError::Dimension(
                "objective has non-finite entries".into(),
            ));
        }
        for (i, row) in self.rows.iter().enumerate() {
            if !row.rhs.is_finite() || row.coeffs.iter().any(|a| !a.is_finite()) {
                return Err(LpError::Dimension(format!(
                    "row {i} has non-finite entries"
                )));
            }
        }
        Ok(())
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
    /// Primal values; meaningful only when optimal.
    pub x: Vec<f64>,
    pub objective: f64,
    /// Row multipliers: objective change per unit increase of each right-hand side.
    pub duals: Vec<f64>,
    pub reduced_costs: Vec<f64>,
    pub iterations: usize,
}

pub fn solve_lp(lp: &LinearProgram) -> Result<LpSolution, LpError> {
    solve_lp_with(lp, &LpOptions::default())
}

/// Two-phase solve: artificials are added only for rows whose slack starts outside its bounds.
pub fn solve_lp_with(lp: &LinearProgram, options: &LpOptions) -> Result<LpSolution, LpError> {
    lp.check()?;
    let n = lp.num_vars();
    let m = lp.num_rows();
    let b: Vec<f64> = lp.rows.iter().map(|r| r.rhs).collect();
    let mut spx = BoundedSimplex::new(b, *options);
    for j in 0..n {
        let col = lp.rows.iter().map(|r| r.coeffs[j]).collect();
        spx.add_column(col, 0.0, lp.lower[j], lp.upper[j]);
    }
    // Row activity at the resting point of the structural variables.
    let mut activity = vec![0.0; m];
    for j in 0..n {
        let v = spx.value(j);
        if v != 0.0 {
            for (i, row) in lp.rows.iter().enumerate() {
                activity[i] += row.coeffs[j] * v;
            }
        }
    }
    let mut head = Vec::with_capacity(m);
    let mut artificials = Vec::new();
    for (i, row) in lp.rows.iter().enumerate() {
        let (lo, hi) = match row.sense {
            Sense::Le => (0.0, f64::INFINITY),
            Sense::Ge => (f64::NEG_INFINITY, 0.0),
            Sense::Eq => (0.0, 0.0),
        };
        let mut unit = vec![0.0; m];
        unit[i] = 1.0;
        let slack = spx.add_column(unit, 0.0, lo, hi);
        let need = row.rhs - activity[i];
        if need >= lo - tol::FEASIBILITY && need <= hi + tol::FEASIBILITY {
            head.push(slack);
        } else {
            // Slack rests at its bound; the artificial carries the rest with a positive value.
            let sign = if need > hi { 1.0 } else { -1.0 };
            let mut col = vec![0.0; m];
            col[i] = sign;
            let art = spx.add_column(col, -1.0, 0.0, f64::INFINITY);
            head.push(art);
            artificials.push(art);
        }
    }
    spx.set_basis(head)?;
    if !artificials.is_empty() {
        spx.optimize()?;
        let infeasibility: f64 = artificials.iter().map(|&a| spx.value(a)).sum();
        let scale = lp.rows.iter().map(|r| r.rhs.abs()).fold(1.0, f64::max);
        if infeasibility > tol::FEASIBILITY * scale {
            return Ok(LpSolution {
                status: LpStatus::Infeasible,
                x: spx.values()[..n].to_vec(),
                objective: f64::NAN,
                duals: vec![0.0; m],
                reduced_costs: vec![0.0; n],
                iterations: spx.iterations(),
            });
        }
        for &a in &artificials {
            spx.set_cost(a, 0.0);
            spx.set_bounds(a, 0.0, 0.0)?;
        }
    }
    for (j, &c) in lp.objective.iter().enumerate() {
        spx.set_cost(j, c);
    }
    let outcome = spx.optimize()?;
    let x = spx.values()[..n].to_vec();
    if outcome == Outcome::Unbounded {
        return Ok(LpSolution {
            status: LpStatus::Unbounded,
            x,
            objective: f64::INFINITY,
            duals: vec![0.0; m],
            reduced_costs: vec![0.0; n],
            iterations: spx.iterations(),
        });
    }
    let mut solution = finish(lp, &spx, n);
    if lp.max_violation(&solution.x) > tol::FEASIBILITY {
        spx.refactor()?;
        spx.optimize()?;
        solution = finish(lp, &spx, n);
        let violation = lp.max_violation(&solution.x);
        if violation > tol::FEASIBILITY {
            return Err(LpError::Numerical(format!(
                "optimal basis violates constraints by {violation:e}"
            )));
        }
    }
    Ok(solution)
}

fn finish(lp: &LinearProgram, spx: &BoundedSimplex, n: usize) -> LpSolution {
    let x = spx.values()[..n].to_vec();
    let mut reduced = spx.reduced_costs();
    reduced.truncate(n);
    LpSolution {
        status: LpStatus::Optimal,
        objective: lp.objective_value(&x),
        x,
        duals: spx.duals(),
        reduced_costs: reduced,
        iterations: spx.iterations(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_bound() {
        let mut lp = LinearProgram::new(vec![1.0]);
        lp.set_bounds(0, 0.0, 10.0);
        lp.add_row(vec![1.0], Sense::Le, 3.0);
        let sol = solve_lp(&lp).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.x[0] - 3.0).abs() < 1e-12);
        assert!((sol.duals[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn infeasible_pair() {
        let mut lp = LinearProgram::new(vec![1.0]);
        lp.add_row(vec![1.0], Sense::Ge, 2.0);
        lp.add_row(vec![1.0], Sense::Le, 1.0);
        assert_eq!(solve_lp(&lp).unwrap().status, LpStatus::Infeasible);
    }

    #[test]
    fn unbounded_ray() {
        let mut lp = LinearProgram::new(vec![1.0, 1.0]);
        lp.add_row(vec![1.0, -1.0], Sense::Le, 1.0);
        assert_eq!(solve_lp(&lp).unwrap().status, LpStatus::Unbounded);
    }

    #[test]
    fn textbook_problem() {
        // max 3x + 5y, x <= 4, 2y <= 12, 3x + 2y <= 18 -> (2, 6), 36.
        let mut lp = LinearProgram::new(vec![3.0, 5.0]);
        lp.add_row(vec![1.0, 0.0], Sense::Le, 4.0);
        lp.add_row(vec![0.0, 2.0], Sense::Le, 12.0);
        lp.add_row(vec![3.0, 2.0], Sense::Le, 18.0);
        let sol = solve_lp(&lp).unwrap();
        assert!((sol.objective - 36.0).abs() < 1e-9);
        assert!((sol.x[0] - 2.0).abs() < 1e-9 && (sol.x[1] - 6.0).abs() < 1e-9);
        // Shadow prices (0, 3/2, 1).
        let expected = [0.0, 1.5, 1.0];
        for (d, e) in sol.duals.iter().zip(expected) {
            assert!((d - e).abs() < 1e-9);
        }
    }

    #[test]
    fn equality_and_ge_rows_with_free_variable() {
        // min x + 2y (as max -x - 2y), x + y = 3, x - y >= -1, y free, x in [0, 2].
        let mut lp = LinearProgram::new(vec![-1.0, -2.0]);
        lp.set_bounds(0, 0.0, 2.0);
        lp.set_bounds(1, f64::NEG_INFINITY, f64::INFINITY);
        lp.add_row(vec![1.0, 1.0], Sense::Eq, 3.0);
        lp.add_row(vec![1.0, -1.0], Sense::Ge, -1.0);
        let sol = solve_lp(&lp).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.x[0] - 2.0).abs() < 1e-9 && (sol.x[1] - 1.0).abs() < 1e-9);
        assert!((sol.objective + 4.0).abs() < 1e-9);
    }

    #[test]
    fn degenerate_cycling_example() {
        // Beale's example, which cycles under the textbook rule without anti-cycling.
        let mut lp = LinearProgram::new(vec![0.75, -150.0, 0.02, -6.0]);
        lp.add_row(vec![0.25, -60.0, -0.04, 9.0], Sense::Le, 0.0);
        lp.add_row(vec![0.5, -90.0, -0.02, 3.0], Sense::Le, 0.0);
        lp.add_row(vec![0.0, 0.0, 1.0, 0.0], Sense::Le, 1.0);
        let opts = LpOptions {
            bland_after: 3,
            ..LpOptions::default()
        };
        let sol = solve_lp_with(&lp, &opts).unwrap();
        assert!((sol.objective - 0.05).abs() < 1e-9);
    }

    #[test]
    fn malformed_bounds_rejected() {
        let mut lp = LinearProgram::new(vec![1.0]);
        lp.set_bounds(0, 2.0, 1.0);
        assert!(matches!(solve_lp(&lp), Err(LpError::Dimension(_))));
    }
}
