//! Explicit mixed-integer models, kept for small-instance cross-checks of the
//! decomposed relaxations used by branch-and-bound.

use crate::lp::{solve_lp, LinearProgram, LpError, LpStatus, Sense};
use crate::model::Instance;

/// The compact MCST model with literal `n x n` layout.
///
/// Variables: `x_j` (binary, indices `0..n`), `z_ji` at `n + j*n + i`,
/// `z_j0` at `n + n*n + j`. Rows: `n^2` linking rows `z_ji <= x_i`, `n`
/// balance rows `sum_i z_ji + z_j0 = 1 - x_j`, and `n^2` ratio rows stored as
/// `v_j0 z_ji - v_ji z_j0 <= 0`. `z_jj` and zero-weight `z_ji` are fixed at 0.
#[derive(Debug, Clone)]
pub struct MipModel {
    n: usize,
    lp: LinearProgram,
    /// `v_j0` after the no-purchase substitution.
    pub no_purchase: Vec<f64>,
}

impl MipModel {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn binaries(&self) -> usize {
        self.n
    }

    pub fn continuous(&self) -> usize {
        self.lp.num_vars() - self.n
    }

    pub fn rows(&self) -> usize {
        self.lp.num_rows()
    }

    pub fn z(&self, j: usize, i: usize) -> usize {
        self.n + j * self.n + i
    }

    pub fn z0(&self, j: usize) -> usize {
        self.n + self.n * self.n + j
    }

    pub fn linear_program(&self) -> &LinearProgram {
        &self.lp
    }

    /// LP relaxation with `x` restricted to `[lo, hi]`.
    pub fn relaxation(&self, lo: &[f64], hi: &[f64]) -> LinearProgram {
        let mut lp = self.lp.clone();
        for j in 0..self.n {
            lp.set_bounds(j, lo[j], hi[j]);
        }
        lp
    }

    /// Optimal relaxation value over the box, `None` when the box is infeasible.
    pub fn relaxation_value(&self, lo: &[f64], hi: &[f64]) -> Result<Option<f64>, LpError> {
        let sol = solve_lp(&self.relaxation(lo, hi))?;
        Ok(match sol.status {
            LpStatus::Optimal => Some(sol.objective),
            _ => None,
        })
    }
}

/// Builds the compact model with `v_j0 := max(v_j0, eps)`.
pub fn build_mip(inst: &Instance, eps: f64) -> MipModel {
    let n = inst.n();
    let vars = n + n * n + n;
    let z = |j: usize, i: usize| n + j * n + i;
    let z0 = |j: usize| n + n * n + j;
    let mut objective = vec![0.0; vars];
    for j in 0..n {
        objective[j] = inst.arrival(j) * inst.revenue(j);
        for i in 0..n {
            objective[z(j, i)] = inst.arrival(j) * inst.revenue(i);
        }
    }
    let mut lp = LinearProgram::new(objective);
    for j in 0..n {
        lp.set_bounds(j, 0.0, 1.0);
        for i in 0..n {
            if i == j || inst.weight(j, i) == 0.0 {
                lp.set_bounds(z(j, i), 0.0, 0.0);
            }
        }
    }
    for j in 0..n {
        for i in 0..n {
            lp.add_sparse_row(&[(z(j, i), 1.0), (i, -1.0)], Sense::Le, 0.0);
        }
    }
    for j in 0..n {
        let mut entries: Vec<(usize, f64)> = (0..n).map(|i| (z(j, i), 1.0)).collect();
        entries.push((z0(j), 1.0));
        entries.push((j, 1.0));
        lp.add_sparse_row(&entries, Sense::Eq, 1.0);
    }
    let no_purchase: Vec<f64> = (0..n).map(|j| inst.no_purchase(j).max(eps)).collect();
    for j in 0..n {
        for i in 0..n {
            lp.add_sparse_row(
                &[(z(j, i), no_purchase[j]), (z0(j), -inst.weight(j, i))],
                Sense::Le,
                0.0,
            );
        }
    }
    MipModel { n, lp, no_purchase }
}

/// Linearized choosy model: `x_j` at `0..n`, `w_ij` at `n + i*n + j`.
///
/// `w_ij <= x_j` and `w_ij <= 1 - x_i` for every pair with a positive
/// coefficient `lambda_i r_j v_ij`; negative coefficients add `w_ij >= x_j - x_i`.
pub fn build_choosy_mip(inst: &Instance) -> LinearProgram {
    let n = inst.n();
    let w = |i: usize, j: usize| n + i * n + j;
    let mut objective = vec![0.0; n + n * n];
    for j in 0..n {
        objective[j] = inst.arrival(j) * inst.revenue(j);
    }
    let mut coeffs = Vec::new();
    for i in 0..n {
        for (j, v) in inst.links(i) {
            if j != i {
                let c = inst.arrival(i) * inst.revenue(j) * v;
                objective[w(i, j)] = c;
                coeffs.push((i, j, c));
            }
        }
    }
    let mut lp = LinearProgram::new(objective);
    for j in 0..n {
        lp.set_bounds(j, 0.0, 1.0);
    }
    for i in 0..n {
        for j in 0..n {
            lp.set_bounds(w(i, j), 0.0, 0.0);
        }
    }
    for (i, j, c) in coeffs {
        lp.set_bounds(w(i, j), 0.0, 1.0);
        lp.add_sparse_row(&[(w(i, j), 1.0), (j, -1.0)], Sense::Le, 0.0);
        lp.add_sparse_row(&[(w(i, j), 1.0), (i, 1.0)], Sense::Le, 1.0);
        if c < 0.0 {
            lp.add_sparse_row(&[(w(i, j), 1.0), (j, -1.0), (i, 1.0)], Sense::Ge, 0.0);
        }
    }
    lp
}
