//! Revised primal simplex over `A x = b, l <= x <= u` with an explicit basis inverse.

use super::{LpError, LpOptions};
use crate::tol;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum State {
    Basic,
    AtLower,
    AtUpper,
    /// Nonbasic free variable held at zero.
    Free,
}

/// Outcome of [`BoundedSimplex::optimize`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Optimal,
    Unbounded,
}

/// Bounded-variable revised simplex that maximizes `c^T x`.
///
/// Columns can be appended and costs changed between calls to
/// [`optimize`](Self::optimize); the current basis stays primal feasible under
/// both, so re-optimization resumes where the last call stopped.
#[derive(Debug, Clone)]
pub struct BoundedSimplex {
    m: usize,
    b: Vec<f64>,
    cols: Vec<Vec<f64>>,
    cost: Vec<f64>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    state: Vec<State>,
    x: Vec<f64>,
    head: Vec<usize>,
    /// Row-major `m x m` inverse of the basis matrix.
    binv: Vec<f64>,
    since_refactor: usize,
    iterations: usize,
    options: LpOptions,
}

impl BoundedSimplex {
    pub fn new(b: Vec<f64>, options: LpOptions) -> Self {
        Self {
            m: b.len(),
            b,
            cols: Vec::new(),
            cost: Vec::new(),
            lower: Vec::new(),
            upper: Vec::new(),
            state: Vec::new(),
            x: Vec::new(),
            head: Vec::new(),
            binv: Vec::new(),
            since_refactor: 0,
            iterations: 0,
            options,
        }
    }

    pub fn rows(&self) -> usize {
        self.m
    }

    pub fn columns(&self) -> usize {
        self.cols.len()
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }

    pub fn values(&self) -> &[f64] {
        &self.x
    }

    pub fn value(&self, j: usize) -> f64 {
        self.x[j]
    }

    /// Appends a nonbasic column at its finite bound nearest zero (or at zero if free).
    ///
    /// With a basis installed the basic values are updated, so a column whose
    /// resting value is nonzero can break primal feasibility.
    pub fn add_column(&mut self, col: Vec<f64>, cost: f64, lower: f64, upper: f64) -> usize {
        assert_eq!(col.len(), self.m, "column length must match the row count");
        assert!(lower <= upper, "empty bound interval");
        let (state, value) = resting_point(lower, upper);
        let j = self.cols.len();
        if value != 0.0 && !self.head.is_empty() {
            let w = self.ftran(&col);
            for (r, &h) in self.head.iter().enumerate() {
                self.x[h] -= w[r] * value;
            }
        }
        self.cols.push(col);
        self.cost.push(cost);
        self.lower.push(lower);
        self.upper.push(upper);
        self.state.push(state);
        self.x.push(value);
        j
    }

    pub fn set_cost(&mut self, j: usize, cost: f64) {
        self.cost[j] = cost;
    }

    pub fn cost(&self, j: usize) -> f64 {
        self.cost[j]
    }

    /// Changes the bounds of a variable; a nonbasic one moves to its new resting bound.
    pub fn set_bounds(&mut self, j: usize, lower: f64, upper: f64) -> Result<(), LpError> {
        assert!(lower <= upper, "empty bound interval");
        self.lower[j] = lower;
        self.upper[j] = upper;
        if self.state[j] != State::Basic {
            let target = match self.state[j] {
                State::AtUpper if upper.is_finite() => upper,
                _ => {
                    let (state, value) = resting_point(lower, upper);
                    self.state[j] = state;
                    value
                }
            };
            if target != self.x[j] && !self.head.is_empty() {
                self.x[j] = target;
                self.recompute_basic()?;
            } else {
                self.x[j] = target;
            }
        }
        Ok(())
    }

    /// Installs a basis (one column per row) and recomputes the basic values.
    pub fn set_basis(&mut self, head: Vec<usize>) -> Result<(), LpError> {
        assert_eq!(head.len(), self.m, "a basis needs one column per row");
        for j in 0..self.cols.len() {
            if self.state[j] == State::Basic {
                let (state, value) = resting_point(self.lower[j], self.upper[j]);
                self.state[j] = state;
                self.x[j] = value;
            }
        }
        for &h in &head {
            self.state[h] = State::Basic;
        }
        self.head = head;
        self.refactor()
    }

    /// Largest bound violation among basic variables.
    pub fn primal_infeasibility(&self) -> f64 {
        self.head
            .iter()
            .map(|&h| {
                (self.lower[h] - self.x[h])
                    .max(self.x[h] - self.upper[h])
                    .max(0.0)
            })
            .fold(0.0, f64::max)
    }

    pub fn objective(&self) -> f64 {
        self.cost.iter().zip(&self.x).map(|(c, x)| c * x).sum()
    }

    /// Simplex multipliers `y = c_B^T B^-1`: objective change per unit of `b`.
    pub fn duals(&self) -> Vec<f64> {
        let m = self.m;
        let mut y = vec![0.0; m];
        for (r, &h) in self.head.iter().enumerate() {
            let c = self.cost[h];
            if c != 0.0 {
                for (k, yk) in y.iter_mut().enumerate() {
                    *yk += c * self.binv[r * m + k];
                }
            }
        }
        y
    }

    pub fn reduced_costs(&self) -> Vec<f64> {
        let y = self.duals();
        (0..self.cols.len())
            .map(|j| self.cost[j] - dot(&y, &self.cols[j]))
            .collect()
    }

    /// Runs primal simplex from the current (primal feasible) basis.
    pub fn optimize(&mut self) -> Result<Outcome, LpError> {
        let m = self.m;
        let mut degenerate = 0usize;
        let mut bland = false;
        let start = self.iterations;
        loop {
            if self.iterations - start >= self.options.max_iterations {
                return Err(LpError::IterationLimit(self.options.max_iterations));
            }
            if self.since_refactor >= self.options.refactor_every {
                self.refactor()?;
            }
            let y = self.duals();
            let Some((q, d)) = self.price(&y, bland) else {
                return Ok(Outcome::Optimal);
            };
            let dir = if d > 0.0 { 1.0 } else { -1.0 };
            let alpha = self.ftran(&self.cols[q]);

            // Ratio test: x_B moves by -dir * t * alpha.
            let mut min_t = f64::INFINITY;
            let mut leave: Option<(usize, f64, f64)> = None;
            for r in 0..m {
                let rate = -dir * alpha[r];
                if rate.abs() <= tol::PIVOT {
                    continue;
                }
                let h = self.head[r];
                let (limit, bound) = if rate < 0.0 {
                    if !self.lower[h].is_finite() {
                        continue;
                    }
                    ((self.x[h] - self.lower[h]).max(0.0) / -rate, self.lower[h])
                } else {
                    if !self.upper[h].is_finite() {
                        continue;
                    }
                    ((self.upper[h] - self.x[h]).max(0.0) / rate, self.upper[h])
                };
                min_t = min_t.min(limit);
                let take = match leave {
                    None => true,
                    Some((prev, prev_limit, _)) => {
                        if limit < prev_limit - 1e-12 {
                            true
                        } else if limit <= prev_limit + 1e-12 {
                            if bland {
                                h < self.head[prev]
                            } else {
                                alpha[r].abs() > alpha[prev].abs()
                            }
                        } else {
                            false
                        }
                    }
                };
                if take {
                    leave = Some((r, limit, bound));
                }
            }
            let best_t = min_t;
            let span = self.upper[q] - self.lower[q];
            self.iterations += 1;
            if span.is_finite() && span <= best_t {
                // Bound flip: the entering variable crosses its box without a basis change.
                for r in 0..m {
                    let h = self.head[r];
                    self.x[h] -= dir * span * alpha[r];
                }
                if dir > 0.0 {
                    self.x[q] = self.upper[q];
                    self.state[q] = State::AtUpper;
                } else {
                    self.x[q] = self.lower[q];
                    self.state[q] = State::AtLower;
                }
                degenerate = 0;
                continue;
            }
            let Some((r, _, bound)) = leave else {
                return Ok(Outcome::Unbounded);
            };
            let t = best_t;
            if t <= 1e-12 {
                degenerate += 1;
                if degenerate >= self.options.bland_after {
                    bland = true;
                }
            } else {
                degenerate = 0;
            }
            for k in 0..m {
                let h = self.head[k];
                self.x[h] -= dir * t * alpha[k];
            }
            self.x[q] += dir * t;
            let out = self.head[r];
            self.x[out] = bound;
            self.state[out] = if bound == self.lower[out] {
                State::AtLower
            } else {
                State::AtUpper
            };
            self.state[q] = State::Basic;
            self.head[r] = q;
            self.pivot(r, &alpha)?;
        }
    }

    /// Entering candidate and its reduced cost.
    fn price(&self, y: &[f64], bland: bool) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64)> = None;
        for j in 0..self.cols.len() {
            let eligible = match self.state[j] {
                State::Basic => false,
                _ if self.lower[j] == self.upper[j] => false,
                _ => true,
            };
            if !eligible {
                continue;
            }
            let d = self.cost[j] - dot(y, &self.cols[j]);
            let improving = match self.state[j] {
                State::AtLower => d > tol::OPTIMALITY,
                State::AtUpper => d < -tol::OPTIMALITY,
                State::Free => d.abs() > tol::OPTIMALITY,
                State::Basic => false,
            };
            if !improving {
                continue;
            }
            if bland {
                return Some((j, d));
            }
            if best.is_none_or(|(_, bd)| d.abs() > bd.abs()) {
                best = Some((j, d));
            }
        }
        best
    }

    /// `B^-1 a`.
    fn ftran(&self, a: &[f64]) -> Vec<f64> {
        let m = self.m;
        let mut out = vec![0.0; m];
        for (k, &ak) in a.iter().enumerate() {
            if ak == 0.0 {
                continue;
            }
            for (r, o) in out.iter_mut().enumerate() {
                *o += self.binv[r * m + k] * ak;
            }
        }
        out
    }

    /// Eta update of the inverse after column `alpha` replaced row `r` of the basis.
    fn pivot(&mut self, r: usize, alpha: &[f64]) -> Result<(), LpError> {
        let m = self.m;
        let p = alpha[r];
        if p.abs() <= tol::PIVOT {
            return self.refactor();
        }
        let (before, rest) = self.binv.split_at_mut(r * m);
        let (pivot_row, after) = rest.split_at_mut(m);
        for v in pivot_row.iter_mut() {
            *v /= p;
        }
        for (i, row) in before.chunks_mut(m).enumerate() {
            let f = alpha[i];
            if f != 0.0 {
                for (v, pr) in row.iter_mut().zip(pivot_row.iter()) {
                    *v -= f * pr;
                }
            }
        }
        for (i, row) in after.chunks_mut(m).enumerate() {
            let f = alpha[r + 1 + i];
            if f != 0.0 {
                for (v, pr) in row.iter_mut().zip(pivot_row.iter()) {
                    *v -= f * pr;
                }
            }
        }
        self.since_refactor += 1;
        Ok(())
    }

    /// Rebuilds the inverse by Gauss-Jordan elimination and recomputes basic values.
    pub fn refactor(&mut self) -> Result<(), LpError> {
        let m = self.m;
        let mut a = vec![0.0; m * m];
        for (r, &h) in self.head.iter().enumerate() {
            for k in 0..m {
                a[k * m + r] = self.cols[h][k];
            }
        }
        let mut inv = vec![0.0; m * m];
        for i in 0..m {
            inv[i * m + i] = 1.0;
        }
        for col in 0..m {
            let mut piv = col;
            for row in col + 1..m {
                if a[row * m + col].abs() > a[piv * m + col].abs() {
                    piv = row;
                }
            }
            if a[piv * m + col].abs() <= 1e-13 {
                return Err(LpError::Numerical(
                    "singular basis during refactorization".into(),
                ));
            }
            if piv != col {
                for k in 0..m {
                    a.swap(col * m + k, piv * m + k);
                    inv.swap(col * m + k, piv * m + k);
                }
            }
            let p = a[col * m + col];
            for k in 0..m {
                a[col * m + k] /= p;
                inv[col * m + k] /= p;
            }
            for row in 0..m {
                if row == col {
                    continue;
                }
                let f = a[row * m + col];
                if f == 0.0 {
                    continue;
                }
                for k in 0..m {
                    a[row * m + k] -= f * a[col * m + k];
                    inv[row * m + k] -= f * inv[col * m + k];
                }
            }
        }
        self.binv = inv;
        self.since_refactor = 0;
        self.recompute_basic()
    }

    /// `x_B = B^-1 (b - N x_N)` with the current inverse.
    fn recompute_basic(&mut self) -> Result<(), LpError> {
        let mut rhs = self.b.clone();
        for j in 0..self.cols.len() {
            if self.state[j] != State::Basic && self.x[j] != 0.0 {
                for (k, v) in rhs.iter_mut().enumerate() {
                    *v -= self.cols[j][k] * self.x[j];
                }
            }
        }
        let xb = self.ftran(&rhs);
        for (r, &h) in self.head.iter().enumerate() {
            self.x[h] = xb[r];
        }
        if self.x.iter().any(|v| !v.is_finite()) {
            return Err(LpError::Numerical("non-finite primal values".into()));
        }
        Ok(())
    }

    /// Largest `|A x - b|` scaled by the row magnitude.
    pub fn residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for k in 0..self.m {
            let mut s = -self.b[k];
            let mut scale = self.b[k].abs().max(1.0);
            for (j, col) in self.cols.iter().enumerate() {
                let t = col[k] * self.x[j];
                s += t;
                scale = scale.max(t.abs());
            }
            worst = worst.max(s.abs() / scale);
        }
        worst
    }
}

fn resting_point(lower: f64, upper: f64) -> (State, f64) {
    if lower.is_finite() && (!upper.is_finite() || lower.abs() <= upper.abs()) {
        (State::AtLower, lower)
    } else if upper.is_finite() {
        (State::AtUpper, upper)
    } else {
        (State::Free, 0.0)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
