//! Decomposed LP relaxations for branch-and-bound.
//!
//! Both relaxations have the form `max c^T x + sum_j phi_j(x)` over a box, with
//! each `phi_j` concave and piecewise linear. The master LP replaces `phi_j` by
//! the minimum of supporting hyperplanes (cuts) collected so far, in variables
//! `theta_j`. The master is solved through its dual, in which cuts are columns:
//! appending a cut or changing the box keeps the basis primal feasible, so every
//! re-solve is a warm start.

use super::ExactError;
use crate::lp::{BoundedSimplex, LpOptions, Outcome};
use crate::model::{choosy_revenue, mcst_revenue_value, Assortment, Instance};

/// `theta_j <= sum coefs_i x_i + constant`.
#[derive(Debug, Clone, PartialEq)]
pub struct Cut {
    pub coefs: Vec<(usize, f64)>,
    pub constant: f64,
}

impl Cut {
    pub fn value(&self, x: &[f64]) -> f64 {
        self.constant + self.coefs.iter().map(|&(i, a)| a * x[i]).sum::<f64>()
    }
}

/// Problem-specific pieces of a decomposed relaxation.
pub trait CutOracle {
    fn n(&self) -> usize;
    /// Objective coefficients of `x`.
    fn linear(&self) -> &[f64];
    /// Valid bounds on each `theta_j`.
    fn theta_bounds(&self, j: usize) -> (f64, f64);
    fn initial_cuts(&self) -> Vec<(usize, Cut)>;
    /// `phi_j(x)` and a cut that is tight at `x`.
    fn separate(&self, j: usize, x: &[f64]) -> (f64, Cut);
    /// Exact objective of an integral point.
    fn evaluate(&self, x: &[bool]) -> f64;
}

/// Dual form of the master LP.
///
/// Rows are the `2n` primal variables `(x, theta)`. Columns: `sigma_y` and
/// `tau_y` for the upper and lower bound of each primal variable, then one
/// column per cut. The primal point is minus the row multipliers.
pub struct Master {
    n: usize,
    spx: BoundedSimplex,
    theta_bounds: Vec<(f64, f64)>,
    cuts: usize,
}

impl Master {
    pub fn new<O: CutOracle>(oracle: &O, options: LpOptions) -> Result<Self, ExactError> {
        let n = oracle.n();
        let mut c = oracle.linear().to_vec();
        c.extend(std::iter::repeat_n(1.0, n));
        let mut spx = BoundedSimplex::new(c.clone(), options);
        let theta_bounds: Vec<(f64, f64)> = (0..n).map(|j| oracle.theta_bounds(j)).collect();
        let mut head = Vec::with_capacity(2 * n);
        for (r, &cr) in c.iter().enumerate() {
            let (lo, hi) = if r < n {
                (0.0, 1.0)
            } else {
                theta_bounds[r - n]
            };
            let mut up = vec![0.0; 2 * n];
            up[r] = 1.0;
            let sigma = spx.add_column(up, -hi, 0.0, f64::INFINITY);
            let mut down = vec![0.0; 2 * n];
            down[r] = -1.0;
            let tau = spx.add_column(down, lo, 0.0, f64::INFINITY);
            head.push(if cr >= 0.0 { sigma } else { tau });
        }
        spx.set_basis(head)?;
        let mut master = Self {
            n,
            spx,
            theta_bounds,
            cuts: 0,
        };
        for (j, cut) in oracle.initial_cuts() {
            master.add_cut(j, &cut);
        }
        Ok(master)
    }

    pub fn cuts(&self) -> usize {
        self.cuts
    }

    pub fn lp_iterations(&self) -> usize {
        self.spx.iterations()
    }

    /// Restricts `x` to the box `[lo, hi]`.
    pub fn set_box(&mut self, lo: &[f64], hi: &[f64]) {
        for r in 0..self.n {
            self.spx.set_cost(2 * r, -hi[r]);
            self.spx.set_cost(2 * r + 1, lo[r]);
        }
    }

    pub fn add_cut(&mut self, j: usize, cut: &Cut) {
        let mut col = vec![0.0; 2 * self.n];
        for &(i, a) in &cut.coefs {
            col[i] -= a;
        }
        col[self.n + j] += 1.0;
        self.spx.add_column(col, -cut.constant, 0.0, f64::INFINITY);
        self.cuts += 1;
    }

    /// Optimal master value and primal point `(x, theta)`.
    pub fn solve(&mut self) -> Result<(f64, Vec<f64>), ExactError> {
        match self.spx.optimize()? {
            Outcome::Optimal => {}
            Outcome::Unbounded => {
                return Err(ExactError::Numerical(
                    "master dual reported unbounded".into(),
                ))
            }
        }
        let value = -self.spx.objective();
        let mut y: Vec<f64> = self.spx.duals().into_iter().map(|w| -w).collect();
        for (r, v) in y.iter_mut().enumerate() {
            let (lo, hi) = if r < self.n {
                (0.0, 1.0)
            } else {
                self.theta_bounds[r - self.n]
            };
            *v = v.clamp(lo, hi);
        }
        Ok((value, y))
    }
}

/// Outcome of bounding one node.
#[derive(Debug, Clone)]
pub struct NodeBound {
    /// Valid upper bound on the relaxation over the node's box.
    pub bound: f64,
    /// Master point at the last iteration.
    pub x: Vec<f64>,
    /// The bound fell below the cutoff before convergence.
    pub pruned: bool,
    /// Bound and relaxation value at `x` agree within tolerance.
    pub converged: bool,
    pub iterations: usize,
}

/// Kelley's cutting-plane loop on the current box.
pub fn bound_node<O: CutOracle>(
    oracle: &O,
    master: &mut Master,
    cutoff: f64,
    max_iterations: usize,
) -> Result<NodeBound, ExactError> {
    let n = oracle.n();
    let linear = oracle.linear();
    let mut iterations = 0;
    loop {
        iterations += 1;
        let (bound, y) = master.solve()?;
        let x = y[..n].to_vec();
        if bound <= cutoff {
            return Ok(NodeBound {
                bound,
                x,
                pruned: true,
                converged: false,
                iterations,
            });
        }
        let mut true_value: f64 = linear.iter().zip(&x).map(|(c, v)| c * v).sum();
        let mut added = 0;
        for j in 0..n {
            let (lo, hi) = oracle.theta_bounds(j);
            if lo == hi {
                true_value += lo;
                continue;
            }
            let (phi, cut) = oracle.separate(j, &x);
            true_value += phi;
            let theta = y[n + j];
            if theta > phi + 1e-12 * phi.abs().max(1.0) {
                master.add_cut(j, &cut);
                added += 1;
            }
        }
        let tolerance = 1e-9 * bound.abs().max(1.0);
        let converged = bound - true_value <= tolerance;
        if converged || added == 0 || iterations >= max_iterations {
            return Ok(NodeBound {
                bound,
                x,
                pruned: false,
                converged: converged || added == 0,
                iterations,
            });
        }
    }
}

/// Relaxation of the compact MCST model with `z` projected out product by product.
pub struct McstOracle<'a> {
    /// Instance with the no-purchase substitution, used for the relaxation.
    relaxed: Instance,
    /// Original instance, used to score integral points.
    original: &'a Instance,
    linear: Vec<f64>,
}

impl<'a> McstOracle<'a> {
    pub fn new(inst: &'a Instance, eps: f64) -> Self {
        Self {
            relaxed: inst.with_min_no_purchase(eps),
            original: inst,
            linear: (0..inst.n())
                .map(|j| inst.arrival(j) * inst.revenue(j))
                .collect(),
        }
    }

    fn top_revenue(&self, j: usize) -> f64 {
        self.relaxed
            .links(j)
            .filter(|&(i, _)| i != j)
            .map(|(i, _)| self.relaxed.revenue(i))
            .fold(0.0, f64::max)
    }
}

impl CutOracle for McstOracle<'_> {
    fn n(&self) -> usize {
        self.relaxed.n()
    }

    fn linear(&self) -> &[f64] {
        &self.linear
    }

    fn theta_bounds(&self, j: usize) -> (f64, f64) {
        (0.0, self.relaxed.arrival(j) * self.top_revenue(j))
    }

    fn initial_cuts(&self) -> Vec<(usize, Cut)> {
        (0..self.n())
            .filter(|&j| self.relaxed.arrival(j) > 0.0)
            .map(|j| {
                let g = self.relaxed.arrival(j) * self.top_revenue(j);
                (
                    j,
                    Cut {
                        coefs: vec![(j, -g)],
                        constant: g,
                    },
                )
            })
            .collect()
    }

    fn separate(&self, j: usize, x: &[f64]) -> (f64, Cut) {
        let (value, alpha, gamma) = mcst_subproblem(&self.relaxed, j, x);
        let lambda = self.relaxed.arrival(j);
        let mut coefs: Vec<(usize, f64)> =
            alpha.into_iter().map(|(i, a)| (i, lambda * a)).collect();
        coefs.push((j, -lambda * gamma));
        (
            lambda * value,
            Cut {
                coefs,
                constant: lambda * gamma,
            },
        )
    }

    fn evaluate(&self, x: &[bool]) -> f64 {
        mcst_revenue_value(self.original, x)
    }
}

/// Relaxed value of the transit from unavailable product `j` at the fractional point `x`.
///
/// Solves the dual of
/// `max sum r_i z_i  s.t.  z_i <= x_i,  z_i <= v_ji t,  sum z_i + v_j0 t = 1 - x_j`
/// over `z, t >= 0`. For a fixed multiplier `gamma` of the balance row the rest
/// is a fractional knapsack, so the dual is a convex function of `gamma` alone.
/// Returns the value, the coefficients `alpha_i` and `gamma`; every `gamma >= 0`
/// yields the valid inequality `phi_j(x) <= sum alpha_i x_i + gamma (1 - x_j)`.
pub fn mcst_subproblem(inst: &Instance, j: usize, x: &[f64]) -> (f64, Vec<(usize, f64)>, f64) {
    let w0 = inst.no_purchase(j);
    let b = (1.0 - x[j]).max(0.0);
    let mut items: Vec<(usize, f64, f64)> = inst
        .links(j)
        .filter(|&(i, _)| i != j)
        .map(|(i, v)| (i, v, inst.revenue(i)))
        .collect();
    if items.is_empty() {
        return (0.0, Vec::new(), 0.0);
    }
    // Budget goes first where it saves the most: largest x_i / v_i.
    items.sort_by(|a, b| {
        (x[b.0] / b.1)
            .total_cmp(&(x[a.0] / a.1))
            .then(a.0.cmp(&b.0))
    });
    let top = items.iter().map(|it| it.2).fold(0.0, f64::max);

    let dual = |gamma: f64, alpha: Option<&mut Vec<(usize, f64)>>| -> f64 {
        let mut budget = w0 * gamma;
        let mut total = gamma * b;
        let mut out = alpha;
        for &(i, v, r) in &items {
            let need = (r - gamma).max(0.0);
            let beta = if budget > 0.0 {
                need.min(budget / v)
            } else {
                0.0
            };
            budget -= beta * v;
            let mu = need - beta;
            total += x[i] * mu;
            if let Some(out) = out.as_deref_mut() {
                out.push((i, mu));
            }
        }
        total
    };

    let mut gamma = if b == 0.0 {
        top
    } else {
        golden_min(&dual, top)
    };
    // Endpoints are exact candidates the search may only approach.
    for candidate in [0.0, top] {
        if dual(candidate, None) <= dual(gamma, None) {
            gamma = candidate;
        }
    }
    let mut alpha = Vec::with_capacity(items.len());
    let value = dual(gamma, Some(&mut alpha));
    alpha.retain(|&(_, a)| a != 0.0);
    (value, alpha, gamma)
}

fn golden_min(f: &dyn Fn(f64, Option<&mut Vec<(usize, f64)>>) -> f64, hi: f64) -> f64 {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let (mut a, mut b) = (0.0, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c, None);
    let mut fd = f(d, None);
    for _ in 0..200 {
        if b - a <= 1e-15 * hi.max(1e-300) {
            break;
        }
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c, None);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d, None);
        }
    }
    if fc <= fd {
        c
    } else {
        d
    }
}

/// McCormick relaxation of the choosy model's quadratic terms.
pub struct ChoosyOracle<'a> {
    inst: &'a Instance,
    linear: Vec<f64>,
    /// Per source product `i`: `(j, lambda_i r_j v_ij)` for `j != i`.
    terms: Vec<Vec<(usize, f64)>>,
}

impl<'a> ChoosyOracle<'a> {
    pub fn new(inst: &'a Instance) -> Self {
        let n = inst.n();
        let terms = (0..n)
            .map(|i| {
                inst.links(i)
                    .filter(|&(j, _)| j != i)
                    .map(|(j, v)| (j, inst.arrival(i) * inst.revenue(j) * v))
                    .filter(|&(_, c)| c != 0.0)
                    .collect()
            })
            .collect();
        Self {
            inst,
            linear: (0..n).map(|j| inst.arrival(j) * inst.revenue(j)).collect(),
            terms,
        }
    }
}

impl CutOracle for ChoosyOracle<'_> {
    fn n(&self) -> usize {
        self.inst.n()
    }

    fn linear(&self) -> &[f64] {
        &self.linear
    }

    fn theta_bounds(&self, i: usize) -> (f64, f64) {
        self.terms[i].iter().fold((0.0, 0.0), |(lo, hi), &(_, c)| {
            (lo + c.min(0.0), hi + c.max(0.0))
        })
    }

    fn initial_cuts(&self) -> Vec<(usize, Cut)> {
        Vec::new()
    }

    /// Supergradient of `sum_j c_ij min(x_j, 1 - x_i)` (c >= 0) and `sum_j c_ij max(0, x_j - x_i)` (c < 0).
    fn separate(&self, i: usize, x: &[f64]) -> (f64, Cut) {
        let mut coefs = Vec::with_capacity(self.terms[i].len() + 1);
        let mut own = 0.0;
        let mut constant = 0.0;
        let mut value = 0.0;
        for &(j, c) in &self.terms[i] {
            if c > 0.0 {
                if x[j] <= 1.0 - x[i] {
                    coefs.push((j, c));
                    value += c * x[j];
                } else {
                    own -= c;
                    constant += c;
                    value += c * (1.0 - x[i]);
                }
            } else if x[j] > x[i] {
                coefs.push((j, c));
                own -= c;
                value += c * (x[j] - x[i]);
            }
        }
        if own != 0.0 {
            coefs.push((i, own));
        }
        (value, Cut { coefs, constant })
    }

    fn evaluate(&self, x: &[bool]) -> f64 {
        choosy_revenue(self.inst, &Assortment::from_indicator(x))
    }
}
