//! Exact evaluation of assortments under the MCST, Markov chain and choosy models.

use std::collections::BTreeMap;

use super::{Assortment, Instance, ModelError, RecommendationPlan};

/// Slack used when deciding whether a revenue ties the current attraction ratio.
const TIE: f64 = 1e-12;

/// Choice probabilities and expected revenue of one assortment.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    /// Index 0 is the no-purchase option, index `i + 1` is product `i`.
    pub purchase_probs: Vec<f64>,
    pub revenue: f64,
}

impl Evaluation {
    /// Purchase probability of product `i` (0-based).
    pub fn prob(&self, i: usize) -> f64 {
        self.purchase_probs[i + 1]
    }

    pub fn no_purchase(&self) -> f64 {
        self.purchase_probs[0]
    }
}

/// `0/0 = 0`, the convention used throughout.
#[inline]
fn ratio(num: f64, den: f64) -> f64 {
    if den == 0.0 {
        0.0
    } else {
        num / den
    }
}

/// Offered products sorted by revenue descending, ties by ascending index.
pub(crate) fn revenue_order(inst: &Instance, members: &[usize]) -> Vec<usize> {
    let mut order = members.to_vec();
    order.sort_by(|&a, &b| {
        inst.revenue(b)
            .partial_cmp(&inst.revenue(a))
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    order
}

/// Greedy attraction-model optimizer over `order` (already revenue sorted).
///
/// Returns the attained ratio; pushes the chosen products into `chosen` when given.
pub(crate) fn greedy_recommendation(
    inst: &Instance,
    j: usize,
    order: &[usize],
    mut chosen: Option<&mut Vec<usize>>,
) -> f64 {
    let mut num = 0.0;
    let mut den = inst.no_purchase(j);
    let mut stop = order.len();
    for (pos, &i) in order.iter().enumerate() {
        let current = ratio(num, den);
        let r = inst.revenue(i);
        if r < current - TIE * current.abs().max(1.0) {
            stop = pos;
            break;
        }
        let w = inst.weight(j, i);
        num += r * w;
        den += w;
        if let Some(out) = chosen.as_deref_mut() {
            out.push(i);
        }
    }
    let value = ratio(num, den);
    // Zero-weight products that tie the final ratio keep the set inclusion-maximal.
    if let Some(out) = chosen {
        for &i in &order[stop..] {
            if inst.weight(j, i) == 0.0 && inst.revenue(i) >= value - TIE * value.abs().max(1.0) {
                out.push(i);
            }
        }
        out.sort_unstable();
    }
    value
}

/// Best recommended set for a customer who arrived at unavailable product `j`.
///
/// Maximizes `sum_{i in R} r_i v_ji / (sum_{i in R} v_ji + v_j0)` over `R` in
/// the assortment and returns the inclusion-maximal maximizer with its value.
pub fn best_recommendation(
    inst: &Instance,
    j: usize,
    assortment: &Assortment,
) -> Result<(Vec<usize>, f64), ModelError> {
    let n = inst.n();
    if j >= n {
        return Err(ModelError::ProductOutOfRange { product: j + 1, n });
    }
    assortment.check_range(n)?;
    if assortment.contains(j) {
        return Err(ModelError::ProductOffered(j + 1));
    }
    let order = revenue_order(inst, assortment.members());
    let mut chosen = Vec::new();
    let value = greedy_recommendation(inst, j, &order, Some(&mut chosen));
    Ok((chosen, value))
}

/// Choice probabilities and revenue of `assortment` under an explicit plan.
pub fn mcst_evaluate(
    inst: &Instance,
    assortment: &Assortment,
    plan: &RecommendationPlan,
) -> Result<Evaluation, ModelError> {
    let n = inst.n();
    assortment.check_range(n)?;
    plan.validate(assortment, n)?;
    let mut probs = vec![0.0; n + 1];
    for &i in assortment.members() {
        probs[i + 1] += inst.arrival(i);
    }
    for j in assortment.complement(n) {
        let lambda = inst.arrival(j);
        let rec = plan.recommended(j, assortment);
        let v0 = inst.no_purchase(j);
        let den: f64 = v0 + rec.iter().map(|&i| inst.weight(j, i)).sum::<f64>();
        if den == 0.0 {
            // 0/0: the customer leaves, as with an infinitesimal no-purchase weight.
            probs[0] += lambda;
            continue;
        }
        for &i in rec {
            probs[i + 1] += lambda * inst.weight(j, i) / den;
        }
        probs[0] += lambda * v0 / den;
    }
    clamp_unit(&mut probs);
    let revenue = assortment
        .members()
        .iter()
        .map(|&i| inst.revenue(i) * probs[i + 1])
        .sum();
    Ok(Evaluation {
        purchase_probs: probs,
        revenue,
    })
}

/// Revenue of `assortment` with every recommended set chosen optimally.
pub fn mcst_revenue(
    inst: &Instance,
    assortment: &Assortment,
) -> Result<(f64, RecommendationPlan), ModelError> {
    let n = inst.n();
    assortment.check_range(n)?;
    let order = revenue_order(inst, assortment.members());
    let mut revenue: f64 = assortment
        .members()
        .iter()
        .map(|&i| inst.arrival(i) * inst.revenue(i))
        .sum();
    let mut plan = BTreeMap::new();
    for j in assortment.complement(n) {
        let mut chosen = Vec::new();
        let value = greedy_recommendation(inst, j, &order, Some(&mut chosen));
        revenue += inst.arrival(j) * value;
        plan.insert(j, chosen);
    }
    Ok((revenue, RecommendationPlan::Explicit(plan)))
}

/// Plan-optimal MCST revenue of the assortment given by an indicator vector.
///
/// Allocation-light variant of [`mcst_revenue`] for enumeration loops.
pub fn mcst_revenue_value(inst: &Instance, indicator: &[bool]) -> f64 {
    let members: Vec<usize> = (0..inst.n()).filter(|&i| indicator[i]).collect();
    let order = revenue_order(inst, &members);
    let mut revenue = 0.0;
    for j in 0..inst.n() {
        if indicator[j] {
            revenue += inst.arrival(j) * inst.revenue(j);
        } else if inst.arrival(j) != 0.0 {
            revenue += inst.arrival(j) * greedy_recommendation(inst, j, &order, None);
        }
    }
    revenue
}

/// Choice probabilities under the Markov chain choice model (unlimited transitions).
///
/// Solves `(I - rho(Sbar,Sbar))^T u = lambda(Sbar)` by Gaussian elimination;
/// `Pr_i = lambda_i + sum_j u_j v_ji` for offered `i`.
pub fn markov_evaluate(inst: &Instance, assortment: &Assortment) -> Result<Evaluation, ModelError> {
    let n = inst.n();
    assortment.check_range(n)?;
    let outside = assortment.complement(n);
    let m = outside.len();
    let mut pos = vec![usize::MAX; n];
    for (k, &j) in outside.iter().enumerate() {
        pos[j] = k;
    }
    // Row k of `a` holds column k of (I - rho), i.e. the transposed system.
    let mut a = vec![0.0; m * m];
    for (k, &j) in outside.iter().enumerate() {
        a[k * m + k] += 1.0;
        for (i, w) in inst.links(j) {
            if pos[i] != usize::MAX {
                a[pos[i] * m + k] -= w;
            }
        }
    }
    let mut u: Vec<f64> = outside.iter().map(|&j| inst.arrival(j)).collect();
    solve_in_place(&mut a, &mut u, m).ok_or(ModelError::NonAbsorbing)?;
    if u.iter().any(|x| !x.is_finite() || *x < -1e-9) {
        return Err(ModelError::NonAbsorbing);
    }
    let mut probs = vec![0.0; n + 1];
    for &i in assortment.members() {
        probs[i + 1] += inst.arrival(i);
    }
    for (k, &j) in outside.iter().enumerate() {
        if u[k] == 0.0 {
            continue;
        }
        probs[0] += u[k] * inst.no_purchase(j);
        for (i, w) in inst.links(j) {
            if pos[i] == usize::MAX {
                probs[i + 1] += u[k] * w;
            }
        }
    }
    let total: f64 = probs.iter().sum();
    let expected: f64 = inst.arrivals().iter().sum();
    if (total - expected).abs() > 1e-6 {
        return Err(ModelError::NonAbsorbing);
    }
    clamp_unit(&mut probs);
    let revenue = assortment
        .members()
        .iter()
        .map(|&i| inst.revenue(i) * probs[i + 1])
        .sum();
    Ok(Evaluation {
        purchase_probs: probs,
        revenue,
    })
}

/// Revenue under the two-product nonparametric ("choosy") model.
///
/// `sum_j lambda_j r_j x_j + sum_i sum_j lambda_i r_j v_ij (1 - x_i) x_j`.
pub fn choosy_revenue(inst: &Instance, assortment: &Assortment) -> f64 {
    let n = inst.n();
    let inside = assortment.indicator(n);
    let mut revenue = 0.0;
    for i in 0..n {
        if inside[i] {
            revenue += inst.arrival(i) * inst.revenue(i);
            continue;
        }
        let transit: f64 = inst
            .links(i)
            .filter(|&(j, _)| inside[j])
            .map(|(j, w)| inst.revenue(j) * w)
            .sum();
        revenue += inst.arrival(i) * transit;
    }
    revenue
}

/// Arrival rates summing to one only up to round-off can push a probability a few ulps past 1.
fn clamp_unit(probs: &mut [f64]) {
    for p in probs {
        *p = p.clamp(0.0, 1.0);
    }
}

/// Gaussian elimination with partial pivoting; `None` when the matrix is singular.
pub(crate) fn solve_in_place(a: &mut [f64], b: &mut [f64], m: usize) -> Option<()> {
    for col in 0..m {
        let pivot_row = (col..m).max_by(|&p, &q| {
            a[p * m + col]
                .abs()
                .partial_cmp(&a[q * m + col].abs())
                .unwrap_or(std::cmp::Ordering::Equal)
        })?;
        if a[pivot_row * m + col].abs() < 1e-12 {
            return None;
        }
        if pivot_row != col {
            for k in 0..m {
                a.swap(col * m + k, pivot_row * m + k);
            }
            b.swap(col, pivot_row);
        }
        let p = a[col * m + col];
        for row in col + 1..m {
            let f = a[row * m + col] / p;
            if f == 0.0 {
                continue;
            }
            for k in col..m {
                a[row * m + k] -= f * a[col * m + k];
            }
            b[row] -= f * b[col];
        }
    }
    for col in (0..m).rev() {
        let mut s = b[col];
        for k in col + 1..m {
            s -= a[col * m + k] * b[k];
        }
        b[col] = s / a[col * m + col];
    }
    Some(())
}
