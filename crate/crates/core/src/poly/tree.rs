use std::collections::BTreeMap;
use std::time::Instant;

use super::PolyError;
use crate::model::{mcst_evaluate, Assortment, Instance, RecommendationPlan};
use crate::solution::SolveResult;

/// Dynamic-programming tables of the transit-to-one solver.
#[derive(Debug, Clone, PartialEq)]
pub struct TreeDpValues {
    /// Parent of each product after dropping links to products with revenue `<=` its own.
    pub parent: Vec<Option<usize>>,
    /// Best subtree revenue with the product offered.
    pub with: Vec<f64>,
    /// Best subtree revenue with the product not offered.
    pub without: Vec<f64>,
    /// Sum over roots of `max(with, without)`.
    pub value: f64,
    /// The same recursion with `without = sum of children's with`, which needs
    /// nonnegative revenues; `None` when some `lambda_j r_j < 0`.
    pub value_nonnegative_form: Option<f64>,
}

fn positive_part(x: f64) -> f64 {
    x.max(0.0)
}

/// Revenue of child `c` when it is unavailable and recommends its offered parent `p`.
fn transit_value(inst: &Instance, c: usize, p: usize) -> f64 {
    let w = inst.weight(c, p);
    inst.arrival(c) * inst.revenue(p) * w / (w + inst.no_purchase(c))
}

/// Builds the forest and fills the tables bottom-up.
pub fn tree_dp_values(inst: &Instance) -> Result<TreeDpValues, PolyError> {
    let n = inst.n();
    let mut parent = vec![None; n];
    for j in 0..n {
        let mut targets = inst.links(j).filter(|&(k, _)| k != j);
        let first = targets.next();
        if targets.next().is_some() {
            return Err(PolyError::NotTransitToOne(j + 1));
        }
        if let Some((k, _)) = first {
            if inst.revenue(k) > inst.revenue(j) {
                parent[j] = Some(k);
            }
        }
    }
    // Parents earn strictly more, so children come later in revenue order.
    let order: Vec<usize> = if inst.is_canonical() {
        (0..n).collect()
    } else {
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| inst.revenue(b).total_cmp(&inst.revenue(a)).then(a.cmp(&b)));
        order
    };
    let nonnegative = (0..n).all(|j| inst.arrival(j) * inst.revenue(j) >= 0.0);
    let mut with: Vec<f64> = (0..n).map(|i| inst.arrival(i) * inst.revenue(i)).collect();
    let mut without = vec![0.0; n];
    let mut simple_without = vec![0.0; n];
    let mut simple_with = with.clone();
    for &c in order.iter().rev() {
        if let Some(p) = parent[c] {
            let t = positive_part(transit_value(inst, c, p));
            with[p] += with[c].max(without[c] + t);
            without[p] += with[c].max(without[c]);
            if nonnegative {
                simple_with[p] += simple_with[c].max(simple_without[c] + transit_value(inst, c, p));
                simple_without[p] += simple_with[c];
            }
        }
    }
    let roots = (0..n).filter(|&j| parent[j].is_none());
    let value = roots.clone().map(|j| with[j].max(without[j])).sum();
    let value_nonnegative_form =
        nonnegative.then(|| roots.map(|j| simple_with[j].max(simple_without[j])).sum());
    Ok(TreeDpValues {
        parent,
        with,
        without,
        value,
        value_nonnegative_form,
    })
}

/// Optimal assortment for transit-to-one instances.
///
/// An unavailable product whose parent is offered is recommended the parent when
/// that earns something, and nothing otherwise.
pub fn solve_tree_dp(inst: &Instance) -> Result<SolveResult, PolyError> {
    let start = Instant::now();
    let dp = tree_dp_values(inst)?;
    let n = inst.n();
    let mut children: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (c, p) in dp.parent.iter().enumerate() {
        if let Some(p) = *p {
            children[p].push(c);
        }
    }
    let mut offered = vec![false; n];
    let mut stack: Vec<usize> = Vec::new();
    for j in 0..n {
        if dp.parent[j].is_none() {
            offered[j] = dp.with[j] >= dp.without[j];
            stack.push(j);
        }
    }
    while let Some(p) = stack.pop() {
        for &c in &children[p] {
            let alternative = if offered[p] {
                dp.without[c] + positive_part(transit_value(inst, c, p))
            } else {
                dp.without[c]
            };
            offered[c] = dp.with[c] >= alternative;
            stack.push(c);
        }
    }
    let assortment = Assortment::from_indicator(&offered);
    let mut plan = BTreeMap::new();
    for j in 0..n {
        if offered[j] {
            continue;
        }
        let rec = match dp.parent[j] {
            Some(p) if offered[p] && transit_value(inst, j, p) > 0.0 => vec![p],
            _ => Vec::new(),
        };
        plan.insert(j, rec);
    }
    let plan = RecommendationPlan::Explicit(plan);
    let revenue = mcst_evaluate(inst, &assortment, &plan)?.revenue;
    debug_assert!(
        (revenue - dp.value).abs() <= 1e-9 * dp.value.abs().max(1.0),
        "plan revenue {revenue} differs from the table value {}",
        dp.value
    );
    let mut result = SolveResult::exact(assortment, revenue, plan);
    result.stats.wall_time = start.elapsed();
    Ok(result)
}
