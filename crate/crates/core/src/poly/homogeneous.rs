use std::time::Instant;

use super::PolyError;
use crate::model::{Assortment, Instance, RecommendationPlan};
use crate::solution::SolveResult;

/// `RV_i / V_i` for `i = 1..n`, with `RV_i = sum_{k<=i} r_k v_k` and `V_i = v_0 + sum_{k<=i} v_k`.
///
/// Entry `i - 1` is the amount subtracted from `r_{i+1}` after the first `i`
/// products have been selected.
pub fn homogeneous_prefix_ratios(inst: &Instance) -> Vec<f64> {
    let mut rv = 0.0;
    let mut v = inst.no_purchase(0);
    (0..inst.n())
        .map(|i| {
            let w = inst.weight(0, i);
            rv += inst.revenue(i) * w;
            v += w;
            if v == 0.0 {
                0.0
            } else {
                rv / v
            }
        })
        .collect()
}

/// Linear-time optimum for homogeneous instances in canonical order.
///
/// Product `i` joins while its updated revenue `r_i - RV_{i-1}/V_{i-1}` is
/// nonnegative; every unavailable product is shown the whole assortment.
pub fn solve_homogeneous(inst: &Instance) -> Result<SolveResult, PolyError> {
    let start = Instant::now();
    if !inst.is_homogeneous() {
        return Err(PolyError::NotHomogeneous);
    }
    if !inst.is_canonical() {
        return Err(PolyError::NotCanonical);
    }
    let n = inst.n();
    let v0 = inst.no_purchase(0);
    let mut t = 0;
    let mut rv = 0.0;
    let mut v = v0;
    let mut sold = 0.0;
    if inst.revenue(0) >= 0.0 {
        t = n;
        for i in 0..n {
            let r = inst.revenue(i);
            if i > 0 {
                let ratio = if v == 0.0 { 0.0 } else { rv / v };
                if r - ratio < 0.0 {
                    t = i;
                    break;
                }
            }
            let w = inst.weight(0, i);
            rv += r * w;
            v += w;
            sold += inst.arrival(i) * r;
        }
    }
    let left: f64 = inst.arrivals()[t..].iter().sum();
    let transit = if t == 0 || v == 0.0 { 0.0 } else { rv / v };
    let revenue = sold + left * transit;
    let mut result = SolveResult::exact(
        Assortment::prefix(t),
        revenue,
        RecommendationPlan::RecommendAll,
    );
    result.stats.iterations = t;
    result.stats.wall_time = start.elapsed();
    Ok(result)
}
