use std::time::Instant;

use crate::model::{
    canonicalize, mcst_revenue, mcst_revenue_value, Assortment, Instance, ModelError,
};
use crate::solution::{SolveResult, SolveStatus};

/// Performance certificate of the best revenue-ordered assortment.
#[derive(Debug, Clone, PartialEq)]
pub struct RoCertificate {
    /// Number of top products in the chosen assortment.
    pub best_t: usize,
    pub ro_revenue: f64,
    /// Number of distinct revenue values.
    pub d: usize,
    pub r_max: f64,
    pub r_min: f64,
    /// `max(1/d, 1/(1 + ln(r_max/r_min)))`, or `1/d` when `r_min <= 0`.
    pub bound_factor: f64,
    /// `ro_revenue / bound_factor`, an upper bound on the optimum.
    pub guarantee: f64,
}

impl RoCertificate {
    fn new(inst: &Instance, best_t: usize, ro_revenue: f64) -> Self {
        let mut distinct: Vec<f64> = inst.revenues().to_vec();
        distinct.sort_by(|a, b| b.total_cmp(a));
        distinct.dedup();
        let d = distinct.len();
        let r_max = distinct[0];
        let r_min = *distinct.last().expect("n >= 1");
        let mut bound_factor = 1.0 / d as f64;
        if r_min > 0.0 {
            bound_factor = bound_factor.max(1.0 / (1.0 + (r_max / r_min).ln()));
        }
        Self {
            best_t,
            ro_revenue,
            d,
            r_max,
            r_min,
            bound_factor,
            guarantee: ro_revenue / bound_factor,
        }
    }
}

/// Best assortment among the `n + 1` sets of top-revenue products.
///
/// Unsorted instances are relabeled first and the answer mapped back. Ties in
/// revenue go to the smaller assortment.
pub fn best_revenue_ordered(inst: &Instance) -> Result<(SolveResult, RoCertificate), ModelError> {
    let start = Instant::now();
    let (canon, perm) = canonicalize(inst);
    let n = canon.n();
    let mut indicator = vec![false; n];
    let mut best_t = 0;
    let mut best = mcst_revenue_value(&canon, &indicator);
    for t in 1..=n {
        indicator[t - 1] = true;
        let value = mcst_revenue_value(&canon, &indicator);
        if value > best {
            best = value;
            best_t = t;
        }
    }
    let (revenue, plan) = mcst_revenue(&canon, &Assortment::prefix(best_t))?;
    let assortment = perm.to_original(&Assortment::prefix(best_t));
    let plan = perm.plan_to_original(&plan);
    let certificate = RoCertificate::new(&canon, best_t, revenue);
    let mut result = SolveResult::exact(assortment, revenue, plan);
    result.status = SolveStatus::Heuristic;
    result.stats.bound = certificate.guarantee;
    result.stats.gap = (certificate.guarantee - revenue).max(0.0);
    result.stats.iterations = n + 1;
    result.stats.wall_time = start.elapsed();
    Ok((result, certificate))
}
