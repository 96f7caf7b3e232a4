//! Exhaustive oracles over all `2^n` assortments.

use std::time::Instant;

use super::ExactError;
use crate::model::{
    choosy_revenue, markov_evaluate, mcst_revenue, mcst_revenue_value, Assortment, Instance,
    RecommendationPlan,
};
use crate::solution::SolveResult;

/// Default largest `n` the oracles accept.
pub const DEFAULT_CAP: usize = 16;

fn enumerate(
    inst: &Instance,
    cap: usize,
    mut value: impl FnMut(&[bool]) -> Result<f64, ExactError>,
) -> Result<(Vec<bool>, f64, usize), ExactError> {
    let n = inst.n();
    if n > cap || n >= 64 {
        return Err(ExactError::TooLarge { n, cap });
    }
    let mut indicator = vec![false; n];
    let mut best = (indicator.clone(), value(&indicator)?);
    for mask in 1u64..1 << n {
        for (i, slot) in indicator.iter_mut().enumerate() {
            *slot = mask >> i & 1 == 1;
        }
        let v = value(&indicator)?;
        if v > best.1 {
            best = (indicator.clone(), v);
        }
    }
    Ok((best.0, best.1, 1 << n))
}

/// Best MCST assortment; recommended sets come from the attraction-model optimizer.
pub fn brute_force_mcst(inst: &Instance, cap: usize) -> Result<SolveResult, ExactError> {
    let start = Instant::now();
    let (best, _, count) = enumerate(inst, cap, |x| Ok(mcst_revenue_value(inst, x)))?;
    let s = Assortment::from_indicator(&best);
    let (revenue, plan) = mcst_revenue(inst, &s)?;
    let mut result = SolveResult::exact(s, revenue, plan);
    result.stats.nodes = count;
    result.stats.wall_time = start.elapsed();
    Ok(result)
}

/// Best assortment under the Markov chain choice model.
pub fn brute_force_markov(inst: &Instance, cap: usize) -> Result<SolveResult, ExactError> {
    let start = Instant::now();
    let (best, revenue, count) = enumerate(inst, cap, |x| {
        Ok(markov_evaluate(inst, &Assortment::from_indicator(x))?.revenue)
    })?;
    let mut result = SolveResult::exact(
        Assortment::from_indicator(&best),
        revenue,
        RecommendationPlan::RecommendAll,
    );
    result.stats.nodes = count;
    result.stats.wall_time = start.elapsed();
    Ok(result)
}

/// Best assortment under the choosy model.
pub fn brute_force_choosy(inst: &Instance, cap: usize) -> Result<SolveResult, ExactError> {
    let start = Instant::now();
    let (best, revenue, count) = enumerate(inst, cap, |x| {
        Ok(choosy_revenue(inst, &Assortment::from_indicator(x)))
    })?;
    let mut result = SolveResult::exact(
        Assortment::from_indicator(&best),
        revenue,
        RecommendationPlan::RecommendAll,
    );
    result.stats.nodes = count;
    result.stats.wall_time = start.elapsed();
    Ok(result)
}
