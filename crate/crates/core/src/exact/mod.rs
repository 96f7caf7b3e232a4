//! Exact solvers: branch-and-bound over decomposed LP relaxations, the Markov
//! chain optimum, and exhaustive oracles for small instances.

pub mod benders;
mod bnb;
mod brute;
mod markov;
mod mip;

use std::time::{Duration, Instant};

use thiserror::Error;

use crate::lp::LpError;
use crate::model::{
    choosy_revenue, mcst_revenue, Assortment, Instance, ModelError, RecommendationPlan,
};
use crate::poly::best_revenue_ordered;
use crate::solution::{SolveResult, SolveStatus};
use crate::tol;

pub use benders::{ChoosyOracle, CutOracle, McstOracle};
pub use bnb::{branch_and_bound, BnbOutcome};
pub use brute::{brute_force_choosy, brute_force_markov, brute_force_mcst, DEFAULT_CAP};
pub use markov::solve_markov_optimal;
pub use mip::{build_choosy_mip, build_mip, MipModel};

#[derive(Debug, Error)]
pub enum ExactError {
    #[error("n = {n} exceeds the enumeration cap {cap}")]
    TooLarge { n: usize, cap: usize },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("no convergence after {0} iterations")]
    NonConvergence(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExactOptions {
    pub time_limit: Option<Duration>,
    pub node_limit: Option<usize>,
    /// Substitute for `v_j0 = 0` in the relaxation.
    pub eps_no_purchase: f64,
    /// Cutting-plane rounds per node.
    pub kelley_max_iterations: usize,
    /// One-flip local search on the incumbent before branching.
    pub local_search: bool,
}

impl Default for ExactOptions {
    fn default() -> Self {
        Self {
            time_limit: None,
            node_limit: None,
            eps_no_purchase: tol::DEFAULT_EPS_NO_PURCHASE,
            kelley_max_iterations: 200,
            local_search: true,
        }
    }
}

fn finish(
    outcome: BnbOutcome,
    assortment: Assortment,
    revenue: f64,
    plan: RecommendationPlan,
    start: Instant,
) -> SolveResult {
    let mut result = SolveResult::exact(assortment, revenue, plan);
    let bound = outcome.bound.max(revenue);
    result.status = if outcome.limit_reached {
        SolveStatus::LimitReached
    } else {
        SolveStatus::Optimal
    };
    result.stats.nodes = outcome.nodes;
    result.stats.lp_iterations = outcome.lp_iterations;
    result.stats.cuts = outcome.cuts;
    result.stats.incumbent_updates = outcome.incumbent_updates;
    result.stats.iterations = outcome.kelley_iterations;
    result.stats.bound = if outcome.limit_reached {
        bound
    } else {
        revenue
    };
    result.stats.gap = if outcome.limit_reached {
        (bound - revenue).max(0.0)
    } else {
        0.0
    };
    result.stats.build_time = outcome.build_time;
    result.stats.wall_time = start.elapsed();
    result
}

/// Optimal MCST assortment by branch-and-bound, warm-started from the best
/// revenue-ordered assortment.
pub fn solve_mcst_exact(
    inst: &Instance,
    options: &ExactOptions,
) -> Result<SolveResult, ExactError> {
    let start = Instant::now();
    let (ro, _) = best_revenue_ordered(inst)?;
    let oracle = McstOracle::new(inst, options.eps_no_purchase);
    let outcome = branch_and_bound(&oracle, ro.assortment.indicator(inst.n()), options)?;
    let assortment = Assortment::from_indicator(&outcome.best);
    let (revenue, plan) = mcst_revenue(inst, &assortment)?;
    Ok(finish(outcome, assortment, revenue, plan, start))
}

/// Optimal assortment under the choosy model, warm-started from the best
/// revenue-ordered assortment for that model.
pub fn solve_choosy_exact(
    inst: &Instance,
    options: &ExactOptions,
) -> Result<SolveResult, ExactError> {
    let start = Instant::now();
    let n = inst.n();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| inst.revenue(b).total_cmp(&inst.revenue(a)).then(a.cmp(&b)));
    let mut indicator = vec![false; n];
    let mut best = (
        indicator.clone(),
        choosy_revenue(inst, &Assortment::empty()),
    );
    for &i in &order {
        indicator[i] = true;
        let value = choosy_revenue(inst, &Assortment::from_indicator(&indicator));
        if value > best.1 {
            best = (indicator.clone(), value);
        }
    }
    let oracle = ChoosyOracle::new(inst);
    let outcome = branch_and_bound(&oracle, best.0, options)?;
    let assortment = Assortment::from_indicator(&outcome.best);
    let revenue = choosy_revenue(inst, &assortment);
    Ok(finish(
        outcome,
        assortment,
        revenue,
        RecommendationPlan::RecommendAll,
        start,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{
        gen_random, gen_tight_family, tight_family_optimum, GenSpec, RevenueDist, TransitionKind,
    };

    #[test]
    fn matches_brute_force_on_small_instances() {
        for seed in 0..12 {
            for kind in [
                TransitionKind::Den,
                TransitionKind::Spa,
                TransitionKind::Tree,
            ] {
                let rev = if seed % 2 == 0 {
                    RevenueDist::Uni
                } else {
                    RevenueDist::Exp
                };
                let inst = gen_random(&GenSpec::new(4 + seed as usize % 5, rev, kind, seed));
                let exact = solve_mcst_exact(&inst, &ExactOptions::default()).unwrap();
                let brute = brute_force_mcst(&inst, DEFAULT_CAP).unwrap();
                assert_eq!(exact.status, SolveStatus::Optimal);
                assert!(
                    (exact.revenue - brute.revenue).abs() < 1e-8,
                    "{kind} {seed}: {} vs {}",
                    exact.revenue,
                    brute.revenue
                );
                let choosy = solve_choosy_exact(&inst, &ExactOptions::default()).unwrap();
                let brute = brute_force_choosy(&inst, DEFAULT_CAP).unwrap();
                assert!(
                    (choosy.revenue - brute.revenue).abs() < 1e-8,
                    "choosy {kind} {seed}"
                );
            }
        }
    }

    #[test]
    fn tight_family_optimum_is_found() {
        let inst = gen_tight_family(4, 0.01).unwrap();
        let exact = solve_mcst_exact(&inst, &ExactOptions::default()).unwrap();
        assert!((exact.revenue - tight_family_optimum(4, 0.01)).abs() < 1e-8);
    }

    #[test]
    fn node_limit_reports_limit() {
        let inst = gen_random(&GenSpec::new(12, RevenueDist::Exp, TransitionKind::Spa, 5));
        let options = ExactOptions {
            node_limit: Some(0),
            local_search: false,
            ..ExactOptions::default()
        };
        let result = solve_mcst_exact(&inst, &options).unwrap();
        assert_eq!(result.status, SolveStatus::LimitReached);
        assert!(result.stats.bound >= result.revenue);
    }
}
