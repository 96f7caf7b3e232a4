//! Result types shared by every solver.

use std::time::Duration;

use crate::model::{Assortment, RecommendationPlan};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    /// Proven optimal (or optimal by construction for the polynomial algorithms).
    Optimal,
    /// A node, time or iteration limit stopped the search; the incumbent is returned.
    LimitReached,
    /// Heuristic answer without an optimality claim (revenue-ordered).
    Heuristic,
}

impl SolveStatus {
    pub fn label(self) -> &'static str {
        match self {
            SolveStatus::Optimal => "optimal",
            SolveStatus::LimitReached => "limit_reached",
            SolveStatus::Heuristic => "heuristic",
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SolverStats {
    pub nodes: usize,
    pub lp_iterations: usize,
    pub cuts: usize,
    pub incumbent_updates: usize,
    /// Value-iteration sweeps or algorithm steps, where meaningful.
    pub iterations: usize,
    /// Proven upper bound on the optimum (equals the revenue when optimal).
    pub bound: f64,
    /// `bound - revenue`, clamped at zero.
    pub gap: f64,
    pub build_time: Duration,
    pub wall_time: Duration,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub assortment: Assortment,
    pub revenue: f64,
    pub plan: RecommendationPlan,
    pub status: SolveStatus,
    pub stats: SolverStats,
}

impl SolveResult {
    /// Result of a method that is exact by construction.
    pub fn exact(assortment: Assortment, revenue: f64, plan: RecommendationPlan) -> Self {
        Self {
            assortment,
            revenue,
            plan,
            status: SolveStatus::Optimal,
            stats: SolverStats {
                bound: revenue,
                ..SolverStats::default()
            },
        }
    }
}
