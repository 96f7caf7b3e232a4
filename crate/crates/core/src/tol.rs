//! Numerical tolerances shared by every module.

/// Feasibility tolerance: probability sums, row sums, primal residuals.
pub const FEASIBILITY: f64 = 1e-9;

/// Tolerance for comparing objective values and revenues.
pub const VALUE: f64 = 1e-8;

/// Default no-purchase weight substituted for `v_j0 = 0` when building the MIP.
pub const DEFAULT_EPS_NO_PURCHASE: f64 = 1e-9;

/// A relaxation value is integral when every binary is this close to 0 or 1.
pub const INTEGRALITY: f64 = 1e-6;

/// Absolute optimality gap under which branch-and-bound reports a proven optimum.
pub const ABS_GAP: f64 = 1e-9;

/// Relative part of the optimality gap, needed when revenues span many orders of magnitude.
pub const REL_GAP: f64 = 1e-12;

/// Smallest pivot element the simplex accepts.
pub const PIVOT: f64 = 1e-10;

/// Reduced-cost tolerance of the simplex.
pub const OPTIMALITY: f64 = 1e-9;

/// Pruning threshold used by branch-and-bound for an incumbent of the given value.
pub fn gap_allowance(incumbent: f64) -> f64 {
    ABS_GAP + REL_GAP * incumbent.abs()
}
