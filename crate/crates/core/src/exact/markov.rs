//! Optimal assortment under the Markov chain choice model (unlimited transitions).
//!
//! The optimal expected revenue from a customer currently at product `i` solves
//! `g_i = max(r_i, sum_k v_ik g_k)`, and offering `{i : r_i >= sum_k v_ik g_k}`
//! attains it. Value iteration gets close; policy iteration then makes the
//! stopping set exact.

use std::time::Instant;

use super::ExactError;
use crate::model::{markov_evaluate, solve_in_place, Assortment, Instance, RecommendationPlan};
use crate::solution::SolveResult;

fn continuation(inst: &Instance, g: &[f64], i: usize) -> f64 {
    inst.links(i).map(|(k, w)| w * g[k]).sum()
}

/// Values of the policy that stops exactly at `stop`.
fn policy_values(inst: &Instance, stop: &[bool]) -> Option<Vec<f64>> {
    let n = inst.n();
    let go: Vec<usize> = (0..n).filter(|&i| !stop[i]).collect();
    let m = go.len();
    let mut pos = vec![usize::MAX; n];
    for (k, &i) in go.iter().enumerate() {
        pos[i] = k;
    }
    let mut a = vec![0.0; m * m];
    let mut b = vec![0.0; m];
    for (k, &i) in go.iter().enumerate() {
        a[k * m + k] += 1.0;
        for (j, w) in inst.links(i) {
            if stop[j] {
                b[k] += w * inst.revenue(j);
            } else {
                a[k * m + pos[j]] -= w;
            }
        }
    }
    solve_in_place(&mut a, &mut b, m)?;
    let mut g: Vec<f64> = inst.revenues().to_vec();
    for (k, &i) in go.iter().enumerate() {
        g[i] = b[k];
    }
    Some(g)
}

/// Optimal Markov chain assortment.
///
/// `tol` is the value-iteration stopping threshold; at most `max_iters` sweeps
/// are run before policy iteration takes over.
pub fn solve_markov_optimal(
    inst: &Instance,
    tol: f64,
    max_iters: usize,
) -> Result<SolveResult, ExactError> {
    let start = Instant::now();
    let n = inst.n();
    // Rows without a no-purchase weight would let the chain cycle forever.
    let work = if (0..n).any(|j| inst.no_purchase(j) <= 0.0) {
        let mut rows = Vec::with_capacity(n);
        for j in 0..n {
            let mut row = inst.row(j);
            row[0] = row[0].max(crate::tol::DEFAULT_EPS_NO_PURCHASE);
            let total: f64 = row.iter().sum();
            rows.push(row.into_iter().map(|w| w / total).collect::<Vec<_>>());
        }
        Instance::from_rows(inst.revenues().to_vec(), inst.arrivals().to_vec(), &rows)?
    } else {
        inst.clone()
    };

    let mut g = vec![0.0; n];
    let mut sweeps = 0;
    while sweeps < max_iters {
        sweeps += 1;
        let mut change: f64 = 0.0;
        for i in 0..n {
            let next = inst.revenue(i).max(continuation(&work, &g, i));
            change = change.max((next - g[i]).abs());
            g[i] = next;
        }
        if change <= tol {
            break;
        }
    }

    let slack = 1e-12;
    let mut stop: Vec<bool> = (0..n)
        .map(|i| inst.revenue(i) >= continuation(&work, &g, i) - slack * g[i].abs().max(1.0))
        .collect();
    let mut rounds = 0;
    loop {
        rounds += 1;
        let values = policy_values(&work, &stop)
            .ok_or_else(|| ExactError::Numerical("singular policy system".into()))?;
        let next: Vec<bool> = (0..n)
            .map(|i| {
                let cont = continuation(&work, &values, i);
                inst.revenue(i) >= cont - slack * values[i].abs().max(1.0)
            })
            .collect();
        g = values;
        if next == stop {
            break;
        }
        if rounds > n + 100 {
            return Err(ExactError::NonConvergence(rounds));
        }
        stop = next;
    }

    let assortment = Assortment::from_indicator(&stop);
    let revenue = match markov_evaluate(inst, &assortment) {
        Ok(eval) => eval.revenue,
        Err(_) => markov_evaluate(&work, &assortment)?.revenue,
    };
    debug_assert!({
        let direct: f64 = (0..n).map(|i| inst.arrival(i) * g[i]).sum();
        (direct - revenue).abs() <= 1e-6 * direct.abs().max(1.0) || work != *inst
    });
    let mut result = SolveResult::exact(assortment, revenue, RecommendationPlan::RecommendAll);
    result.stats.iterations = sweeps + rounds;
    result.stats.wall_time = start.elapsed();
    Ok(result)
}
