//! The family on which the best revenue-ordered assortment earns only about `2/k` of the optimum.

use thiserror::Error;

use crate::model::{Instance, Transitions};

#[derive(Debug, Error, PartialEq)]
pub enum TightFamilyError {
    #[error("k must be at least 2, got {0}")]
    TooFewClasses(usize),
    #[error("eps must lie in (0, 1) with sum of eps^j for j < k below 1, got {0}")]
    BadEps(f64),
}

/// Neumaier-compensated sum.
fn compensated_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut carry = 0.0;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            carry += (sum - t) + v;
        } else {
            carry += (v - t) + sum;
        }
        sum = t;
    }
    sum + carry
}

/// Products `p0_i` and `p1_i` of class `i` earn `eps^(1-i)`; `p1_i` only transits
/// to `p0_{i+1}`. There is no `p1_k`, so `n = 2k - 1`.
///
/// Canonical order: `p0_k`, then for `i = k-1, ..., 1` the pair `p0_i`, `p1_i`.
pub fn gen_tight_family(k: usize, eps: f64) -> Result<Instance, TightFamilyError> {
    if k < 2 {
        return Err(TightFamilyError::TooFewClasses(k));
    }
    let powers: Vec<f64> = (1..k).map(|j| eps.powi(j as i32)).collect();
    let tail = compensated_sum(powers.iter().copied());
    if !(eps > 0.0 && eps < 1.0) || tail >= 1.0 {
        return Err(TightFamilyError::BadEps(eps));
    }
    let n = 2 * k - 1;
    let p0 = |i: usize| if i == k { 0 } else { 2 * (k - i) - 1 };
    let p1 = |i: usize| 2 * (k - i);
    let mut revenues = vec![0.0; n];
    let mut arrivals = vec![0.0; n];
    let mut no_purchase = vec![0.0; n];
    let mut links = vec![Vec::new(); n];
    for i in 1..=k {
        let r = eps.powi(1 - i as i32);
        revenues[p0(i)] = r;
        no_purchase[p0(i)] = 1.0;
        if i < k {
            revenues[p1(i)] = r;
            arrivals[p1(i)] = powers[i - 1];
            links[p1(i)] = vec![(p0(i + 1), 1.0)];
        }
    }
    arrivals[p0(1)] = 1.0 - tail;
    Ok(Instance::new(
        revenues,
        arrivals,
        Transitions::Sparse { no_purchase, links },
    )
    .expect("family dimensions agree"))
}

/// Revenue of offering every `p0_i`: `k - sum_{j<k} eps^j`.
pub fn tight_family_optimum(k: usize, eps: f64) -> f64 {
    k as f64 - compensated_sum((1..k).map(|j| eps.powi(j as i32)))
}

/// Indices of the `p0_i` products, in canonical order.
pub fn tight_family_p0(k: usize) -> Vec<usize> {
    std::iter::once(0)
        .chain((1..k).map(|m| 2 * m - 1))
        .collect()
}
