//! Evaluators checked against independent, deliberately naive recomputations.

use std::collections::BTreeMap;

use mcst::generators::{gen_random, GenSpec, RevenueDist, TransitionKind};
use mcst::model::{
    best_recommendation, choosy_revenue, markov_evaluate, mcst_evaluate, mcst_revenue,
    regularity_example,
};
use mcst::{Assortment, Instance, RecommendationPlan};

fn subsets(items: &[usize]) -> Vec<Vec<usize>> {
    (0u32..1 << items.len())
        .map(|mask| {
            items
                .iter()
                .enumerate()
                .filter(|(k, _)| mask >> k & 1 == 1)
                .map(|(_, &i)| i)
                .collect()
        })
        .collect()
}

/// Best attraction-model revenue for product `j` by trying every recommended set.
fn enumerate_recommendations(inst: &Instance, j: usize, s: &[usize]) -> f64 {
    let row = inst.row(j);
    subsets(s)
        .iter()
        .map(|r| {
            let num: f64 = r.iter().map(|&i| inst.revenue(i) * row[i + 1]).sum();
            let den: f64 = row[0] + r.iter().map(|&i| row[i + 1]).sum::<f64>();
            if den == 0.0 {
                0.0
            } else {
                num / den
            }
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

fn enumerate_mcst(inst: &Instance, s: &Assortment) -> f64 {
    (0..inst.n())
        .map(|j| {
            if s.contains(j) {
                inst.arrival(j) * inst.revenue(j)
            } else {
                inst.arrival(j) * enumerate_recommendations(inst, j, s.members())
            }
        })
        .sum()
}

#[test]
fn mcst_revenue_matches_plan_enumeration() {
    for seed in 0..12 {
        let kind = [TransitionKind::Den, TransitionKind::Spa][seed as usize % 2];
        let inst = gen_random(&GenSpec::new(8, RevenueDist::Exp, kind, seed));
        for mask in (0u32..256).step_by(7) {
            let s = Assortment::from_indices((0..8).filter(|i| mask >> i & 1 == 1));
            let (rev, plan) = mcst_revenue(&inst, &s).unwrap();
            let oracle = enumerate_mcst(&inst, &s);
            assert!(
                (rev - oracle).abs() < 1e-12,
                "seed {seed} mask {mask}: {rev} vs {oracle}"
            );
            let eval = mcst_evaluate(&inst, &s, &plan).unwrap();
            assert!((eval.revenue - rev).abs() < 1e-12);
        }
    }
}

#[test]
fn every_explicit_plan_is_dominated_by_the_returned_plan() {
    let inst = gen_random(&GenSpec::new(4, RevenueDist::Uni, TransitionKind::Den, 9));
    let s = Assortment::from_indices([0, 2]);
    let (best, _) = mcst_revenue(&inst, &s).unwrap();
    for r1 in subsets(&[0, 2]) {
        for r3 in subsets(&[0, 2]) {
            let plan =
                RecommendationPlan::Explicit(BTreeMap::from([(1, r1.clone()), (3, r3.clone())]));
            let eval = mcst_evaluate(&inst, &s, &plan).unwrap();
            assert!(eval.revenue <= best + 1e-15);
        }
    }
}

#[test]
fn example_one_recommendations_and_regularity_violation() {
    let inst = regularity_example();
    let s = Assortment::from_labels(&[1, 3, 4], 4).unwrap();
    let (rec, value) = best_recommendation(&inst, 1, &s).unwrap();
    assert_eq!(rec, vec![0, 2]);
    assert_eq!(value, 1.5);
    let (_, plan) = mcst_revenue(&inst, &s).unwrap();
    let big = mcst_evaluate(&inst, &s, &plan).unwrap();

    let s2 = Assortment::from_labels(&[3, 4], 4).unwrap();
    let (rec2, _) = best_recommendation(&inst, 1, &s2).unwrap();
    assert_eq!(rec2, vec![2, 3]);
    let (_, plan2) = mcst_revenue(&inst, &s2).unwrap();
    let small = mcst_evaluate(&inst, &s2, &plan2).unwrap();

    assert!((big.prob(2) - 0.3125).abs() <= f64::EPSILON);
    assert!((small.prob(2) - 0.3).abs() <= f64::EPSILON);
    assert!(big.prob(2) > small.prob(2));
}

/// Markov chain probabilities by summing `lambda^T rho^k` until the mass left is negligible.
fn neumann_markov(inst: &Instance, s: &Assortment) -> Vec<f64> {
    let n = inst.n();
    let mut probs = vec![0.0; n + 1];
    let mut mass: Vec<f64> = (0..n).map(|j| inst.arrival(j)).collect();
    for _ in 0..100_000 {
        let mut next = vec![0.0; n];
        for j in 0..n {
            if mass[j] == 0.0 {
                continue;
            }
            if s.contains(j) {
                probs[j + 1] += mass[j];
                continue;
            }
            let row = inst.row(j);
            probs[0] += mass[j] * row[0];
            for i in 0..n {
                next[i] += mass[j] * row[i + 1];
            }
        }
        mass = next;
        if mass.iter().sum::<f64>() < 1e-16 {
            break;
        }
    }
    probs
}

#[test]
fn markov_matches_neumann_series() {
    for seed in 0..20 {
        let kind = [
            TransitionKind::Den,
            TransitionKind::Spa,
            TransitionKind::Homog,
        ][seed as usize % 3];
        let inst = gen_random(&GenSpec::new(6, RevenueDist::Uni, kind, seed));
        for outside in subsets(&[0, 1, 2, 3, 4, 5])
            .into_iter()
            .filter(|o| o.len() <= 3)
        {
            let s = Assortment::from_indices((0..6).filter(|i| !outside.contains(i)));
            let eval = markov_evaluate(&inst, &s).unwrap();
            let oracle = neumann_markov(&inst, &s);
            for (a, b) in eval.purchase_probs.iter().zip(&oracle) {
                assert!(
                    (a - b).abs() < 1e-10,
                    "seed {seed} outside {outside:?}: {a} vs {b}"
                );
            }
        }
    }
}

#[test]
fn choosy_matches_double_sum() {
    for seed in 0..10 {
        let inst = gen_random(&GenSpec::new(
            6,
            RevenueDist::Exp,
            TransitionKind::Spa,
            seed,
        ));
        for mask in 0u32..64 {
            let x: Vec<f64> = (0..6).map(|i| f64::from(mask >> i & 1)).collect();
            let mut naive = 0.0;
            for j in 0..6 {
                naive += inst.arrival(j) * inst.revenue(j) * x[j];
            }
            for i in 0..6 {
                let row = inst.row(i);
                for j in 0..6 {
                    if i != j {
                        naive +=
                            inst.arrival(i) * inst.revenue(j) * row[j + 1] * (1.0 - x[i]) * x[j];
                    }
                }
            }
            let s = Assortment::from_indicator(&x.iter().map(|&v| v == 1.0).collect::<Vec<_>>());
            assert!((choosy_revenue(&inst, &s) - naive).abs() < 1e-13);
        }
    }
}

#[test]
fn trivial_assortments() {
    let inst = gen_random(&GenSpec::new(5, RevenueDist::Uni, TransitionKind::Den, 1));
    let total: f64 = (0..5).map(|j| inst.arrival(j) * inst.revenue(j)).sum();
    let full = Assortment::full(5);
    let (rev, _) = mcst_revenue(&inst, &full).unwrap();
    assert!((rev - total).abs() < 1e-15);
    assert!((markov_evaluate(&inst, &full).unwrap().revenue - total).abs() < 1e-15);
    assert!((choosy_revenue(&inst, &full) - total).abs() < 1e-15);
    let empty = Assortment::empty();
    let (rev, plan) = mcst_revenue(&inst, &empty).unwrap();
    assert_eq!(rev, 0.0);
    let eval = mcst_evaluate(&inst, &empty, &plan).unwrap();
    assert!((eval.no_purchase() - 1.0).abs() < 1e-15);
    assert_eq!(choosy_revenue(&inst, &empty), 0.0);
}

#[test]
fn zero_over_zero_recommendation() {
    let rows = vec![
        vec![0.0, 0.0, 0.0, 1.0],
        vec![0.5, 0.0, 0.0, 0.5],
        vec![0.5, 0.5, 0.0, 0.0],
    ];
    let inst = Instance::from_rows(vec![3.0, 2.0, 1.0], vec![0.5, 0.25, 0.25], &rows).unwrap();
    let s = Assortment::from_indices([1]);
    let (rec, value) = best_recommendation(&inst, 0, &s).unwrap();
    assert_eq!(value, 0.0);
    assert_eq!(rec, vec![1]);
}
