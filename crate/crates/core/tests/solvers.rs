use mcst::exact::{
    brute_force_choosy, brute_force_markov, brute_force_mcst, build_mip, solve_choosy_exact,
    solve_markov_optimal, solve_mcst_exact, ExactOptions, DEFAULT_CAP,
};
use mcst::generators::{
    figure_tree_parents, gen_homogeneous, gen_random, gen_tree_from_parents, gen_tree_with,
    max_independent_set, nonisomorphic_graphs, reduce_independent_set, GenSpec, Graph, RevenueDist,
    TransitionKind,
};
use mcst::model::{markov_evaluate, mcst_evaluate, mcst_revenue, mcst_revenue_value};
use mcst::poly::{
    best_revenue_ordered, homogeneous_prefix_ratios, solve_homogeneous, solve_tree_dp,
    tree_dp_values,
};
use mcst::solution::SolveStatus;
use mcst::{Assortment, Instance, RecommendationPlan, Transitions};

#[test]
fn homogeneous_solver_matches_enumeration() {
    for seed in 0..60 {
        let rev = if seed % 2 == 0 {
            RevenueDist::Uni
        } else {
            RevenueDist::Exp
        };
        let inst = gen_homogeneous(1 + seed as usize % 12, rev, seed);
        let fast = solve_homogeneous(&inst).unwrap();
        let brute = brute_force_mcst(&inst, DEFAULT_CAP).unwrap();
        assert!((fast.revenue - brute.revenue).abs() < 1e-9, "seed {seed}");
        let eval = mcst_evaluate(&inst, &fast.assortment, &fast.plan).unwrap();
        assert!((eval.revenue - fast.revenue).abs() < 1e-12);
    }
}

#[test]
fn incremental_ratios_match_repeated_revenue_updates() {
    for seed in 0..20 {
        let inst = gen_homogeneous(15, RevenueDist::Exp, seed);
        let n = inst.n();
        let ratios = homogeneous_prefix_ratios(&inst);
        let mut r: Vec<f64> = inst.revenues().to_vec();
        let mut v0 = inst.no_purchase(0);
        for k in 0..n - 1 {
            // Offer product k: the rest see its value folded into the no-purchase option.
            let vk = inst.weight(0, k);
            let shift = r[k] * vk / (v0 + vk);
            for ri in r.iter_mut().skip(k + 1) {
                *ri -= shift;
            }
            v0 += vk;
            for i in k + 1..n {
                let literal = r[i];
                let incremental = inst.revenue(i) - ratios[k];
                assert!(
                    (literal - incremental).abs() < 1e-12,
                    "seed {seed} step {k} product {i}"
                );
            }
        }
    }
}

#[test]
fn homogeneous_monotone_inclusion_of_the_top_product() {
    for seed in 0..20 {
        let inst = gen_homogeneous(6, RevenueDist::Uni, seed);
        for mask in 0u32..64 {
            if mask & 1 == 1 {
                continue;
            }
            let s = Assortment::from_indices((0..6).filter(|i| mask >> i & 1 == 1));
            let with =
                Assortment::from_indices(std::iter::once(0).chain(s.members().iter().copied()));
            let a = mcst_evaluate(&inst, &s, &RecommendationPlan::RecommendAll)
                .unwrap()
                .revenue;
            let b = mcst_evaluate(&inst, &with, &RecommendationPlan::RecommendAll)
                .unwrap()
                .revenue;
            assert!(b >= a - 1e-12);
        }
    }
}

#[test]
fn homogeneous_solver_rejects_mismatched_instances() {
    let inst = gen_random(&GenSpec::new(4, RevenueDist::Uni, TransitionKind::Den, 1));
    assert!(solve_homogeneous(&inst).is_err());
    let unsorted = Instance::new(
        vec![1.0, 2.0],
        vec![0.5, 0.5],
        Transitions::Homogeneous(vec![0.2, 0.4, 0.4]),
    )
    .unwrap();
    assert!(solve_homogeneous(&unsorted).is_err());
}

#[test]
fn tree_dp_matches_enumeration() {
    for seed in 0..60 {
        let rev = if seed % 2 == 0 {
            RevenueDist::Uni
        } else {
            RevenueDist::Exp
        };
        let inst = gen_tree_with(1 + seed as usize % 12, rev, seed);
        let dp = solve_tree_dp(&inst).unwrap();
        let brute = brute_force_mcst(&inst, DEFAULT_CAP).unwrap();
        assert!((dp.revenue - brute.revenue).abs() < 1e-9, "seed {seed}");
        let values = tree_dp_values(&inst).unwrap();
        let simple = values.value_nonnegative_form.unwrap();
        assert!((simple - values.value).abs() < 1e-12);
    }
    let figure = gen_tree_from_parents(&figure_tree_parents(), RevenueDist::Uni, 4);
    let dp = solve_tree_dp(&figure).unwrap();
    assert!((dp.revenue - brute_force_mcst(&figure, DEFAULT_CAP).unwrap().revenue).abs() < 1e-12);
}

#[test]
fn tree_dp_handles_negative_revenues() {
    let rows = vec![
        vec![1.0, 0.0, 0.0, 0.0],
        vec![0.2, 0.8, 0.0, 0.0],
        vec![0.5, 0.0, 0.5, 0.0],
    ];
    let inst = Instance::from_rows(vec![2.0, -0.5, -1.0], vec![0.2, 0.5, 0.3], &rows).unwrap();
    let dp = solve_tree_dp(&inst).unwrap();
    let brute = brute_force_mcst(&inst, DEFAULT_CAP).unwrap();
    assert!((dp.revenue - brute.revenue).abs() < 1e-12);
    assert!(tree_dp_values(&inst)
        .unwrap()
        .value_nonnegative_form
        .is_none());
}

#[test]
fn tree_chain_prefers_the_transit() {
    // 3 -> 2 -> 1 (1-based); most customers arrive at 3 and almost surely move to 2.
    let rows = vec![
        vec![1.0, 0.0, 0.0, 0.0],
        vec![0.5, 0.5, 0.0, 0.0],
        vec![0.01, 0.0, 0.99, 0.0],
    ];
    let inst = Instance::from_rows(vec![3.0, 2.0, 1.0], vec![0.1, 0.1, 0.8], &rows).unwrap();
    let dp = solve_tree_dp(&inst).unwrap();
    assert_eq!(dp.assortment.members(), &[0, 1]);
    assert!((dp.revenue - brute_force_mcst(&inst, DEFAULT_CAP).unwrap().revenue).abs() < 1e-12);
}

#[test]
fn revenue_ordered_certificate_holds() {
    for seed in 0..40 {
        let kind = [
            TransitionKind::Den,
            TransitionKind::Spa,
            TransitionKind::Tree,
        ][seed as usize % 3];
        let inst = gen_random(&GenSpec::new(
            3 + seed as usize % 8,
            RevenueDist::Exp,
            kind,
            seed,
        ));
        let (ro, cert) = best_revenue_ordered(&inst).unwrap();
        let opt = solve_mcst_exact(&inst, &ExactOptions::default()).unwrap();
        assert!(ro.revenue <= opt.revenue + 1e-12);
        let factor = (cert.d as f64).min(1.0 + (cert.r_max / cert.r_min).ln());
        assert!(opt.revenue <= ro.revenue * factor + 1e-8);
        assert!(opt.revenue <= cert.guarantee + 1e-8);
        assert!(cert.bound_factor > 0.0 && cert.bound_factor <= 1.0);
    }
    for seed in 0..10 {
        let inst = gen_homogeneous(8, RevenueDist::Uni, seed);
        let (ro, _) = best_revenue_ordered(&inst).unwrap();
        let opt = solve_homogeneous(&inst).unwrap();
        assert!((ro.revenue - opt.revenue).abs() < 1e-12);
    }
}

#[test]
fn exact_solvers_agree_with_oracles_at_ten_products() {
    for seed in 0..6 {
        let kind = [TransitionKind::Den, TransitionKind::Spa][seed as usize % 2];
        let inst = gen_random(&GenSpec::new(10, RevenueDist::Exp, kind, seed));
        let opts = ExactOptions::default();
        let mcst = solve_mcst_exact(&inst, &opts).unwrap();
        assert!(
            (mcst.revenue - brute_force_mcst(&inst, DEFAULT_CAP).unwrap().revenue).abs() < 1e-8
        );
        let eval = mcst_evaluate(&inst, &mcst.assortment, &mcst.plan).unwrap();
        assert!((eval.revenue - mcst.revenue).abs() < 1e-12);
        let choosy = solve_choosy_exact(&inst, &opts).unwrap();
        assert!(
            (choosy.revenue - brute_force_choosy(&inst, DEFAULT_CAP).unwrap().revenue).abs() < 1e-8
        );
        let total: f64 = (0..10).map(|j| inst.arrival(j) * inst.revenue(j)).sum();
        assert!(choosy.revenue >= total - 1e-12);
        assert!(mcst.revenue >= choosy.revenue - 1e-9);
        let markov = solve_markov_optimal(&inst, 1e-12, 100_000).unwrap();
        assert!(
            (markov.revenue - brute_force_markov(&inst, DEFAULT_CAP).unwrap().revenue).abs() < 1e-8
        );
    }
}

#[test]
fn exact_equals_homogeneous_and_markov_on_homogeneous_instances() {
    for seed in 0..10 {
        let inst = gen_homogeneous(20, RevenueDist::Exp, seed);
        let h = solve_homogeneous(&inst).unwrap();
        let e = solve_mcst_exact(&inst, &ExactOptions::default()).unwrap();
        let m = solve_markov_optimal(&inst, 1e-12, 100_000).unwrap();
        assert!((h.revenue - e.revenue).abs() < 1e-8);
        assert!((h.revenue - m.revenue).abs() < 1e-8);
    }
}

#[test]
fn markov_with_equal_revenues_offers_everything() {
    let inst = Instance::from_rows(
        vec![2.0; 3],
        vec![0.2, 0.3, 0.5],
        &[
            vec![0.1, 0.0, 0.5, 0.4],
            vec![0.3, 0.3, 0.0, 0.4],
            vec![0.2, 0.4, 0.4, 0.0],
        ],
    )
    .unwrap();
    let m = solve_markov_optimal(&inst, 1e-12, 10_000).unwrap();
    assert_eq!(m.assortment.members(), &[0, 1, 2]);
    assert!((m.revenue - 2.0).abs() < 1e-12);
}

#[test]
fn markov_shifts_zero_no_purchase_rows() {
    let rows = vec![vec![0.0, 0.0, 1.0], vec![0.5, 0.5, 0.0]];
    let inst = Instance::from_rows(vec![1.0, 3.0], vec![0.5, 0.5], &rows).unwrap();
    let m = solve_markov_optimal(&inst, 1e-12, 10_000).unwrap();
    let brute = brute_force_markov(&inst, DEFAULT_CAP).unwrap();
    assert!((m.revenue - brute.revenue).abs() < 1e-8);
}

#[test]
fn exact_handles_zero_no_purchase_rows() {
    let rows = vec![
        vec![0.0, 0.0, 0.6, 0.4],
        vec![0.0, 0.7, 0.0, 0.3],
        vec![0.3, 0.3, 0.4, 0.0],
    ];
    let inst = Instance::from_rows(vec![3.0, 2.0, 1.0], vec![0.3, 0.3, 0.4], &rows).unwrap();
    let exact = solve_mcst_exact(&inst, &ExactOptions::default()).unwrap();
    let brute = brute_force_mcst(&inst, DEFAULT_CAP).unwrap();
    assert!((exact.revenue - brute.revenue).abs() < 1e-8);
}

#[test]
fn halving_eps_changes_nothing_on_generated_instances() {
    for seed in 0..5 {
        let inst = gen_random(&GenSpec::new(
            12,
            RevenueDist::Uni,
            TransitionKind::Spa,
            seed,
        ));
        let a = solve_mcst_exact(&inst, &ExactOptions::default()).unwrap();
        let b = solve_mcst_exact(
            &inst,
            &ExactOptions {
                eps_no_purchase: 0.5e-9,
                ..ExactOptions::default()
            },
        )
        .unwrap();
        assert!((a.revenue - b.revenue).abs() < 1e-6);
        assert_eq!(a.status, SolveStatus::Optimal);
    }
}

#[test]
fn mip_objective_at_integral_points_matches_evaluator() {
    let inst = gen_random(&GenSpec::new(4, RevenueDist::Exp, TransitionKind::Spa, 8));
    let mip = build_mip(&inst, 1e-9);
    for mask in 0u32..16 {
        let x: Vec<f64> = (0..4).map(|i| f64::from(mask >> i & 1)).collect();
        let value = mip.relaxation_value(&x, &x).unwrap().unwrap();
        let ind: Vec<bool> = x.iter().map(|&v| v == 1.0).collect();
        assert!((value - mcst_revenue_value(&inst, &ind)).abs() < 1e-8);
    }
    let homog = gen_homogeneous(5, RevenueDist::Uni, 2);
    let mip = build_mip(&homog, 1e-9);
    let ones = [1.0; 5];
    let mut best = f64::NEG_INFINITY;
    for mask in 0u32..32 {
        let x: Vec<f64> = (0..5).map(|i| f64::from(mask >> i & 1)).collect();
        best = best.max(mip.relaxation_value(&x, &x).unwrap().unwrap());
    }
    let lp_root = mip.relaxation_value(&[0.0; 5], &ones).unwrap().unwrap();
    assert!(lp_root >= best - 1e-9);
    assert!((best - solve_homogeneous(&homog).unwrap().revenue).abs() < 1e-8);
}

#[test]
fn brute_force_basics() {
    let inst = Instance::from_rows(vec![1.5], vec![1.0], &[vec![1.0, 0.0]]).unwrap();
    let b = brute_force_mcst(&inst, DEFAULT_CAP).unwrap();
    assert_eq!(b.assortment.members(), &[0]);
    let big = gen_random(&GenSpec::new(17, RevenueDist::Uni, TransitionKind::Den, 0));
    assert!(brute_force_mcst(&big, DEFAULT_CAP).is_err());
    let a = brute_force_mcst(
        &gen_random(&GenSpec::new(9, RevenueDist::Uni, TransitionKind::Den, 4)),
        DEFAULT_CAP,
    )
    .unwrap();
    let b = brute_force_mcst(
        &gen_random(&GenSpec::new(9, RevenueDist::Uni, TransitionKind::Den, 4)),
        DEFAULT_CAP,
    )
    .unwrap();
    assert_eq!(
        (a.assortment, a.revenue, a.plan),
        (b.assortment, b.revenue, b.plan)
    );
}

#[test]
fn reduction_is_sound_on_small_graphs() {
    for vertices in 1..=4 {
        for graph in nonisomorphic_graphs(vertices) {
            for k in 1..=vertices {
                let red = reduce_independent_set(&graph, k).unwrap();
                let opt = brute_force_mcst(&red.instance, DEFAULT_CAP)
                    .unwrap()
                    .revenue;
                assert_eq!(
                    red.reaches_threshold(opt),
                    max_independent_set(&graph) >= k,
                    "{graph:?} k {k}"
                );
            }
        }
    }
    assert!(reduce_independent_set(&Graph::new(3, vec![(0, 1)]).unwrap(), 0).is_err());
}

#[test]
fn markov_evaluation_of_the_exact_assortment_never_beats_the_markov_optimum() {
    for seed in 0..5 {
        let inst = gen_random(&GenSpec::new(
            15,
            RevenueDist::Uni,
            TransitionKind::Den,
            seed,
        ));
        let e = solve_mcst_exact(&inst, &ExactOptions::default()).unwrap();
        let m = solve_markov_optimal(&inst, 1e-12, 100_000).unwrap();
        assert!(markov_evaluate(&inst, &e.assortment).unwrap().revenue <= m.revenue + 1e-9);
        let (rev, _) = mcst_revenue(&inst, &m.assortment).unwrap();
        assert!(rev <= e.revenue + 1e-9);
    }
}
