//! Seeded instance families.
//!
//! Every generator draws from ChaCha8 seeded with `seed_from_u64(seed)`.
//! Stream 0 feeds revenues and arrivals; row `j` of the transition matrix is
//! drawn from stream `j + 1`, and tree topologies from stream `u64::MAX`.

mod reduction;
mod tight;

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use serde::{Deserialize, Serialize};

use crate::model::{Instance, Transitions};

pub use reduction::{
    max_independent_set, nonisomorphic_graphs, reduce_independent_set, Graph, GraphError, Reduction,
};
pub use tight::{gen_tight_family, tight_family_optimum, tight_family_p0, TightFamilyError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RevenueDist {
    /// Uniform on `[0, 1]`.
    Uni,
    /// Exponential with mean 1.
    Exp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TransitionKind {
    /// Every weight drawn uniformly, then the row normalized.
    Den,
    /// Like `Den`, but each product weight is kept with probability `1/sqrt(n)`.
    Spa,
    /// One shared row.
    Homog,
    /// One link to a higher-revenue product, the rest to no-purchase.
    Tree,
}

impl fmt::Display for RevenueDist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RevenueDist::Uni => "UNI",
            RevenueDist::Exp => "EXP",
        })
    }
}

impl fmt::Display for TransitionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TransitionKind::Den => "DEN",
            TransitionKind::Spa => "SPA",
            TransitionKind::Homog => "HOMOG",
            TransitionKind::Tree => "TREE",
        })
    }
}

impl FromStr for RevenueDist {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "uni" => Ok(RevenueDist::Uni),
            "exp" => Ok(RevenueDist::Exp),
            _ => Err(format!(
                "unknown revenue distribution '{s}' (expected uni or exp)"
            )),
        }
    }
}

impl FromStr for TransitionKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "den" => Ok(TransitionKind::Den),
            "spa" => Ok(TransitionKind::Spa),
            "homog" | "homogeneous" => Ok(TransitionKind::Homog),
            "tree" => Ok(TransitionKind::Tree),
            _ => Err(format!(
                "unknown transition kind '{s}' (expected den, spa, homog or tree)"
            )),
        }
    }
}

/// Parameters of one random instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenSpec {
    pub n: usize,
    pub revenue: RevenueDist,
    pub transitions: TransitionKind,
    pub seed: u64,
}

impl GenSpec {
    pub fn new(n: usize, revenue: RevenueDist, transitions: TransitionKind, seed: u64) -> Self {
        Self {
            n,
            revenue,
            transitions,
            seed,
        }
    }
}

fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

/// Uniform on `(0, 1]`, so normalizing never divides by zero.
fn positive_unit(rng: &mut ChaCha8Rng) -> f64 {
    1.0 - rng.random::<f64>()
}

fn draw_revenues(rng: &mut ChaCha8Rng, n: usize, dist: RevenueDist) -> Vec<f64> {
    let mut r: Vec<f64> = (0..n)
        .map(|_| match dist {
            RevenueDist::Uni => rng.random::<f64>(),
            RevenueDist::Exp => rng.sample(Exp1),
        })
        .collect();
    r.sort_by(|a, b| b.total_cmp(a));
    r
}

fn normalize(mut v: Vec<f64>) -> Vec<f64> {
    let sum: f64 = v.iter().sum();
    for x in &mut v {
        *x /= sum;
    }
    v
}

fn draw_arrivals(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    normalize((0..n).map(|_| positive_unit(rng)).collect())
}

/// Dense or sparse row `[v_j0, ..., v_jn]`.
fn draw_row(rng: &mut ChaCha8Rng, n: usize, keep: f64) -> Vec<f64> {
    let mut row = Vec::with_capacity(n + 1);
    row.push(positive_unit(rng));
    for _ in 0..n {
        let w = positive_unit(rng);
        let kept = keep >= 1.0 || rng.random::<f64>() < keep;
        row.push(if kept { w } else { 0.0 });
    }
    normalize(row)
}

/// Random instance of the requested family.
pub fn gen_random(spec: &GenSpec) -> Instance {
    assert!(spec.n >= 1, "an instance needs at least one product");
    match spec.transitions {
        TransitionKind::Homog => return gen_homogeneous(spec.n, spec.revenue, spec.seed),
        TransitionKind::Tree => return gen_tree_with(spec.n, spec.revenue, spec.seed),
        _ => {}
    }
    let n = spec.n;
    let mut base = stream(spec.seed, 0);
    let revenues = draw_revenues(&mut base, n, spec.revenue);
    let arrivals = draw_arrivals(&mut base, n);
    let keep = match spec.transitions {
        TransitionKind::Spa => 1.0 / (n as f64).sqrt(),
        _ => 1.0,
    };
    let mut dense = Vec::with_capacity(n * (n + 1));
    for j in 0..n {
        dense.extend(draw_row(&mut stream(spec.seed, j as u64 + 1), n, keep));
    }
    Instance::new(revenues, arrivals, Transitions::Dense(dense))
        .expect("generated dimensions agree")
}

/// Instance whose rows all equal one random row.
pub fn gen_homogeneous(n: usize, revenue: RevenueDist, seed: u64) -> Instance {
    assert!(n >= 1, "an instance needs at least one product");
    let mut base = stream(seed, 0);
    let revenues = draw_revenues(&mut base, n, revenue);
    let arrivals = draw_arrivals(&mut base, n);
    let row = draw_row(&mut stream(seed, 1), n, 1.0);
    Instance::new(revenues, arrivals, Transitions::Homogeneous(row))
        .expect("generated dimensions agree")
}

/// Transit-to-one instance with uniform revenues.
pub fn gen_tree(n: usize, seed: u64) -> Instance {
    gen_tree_with(n, RevenueDist::Uni, seed)
}

/// Transit-to-one instance: product `j > 0` links to a uniformly drawn `k < j`.
pub fn gen_tree_with(n: usize, revenue: RevenueDist, seed: u64) -> Instance {
    assert!(n >= 1, "an instance needs at least one product");
    let mut topo = stream(seed, u64::MAX);
    let parents: Vec<Option<usize>> = (0..n)
        .map(|j| (j > 0).then(|| topo.random_range(0..j)))
        .collect();
    gen_tree_from_parents(&parents, revenue, seed)
}

/// Transit-to-one instance with a prescribed link structure and random parameters.
///
/// `parents[j] = Some(k)` gives product `j` its single link to `k`. Revenues are
/// sorted descending, so links to lower indices point at higher revenues.
pub fn gen_tree_from_parents(
    parents: &[Option<usize>],
    revenue: RevenueDist,
    seed: u64,
) -> Instance {
    let n = parents.len();
    assert!(n >= 1, "an instance needs at least one product");
    let mut base = stream(seed, 0);
    let revenues = draw_revenues(&mut base, n, revenue);
    let arrivals = draw_arrivals(&mut base, n);
    let mut no_purchase = Vec::with_capacity(n);
    let mut links = Vec::with_capacity(n);
    for (j, parent) in parents.iter().enumerate() {
        match *parent {
            Some(k) => {
                assert!(k < n && k != j, "parent of product {j} is invalid");
                let w = stream(seed, j as u64 + 1).random::<f64>();
                no_purchase.push(1.0 - w);
                links.push(if w > 0.0 { vec![(k, w)] } else { Vec::new() });
            }
            None => {
                no_purchase.push(1.0);
                links.push(Vec::new());
            }
        }
    }
    Instance::new(
        revenues,
        arrivals,
        Transitions::Sparse { no_purchase, links },
    )
    .expect("generated dimensions agree")
}

/// Link structure of the six-product tree example: 3->1, 2->1, 4->3, 5->3, 6->5 (1-based).
pub fn figure_tree_parents() -> Vec<Option<usize>> {
    vec![None, Some(0), Some(0), Some(2), Some(2), Some(4)]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::validate_instance;

    #[test]
    fn same_spec_same_instance() {
        for kind in [
            TransitionKind::Den,
            TransitionKind::Spa,
            TransitionKind::Homog,
            TransitionKind::Tree,
        ] {
            let spec = GenSpec::new(5, RevenueDist::Uni, kind, 42);
            assert_eq!(gen_random(&spec), gen_random(&spec));
            let other = GenSpec { seed: 43, ..spec };
            assert_ne!(gen_random(&spec), gen_random(&other));
        }
    }

    #[test]
    fn generated_instances_are_valid() {
        for seed in 0..20 {
            for rev in [RevenueDist::Uni, RevenueDist::Exp] {
                for kind in [
                    TransitionKind::Den,
                    TransitionKind::Spa,
                    TransitionKind::Homog,
                    TransitionKind::Tree,
                ] {
                    let n = 1 + (seed as usize * 7) % 30;
                    let inst = gen_random(&GenSpec::new(n, rev, kind, seed));
                    let report = validate_instance(&inst);
                    assert!(
                        report.is_valid_canonical(),
                        "{kind} {rev} {seed}: {:?}",
                        report.violations
                    );
                    assert!(!report.has_zero_no_purchase);
                    match kind {
                        TransitionKind::Homog => assert!(report.homogeneous),
                        TransitionKind::Tree => {
                            assert!(report.transit_to_one);
                            for j in 0..n {
                                assert!(inst.links(j).all(|(k, _)| k < j));
                            }
                        }
                        _ => {}
                    }
                }
            }
        }
    }

    #[test]
    fn sparse_density_matches_keep_probability() {
        let n = 100;
        let inst = gen_random(&GenSpec::new(n, RevenueDist::Uni, TransitionKind::Spa, 7));
        let zeros: usize = (0..n)
            .map(|j| {
                (0..n)
                    .filter(|&i| i != j && inst.weight(j, i) == 0.0)
                    .count()
            })
            .sum();
        let fraction = zeros as f64 / (n * (n - 1)) as f64;
        assert!((fraction - 0.9).abs() < 0.03, "zero fraction {fraction}");
    }

    #[test]
    fn figure_topology_is_expressible() {
        let inst = gen_tree_from_parents(&figure_tree_parents(), RevenueDist::Uni, 3);
        assert!(inst.is_transit_to_one());
        let targets: Vec<Vec<usize>> = (0..6)
            .map(|j| inst.links(j).map(|(k, _)| k).collect())
            .collect();
        assert_eq!(
            targets,
            vec![vec![], vec![0], vec![0], vec![2], vec![2], vec![4]]
        );
    }

    #[test]
    fn parse_labels() {
        assert_eq!("UNI".parse::<RevenueDist>().unwrap(), RevenueDist::Uni);
        assert_eq!(
            "homog".parse::<TransitionKind>().unwrap(),
            TransitionKind::Homog
        );
        assert!("dense".parse::<TransitionKind>().is_err());
    }
}
