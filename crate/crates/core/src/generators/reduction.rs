//! Independent-set instances encoded as MCST instances.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{Instance, Transitions};

#[derive(Debug, Error, PartialEq)]
pub enum GraphError {
    #[error("edge ({0}, {1}) is a self-loop")]
    SelfLoop(usize, usize),
    #[error("edge ({0}, {1}) appears twice")]
    Duplicate(usize, usize),
    #[error("edge ({0}, {1}) uses a vertex outside 0..{2}")]
    OutOfRange(usize, usize, usize),
    #[error("k must satisfy 0 < k <= {vertices}, got {k}")]
    BadK { k: usize, vertices: usize },
}

/// Simple undirected graph on vertices `0..vertices`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Graph {
    pub vertices: usize,
    pub edges: Vec<(usize, usize)>,
}

impl Graph {
    pub fn new(vertices: usize, edges: Vec<(usize, usize)>) -> Result<Self, GraphError> {
        let g = Self { vertices, edges };
        g.check()?;
        Ok(g)
    }

    pub fn check(&self) -> Result<(), GraphError> {
        let mut seen = BTreeSet::new();
        for &(u, v) in &self.edges {
            if u >= self.vertices || v >= self.vertices {
                return Err(GraphError::OutOfRange(u, v, self.vertices));
            }
            if u == v {
                return Err(GraphError::SelfLoop(u, v));
            }
            if !seen.insert((u.min(v), u.max(v))) {
                return Err(GraphError::Duplicate(u, v));
            }
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> anyhow::Result<Self> {
        let g: Graph = serde_json::from_str(text)?;
        g.check()?;
        Ok(g)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("plain data serializes")
    }
}

/// Reduced instance plus the rescaled revenue threshold.
#[derive(Debug, Clone)]
pub struct Reduction {
    pub instance: Instance,
    /// Factor applied to the unnormalized arrivals, `1 / (m + n/(n+k))`.
    pub scale: f64,
    /// `(m + 1) * scale`: an independent set of size `k` exists iff OPT reaches it.
    pub threshold: f64,
    pub vertices: usize,
    pub edges: usize,
}

impl Reduction {
    /// Index of the dummy product.
    pub const DUMMY: usize = 0;

    pub fn vertex_product(v: usize) -> usize {
        1 + v
    }

    pub fn edge_product(&self, e: usize) -> usize {
        1 + self.vertices + e
    }

    /// Threshold test with an absolute slack of `1e-9`.
    pub fn reaches_threshold(&self, revenue: f64) -> bool {
        revenue >= self.threshold - 1e-9
    }
}

/// Products in canonical order: the dummy (revenue 2), one per vertex
/// (revenue 1), one per edge (revenue 0).
///
/// Unnormalized arrivals are 0, `1/(n+k)` and 1; they are divided by their sum.
/// Edge products transit to both endpoints with weight 1/2, vertex products to
/// the dummy with weight 1, and neither has a no-purchase weight.
pub fn reduce_independent_set(g: &Graph, k: usize) -> Result<Reduction, GraphError> {
    g.check()?;
    let n = g.vertices;
    if k == 0 || k > n {
        return Err(GraphError::BadK { k, vertices: n });
    }
    let m = g.edges.len();
    let products = 1 + n + m;
    let vertex_arrival = 1.0 / (n + k) as f64;
    let scale = 1.0 / (m as f64 + n as f64 * vertex_arrival);

    let mut revenues = vec![2.0];
    let mut arrivals = vec![0.0];
    let mut no_purchase = vec![1.0];
    let mut links = vec![Vec::new()];
    for _ in 0..n {
        revenues.push(1.0);
        arrivals.push(vertex_arrival * scale);
        no_purchase.push(0.0);
        links.push(vec![(Reduction::DUMMY, 1.0)]);
    }
    for &(u, v) in &g.edges {
        let (a, b) = (u.min(v), u.max(v));
        revenues.push(0.0);
        arrivals.push(scale);
        no_purchase.push(0.0);
        links.push(vec![
            (Reduction::vertex_product(a), 0.5),
            (Reduction::vertex_product(b), 0.5),
        ]);
    }
    debug_assert_eq!(revenues.len(), products);
    let instance = Instance::new(
        revenues,
        arrivals,
        Transitions::Sparse { no_purchase, links },
    )
    .expect("reduction dimensions agree");
    Ok(Reduction {
        instance,
        scale,
        threshold: (m as f64 + 1.0) * scale,
        vertices: n,
        edges: m,
    })
}

/// Size of a maximum independent set, by enumeration.
pub fn max_independent_set(g: &Graph) -> usize {
    assert!(
        g.vertices < 32,
        "enumeration limited to fewer than 32 vertices"
    );
    let masks: Vec<u32> = g
        .edges
        .iter()
        .map(|&(u, v)| (1u32 << u) | (1u32 << v))
        .collect();
    (0u32..1 << g.vertices)
        .filter(|&s| masks.iter().all(|&e| s & e != e))
        .map(|s| s.count_ones() as usize)
        .max()
        .unwrap_or(0)
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn go(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                go(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

/// One representative per isomorphism class of graphs on exactly `vertices` vertices.
pub fn nonisomorphic_graphs(vertices: usize) -> Vec<Graph> {
    assert!(vertices <= 7, "enumeration limited to 7 vertices");
    let pairs: Vec<(usize, usize)> = (0..vertices)
        .flat_map(|u| (u + 1..vertices).map(move |v| (u, v)))
        .collect();
    let index = |u: usize, v: usize| {
        let (a, b) = (u.min(v), u.max(v));
        pairs
            .iter()
            .position(|&p| p == (a, b))
            .expect("pair listed")
    };
    let perms = permutations(vertices);
    let relabel: Vec<Vec<usize>> = perms
        .iter()
        .map(|p| pairs.iter().map(|&(u, v)| index(p[u], p[v])).collect())
        .collect();
    let mut classes = BTreeSet::new();
    for mask in 0u64..1 << pairs.len() {
        let canonical = relabel
            .iter()
            .map(|map| {
                (0..pairs.len())
                    .filter(|&e| mask >> e & 1 == 1)
                    .fold(0u64, |acc, e| acc | 1 << map[e])
            })
            .min()
            .expect("at least the identity permutation");
        classes.insert(canonical);
    }
    classes
        .into_iter()
        .map(|mask| Graph {
            vertices,
            edges: (0..pairs.len())
                .filter(|&e| mask >> e & 1 == 1)
                .map(|e| pairs[e])
                .collect(),
        })
        .collect()
}
