//! Best-bound branch-and-bound with depth-first plunging.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::time::{Duration, Instant};

use super::benders::{bound_node, CutOracle, Master};
use super::{ExactError, ExactOptions};
use crate::lp::LpOptions;
use crate::tol;

#[derive(Debug, Clone)]
pub struct BnbOutcome {
    pub best: Vec<bool>,
    pub value: f64,
    /// Upper bound on the optimum when the search stopped.
    pub bound: f64,
    pub limit_reached: bool,
    pub nodes: usize,
    pub lp_iterations: usize,
    pub cuts: usize,
    pub incumbent_updates: usize,
    pub kelley_iterations: usize,
    pub build_time: Duration,
}

struct Node {
    lo: Vec<f64>,
    hi: Vec<f64>,
    /// Bound inherited from the parent.
    bound: f64,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Node {}

impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Node {
    fn cmp(&self, other: &Self) -> Ordering {
        self.bound.total_cmp(&other.bound)
    }
}

struct Incumbent {
    x: Vec<bool>,
    value: f64,
    updates: usize,
}

impl Incumbent {
    fn offer(&mut self, x: Vec<bool>, value: f64) -> bool {
        if value > self.value + tol::gap_allowance(self.value) {
            self.x = x;
            self.value = value;
            self.updates += 1;
            true
        } else {
            false
        }
    }

    fn cutoff(&self) -> f64 {
        self.value + tol::gap_allowance(self.value)
    }
}

/// Repeatedly applies the first improving single flip.
fn local_search<O: CutOracle>(oracle: &O, inc: &mut Incumbent) {
    let n = oracle.n();
    let mut improved = true;
    while improved {
        improved = false;
        for i in 0..n {
            let mut x = inc.x.clone();
            x[i] = !x[i];
            let value = oracle.evaluate(&x);
            if inc.offer(x, value) {
                improved = true;
            }
        }
    }
}

/// Maximizes the oracle's objective over `{0,1}^n`, starting from `warm`.
pub fn branch_and_bound<O: CutOracle>(
    oracle: &O,
    warm: Vec<bool>,
    options: &ExactOptions,
) -> Result<BnbOutcome, ExactError> {
    let start = Instant::now();
    let n = oracle.n();
    let value = oracle.evaluate(&warm);
    let mut inc = Incumbent {
        x: warm,
        value,
        updates: 0,
    };
    if options.local_search {
        local_search(oracle, &mut inc);
    }
    let mut master = Master::new(oracle, LpOptions::default())?;
    let build_time = start.elapsed();

    let a_priori: f64 = oracle.linear().iter().map(|c| c.max(0.0)).sum::<f64>()
        + (0..n).map(|j| oracle.theta_bounds(j).1).sum::<f64>();
    let mut heap = BinaryHeap::new();
    let mut current = Some(Node {
        lo: vec![0.0; n],
        hi: vec![1.0; n],
        bound: a_priori,
    });
    let mut nodes = 0;
    let mut kelley_iterations = 0;
    let mut limit_reached = false;

    loop {
        let node = match current.take() {
            Some(node) => node,
            None => match heap.pop() {
                Some(node) => node,
                None => break,
            },
        };
        if node.bound <= inc.cutoff() {
            continue;
        }
        let out_of_nodes = options.node_limit.is_some_and(|limit| nodes >= limit);
        let out_of_time = options
            .time_limit
            .is_some_and(|limit| start.elapsed() >= limit);
        if out_of_nodes || out_of_time {
            heap.push(node);
            limit_reached = true;
            break;
        }
        nodes += 1;
        master.set_box(&node.lo, &node.hi);
        let nb = bound_node(
            oracle,
            &mut master,
            inc.cutoff(),
            options.kelley_max_iterations,
        )?;
        kelley_iterations += nb.iterations;
        if nb.pruned {
            continue;
        }
        let bound = nb.bound.min(node.bound);

        let rounded: Vec<bool> = nb.x.iter().map(|&v| v >= 0.5).collect();
        let value = oracle.evaluate(&rounded);
        inc.offer(rounded, value);
        if bound <= inc.cutoff() {
            continue;
        }

        let fractional = (0..n)
            .filter(|&i| {
                let v = nb.x[i];
                v > tol::INTEGRALITY && v < 1.0 - tol::INTEGRALITY
            })
            .min_by(|&a, &b| {
                (nb.x[a] - 0.5)
                    .abs()
                    .total_cmp(&(nb.x[b] - 0.5).abs())
                    .then(a.cmp(&b))
            });
        let branch = match fractional {
            Some(i) => i,
            None if nb.converged => continue,
            None => match (0..n).find(|&i| node.lo[i] < node.hi[i]) {
                Some(i) => i,
                None => continue,
            },
        };
        let mut up = Node {
            lo: node.lo.clone(),
            hi: node.hi.clone(),
            bound,
        };
        up.lo[branch] = 1.0;
        let mut down = node;
        down.bound = bound;
        down.hi[branch] = 0.0;
        let (near, far) = if nb.x[branch] >= 0.5 {
            (up, down)
        } else {
            (down, up)
        };
        heap.push(far);
        current = Some(near);
    }

    let open = heap
        .iter()
        .map(|node| node.bound)
        .fold(f64::NEG_INFINITY, f64::max);
    let bound = if limit_reached {
        open.max(inc.value)
    } else {
        inc.value
    };
    Ok(BnbOutcome {
        best: inc.x,
        value: inc.value,
        bound,
        limit_reached,
        nodes,
        lp_iterations: master.lp_iterations(),
        cuts: master.cuts(),
        incumbent_updates: inc.updates,
        kelley_iterations,
        build_time,
    })
}
