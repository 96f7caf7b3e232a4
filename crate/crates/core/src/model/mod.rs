//! Domain types for the single-transition Markov chain choice model (MCST).
//!
//! Products are indexed `0..n` internally. File formats and the CLI use the
//! 1-based labels `1..=n`, with label `0` reserved for the no-purchase option.

mod assortment;
mod eval;
mod io;
mod validate;

pub use assortment::{Assortment, RecommendationPlan};
pub(crate) use eval::solve_in_place;
pub use eval::{
    best_recommendation, choosy_revenue, markov_evaluate, mcst_evaluate, mcst_revenue,
    mcst_revenue_value, Evaluation,
};
pub use io::InstanceFile;
pub use validate::{canonicalize, validate_instance, Permutation, ValidationReport, Violation};

use thiserror::Error;

/// Errors raised while building or evaluating instances.
#[derive(Debug, Error)]
pub enum ModelError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("product {product} is out of range for n = {n}")]
    ProductOutOfRange { product: usize, n: usize },
    #[error("product {0} is offered, recommendations exist only for unavailable products")]
    ProductOffered(usize),
    #[error("invalid recommendation plan: {0}")]
    InvalidPlan(String),
    #[error("invalid instance: {0}")]
    Invalid(String),
    #[error("the chain restricted to unavailable products is not absorbing")]
    NonAbsorbing,
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Transition weights `v[j][i]` of an instance.
///
/// Column 0 of the conceptual `n x (n+1)` matrix is the no-purchase weight.
/// Large structured instances (homogeneous, transit-to-one) never need the
/// dense matrix, so three storage layouts are supported.
#[derive(Debug, Clone, PartialEq)]
pub enum Transitions {
    /// Row-major `n x (n+1)` matrix.
    Dense(Vec<f64>),
    /// One row of `n+1` weights shared by every product.
    Homogeneous(Vec<f64>),
    /// Per-row no-purchase weight plus the positive product weights, sorted by target.
    Sparse {
        no_purchase: Vec<f64>,
        links: Vec<Vec<(usize, f64)>>,
    },
}

/// An MCST instance: revenues `r`, arrival probabilities `lambda`, transition weights `v`.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    revenues: Vec<f64>,
    arrivals: Vec<f64>,
    transitions: Transitions,
}

impl Instance {
    /// Builds an instance from a dense `n x (n+1)` matrix given row by row.
    pub fn from_rows(
        revenues: Vec<f64>,
        arrivals: Vec<f64>,
        rows: &[Vec<f64>],
    ) -> Result<Self, ModelError> {
        let n = revenues.len();
        if rows.len() != n {
            return Err(ModelError::Dimension(format!(
                "{} transition rows for {} products",
                rows.len(),
                n
            )));
        }
        let mut dense = Vec::with_capacity(n * (n + 1));
        for (j, row) in rows.iter().enumerate() {
            if row.len() != n + 1 {
                return Err(ModelError::Dimension(format!(
                    "row {} has {} entries, expected {}",
                    j + 1,
                    row.len(),
                    n + 1
                )));
            }
            dense.extend_from_slice(row);
        }
        Self::new(revenues, arrivals, Transitions::Dense(dense))
    }

    /// Builds an instance, checking only that the dimensions agree.
    ///
    /// Value-level assumptions (sums, signs, ordering) are reported by
    /// [`validate_instance`] rather than rejected here.
    pub fn new(
        revenues: Vec<f64>,
        arrivals: Vec<f64>,
        transitions: Transitions,
    ) -> Result<Self, ModelError> {
        let n = revenues.len();
        if n == 0 {
            return Err(ModelError::Dimension(
                "an instance needs at least one product".into(),
            ));
        }
        if arrivals.len() != n {
            return Err(ModelError::Dimension(format!(
                "{} arrival probabilities for {} products",
                arrivals.len(),
                n
            )));
        }
        match &transitions {
            Transitions::Dense(w) if w.len() != n * (n + 1) => {
                return Err(ModelError::Dimension(format!(
                    "dense transition matrix has {} entries, expected {}",
                    w.len(),
                    n * (n + 1)
                )))
            }
            Transitions::Homogeneous(row) if row.len() != n + 1 => {
                return Err(ModelError::Dimension(format!(
                    "homogeneous row has {} entries, expected {}",
                    row.len(),
                    n + 1
                )))
            }
            Transitions::Sparse { no_purchase, links } => {
                if no_purchase.len() != n || links.len() != n {
                    return Err(ModelError::Dimension("sparse rows do not match n".into()));
                }
                for row in links {
                    if row.iter().any(|&(i, _)| i >= n) {
                        return Err(ModelError::Dimension(
                            "sparse link target out of range".into(),
                        ));
                    }
                    if row.windows(2).any(|w| w[0].0 >= w[1].0) {
                        return Err(ModelError::Dimension(
                            "sparse links must be sorted by target without duplicates".into(),
                        ));
                    }
                }
            }
            _ => {}
        }
        Ok(Self {
            revenues,
            arrivals,
            transitions,
        })
    }

    pub fn n(&self) -> usize {
        self.revenues.len()
    }

    pub fn revenues(&self) -> &[f64] {
        &self.revenues
    }

    pub fn arrivals(&self) -> &[f64] {
        &self.arrivals
    }

    pub fn transitions(&self) -> &Transitions {
        &self.transitions
    }

    pub fn revenue(&self, i: usize) -> f64 {
        self.revenues[i]
    }

    pub fn arrival(&self, i: usize) -> f64 {
        self.arrivals[i]
    }

    /// No-purchase weight `v_j0`.
    pub fn no_purchase(&self, j: usize) -> f64 {
        match &self.transitions {
            Transitions::Dense(w) => w[j * (self.n() + 1)],
            Transitions::Homogeneous(row) => row[0],
            Transitions::Sparse { no_purchase, .. } => no_purchase[j],
        }
    }

    /// Weight `v_ji` from product `j` to product `i`.
    pub fn weight(&self, j: usize, i: usize) -> f64 {
        match &self.transitions {
            Transitions::Dense(w) => w[j * (self.n() + 1) + i + 1],
            Transitions::Homogeneous(row) => row[i + 1],
            Transitions::Sparse { links, .. } => links[j]
                .binary_search_by_key(&i, |&(k, _)| k)
                .map(|pos| links[j][pos].1)
                .unwrap_or(0.0),
        }
    }

    /// Nonzero product weights of row `j` (self weight included), ascending by target.
    pub fn links(&self, j: usize) -> Links<'_> {
        let n = self.n();
        match &self.transitions {
            Transitions::Dense(w) => {
                Links::Dense(w[j * (n + 1) + 1..(j + 1) * (n + 1)].iter().enumerate())
            }
            Transitions::Homogeneous(row) => Links::Dense(row[1..].iter().enumerate()),
            Transitions::Sparse { links, .. } => Links::Sparse(links[j].iter()),
        }
    }

    /// Full row `[v_j0, v_j1, ..., v_jn]`.
    pub fn row(&self, j: usize) -> Vec<f64> {
        let mut row = vec![0.0; self.n() + 1];
        row[0] = self.no_purchase(j);
        for (i, w) in self.links(j) {
            row[i + 1] = w;
        }
        row
    }

    /// True when the revenues are non-increasing (the canonical product order).
    pub fn is_canonical(&self) -> bool {
        self.revenues.windows(2).all(|w| w[0] >= w[1])
    }

    /// True when every row carries the same weights.
    pub fn is_homogeneous(&self) -> bool {
        match &self.transitions {
            Transitions::Homogeneous(_) => true,
            _ => {
                let first = self.row(0);
                (1..self.n()).all(|j| self.row(j) == first)
            }
        }
    }

    /// True when every product has positive weight to at most one other product.
    pub fn is_transit_to_one(&self) -> bool {
        (0..self.n()).all(|j| self.links(j).filter(|&(i, _)| i != j).count() <= 1)
    }

    /// Copy of the instance with `v_j0` raised to at least `eps` on every row.
    ///
    /// Rows are not renormalized: the substitution stands in for an
    /// infinitesimal no-purchase weight.
    pub fn with_min_no_purchase(&self, eps: f64) -> Instance {
        let n = self.n();
        let transitions = match &self.transitions {
            Transitions::Dense(w) => {
                let mut w = w.clone();
                for j in 0..n {
                    let k = j * (n + 1);
                    w[k] = w[k].max(eps);
                }
                Transitions::Dense(w)
            }
            Transitions::Homogeneous(row) => {
                let mut row = row.clone();
                row[0] = row[0].max(eps);
                Transitions::Homogeneous(row)
            }
            Transitions::Sparse { no_purchase, links } => Transitions::Sparse {
                no_purchase: no_purchase.iter().map(|&v| v.max(eps)).collect(),
                links: links.clone(),
            },
        };
        Instance {
            revenues: self.revenues.clone(),
            arrivals: self.arrivals.clone(),
            transitions,
        }
    }
}

/// Iterator over the positive product weights of one row.
pub enum Links<'a> {
    Dense(std::iter::Enumerate<std::slice::Iter<'a, f64>>),
    Sparse(std::slice::Iter<'a, (usize, f64)>),
}

impl Iterator for Links<'_> {
    type Item = (usize, f64);

    fn next(&mut self) -> Option<(usize, f64)> {
        match self {
            Links::Dense(it) => it.find(|(_, &w)| w != 0.0).map(|(i, &w)| (i, w)),
            Links::Sparse(it) => it.next().copied(),
        }
    }
}

/// The instance of the regularity example: four products, uniform arrivals.
///
/// Rows 3 and 4 are not pinned down by the example; any valid rows work
/// because those products are offered in both assortments of interest.
pub fn regularity_example() -> Instance {
    let rows = vec![
        vec![0.5, 0.0, 0.0, 0.0, 0.5],
        vec![1.0 / 3.0, 1.0 / 6.0, 0.0, 1.0 / 6.0, 1.0 / 3.0],
        vec![0.5, 0.25, 0.25, 0.0, 0.0],
        vec![0.25, 0.25, 0.25, 0.25, 0.0],
    ];
    Instance::from_rows(vec![4.0, 3.0, 2.0, 1.0], vec![0.25; 4], &rows)
        .expect("static example is well formed")
}
