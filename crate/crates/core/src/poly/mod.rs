//! Polynomial-time solvers: homogeneous instances, transit-to-one instances and
//! the best revenue-ordered assortment.

mod homogeneous;
mod ro;
mod tree;

pub use homogeneous::{homogeneous_prefix_ratios, solve_homogeneous};
pub use ro::{best_revenue_ordered, RoCertificate};
pub use tree::{solve_tree_dp, tree_dp_values, TreeDpValues};

use thiserror::Error;

use crate::model::ModelError;

#[derive(Debug, Error)]
pub enum PolyError {
    #[error("instance is not homogeneous: rows differ")]
    NotHomogeneous,
    #[error("instance is not transit-to-one: product {0} links to several products")]
    NotTransitToOne(usize),
    #[error("revenues must be sorted non-increasing; canonicalize the instance first")]
    NotCanonical,
    #[error(transparent)]
    Model(#[from] ModelError),
}
