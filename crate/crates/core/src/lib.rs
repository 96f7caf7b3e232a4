//! Assortment optimization under the Markov chain choice model with a single
//! transition (MCST): models, instance generators, polynomial-time solvers,
//! an exact branch-and-bound solver and the experiment harness.

pub mod cli;
pub mod exact;
pub mod experiments;
pub mod generators;
pub mod lp;
pub mod model;
pub mod poly;
pub mod solution;
pub mod tol;

pub use model::{Assortment, Instance, RecommendationPlan, Transitions};
