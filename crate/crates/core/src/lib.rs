//! Matchings under one-sided preferences.
//!
//! The crate computes AUPCR-maximizing matchings (and their maximum-cardinality
//! variant) through a reduction to maximum-weight perfect matching, alongside
//! the classical Pareto optimal, rank-maximal, popular and fair matchers, the
//! metrics used to compare them, seeded instance generators, an exhaustive
//! oracle for small instances, and a grid runner for experiments.

pub mod aupcr;
pub mod classic;
pub mod error;
pub mod fixtures;
pub mod gen;
pub mod harness;
pub mod instance;
pub mod metrics;
pub mod oracle;
pub mod wmatch;

pub use aupcr::{compute_aupcr, solve_amm, solve_mcamm, AupcrValue};
pub use classic::{solve_fm, solve_pom, solve_popular, solve_rmm, PopularResult};
pub use error::{Error, Result};
pub use instance::{
    compare_fair, compare_rank_maximal, parse_instance, parse_matching, signature_of, Instance,
    Matching, Signature,
};
pub use metrics::{evaluate_all, unpopularity_margin, MetricsRecord};
