//! Finite quasi-metric spaces and the machinery for experimenting with
//! them: axiom scans, forward ε-nets, K-Cauchy subsequence extraction,
//! classification of self-maps, and seeded counterexample searches.
//!
//! The circle counterexample `X = {e^{in}}` with its case-defined
//! asymmetric distance is available as [`spaces::circle_example`], and the
//! shift map `p_n -> p_{n+2}` as [`maps::shift_map`].

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod maps;
pub mod nets;
pub mod search;
pub mod sequences;
pub mod spaces;
pub mod verify;

pub use maps::{classify_map, MapClassification, MapUnderTest, PairWitness};
pub use nets::{greedy_eps_net, verify_net, EpsNet};
pub use spaces::{circle_example, PointId, QuasiMetricSpace};
pub use verify::{check_axioms, ViolationReport};
