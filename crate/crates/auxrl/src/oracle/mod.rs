//! Ground-truth solvers: tabular MDP enumeration, value iteration, an exact
//! Bayes forward filter, expected hitting times, and Monte-Carlo policy
//! evaluation. These back the baselines in the harness and anchor the
//! approximate components (particle filters, learned values) in tests, so
//! they are written against the analytic [`EnumerableModel`] route only and
//! never share code with the components they check.
//!
//! [`EnumerableModel`]: crate::envs::EnumerableModel

pub mod filter;
pub mod hitting;
pub mod mc;
pub mod mdp;
pub mod vi;

pub use filter::{exact_filter, BayesFilter};
pub use hitting::hitting_times;
pub use mc::{mc_evaluate, Evaluation};
pub use mdp::{Edge, OracleError, TabularMdp};
pub use vi::{value_iteration, Solution};
