//! Tools for first-order convergence of graphs.
//!
//! * [`formula`]: first-order formulas over the graph language, parsing and
//!   constructions.
//! * [`graph`]: finite graphs with bipartition and roots, the `H_n` family,
//!   restricted adjacency matrices, shadows and universality.
//! * [`eval`]: model checking and Stone pairings, exact and sampled.
//! * [`efgame`]: Ehrenfeucht–Fraïssé games, a memoizing solver and agents.
//! * [`strategy`]: the constructive duplicator strategy for universal
//!   bipartite graphs.
//! * [`convergence`]: trajectories, dyadic intervals, root search and the
//!   rooted-limit counterexample.

pub mod cli;
pub mod convergence;
pub mod efgame;
pub mod eval;
pub mod formula;
pub mod graph;
pub mod limits;
pub mod server;
pub mod strategy;

pub use formula::{format_formula, parse_formula, Formula, FormulaFamily, Term};
pub use graph::{generate_hn, Graph, Side};
pub use limits::Limits;
