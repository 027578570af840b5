//! Enumeration caps. Every exhaustive routine checks its input against one of
//! these before starting work.

use serde::{Deserialize, Serialize};

/// Environment variable overriding [`Limits::eval_budget`].
pub const BUDGET_ENV: &str = "FOLIM_BUDGET";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Limits {
    /// Maximum number of tuples enumerated by an exact pairing, an exhaustive
    /// root search or an exact shadow-probability computation.
    pub eval_budget: u64,
    /// Maximum disjunct count of a materialised threshold formula.
    pub disjunct_cap: u128,
    /// Largest `n` accepted by [`generate_hn`](crate::graph::generate_hn).
    pub hn_cap: u32,
    /// Largest `|B|` for which universality is decided by enumeration.
    pub universality_cap: usize,
    /// Largest `|left| * |right|` accepted by the game solver.
    pub solver_product_cap: usize,
    /// Largest round count accepted by the game solver.
    pub solver_round_cap: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            eval_budget: 100_000_000,
            disjunct_cap: 1_000_000,
            hn_cap: 20,
            universality_cap: 20,
            solver_product_cap: 400,
            solver_round_cap: 5,
        }
    }
}

impl Limits {
    /// Defaults, with `FOLIM_BUDGET` (a positive integer) replacing the
    /// evaluation budget when set.
    pub fn from_env() -> Result<Self, String> {
        let mut limits = Limits::default();
        if let Ok(raw) = std::env::var(BUDGET_ENV) {
            limits.eval_budget = raw
                .trim()
                .parse()
                .ok()
                .filter(|b| *b > 0)
                .ok_or_else(|| format!("{BUDGET_ENV} must be a positive integer, got {raw:?}"))?;
        }
        Ok(limits)
    }
}
