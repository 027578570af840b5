//! Stone-pairing trajectories along graph sequences, dyadic intervals, root
//! search against target values, the rooted counterexample on `H_n`, and the
//! tuple-shadow probability experiment.

mod counterexample;
mod roots;
mod shadowprob;
mod trajectory;

use serde::Serialize;

use crate::eval::EvalError;
use crate::formula::FormulaError;
use crate::graph::GraphError;

pub use counterexample::{counterexample_report, CounterexampleReport, CounterexampleRow, RowMethod};
pub use roots::{find_roots, RootSearchMode, RootSearchResult};
pub use shadowprob::{tuple_shadow_probability, ShadowProbability};
pub use trajectory::{
    estimate_limit, trajectory, LimitEstimate, PairingMode, Sequence, Trajectory, TrajectoryPoint,
};

/// Slack for floating-point comparisons against interval endpoints.
pub const EPS_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConvergenceError {
    #[error("{0} is outside [0,1]")]
    OutOfUnit(f64),
    #[error("interval [{0}, {1}] is empty or leaves [0,1]")]
    BadInterval(f64, f64),
    #[error("need at least 3 trajectory points, got {0}")]
    TooFewPoints(usize),
    #[error("{targets} targets for {formulas} formulas")]
    TargetLength { targets: usize, formulas: usize },
    #[error("family uses {used} roots but {m} were requested")]
    RootCount { used: u32, m: usize },
    #[error("graph orders must strictly increase along a sequence ({0} after {1})")]
    NotIncreasing(usize, usize),
    #[error("{what} needs {needed} steps, above the budget {budget}")]
    BudgetExceeded { what: &'static str, needed: u128, budget: u64 },
    #[error("empty range {0}..={1}")]
    EmptyRange(u32, u32),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Formula(#[from] FormulaError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Closed interval inside `[0,1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self, ConvergenceError> {
        if !(0.0..=1.0).contains(&lo) || !(0.0..=1.0).contains(&hi) || lo > hi {
            return Err(ConvergenceError::BadInterval(lo, hi));
        }
        Ok(Interval { lo, hi })
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    /// Distance from `x` to the nearest point of the interval.
    pub fn distance(&self, x: f64) -> f64 {
        if x < self.lo {
            self.lo - x
        } else if x > self.hi {
            x - self.hi
        } else {
            0.0
        }
    }

    pub fn is_subset_of(&self, other: &Interval) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }
}

/// The order-`k` dyadic interval `[a 2^-k, (a+1) 2^-k]` with
/// `a = floor(x 2^k)`; `x = 1` falls into the top interval.
pub fn dyadic_interval(x: f64, k: u32) -> Result<Interval, ConvergenceError> {
    if !(0.0..=1.0).contains(&x) {
        return Err(ConvergenceError::OutOfUnit(x));
    }
    let scale = 2f64.powi(k as i32);
    let a = (x * scale).floor().min(scale - 1.0);
    Ok(Interval {
        lo: a / scale,
        hi: (a + 1.0) / scale,
    })
}

/// One dyadic interval per coordinate.
pub fn dyadic_box(point: &[f64], k: u32) -> Result<Vec<Interval>, ConvergenceError> {
    point.iter().map(|&x| dyadic_interval(x, k)).collect()
}

/// Whether every point of `j` is at distance at least `eps` from `x`.
/// Distances within [`EPS_TOLERANCE`] of `eps` count as far, so decimal
/// inputs like `0.25 - 0.2` hit the boundary as written.
pub fn eps_far(x: f64, j: &Interval, eps: f64) -> bool {
    let d = j.distance(x);
    d > 0.0 && d >= eps - EPS_TOLERANCE
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;

    #[test]
    fn dyadic_examples() {
        assert_eq!(dyadic_interval(0.3, 2).unwrap(), Interval { lo: 0.25, hi: 0.5 });
        assert_eq!(dyadic_interval(2.0 / 3.0, 1).unwrap(), Interval { lo: 0.5, hi: 1.0 });
        assert_eq!(dyadic_interval(1.0, 3).unwrap(), Interval { lo: 0.875, hi: 1.0 });
        assert_eq!(dyadic_interval(0.0, 0).unwrap(), Interval { lo: 0.0, hi: 1.0 });
        assert!(dyadic_interval(1.5, 1).is_err());
        assert!(dyadic_interval(f64::NAN, 1).is_err());
    }

    #[test]
    fn eps_far_examples() {
        let j = Interval::new(0.25, 0.5).unwrap();
        assert!(eps_far(0.1, &j, 0.1));
        assert!(!eps_far(0.3, &j, 0.0001));
        assert!(eps_far(0.2, &j, 0.05));
        assert!(!eps_far(0.2, &j, 0.06));
        assert!(eps_far(0.75, &j, 0.25));
    }

    #[test]
    fn bad_intervals() {
        assert!(Interval::new(0.6, 0.5).is_err());
        assert!(Interval::new(-0.1, 0.5).is_err());
    }

    proptest! {
        #[test]
        fn dyadic_contains_and_nests(x in 0.0f64..=1.0, k in 0u32..30) {
            let j = dyadic_interval(x, k).unwrap();
            prop_assert!(j.contains(x));
            prop_assert_eq!(j.width(), 2f64.powi(-(k as i32)));
            let finer = dyadic_interval(x, k + 1).unwrap();
            prop_assert!(finer.is_subset_of(&j));
        }
    }
}
