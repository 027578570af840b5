use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::eval::{stone_pairing_exact_with, PairingOptions, SamplingOptions};
use crate::formula::FormulaFamily;
use crate::graph::Graph;

use super::ConvergenceError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RootSearchMode {
    Exhaustive,
    Sampled,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RootSearchResult {
    pub tuple: Vec<usize>,
    /// Exact pairings at the chosen tuple, as `p/q`.
    pub values: Vec<String>,
    pub deviations: Vec<f64>,
    pub delta: f64,
    pub mode: RootSearchMode,
    /// Number of tuples scored.
    pub examined: u64,
}

struct Scored {
    tuple: Vec<usize>,
    values: Vec<String>,
    deviations: Vec<f64>,
    delta: f64,
}

fn score(
    g: &Graph,
    family: &FormulaFamily,
    targets: &[f64],
    tuple: Vec<usize>,
    opts: PairingOptions,
) -> Result<Scored, ConvergenceError> {
    let mut values = Vec::with_capacity(targets.len());
    let mut deviations = Vec::with_capacity(targets.len());
    for (f, &t) in family.formulas().iter().zip(targets) {
        let r = stone_pairing_exact_with(g, f, &tuple, opts)?;
        values.push(format!("{}/{}", r.numer(), r.denom()));
        deviations.push((*r.numer() as f64 / *r.denom() as f64 - t).abs());
    }
    let delta = deviations.iter().copied().fold(0.0, f64::max);
    Ok(Scored {
        tuple,
        values,
        deviations,
        delta,
    })
}

/// Searches for an `m`-tuple of roots whose rooted pairings are all close to
/// `targets`, minimizing the largest deviation. Exhaustive (ties go to the
/// lexicographically first tuple) when `n^m <= budget`; otherwise samples
/// `sampling.samples` tuples if sampling options are given.
pub fn find_roots(
    g: &Graph,
    family: &FormulaFamily,
    targets: &[f64],
    m: usize,
    budget: u64,
    sampling: Option<SamplingOptions>,
    eval_opts: PairingOptions,
) -> Result<RootSearchResult, ConvergenceError> {
    if targets.len() != family.len() {
        return Err(ConvergenceError::TargetLength {
            targets: targets.len(),
            formulas: family.len(),
        });
    }
    if family.root_count() as usize > m {
        return Err(ConvergenceError::RootCount {
            used: family.root_count(),
            m,
        });
    }
    let n = g.order();
    let space = (n as u128).checked_pow(m as u32).unwrap_or(u128::MAX);
    let better = |a: &(u64, Scored), b: &(u64, Scored)| {
        a.1.delta < b.1.delta || (a.1.delta == b.1.delta && a.0 < b.0)
    };
    let pick = |a: (u64, Scored), b: (u64, Scored)| if better(&b, &a) { b } else { a };
    let (mode, examined, best) = if space <= budget as u128 {
        let count = space as u64;
        let best = (0..count)
            .into_par_iter()
            .map(|i| {
                let mut tuple = vec![0usize; m];
                let mut rest = i;
                for slot in tuple.iter_mut().rev() {
                    *slot = (rest % n as u64) as usize;
                    rest /= n as u64;
                }
                score(g, family, targets, tuple, eval_opts).map(|s| (i, s))
            })
            .try_reduce_with(|a, b| Ok(pick(a, b)))
            .transpose()?;
        (RootSearchMode::Exhaustive, count, best)
    } else if let Some(s) = sampling {
        if n == 0 {
            return Err(crate::eval::EvalError::EmptyGraph.into());
        }
        let mut rng = ChaCha8Rng::seed_from_u64(s.seed);
        let tuples: Vec<Vec<usize>> = (0..s.samples)
            .map(|_| (0..m).map(|_| rng.gen_range(0..n)).collect())
            .collect();
        let best = tuples
            .into_par_iter()
            .enumerate()
            .map(|(i, t)| score(g, family, targets, t, eval_opts).map(|s| (i as u64, s)))
            .try_reduce_with(|a, b| Ok(pick(a, b)))
            .transpose()?;
        (RootSearchMode::Sampled, s.samples, best)
    } else {
        return Err(ConvergenceError::BudgetExceeded {
            what: "exhaustive root search",
            needed: space,
            budget,
        });
    };
    let (_, best) = best.ok_or(crate::eval::EvalError::EmptyGraph)?;
    Ok(RootSearchResult {
        tuple: best.tuple,
        values: best.values,
        deviations: best.deviations,
        delta: best.delta,
        mode,
        examined,
    })
}
