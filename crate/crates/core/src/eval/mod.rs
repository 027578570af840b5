//! Model checking on finite graphs and Stone pairings.
//!
//! The Stone pairing of a formula with free variables `x1..xk` is the
//! probability that a uniformly random k-tuple of vertices (with repetition
//! by default) satisfies it.

mod compile;
mod sampling;

use std::collections::BTreeMap;

use num_rational::Ratio;
use rayon::prelude::*;

use crate::formula::{Formula, FormulaError};
use crate::graph::{Graph, GraphError};

pub use compile::Compiled;
pub use sampling::{
    hoeffding_radius, stone_pairing_mc, stone_pairing_mc_rooted, stone_threshold_mc,
    PairingEstimate, SamplingOptions,
};

/// Exact pairing value.
pub type Pairing = Ratio<u64>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EvalError {
    #[error("variable x{0} is not assigned")]
    UnmappedVariable(u32),
    #[error("formula uses root r{used} but the graph has {available} roots")]
    RootOutOfRange { used: u32, available: usize },
    #[error("vertex {0} is out of range")]
    VertexOutOfRange(usize),
    #[error("enumeration needs {needed} evaluations, budget is {budget}")]
    BudgetExceeded { needed: u128, budget: u64 },
    #[error("sample count must be positive")]
    ZeroSamples,
    #[error("graph has no vertices")]
    EmptyGraph,
    #[error("cannot draw {k} distinct vertices from {n}")]
    TooFewVertices { k: usize, n: usize },
    #[error("confidence must lie strictly between 0 and 1, got {0}")]
    BadConfidence(f64),
    #[error(transparent)]
    Formula(#[from] FormulaError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Values for free variables; root references use the graph's root list.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Assignment(BTreeMap<u32, usize>);

impl Assignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, var: u32, vertex: usize) -> Self {
        self.0.insert(var, vertex);
        self
    }

    pub fn get(&self, var: u32) -> Option<usize> {
        self.0.get(&var).copied()
    }

    /// `x1 = tuple[0]`, `x2 = tuple[1]`, ...
    pub fn from_tuple(tuple: &[usize]) -> Self {
        Assignment(
            tuple
                .iter()
                .enumerate()
                .map(|(i, &v)| (i as u32 + 1, v))
                .collect(),
        )
    }
}

/// Tarskian truth of `f` in `g` under `asg`, quantifiers ranging over all
/// vertices.
pub fn satisfies(g: &Graph, f: &Formula, asg: &Assignment) -> Result<bool, EvalError> {
    satisfies_rooted(g, f, asg, g.roots())
}

pub fn satisfies_rooted(
    g: &Graph,
    f: &Formula,
    asg: &Assignment,
    roots: &[usize],
) -> Result<bool, EvalError> {
    let mut c = Compiled::new(g, f, roots)?;
    let values = c
        .free_variables()
        .iter()
        .map(|&v| {
            let x = asg.get(v).ok_or(EvalError::UnmappedVariable(v))?;
            if x >= g.order() {
                return Err(EvalError::VertexOutOfRange(x));
            }
            Ok(x)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(c.eval(&values))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PairingOptions {
    /// Maximum number of tuples to enumerate.
    pub budget: u64,
    /// Draw tuples with repetition (denominator `n^k`). When false, only
    /// tuples of distinct vertices count (denominator `n(n-1)...(n-k+1)`).
    pub with_repetition: bool,
}

impl Default for PairingOptions {
    fn default() -> Self {
        PairingOptions {
            budget: crate::Limits::default().eval_budget,
            with_repetition: true,
        }
    }
}

impl PairingOptions {
    pub fn with_budget(budget: u64) -> Self {
        PairingOptions {
            budget,
            ..Self::default()
        }
    }
}

/// Exact Stone pairing using the graph's own roots.
pub fn stone_pairing_exact(g: &Graph, f: &Formula) -> Result<Pairing, EvalError> {
    stone_pairing_exact_with(g, f, g.roots(), PairingOptions::default())
}

/// Exact Stone pairing of `f` (free variables exactly `x1..xk`) with the
/// root constants bound to `roots`.
pub fn stone_pairing_exact_with(
    g: &Graph,
    f: &Formula,
    roots: &[usize],
    opts: PairingOptions,
) -> Result<Pairing, EvalError> {
    let k = f.contiguous_arity()?;
    let (hits, total) = count_satisfying(g, f, roots, &[], k, opts)?;
    Ok(Pairing::new(hits, total))
}

/// Counts satisfying assignments of the free variables of `f` that are not
/// pinned. `pinned` fixes `(variable, vertex)` pairs; the remaining `k`
/// variables are enumerated. Returns `(hits, tuples enumerated)`.
pub fn count_satisfying(
    g: &Graph,
    f: &Formula,
    roots: &[usize],
    pinned: &[(u32, usize)],
    expected_free: usize,
    opts: PairingOptions,
) -> Result<(u64, u64), EvalError> {
    let n = g.order();
    if n == 0 {
        return Err(EvalError::EmptyGraph);
    }
    let probe = Compiled::new(g, f, roots)?;
    let free = probe.free_variables().to_vec();
    drop(probe);
    let open: Vec<usize> = free
        .iter()
        .enumerate()
        .filter(|(_, v)| !pinned.iter().any(|(p, _)| p == *v))
        .map(|(s, _)| s)
        .collect();
    if open.len() != expected_free {
        return Err(FormulaError::FreeVariableCount(open.len(), expected_free).into());
    }
    let mut base = vec![0usize; free.len()];
    for &(var, vertex) in pinned {
        if vertex >= n {
            return Err(EvalError::VertexOutOfRange(vertex));
        }
        if let Some(s) = free.iter().position(|&v| v == var) {
            base[s] = vertex;
        }
    }
    let k = open.len();
    let needed = (n as u128).checked_pow(k as u32).unwrap_or(u128::MAX);
    if needed > opts.budget as u128 {
        return Err(EvalError::BudgetExceeded {
            needed,
            budget: opts.budget,
        });
    }
    if !opts.with_repetition && k > n {
        return Err(EvalError::TooFewVertices { k, n });
    }
    if k == 0 {
        let mut c = Compiled::new(g, f, roots)?;
        return Ok((c.eval(&base) as u64, 1));
    }

    // Partition on the first open coordinate; counts merge additively, so the
    // result does not depend on scheduling.
    let (hits, total) = (0..n)
        .into_par_iter()
        .map_init(
            || Compiled::new(g, f, roots).expect("compiled once already"),
            |c, first| {
                let mut values = base.clone();
                let mut digits = vec![0usize; k];
                digits[0] = first;
                let mut hits = 0u64;
                let mut total = 0u64;
                loop {
                    let distinct_ok = opts.with_repetition || all_distinct(&digits);
                    if distinct_ok {
                        for (d, &s) in digits.iter().zip(&open) {
                            values[s] = *d;
                        }
                        total += 1;
                        hits += c.eval(&values) as u64;
                    }
                    // Odometer over coordinates 1..k.
                    let mut i = k;
                    loop {
                        i -= 1;
                        if i == 0 {
                            return (hits, total);
                        }
                        digits[i] += 1;
                        if digits[i] < n {
                            break;
                        }
                        digits[i] = 0;
                    }
                }
            },
        )
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    Ok((hits, total))
}

fn all_distinct(xs: &[usize]) -> bool {
    xs.iter()
        .enumerate()
        .all(|(i, x)| !xs[..i].contains(x))
}

/// Exact pairing of a formula using the single root `r1`, for every choice
/// of that root in vertex order.
pub fn rooted_pairings_all(
    g: &Graph,
    f: &Formula,
    opts: PairingOptions,
) -> Result<Vec<Pairing>, EvalError> {
    let k = f.contiguous_arity()?;
    let n = g.order() as u128;
    let needed = n.saturating_mul(n.checked_pow(k as u32).unwrap_or(u128::MAX));
    if needed > opts.budget as u128 {
        return Err(EvalError::BudgetExceeded {
            needed,
            budget: opts.budget,
        });
    }
    if g.order() == 0 {
        return Err(EvalError::EmptyGraph);
    }
    // One root per task; each task enumerates its k-tuples sequentially.
    (0..g.order())
        .into_par_iter()
        .map(|r| {
            let mut c = Compiled::new(g, f, &[r])?;
            let (hits, total) = enumerate_all(&mut c, g.order(), k, opts.with_repetition);
            Ok(Pairing::new(hits, total))
        })
        .collect()
}

/// Sequential count over all k-tuples of `0..n`.
fn enumerate_all(c: &mut Compiled<'_>, n: usize, k: usize, with_repetition: bool) -> (u64, u64) {
    let mut digits = vec![0usize; k];
    let (mut hits, mut total) = (0u64, 0u64);
    loop {
        if with_repetition || all_distinct(&digits) {
            total += 1;
            hits += c.eval(&digits) as u64;
        }
        let mut i = k;
        loop {
            if i == 0 {
                return (hits, total);
            }
            i -= 1;
            digits[i] += 1;
            if digits[i] < n {
                break;
            }
            digits[i] = 0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse_formula;
    use crate::graph::{generate_hn, hn_a_vertex, hn_b_vertex};

    fn f(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    #[test]
    fn satisfies_examples() {
        let k2 = Graph::complete(2).with_roots(vec![0]).unwrap();
        assert!(satisfies(&k2, &f("adj(x1,r1)"), &Assignment::from_tuple(&[1])).unwrap());
        assert!(satisfies(&k2, &f("x1 = x1"), &Assignment::from_tuple(&[0])).unwrap());

        let h2 = generate_hn(2, 20).unwrap();
        let b = hn_b_vertex(2, 1);
        let h2 = h2.with_roots(vec![b]).unwrap();
        // a = 1 has bit 1 clear.
        let x = hn_a_vertex(2, 1, 0);
        assert!(!satisfies(&h2, &f("adj(x1,r1)"), &Assignment::from_tuple(&[x])).unwrap());
    }

    #[test]
    fn satisfies_errors() {
        let k2 = Graph::complete(2);
        assert_eq!(
            satisfies(&k2, &f("adj(x1,x2)"), &Assignment::from_tuple(&[0])),
            Err(EvalError::UnmappedVariable(2))
        );
        assert!(matches!(
            satisfies(&k2, &f("adj(x1,r1)"), &Assignment::from_tuple(&[0])),
            Err(EvalError::RootOutOfRange { used: 1, available: 0 })
        ));
        assert_eq!(
            satisfies(&k2, &f("adj(x1,x1)"), &Assignment::from_tuple(&[7])),
            Err(EvalError::VertexOutOfRange(7))
        );
    }

    #[test]
    fn quantifiers_and_shadowed_names() {
        let p3 = Graph::new(3, &[(0, 1), (1, 2)], None, vec![]).unwrap();
        let center = f("forall x2. x2 = x1 | adj(x1,x2)");
        let asg = |v| Assignment::from_tuple(&[v]);
        assert!(satisfies(&p3, &center, &asg(1)).unwrap());
        assert!(!satisfies(&p3, &center, &asg(0)).unwrap());
        // Free x1 on the left, bound x1 on the right.
        let g = f("adj(x1,x2) & exists x1. !adj(x1,x2) & !(x1 = x2)");
        // Every vertex other than 1 is adjacent to 1, so no witness exists for x2 = 1.
        assert!(!satisfies(&p3, &g, &Assignment::from_tuple(&[0, 1])).unwrap());
        assert!(satisfies(&p3, &g, &Assignment::from_tuple(&[1, 0])).unwrap());
    }

    #[test]
    fn exact_examples() {
        let h2 = generate_hn(2, 20).unwrap();
        assert_eq!(
            stone_pairing_exact(&h2, &f("exists x1. adj(x1,x1)")).unwrap(),
            Pairing::from_integer(0)
        );
        assert_eq!(
            stone_pairing_exact(&h2, &f("exists x2. adj(x1,x2)")).unwrap(),
            Pairing::new(8, 10)
        );
        assert_eq!(
            stone_pairing_exact(&h2, &f("adj(x1,x2)")).unwrap(),
            Pairing::new(16, 100)
        );
        assert_eq!(
            stone_pairing_exact(&h2, &f("exists x1. true")).unwrap(),
            Pairing::from_integer(1)
        );
    }

    #[test]
    fn exact_errors() {
        let k3 = Graph::complete(3);
        assert!(matches!(
            stone_pairing_exact(&k3, &f("adj(x1,x3)")),
            Err(EvalError::Formula(FormulaError::NonContiguous(_)))
        ));
        assert!(matches!(
            stone_pairing_exact_with(&k3, &f("adj(x1,x2)"), &[], PairingOptions::with_budget(8)),
            Err(EvalError::BudgetExceeded { needed: 9, budget: 8 })
        ));
        let empty = Graph::new(0, &[], None, vec![]).unwrap();
        assert_eq!(stone_pairing_exact(&empty, &f("x1 = x1")), Err(EvalError::EmptyGraph));
    }

    #[test]
    fn without_repetition() {
        let k3 = Graph::complete(3);
        let opts = PairingOptions {
            with_repetition: false,
            ..Default::default()
        };
        // Every pair of distinct vertices of K_3 is adjacent.
        assert_eq!(
            stone_pairing_exact_with(&k3, &f("adj(x1,x2)"), &[], opts).unwrap(),
            Pairing::from_integer(1)
        );
        assert_eq!(
            stone_pairing_exact(&k3, &f("adj(x1,x2)")).unwrap(),
            Pairing::new(6, 9)
        );
        assert!(matches!(
            stone_pairing_exact_with(&Graph::complete(1), &f("adj(x1,x2)"), &[], opts),
            Err(EvalError::TooFewVertices { k: 2, n: 1 })
        ));
    }

    #[test]
    fn pinned_counts() {
        let h2 = generate_hn(2, 20).unwrap();
        let b = hn_b_vertex(2, 0);
        let (hits, total) =
            count_satisfying(&h2, &f("adj(x1,x2)"), &[], &[(2, b)], 1, PairingOptions::default())
                .unwrap();
        assert_eq!((hits, total), (4, 10));
    }

    #[test]
    fn rooted_all_roots() {
        let h2 = generate_hn(2, 20).unwrap();
        let all = rooted_pairings_all(&h2, &f("adj(x1,r1)"), PairingOptions::default()).unwrap();
        assert_eq!(all.len(), 10);
        assert_eq!(all.iter().max().copied(), Some(Pairing::new(4, 10)));
        assert_eq!(all[hn_b_vertex(2, 0)], Pairing::new(4, 10));
    }
}
