//! First-order formulas over the graph language: one binary relation
//! (adjacency), equality, and root constants `r1..rm`.

mod construct;
mod family;
mod parser;
mod print;

use std::collections::BTreeSet;
use std::fmt;

pub use construct::{build_threshold_formula, disjunct_count, threshold_range, unroot, DEFAULT_DISJUNCT_CAP};
pub use family::FormulaFamily;
pub use parser::parse_formula;
pub use print::format_formula;

/// Variable or root constant. Indices are 1-based (`x1`, `r1`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(u32),
    Root(u32),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Adjacent(Term, Term),
    Equal(Term, Term),
    True,
    False,
    Not(Box<Formula>),
    /// At least two children.
    And(Vec<Formula>),
    /// At least two children.
    Or(Vec<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Exists(u32, Box<Formula>),
    Forall(u32, Box<Formula>),
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FormulaError {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("variable x{var} is bound twice on one path")]
    Rebound { var: u32 },
    #[error("index 0 is not allowed (variables and roots start at 1)")]
    ZeroIndex,
    #[error("{0} needs at least two operands")]
    Arity(&'static str),
    #[error("free variables must be x1..xk without gaps, got {0:?}")]
    NonContiguous(Vec<u32>),
    #[error("formula uses root r{used} but only {available} roots are available")]
    RootOutOfRange { used: u32, available: usize },
    #[error("formula has {0} free variables, expected {1}")]
    FreeVariableCount(usize, usize),
    #[error("threshold formula would have {count} disjuncts, cap is {cap}")]
    CapExceeded { count: u128, cap: u128 },
    #[error("lower bound {a} exceeds upper bound {b}")]
    EmptyInterval { a: f64, b: f64 },
    #[error("{0}")]
    Invalid(String),
}

impl Formula {
    pub fn adj(a: Term, b: Term) -> Formula {
        Formula::Adjacent(a, b)
    }

    pub fn eq(a: Term, b: Term) -> Formula {
        Formula::Equal(a, b)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn exists(var: u32, body: Formula) -> Formula {
        Formula::Exists(var, Box::new(body))
    }

    pub fn forall(var: u32, body: Formula) -> Formula {
        Formula::Forall(var, Box::new(body))
    }

    /// Conjunction that degrades gracefully: no children gives `true`, one child is returned as is.
    pub fn and_of(mut children: Vec<Formula>) -> Formula {
        match children.len() {
            0 => Formula::True,
            1 => children.pop().unwrap(),
            _ => Formula::And(children),
        }
    }

    /// Disjunction; no children gives `false`, one child is returned as is.
    pub fn or_of(mut children: Vec<Formula>) -> Formula {
        match children.len() {
            0 => Formula::False,
            1 => children.pop().unwrap(),
            _ => Formula::Or(children),
        }
    }

    /// Maximal nesting of quantifiers.
    pub fn quantifier_depth(&self) -> usize {
        match self {
            Formula::Adjacent(..) | Formula::Equal(..) | Formula::True | Formula::False => 0,
            Formula::Not(f) => f.quantifier_depth(),
            Formula::And(fs) | Formula::Or(fs) => {
                fs.iter().map(Formula::quantifier_depth).max().unwrap_or(0)
            }
            Formula::Implies(a, b) => a.quantifier_depth().max(b.quantifier_depth()),
            Formula::Exists(_, f) | Formula::Forall(_, f) => 1 + f.quantifier_depth(),
        }
    }

    /// Indices of variables with at least one unbound occurrence.
    pub fn free_variables(&self) -> BTreeSet<u32> {
        let mut out = BTreeSet::new();
        let mut bound = Vec::new();
        self.collect_free(&mut bound, &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<u32>, out: &mut BTreeSet<u32>) {
        let mut term = |t: &Term, bound: &Vec<u32>| {
            if let Term::Var(i) = t {
                if !bound.contains(i) {
                    out.insert(*i);
                }
            }
        };
        match self {
            Formula::Adjacent(a, b) | Formula::Equal(a, b) => {
                term(a, bound);
                term(b, bound);
            }
            Formula::True | Formula::False => {}
            Formula::Not(f) => f.collect_free(bound, out),
            Formula::And(fs) | Formula::Or(fs) => {
                for f in fs {
                    f.collect_free(bound, out);
                }
            }
            Formula::Implies(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Formula::Exists(v, f) | Formula::Forall(v, f) => {
                bound.push(*v);
                f.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    /// Largest root index used, 0 if the formula mentions no root.
    pub fn max_root(&self) -> u32 {
        let mut max = 0;
        self.visit_terms(&mut |t| {
            if let Term::Root(j) = t {
                max = max.max(j);
            }
        });
        max
    }

    /// Largest variable index occurring anywhere, bound or free.
    pub fn max_var(&self) -> u32 {
        let mut max = 0;
        self.visit_terms(&mut |t| {
            if let Term::Var(i) = t {
                max = max.max(i);
            }
        });
        fn quantified(f: &Formula, max: &mut u32) {
            match f {
                Formula::Exists(v, b) | Formula::Forall(v, b) => {
                    *max = (*max).max(*v);
                    quantified(b, max);
                }
                Formula::Not(b) => quantified(b, max),
                Formula::And(fs) | Formula::Or(fs) => fs.iter().for_each(|g| quantified(g, max)),
                Formula::Implies(a, b) => {
                    quantified(a, max);
                    quantified(b, max);
                }
                _ => {}
            }
        }
        quantified(self, &mut max);
        max
    }

    pub(crate) fn visit_terms(&self, f: &mut impl FnMut(Term)) {
        match self {
            Formula::Adjacent(a, b) | Formula::Equal(a, b) => {
                f(*a);
                f(*b);
            }
            Formula::True | Formula::False => {}
            Formula::Not(g) | Formula::Exists(_, g) | Formula::Forall(_, g) => g.visit_terms(f),
            Formula::And(gs) | Formula::Or(gs) => gs.iter().for_each(|g| g.visit_terms(f)),
            Formula::Implies(a, b) => {
                a.visit_terms(f);
                b.visit_terms(f);
            }
        }
    }

    /// Checks the structural invariants: no zero indices, no rebinding along a
    /// path, and `And`/`Or` arity.
    pub fn validate(&self) -> Result<(), FormulaError> {
        fn go(f: &Formula, bound: &mut Vec<u32>) -> Result<(), FormulaError> {
            let term = |t: &Term| match t {
                Term::Var(0) | Term::Root(0) => Err(FormulaError::ZeroIndex),
                _ => Ok(()),
            };
            match f {
                Formula::Adjacent(a, b) | Formula::Equal(a, b) => {
                    term(a)?;
                    term(b)
                }
                Formula::True | Formula::False => Ok(()),
                Formula::Not(g) => go(g, bound),
                Formula::And(gs) | Formula::Or(gs) => {
                    if gs.len() < 2 {
                        return Err(FormulaError::Arity(if matches!(f, Formula::And(_)) {
                            "conjunction"
                        } else {
                            "disjunction"
                        }));
                    }
                    gs.iter().try_for_each(|g| go(g, bound))
                }
                Formula::Implies(a, b) => {
                    go(a, bound)?;
                    go(b, bound)
                }
                Formula::Exists(v, g) | Formula::Forall(v, g) => {
                    if *v == 0 {
                        return Err(FormulaError::ZeroIndex);
                    }
                    if bound.contains(v) {
                        return Err(FormulaError::Rebound { var: *v });
                    }
                    bound.push(*v);
                    let r = go(g, bound);
                    bound.pop();
                    r
                }
            }
        }
        go(self, &mut Vec::new())
    }

    /// Number of free variables, requiring them to be exactly `x1..xk`.
    pub fn contiguous_arity(&self) -> Result<usize, FormulaError> {
        let free = self.free_variables();
        let k = free.len();
        if free.iter().copied().eq(1..=k as u32) {
            Ok(k)
        } else {
            Err(FormulaError::NonContiguous(free.into_iter().collect()))
        }
    }

    /// Applies `map` to every free occurrence of a variable and `bound_map` to
    /// every quantified variable (binder and its occurrences).
    pub(crate) fn rename(
        &self,
        free_map: &impl Fn(u32) -> Term,
        bound_map: &impl Fn(u32) -> u32,
        roots: &impl Fn(u32) -> Term,
    ) -> Formula {
        fn go(
            f: &Formula,
            bound: &mut Vec<u32>,
            free_map: &impl Fn(u32) -> Term,
            bound_map: &impl Fn(u32) -> u32,
            roots: &impl Fn(u32) -> Term,
        ) -> Formula {
            let t = |t: &Term, bound: &Vec<u32>| match *t {
                Term::Var(i) if bound.contains(&i) => Term::Var(bound_map(i)),
                Term::Var(i) => free_map(i),
                Term::Root(j) => roots(j),
            };
            match f {
                Formula::Adjacent(a, b) => Formula::Adjacent(t(a, bound), t(b, bound)),
                Formula::Equal(a, b) => Formula::Equal(t(a, bound), t(b, bound)),
                Formula::True => Formula::True,
                Formula::False => Formula::False,
                Formula::Not(g) => Formula::not(go(g, bound, free_map, bound_map, roots)),
                Formula::And(gs) => Formula::And(
                    gs.iter()
                        .map(|g| go(g, bound, free_map, bound_map, roots))
                        .collect(),
                ),
                Formula::Or(gs) => Formula::Or(
                    gs.iter()
                        .map(|g| go(g, bound, free_map, bound_map, roots))
                        .collect(),
                ),
                Formula::Implies(a, b) => Formula::implies(
                    go(a, bound, free_map, bound_map, roots),
                    go(b, bound, free_map, bound_map, roots),
                ),
                Formula::Exists(v, g) | Formula::Forall(v, g) => {
                    bound.push(*v);
                    let body = go(g, bound, free_map, bound_map, roots);
                    bound.pop();
                    if matches!(f, Formula::Exists(..)) {
                        Formula::exists(bound_map(*v), body)
                    } else {
                        Formula::forall(bound_map(*v), body)
                    }
                }
            }
        }
        go(self, &mut Vec::new(), free_map, bound_map, roots)
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(i) => write!(f, "x{i}"),
            Term::Root(j) => write!(f, "r{j}"),
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_formula(self))
    }
}

impl std::str::FromStr for Formula {
    type Err = FormulaError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_formula(s)
    }
}
