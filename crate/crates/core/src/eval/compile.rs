//! Formulas compiled against a fixed graph and root list. Variables become
//! dense slots; every quantifier node memoizes its truth value keyed by the
//! values of its free variables.

use std::collections::HashMap;

use crate::formula::{Formula, Term};
use crate::graph::Graph;

use super::EvalError;

/// Dense memo tables are used while `n^key_len` stays below this size.
const DENSE_MEMO_LIMIT: u64 = 1 << 22;

#[derive(Debug, Clone, Copy)]
enum Slot {
    Var(usize),
    Vertex(usize),
}

#[derive(Debug)]
enum Node {
    Adj(Slot, Slot),
    Eq(Slot, Slot),
    Const(bool),
    Not(Box<Node>),
    And(Vec<Node>),
    Or(Vec<Node>),
    Implies(Box<Node>, Box<Node>),
    Quant {
        universal: bool,
        slot: usize,
        body: Box<Node>,
        memo: usize,
    },
}

#[derive(Debug)]
enum Memo {
    Dense { keys: Vec<usize>, table: Vec<u8> },
    Sparse { keys: Vec<usize>, table: HashMap<Vec<u32>, bool> },
}

/// A formula bound to a graph and root list, evaluated against a slot vector.
/// Free variables occupy slots `0..free.len()` in increasing index order.
#[derive(Debug)]
pub struct Compiled<'g> {
    graph: &'g Graph,
    root: Node,
    memos: Vec<Memo>,
    slots: Vec<usize>,
    free: Vec<u32>,
}

struct Builder<'a> {
    n: u64,
    roots: &'a [usize],
    next_slot: usize,
    memos: Vec<Memo>,
}

impl Builder<'_> {
    fn term(&self, t: &Term, scope: &[(u32, usize)]) -> Result<Slot, EvalError> {
        match *t {
            Term::Var(i) => scope
                .iter()
                .rev()
                .find(|(v, _)| *v == i)
                .map(|&(_, s)| Slot::Var(s))
                .ok_or(EvalError::UnmappedVariable(i)),
            Term::Root(j) => self
                .roots
                .get(j as usize - 1)
                .map(|&v| Slot::Vertex(v))
                .ok_or(EvalError::RootOutOfRange {
                    used: j,
                    available: self.roots.len(),
                }),
        }
    }

    fn node(&mut self, f: &Formula, scope: &mut Vec<(u32, usize)>) -> Result<Node, EvalError> {
        Ok(match f {
            Formula::Adjacent(a, b) => Node::Adj(self.term(a, scope)?, self.term(b, scope)?),
            Formula::Equal(a, b) => Node::Eq(self.term(a, scope)?, self.term(b, scope)?),
            Formula::True => Node::Const(true),
            Formula::False => Node::Const(false),
            Formula::Not(g) => Node::Not(Box::new(self.node(g, scope)?)),
            Formula::And(gs) => Node::And(
                gs.iter()
                    .map(|g| self.node(g, scope))
                    .collect::<Result<_, _>>()?,
            ),
            Formula::Or(gs) => Node::Or(
                gs.iter()
                    .map(|g| self.node(g, scope))
                    .collect::<Result<_, _>>()?,
            ),
            Formula::Implies(a, b) => Node::Implies(
                Box::new(self.node(a, scope)?),
                Box::new(self.node(b, scope)?),
            ),
            Formula::Exists(v, body) | Formula::Forall(v, body) => {
                // Key the memo by the slots of the quantified formula's free variables.
                let mut keys: Vec<usize> = f
                    .free_variables()
                    .iter()
                    .map(|i| match self.term(&Term::Var(*i), scope) {
                        Ok(Slot::Var(s)) => Ok(s),
                        Ok(Slot::Vertex(_)) => unreachable!("variables resolve to slots"),
                        Err(e) => Err(e),
                    })
                    .collect::<Result<_, _>>()?;
                keys.sort_unstable();
                let size = self.n.checked_pow(keys.len() as u32);
                let memo = match size {
                    Some(size) if size <= DENSE_MEMO_LIMIT => Memo::Dense {
                        keys,
                        table: vec![0; size as usize],
                    },
                    _ => Memo::Sparse {
                        keys,
                        table: HashMap::new(),
                    },
                };
                self.memos.push(memo);
                let memo = self.memos.len() - 1;
                let slot = self.next_slot;
                self.next_slot += 1;
                scope.push((*v, slot));
                let body = self.node(body, scope)?;
                scope.pop();
                Node::Quant {
                    universal: matches!(f, Formula::Forall(..)),
                    slot,
                    body: Box::new(body),
                    memo,
                }
            }
        })
    }
}

impl<'g> Compiled<'g> {
    pub fn new(graph: &'g Graph, formula: &Formula, roots: &[usize]) -> Result<Self, EvalError> {
        if let Some(&r) = roots.iter().find(|&&r| r >= graph.order()) {
            return Err(EvalError::VertexOutOfRange(r));
        }
        let free: Vec<u32> = formula.free_variables().into_iter().collect();
        let mut builder = Builder {
            n: graph.order() as u64,
            roots,
            next_slot: free.len(),
            memos: Vec::new(),
        };
        let mut scope: Vec<(u32, usize)> = free.iter().enumerate().map(|(s, &v)| (v, s)).collect();
        let root = builder.node(formula, &mut scope)?;
        Ok(Compiled {
            graph,
            root,
            memos: builder.memos,
            slots: vec![0; builder.next_slot],
            free,
        })
    }

    /// Free variable indices in slot order.
    pub fn free_variables(&self) -> &[u32] {
        &self.free
    }

    /// Evaluates with free-variable slot `i` set to `values[i]`.
    pub fn eval(&mut self, values: &[usize]) -> bool {
        debug_assert_eq!(values.len(), self.free.len());
        self.slots[..values.len()].copy_from_slice(values);
        let Compiled {
            graph,
            root,
            memos,
            slots,
            ..
        } = self;
        eval_node(graph, root, memos, slots)
    }
}

#[inline]
fn vertex(slot: Slot, slots: &[usize]) -> usize {
    match slot {
        Slot::Var(s) => slots[s],
        Slot::Vertex(v) => v,
    }
}

fn eval_node(g: &Graph, node: &Node, memos: &mut [Memo], slots: &mut [usize]) -> bool {
    match node {
        Node::Adj(a, b) => g.adjacent(vertex(*a, slots), vertex(*b, slots)),
        Node::Eq(a, b) => vertex(*a, slots) == vertex(*b, slots),
        Node::Const(c) => *c,
        Node::Not(x) => !eval_node(g, x, memos, slots),
        Node::And(xs) => xs.iter().all(|x| eval_node(g, x, memos, slots)),
        Node::Or(xs) => xs.iter().any(|x| eval_node(g, x, memos, slots)),
        Node::Implies(a, b) => !eval_node(g, a, memos, slots) || eval_node(g, b, memos, slots),
        Node::Quant {
            universal,
            slot,
            body,
            memo,
        } => {
            let n = g.order();
            let cached = match &memos[*memo] {
                Memo::Dense { keys, table } => {
                    let idx = keys.iter().fold(0usize, |acc, &s| acc * n + slots[s]);
                    match table[idx] {
                        0 => None,
                        v => Some(v == 2),
                    }
                }
                Memo::Sparse { keys, table } => {
                    let key: Vec<u32> = keys.iter().map(|&s| slots[s] as u32).collect();
                    table.get(&key).copied()
                }
            };
            if let Some(v) = cached {
                return v;
            }
            // exists: first witness wins; forall: first counterexample loses.
            let mut result = *universal;
            for v in 0..n {
                slots[*slot] = v;
                if eval_node(g, body, memos, slots) != *universal {
                    result = !*universal;
                    break;
                }
            }
            match &mut memos[*memo] {
                Memo::Dense { keys, table } => {
                    let idx = keys.iter().fold(0usize, |acc, &s| acc * n + slots[s]);
                    table[idx] = 1 + result as u8;
                }
                Memo::Sparse { keys, table } => {
                    let key: Vec<u32> = keys.iter().map(|&s| slots[s] as u32).collect();
                    table.insert(key, result);
                }
            }
            result
        }
    }
}
