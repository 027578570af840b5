//! Constructive duplicator strategy for EF games on universal bipartite
//! graphs.
//!
//! The state tracks the vertices played so far on both sides and the number
//! of rounds left (`p`). It is valid when both graphs are `(p+q)`-universal
//! (`q` distinct played vertices), the restricted adjacency matrices agree
//! and the `2^p`-shadows agree. Every response keeps the matrices equal and
//! makes the `2^(p-1)`-shadows agree, so the duplicator survives all `p`
//! remaining rounds.

mod agent;

use std::collections::HashMap;
use std::sync::Arc;

use serde::Serialize;

use crate::efgame::GameSide;
use crate::graph::bipartite::{
    column_pattern, dedup_in_order, is_universal, matrices_match, shadow_with, shadows_equal_positional,
    NullVectorRule, ShadowMultiset,
};
use crate::graph::{Graph, Side};
use crate::Limits;

pub use agent::LmKeyAgent;

/// Failed hypothesis found by [`init_state`].
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PreconditionError {
    #[error("played lists differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("{side} graph is not bipartite")]
    NotBipartite { side: &'static str },
    #[error("{side} graph has |B| = {width}, above the cap {cap}")]
    TooWide { side: &'static str, width: usize, cap: usize },
    #[error("vertex {vertex} is not in the {side} graph")]
    VertexOutOfRange { side: &'static str, vertex: usize },
    #[error("{side} graph not {required}-universal")]
    NotUniversal { side: &'static str, required: usize },
    #[error("restricted adjacency matrices differ")]
    MatrixMismatch,
    #[error("{cap}-shadows differ: left {left}, right {right}")]
    ShadowMismatch { cap: usize, left: String, right: String },
}

impl PreconditionError {
    /// Stable identifier for clients.
    pub fn reason(&self) -> &'static str {
        match self {
            PreconditionError::LengthMismatch(..) => "length-mismatch",
            PreconditionError::NotBipartite { .. } => "not-bipartite",
            PreconditionError::TooWide { .. } => "too-wide",
            PreconditionError::VertexOutOfRange { .. } => "vertex-out-of-range",
            PreconditionError::NotUniversal { .. } => "not-universal",
            PreconditionError::MatrixMismatch => "matrix-mismatch",
            PreconditionError::ShadowMismatch { .. } => "shadow-mismatch",
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum StrategyError {
    #[error("no rounds left")]
    BudgetExhausted,
    #[error("vertex {vertex} is not in the {side:?} graph")]
    VertexOutOfRange { side: GameSide, vertex: usize },
    #[error("no unused A-vertex realizes row {row}")]
    NoRowRealizer { row: String },
    #[error("no unused B-vertex has column {column}")]
    ColumnAbsent { column: String },
    #[error("invariant violated after the move: {0}")]
    InvariantViolated(String),
}

impl StrategyError {
    pub fn reason(&self) -> &'static str {
        match self {
            StrategyError::BudgetExhausted => "budget-exhausted",
            StrategyError::VertexOutOfRange { .. } => "vertex-out-of-range",
            StrategyError::NoRowRealizer { .. } => "no-row-realizer",
            StrategyError::ColumnAbsent { .. } => "column-absent",
            StrategyError::InvariantViolated(_) => "invariant-violated",
        }
    }
}

/// A graph together with an index from row vectors to A-vertices.
#[derive(Debug)]
struct Indexed {
    graph: Arc<Graph>,
    rows: HashMap<u64, Vec<usize>>,
}

impl Indexed {
    fn new(graph: Arc<Graph>) -> Self {
        let parts = graph.parts().expect("checked bipartite");
        let mut rows: HashMap<u64, Vec<usize>> = HashMap::new();
        for &a in parts.a() {
            rows.entry(row_mask(&graph, a)).or_default().push(a);
        }
        Indexed { graph, rows }
    }
}

/// Row of `a` with bit `i` for the B-vertex at position `i` of the B part.
fn row_mask(g: &Graph, a: usize) -> u64 {
    let parts = g.parts().expect("checked bipartite");
    g.neighbors(a)
        .iter()
        .fold(0u64, |acc, &b| acc | 1 << parts.index_in_part(b as usize))
}

fn pow2(p: usize) -> usize {
    1usize << p.min(62)
}

fn bits(mask: u64, width: usize) -> String {
    (0..width).map(|i| if mask >> i & 1 == 1 { '1' } else { '0' }).collect()
}

#[derive(Debug, Clone)]
pub struct StrategyState {
    left: Arc<Indexed>,
    right: Arc<Indexed>,
    played_left: Vec<usize>,
    played_right: Vec<usize>,
    budget: usize,
    rule: NullVectorRule,
    verify: bool,
}

/// Validates the hypotheses and builds the strategy state. Checks run in the
/// order universality, matrix match, shadow equality; the first failure is
/// reported.
pub fn init_state(
    g: Arc<Graph>,
    g2: Arc<Graph>,
    played: &[usize],
    played2: &[usize],
    p: usize,
    limits: &Limits,
) -> Result<StrategyState, PreconditionError> {
    init_state_with(g, g2, played, played2, p, limits, NullVectorRule::default())
}

pub fn init_state_with(
    g: Arc<Graph>,
    g2: Arc<Graph>,
    played: &[usize],
    played2: &[usize],
    p: usize,
    limits: &Limits,
    rule: NullVectorRule,
) -> Result<StrategyState, PreconditionError> {
    if played.len() != played2.len() {
        return Err(PreconditionError::LengthMismatch(played.len(), played2.len()));
    }
    for (side, graph, list) in [("left", &g, played), ("right", &g2, played2)] {
        let parts = graph.parts().map_err(|_| PreconditionError::NotBipartite { side })?;
        let width = parts.b().len();
        if width > limits.universality_cap.min(63) {
            return Err(PreconditionError::TooWide {
                side,
                width,
                cap: limits.universality_cap.min(63),
            });
        }
        if let Some(&v) = list.iter().find(|&&v| v >= graph.order()) {
            return Err(PreconditionError::VertexOutOfRange { side, vertex: v });
        }
    }
    let q = dedup_in_order(played).len();
    for (side, graph) in [("left", &g), ("right", &g2)] {
        let ok = is_universal(graph, p + q, limits.universality_cap).unwrap_or(false);
        if !ok {
            return Err(PreconditionError::NotUniversal {
                side,
                required: p + q,
            });
        }
    }
    if !matrices_match(&g, played, &g2, played2).unwrap_or(false) {
        return Err(PreconditionError::MatrixMismatch);
    }
    let cap = pow2(p);
    let (s, s2) = (
        shadow_with(&g, played, cap, rule).expect("validated"),
        shadow_with(&g2, played2, cap, rule).expect("validated"),
    );
    if !shadows_equal_positional(&s, &s2).unwrap_or(false) {
        return Err(PreconditionError::ShadowMismatch {
            cap,
            left: describe(&s),
            right: describe(&s2),
        });
    }
    Ok(StrategyState {
        left: Arc::new(Indexed::new(g)),
        right: Arc::new(Indexed::new(g2)),
        played_left: played.to_vec(),
        played_right: played2.to_vec(),
        budget: p,
        rule,
        verify: false,
    })
}

fn describe(s: &ShadowMultiset) -> String {
    let body: Vec<String> = s
        .iter()
        .map(|(u, m)| format!("{}x{m}", if s.dimension() == 0 { "()".into() } else { s.pattern_string(u) }))
        .collect();
    format!("{{{}}}", body.join(", "))
}

/// How the members of one class `W_u` were split between 0 and 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClassCase {
    /// `m0 + m1 < 2^p`: `m0` zeros and `m1` ones.
    Small,
    /// `m0 >= 2^(p-1)`: `min(m1, 2^(p-1))` ones, zeros elsewhere.
    M0Large,
    /// `m0 < 2^(p-1) <= m1`: `m0` zeros, ones elsewhere.
    M1Large,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClassRecord {
    /// Column pattern over the played A-vertices, in play order.
    pub u: String,
    pub m0: usize,
    pub m1: usize,
    pub case: ClassCase,
    /// Unplayed B-vertices of the responding graph with this pattern.
    pub size: usize,
    /// Members set to 0 and to 1, lowest ids first.
    pub zeros: usize,
    pub ones: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ResponseKind {
    Repeat,
    ASide,
    BSide,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ResponseTrace {
    pub spoiler_side: GameSide,
    pub spoiler_vertex: usize,
    pub kind: ResponseKind,
    /// A-side moves: the constructed row over the responding graph's B part,
    /// in increasing vertex id.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x_prime: Option<String>,
    /// B-side moves: the matched column over the played A-vertices.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub column: Option<String>,
    pub classes: Vec<ClassRecord>,
    pub response: usize,
}

impl StrategyState {
    /// Enables post-move invariant checks in [`respond`](Self::respond).
    pub fn with_verify(mut self, verify: bool) -> Self {
        self.verify = verify;
        self
    }

    pub fn budget(&self) -> usize {
        self.budget
    }

    pub fn played(&self, side: GameSide) -> &[usize] {
        match side {
            GameSide::Left => &self.played_left,
            GameSide::Right => &self.played_right,
        }
    }

    pub fn graph(&self, side: GameSide) -> &Arc<Graph> {
        match side {
            GameSide::Left => &self.left.graph,
            GameSide::Right => &self.right.graph,
        }
    }

    pub fn null_vector_rule(&self) -> NullVectorRule {
        self.rule
    }

    /// `2^p`-shadows of both played lists.
    pub fn shadows(&self) -> (ShadowMultiset, ShadowMultiset) {
        let cap = pow2(self.budget);
        (
            shadow_with(&self.left.graph, &self.played_left, cap, self.rule).expect("validated"),
            shadow_with(&self.right.graph, &self.played_right, cap, self.rule).expect("validated"),
        )
    }

    /// Matrix match and shadow equality for the current budget.
    pub fn check_invariants(&self) -> Result<(), String> {
        let matched = matrices_match(
            &self.left.graph,
            &self.played_left,
            &self.right.graph,
            &self.played_right,
        )
        .map_err(|e| e.to_string())?;
        if !matched {
            return Err("restricted adjacency matrices differ".into());
        }
        let (s, s2) = self.shadows();
        if !shadows_equal_positional(&s, &s2).map_err(|e| e.to_string())? {
            return Err(format!(
                "{}-shadows differ: left {}, right {}",
                s.cap(),
                describe(&s),
                describe(&s2)
            ));
        }
        Ok(())
    }

    /// The duplicator's answer to the spoiler playing `v` on `side`.
    pub fn respond(
        &self,
        side: GameSide,
        v: usize,
    ) -> Result<(usize, StrategyState, ResponseTrace), StrategyError> {
        if self.budget == 0 {
            return Err(StrategyError::BudgetExhausted);
        }
        // Work in the spoiler's frame: `g` is where the spoiler moved.
        let (g, h) = match side {
            GameSide::Left => (&self.left, &self.right),
            GameSide::Right => (&self.right, &self.left),
        };
        let (w, w2) = match side {
            GameSide::Left => (&self.played_left, &self.played_right),
            GameSide::Right => (&self.played_right, &self.played_left),
        };
        if v >= g.graph.order() {
            return Err(StrategyError::VertexOutOfRange { side, vertex: v });
        }
        let mut trace = ResponseTrace {
            spoiler_side: side,
            spoiler_vertex: v,
            kind: ResponseKind::Repeat,
            x_prime: None,
            column: None,
            classes: Vec::new(),
            response: 0,
        };
        let response = if let Some(i) = w.iter().position(|&x| x == v) {
            w2[i]
        } else if g.graph.parts().expect("bipartite").side(v) == Side::A {
            trace.kind = ResponseKind::ASide;
            self.respond_a(g, h, w, w2, v, &mut trace)?
        } else {
            trace.kind = ResponseKind::BSide;
            respond_b(&g.graph, &h.graph, w, w2, v, &mut trace)?
        };
        trace.response = response;
        let mut next = self.clone();
        next.budget -= 1;
        let (l, r) = match side {
            GameSide::Left => (v, response),
            GameSide::Right => (response, v),
        };
        next.played_left.push(l);
        next.played_right.push(r);
        if self.verify {
            next.check_invariants().map_err(StrategyError::InvariantViolated)?;
            if let Some(c) = trace.classes.iter().find(|c| !accounting_holds(c, pow2(self.budget - 1))) {
                return Err(StrategyError::InvariantViolated(format!(
                    "class {} has {} members but m0 + m1 = {}",
                    c.u,
                    c.size,
                    c.m0 + c.m1
                )));
            }
        }
        Ok((response, next, trace))
    }

    fn respond_a(
        &self,
        g: &Indexed,
        h: &Indexed,
        w: &[usize],
        w2: &[usize],
        v: usize,
        trace: &mut ResponseTrace,
    ) -> Result<usize, StrategyError> {
        let (gg, hg) = (&*g.graph, &*h.graph);
        let hparts = hg.parts().expect("bipartite");
        let half = pow2(self.budget - 1);
        let full = pow2(self.budget);
        let mut x_prime = 0u64;
        // Played columns copy the spoiler's row.
        for (&a, &b) in w.iter().zip(w2) {
            if hparts.side(b) == Side::B && gg.adjacent(v, a) {
                x_prime |= 1 << hparts.index_in_part(b);
            }
        }
        let mut extended = w.to_vec();
        extended.push(v);
        let next_shadow = shadow_with(gg, &extended, half, self.rule).expect("validated");
        let d = next_shadow.dimension() - 1;
        let basis2: Vec<usize> = dedup_in_order(w2)
            .into_iter()
            .filter(|&x| hparts.side(x) == Side::A)
            .collect();
        // Unplayed B-vertices of h grouped by column pattern, ids ascending.
        let mut classes: std::collections::BTreeMap<u64, Vec<usize>> = Default::default();
        for &b in hparts.b() {
            if !w2.contains(&b) {
                classes.entry(column_pattern(hg, &basis2, b)).or_default().push(b);
            }
        }
        for (&u, members) in &classes {
            let m0 = next_shadow.multiplicity(u);
            let m1 = next_shadow.multiplicity(u | 1 << d);
            let (case, zeros) = if m0 + m1 < full {
                // Both counts are exact unless one sits at the cap; any
                // surplus members then join the capped side.
                let zeros = if m0 == half && m1 < half {
                    members.len().saturating_sub(m1)
                } else {
                    m0.min(members.len())
                };
                (ClassCase::Small, zeros)
            } else if m0 >= half {
                (ClassCase::M0Large, members.len().saturating_sub(m1.min(half)))
            } else {
                (ClassCase::M1Large, m0.min(members.len()))
            };
            // Lowest ids get the explicitly counted value.
            let ones_first = case == ClassCase::M0Large || (case == ClassCase::Small && m0 == half && m1 < half);
            let ones = members.len() - zeros;
            for (i, &b) in members.iter().enumerate() {
                let one = if ones_first { i < ones } else { i >= zeros };
                if one {
                    x_prime |= 1 << hparts.index_in_part(b);
                }
            }
            trace.classes.push(ClassRecord {
                u: bits(u, d),
                m0,
                m1,
                case,
                size: members.len(),
                zeros,
                ones,
            });
        }
        trace.x_prime = Some(bits(x_prime, hparts.b().len()));
        h.rows
            .get(&x_prime)
            .and_then(|cands| cands.iter().copied().find(|a| !w2.contains(a)))
            .ok_or_else(|| StrategyError::NoRowRealizer {
                row: bits(x_prime, hparts.b().len()),
            })
    }
}

fn respond_b(
    g: &Graph,
    h: &Graph,
    w: &[usize],
    w2: &[usize],
    v: usize,
    trace: &mut ResponseTrace,
) -> Result<usize, StrategyError> {
    let (gp, hp) = (g.parts().expect("bipartite"), h.parts().expect("bipartite"));
    let basis: Vec<usize> = dedup_in_order(w).into_iter().filter(|&x| gp.side(x) == Side::A).collect();
    let basis2: Vec<usize> = dedup_in_order(w2).into_iter().filter(|&x| hp.side(x) == Side::A).collect();
    let u = column_pattern(g, &basis, v);
    trace.column = Some(bits(u, basis.len()));
    hp.b()
        .iter()
        .copied()
        .find(|b| !w2.contains(b) && column_pattern(h, &basis2, *b) == u)
        .ok_or_else(|| StrategyError::ColumnAbsent {
            column: bits(u, basis.len()),
        })
}

/// Class sizes implied by shadow equality: exact when neither count is
/// capped, at least `m0 + m1` otherwise.
fn accounting_holds(c: &ClassRecord, half: usize) -> bool {
    match c.case {
        ClassCase::Small if c.m0 < half && c.m1 < half => c.size == c.m0 + c.m1,
        _ => c.size >= c.m0 + c.m1,
    }
}
