//! Ehrenfeucht–Fraïssé games on pairs of graphs.
//!
//! In each round the spoiler picks a vertex in either graph and the duplicator
//! answers in the other one. The duplicator wins if, after the last round,
//! mapping the `i`-th vertex picked in the left graph to the `i`-th vertex
//! picked in the right graph is a partial isomorphism.

mod agents;
mod battery;
mod play;
mod solver;

use serde::Serialize;

use crate::graph::{Graph, GraphError};

pub use agents::{
    ClosureSpoiler, Duplicator, MinimaxDuplicator, MinimaxSpoiler, MirrorDuplicator,
    RandomSpoiler, ScriptedSpoiler, Spoiler,
};
pub use battery::sample_sentence_battery;
pub use play::{find_spoiler_win, play, Forfeit, GameResult, MoveRecord};
pub use solver::{solve, Solver};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Winner {
    Spoiler,
    Duplicator,
}

impl std::fmt::Display for Winner {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Winner::Spoiler => "spoiler",
            Winner::Duplicator => "duplicator",
        })
    }
}

/// Which of the two graphs a vertex is picked in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GameSide {
    Left,
    Right,
}

impl GameSide {
    pub fn other(self) -> GameSide {
        match self {
            GameSide::Left => GameSide::Right,
            GameSide::Right => GameSide::Left,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, serde::Deserialize)]
pub struct SpoilerMove {
    pub side: GameSide,
    pub vertex: usize,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GameError {
    #[error("solver cap exceeded: {0}")]
    CapExceeded(String),
    #[error("root lists differ in length ({0} vs {1})")]
    RootMismatch(usize, usize),
    #[error("vertex {vertex} out of range on the {side:?} side")]
    VertexOutOfRange { side: GameSide, vertex: usize },
    #[error("sentence batteries support depth at most 4, got {0}")]
    DepthTooLarge(usize),
    #[error("a sentence battery needs at least one sentence")]
    EmptyBattery,
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Game state: both graphs, pebble pairs played so far (roots first) and the
/// number of rounds still to play.
#[derive(Debug, Clone)]
pub struct Position<'a> {
    pub left: &'a Graph,
    pub right: &'a Graph,
    pub pairs: Vec<(usize, usize)>,
    pub remaining: usize,
}

impl<'a> Position<'a> {
    pub fn new(left: &'a Graph, right: &'a Graph, pairs: Vec<(usize, usize)>, remaining: usize) -> Self {
        Position {
            left,
            right,
            pairs,
            remaining,
        }
    }

    pub fn graph(&self, side: GameSide) -> &'a Graph {
        match side {
            GameSide::Left => self.left,
            GameSide::Right => self.right,
        }
    }

    /// Vertices played so far on `side`, in order.
    pub fn played(&self, side: GameSide) -> Vec<usize> {
        self.pairs
            .iter()
            .map(|&(l, r)| if side == GameSide::Left { l } else { r })
            .collect()
    }

    pub fn is_partial_iso(&self) -> bool {
        partial_iso(self.left, self.right, &self.pairs)
    }
}

/// Whether `v_i -> w_i` preserves equality and adjacency in both directions.
pub fn partial_iso(gl: &Graph, gr: &Graph, pairs: &[(usize, usize)]) -> bool {
    (0..pairs.len()).all(|i| extends(gl, gr, &pairs[..i], pairs[i]))
}

/// Whether adding `(v, w)` to an already consistent pair list keeps it
/// consistent.
#[inline]
pub(crate) fn extends(gl: &Graph, gr: &Graph, pairs: &[(usize, usize)], (v, w): (usize, usize)) -> bool {
    pairs
        .iter()
        .all(|&(a, b)| (a == v) == (b == w) && gl.adjacent(a, v) == gr.adjacent(b, w))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partial_iso_examples() {
        let k2 = Graph::complete(2);
        let k1 = Graph::complete(1);
        assert!(partial_iso(&k2, &k1, &[]));
        let p3 = Graph::new(3, &[(0, 1), (1, 2)], None, vec![]).unwrap();
        assert!(partial_iso(&p3, &p3, &[(0, 0), (1, 1), (2, 2)]));
        assert!(!partial_iso(&k2, &k1, &[(0, 0), (1, 0)]));
        assert!(!partial_iso(&p3, &p3, &[(0, 0), (1, 2)]));
        assert!(partial_iso(&p3, &p3, &[(0, 2), (1, 1)]));
    }
}
