use std::collections::HashMap;

use crate::graph::Graph;
use crate::Limits;

use super::{extends, partial_iso, GameError, GameSide, SpoilerMove, Winner};

/// Exhaustive minimax over the game tree. Positions are memoized by the set
/// of pebble pairs (order and repetition dropped) and the remaining rounds.
#[derive(Debug)]
pub struct Solver<'a> {
    left: &'a Graph,
    right: &'a Graph,
    memo: HashMap<(Vec<(u32, u32)>, u8), bool>,
}

impl<'a> Solver<'a> {
    pub fn new(left: &'a Graph, right: &'a Graph, rounds: usize, limits: &Limits) -> Result<Self, GameError> {
        let product = left.order().saturating_mul(right.order());
        if product > limits.solver_product_cap {
            return Err(GameError::CapExceeded(format!(
                "|left|*|right| = {product} > {}",
                limits.solver_product_cap
            )));
        }
        if rounds > limits.solver_round_cap {
            return Err(GameError::CapExceeded(format!(
                "{rounds} rounds > {}",
                limits.solver_round_cap
            )));
        }
        Ok(Solver {
            left,
            right,
            memo: HashMap::new(),
        })
    }

    pub fn left(&self) -> &'a Graph {
        self.left
    }

    pub fn right(&self) -> &'a Graph {
        self.right
    }

    /// Winner of the game continuing from `pairs` for `rounds` more rounds.
    pub fn winner(&mut self, pairs: &[(usize, usize)], rounds: usize) -> Winner {
        if !partial_iso(self.left, self.right, pairs) {
            return Winner::Spoiler;
        }
        let mut pairs = pairs.to_vec();
        if self.duplicator_wins(&mut pairs, rounds) {
            Winner::Duplicator
        } else {
            Winner::Spoiler
        }
    }

    /// Whether the duplicator wins after answering `mv` with `response`.
    pub fn response_wins(
        &mut self,
        pairs: &[(usize, usize)],
        mv: SpoilerMove,
        response: usize,
        rounds_after: usize,
    ) -> bool {
        let pair = match mv.side {
            GameSide::Left => (mv.vertex, response),
            GameSide::Right => (response, mv.vertex),
        };
        if !partial_iso(self.left, self.right, pairs) || !extends(self.left, self.right, pairs, pair) {
            return false;
        }
        let mut next = pairs.to_vec();
        next.push(pair);
        self.duplicator_wins(&mut next, rounds_after)
    }

    /// `pairs` must already be a partial isomorphism.
    fn duplicator_wins(&mut self, pairs: &mut Vec<(usize, usize)>, rounds: usize) -> bool {
        if rounds == 0 {
            return true;
        }
        let mut key: Vec<(u32, u32)> = pairs.iter().map(|&(a, b)| (a as u32, b as u32)).collect();
        key.sort_unstable();
        key.dedup();
        let key = (key, rounds as u8);
        if let Some(&v) = self.memo.get(&key) {
            return v;
        }
        let (nl, nr) = (self.left.order(), self.right.order());
        let spoiler_moves = (0..nl)
            .map(|v| (GameSide::Left, v))
            .chain((0..nr).map(|w| (GameSide::Right, w)));
        let mut result = true;
        'spoiler: for (side, v) in spoiler_moves {
            let answers = if side == GameSide::Left { nr } else { nl };
            for w in 0..answers {
                let pair = if side == GameSide::Left { (v, w) } else { (w, v) };
                if !extends(self.left, self.right, pairs, pair) {
                    continue;
                }
                pairs.push(pair);
                let ok = self.duplicator_wins(pairs, rounds - 1);
                pairs.pop();
                if ok {
                    continue 'spoiler;
                }
            }
            result = false;
            break;
        }
        self.memo.insert(key, result);
        result
    }
}

/// Decides the game on `(left, right)` starting from `pairs` with `rounds`
/// rounds left.
pub fn solve(
    left: &Graph,
    right: &Graph,
    pairs: &[(usize, usize)],
    rounds: usize,
    limits: &Limits,
) -> Result<Winner, GameError> {
    for &(v, w) in pairs {
        if v >= left.order() {
            return Err(GameError::VertexOutOfRange { side: GameSide::Left, vertex: v });
        }
        if w >= right.order() {
            return Err(GameError::VertexOutOfRange { side: GameSide::Right, vertex: w });
        }
    }
    Ok(Solver::new(left, right, rounds, limits)?.winner(pairs, rounds))
}
