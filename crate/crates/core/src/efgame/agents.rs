use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::graph::Graph;
use crate::Limits;

use super::{GameError, GameSide, Position, Solver, SpoilerMove};

/// Chooses spoiler moves. An `Err` forfeits the game.
pub trait Spoiler {
    fn choose(&mut self, pos: &Position<'_>, rng: &mut ChaCha8Rng) -> Result<SpoilerMove, String>;
}

/// Answers spoiler moves with a vertex on the opposite side. An `Err` or an
/// out-of-range vertex forfeits the game.
pub trait Duplicator {
    fn respond(&mut self, pos: &Position<'_>, mv: SpoilerMove, rng: &mut ChaCha8Rng) -> Result<usize, String>;
}

impl<S: Spoiler + ?Sized> Spoiler for Box<S> {
    fn choose(&mut self, pos: &Position<'_>, rng: &mut ChaCha8Rng) -> Result<SpoilerMove, String> {
        (**self).choose(pos, rng)
    }
}

impl<D: Duplicator + ?Sized> Duplicator for Box<D> {
    fn respond(&mut self, pos: &Position<'_>, mv: SpoilerMove, rng: &mut ChaCha8Rng) -> Result<usize, String> {
        (**self).respond(pos, mv, rng)
    }
}

/// Picks a side uniformly (skipping empty graphs), then a vertex uniformly.
#[derive(Debug, Clone, Default)]
pub struct RandomSpoiler;

impl Spoiler for RandomSpoiler {
    fn choose(&mut self, pos: &Position<'_>, rng: &mut ChaCha8Rng) -> Result<SpoilerMove, String> {
        let sides: Vec<GameSide> = [GameSide::Left, GameSide::Right]
            .into_iter()
            .filter(|&s| pos.graph(s).order() > 0)
            .collect();
        if sides.is_empty() {
            return Err("both graphs are empty".into());
        }
        let side = sides[rng.gen_range(0..sides.len())];
        let vertex = rng.gen_range(0..pos.graph(side).order());
        Ok(SpoilerMove { side, vertex })
    }
}

/// Plays a fixed list of moves, forfeiting when it runs out.
#[derive(Debug, Clone)]
pub struct ScriptedSpoiler {
    moves: Vec<SpoilerMove>,
    next: usize,
}

impl ScriptedSpoiler {
    pub fn new(moves: Vec<SpoilerMove>) -> Self {
        ScriptedSpoiler { moves, next: 0 }
    }
}

impl Spoiler for ScriptedSpoiler {
    fn choose(&mut self, _: &Position<'_>, _: &mut ChaCha8Rng) -> Result<SpoilerMove, String> {
        let mv = self.moves.get(self.next).copied().ok_or("script exhausted")?;
        self.next += 1;
        Ok(mv)
    }
}

/// Adapter for interactive or ad-hoc spoilers.
pub struct ClosureSpoiler<F>(pub F);

impl<F> Spoiler for ClosureSpoiler<F>
where
    F: FnMut(&Position<'_>) -> Result<SpoilerMove, String>,
{
    fn choose(&mut self, pos: &Position<'_>, _: &mut ChaCha8Rng) -> Result<SpoilerMove, String> {
        (self.0)(pos)
    }
}

/// Optimal spoiler: plays the first move (left vertices, then right, by id)
/// after which every response loses, or left vertex 0 if there is none.
#[derive(Debug)]
pub struct MinimaxSpoiler<'a> {
    solver: Solver<'a>,
}

impl<'a> MinimaxSpoiler<'a> {
    pub fn new(left: &'a Graph, right: &'a Graph, rounds: usize, limits: &Limits) -> Result<Self, GameError> {
        Ok(MinimaxSpoiler {
            solver: Solver::new(left, right, rounds, limits)?,
        })
    }
}

impl Spoiler for MinimaxSpoiler<'_> {
    fn choose(&mut self, pos: &Position<'_>, _: &mut ChaCha8Rng) -> Result<SpoilerMove, String> {
        let moves = (0..pos.left.order())
            .map(|v| SpoilerMove { side: GameSide::Left, vertex: v })
            .chain((0..pos.right.order()).map(|v| SpoilerMove { side: GameSide::Right, vertex: v }));
        for mv in moves {
            let answers = pos.graph(mv.side.other()).order();
            if !(0..answers).any(|w| self.solver.response_wins(&pos.pairs, mv, w, pos.remaining - 1)) {
                return Ok(mv);
            }
        }
        let side = if pos.left.order() > 0 { GameSide::Left } else { GameSide::Right };
        Ok(SpoilerMove { side, vertex: 0 })
    }
}

/// Optimal duplicator: answers with the lowest-numbered winning vertex. From
/// a lost position it falls back to the lowest vertex that keeps the
/// correspondence consistent, then to vertex 0.
#[derive(Debug)]
pub struct MinimaxDuplicator<'a> {
    solver: Solver<'a>,
}

impl<'a> MinimaxDuplicator<'a> {
    pub fn new(left: &'a Graph, right: &'a Graph, rounds: usize, limits: &Limits) -> Result<Self, GameError> {
        Ok(MinimaxDuplicator {
            solver: Solver::new(left, right, rounds, limits)?,
        })
    }
}

impl Duplicator for MinimaxDuplicator<'_> {
    fn respond(&mut self, pos: &Position<'_>, mv: SpoilerMove, _: &mut ChaCha8Rng) -> Result<usize, String> {
        let answers = pos.graph(mv.side.other()).order();
        if let Some(w) = (0..answers).find(|&w| self.solver.response_wins(&pos.pairs, mv, w, pos.remaining - 1)) {
            return Ok(w);
        }
        Ok((0..answers)
            .find(|&w| self.solver.response_wins(&pos.pairs, mv, w, 0))
            .unwrap_or(0))
    }
}

/// Copies the spoiler's vertex id. Wins every game on `(G, G)` with identical
/// roots.
#[derive(Debug, Clone, Default)]
pub struct MirrorDuplicator;

impl Duplicator for MirrorDuplicator {
    fn respond(&mut self, _: &Position<'_>, mv: SpoilerMove, _: &mut ChaCha8Rng) -> Result<usize, String> {
        Ok(mv.vertex)
    }
}
