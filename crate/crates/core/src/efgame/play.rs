use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::graph::Graph;

use super::{extends, partial_iso, Duplicator, GameError, GameSide, Position, Spoiler, SpoilerMove, Winner};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct MoveRecord {
    pub round: usize,
    pub side: GameSide,
    pub vertex: usize,
    pub response: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Forfeit {
    pub by: Winner,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GameResult {
    pub winner: Winner,
    pub transcript: Vec<MoveRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub forfeit: Option<Forfeit>,
}

fn root_pairs(
    left: &Graph,
    right: &Graph,
    roots_left: &[usize],
    roots_right: &[usize],
) -> Result<Vec<(usize, usize)>, GameError> {
    if roots_left.len() != roots_right.len() {
        return Err(GameError::RootMismatch(roots_left.len(), roots_right.len()));
    }
    if let Some(&v) = roots_left.iter().find(|&&v| v >= left.order()) {
        return Err(GameError::VertexOutOfRange { side: GameSide::Left, vertex: v });
    }
    if let Some(&w) = roots_right.iter().find(|&&w| w >= right.order()) {
        return Err(GameError::VertexOutOfRange { side: GameSide::Right, vertex: w });
    }
    Ok(roots_left.iter().copied().zip(roots_right.iter().copied()).collect())
}

/// Plays one game between two agents. The game stops as soon as the
/// correspondence breaks; any invalid move forfeits on the spot.
#[allow(clippy::too_many_arguments)]
pub fn play(
    left: &Graph,
    right: &Graph,
    roots_left: &[usize],
    roots_right: &[usize],
    rounds: usize,
    spoiler: &mut dyn Spoiler,
    duplicator: &mut dyn Duplicator,
    seed: u64,
) -> Result<GameResult, GameError> {
    let pairs = root_pairs(left, right, roots_left, roots_right)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pos = Position::new(left, right, pairs, rounds);
    let mut transcript = Vec::new();
    let finish = |winner, transcript, forfeit| GameResult {
        winner,
        transcript,
        forfeit,
    };
    if !pos.is_partial_iso() {
        return Ok(finish(Winner::Spoiler, transcript, None));
    }
    for round in 1..=rounds {
        pos.remaining = rounds - round + 1;
        let mv = match spoiler.choose(&pos, &mut rng) {
            Ok(mv) if mv.vertex < pos.graph(mv.side).order() => mv,
            Ok(mv) => {
                let reason = format!("vertex {} is not in the {:?} graph", mv.vertex, mv.side);
                return Ok(finish(Winner::Duplicator, transcript, Some(Forfeit { by: Winner::Spoiler, reason })));
            }
            Err(reason) => {
                return Ok(finish(Winner::Duplicator, transcript, Some(Forfeit { by: Winner::Spoiler, reason })));
            }
        };
        let response = match duplicator.respond(&pos, mv, &mut rng) {
            Ok(w) if w < pos.graph(mv.side.other()).order() => w,
            Ok(w) => {
                let reason = format!("vertex {w} is not in the {:?} graph", mv.side.other());
                return Ok(finish(Winner::Spoiler, transcript, Some(Forfeit { by: Winner::Duplicator, reason })));
            }
            Err(reason) => {
                return Ok(finish(Winner::Spoiler, transcript, Some(Forfeit { by: Winner::Duplicator, reason })));
            }
        };
        transcript.push(MoveRecord {
            round,
            side: mv.side,
            vertex: mv.vertex,
            response,
        });
        let pair = match mv.side {
            GameSide::Left => (mv.vertex, response),
            GameSide::Right => (response, mv.vertex),
        };
        let ok = extends(left, right, &pos.pairs, pair);
        pos.pairs.push(pair);
        if !ok {
            return Ok(finish(Winner::Spoiler, transcript, None));
        }
    }
    debug_assert!(partial_iso(left, right, &pos.pairs));
    Ok(finish(Winner::Duplicator, transcript, None))
}

/// Searches every spoiler line against a deterministic duplicator. Returns a
/// winning line for the spoiler, or `None` if the duplicator survives all of
/// them. The duplicator is cloned at each branch so stateful agents are
/// handled correctly; its random source is fixed.
pub fn find_spoiler_win<D>(
    left: &Graph,
    right: &Graph,
    roots_left: &[usize],
    roots_right: &[usize],
    rounds: usize,
    duplicator: &D,
) -> Result<Option<Vec<MoveRecord>>, GameError>
where
    D: Duplicator + Clone + Send + Sync,
{
    let pairs = root_pairs(left, right, roots_left, roots_right)?;
    let pos = Position::new(left, right, pairs, rounds);
    if !pos.is_partial_iso() {
        return Ok(Some(Vec::new()));
    }
    if rounds == 0 {
        return Ok(None);
    }
    let moves = all_moves(left, right);
    Ok(moves
        .par_iter()
        .find_map_first(|&mv| {
            let mut line = Vec::with_capacity(rounds);
            search_move(&pos, duplicator, mv, &mut line).then_some(line)
        }))
}

fn all_moves(left: &Graph, right: &Graph) -> Vec<SpoilerMove> {
    (0..left.order())
        .map(|v| SpoilerMove { side: GameSide::Left, vertex: v })
        .chain((0..right.order()).map(|v| SpoilerMove { side: GameSide::Right, vertex: v }))
        .collect()
}

/// True if playing `mv` at `pos` leads to a spoiler win; `line` then holds it.
fn search_move<D: Duplicator + Clone>(
    pos: &Position<'_>,
    duplicator: &D,
    mv: SpoilerMove,
    line: &mut Vec<MoveRecord>,
) -> bool {
    let mut d = duplicator.clone();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let round = line.len() + 1;
    let other = pos.graph(mv.side.other()).order();
    let response = match d.respond(pos, mv, &mut rng) {
        Ok(w) if w < other => w,
        // A forfeit counts as a spoiler win; record the offending answer.
        Ok(w) => {
            line.push(MoveRecord { round, side: mv.side, vertex: mv.vertex, response: w });
            return true;
        }
        Err(_) => {
            line.push(MoveRecord { round, side: mv.side, vertex: mv.vertex, response: usize::MAX });
            return true;
        }
    };
    line.push(MoveRecord { round, side: mv.side, vertex: mv.vertex, response });
    let pair = match mv.side {
        GameSide::Left => (mv.vertex, response),
        GameSide::Right => (response, mv.vertex),
    };
    if !extends(pos.left, pos.right, &pos.pairs, pair) {
        return true;
    }
    if pos.remaining > 1 {
        let mut next = pos.clone();
        next.pairs.push(pair);
        next.remaining -= 1;
        for m in all_moves(pos.left, pos.right) {
            if search_move(&next, &d, m, line) {
                return true;
            }
        }
    }
    line.pop();
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::efgame::{MinimaxDuplicator, MinimaxSpoiler, MirrorDuplicator, RandomSpoiler, ScriptedSpoiler};
    use crate::Limits;

    fn path(n: usize) -> Graph {
        let edges: Vec<(usize, usize)> = (1..n).map(|i| (i - 1, i)).collect();
        Graph::new(n, &edges, None, vec![]).unwrap()
    }

    #[test]
    fn minimax_spoiler_beats_anyone_on_k1_k2() {
        let (k1, k2) = (Graph::complete(1), Graph::complete(2));
        let l = Limits::default();
        let mut s = MinimaxSpoiler::new(&k1, &k2, 2, &l).unwrap();
        let mut d = MinimaxDuplicator::new(&k1, &k2, 2, &l).unwrap();
        let r = play(&k1, &k2, &[], &[], 2, &mut s, &mut d, 0).unwrap();
        assert_eq!(r.winner, Winner::Spoiler);
        assert_eq!(r.transcript.len(), 2);
        let mut d = MinimaxDuplicator::new(&k1, &k2, 1, &l).unwrap();
        let r = play(&k1, &k2, &[], &[], 1, &mut RandomSpoiler, &mut d, 5).unwrap();
        assert_eq!(r.winner, Winner::Duplicator);
    }

    #[test]
    fn mirror_wins_on_identical_graphs() {
        let g = path(6);
        for seed in 0..20 {
            let r = play(&g, &g, &[2], &[2], 4, &mut RandomSpoiler, &mut MirrorDuplicator, seed).unwrap();
            assert_eq!(r.winner, Winner::Duplicator);
            assert!(r.transcript.iter().all(|m| m.vertex == m.response));
        }
        assert_eq!(find_spoiler_win(&g, &g, &[], &[], 3, &MirrorDuplicator).unwrap(), None);
    }

    #[test]
    fn invalid_moves_forfeit() {
        let g = path(3);
        let h = path(2);
        let mut s = ScriptedSpoiler::new(vec![SpoilerMove { side: GameSide::Left, vertex: 2 }]);
        let r = play(&g, &h, &[], &[], 1, &mut s, &mut MirrorDuplicator, 0).unwrap();
        assert_eq!(r.winner, Winner::Spoiler);
        assert_eq!(r.forfeit.as_ref().unwrap().by, Winner::Duplicator);
        let mut s = ScriptedSpoiler::new(vec![SpoilerMove { side: GameSide::Right, vertex: 9 }]);
        let r = play(&g, &h, &[], &[], 1, &mut s, &mut MirrorDuplicator, 0).unwrap();
        assert_eq!(r.winner, Winner::Duplicator);
        assert!(r.transcript.is_empty());
        let json = serde_json::to_value(&r).unwrap();
        assert_eq!(json["forfeit"]["by"], "spoiler");
        assert!(play(&g, &h, &[0], &[], 1, &mut RandomSpoiler, &mut MirrorDuplicator, 0).is_err());
    }

    #[test]
    fn exhaustive_search_finds_mirror_weakness() {
        // P4 vs P3: mirroring fails when the spoiler picks vertex 3 on the left.
        let line = find_spoiler_win(&path(4), &path(3), &[], &[], 1, &MirrorDuplicator).unwrap().unwrap();
        assert_eq!(line.len(), 1);
        assert_eq!(line[0].vertex, 3);
        let line = find_spoiler_win(&path(4), &path(4), &[], &[], 2, &MirrorDuplicator).unwrap();
        assert_eq!(line, None);
    }

    #[test]
    fn transcript_json_shape() {
        let g = path(2);
        let mut s = ScriptedSpoiler::new(vec![SpoilerMove { side: GameSide::Right, vertex: 1 }]);
        let r = play(&g, &g, &[], &[], 1, &mut s, &mut MirrorDuplicator, 0).unwrap();
        assert_eq!(
            serde_json::to_string(&r).unwrap(),
            r#"{"winner":"duplicator","transcript":[{"round":1,"side":"right","vertex":1,"response":1}]}"#
        );
    }
}
