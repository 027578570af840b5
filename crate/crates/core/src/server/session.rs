//! Game sessions. All game logic lives here and is synchronous; the HTTP layer
//! only locks, calls and serializes.

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::efgame::{extends, solve, GameSide, MoveRecord, Position, Solver, SpoilerMove, Winner};
use crate::graph::{restricted_matrix, shadow, shadows_equal_positional, Graph};
use crate::strategy::{init_state, ResponseTrace, StrategyState};
use crate::Limits;

use super::ApiError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Spoiler,
    Duplicator,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Engine {
    Minimax,
    #[serde(alias = "lm-key-strategy")]
    LmKey,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CreateRequest {
    pub left: String,
    pub right: String,
    pub rounds: usize,
    #[serde(default = "default_human")]
    pub human: Role,
    #[serde(default = "default_engine")]
    pub engine: Engine,
    #[serde(default)]
    pub seed: u64,
}

fn default_human() -> Role {
    Role::Spoiler
}

fn default_engine() -> Engine {
    Engine::Minimax
}

/// A human move. The spoiler gives `side` and `vertex`; the duplicator gives
/// `vertex` (its side is implied by the pending engine move). `index` is the
/// zero-based round the move belongs to; resubmitting an accepted move with
/// its index returns the same reply.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MoveRequest {
    pub side: Option<GameSide>,
    pub vertex: usize,
    pub index: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "state", rename_all = "lowercase")]
pub enum Status {
    Active,
    Finished { winner: Winner },
}

#[derive(Debug, Clone)]
pub struct Session {
    pub id: String,
    left_spec: String,
    right_spec: String,
    left: Arc<Graph>,
    right: Arc<Graph>,
    rounds: usize,
    human: Role,
    engine: Engine,
    seed: u64,
    transcript: Vec<MoveRecord>,
    /// Present only for lm-key sessions, one entry per round.
    traces: Vec<ResponseTrace>,
    /// Engine spoiler's move awaiting the human duplicator.
    pending: Option<SpoilerMove>,
    status: Status,
    strategy: Option<StrategyState>,
    limits: Limits,
}

/// Reply to an accepted move.
#[derive(Debug, Clone, Serialize)]
pub struct MoveReply {
    pub index: usize,
    #[serde(rename = "move")]
    pub record: MoveRecord,
    /// The engine's answer: the duplicator response when the human is the
    /// spoiler, or the next spoiler move when the human duplicates.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub engine: Option<SpoilerMove>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace: Option<ResponseTrace>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub winner: Option<Winner>,
}

impl Session {
    /// Builds a session; `graph` resolves graph specs. Solver work for an
    /// engine spoiler's first move happens here.
    pub fn create(
        id: String,
        req: CreateRequest,
        left: Graph,
        right: Graph,
        limits: &Limits,
    ) -> Result<Session, ApiError> {
        let (left, right) = (Arc::new(left), Arc::new(right));
        let mut strategy = None;
        match (req.engine, req.human) {
            (Engine::LmKey, Role::Duplicator) => {
                return Err(ApiError::bad_request(
                    "engine-role",
                    "the lm-key engine only plays the duplicator",
                ));
            }
            (Engine::LmKey, Role::Spoiler) => {
                let st = init_state(left.clone(), right.clone(), &[], &[], req.rounds, limits)
                    .map_err(|e| match e {
                        crate::strategy::PreconditionError::TooWide { .. } => {
                            ApiError::too_large(e.reason(), e.to_string())
                        }
                        _ => ApiError::bad_request(e.reason(), e.to_string()),
                    })?;
                strategy = Some(st);
            }
            (Engine::Minimax, _) => {
                Solver::new(&left, &right, req.rounds, limits)
                    .map_err(|e| ApiError::too_large("cap-exceeded", e.to_string()))?;
            }
        }
        let mut s = Session {
            id,
            left_spec: req.left,
            right_spec: req.right,
            left,
            right,
            rounds: req.rounds,
            human: req.human,
            engine: req.engine,
            seed: req.seed,
            transcript: Vec::new(),
            traces: Vec::new(),
            pending: None,
            status: Status::Active,
            strategy,
            limits: limits.clone(),
        };
        s.advance();
        Ok(s)
    }

    fn remaining(&self) -> usize {
        self.rounds - self.transcript.len()
    }

    fn pairs(&self) -> Vec<(usize, usize)> {
        self.transcript
            .iter()
            .map(|m| match m.side {
                GameSide::Left => (m.vertex, m.response),
                GameSide::Right => (m.response, m.vertex),
            })
            .collect()
    }

    fn played(&self, side: GameSide) -> Vec<usize> {
        self.pairs()
            .into_iter()
            .map(|(l, r)| if side == GameSide::Left { l } else { r })
            .collect()
    }

    fn graph(&self, side: GameSide) -> &Graph {
        match side {
            GameSide::Left => &self.left,
            GameSide::Right => &self.right,
        }
    }

    /// Ends the game when the rounds run out, and otherwise lets an engine
    /// spoiler pick its next move.
    fn advance(&mut self) {
        if self.status != Status::Active {
            return;
        }
        if self.remaining() == 0 {
            self.status = Status::Finished { winner: Winner::Duplicator };
            return;
        }
        if self.human == Role::Duplicator {
            self.pending = Some(self.engine_spoiler_move());
        }
    }

    fn engine_spoiler_move(&self) -> SpoilerMove {
        use crate::efgame::{MinimaxSpoiler, Spoiler};
        use rand::SeedableRng;
        let mut spoiler =
            MinimaxSpoiler::new(&self.left, &self.right, self.remaining(), &self.limits).expect("checked at creation");
        let pos = Position::new(&self.left, &self.right, self.pairs(), self.remaining());
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(self.seed);
        spoiler.choose(&pos, &mut rng).expect("minimax always moves")
    }

    fn engine_response(&mut self, mv: SpoilerMove) -> Result<(usize, Option<ResponseTrace>), ApiError> {
        match self.engine {
            Engine::LmKey => {
                let st = self.strategy.as_ref().expect("lm-key session has a strategy");
                let (w, next, trace) = st
                    .respond(mv.side, mv.vertex)
                    .map_err(|e| ApiError::internal(e.reason(), e.to_string()))?;
                self.strategy = Some(next);
                Ok((w, Some(trace)))
            }
            Engine::Minimax => {
                use crate::efgame::{Duplicator, MinimaxDuplicator};
                use rand::SeedableRng;
                let mut dup = MinimaxDuplicator::new(&self.left, &self.right, self.remaining(), &self.limits)
                    .expect("checked at creation");
                let pos = Position::new(&self.left, &self.right, self.pairs(), self.remaining());
                let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(self.seed);
                let w = dup.respond(&pos, mv, &mut rng).expect("minimax always answers");
                Ok((w, None))
            }
        }
    }

    /// Checks whether a move with `index` was already accepted. `Ok(Some)`
    /// is a replay, `Ok(None)` a fresh move.
    pub fn replay(&self, req: &MoveRequest) -> Result<Option<MoveReply>, ApiError> {
        let next = self.transcript.len();
        let Some(index) = req.index else { return Ok(None) };
        if index > next {
            return Err(ApiError::conflict(
                "out-of-order",
                format!("move index {index} is ahead of the next round ({next})"),
            ));
        }
        if index == next {
            return Ok(None);
        }
        let record = self.transcript[index];
        let same = match self.human {
            Role::Spoiler => req.side == Some(record.side) && req.vertex == record.vertex,
            Role::Duplicator => {
                req.vertex == record.response && req.side.is_none_or(|s| s == record.side.other())
            }
        };
        if !same {
            return Err(ApiError::conflict(
                "index-taken",
                format!("round index {index} was already played with a different move"),
            ));
        }
        Ok(Some(self.reply_for(index)))
    }

    fn reply_for(&self, index: usize) -> MoveReply {
        let record = self.transcript[index];
        let last = index + 1 == self.transcript.len();
        let engine = match self.human {
            Role::Spoiler => Some(SpoilerMove {
                side: record.side.other(),
                vertex: record.response,
            }),
            Role::Duplicator if last => self.pending,
            Role::Duplicator => self.transcript.get(index + 1).map(|m| SpoilerMove {
                side: m.side,
                vertex: m.vertex,
            }),
        };
        let winner = match self.status {
            Status::Finished { winner } if last => Some(winner),
            _ => None,
        };
        MoveReply {
            index,
            record,
            engine,
            trace: self.traces.get(index).cloned(),
            winner,
        }
    }

    /// Applies a fresh human move and the engine's reply.
    pub fn apply(&mut self, req: &MoveRequest) -> Result<MoveReply, ApiError> {
        if let Status::Finished { winner } = self.status {
            return Err(ApiError::conflict("finished", format!("the game is over; {winner} won")));
        }
        let (mv, response, trace) = match self.human {
            Role::Spoiler => {
                let side = req
                    .side
                    .ok_or_else(|| ApiError::unprocessable("missing-side", "a spoiler move needs a side"))?;
                self.check_vertex(side, req.vertex)?;
                let mv = SpoilerMove { side, vertex: req.vertex };
                let (w, trace) = self.engine_response(mv)?;
                (mv, w, trace)
            }
            Role::Duplicator => {
                let mv = self.pending.ok_or_else(|| ApiError::conflict("not-your-turn", "no spoiler move is pending"))?;
                if req.side.is_some_and(|s| s != mv.side.other()) {
                    return Err(ApiError::unprocessable(
                        "wrong-side",
                        format!("the response must be on the {:?} side", mv.side.other()).to_lowercase(),
                    ));
                }
                self.check_vertex(mv.side.other(), req.vertex)?;
                (mv, req.vertex, None)
            }
        };
        let pair = match mv.side {
            GameSide::Left => (mv.vertex, response),
            GameSide::Right => (response, mv.vertex),
        };
        let consistent = extends(&self.left, &self.right, &self.pairs(), pair);
        self.transcript.push(MoveRecord {
            round: self.transcript.len() + 1,
            side: mv.side,
            vertex: mv.vertex,
            response,
        });
        if let Some(t) = trace {
            self.traces.push(t);
        }
        self.pending = None;
        if !consistent {
            self.status = Status::Finished { winner: Winner::Spoiler };
        } else {
            self.advance();
        }
        Ok(self.reply_for(self.transcript.len() - 1))
    }

    fn check_vertex(&self, side: GameSide, v: usize) -> Result<(), ApiError> {
        let n = self.graph(side).order();
        if v >= n {
            return Err(ApiError::unprocessable(
                "invalid-vertex",
                format!("vertex {v} is not in the {} graph ({n} vertices)", side_name(side)),
            ));
        }
        Ok(())
    }

    pub fn snapshot(&self) -> Value {
        let turn = match (self.status, self.human, self.pending) {
            (Status::Finished { .. }, _, _) => Value::Null,
            (_, Role::Spoiler, _) => json!("spoiler"),
            (_, Role::Duplicator, Some(_)) => json!("duplicator"),
            (_, Role::Duplicator, None) => Value::Null,
        };
        let mut j = json!({
            "id": self.id,
            "left": { "spec": self.left_spec, "order": self.left.order() },
            "right": { "spec": self.right_spec, "order": self.right.order() },
            "rounds": self.rounds,
            "remaining": self.remaining(),
            "human": self.human,
            "engine": self.engine,
            "seed": self.seed,
            "transcript": self.transcript,
            "status": self.status,
            "turn": turn,
        });
        if let Some(p) = self.pending {
            j["pending"] = json!(p);
        }
        if self.engine == Engine::LmKey {
            j["traces"] = json!(self.traces);
        }
        j
    }

    /// Restricted matrices, current shadows at cap `2^remaining` and, when
    /// within the solver caps, the game-theoretic winner from here.
    pub fn analysis(&self) -> Value {
        let mut j = json!({ "id": self.id, "remaining": self.remaining() });
        let mut matrices = json!({});
        for side in [GameSide::Left, GameSide::Right] {
            matrices[side_name(side)] = match restricted_matrix(self.graph(side), &self.played(side)) {
                Ok(m) => json!({ "rows": m.rows, "cols": m.cols, "entries": m.entries, "shape": [m.rows.len(), m.cols.len()] }),
                Err(e) => json!({ "omitted": e.to_string() }),
            };
        }
        j["matrices"] = matrices;

        let cap = 1usize << self.remaining().min(62);
        let sl = shadow(&self.left, &self.played(GameSide::Left), cap);
        let sr = shadow(&self.right, &self.played(GameSide::Right), cap);
        j["shadows"] = match (sl, sr) {
            (Ok(a), Ok(b)) => {
                let equal = shadows_equal_positional(&a, &b).unwrap_or(false);
                json!({ "cap": cap, "left": a, "right": b, "equal": equal })
            }
            (Err(e), _) | (_, Err(e)) => json!({ "cap": cap, "omitted": e.to_string() }),
        };

        j["solve"] = match self.status {
            Status::Finished { winner } => json!({ "winner": winner, "verdict": format!("{winner} wins") }),
            Status::Active => match solve(&self.left, &self.right, &self.pairs(), self.remaining(), &self.limits) {
                Ok(w) => json!({ "winner": w, "verdict": format!("{w} wins") }),
                Err(_) => json!({ "omitted": "cap" }),
            },
        };
        j
    }
}

fn side_name(side: GameSide) -> &'static str {
    match side {
        GameSide::Left => "left",
        GameSide::Right => "right",
    }
}
