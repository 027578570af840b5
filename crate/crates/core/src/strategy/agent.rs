use rand_chacha::ChaCha8Rng;

use crate::efgame::{Duplicator, Position, SpoilerMove};

use super::{ResponseTrace, StrategyState};

/// Duplicator agent driven by a [`StrategyState`]. Each answer advances the
/// state; strategy errors become forfeits with the error as the reason.
#[derive(Debug, Clone)]
pub struct LmKeyAgent {
    state: StrategyState,
    traces: Vec<ResponseTrace>,
}

impl LmKeyAgent {
    pub fn new(state: StrategyState) -> Self {
        LmKeyAgent {
            state,
            traces: Vec::new(),
        }
    }

    pub fn state(&self) -> &StrategyState {
        &self.state
    }

    pub fn traces(&self) -> &[ResponseTrace] {
        &self.traces
    }
}

impl StrategyState {
    pub fn as_agent(self) -> LmKeyAgent {
        LmKeyAgent::new(self)
    }
}

impl Duplicator for LmKeyAgent {
    fn respond(&mut self, _: &Position<'_>, mv: SpoilerMove, _: &mut ChaCha8Rng) -> Result<usize, String> {
        let (w, next, trace) = self
            .state
            .respond(mv.side, mv.vertex)
            .map_err(|e| format!("{}: {e}", e.reason()))?;
        self.state = next;
        self.traces.push(trace);
        Ok(w)
    }
}
