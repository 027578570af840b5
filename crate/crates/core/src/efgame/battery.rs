use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::formula::{Formula, FormulaFamily, Term};

use super::GameError;

/// Connective nesting allowed between two quantifiers.
const CONNECTIVE_BUDGET: u32 = 2;

/// `count` random sentences of quantifier depth at most `depth`, reproducible
/// from `seed`. Variables are numbered by nesting depth, so each quantifier
/// binds a fresh index.
pub fn sample_sentence_battery(depth: usize, count: usize, seed: u64) -> Result<FormulaFamily, GameError> {
    if depth > 4 {
        return Err(GameError::DepthTooLarge(depth));
    }
    if count == 0 {
        return Err(GameError::EmptyBattery);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let formulas = (0..count)
        .map(|_| sentence(&mut rng, depth as u32, &mut Vec::new(), CONNECTIVE_BUDGET))
        .collect();
    Ok(FormulaFamily::new(formulas, Some(0)).expect("generated sentences are valid"))
}

fn sentence(rng: &mut ChaCha8Rng, depth: u32, scope: &mut Vec<u32>, budget: u32) -> Formula {
    let r: f64 = rng.gen();
    if budget > 0 && r < 0.3 {
        let mut sub = |rng: &mut ChaCha8Rng| sentence(rng, depth, scope, budget - 1);
        return match rng.gen_range(0..4) {
            0 => Formula::not(sub(rng)),
            1 => Formula::and_of(vec![sub(rng), sub(rng)]),
            2 => Formula::or_of(vec![sub(rng), sub(rng)]),
            _ => Formula::implies(sub(rng), sub(rng)),
        };
    }
    if depth > 0 && (scope.is_empty() || r < 0.75) {
        let v = scope.len() as u32 + 1;
        scope.push(v);
        let body = sentence(rng, depth - 1, scope, CONNECTIVE_BUDGET);
        scope.pop();
        return if rng.gen_bool(0.5) {
            Formula::exists(v, body)
        } else {
            Formula::forall(v, body)
        };
    }
    if scope.is_empty() {
        return if rng.gen_bool(0.5) { Formula::True } else { Formula::False };
    }
    // Atoms always mention the innermost variable so that quantifiers matter.
    let last = Term::Var(*scope.last().unwrap());
    let other = Term::Var(scope[rng.gen_range(0..scope.len())]);
    if rng.gen_bool(0.7) {
        Formula::adj(last, other)
    } else {
        Formula::eq(last, other)
    }
}
