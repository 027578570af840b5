//! Monte Carlo pairings. All randomness comes from ChaCha8 seeded with a
//! `u64`, so estimates are reproducible across platforms.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::formula::{threshold_range, Formula};
use crate::graph::Graph;

use super::{Compiled, EvalError};

/// Two-sided Hoeffding radius `sqrt(ln(2/delta) / (2 N))` for a mean of `N`
/// samples in `[0,1]` at confidence `1 - delta`.
pub fn hoeffding_radius(samples: u64, confidence: f64) -> f64 {
    let delta = 1.0 - confidence;
    ((2.0 / delta).ln() / (2.0 * samples as f64)).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplingOptions {
    pub samples: u64,
    pub seed: u64,
    pub confidence: f64,
}

impl SamplingOptions {
    pub fn new(samples: u64, seed: u64) -> Self {
        SamplingOptions {
            samples,
            seed,
            confidence: 0.99,
        }
    }

    fn check(&self) -> Result<(), EvalError> {
        if self.samples == 0 {
            return Err(EvalError::ZeroSamples);
        }
        if !(self.confidence > 0.0 && self.confidence < 1.0) {
            return Err(EvalError::BadConfidence(self.confidence));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PairingEstimate {
    pub estimate: f64,
    pub samples: u64,
    pub radius: f64,
    pub confidence: f64,
    pub seed: u64,
}

impl PairingEstimate {
    fn from_hits(hits: u64, opts: &SamplingOptions) -> Self {
        PairingEstimate {
            estimate: hits as f64 / opts.samples as f64,
            samples: opts.samples,
            radius: hoeffding_radius(opts.samples, opts.confidence),
            confidence: opts.confidence,
            seed: opts.seed,
        }
    }

    /// Whether `value` lies within the confidence radius of the estimate.
    pub fn covers(&self, value: f64) -> bool {
        (self.estimate - value).abs() <= self.radius
    }
}

fn sample_tuple(rng: &mut ChaCha8Rng, n: usize, out: &mut [usize]) {
    for x in out.iter_mut() {
        *x = rng.gen_range(0..n);
    }
}

/// Fraction of `samples` independent uniform k-tuples (with repetition)
/// satisfying `f`, using the graph's roots.
pub fn stone_pairing_mc(
    g: &Graph,
    f: &Formula,
    opts: SamplingOptions,
) -> Result<PairingEstimate, EvalError> {
    stone_pairing_mc_rooted(g, f, g.roots(), opts)
}

pub fn stone_pairing_mc_rooted(
    g: &Graph,
    f: &Formula,
    roots: &[usize],
    opts: SamplingOptions,
) -> Result<PairingEstimate, EvalError> {
    opts.check()?;
    let k = f.contiguous_arity()?;
    if g.order() == 0 {
        return Err(EvalError::EmptyGraph);
    }
    let mut c = Compiled::new(g, f, roots)?;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut tuple = vec![0; k];
    let mut hits = 0;
    for _ in 0..opts.samples {
        sample_tuple(&mut rng, g.order(), &mut tuple);
        hits += c.eval(&tuple) as u64;
    }
    Ok(PairingEstimate::from_hits(hits, &opts))
}

/// Estimates the pairing of the counting formula without building it: each of
/// `opts.samples` trials draws `group_size` independent k-tuples, counts the
/// satisfying ones, and succeeds iff the count lies in
/// [`threshold_range`]`(group_size, a, b)`.
pub fn stone_threshold_mc(
    g: &Graph,
    f: &Formula,
    group_size: u64,
    a: f64,
    b: f64,
    opts: SamplingOptions,
) -> Result<PairingEstimate, EvalError> {
    opts.check()?;
    let k = f.contiguous_arity()?;
    if g.order() == 0 {
        return Err(EvalError::EmptyGraph);
    }
    let range = threshold_range(group_size, a, b)?;
    let mut c = Compiled::new(g, f, g.roots())?;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut tuple = vec![0; k];
    let mut successes = 0;
    for _ in 0..opts.samples {
        let mut count = 0u64;
        for _ in 0..group_size {
            sample_tuple(&mut rng, g.order(), &mut tuple);
            count += c.eval(&tuple) as u64;
        }
        if matches!(range, Some((lo, hi)) if lo <= count && count <= hi) {
            successes += 1;
        }
    }
    Ok(PairingEstimate::from_hits(successes, &opts))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse_formula;
    use crate::graph::generate_hn;

    #[test]
    fn radius_formula() {
        let r = hoeffding_radius(10_000, 0.99);
        assert!((r - (200f64.ln() / 20_000.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn sentence_estimates_are_degenerate() {
        let h2 = generate_hn(2, 20).unwrap();
        let e = stone_pairing_mc(&h2, &parse_formula("exists x1. true").unwrap(), SamplingOptions::new(17, 3))
            .unwrap();
        assert_eq!(e.estimate, 1.0);
        assert_eq!(e.radius, hoeffding_radius(17, 0.99));
    }

    #[test]
    fn mc_close_to_exact_and_deterministic() {
        let h2 = generate_hn(2, 20).unwrap();
        let f = parse_formula("exists x2. adj(x1,x2)").unwrap();
        let opts = SamplingOptions::new(10_000, 42);
        let e = stone_pairing_mc(&h2, &f, opts).unwrap();
        assert!(e.covers(0.8), "{e:?}");
        assert_eq!(e, stone_pairing_mc(&h2, &f, opts).unwrap());
        assert_eq!(e.seed, 42);
    }

    #[test]
    fn sampling_errors() {
        let h2 = generate_hn(2, 20).unwrap();
        let f = parse_formula("adj(x1,x2)").unwrap();
        assert_eq!(
            stone_pairing_mc(&h2, &f, SamplingOptions::new(0, 1)),
            Err(EvalError::ZeroSamples)
        );
        let mut bad = SamplingOptions::new(5, 1);
        bad.confidence = 1.0;
        assert!(matches!(stone_pairing_mc(&h2, &f, bad), Err(EvalError::BadConfidence(_))));
        assert_eq!(
            stone_threshold_mc(&h2, &f, 10, 0.0, 1.0, SamplingOptions::new(0, 1)),
            Err(EvalError::ZeroSamples)
        );
    }

    #[test]
    fn threshold_full_interval_always_succeeds() {
        let h2 = generate_hn(2, 20).unwrap();
        let f = parse_formula("adj(x1,x2)").unwrap();
        let e = stone_threshold_mc(&h2, &f, 50, 0.0, 1.0, SamplingOptions::new(200, 9)).unwrap();
        assert_eq!(e.estimate, 1.0);
    }
}
