use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::eval::{hoeffding_radius, Pairing, SamplingOptions};
use crate::graph::{generate_hn, shadow, Graph, Side};
use crate::Limits;

use super::{ConvergenceError, PairingMode};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShadowProbability {
    pub n: u32,
    pub p: usize,
    pub l: usize,
    pub value: f64,
    /// Exact probability as `p/q`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

/// Whether `tuple` is `p` distinct A-vertices whose `l`-shadow holds every
/// vector of `{0,1}^p` exactly `l` times.
pub fn tuple_qualifies(g: &Graph, tuple: &[usize], l: usize) -> bool {
    let parts = match g.parts() {
        Ok(p) => p,
        Err(_) => return false,
    };
    let p = tuple.len();
    if tuple.iter().enumerate().any(|(i, v)| tuple[..i].contains(v)) {
        return false;
    }
    if tuple.iter().any(|&v| parts.side(v) != Side::A) {
        return false;
    }
    if p == 0 {
        return parts.b().len() >= l;
    }
    let s = shadow(g, tuple, l).expect("vertices are in range");
    s.iter().count() == 1 << p && s.iter().all(|(_, m)| m == l)
}

/// Probability that a uniform `p`-tuple of vertices of `H_n` (with
/// repetition) qualifies under [`tuple_qualifies`].
pub fn tuple_shadow_probability(
    n: u32,
    p: usize,
    l: usize,
    mode: PairingMode,
    limits: &Limits,
) -> Result<ShadowProbability, ConvergenceError> {
    let mut out = ShadowProbability {
        n,
        p,
        l,
        value: 0.0,
        exact: None,
        radius: None,
        samples: None,
        seed: None,
    };
    if p == 0 {
        out.value = if l <= n as usize { 1.0 } else { 0.0 };
        out.exact = Some(format!("{}/1", out.value as u8));
        return Ok(out);
    }
    if p >= 64 {
        return Err(ConvergenceError::BudgetExceeded {
            what: "tuple length",
            needed: p as u128,
            budget: 63,
        });
    }
    match mode {
        PairingMode::Exact => {
            let r = exact_probability(n, p, l, limits)?;
            out.value = *r.numer() as f64 / *r.denom() as f64;
            out.exact = Some(format!("{}/{}", r.numer(), r.denom()));
        }
        PairingMode::MonteCarlo(opts) => {
            let est = sampled_probability(n, p, l, opts, limits)?;
            out.value = est;
            out.radius = Some(hoeffding_radius(opts.samples, opts.confidence));
            out.samples = Some(opts.samples);
            out.seed = Some(opts.seed);
        }
    }
    Ok(out)
}

/// Counts qualifying tuples through their rows. Distinct vertices sharing a
/// row are distinct copies, so a row repeated `k` times contributes the
/// falling factorial `n (n-1) ... (n-k+1)`.
fn exact_probability(n: u32, p: usize, l: usize, limits: &Limits) -> Result<Pairing, ConvergenceError> {
    if n > limits.hn_cap || n > 31 {
        return Err(crate::graph::GraphError::CapExceeded {
            what: "H_n index",
            value: n as u64,
            cap: limits.hn_cap.min(31) as u64,
        }
        .into());
    }
    let order = n as u128 * ((1u128 << n) + 1);
    let total = order.checked_pow(p as u32).unwrap_or(u128::MAX);
    if total > limits.eval_budget as u128 {
        return Err(ConvergenceError::BudgetExceeded {
            what: "exact tuple enumeration",
            needed: total,
            budget: limits.eval_budget,
        });
    }
    let rows = 1u64 << n;
    let mut rowtuple = vec![0u64; p];
    let mut hits: u64 = 0;
    loop {
        if qualifies_rows(&rowtuple, n, l) {
            hits += copy_count(&rowtuple, n as u64);
        }
        let mut i = p;
        loop {
            if i == 0 {
                return Ok(Ratio::new(hits, total as u64));
            }
            i -= 1;
            rowtuple[i] += 1;
            if rowtuple[i] < rows {
                break;
            }
            rowtuple[i] = 0;
        }
    }
}

fn qualifies_rows(rows: &[u64], n: u32, l: usize) -> bool {
    let p = rows.len();
    let mut counts = vec![0usize; 1 << p];
    for b in 0..n {
        let pattern = rows
            .iter()
            .enumerate()
            .fold(0usize, |acc, (i, r)| acc | ((r >> b & 1) as usize) << i);
        counts[pattern] += 1;
    }
    counts.iter().all(|&c| c >= l)
}

fn copy_count(rows: &[u64], copies: u64) -> u64 {
    let mut seen: Vec<(u64, u64)> = Vec::new();
    for &r in rows {
        match seen.iter_mut().find(|(x, _)| *x == r) {
            Some((_, k)) => *k += 1,
            None => seen.push((r, 1)),
        }
    }
    seen.iter()
        .map(|&(_, k)| (0..k).map(|j| copies.saturating_sub(j)).product::<u64>())
        .product()
}

fn sampled_probability(
    n: u32,
    p: usize,
    l: usize,
    opts: SamplingOptions,
    limits: &Limits,
) -> Result<f64, ConvergenceError> {
    if opts.samples == 0 {
        return Err(crate::eval::EvalError::ZeroSamples.into());
    }
    if !(opts.confidence > 0.0 && opts.confidence < 1.0) {
        return Err(crate::eval::EvalError::BadConfidence(opts.confidence).into());
    }
    let g = generate_hn(n, limits.hn_cap)?;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut tuple = vec![0usize; p];
    let mut hits = 0u64;
    for _ in 0..opts.samples {
        for x in tuple.iter_mut() {
            *x = rng.gen_range(0..g.order());
        }
        hits += tuple_qualifies(&g, &tuple, l) as u64;
    }
    Ok(hits as f64 / opts.samples as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exact(n: u32, p: usize, l: usize) -> ShadowProbability {
        tuple_shadow_probability(n, p, l, PairingMode::Exact, &Limits::default()).unwrap()
    }

    /// Enumerates vertex tuples directly and asks the shadow code.
    fn brute(n: u32, p: usize, l: usize) -> Ratio<u64> {
        let g = generate_hn(n, 20).unwrap();
        let v = g.order();
        let total = v.pow(p as u32);
        let mut hits = 0u64;
        for i in 0..total {
            let mut rest = i;
            let tuple: Vec<usize> = (0..p)
                .map(|_| {
                    let x = rest % v;
                    rest /= v;
                    x
                })
                .collect();
            hits += tuple_qualifies(&g, &tuple, l) as u64;
        }
        Ratio::new(hits, total as u64)
    }

    #[test]
    fn single_vertex_closed_form() {
        for n in 3..=6u32 {
            let r = exact(n, 1, 1);
            let want = Ratio::new((1u64 << n) - 2, (1u64 << n) + 1);
            assert_eq!(r.exact.unwrap(), format!("{}/{}", want.numer(), want.denom()));
        }
        assert_eq!(exact(3, 1, 1).exact.unwrap(), "2/3");
    }

    #[test]
    fn row_counting_matches_brute_force() {
        for (n, p, l) in [(2, 1, 1), (3, 2, 1), (4, 2, 1), (3, 1, 2), (2, 2, 1), (4, 1, 2)] {
            let r = exact(n, p, l);
            let b = brute(n, p, l);
            assert_eq!(r.exact.unwrap(), format!("{}/{}", b.numer(), b.denom()), "n={n} p={p} l={l}");
        }
    }

    #[test]
    fn empty_tuple_rule() {
        assert_eq!(exact(3, 0, 3).value, 1.0);
        assert_eq!(exact(3, 0, 4).value, 0.0);
    }

    #[test]
    fn sampled_close_to_exact() {
        let e = exact(4, 2, 1).value;
        let opts = SamplingOptions::new(20_000, 11);
        let mc = tuple_shadow_probability(4, 2, 1, PairingMode::MonteCarlo(opts), &Limits::default()).unwrap();
        assert!((mc.value - e).abs() <= mc.radius.unwrap(), "{} vs {e}", mc.value);
    }

    #[test]
    fn budget_guard() {
        let tight = Limits {
            eval_budget: 1000,
            ..Limits::default()
        };
        assert!(matches!(
            tuple_shadow_probability(5, 2, 1, PairingMode::Exact, &tight),
            Err(ConvergenceError::BudgetExceeded { .. })
        ));
    }
}
