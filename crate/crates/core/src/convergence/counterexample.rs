use std::fmt::Write as _;

use num_rational::Ratio;
use serde::Serialize;

use crate::eval::{rooted_pairings_all, Pairing, PairingOptions};
use crate::formula::Formula;
use crate::graph::{generate_hn, Graph, Side};
use crate::Limits;

use super::ConvergenceError;

/// Value of the separating formula on the limit modeling.
pub const MODELING_VALUE: f64 = 2.0 / 3.0;

/// Required gap below the modeling value for the verdict.
pub const VERDICT_GAP: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RowMethod {
    /// Every root and every vertex evaluated.
    Exhaustive,
    /// `deg(r) / |V|`, the exact value of `adj(x1,r1)` at root `r`.
    Degree,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CounterexampleRow {
    pub n: u32,
    /// Maximum over roots, as `p/q`.
    pub max: String,
    pub value: f64,
    /// Lowest-id root attaining the maximum.
    pub argmax: usize,
    pub argmax_side: &'static str,
    pub method: RowMethod,
    /// Whether the maximum equals `2^(n-1) n / (n 2^n + n)`.
    pub matches_closed_form: bool,
    pub at_most_half: bool,
    pub gap_to_modeling: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CounterexampleReport {
    pub formula: String,
    pub modeling_value: f64,
    pub rows: Vec<CounterexampleRow>,
    pub nondecreasing: bool,
    pub reproduced: bool,
    pub verdict: String,
}

/// `2^(n-1) n / (n 2^n + n)`: the largest B-degree over the vertex count.
pub fn closed_form_max(n: u32) -> Pairing {
    let n64 = n as u64;
    Ratio::new((1u64 << (n - 1)) * n64, n64 * (1u64 << n) + n64)
}

fn side_name(g: &Graph, v: usize) -> &'static str {
    match g.parts().map(|p| p.side(v)) {
        Ok(Side::A) => "A",
        Ok(Side::B) => "B",
        Err(_) => "?",
    }
}

fn max_pairing(values: &[Pairing]) -> (usize, Pairing) {
    let mut best = (0, values[0]);
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > best.1 {
            best = (i, v);
        }
    }
    best
}

/// Maximum over single roots of `<adj(x1,r1), H_n>` for each `n` in range.
/// Rows are evaluated exhaustively while `|V|^2` fits the evaluation budget;
/// larger rows use the degree identity.
pub fn counterexample_report(n_lo: u32, n_hi: u32, limits: &Limits) -> Result<CounterexampleReport, ConvergenceError> {
    if n_lo == 0 || n_lo > n_hi {
        return Err(ConvergenceError::EmptyRange(n_lo, n_hi));
    }
    let psi0 = Formula::adj(crate::formula::Term::Var(1), crate::formula::Term::Root(1));
    let mut rows = Vec::new();
    for n in n_lo..=n_hi {
        let g = generate_hn(n, limits.hn_cap)?;
        let v = g.order() as u64;
        let (method, values) = if (v as u128) * (v as u128) <= limits.eval_budget as u128 {
            (
                RowMethod::Exhaustive,
                rooted_pairings_all(&g, &psi0, PairingOptions::with_budget(limits.eval_budget))?,
            )
        } else {
            (
                RowMethod::Degree,
                (0..g.order()).map(|r| Ratio::new(g.degree(r) as u64, v)).collect(),
            )
        };
        let (argmax, max) = max_pairing(&values);
        let value = *max.numer() as f64 / *max.denom() as f64;
        rows.push(CounterexampleRow {
            n,
            max: format!("{}/{}", max.numer(), max.denom()),
            value,
            argmax,
            argmax_side: side_name(&g, argmax),
            method,
            matches_closed_form: max == closed_form_max(n),
            at_most_half: max <= Ratio::new(1, 2),
            gap_to_modeling: MODELING_VALUE - value,
        });
    }
    let nondecreasing = rows.windows(2).all(|w| w[0].value <= w[1].value);
    let reproduced = rows.iter().all(|r| r.at_most_half && r.gap_to_modeling > VERDICT_GAP);
    let verdict = if reproduced {
        "counterexample reproduced".to_string()
    } else {
        "counterexample not reproduced".to_string()
    };
    Ok(CounterexampleReport {
        formula: psi0.to_string(),
        modeling_value: MODELING_VALUE,
        rows,
        nondecreasing,
        reproduced,
        verdict,
    })
}

impl CounterexampleReport {
    pub fn to_text(&self) -> String {
        let mut out = format!("# max over roots of <{}, H_n>; modeling value 2/3\n", self.formula);
        let _ = writeln!(
            out,
            "{:>4}  {:>14}  {:>12}  {:>7}  {:>4}  {:>10}  {:>6}  {:>9}",
            "n", "max", "value", "argmax", "side", "method", "<= 1/2", "gap"
        );
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{:>4}  {:>14}  {:>12.8}  {:>7}  {:>4}  {:>10}  {:>6}  {:>9.6}",
                r.n,
                r.max,
                r.value,
                r.argmax,
                r.argmax_side,
                format!("{:?}", r.method).to_lowercase(),
                r.at_most_half,
                r.gap_to_modeling
            );
        }
        let _ = writeln!(out, "nondecreasing: {}", self.nondecreasing);
        let _ = writeln!(out, "verdict: {}", self.verdict);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_range_exhaustive() {
        let r = counterexample_report(2, 6, &Limits::default()).unwrap();
        assert_eq!(r.rows[0].max, "2/5");
        assert_eq!(r.rows[0].argmax_side, "B");
        assert!(r.rows.iter().all(|row| row.method == RowMethod::Exhaustive && row.matches_closed_form));
        assert!(r.nondecreasing && r.reproduced);
        assert_eq!(r.verdict, "counterexample reproduced");
    }

    #[test]
    fn degree_fallback_agrees() {
        let small = Limits {
            eval_budget: 100,
            ..Limits::default()
        };
        let r = counterexample_report(2, 4, &small).unwrap();
        assert_eq!(r.rows[0].method, RowMethod::Exhaustive);
        assert_eq!(r.rows[2].method, RowMethod::Degree);
        assert!(r.rows.iter().all(|row| row.matches_closed_form));
        assert!(r.to_text().contains("verdict: counterexample reproduced"));
    }

    #[test]
    fn closed_form_at_ten() {
        assert_eq!(closed_form_max(10), Ratio::new(5120, 10250));
    }
}
