use std::fmt::Write as _;

use serde::Serialize;

use crate::eval::{stone_pairing_exact_with, stone_pairing_mc, PairingOptions, SamplingOptions};
use crate::formula::FormulaFamily;
use crate::graph::{generate_hn, Graph};
use crate::Limits;

use super::ConvergenceError;

/// Graphs to evaluate along.
#[derive(Debug, Clone)]
pub enum Sequence {
    /// `H_lo, ..., H_hi`, indexed by `n`.
    Hn { lo: u32, hi: u32 },
    /// Explicit graphs with labels, indexed by their order.
    Graphs(Vec<(String, Graph)>),
}

impl Sequence {
    pub fn describe(&self) -> String {
        match self {
            Sequence::Hn { lo, hi } => format!("H_n, n = {lo}..{hi}"),
            Sequence::Graphs(gs) => {
                let names: Vec<&str> = gs.iter().map(|(l, _)| l.as_str()).collect();
                format!("graphs [{}]", names.join(", "))
            }
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub enum PairingMode {
    Exact,
    MonteCarlo(SamplingOptions),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrajectoryPoint {
    pub n: usize,
    pub values: Vec<f64>,
    /// Exact pairings as `p/q` strings, when computed exactly.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact: Option<Vec<String>>,
    /// Hoeffding radius, when estimated.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub formulas: Vec<String>,
    pub sequence: String,
    pub points: Vec<TrajectoryPoint>,
}

/// Pairings of every formula of `family` on every graph of `seq`, using each
/// graph's roots.
pub fn trajectory(
    family: &FormulaFamily,
    seq: &Sequence,
    mode: PairingMode,
    limits: &Limits,
) -> Result<Trajectory, ConvergenceError> {
    let graphs: Vec<(usize, Graph)> = match seq {
        Sequence::Hn { lo, hi } => {
            if lo > hi {
                return Err(ConvergenceError::EmptyRange(*lo, *hi));
            }
            (*lo..=*hi)
                .map(|n| Ok((n as usize, generate_hn(n, limits.hn_cap)?)))
                .collect::<Result<_, ConvergenceError>>()?
        }
        Sequence::Graphs(gs) => {
            for w in gs.windows(2) {
                if w[1].1.order() <= w[0].1.order() {
                    return Err(ConvergenceError::NotIncreasing(w[1].1.order(), w[0].1.order()));
                }
            }
            gs.iter().map(|(_, g)| (g.order(), g.clone())).collect()
        }
    };
    let mut points = Vec::with_capacity(graphs.len());
    for (n, g) in &graphs {
        let point = match mode {
            PairingMode::Exact => {
                let opts = PairingOptions::with_budget(limits.eval_budget);
                let exact = family
                    .formulas()
                    .iter()
                    .map(|f| stone_pairing_exact_with(g, f, g.roots(), opts))
                    .collect::<Result<Vec<_>, _>>()?;
                TrajectoryPoint {
                    n: *n,
                    values: exact.iter().map(|r| *r.numer() as f64 / *r.denom() as f64).collect(),
                    exact: Some(exact.iter().map(|r| format!("{}/{}", r.numer(), r.denom())).collect()),
                    radius: None,
                }
            }
            PairingMode::MonteCarlo(opts) => {
                let est = family
                    .formulas()
                    .iter()
                    .map(|f| stone_pairing_mc(g, f, opts))
                    .collect::<Result<Vec<_>, _>>()?;
                TrajectoryPoint {
                    n: *n,
                    values: est.iter().map(|e| e.estimate).collect(),
                    exact: None,
                    radius: Some(crate::eval::hoeffding_radius(opts.samples, opts.confidence)),
                }
            }
        };
        points.push(point);
    }
    Ok(Trajectory {
        formulas: family.formulas().iter().map(|f| f.to_string()).collect(),
        sequence: seq.describe(),
        points,
    })
}

impl Trajectory {
    /// Columns `n,formula,value,radius`; formulas are 0-based indices.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,formula,value,radius\n");
        for p in &self.points {
            for (i, v) in p.values.iter().enumerate() {
                let r = p.radius.map(|r| r.to_string()).unwrap_or_default();
                let _ = writeln!(out, "{},{i},{v},{r}", p.n);
            }
        }
        out
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("# {}\n", self.sequence);
        for (i, f) in self.formulas.iter().enumerate() {
            let _ = writeln!(out, "# [{i}] {f}");
        }
        let _ = write!(out, "{:>6}", "n");
        for i in 0..self.formulas.len() {
            let _ = write!(out, "  {:>14}", format!("[{i}]"));
        }
        out.push('\n');
        for p in &self.points {
            let _ = write!(out, "{:>6}", p.n);
            for (i, v) in p.values.iter().enumerate() {
                let cell = match (&p.exact, p.radius) {
                    (Some(e), _) if e[i].len() <= 14 => e[i].clone(),
                    (_, Some(r)) => format!("{v:.4}±{r:.4}"),
                    _ => format!("{v:.10}"),
                };
                let _ = write!(out, "  {cell:>14}");
            }
            out.push('\n');
        }
        out
    }
}

/// Finite Cauchy proxy for one formula's limit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum LimitEstimate {
    Limit { value: f64 },
    NotCauchy { max_step: f64 },
}

/// For each formula: if both steps among the last three points are at most
/// `tol`, the last value; otherwise "not Cauchy at tol".
pub fn estimate_limit(t: &Trajectory, tol: f64) -> Result<Vec<LimitEstimate>, ConvergenceError> {
    let k = t.points.len();
    if k < 3 {
        return Err(ConvergenceError::TooFewPoints(k));
    }
    let tail = &t.points[k - 3..];
    Ok((0..t.formulas.len())
        .map(|i| {
            let step = (tail[1].values[i] - tail[0].values[i])
                .abs()
                .max((tail[2].values[i] - tail[1].values[i]).abs());
            if step <= tol {
                LimitEstimate::Limit { value: tail[2].values[i] }
            } else {
                LimitEstimate::NotCauchy { max_step: step }
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fam(src: &str) -> FormulaFamily {
        FormulaFamily::parse(src, None).unwrap()
    }

    fn synthetic(values: &[f64]) -> Trajectory {
        Trajectory {
            formulas: vec!["f".into()],
            sequence: "test".into(),
            points: values
                .iter()
                .enumerate()
                .map(|(n, &v)| TrajectoryPoint { n, values: vec![v], exact: None, radius: None })
                .collect(),
        }
    }

    #[test]
    fn neighbor_formula_on_hn() {
        let t = trajectory(
            &fam("exists x2. adj(x1,x2)"),
            &Sequence::Hn { lo: 2, hi: 5 },
            PairingMode::Exact,
            &Limits::default(),
        )
        .unwrap();
        let exact: Vec<&str> = t.points.iter().map(|p| p.exact.as_ref().unwrap()[0].as_str()).collect();
        assert_eq!(exact, ["4/5", "8/9", "16/17", "32/33"]);
        assert!(t.to_csv().starts_with("n,formula,value,radius\n2,0,0.8,\n"));
        assert!(t.to_text().contains("16/17"));
    }

    #[test]
    fn edge_density_on_hn() {
        let t = trajectory(&fam("adj(x1,x2)"), &Sequence::Hn { lo: 2, hi: 4 }, PairingMode::Exact, &Limits::default())
            .unwrap();
        for p in &t.points {
            let g = generate_hn(p.n as u32, 20).unwrap();
            let v = g.order() as f64;
            assert!((p.values[0] - 2.0 * g.edge_count() as f64 / (v * v)).abs() < 1e-12);
        }
    }

    #[test]
    fn sentences_are_constant() {
        let t = trajectory(
            &fam("exists x1. true\nforall x1. exists x2. adj(x1,x2)"),
            &Sequence::Hn { lo: 1, hi: 3 },
            PairingMode::MonteCarlo(SamplingOptions::new(10, 1)),
            &Limits::default(),
        )
        .unwrap();
        for p in &t.points {
            assert_eq!(p.values, [1.0, 0.0]);
        }
    }

    #[test]
    fn limit_proxy() {
        let t = synthetic(&[0.8, 8.0 / 9.0, 16.0 / 17.0, 32.0 / 33.0]);
        assert_eq!(estimate_limit(&t, 0.1).unwrap(), [LimitEstimate::Limit { value: 32.0 / 33.0 }]);
        let t = synthetic(&[0.5, 0.5, 0.5]);
        assert_eq!(estimate_limit(&t, 0.0).unwrap(), [LimitEstimate::Limit { value: 0.5 }]);
        let t = synthetic(&[0.0, 1.0, 0.0, 1.0]);
        assert!(matches!(estimate_limit(&t, 0.1).unwrap()[0], LimitEstimate::NotCauchy { .. }));
        assert!(estimate_limit(&synthetic(&[0.1, 0.2]), 0.1).is_err());
    }

    #[test]
    fn explicit_sequences_must_grow() {
        let g = Graph::complete(3);
        let seq = Sequence::Graphs(vec![("a".into(), g.clone()), ("b".into(), g)]);
        assert!(matches!(
            trajectory(&fam("adj(x1,x2)"), &seq, PairingMode::Exact, &Limits::default()),
            Err(ConvergenceError::NotIncreasing(3, 3))
        ));
    }
}
