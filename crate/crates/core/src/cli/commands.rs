use std::fmt::Write as _;
use std::sync::Arc;

use serde_json::{json, Value};

use crate::convergence::{
    counterexample_report, estimate_limit, find_roots, trajectory, tuple_shadow_probability, LimitEstimate,
    PairingMode, Sequence,
};
use crate::efgame::{
    play, solve, ClosureSpoiler, Duplicator, GameSide, MinimaxDuplicator, MinimaxSpoiler, MirrorDuplicator,
    RandomSpoiler, Spoiler, SpoilerMove,
};
use crate::eval::{
    satisfies_rooted, stone_pairing_exact_with, stone_pairing_mc_rooted, stone_threshold_mc, Assignment, Pairing,
    PairingOptions, SamplingOptions,
};
use crate::formula::{build_threshold_formula, disjunct_count, threshold_range};
use crate::graph::{
    generate_hn, is_universal, matrices_match, restricted_matrix, row_histogram, shadow_with, Graph, GraphJson,
    NullVectorRule, RestrictedMatrix,
};
use crate::strategy::init_state;
use crate::Limits;

use super::{
    family_arg, formula_arg, graph_from_spec, range_arg, CliError, Command, DuplicatorKind, EfCommand, Format,
    GenCommand, Io, Output, Sampling, SpoilerKind,
};

fn ratio(r: &Pairing) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

fn to_f64(r: &Pairing) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

fn limits() -> Result<Limits, CliError> {
    Limits::from_env().map_err(|e| CliError::domain("config", e))
}

fn graph(spec: &str, limits: &Limits) -> Result<Graph, CliError> {
    graph_from_spec(spec, limits, true)
}

fn rooted(spec: &str, roots: &[usize], limits: &Limits) -> Result<Graph, CliError> {
    let g = graph(spec, limits)?;
    if roots.is_empty() {
        Ok(g)
    } else {
        Ok(g.with_roots(roots.to_vec())?)
    }
}

fn sampling_options(s: &Sampling) -> Result<Option<SamplingOptions>, CliError> {
    if !s.mc {
        return Ok(None);
    }
    let seed = s.seed.ok_or_else(|| CliError::usage("--seed is required with --mc"))?;
    Ok(Some(SamplingOptions {
        samples: s.samples,
        seed,
        confidence: s.confidence,
    }))
}

pub(super) fn execute(cmd: Command, format: Format, io: &mut Io<'_>) -> Result<Output, CliError> {
    let limits = limits()?;
    match cmd {
        Command::Parse { formula } => {
            let f = formula_arg(&formula)?;
            let free: Vec<u32> = f.free_variables().into_iter().collect();
            Ok(Output::new(
                f.to_string(),
                json!({
                    "formula": f.to_string(),
                    "free_variables": free,
                    "quantifier_depth": f.quantifier_depth(),
                    "roots": f.max_root(),
                }),
            ))
        }
        Command::Eval { graph: g, formula, tuple, roots } => {
            let g = rooted(&g, &roots, &limits)?;
            let f = formula_arg(&formula)?;
            let asg = Assignment::from_tuple(&tuple);
            let v = satisfies_rooted(&g, &f, &asg, g.roots())?;
            Ok(Output::new(v.to_string(), json!({ "value": v })))
        }
        Command::Stone { graph: g, formula, roots, distinct, sampling } => {
            let g = rooted(&g, &roots, &limits)?;
            let f = formula_arg(&formula)?;
            match sampling_options(&sampling)? {
                None => {
                    let opts = PairingOptions {
                        budget: limits.eval_budget,
                        with_repetition: !distinct,
                    };
                    let r = stone_pairing_exact_with(&g, &f, g.roots(), opts)?;
                    Ok(Output::new(
                        ratio(&r),
                        json!({ "value": ratio(&r), "float": to_f64(&r), "exact": true, "seed": null }),
                    ))
                }
                Some(opts) => {
                    if distinct {
                        return Err(CliError::usage("--distinct is only supported for exact pairings"));
                    }
                    let e = stone_pairing_mc_rooted(&g, &f, g.roots(), opts)?;
                    let mut j = serde_json::to_value(e).expect("estimate");
                    j["exact"] = json!(false);
                    Ok(Output::new(
                        format!(
                            "{:.6} ± {:.6} ({}% confidence, {} samples, seed {})",
                            e.estimate,
                            e.radius,
                            e.confidence * 100.0,
                            e.samples,
                            e.seed
                        ),
                        j,
                    ))
                }
            }
        }
        Command::Threshold { graph: g, formula, group_size, a, b, build, groups, seed, confidence } => {
            let f = formula_arg(&formula)?;
            let range = threshold_range(group_size, a, b)?;
            let range_json = range.map(|(lo, hi)| json!([lo, hi])).unwrap_or(Value::Null);
            if build {
                let k = f.contiguous_arity()?;
                let count = range.map(|(lo, hi)| disjunct_count(group_size, lo, hi)).unwrap_or(0);
                let built = build_threshold_formula(&f, group_size, a, b, limits.disjunct_cap)?;
                let text = built.to_string();
                return Ok(Output::new(
                    text.clone(),
                    json!({
                        "formula": text,
                        "free_variables": group_size as usize * k,
                        "disjuncts": count.to_string(),
                        "range": range_json,
                    }),
                ));
            }
            let g = g.ok_or_else(|| CliError::usage("--graph is required unless --build is given"))?;
            let g = graph(&g, &limits)?;
            let seed = seed.ok_or_else(|| CliError::usage("--seed is required for sampled thresholds"))?;
            let opts = SamplingOptions { samples: groups, seed, confidence };
            let e = stone_threshold_mc(&g, &f, group_size, a, b, opts)?;
            let mut j = serde_json::to_value(e).expect("estimate");
            j["range"] = range_json;
            j["group_size"] = json!(group_size);
            let range_text = match range {
                Some((lo, hi)) => format!("[{lo}, {hi}]"),
                None => "empty".into(),
            };
            Ok(Output::new(
                format!(
                    "{:.6} ± {:.6} (count range {range_text}, {groups} groups of {group_size}, seed {seed})",
                    e.estimate, e.radius
                ),
                j,
            ))
        }
        Command::Ef { command } => ef(command, &limits, io),
        Command::Gen { command: GenCommand::Hn { n } } => {
            let g = generate_hn(n, limits.hn_cap)?;
            let j = serde_json::to_value(GraphJson::from(&g)).expect("graph json");
            let text = if format == Format::Text { g.to_edge_list() } else { String::new() };
            Ok(Output::new(text, j))
        }
        Command::Shadow { graph: g, played, l, all_columns } => {
            let g = graph(&g, &limits)?;
            let rule = if all_columns { NullVectorRule::AllColumns } else { NullVectorRule::RemainingColumns };
            let s = shadow_with(&g, &played, l, rule)?;
            let mut text = format!("basis {:?}, cap {}, total {}\n", s.basis(), s.cap(), s.total());
            for (u, m) in s.iter() {
                let label = if s.dimension() == 0 { "()".to_string() } else { s.pattern_string(u) };
                let _ = writeln!(text, "{label} x{m}");
            }
            Ok(Output::new(text, serde_json::to_value(&s).expect("shadow json")))
        }
        Command::Universal { graph: g, l } => {
            let g = graph(&g, &limits)?;
            let u = is_universal(&g, l, limits.universality_cap)?;
            let min = row_histogram(&g, limits.universality_cap)?.into_iter().min().unwrap_or(0);
            Ok(Output::new(u.to_string(), json!({ "l": l, "universal": u, "min_row_count": min })))
        }
        Command::Matrix { graph: g, played, right, right_played } => {
            let g = graph(&g, &limits)?;
            let m = restricted_matrix(&g, &played)?;
            let mut text = matrix_text(&m);
            let mut j = json!({ "left": m });
            if let Some(r) = right {
                let r = graph(&r, &limits)?;
                let m2 = restricted_matrix(&r, &right_played)?;
                let matched = matrices_match(&g, &played, &r, &right_played)?;
                let _ = write!(text, "---\n{}match: {matched}\n", matrix_text(&m2));
                j["right"] = json!(m2);
                j["match"] = json!(matched);
            }
            Ok(Output::new(text, j))
        }
        Command::Converge { family, hn, graphs, tol, sampling } => {
            let fam = family_arg(&family, None)?;
            let seq = match (hn, graphs.is_empty()) {
                (Some(r), _) => {
                    let (lo, hi) = range_arg(&r)?;
                    Sequence::Hn { lo, hi }
                }
                (None, false) => Sequence::Graphs(
                    graphs
                        .iter()
                        .map(|s| Ok((s.clone(), graph(s, &limits)?)))
                        .collect::<Result<_, CliError>>()?,
                ),
                (None, true) => return Err(CliError::usage("give --hn lo..hi or --graphs")),
            };
            let mode = match sampling_options(&sampling)? {
                Some(o) => PairingMode::MonteCarlo(o),
                None => PairingMode::Exact,
            };
            let t = trajectory(&fam, &seq, mode, &limits)?;
            let limit = if t.points.len() >= 3 { Some(estimate_limit(&t, tol)?) } else { None };
            let mut text = t.to_text();
            if let Some(ls) = &limit {
                for (i, l) in ls.iter().enumerate() {
                    let _ = match l {
                        LimitEstimate::Limit { value } => writeln!(text, "limit [{i}] ≈ {value:.10} (tol {tol})"),
                        LimitEstimate::NotCauchy { max_step } => {
                            writeln!(text, "limit [{i}]: not Cauchy at tol {tol} (last step {max_step:.6})")
                        }
                    };
                }
            }
            let csv = t.to_csv();
            Ok(Output::new(text, json!({ "trajectory": t, "tol": tol, "limits": limit })).with_csv(csv))
        }
        Command::Roots { graph: g, family, targets, m, budget, samples, seed } => {
            let g = graph(&g, &limits)?;
            let fam = family_arg(&family, Some(m as u32))?;
            let sampling = match (samples, seed) {
                (Some(samples), Some(seed)) => Some(SamplingOptions::new(samples, seed)),
                (Some(_), None) => return Err(CliError::usage("--seed is required with --samples")),
                _ => None,
            };
            let r = find_roots(
                &g,
                &fam,
                &targets,
                m,
                budget.unwrap_or(limits.eval_budget),
                sampling,
                PairingOptions::with_budget(limits.eval_budget),
            )?;
            let text = format!(
                "tuple {:?}\nvalues {}\ndelta {:.12} ({:?}, {} tuples)",
                r.tuple,
                r.values.join(" "),
                r.delta,
                r.mode,
                r.examined
            );
            Ok(Output::new(text, serde_json::to_value(&r).expect("roots json")))
        }
        Command::Shadowprob { n, p, l, sampling } => {
            let mode = match sampling_options(&sampling)? {
                Some(o) => PairingMode::MonteCarlo(o),
                None => PairingMode::Exact,
            };
            let r = tuple_shadow_probability(n, p, l, mode, &limits)?;
            let text = match (&r.exact, r.radius) {
                (Some(e), _) => format!("{e} ({:.10})", r.value),
                (None, Some(rad)) => format!("{:.6} ± {rad:.6}", r.value),
                _ => format!("{}", r.value),
            };
            let csv = format!(
                "n,p,l,value,radius\n{n},{p},{l},{},{}\n",
                r.value,
                r.radius.map(|x| x.to_string()).unwrap_or_default()
            );
            Ok(Output::new(text, serde_json::to_value(&r).expect("json")).with_csv(csv))
        }
        Command::Counterexample { from, to } => {
            let rep = counterexample_report(from, to, &limits)?;
            let mut csv = String::from("n,max,value,argmax,side,method,at_most_half,gap\n");
            for r in &rep.rows {
                let _ = writeln!(
                    csv,
                    "{},{},{},{},{},{:?},{},{}",
                    r.n, r.max, r.value, r.argmax, r.argmax_side, r.method, r.at_most_half, r.gap_to_modeling
                );
            }
            Ok(Output::new(rep.to_text(), serde_json::to_value(&rep).expect("json")).with_csv(csv))
        }
        Command::Serve { addr, ttl } => {
            let rt = tokio::runtime::Runtime::new().map_err(|e| CliError::domain("io", e.to_string()))?;
            let config = crate::server::ServerConfig {
                ttl: std::time::Duration::from_secs(ttl),
                limits,
                ..Default::default()
            };
            let _ = writeln!(io.err, "listening on {addr}");
            rt.block_on(crate::server::serve(&addr, config))
                .map_err(|e| CliError::domain("io", e.to_string()))?;
            Ok(Output::new("", Value::Null))
        }
    }
}

fn matrix_text(m: &RestrictedMatrix) -> String {
    let mut s = format!("rows {:?}\ncols {:?}\n", m.rows, m.cols);
    for row in &m.entries {
        let line: Vec<String> = row.iter().map(|x| x.to_string()).collect();
        let _ = writeln!(s, "{}", line.join(" "));
    }
    s
}

fn ef(cmd: EfCommand, limits: &Limits, io: &mut Io<'_>) -> Result<Output, CliError> {
    match cmd {
        EfCommand::Solve { left, right, rounds, left_roots, right_roots } => {
            let (l, r) = (graph(&left, limits)?, graph(&right, limits)?);
            if left_roots.len() != right_roots.len() {
                return Err(CliError::usage("--left-roots and --right-roots need equal lengths"));
            }
            let pairs: Vec<(usize, usize)> = left_roots.into_iter().zip(right_roots).collect();
            let w = solve(&l, &r, &pairs, rounds, limits)?;
            Ok(Output::new(w.to_string(), json!({ "winner": w, "rounds": rounds })))
        }
        EfCommand::Play { left, right, rounds, spoiler, duplicator, seed } => {
            let (l, r) = (Arc::new(graph(&left, limits)?), Arc::new(graph(&right, limits)?));
            if spoiler == SpoilerKind::Random && seed.is_none() {
                return Err(CliError::usage("--seed is required for the random spoiler"));
            }
            let mut lm_agent = None;
            let mut dup: Box<dyn Duplicator + '_> = match duplicator {
                DuplicatorKind::Minimax => Box::new(MinimaxDuplicator::new(&l, &r, rounds, limits)?),
                DuplicatorKind::Mirror => Box::new(MirrorDuplicator),
                DuplicatorKind::LmKey => {
                    let st = init_state(l.clone(), r.clone(), &[], &[], rounds, limits)?;
                    lm_agent = Some(st.as_agent());
                    Box::new(Forward)
                }
            };
            let Io { input, err } = io;
            let mut human = ClosureSpoiler(|pos: &crate::efgame::Position<'_>| prompt_move(pos, &mut **input, &mut **err));
            let mut spl: Box<dyn Spoiler + '_> = match spoiler {
                SpoilerKind::Human => Box::new(&mut human as &mut dyn Spoiler),
                SpoilerKind::Random => Box::new(RandomSpoiler),
                SpoilerKind::Minimax => Box::new(MinimaxSpoiler::new(&l, &r, rounds, limits)?),
            };
            let result = match lm_agent.as_mut() {
                Some(agent) => play(&l, &r, &[], &[], rounds, &mut *spl, agent, seed.unwrap_or(0))?,
                None => play(&l, &r, &[], &[], rounds, &mut *spl, &mut *dup, seed.unwrap_or(0))?,
            };
            let mut text = String::new();
            for m in &result.transcript {
                let _ = writeln!(
                    text,
                    "round {}: spoiler {} {} -> duplicator {}",
                    m.round, format!("{:?}", m.side).to_lowercase(), m.vertex, m.response
                );
            }
            if let Some(f) = &result.forfeit {
                let _ = writeln!(text, "forfeit by {}: {}", f.by, f.reason);
            }
            let _ = write!(text, "winner: {}", result.winner);
            let mut j = serde_json::to_value(&result).expect("result json");
            if let Some(agent) = &lm_agent {
                j["traces"] = serde_json::to_value(agent.traces()).expect("traces");
            }
            Ok(Output::new(text, j))
        }
    }
}

/// Placeholder duplicator; the lm-key agent is passed to `play` directly.
struct Forward;

impl Duplicator for Forward {
    fn respond(
        &mut self,
        _: &crate::efgame::Position<'_>,
        _: SpoilerMove,
        _: &mut rand_chacha::ChaCha8Rng,
    ) -> Result<usize, String> {
        Err("unused".into())
    }
}

impl Spoiler for &mut dyn Spoiler {
    fn choose(
        &mut self,
        pos: &crate::efgame::Position<'_>,
        rng: &mut rand_chacha::ChaCha8Rng,
    ) -> Result<SpoilerMove, String> {
        (**self).choose(pos, rng)
    }
}

/// Reads `left <v>` / `right <v>` (or `l`/`r`) until a parseable line or EOF.
fn prompt_move(
    pos: &crate::efgame::Position<'_>,
    input: &mut dyn std::io::BufRead,
    err: &mut dyn std::io::Write,
) -> Result<SpoilerMove, String> {
    let round = pos.pairs.len() + 1;
    loop {
        let _ = write!(
            err,
            "round {round} ({} left); left has {} vertices, right has {}. move [left|right] <vertex>: ",
            pos.remaining,
            pos.left.order(),
            pos.right.order()
        );
        let _ = err.flush();
        let mut line = String::new();
        match input.read_line(&mut line) {
            Ok(0) | Err(_) => return Err("no move (end of input)".into()),
            Ok(_) => {}
        }
        let mut parts = line.split_whitespace();
        let side = match parts.next() {
            Some("l" | "left" | "L") => GameSide::Left,
            Some("r" | "right" | "R") => GameSide::Right,
            _ => {
                let _ = writeln!(err, "expected 'left <v>' or 'right <v>'");
                continue;
            }
        };
        match parts.next().and_then(|v| v.parse().ok()) {
            Some(vertex) => return Ok(SpoilerMove { side, vertex }),
            None => {
                let _ = writeln!(err, "expected a vertex number");
            }
        }
    }
}
