//! The `folim` command line. [`run`] parses arguments, executes one
//! subcommand and returns the process exit code: 0 on success, 1 on a domain
//! error (one line `error: <code>: <message>` on stderr), 2 on a usage error.

mod commands;
mod spec;

use std::ffi::OsString;
use std::io::{BufRead, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub use spec::{family_arg, formula_arg, graph_from_spec, range_arg, text_arg};

#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    Usage(String),
    Domain { code: String, message: String },
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    pub fn domain(code: impl Into<String>, msg: impl Into<String>) -> Self {
        CliError::Domain {
            code: code.into(),
            message: msg.into(),
        }
    }

    pub fn code(&self) -> &str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Domain { code, .. } => code,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Domain { message: m, .. } => m,
        }
    }
}

macro_rules! domain_from {
    ($ty:ty, $f:expr) => {
        impl From<$ty> for CliError {
            fn from(e: $ty) -> Self {
                let code: &str = $f(&e);
                CliError::domain(code, e.to_string())
            }
        }
    };
}

domain_from!(crate::formula::FormulaError, |e: &crate::formula::FormulaError| match e {
    crate::formula::FormulaError::Syntax { .. } => "syntax",
    crate::formula::FormulaError::CapExceeded { .. } => "cap-exceeded",
    _ => "formula",
});
domain_from!(crate::graph::GraphError, |e: &crate::graph::GraphError| match e {
    crate::graph::GraphError::CapExceeded { .. } => "cap-exceeded",
    crate::graph::GraphError::NotBipartite => "not-bipartite",
    _ => "graph",
});
domain_from!(crate::eval::EvalError, |e: &crate::eval::EvalError| match e {
    crate::eval::EvalError::BudgetExceeded { .. } => "budget-exceeded",
    _ => "eval",
});
domain_from!(crate::efgame::GameError, |e: &crate::efgame::GameError| match e {
    crate::efgame::GameError::CapExceeded(_) => "cap-exceeded",
    _ => "game",
});
domain_from!(crate::strategy::PreconditionError, |e: &crate::strategy::PreconditionError| e.reason());
domain_from!(crate::strategy::StrategyError, |e: &crate::strategy::StrategyError| e.reason());
domain_from!(crate::convergence::ConvergenceError, |e: &crate::convergence::ConvergenceError| match e {
    crate::convergence::ConvergenceError::BudgetExceeded { .. } => "budget-exceeded",
    crate::convergence::ConvergenceError::Eval(crate::eval::EvalError::BudgetExceeded { .. }) => "budget-exceeded",
    _ => "convergence",
});

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(name = "folim", version, about = "First-order convergence laboratory")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    /// Write output to this file instead of stdout.
    #[arg(long, short = 'o', global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Sampling {
    /// Estimate by Monte Carlo sampling instead of exact enumeration.
    #[arg(long)]
    mc: bool,
    #[arg(long, default_value_t = 10_000)]
    samples: u64,
    /// Required with --mc.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 0.99)]
    confidence: f64,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse a formula and print its canonical form.
    Parse {
        #[arg(long)]
        formula: String,
    },
    /// Decide whether a tuple satisfies a formula.
    Eval {
        #[arg(long)]
        graph: String,
        #[arg(long)]
        formula: String,
        /// Values of x1, x2, ... in order.
        #[arg(long, value_delimiter = ',')]
        tuple: Vec<usize>,
        #[arg(long, value_delimiter = ',')]
        roots: Vec<usize>,
    },
    /// Stone pairing of a formula with a graph.
    Stone {
        #[arg(long)]
        graph: String,
        #[arg(long)]
        formula: String,
        #[arg(long, value_delimiter = ',')]
        roots: Vec<usize>,
        /// Count only tuples of distinct vertices.
        #[arg(long)]
        distinct: bool,
        #[command(flatten)]
        sampling: Sampling,
    },
    /// Counting formula: build it, or estimate its pairing by sampling.
    Threshold {
        #[arg(long)]
        graph: Option<String>,
        #[arg(long)]
        formula: String,
        /// Number of k-tuples per group.
        #[arg(long)]
        group_size: u64,
        #[arg(long)]
        a: f64,
        #[arg(long)]
        b: f64,
        /// Print the materialised formula instead of estimating.
        #[arg(long)]
        build: bool,
        #[arg(long, default_value_t = 2000)]
        groups: u64,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 0.99)]
        confidence: f64,
    },
    /// Ehrenfeucht–Fraïssé games.
    Ef {
        #[command(subcommand)]
        command: EfCommand,
    },
    /// Generate graphs.
    Gen {
        #[command(subcommand)]
        command: GenCommand,
    },
    /// Shadow of a played vertex list.
    Shadow {
        #[arg(long)]
        graph: String,
        #[arg(long, value_delimiter = ',')]
        played: Vec<usize>,
        #[arg(long)]
        l: usize,
        /// Count played B-vertices in the null-vector case.
        #[arg(long)]
        all_columns: bool,
    },
    /// Whether a bipartite graph is l-universal.
    Universal {
        #[arg(long)]
        graph: String,
        #[arg(long)]
        l: usize,
    },
    /// Adjacency matrix restricted to played vertices.
    Matrix {
        #[arg(long)]
        graph: String,
        #[arg(long, value_delimiter = ',')]
        played: Vec<usize>,
        /// Second graph to compare against.
        #[arg(long)]
        right: Option<String>,
        #[arg(long, value_delimiter = ',')]
        right_played: Vec<usize>,
    },
    /// Pairings along a graph sequence and a limit proxy.
    Converge {
        /// Formulas separated by ';', or @file with one per line.
        #[arg(long)]
        family: String,
        /// H_n range such as 2..8.
        #[arg(long, conflicts_with = "graphs")]
        hn: Option<String>,
        /// Graph specs in increasing order.
        #[arg(long, value_delimiter = ',')]
        graphs: Vec<String>,
        #[arg(long, default_value_t = 0.02)]
        tol: f64,
        #[command(flatten)]
        sampling: Sampling,
    },
    /// Search for roots matching target pairings.
    Roots {
        #[arg(long)]
        graph: String,
        #[arg(long)]
        family: String,
        #[arg(long, value_delimiter = ',')]
        targets: Vec<f64>,
        #[arg(long, default_value_t = 1)]
        m: usize,
        /// Largest tuple count searched exhaustively.
        #[arg(long)]
        budget: Option<u64>,
        /// Fall back to this many sampled tuples above the budget.
        #[arg(long)]
        samples: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Probability that a random tuple of H_n has a full shadow.
    Shadowprob {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        p: usize,
        #[arg(long)]
        l: usize,
        #[command(flatten)]
        sampling: Sampling,
    },
    /// Rooted counterexample on H_n.
    Counterexample {
        #[arg(long, default_value_t = 2)]
        from: u32,
        #[arg(long, default_value_t = 10)]
        to: u32,
    },
    /// Run the HTTP game server.
    Serve {
        #[arg(long, default_value = "127.0.0.1:8080")]
        addr: String,
        /// Idle session lifetime in seconds.
        #[arg(long, default_value_t = 3600)]
        ttl: u64,
    },
}

#[derive(Debug, Subcommand)]
enum EfCommand {
    /// Decide the game by exhaustive search.
    Solve {
        #[arg(long)]
        left: String,
        #[arg(long)]
        right: String,
        #[arg(long)]
        rounds: usize,
        #[arg(long, value_delimiter = ',')]
        left_roots: Vec<usize>,
        #[arg(long, value_delimiter = ',')]
        right_roots: Vec<usize>,
    },
    /// Play one game.
    Play {
        #[arg(long)]
        left: String,
        #[arg(long)]
        right: String,
        #[arg(long)]
        rounds: usize,
        #[arg(long, value_enum, default_value_t = SpoilerKind::Human)]
        spoiler: SpoilerKind,
        #[arg(long, value_enum, default_value_t = DuplicatorKind::Minimax)]
        duplicator: DuplicatorKind,
        /// Required for the random spoiler.
        #[arg(long)]
        seed: Option<u64>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SpoilerKind {
    Human,
    Random,
    Minimax,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DuplicatorKind {
    Minimax,
    Mirror,
    LmKey,
}

#[derive(Debug, Subcommand)]
enum GenCommand {
    /// The bipartite graph H_n (JSON, or an edge list in text format).
    Hn { n: u32 },
}

/// Rendered command output.
pub(crate) struct Output {
    text: String,
    json: serde_json::Value,
    csv: Option<String>,
}

impl Output {
    fn new(text: impl Into<String>, json: serde_json::Value) -> Self {
        Output {
            text: text.into(),
            json,
            csv: None,
        }
    }

    fn with_csv(mut self, csv: String) -> Self {
        self.csv = Some(csv);
        self
    }
}

/// Streams used by a command: stdin for interactive play, stderr for prompts.
pub(crate) struct Io<'a> {
    input: &'a mut dyn BufRead,
    err: &'a mut dyn Write,
}

/// Runs the command line and returns the exit code.
pub fn run<I, T>(argv: I, input: &mut dyn BufRead, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let rendered = e.render().to_string();
            let _ = if code == 0 {
                write!(out, "{rendered}")
            } else {
                write!(err, "{rendered}")
            };
            return code;
        }
    };
    let format = cli.format;
    let target = cli.output.clone();
    let mut io = Io { input, err };
    let result = commands::execute(cli.command, format, &mut io).and_then(|o| render(o, format));
    match result {
        Ok(bytes) => {
            let written = match &target {
                Some(path) => std::fs::write(path, &bytes).map_err(|e| e.to_string()),
                None => out.write_all(bytes.as_bytes()).map_err(|e| e.to_string()),
            };
            match written {
                Ok(()) => 0,
                Err(e) => {
                    let _ = writeln!(io.err, "error: io: {e}");
                    1
                }
            }
        }
        Err(CliError::Usage(msg)) => {
            let _ = writeln!(io.err, "error: usage: {msg}");
            2
        }
        Err(CliError::Domain { code, message }) => {
            let _ = writeln!(io.err, "error: {code}: {message}");
            1
        }
    }
}

fn render(o: Output, format: Format) -> Result<String, CliError> {
    Ok(match format {
        Format::Text => ensure_newline(o.text),
        Format::Json => format!("{}\n", serde_json::to_string_pretty(&o.json).expect("json value")),
        Format::Csv => o
            .csv
            .ok_or_else(|| CliError::usage("csv output is only available for tabular commands"))?,
    })
}

fn ensure_newline(mut s: String) -> String {
    if !s.ends_with('\n') {
        s.push('\n');
    }
    s
}
