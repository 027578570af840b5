//! Shorthand parsing shared by the command line and the server.

use crate::formula::{parse_formula, Formula, FormulaFamily};
use crate::graph::{generate_hn, Graph};
use crate::Limits;

use super::CliError;

/// `hn:<n>`, `k<n>` or `path:<file>` (JSON or edge list). `path:` is only
/// honoured when `allow_files` is set.
pub fn graph_from_spec(spec: &str, limits: &Limits, allow_files: bool) -> Result<Graph, CliError> {
    let spec = spec.trim();
    if let Some(n) = spec.strip_prefix("hn:") {
        let n: u32 = n
            .parse()
            .map_err(|_| CliError::usage(format!("bad H_n index in {spec:?}")))?;
        return Ok(generate_hn(n, limits.hn_cap)?);
    }
    if let Some(path) = spec.strip_prefix("path:") {
        if !allow_files {
            return Err(CliError::domain("files-disabled", "file graphs are not accepted here"));
        }
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::domain("io", format!("cannot read {path}: {e}")))?;
        return Ok(Graph::parse_auto(&text)?);
    }
    if let Some(n) = spec.strip_prefix('k').or_else(|| spec.strip_prefix('K')) {
        if let Ok(n) = n.parse::<usize>() {
            return Ok(Graph::complete(n));
        }
    }
    Err(CliError::usage(format!(
        "unrecognised graph {spec:?}; use hn:<n>, k<n> or path:<file>"
    )))
}

/// Inline text, or the contents of a file when prefixed with `@`.
pub fn text_arg(arg: &str) -> Result<String, CliError> {
    match arg.strip_prefix('@') {
        Some(path) => std::fs::read_to_string(path)
            .map_err(|e| CliError::domain("io", format!("cannot read {path}: {e}"))),
        None => Ok(arg.to_string()),
    }
}

pub fn formula_arg(arg: &str) -> Result<Formula, CliError> {
    let text = text_arg(arg)?;
    // Files may carry comments and a trailing newline.
    let body: Vec<&str> = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .collect();
    Ok(parse_formula(&body.join(" "))?)
}

pub fn family_arg(arg: &str, roots: Option<u32>) -> Result<FormulaFamily, CliError> {
    let text = text_arg(arg)?;
    // Inline families may separate formulas with ';'.
    let text = if arg.starts_with('@') { text } else { text.replace(';', "\n") };
    Ok(FormulaFamily::parse(&text, roots)?)
}

/// `lo..hi` or `lo..=hi`, both inclusive.
pub fn range_arg(arg: &str) -> Result<(u32, u32), CliError> {
    let bad = || CliError::usage(format!("bad range {arg:?}; expected lo..hi"));
    let (lo, hi) = arg.split_once("..").ok_or_else(bad)?;
    let hi = hi.strip_prefix('=').unwrap_or(hi);
    Ok((lo.trim().parse().map_err(|_| bad())?, hi.trim().parse().map_err(|_| bad())?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graph_shorthands() {
        let l = Limits::default();
        assert_eq!(graph_from_spec("hn:2", &l, false).unwrap().order(), 10);
        assert_eq!(graph_from_spec("k3", &l, false).unwrap().edge_count(), 3);
        assert!(graph_from_spec("path:/nonexistent", &l, false).is_err());
        assert!(graph_from_spec("path:/nonexistent", &l, true).is_err());
        assert!(matches!(graph_from_spec("cycle5", &l, true), Err(CliError::Usage(_))));
    }

    #[test]
    fn ranges() {
        assert_eq!(range_arg("2..8").unwrap(), (2, 8));
        assert_eq!(range_arg("2..=8").unwrap(), (2, 8));
        assert!(range_arg("2-8").is_err());
    }

    #[test]
    fn inline_family() {
        let f = family_arg("adj(x1,r1); exists x2. adj(x1,x2)", None).unwrap();
        assert_eq!(f.len(), 2);
        assert_eq!(f.root_count(), 1);
    }
}
