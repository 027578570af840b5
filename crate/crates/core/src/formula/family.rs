use super::{parse_formula, Formula, FormulaError};

/// Ordered, nonempty list of formulas sharing the root count `m`.
#[derive(Debug, Clone, PartialEq)]
pub struct FormulaFamily {
    formulas: Vec<Formula>,
    arities: Vec<usize>,
    roots: u32,
}

impl FormulaFamily {
    /// `roots` defaults to the largest root index used by any member.
    pub fn new(formulas: Vec<Formula>, roots: Option<u32>) -> Result<Self, FormulaError> {
        if formulas.is_empty() {
            return Err(FormulaError::Invalid("formula family is empty".into()));
        }
        let used = formulas.iter().map(Formula::max_root).max().unwrap_or(0);
        let m = roots.unwrap_or(used);
        if used > m {
            return Err(FormulaError::RootOutOfRange {
                used,
                available: m as usize,
            });
        }
        let arities = formulas
            .iter()
            .map(|f| f.free_variables().len())
            .collect();
        Ok(FormulaFamily {
            formulas,
            arities,
            roots: m,
        })
    }

    /// One formula per line; blank lines and lines starting with `#` are skipped.
    pub fn parse(text: &str, roots: Option<u32>) -> Result<Self, FormulaError> {
        let formulas = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(parse_formula)
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(formulas, roots)
    }

    pub fn formulas(&self) -> &[Formula] {
        &self.formulas
    }

    /// Free-variable count of each member.
    pub fn arities(&self) -> &[usize] {
        &self.arities
    }

    pub fn root_count(&self) -> u32 {
        self.roots
    }

    pub fn len(&self) -> usize {
        self.formulas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.formulas.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_file_with_comments() {
        let fam = FormulaFamily::parse(
            "# neighbours of the root\nadj(x1,r1)\n\nexists x2. adj(x1,x2) & adj(x2,r2)\n",
            None,
        )
        .unwrap();
        assert_eq!(fam.len(), 2);
        assert_eq!(fam.root_count(), 2);
        assert_eq!(fam.arities(), &[1, 1]);
    }

    #[test]
    fn rejects_empty_and_inconsistent() {
        assert!(FormulaFamily::parse("# nothing\n", None).is_err());
        assert!(matches!(
            FormulaFamily::parse("adj(x1,r2)", Some(1)),
            Err(FormulaError::RootOutOfRange { used: 2, .. })
        ));
    }
}
