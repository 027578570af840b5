//! Formula constructions: the counting formula that tests whether the number
//! of satisfied k-tuples among n groups lies in a widened interval, and the
//! rewriting of root constants into fresh free variables.

use super::{Formula, FormulaError, Term};

/// Default cap on the number of disjuncts materialised by
/// [`build_threshold_formula`].
pub const DEFAULT_DISJUNCT_CAP: u128 = 1_000_000;

/// `n^(2/3)`, exact when `n` is a perfect cube.
fn two_thirds_power(n: u64) -> f64 {
    let c = (n as f64).cbrt().round() as u64;
    for r in c.saturating_sub(1)..=c + 1 {
        if r.checked_pow(3) == Some(n) {
            return (r * r) as f64;
        }
    }
    (n as f64).powf(2.0 / 3.0)
}

/// Range of satisfied-group counts accepted by the counting formula:
/// `[ceil(a n - n^(2/3)), floor(b n + n^(2/3))]` clamped to `[0, n]`.
/// `None` when the clamped range is empty.
pub fn threshold_range(n: u64, a: f64, b: f64) -> Result<Option<(u64, u64)>, FormulaError> {
    if !(0.0..=1.0).contains(&a) || !(0.0..=1.0).contains(&b) {
        return Err(FormulaError::Invalid(format!(
            "bounds must lie in [0,1], got [{a}, {b}]"
        )));
    }
    if a > b {
        return Err(FormulaError::EmptyInterval { a, b });
    }
    if n == 0 {
        return Err(FormulaError::Invalid("group count n must be at least 1".into()));
    }
    let slack = two_thirds_power(n);
    let nf = n as f64;
    let lo = (a * nf - slack).ceil().max(0.0);
    let hi = (b * nf + slack).floor().min(nf);
    if lo > hi {
        return Ok(None);
    }
    Ok(Some((lo as u64, hi as u64)))
}

fn binomial(n: u64, k: u64) -> u128 {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul((n - i) as u128) / (i + 1) as u128;
    }
    acc
}

/// Number of disjuncts `sum_{i=lo}^{hi} C(n, i)`.
pub fn disjunct_count(n: u64, lo: u64, hi: u64) -> u128 {
    (lo..=hi).fold(0u128, |acc, i| acc.saturating_add(binomial(n, i)))
}

/// Builds the formula with `n*k` free variables, grouped consecutively into
/// `n` k-tuples, that holds iff the number of groups satisfying `psi` lies in
/// [`threshold_range`]. `psi` must have free variables exactly `x1..xk`
/// (`k >= 1`) and no root constants.
pub fn build_threshold_formula(
    psi: &Formula,
    n: u64,
    a: f64,
    b: f64,
    cap: u128,
) -> Result<Formula, FormulaError> {
    let k = psi.contiguous_arity()? as u32;
    if k == 0 {
        return Err(FormulaError::Invalid(
            "threshold formula needs at least one free variable".into(),
        ));
    }
    if psi.max_root() > 0 {
        return Err(FormulaError::Invalid(
            "threshold formula input must not use root constants".into(),
        ));
    }
    let Some((lo, hi)) = threshold_range(n, a, b)? else {
        return Ok(Formula::False);
    };
    let count = disjunct_count(n, lo, hi);
    if count > cap {
        return Err(FormulaError::CapExceeded { count, cap });
    }
    let groups = n as u32;
    let top = groups * k;
    // Copy j reads variables j*k+1 ..= j*k+k; binders move above every group.
    let copies: Vec<Formula> = (0..groups)
        .map(|j| psi.rename(&|i| Term::Var(j * k + i), &|v| top + v, &Term::Root))
        .collect();

    let mut disjuncts = Vec::new();
    let mut chosen = Vec::new();
    for size in lo..=hi {
        subsets(groups, size as u32, 0, &mut chosen, &mut |set| {
            let literals = (0..groups)
                .map(|j| {
                    if set.contains(&j) {
                        copies[j as usize].clone()
                    } else {
                        Formula::not(copies[j as usize].clone())
                    }
                })
                .collect();
            disjuncts.push(Formula::and_of(literals));
        });
    }
    Ok(Formula::or_of(disjuncts))
}

fn subsets(n: u32, size: u32, from: u32, chosen: &mut Vec<u32>, emit: &mut impl FnMut(&[u32])) {
    if chosen.len() as u32 == size {
        emit(chosen);
        return;
    }
    let need = size - chosen.len() as u32;
    for j in from..=n - need {
        chosen.push(j);
        subsets(n, size, j + 1, chosen, emit);
        chosen.pop();
    }
}

/// Replaces root constant `r_j` (`j <= m`) by the fresh free variable
/// `x_{k+j}`, where `k` is the largest free-variable index of `psi`.
/// Quantified variables that would capture a new variable are renamed
/// above every index in use.
pub fn unroot(psi: &Formula, m: u32) -> Formula {
    if m == 0 {
        return psi.clone();
    }
    let k = psi.free_variables().last().copied().unwrap_or(0);
    let top = psi.max_var().max(k + m);
    psi.rename(
        &Term::Var,
        &|v| if v > k && v <= k + m { top + v } else { v },
        &|j| if j <= m { Term::Var(k + j) } else { Term::Root(j) },
    )
}
