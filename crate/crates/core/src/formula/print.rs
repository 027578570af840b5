use super::Formula;

fn precedence(f: &Formula) -> u8 {
    match f {
        Formula::Exists(..) | Formula::Forall(..) => 0,
        Formula::Implies(..) => 1,
        Formula::Or(_) => 2,
        Formula::And(_) => 3,
        Formula::Not(_) => 4,
        _ => 5,
    }
}

fn write(f: &Formula, min: u8, out: &mut String) {
    let wrap = precedence(f) < min;
    if wrap {
        out.push('(');
    }
    match f {
        Formula::True => out.push_str("true"),
        Formula::False => out.push_str("false"),
        Formula::Adjacent(a, b) => out.push_str(&format!("adj({a},{b})")),
        Formula::Equal(a, b) => out.push_str(&format!("{a} = {b}")),
        Formula::Not(g) => {
            out.push('!');
            write(g, 4, out);
        }
        Formula::And(gs) | Formula::Or(gs) => {
            let (sep, child) = if matches!(f, Formula::And(_)) {
                (" & ", 4)
            } else {
                (" | ", 3)
            };
            for (i, g) in gs.iter().enumerate() {
                if i > 0 {
                    out.push_str(sep);
                }
                write(g, child, out);
            }
        }
        Formula::Implies(a, b) => {
            write(a, 2, out);
            out.push_str(" -> ");
            write(b, 1, out);
        }
        Formula::Exists(v, g) | Formula::Forall(v, g) => {
            let q = if matches!(f, Formula::Exists(..)) {
                "exists"
            } else {
                "forall"
            };
            out.push_str(&format!("{q} x{v}. "));
            write(g, 0, out);
        }
    }
    if wrap {
        out.push(')');
    }
}

/// Renders a formula in the concrete grammar accepted by
/// [`parse_formula`](super::parse_formula), with the minimum parentheses needed
/// to reparse the same tree.
pub fn format_formula(f: &Formula) -> String {
    let mut out = String::new();
    write(f, 0, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::super::{parse_formula, Term};
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn examples() {
        assert_eq!(
            format_formula(&Formula::adj(Term::Var(1), Term::Root(1))),
            "adj(x1,r1)"
        );
        assert_eq!(format_formula(&Formula::not(Formula::True)), "!true");
        assert_eq!(
            format_formula(&Formula::exists(2, Formula::adj(Term::Var(1), Term::Var(2)))),
            "exists x2. adj(x1,x2)"
        );
    }

    #[test]
    fn quantifier_operands_are_wrapped() {
        let f = Formula::And(vec![
            Formula::exists(1, Formula::True),
            Formula::False,
        ]);
        assert_eq!(format_formula(&f), "(exists x1. true) & false");
        let g = Formula::not(Formula::forall(1, Formula::False));
        assert_eq!(format_formula(&g), "!(forall x1. false)");
    }

    fn arb_term() -> impl Strategy<Value = Term> {
        prop_oneof![(1u32..5).prop_map(Term::Var), (1u32..3).prop_map(Term::Root)]
    }

    // Generates only well-formed trees: fresh binder per nesting level.
    fn arb_formula() -> impl Strategy<Value = Formula> {
        let leaf = prop_oneof![
            Just(Formula::True),
            Just(Formula::False),
            (arb_term(), arb_term()).prop_map(|(a, b)| Formula::Adjacent(a, b)),
            (arb_term(), arb_term()).prop_map(|(a, b)| Formula::Equal(a, b)),
        ];
        leaf.prop_recursive(4, 32, 3, |inner| {
            prop_oneof![
                inner.clone().prop_map(Formula::not),
                prop::collection::vec(inner.clone(), 2..4).prop_map(Formula::And),
                prop::collection::vec(inner.clone(), 2..4).prop_map(Formula::Or),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::implies(a, b)),
                (5u32..9, inner.clone()).prop_map(|(v, b)| Formula::exists(v, b)),
                (5u32..9, inner).prop_map(|(v, b)| Formula::forall(v, b)),
            ]
        })
        .prop_filter("well-formed", |f| f.validate().is_ok())
    }

    proptest! {
        #[test]
        fn round_trip(f in arb_formula()) {
            let text = format_formula(&f);
            prop_assert_eq!(parse_formula(&text).unwrap(), f);
        }
    }
}
