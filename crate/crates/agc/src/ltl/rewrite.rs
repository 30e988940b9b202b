//! Structural simplification and negation normal form.

use super::ast::Formula;

/// Applies constant folding, double negation, idempotence and absorption to
/// fixpoint. These rewrites match structurally, so the result is readable but
/// not a canonical form; semantics are preserved.
pub fn simplify(f: &Formula) -> Formula {
    let mut current = f.clone();
    loop {
        let next = simplify_pass(&current);
        if next == current {
            return next;
        }
        current = next;
    }
}

fn simplify_pass(f: &Formula) -> Formula {
    match f {
        Formula::True | Formula::False | Formula::Atom(_) => f.clone(),
        Formula::Not(a) => {
            let a = simplify_pass(a);
            match a {
                Formula::True => Formula::False,
                Formula::False => Formula::True,
                Formula::Not(inner) => (*inner).clone(),
                other => other.not(),
            }
        }
        Formula::And(a, b) => {
            let a = simplify_pass(a);
            let b = simplify_pass(b);
            match (&a, &b) {
                (Formula::False, _) | (_, Formula::False) => Formula::False,
                (Formula::True, _) => b,
                (_, Formula::True) => a,
                _ if a == b => a,
                // Absorption: x & (x | y) = x.
                (x, Formula::Or(l, r)) if x == l.as_ref() || x == r.as_ref() => a,
                (Formula::Or(l, r), y) if y == l.as_ref() || y == r.as_ref() => b,
                _ => a.and(b),
            }
        }
        Formula::Or(a, b) => {
            let a = simplify_pass(a);
            let b = simplify_pass(b);
            match (&a, &b) {
                (Formula::True, _) | (_, Formula::True) => Formula::True,
                (Formula::False, _) => b,
                (_, Formula::False) => a,
                _ if a == b => a,
                // Absorption: x | (x & y) = x.
                (x, Formula::And(l, r)) if x == l.as_ref() || x == r.as_ref() => a,
                (Formula::And(l, r), y) if y == l.as_ref() || y == r.as_ref() => b,
                _ => a.or(b),
            }
        }
        Formula::Implies(a, b) => simplify_pass(a).implies(simplify_pass(b)),
        Formula::Iff(a, b) => simplify_pass(a).iff(simplify_pass(b)),
        Formula::Next(a) => simplify_pass(a).next(),
        Formula::Until(a, b) => simplify_pass(a).until(simplify_pass(b)),
        Formula::Release(a, b) => simplify_pass(a).release(simplify_pass(b)),
        Formula::Eventually(a) => simplify_pass(a).eventually(),
        Formula::Globally(a) => simplify_pass(a).globally(),
    }
}

/// Negation normal form: negations only on atoms, `-> <-> F G` eliminated
/// into `& | X U R`.
pub fn nnf(f: &Formula) -> Formula {
    nnf_pos(f)
}

fn nnf_pos(f: &Formula) -> Formula {
    match f {
        Formula::True | Formula::False | Formula::Atom(_) => f.clone(),
        Formula::Not(a) => nnf_neg(a),
        Formula::And(a, b) => nnf_pos(a).and(nnf_pos(b)),
        Formula::Or(a, b) => nnf_pos(a).or(nnf_pos(b)),
        Formula::Implies(a, b) => nnf_neg(a).or(nnf_pos(b)),
        Formula::Iff(a, b) => {
            let both = nnf_pos(a).and(nnf_pos(b));
            let neither = nnf_neg(a).and(nnf_neg(b));
            both.or(neither)
        }
        Formula::Next(a) => nnf_pos(a).next(),
        Formula::Until(a, b) => nnf_pos(a).until(nnf_pos(b)),
        Formula::Release(a, b) => nnf_pos(a).release(nnf_pos(b)),
        // F a = true U a, G a = false R a.
        Formula::Eventually(a) => Formula::True.until(nnf_pos(a)),
        Formula::Globally(a) => Formula::False.release(nnf_pos(a)),
    }
}

fn nnf_neg(f: &Formula) -> Formula {
    match f {
        Formula::True => Formula::False,
        Formula::False => Formula::True,
        Formula::Atom(_) => f.clone().not(),
        Formula::Not(a) => nnf_pos(a),
        Formula::And(a, b) => nnf_neg(a).or(nnf_neg(b)),
        Formula::Or(a, b) => nnf_neg(a).and(nnf_neg(b)),
        Formula::Implies(a, b) => nnf_pos(a).and(nnf_neg(b)),
        Formula::Iff(a, b) => {
            let first = nnf_pos(a).and(nnf_neg(b));
            let second = nnf_neg(a).and(nnf_pos(b));
            first.or(second)
        }
        Formula::Next(a) => nnf_neg(a).next(),
        // !(a U b) = !a R !b, !(a R b) = !a U !b.
        Formula::Until(a, b) => nnf_neg(a).release(nnf_neg(b)),
        Formula::Release(a, b) => nnf_neg(a).until(nnf_neg(b)),
        // !F a = G !a = false R !a, !G a = F !a = true U !a.
        Formula::Eventually(a) => Formula::False.release(nnf_neg(a)),
        Formula::Globally(a) => Formula::True.until(nnf_neg(a)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ltl::parser::parse;

    #[test]
    fn double_negation_collapses() {
        let f = Formula::atom("a").not().not();
        assert_eq!(simplify(&f), Formula::atom("a"));
    }

    #[test]
    fn and_true_unit() {
        let f = Formula::atom("a").and(Formula::True);
        assert_eq!(simplify(&f), Formula::atom("a"));
    }

    #[test]
    fn or_with_negated_true_drops_disjunct() {
        // The saturation of (true, g) produces g | !true.
        let f = Formula::atom("g").or(Formula::True.not());
        assert_eq!(simplify(&f), Formula::atom("g"));
    }

    #[test]
    fn absorption_both_orientations() {
        let a = Formula::atom("a");
        let b = Formula::atom("b");
        assert_eq!(simplify(&a.clone().or(a.clone().and(b.clone()))), a);
        let a = Formula::atom("a");
        assert_eq!(simplify(&a.clone().and(b.clone()).or(a.clone())), a);
    }

    #[test]
    fn idempotence() {
        let f = parse("(a | b) & (a | b)").unwrap();
        assert_eq!(simplify(&f), parse("a | b").unwrap());
    }

    #[test]
    fn simplified_saturation_disjunction_stays_equivalent() {
        // A saturated reaction guarantee against its hand-simplified form:
        // structural rewriting keeps the semantics, and the two displays
        // happen to coincide semantically.
        use crate::sat::{formulas_equivalent, SatOptions};
        let raw = parse("(G F s -> G (s -> g)) | !(G (s -> X g) & G F s)").unwrap();
        let target = parse("G (s -> g) | !(G (s -> X g) & G F s)").unwrap();
        let opts = SatOptions::default();
        assert!(formulas_equivalent(&simplify(&raw), &raw, &opts).unwrap());
        assert!(formulas_equivalent(&simplify(&raw), &target, &opts).unwrap());
    }

    #[test]
    fn nnf_of_negated_globally() {
        let f = Formula::atom("a").globally().not();
        assert_eq!(nnf(&f), Formula::True.until(Formula::atom("a").not()));
    }

    #[test]
    fn nnf_of_negated_until_is_release() {
        let f = Formula::atom("a").until(Formula::atom("b")).not();
        assert_eq!(
            nnf(&f),
            Formula::atom("a").not().release(Formula::atom("b").not())
        );
    }

    #[test]
    fn nnf_introduces_no_new_atoms() {
        let f = parse("!(a <-> (b -> G c))").unwrap();
        let g = nnf(&f);
        assert!(g.atoms().is_subset(&f.atoms()));
    }

    fn negations_only_on_atoms(f: &Formula) -> bool {
        match f {
            Formula::Not(a) => matches!(a.as_ref(), Formula::Atom(_)),
            Formula::True | Formula::False | Formula::Atom(_) => true,
            Formula::Next(a) => negations_only_on_atoms(a),
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Until(a, b)
            | Formula::Release(a, b) => negations_only_on_atoms(a) && negations_only_on_atoms(b),
            _ => false,
        }
    }

    #[test]
    fn nnf_output_shape() {
        for text in ["!(a U (b <-> c))", "!!(F a -> G b)", "!X !a"] {
            assert!(
                negations_only_on_atoms(&nnf(&parse(text).unwrap())),
                "{text}"
            );
        }
    }
}
