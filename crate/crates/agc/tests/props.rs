//! Property tests for the formula layer and the trace/satisfiability
//! agreement invariants.

use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;

use agc::ltl::{evaluate_on_lasso, nnf, parse, print, simplify, LassoTrace};
use agc::sat::{
    check_sat, formulas_equivalent, is_satisfiable, is_valid, SatOptions, Satisfiability,
};
use agc::{Ap, Formula};

fn opts() -> SatOptions {
    SatOptions::default()
}

/// Arbitrary formulas over the given atoms with bounded depth.
fn arb_formula(atoms: &'static [&'static str], depth: u32) -> impl Strategy<Value = Formula> {
    let leaf = prop_oneof![
        3 => prop::sample::select(atoms).prop_map(Formula::atom),
        1 => Just(Formula::True),
        1 => Just(Formula::False),
    ];
    leaf.prop_recursive(depth, 64, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|f| f.not()),
            inner.clone().prop_map(|f| f.next()),
            inner.clone().prop_map(|f| f.eventually()),
            inner.clone().prop_map(|f| f.globally()),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.and(b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.or(b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.implies(b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.iff(b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.until(b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.release(b)),
        ]
    })
}

fn arb_lasso(atoms: &'static [&'static str]) -> impl Strategy<Value = LassoTrace> {
    let state = prop::collection::vec(any::<bool>(), atoms.len());
    (
        prop::collection::vec(state.clone(), 0..3),
        prop::collection::vec(state, 1..4),
    )
        .prop_map(move |(prefix, cycle)| {
            let aps: BTreeSet<Ap> = atoms.iter().map(Ap::new).collect();
            let to_map = |row: Vec<bool>| -> BTreeMap<Ap, bool> {
                atoms.iter().map(Ap::new).zip(row).collect()
            };
            LassoTrace::new(
                aps,
                prefix.into_iter().map(to_map).collect(),
                cycle.into_iter().map(to_map).collect(),
            )
            .unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    // Round-trip: parse(print(f)) is structurally f.
    #[test]
    fn print_parse_round_trip(f in arb_formula(&["a", "b", "c", "lf", "lb"], 6)) {
        let rendered = print(&f);
        let back = parse(&rendered).unwrap();
        prop_assert_eq!(back, f, "rendered as {}", rendered);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn nnf_preserves_semantics(f in arb_formula(&["a", "b", "c"], 4)) {
        let g = nnf(&f);
        prop_assert!(formulas_equivalent(&f, &g, &opts()).unwrap());
    }

    #[test]
    fn nnf_introduces_no_atoms(f in arb_formula(&["a", "b", "c"], 4)) {
        prop_assert!(nnf(&f).atoms().is_subset(&f.atoms()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn simplify_preserves_semantics(f in arb_formula(&["a", "b", "c"], 4)) {
        let g = simplify(&f);
        prop_assert!(formulas_equivalent(&f, &g, &opts()).unwrap());
    }

    // Witness soundness: whatever the solver claims satisfiable comes with a
    // lasso on which the formula evaluates to true.
    #[test]
    fn sat_witnesses_evaluate_true(f in arb_formula(&["a", "b", "c"], 4)) {
        if let Satisfiability::Sat(trace) = check_sat(&f, &opts()).unwrap() {
            prop_assert!(evaluate_on_lasso(&f, &trace, 0).unwrap());
        }
    }

    // A trace model is a satisfiability proof.
    #[test]
    fn evaluation_implies_satisfiability(
        f in arb_formula(&["a", "b"], 3),
        t in arb_lasso(&["a", "b"]),
    ) {
        if evaluate_on_lasso(&f, &t, 0).unwrap() {
            prop_assert!(is_satisfiable(&f, &opts()).unwrap());
        }
    }

    // Validity of f means every model of `true` models f; in particular f is
    // satisfiable (the word universe is non-empty).
    #[test]
    fn valid_formulas_are_satisfiable(f in arb_formula(&["a", "b"], 3)) {
        if is_valid(&f, &opts()).unwrap() {
            prop_assert!(is_satisfiable(&f, &opts()).unwrap());
        }
    }

    // Monotone conjunction: sat(f & g) implies sat(f).
    #[test]
    fn conjunction_is_monotone(
        f in arb_formula(&["a", "b"], 3),
        g in arb_formula(&["a", "b"], 3),
    ) {
        if is_satisfiable(&f.clone().and(g), &opts()).unwrap() {
            prop_assert!(is_satisfiable(&f, &opts()).unwrap());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    // Duality, metamorphic: validity of f and satisfiability of !f are
    // computed through two separate translations and must complement.
    #[test]
    fn validity_satisfiability_duality(f in arb_formula(&["a", "b"], 3)) {
        let valid = is_valid(&f, &opts()).unwrap();
        let negation_sat = is_satisfiable(&f.clone().not(), &opts()).unwrap();
        prop_assert_eq!(valid, !negation_sat);
    }
}
