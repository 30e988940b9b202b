//! LTL satisfiability and validity via tableau translation to generalized
//! Büchi automata and fair-SCC emptiness.

mod emptiness;
mod oracle;
mod tableau;

use thiserror::Error;

pub use oracle::{lasso_oracle, OracleError, ORACLE_MAX_ATOMS, ORACLE_MAX_BOUND};
pub use tableau::{Gba, GbaState};

use crate::ltl::{nnf, simplify, Formula, LassoTrace};

pub const DEFAULT_AP_CAP: usize = 12;

#[derive(Clone, Copy, Debug)]
pub struct SatOptions {
    /// Refuse formulas with more distinct atoms than this.
    pub ap_cap: usize,
    /// Abort tableau construction past this many states.
    pub state_cap: usize,
}

impl Default for SatOptions {
    fn default() -> Self {
        SatOptions {
            ap_cap: DEFAULT_AP_CAP,
            state_cap: 500_000,
        }
    }
}

impl SatOptions {
    pub fn with_ap_cap(ap_cap: usize) -> Self {
        SatOptions {
            ap_cap,
            ..Default::default()
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Error)]
pub enum SatError {
    #[error("formula has {atoms} atoms, exceeding the cap of {cap}")]
    ApCapExceeded { atoms: usize, cap: usize },
    #[error("tableau exceeded {cap} states")]
    StateExplosion { cap: usize },
}

#[derive(Clone, Debug)]
pub enum Satisfiability {
    /// Satisfiable, with a lasso witness.
    Sat(LassoTrace),
    Unsat,
}

impl Satisfiability {
    pub fn is_sat(&self) -> bool {
        matches!(self, Satisfiability::Sat(_))
    }

    pub fn witness(&self) -> Option<&LassoTrace> {
        match self {
            Satisfiability::Sat(t) => Some(t),
            Satisfiability::Unsat => None,
        }
    }
}

#[derive(Clone, Debug)]
pub enum Validity {
    Valid,
    /// A lasso satisfying the negation.
    CounterExample(LassoTrace),
}

impl Validity {
    pub fn is_valid(&self) -> bool {
        matches!(self, Validity::Valid)
    }
}

/// Translate to a GBA whose language is the set of models. The formula is
/// simplified and put in negation normal form first.
pub fn to_buchi(f: &Formula, opts: &SatOptions) -> Result<Gba, SatError> {
    let prepared = nnf(&simplify(f));
    check_cap(&prepared, opts)?;
    tableau::translate(&prepared, opts)
}

pub fn check_sat(f: &Formula, opts: &SatOptions) -> Result<Satisfiability, SatError> {
    let gba = to_buchi(f, opts)?;
    Ok(match emptiness::find_accepting_lasso(&gba) {
        // Simplification may have dropped atoms the original formula
        // mentions; the witness leaves them false.
        Some(witness) => Satisfiability::Sat(witness.extend_atoms(f.atoms())),
        None => Satisfiability::Unsat,
    })
}

pub fn is_satisfiable(f: &Formula, opts: &SatOptions) -> Result<bool, SatError> {
    Ok(check_sat(f, opts)?.is_sat())
}

/// Valid iff the negation is unsatisfiable.
pub fn check_validity(f: &Formula, opts: &SatOptions) -> Result<Validity, SatError> {
    Ok(match check_sat(&f.clone().not(), opts)? {
        Satisfiability::Sat(t) => Validity::CounterExample(t),
        Satisfiability::Unsat => Validity::Valid,
    })
}

pub fn is_valid(f: &Formula, opts: &SatOptions) -> Result<bool, SatError> {
    Ok(check_validity(f, opts)?.is_valid())
}

/// Semantic equivalence: validity of `f <-> g`.
pub fn formulas_equivalent(f: &Formula, g: &Formula, opts: &SatOptions) -> Result<bool, SatError> {
    is_valid(&f.clone().iff(g.clone()), opts)
}

fn check_cap(f: &Formula, opts: &SatOptions) -> Result<(), SatError> {
    let atoms = f.atoms().len();
    if atoms > opts.ap_cap {
        return Err(SatError::ApCapExceeded {
            atoms,
            cap: opts.ap_cap,
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ltl::{evaluate_on_lasso, parse};

    fn opts() -> SatOptions {
        SatOptions::default()
    }

    fn sat(text: &str) -> bool {
        is_satisfiable(&parse(text).unwrap(), &opts()).unwrap()
    }

    fn valid(text: &str) -> bool {
        is_valid(&parse(text).unwrap(), &opts()).unwrap()
    }

    #[test]
    fn constants() {
        assert!(sat("true"));
        assert!(!sat("false"));
        assert!(valid("true"));
    }

    #[test]
    fn witnesses_satisfy_their_formula() {
        for text in [
            "G F a",
            "a & X !a",
            "!lb U lf",
            "(G a) | (F b & G !a)",
            "X X X a",
            "a R b",
        ] {
            let f = parse(text).unwrap();
            match check_sat(&f, &opts()).unwrap() {
                Satisfiability::Sat(t) => {
                    assert!(evaluate_on_lasso(&f, &t, 0).unwrap(), "witness for {text}")
                }
                Satisfiability::Unsat => panic!("{text} should be satisfiable"),
            }
        }
    }

    #[test]
    fn unsatisfiable_formulas() {
        assert!(!sat("a & !a"));
        assert!(!sat("G a & F !a"));
        assert!(!sat("(a U b) & G !b"));
        assert!(!sat("X a & X !a"));
    }

    #[test]
    fn store_mutex_example_is_inconsistent() {
        // One-shot front/back mutual exclusion plus adjacency: being in both
        // locations at once has no model.
        let text = "lb & lf & G (lb -> !lf) & G (lf -> !lb) \
                    & G (lb -> X (lb | lf)) & G (lf -> X (lf | lb))";
        assert!(!sat(text));
    }

    #[test]
    fn patrolling_two_locations_is_satisfiable() {
        assert!(sat("G F l5 & G F l3"));
    }

    #[test]
    fn extension_context_proves_abstract_patrolling() {
        let text = "(G (l1 -> lf) & G (l3 -> lf)) -> ((G F l1 & G F l3) -> G F lf)";
        assert!(valid(text));
    }

    #[test]
    fn validity_basics() {
        assert!(valid("a -> a"));
        assert!(valid("G F a -> F a"));
        assert!(!valid("F a -> G a"));
        assert!(valid("(G a & F !a) -> false"));
    }

    #[test]
    fn release_until_duality() {
        assert!(valid("(a R b) <-> !(!a U !b)"));
        assert!(valid("(a U b) <-> !(!a R !b)"));
    }

    #[test]
    fn ap_cap_is_enforced() {
        let f = parse("a1 & a2 & a3 & a4").unwrap();
        let small = SatOptions {
            ap_cap: 3,
            ..Default::default()
        };
        assert_eq!(
            is_satisfiable(&f, &small),
            Err(SatError::ApCapExceeded { atoms: 4, cap: 3 })
        );
    }

    #[test]
    fn equivalence_of_weak_until_encodings() {
        // G a | (a U b) against its release form b R (a | b).
        let w1 = parse("G a | (a U b)").unwrap();
        let w2 = parse("b R (a | b)").unwrap();
        assert!(formulas_equivalent(&w1, &w2, &opts()).unwrap());
    }
}
