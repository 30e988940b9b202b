//! Assume-guarantee contracts and their algebra: saturation, refinement,
//! composition, quotient, merging, separation, and well-formedness.
//!
//! Assumptions and guarantees are sets of behaviors denoted by LTL formulas,
//! so the set operations of the algebra are realized as `&`, `|` and `!` on
//! formulas. All relations and operations require saturated operands and the
//! operations produce saturated results.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::ltl::{print, simplify, Ap, Formula};
use crate::sat::{check_validity, is_satisfiable, SatError, SatOptions, Validity};
use crate::world::WorldModel;

#[derive(Clone, PartialEq, Eq, Debug, Error)]
pub enum AlgebraError {
    #[error(transparent)]
    Sat(#[from] SatError),
    /// A satisfiability precheck of a context-aware refinement failed; this
    /// is reported distinctly from a plain "does not refine" verdict.
    #[error(
        "precheck failed: {side} '{formula}' is unsatisfiable under its mutex/adjacency context"
    )]
    PrecheckFailed { side: &'static str, formula: String },
}

/// A contract (A, G). The `saturated` flag records that the guarantees were
/// built as `G | !A` (or by an algebra operation, whose outputs are saturated
/// by construction); it is never re-inferred from the formula shape.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Contract {
    assumptions: Formula,
    guarantees: Formula,
    saturated: bool,
}

impl Contract {
    /// A raw, unsaturated contract.
    pub fn unsaturated(assumptions: Formula, guarantees: Formula) -> Self {
        Contract {
            assumptions,
            guarantees,
            saturated: false,
        }
    }

    /// Saturates a raw contract in one step.
    pub fn new(assumptions: Formula, guarantees: Formula) -> Self {
        Contract::unsaturated(assumptions, guarantees).saturate()
    }

    /// Wraps formulas the caller asserts are already saturated (G includes
    /// the complement of A), e.g. contracts transcribed from display form.
    pub fn from_saturated_parts(assumptions: Formula, guarantees: Formula) -> Self {
        Contract {
            assumptions,
            guarantees,
            saturated: true,
        }
    }

    /// Re-defines the guarantees as `G | !A`. Idempotent up to equivalence;
    /// the output is stored exactly as constructed.
    pub fn saturate(&self) -> Contract {
        if self.saturated {
            return self.clone();
        }
        Contract {
            assumptions: self.assumptions.clone(),
            guarantees: self.guarantees.clone().or(self.assumptions.clone().not()),
            saturated: true,
        }
    }

    pub fn assumptions(&self) -> &Formula {
        &self.assumptions
    }

    pub fn guarantees(&self) -> &Formula {
        &self.guarantees
    }

    pub fn is_saturated(&self) -> bool {
        self.saturated
    }

    pub fn atoms(&self) -> BTreeSet<Ap> {
        let mut set = self.assumptions.atoms();
        set.extend(self.guarantees.atoms());
        set
    }

    /// Simplified rendering for reports; the stored formulas are untouched.
    pub fn display_assumptions(&self) -> String {
        print(&simplify(&self.assumptions))
    }

    pub fn display_guarantees(&self) -> String {
        print(&simplify(&self.guarantees))
    }
}

fn require_saturated(c: &Contract, op: &str) {
    assert!(c.saturated, "{op} requires a saturated contract");
}

/// Composition: A = (A1 & A2) | !(G1 & G2), G = G1 & G2. Part of each
/// component's assumptions may be discharged by the other's guarantees.
pub fn compose(c1: &Contract, c2: &Contract) -> Contract {
    require_saturated(c1, "compose");
    require_saturated(c2, "compose");
    let g = c1.guarantees.clone().and(c2.guarantees.clone());
    let a = c1
        .assumptions
        .clone()
        .and(c2.assumptions.clone())
        .or(g.clone().not());
    Contract {
        assumptions: a,
        guarantees: g,
        saturated: true,
    }
}

/// N-ary composition as the binary fold; `None` for an empty selection.
pub fn compose_all<'a>(contracts: impl IntoIterator<Item = &'a Contract>) -> Option<Contract> {
    let mut iter = contracts.into_iter();
    let first = iter.next()?.clone();
    Some(iter.fold(first, |acc, c| compose(&acc, c)))
}

/// Quotient: the largest contract whose composition with `part` refines
/// `whole`. A = A' & G1, G = (G' & A1) | !(A' & G1).
pub fn quotient(whole: &Contract, part: &Contract) -> Contract {
    require_saturated(whole, "quotient");
    require_saturated(part, "quotient");
    let a = whole.assumptions.clone().and(part.guarantees.clone());
    let g = whole
        .guarantees
        .clone()
        .and(part.assumptions.clone())
        .or(a.clone().not());
    Contract {
        assumptions: a,
        guarantees: g,
        saturated: true,
    }
}

/// Merging: promises both guarantees when both assumptions hold.
/// A = A1 & A2, G = (G1 & G2) | !(A1 & A2).
pub fn merge(c1: &Contract, c2: &Contract) -> Contract {
    require_saturated(c1, "merge");
    require_saturated(c2, "merge");
    let a = c1.assumptions.clone().and(c2.assumptions.clone());
    let g = c1
        .guarantees
        .clone()
        .and(c2.guarantees.clone())
        .or(a.clone().not());
    Contract {
        assumptions: a,
        guarantees: g,
        saturated: true,
    }
}

/// Separation: the smallest contract whose merge with `divisor` is refined
/// by `dividend`. A = (A' & G1) | !(G' & A1), G = G' & A1.
pub fn separate(dividend: &Contract, divisor: &Contract) -> Contract {
    require_saturated(dividend, "separate");
    require_saturated(divisor, "separate");
    let g = dividend.guarantees.clone().and(divisor.assumptions.clone());
    let a = dividend
        .assumptions
        .clone()
        .and(divisor.guarantees.clone())
        .or(g.clone().not());
    Contract {
        assumptions: a,
        guarantees: g,
        saturated: true,
    }
}

/// C1 refines C2: C1 relaxes the assumptions and strengthens the guarantees,
/// i.e. `A2 -> A1` and `G1 -> G2` are valid. With a world model the checks
/// run in the world context: each implication first passes satisfiability
/// prechecks of both sides under their mutex/adjacency constraints, then the
/// implication is checked under the extension/covering constraints scoped to
/// the implication's atoms.
pub fn refines(
    c1: &Contract,
    c2: &Contract,
    world: Option<&WorldModel>,
    opts: &SatOptions,
) -> Result<bool, AlgebraError> {
    require_saturated(c1, "refines");
    require_saturated(c2, "refines");
    let assumptions_ok =
        implication_valid(&c2.assumptions, &c1.assumptions, "assumptions", world, opts)?;
    if !assumptions_ok {
        return Ok(false);
    }
    implication_valid(&c1.guarantees, &c2.guarantees, "guarantees", world, opts)
}

fn implication_valid(
    lhs: &Formula,
    rhs: &Formula,
    side: &'static str,
    world: Option<&WorldModel>,
    opts: &SatOptions,
) -> Result<bool, AlgebraError> {
    let implication = lhs.clone().implies(rhs.clone());
    let Some(w) = world else {
        return Ok(check_validity(&implication, opts)?.is_valid());
    };
    for formula in [lhs, rhs] {
        let aps = formula.atoms();
        let grounded = formula.clone().and(w.mtx(&aps)).and(w.adj(&aps));
        if !is_satisfiable(&grounded, opts)? {
            return Err(AlgebraError::PrecheckFailed {
                side,
                formula: print(&simplify(formula)),
            });
        }
    }
    let mut scope = lhs.atoms();
    scope.extend(rhs.atoms());
    let context = w.ext_within(&scope).and(w.cov_within(&scope));
    Ok(check_validity(&context.implies(implication), opts)?.is_valid())
}

/// Compatible: some environment exists, i.e. the assumptions are satisfiable
/// (within their mutex/adjacency context when a world model is supplied).
pub fn is_compatible(
    c: &Contract,
    world: Option<&WorldModel>,
    opts: &SatOptions,
) -> Result<bool, AlgebraError> {
    require_saturated(c, "is_compatible");
    grounded_sat(&c.assumptions, world, opts)
}

/// Consistent: some implementation exists, i.e. the guarantees are
/// satisfiable (within their mutex/adjacency context).
pub fn is_consistent(
    c: &Contract,
    world: Option<&WorldModel>,
    opts: &SatOptions,
) -> Result<bool, AlgebraError> {
    require_saturated(c, "is_consistent");
    grounded_sat(&c.guarantees, world, opts)
}

pub fn is_well_formed(
    c: &Contract,
    world: Option<&WorldModel>,
    opts: &SatOptions,
) -> Result<bool, AlgebraError> {
    Ok(is_compatible(c, world, opts)? && is_consistent(c, world, opts)?)
}

fn grounded_sat(
    f: &Formula,
    world: Option<&WorldModel>,
    opts: &SatOptions,
) -> Result<bool, AlgebraError> {
    let grounded = match world {
        Some(w) => {
            let aps = f.atoms();
            f.clone().and(w.mtx(&aps)).and(w.adj(&aps))
        }
        None => f.clone(),
    };
    Ok(is_satisfiable(&grounded, opts)?)
}

/// Semantic contract equivalence: mutual refinement.
pub fn is_equivalent(
    c1: &Contract,
    c2: &Contract,
    world: Option<&WorldModel>,
    opts: &SatOptions,
) -> Result<bool, AlgebraError> {
    Ok(refines(c1, c2, world, opts)? && refines(c2, c1, world, opts)?)
}

/// Validity in a world context without the contract wrapping: prechecks on
/// both sides of the implication, then `EXT & COV -> implication` scoped to
/// the implication's atoms. Exposed for the engine's realizability path and
/// for diagnostics.
pub fn contextual_validity(
    lhs: &Formula,
    rhs: &Formula,
    world: &WorldModel,
    opts: &SatOptions,
) -> Result<Validity, AlgebraError> {
    for formula in [lhs, rhs] {
        let aps = formula.atoms();
        let grounded = formula.clone().and(world.mtx(&aps)).and(world.adj(&aps));
        if !is_satisfiable(&grounded, opts)? {
            return Err(AlgebraError::PrecheckFailed {
                side: "formula",
                formula: print(&simplify(formula)),
            });
        }
    }
    let mut scope = lhs.atoms();
    scope.extend(rhs.atoms());
    let context = world.ext_within(&scope).and(world.cov_within(&scope));
    Ok(check_validity(
        &context.implies(lhs.clone().implies(rhs.clone())),
        opts,
    )?)
}
