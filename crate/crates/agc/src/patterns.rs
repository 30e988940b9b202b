//! Robotic specification patterns: named LTL templates for mission clauses.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::ltl::{Ap, Formula};

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum PatternName {
    InfOften,
    Patrolling,
    Visit,
    OrderedPatrolling,
    StrictOrderedPatrolling,
    InstantaneousReaction,
    DelayedReaction,
}

impl PatternName {
    pub const ALL: [PatternName; 7] = [
        PatternName::InfOften,
        PatternName::Patrolling,
        PatternName::Visit,
        PatternName::OrderedPatrolling,
        PatternName::StrictOrderedPatrolling,
        PatternName::InstantaneousReaction,
        PatternName::DelayedReaction,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            PatternName::InfOften => "InfOften",
            PatternName::Patrolling => "Patrolling",
            PatternName::Visit => "Visit",
            PatternName::OrderedPatrolling => "OrderedPatrolling",
            PatternName::StrictOrderedPatrolling => "StrictOrderedPatrolling",
            PatternName::InstantaneousReaction => "InstantaneousReaction",
            PatternName::DelayedReaction => "DelayedReaction",
        }
    }
}

impl fmt::Display for PatternName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_str())
    }
}

impl FromStr for PatternName {
    type Err = PatternError;

    fn from_str(s: &str) -> Result<Self, PatternError> {
        PatternName::ALL
            .into_iter()
            .find(|p| p.as_str() == s)
            .ok_or_else(|| PatternError::UnknownPattern(s.to_string()))
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Error)]
pub enum PatternError {
    #[error("unknown pattern '{0}'")]
    UnknownPattern(String),
    #[error("{pattern} expects {expected} argument(s), got {got}")]
    ArityMismatch {
        pattern: PatternName,
        expected: &'static str,
        got: usize,
    },
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PatternInstance {
    pub name: PatternName,
    pub args: Vec<Ap>,
}

impl PatternInstance {
    pub fn new(name: PatternName, args: Vec<Ap>) -> Result<Self, PatternError> {
        let ok = match name {
            PatternName::InfOften => args.len() == 1,
            PatternName::InstantaneousReaction | PatternName::DelayedReaction => args.len() == 2,
            _ => !args.is_empty(),
        };
        if !ok {
            let expected = match name {
                PatternName::InfOften => "exactly 1",
                PatternName::InstantaneousReaction | PatternName::DelayedReaction => "exactly 2",
                _ => "at least 1",
            };
            return Err(PatternError::ArityMismatch {
                pattern: name,
                expected,
                got: args.len(),
            });
        }
        Ok(PatternInstance { name, args })
    }
}

impl fmt::Display for PatternInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let args: Vec<&str> = self.args.iter().map(|a| a.name()).collect();
        write!(f, "{}({})", self.name, args.join(", "))
    }
}

/// Expand a pattern instance into its LTL formula.
pub fn expand(p: &PatternInstance) -> Formula {
    let atom = |ap: &Ap| Formula::Atom(ap.clone());
    match p.name {
        PatternName::InfOften => atom(&p.args[0]).eventually().globally(),
        PatternName::Patrolling => {
            Formula::conj(p.args.iter().map(|l| atom(l).eventually().globally()))
        }
        PatternName::Visit => Formula::conj(p.args.iter().map(|l| atom(l).eventually())),
        PatternName::OrderedPatrolling => ordered_core(&p.args, false),
        PatternName::StrictOrderedPatrolling => ordered_core(&p.args, true),
        PatternName::InstantaneousReaction => atom(&p.args[0]).implies(atom(&p.args[1])).globally(),
        PatternName::DelayedReaction => {
            atom(&p.args[0]).implies(atom(&p.args[1]).next()).globally()
        }
    }
}

/// Convenience: expand by name, for the parser's pattern-call hook.
pub fn expand_call(name: &str, args: &[Ap]) -> Result<Formula, PatternError> {
    let pattern = PatternName::from_str(name)?;
    Ok(expand(&PatternInstance::new(pattern, args.to_vec())?))
}

/// Shared core of the two ordered patterns over the cyclic visit order
/// a1 -> a2 -> ... -> an -> a1.
///
/// The ordered variant opens with the continuous-visit clause
/// `G F (a1 & F (a2 & ...))` and chains strong untils. The strict variant
/// keeps only the ordering clauses and weakens every until to `W`
/// (encoded as `G p | (p U q)`): it forbids out-of-order visits without
/// requiring any visit to happen, so it refines the ordered pattern only
/// together with a source of liveness.
fn ordered_core(args: &[Ap], strict: bool) -> Formula {
    let atom = |ap: &Ap| Formula::Atom(ap.clone());
    let n = args.len();
    if n == 1 {
        return if strict {
            Formula::True
        } else {
            atom(&args[0]).eventually().globally()
        };
    }
    let not_until = |avoid: &Ap, goal: &Ap| {
        if strict {
            atom(avoid).not().weak_until(atom(goal))
        } else {
            atom(avoid).not().until(atom(goal))
        }
    };

    let mut clauses = Vec::new();
    if !strict {
        // G F (a1 & F (a2 & F (...))).
        let mut chain = atom(&args[n - 1]);
        for ap in args[..n - 1].iter().rev() {
            chain = atom(ap).and(chain.eventually());
        }
        clauses.push(chain.eventually().globally());
    }
    // Initially nothing is skipped ahead to a2 before a1 is reached.
    clauses.push(not_until(&args[1], &args[0]));
    // After each visit, move on: pairs (a2,a3) ... (an,a1) (a1,a2).
    for i in 0..n {
        let here = &args[(i + 1) % n];
        let next = &args[(i + 2) % n];
        clauses.push(atom(here).implies(not_until(here, next).next()).globally());
    }
    Formula::conj(clauses)
}
