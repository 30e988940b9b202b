//! LTL abstract syntax.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

/// An atomic proposition, identified by its lowercase name.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Ap(Arc<str>);

impl Ap {
    pub fn new(name: impl AsRef<str>) -> Self {
        Ap(Arc::from(name.as_ref()))
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Ap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<&str> for Ap {
    fn from(s: &str) -> Self {
        Ap::new(s)
    }
}

/// LTL formula tree. `Release` is not part of the input grammar; it exists
/// so that negation normal form stays closed under negation.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Formula {
    True,
    False,
    Atom(Ap),
    Not(Arc<Formula>),
    And(Arc<Formula>, Arc<Formula>),
    Or(Arc<Formula>, Arc<Formula>),
    Implies(Arc<Formula>, Arc<Formula>),
    Iff(Arc<Formula>, Arc<Formula>),
    Next(Arc<Formula>),
    Until(Arc<Formula>, Arc<Formula>),
    Release(Arc<Formula>, Arc<Formula>),
    Eventually(Arc<Formula>),
    Globally(Arc<Formula>),
}

impl Formula {
    pub fn atom(name: impl AsRef<str>) -> Self {
        Formula::Atom(Ap::new(name))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(self) -> Self {
        Formula::Not(Arc::new(self))
    }

    pub fn and(self, other: Self) -> Self {
        Formula::And(Arc::new(self), Arc::new(other))
    }

    pub fn or(self, other: Self) -> Self {
        Formula::Or(Arc::new(self), Arc::new(other))
    }

    pub fn implies(self, other: Self) -> Self {
        Formula::Implies(Arc::new(self), Arc::new(other))
    }

    pub fn iff(self, other: Self) -> Self {
        Formula::Iff(Arc::new(self), Arc::new(other))
    }

    pub fn next(self) -> Self {
        Formula::Next(Arc::new(self))
    }

    pub fn until(self, other: Self) -> Self {
        Formula::Until(Arc::new(self), Arc::new(other))
    }

    pub fn release(self, other: Self) -> Self {
        Formula::Release(Arc::new(self), Arc::new(other))
    }

    pub fn eventually(self) -> Self {
        Formula::Eventually(Arc::new(self))
    }

    pub fn globally(self) -> Self {
        Formula::Globally(Arc::new(self))
    }

    /// Weak until: no `W` node in the tree, encoded as `G lhs | (lhs U rhs)`.
    pub fn weak_until(self, other: Self) -> Self {
        self.clone().globally().or(self.until(other))
    }

    /// Left fold of `&` over the given formulas; `true` when empty.
    pub fn conj(parts: impl IntoIterator<Item = Formula>) -> Formula {
        let mut iter = parts.into_iter();
        match iter.next() {
            None => Formula::True,
            Some(first) => iter.fold(first, |acc, f| acc.and(f)),
        }
    }

    /// Left fold of `|` over the given formulas; `false` when empty.
    pub fn disj(parts: impl IntoIterator<Item = Formula>) -> Formula {
        let mut iter = parts.into_iter();
        match iter.next() {
            None => Formula::False,
            Some(first) => iter.fold(first, |acc, f| acc.or(f)),
        }
    }

    /// The set of atoms occurring syntactically in the formula.
    pub fn atoms(&self) -> BTreeSet<Ap> {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms(&self, out: &mut BTreeSet<Ap>) {
        match self {
            Formula::True | Formula::False => {}
            Formula::Atom(ap) => {
                out.insert(ap.clone());
            }
            Formula::Not(a) | Formula::Next(a) | Formula::Eventually(a) | Formula::Globally(a) => {
                a.collect_atoms(out)
            }
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Implies(a, b)
            | Formula::Iff(a, b)
            | Formula::Until(a, b)
            | Formula::Release(a, b) => {
                a.collect_atoms(out);
                b.collect_atoms(out);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn atoms_of_constants_is_empty() {
        assert!(Formula::True.atoms().is_empty());
    }

    #[test]
    fn atoms_dedup() {
        let f = Formula::atom("a").and(Formula::atom("a").not());
        let atoms = f.atoms();
        assert_eq!(atoms.len(), 1);
        assert!(atoms.contains(&Ap::new("a")));
    }

    #[test]
    fn atoms_of_paper_patrol_guarantee() {
        // G F (lf & F lb) mentions exactly lf and lb.
        let f = Formula::atom("lf")
            .and(Formula::atom("lb").eventually())
            .eventually()
            .globally();
        let atoms: Vec<_> = f
            .atoms()
            .into_iter()
            .map(|a| a.name().to_string())
            .collect();
        assert_eq!(atoms, vec!["lb".to_string(), "lf".to_string()]);
    }
}
