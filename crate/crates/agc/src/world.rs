//! Typed world context: type declarations, the four relationships between
//! types, and the generated mutual-exclusion / adjacency / extension /
//! covering constraint formulas.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::ltl::{Ap, Formula};

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum TypeKind {
    Location,
    Sensor,
    Action,
    /// Auto-registered from a free atom in a parsed formula.
    Unknown,
}

impl fmt::Display for TypeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TypeKind::Location => write!(f, "location"),
            TypeKind::Sensor => write!(f, "sensor"),
            TypeKind::Action => write!(f, "action"),
            TypeKind::Unknown => write!(f, "unknown"),
        }
    }
}

/// A semantic concept of the mission. Every type carries exactly one atomic
/// proposition, the lowercase of its identifier.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct WorldType {
    pub id: String,
    pub kind: TypeKind,
    pub ap: Ap,
}

#[derive(Clone, PartialEq, Eq, Debug, Error)]
pub enum WorldError {
    #[error("duplicate type '{0}'")]
    DuplicateType(String),
    #[error("types '{first}' and '{second}' share the atomic proposition '{ap}'")]
    DuplicateAp {
        first: String,
        second: String,
        ap: Ap,
    },
    #[error("unknown type '{0}'")]
    UnknownType(String),
}

/// An invariant violation found by [`WorldModel::validate`].
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Violation {
    MutexSelfLoop { type_id: String },
    AdjacencySelfLoop { type_id: String },
    ExtensionCycle { cycle: Vec<String> },
    CoveringNotSubtype { covered: String, member: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::MutexSelfLoop { type_id } => {
                write!(f, "type '{type_id}' is declared mutex with itself")
            }
            Violation::AdjacencySelfLoop { type_id } => {
                write!(f, "type '{type_id}' is declared adjacent to itself")
            }
            Violation::ExtensionCycle { cycle } => {
                write!(f, "extension cycle: {}", cycle.join(" -> "))
            }
            Violation::CoveringNotSubtype { covered, member } => {
                write!(
                    f,
                    "covering member '{member}' is not a subtype of '{covered}'"
                )
            }
        }
    }
}

/// The type set with its relations. Mutex and adjacency are symmetric; the
/// stored pairs are normalized. Extension pairs are (subtype, supertype).
#[derive(Clone, Default, Debug)]
pub struct WorldModel {
    types: BTreeMap<String, WorldType>,
    ap_index: BTreeMap<Ap, String>,
    mutex: BTreeSet<(String, String)>,
    adjacency: BTreeSet<(String, String)>,
    extension: BTreeSet<(String, String)>,
    coverings: BTreeMap<String, BTreeSet<String>>,
}

fn normalize(a: &str, b: &str) -> (String, String) {
    if a <= b {
        (a.to_string(), b.to_string())
    } else {
        (b.to_string(), a.to_string())
    }
}

fn ap_of_id(id: &str) -> Ap {
    Ap::new(id.to_lowercase())
}

impl WorldModel {
    pub fn new() -> Self {
        WorldModel::default()
    }

    pub fn add_type(&mut self, id: &str, kind: TypeKind) -> Result<(), WorldError> {
        if self.types.contains_key(id) {
            return Err(WorldError::DuplicateType(id.to_string()));
        }
        let ap = ap_of_id(id);
        if let Some(existing) = self.ap_index.get(&ap) {
            return Err(WorldError::DuplicateAp {
                first: existing.clone(),
                second: id.to_string(),
                ap,
            });
        }
        self.ap_index.insert(ap.clone(), id.to_string());
        self.types.insert(
            id.to_string(),
            WorldType {
                id: id.to_string(),
                kind,
                ap,
            },
        );
        Ok(())
    }

    /// Registers an anonymous relation-less type for an atom that appears in
    /// a formula without a declaration. No-op when the atom is known.
    pub fn register_free_atom(&mut self, ap: &Ap) {
        if self.ap_index.contains_key(ap) {
            return;
        }
        let mut id: String = {
            let mut chars = ap.name().chars();
            match chars.next() {
                Some(c) => c.to_uppercase().collect::<String>() + chars.as_str(),
                None => return,
            }
        };
        while self.types.contains_key(&id) {
            id.push('_');
        }
        self.ap_index.insert(ap.clone(), id.clone());
        self.types.insert(
            id.clone(),
            WorldType {
                id,
                kind: TypeKind::Unknown,
                ap: ap.clone(),
            },
        );
    }

    fn check_known(&self, id: &str) -> Result<(), WorldError> {
        if self.types.contains_key(id) {
            Ok(())
        } else {
            Err(WorldError::UnknownType(id.to_string()))
        }
    }

    pub fn declare_mutex(&mut self, a: &str, b: &str) -> Result<(), WorldError> {
        self.check_known(a)?;
        self.check_known(b)?;
        self.mutex.insert(normalize(a, b));
        Ok(())
    }

    pub fn declare_adjacent(&mut self, a: &str, b: &str) -> Result<(), WorldError> {
        self.check_known(a)?;
        self.check_known(b)?;
        self.adjacency.insert(normalize(a, b));
        Ok(())
    }

    pub fn declare_extends(&mut self, sub: &str, sup: &str) -> Result<(), WorldError> {
        self.check_known(sub)?;
        self.check_known(sup)?;
        self.extension.insert((sub.to_string(), sup.to_string()));
        Ok(())
    }

    pub fn declare_covering(
        &mut self,
        covered: &str,
        members: impl IntoIterator<Item = String>,
    ) -> Result<(), WorldError> {
        self.check_known(covered)?;
        let mut set = BTreeSet::new();
        for m in members {
            self.check_known(&m)?;
            set.insert(m);
        }
        self.coverings
            .entry(covered.to_string())
            .or_default()
            .extend(set);
        Ok(())
    }

    pub fn types(&self) -> impl Iterator<Item = &WorldType> {
        self.types.values()
    }

    pub fn get_type(&self, id: &str) -> Option<&WorldType> {
        self.types.get(id)
    }

    pub fn type_of_ap(&self, ap: &Ap) -> Option<&WorldType> {
        self.ap_index.get(ap).and_then(|id| self.types.get(id))
    }

    pub fn aps(&self) -> BTreeSet<Ap> {
        self.ap_index.keys().cloned().collect()
    }

    fn ap_of(&self, id: &str) -> Formula {
        Formula::Atom(self.types[id].ap.clone())
    }

    /// Strict extension: `sub` transitively extends `sup`.
    fn extends_strictly(&self, sub: &str, sup: &str) -> bool {
        let mut stack = vec![sub];
        let mut seen = BTreeSet::new();
        while let Some(cur) = stack.pop() {
            for (s, t) in &self.extension {
                if s == cur && seen.insert(t.clone()) {
                    if t == sup {
                        return true;
                    }
                    stack.push(t);
                }
            }
        }
        false
    }

    /// Similar types: equal, or `a` extends `b` (reflexive-transitive
    /// closure of extension; directional).
    pub fn similar(&self, a: &str, b: &str) -> bool {
        a == b || self.extends_strictly(a, b)
    }

    /// Mutual-exclusion constraints among the types of the given atoms:
    /// `G(p -> !q) & G(q -> !p)` per mutex pair in scope.
    pub fn mtx(&self, aps: &BTreeSet<Ap>) -> Formula {
        let in_scope = |id: &String| aps.contains(&self.types[id].ap);
        Formula::conj(
            self.mutex
                .iter()
                .filter(|(a, b)| in_scope(a) && in_scope(b))
                .map(|(a, b)| {
                    let fwd = self.ap_of(a).implies(self.ap_of(b).not()).globally();
                    let bwd = self.ap_of(b).implies(self.ap_of(a).not()).globally();
                    fwd.and(bwd)
                }),
        )
    }

    /// Adjacency constraints: one clause per in-scope type with declared
    /// neighbors, `G(p -> X(p | n1 | n2 | ...))` over the full neighbor set.
    /// Neighbors outside the scope still appear as successor options.
    pub fn adj(&self, aps: &BTreeSet<Ap>) -> Formula {
        Formula::conj(
            self.types
                .values()
                .filter(|t| aps.contains(&t.ap))
                .filter_map(|t| {
                    let neighbors = self.neighbors(&t.id);
                    if neighbors.is_empty() {
                        return None;
                    }
                    let here = Formula::Atom(t.ap.clone());
                    let successors = Formula::disj(
                        std::iter::once(here.clone())
                            .chain(neighbors.iter().map(|n| self.ap_of(n))),
                    );
                    Some(here.implies(successors.next()).globally())
                }),
        )
    }

    /// The pairwise adjacency form: `G(p -> X(p | q)) & G(q -> X(q | p))`
    /// per adjacent pair with both atoms in scope. With several neighbors the
    /// conjunction constrains successors to the intersection, which is
    /// usually not what a map means; kept for compatibility.
    pub fn adj_pairwise(&self, aps: &BTreeSet<Ap>) -> Formula {
        let in_scope = |id: &String| aps.contains(&self.types[id].ap);
        Formula::conj(
            self.adjacency
                .iter()
                .filter(|(a, b)| in_scope(a) && in_scope(b))
                .map(|(a, b)| {
                    let pa = self.ap_of(a);
                    let pb = self.ap_of(b);
                    let fwd = pa
                        .clone()
                        .implies(pa.clone().or(pb.clone()).next())
                        .globally();
                    let bwd = pb.clone().implies(pb.or(pa).next()).globally();
                    fwd.and(bwd)
                }),
        )
    }

    fn neighbors(&self, id: &str) -> Vec<String> {
        let mut out: Vec<String> = self
            .adjacency
            .iter()
            .filter_map(|(a, b)| {
                if a == id {
                    Some(b.clone())
                } else if b == id {
                    Some(a.clone())
                } else {
                    None
                }
            })
            .collect();
        out.sort();
        out.dedup();
        out
    }

    /// All extension constraints: `G(sub -> sup)` per declared pair.
    pub fn ext(&self) -> Formula {
        self.ext_within(&self.aps())
    }

    /// Extension constraints restricted to pairs with both atoms in scope.
    pub fn ext_within(&self, aps: &BTreeSet<Ap>) -> Formula {
        let in_scope = |id: &String| aps.contains(&self.types[id].ap);
        Formula::conj(
            self.extension
                .iter()
                .filter(|(sub, sup)| in_scope(sub) && in_scope(sup))
                .map(|(sub, sup)| self.ap_of(sub).implies(self.ap_of(sup)).globally()),
        )
    }

    /// All covering constraints: `G(covered -> m1 | m2 | ...)`.
    pub fn cov(&self) -> Formula {
        self.cov_within(&self.aps())
    }

    /// Covering constraints for in-scope covered types, with the member
    /// disjunction restricted to in-scope members. A covering with no member
    /// in scope is dropped rather than collapsed to `G !covered`.
    pub fn cov_within(&self, aps: &BTreeSet<Ap>) -> Formula {
        let in_scope = |id: &String| aps.contains(&self.types[id].ap);
        Formula::conj(self.coverings.iter().filter_map(|(covered, members)| {
            if !in_scope(covered) {
                return None;
            }
            let present: Vec<&String> = members.iter().filter(|m| in_scope(m)).collect();
            if present.is_empty() {
                return None;
            }
            let disj = Formula::disj(present.iter().map(|m| self.ap_of(m)));
            Some(self.ap_of(covered).implies(disj).globally())
        }))
    }

    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        for (a, b) in &self.mutex {
            if a == b {
                out.push(Violation::MutexSelfLoop { type_id: a.clone() });
            }
        }
        for (a, b) in &self.adjacency {
            if a == b {
                out.push(Violation::AdjacencySelfLoop { type_id: a.clone() });
            }
        }
        if let Some(cycle) = self.find_extension_cycle() {
            out.push(Violation::ExtensionCycle { cycle });
        }
        for (covered, members) in &self.coverings {
            for member in members {
                if !self.extends_strictly(member, covered) {
                    out.push(Violation::CoveringNotSubtype {
                        covered: covered.clone(),
                        member: member.clone(),
                    });
                }
            }
        }
        out
    }

    fn find_extension_cycle(&self) -> Option<Vec<String>> {
        // DFS with an explicit path over the declared extension edges.
        for start in self.types.keys() {
            let mut path = vec![start.clone()];
            if self.cycle_from(start, start, &mut path) {
                return Some(path);
            }
        }
        None
    }

    fn cycle_from(&self, current: &str, target: &str, path: &mut Vec<String>) -> bool {
        for (s, t) in &self.extension {
            if s != current {
                continue;
            }
            if t == target {
                path.push(t.clone());
                return true;
            }
            if path.contains(t) {
                continue;
            }
            path.push(t.clone());
            if self.cycle_from(t, target, path) {
                return true;
            }
            path.pop();
        }
        false
    }
}

/// The two-level store world used across the test suite: abstract
/// front/back/entrance over five concrete locations, a person sensor and a
/// greet action.
#[cfg(test)]
pub(crate) fn store_world() -> WorldModel {
    let mut w = WorldModel::new();
    for id in ["LF", "LB", "LE"] {
        w.add_type(id, TypeKind::Location).unwrap();
    }
    for id in ["L1", "L2", "L3", "L4", "L5"] {
        w.add_type(id, TypeKind::Location).unwrap();
    }
    w.add_type("S", TypeKind::Sensor).unwrap();
    w.add_type("G", TypeKind::Action).unwrap();
    w.declare_mutex("LF", "LB").unwrap();
    w.declare_mutex("LB", "LE").unwrap();
    let concrete = ["L1", "L2", "L3", "L4", "L5"];
    for (i, a) in concrete.iter().enumerate() {
        for b in &concrete[i + 1..] {
            w.declare_mutex(a, b).unwrap();
        }
    }
    w.declare_adjacent("L1", "L2").unwrap();
    w.declare_adjacent("L1", "L3").unwrap();
    w.declare_adjacent("L3", "L4").unwrap();
    w.declare_adjacent("L3", "L5").unwrap();
    w.declare_adjacent("L4", "L5").unwrap();
    w.declare_adjacent("L2", "L4").unwrap();
    w.declare_adjacent("LF", "LB").unwrap();
    w.declare_adjacent("LE", "LF").unwrap();
    for sub in ["L1", "L3", "L4"] {
        w.declare_extends(sub, "LF").unwrap();
    }
    w.declare_extends("L5", "LB").unwrap();
    w.declare_extends("L2", "LE").unwrap();
    w.declare_covering("LF", ["L1", "L3", "L4"].map(String::from))
        .unwrap();
    w.declare_covering("LB", ["L5".to_string()]).unwrap();
    w.declare_covering("LE", ["L2".to_string()]).unwrap();
    w
}
