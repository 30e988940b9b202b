//! Component libraries, similarity and refinement scores, and the
//! best-candidate-composition search.

use std::collections::BTreeSet;
use std::path::PathBuf;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use thiserror::Error;

use crate::contract::{compose_all, is_well_formed, refines, AlgebraError, Contract};
use crate::sat::SatOptions;
use crate::world::WorldModel;

#[derive(Clone, PartialEq, Eq, Debug, Error)]
pub enum LibraryError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("duplicate component name '{0}'")]
    DuplicateComponent(String),
    #[error("the contract has no types to compare")]
    NoTypes,
    #[error("refinement score needs a non-empty pool")]
    EmptyPool,
    #[error("the library is empty")]
    EmptyLibrary,
    #[error("no well-formed composition exists within the subset cap")]
    NoComposableSubset,
}

/// A pre-implemented mission objective: a saturated contract plus an
/// optional reference to a machine file.
#[derive(Clone, Debug)]
pub struct Component {
    pub name: String,
    pub contract: Contract,
    pub impl_ref: Option<PathBuf>,
}

#[derive(Clone, Debug)]
pub struct ComponentLibrary {
    pub name: String,
    components: Vec<Component>,
}

impl ComponentLibrary {
    pub fn new(name: impl Into<String>, components: Vec<Component>) -> Result<Self, LibraryError> {
        let mut seen = BTreeSet::new();
        for c in &components {
            if !seen.insert(c.name.clone()) {
                return Err(LibraryError::DuplicateComponent(c.name.clone()));
            }
        }
        Ok(ComponentLibrary {
            name: name.into(),
            components,
        })
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    pub fn get(&self, name: &str) -> Option<&Component> {
        self.components.iter().find(|c| c.name == name)
    }

    pub fn contracts(&self) -> Vec<&Contract> {
        self.components.iter().map(|c| &c.contract).collect()
    }
}

/// Percentage of the specification's types that some library type is similar
/// to (equal, or a library type extends the specification type). Each
/// specification type counts at most once.
pub fn similarity_score(
    c: &Contract,
    components: &[Component],
    world: &WorldModel,
) -> Result<f64, LibraryError> {
    let spec_aps = c.atoms();
    if spec_aps.is_empty() {
        return Err(LibraryError::NoTypes);
    }
    let mut library_aps = BTreeSet::new();
    for comp in components {
        library_aps.extend(comp.contract.atoms());
    }
    let covered = spec_aps
        .iter()
        .filter(|spec_ap| {
            library_aps.iter().any(|lib_ap| {
                if lib_ap == *spec_ap {
                    return true;
                }
                match (world.type_of_ap(lib_ap), world.type_of_ap(spec_ap)) {
                    (Some(lib_t), Some(spec_t)) => world.similar(&lib_t.id, &spec_t.id),
                    _ => false,
                }
            })
        })
        .count();
    Ok(covered as f64 / spec_aps.len() as f64 * 100.0)
}

/// Percentage of pool contracts the target refines (plain refinement, no
/// world context). Pairwise scores can be precomputed offline; this is the
/// direct computation.
pub fn refinement_score(
    target: &Contract,
    pool: &[&Contract],
    opts: &SatOptions,
) -> Result<f64, LibraryError> {
    if pool.is_empty() {
        return Err(LibraryError::EmptyPool);
    }
    let mut refined = 0usize;
    for p in pool {
        if refines(target, p, None, opts)? {
            refined += 1;
        }
    }
    Ok(refined as f64 / pool.len() as f64 * 100.0)
}

/// How ties after the refinement-score stage are resolved.
#[derive(Clone, Copy, Debug)]
pub enum TieBreak {
    /// Smallest sorted component-name list wins: reproducible by default.
    Lexicographic,
    /// Seeded uniform choice among the tied survivors.
    Seeded(u64),
}

#[derive(Clone, Copy, Debug)]
pub struct SearchOptions {
    /// Largest subset size enumerated.
    pub subset_cap: usize,
    /// Rank tied survivors by the lowest refinement score instead of the
    /// highest; keeps the patch light when the goal is repair.
    pub prefer_least_refined: bool,
    pub tie_break: TieBreak,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            subset_cap: 4,
            prefer_least_refined: false,
            tie_break: TieBreak::Lexicographic,
        }
    }
}

/// The outcome of the candidate search: the selected components, their
/// composition, and the scores that ranked it first.
#[derive(Clone, Debug)]
pub struct CandidateComposition {
    pub selection: Vec<String>,
    pub composed: Contract,
    pub similarity: f64,
    pub refinement_score: f64,
}

/// Enumerates composable subsets of the library up to the subset cap and
/// ranks them: highest similarity score, then fewest components, then the
/// refinement score against the whole library pool, then the tie-break.
pub fn best_candidate_composition(
    c: &Contract,
    lib: &ComponentLibrary,
    world: &WorldModel,
    search: &SearchOptions,
    sat: &SatOptions,
) -> Result<CandidateComposition, LibraryError> {
    if lib.components().is_empty() {
        return Err(LibraryError::EmptyLibrary);
    }

    struct Entry {
        indices: Vec<usize>,
        composed: Contract,
        similarity: f64,
    }

    let mut composable: Vec<Entry> = Vec::new();
    for indices in subsets_up_to(lib.components().len(), search.subset_cap) {
        let selected: Vec<&Contract> = indices
            .iter()
            .map(|&i| &lib.components()[i].contract)
            .collect();
        let composed = compose_all(selected.iter().copied()).expect("subsets are non-empty");
        if !is_well_formed(&composed, Some(world), sat)? {
            continue;
        }
        let picked: Vec<Component> = indices
            .iter()
            .map(|&i| lib.components()[i].clone())
            .collect();
        let similarity = similarity_score(c, &picked, world)?;
        composable.push(Entry {
            indices,
            composed,
            similarity,
        });
    }
    if composable.is_empty() {
        return Err(LibraryError::NoComposableSubset);
    }

    let best_similarity = composable
        .iter()
        .map(|e| e.similarity)
        .fold(f64::NEG_INFINITY, f64::max);
    composable.retain(|e| e.similarity == best_similarity);

    let min_size = composable.iter().map(|e| e.indices.len()).min().unwrap();
    composable.retain(|e| e.indices.len() == min_size);

    let pool = lib.contracts();
    let mut scored: Vec<(Entry, f64)> = Vec::new();
    for e in composable {
        let score = refinement_score(&e.composed, &pool, sat)?;
        scored.push((e, score));
    }
    let best_score = scored
        .iter()
        .map(|(_, s)| *s)
        .fold(f64::NEG_INFINITY, f64::max);
    let worst_score = scored.iter().map(|(_, s)| *s).fold(f64::INFINITY, f64::min);
    let wanted = if search.prefer_least_refined {
        worst_score
    } else {
        best_score
    };
    scored.retain(|(_, s)| *s == wanted);

    let names = |e: &Entry| -> Vec<String> {
        let mut v: Vec<String> = e
            .indices
            .iter()
            .map(|&i| lib.components()[i].name.clone())
            .collect();
        v.sort();
        v
    };
    let chosen = match search.tie_break {
        TieBreak::Lexicographic => scored
            .into_iter()
            .min_by(|(a, _), (b, _)| names(a).cmp(&names(b)))
            .unwrap(),
        TieBreak::Seeded(seed) => {
            let mut rng = StdRng::seed_from_u64(seed);
            let idx = rng.random_range(0..scored.len());
            scored.swap_remove(idx)
        }
    };

    let (entry, score) = chosen;
    Ok(CandidateComposition {
        selection: entry
            .indices
            .iter()
            .map(|&i| lib.components()[i].name.clone())
            .collect(),
        composed: entry.composed,
        similarity: entry.similarity,
        refinement_score: score,
    })
}

/// Non-empty subsets of {0..n} with at most `cap` elements, smallest first,
/// in lexicographic index order within a size.
fn subsets_up_to(n: usize, cap: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = Vec::new();
    for size in 1..=cap.min(n) {
        combinations(0, n, size, &mut current, &mut out);
    }
    out
}

fn combinations(
    start: usize,
    n: usize,
    size: usize,
    current: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    if current.len() == size {
        out.push(current.clone());
        return;
    }
    for i in start..n {
        current.push(i);
        combinations(i + 1, n, size, current, out);
        current.pop();
    }
}
