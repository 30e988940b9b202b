//! Refinement analysis: decide between completing, searching for the
//! missing specification via the quotient, or repairing the specification
//! via separation and merging. Also hosts the external realizability
//! adapter.

use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Stdio};
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::contract::{
    compose, compose_all, is_consistent, merge, quotient, refines, separate, AlgebraError, Contract,
};
use crate::library::{
    best_candidate_composition, CandidateComposition, ComponentLibrary, LibraryError, SearchOptions,
};
use crate::ltl::{print, simplify, Ap, Formula};
use crate::sat::SatOptions;
use crate::world::WorldModel;

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("--repair and --search cannot both be forced")]
    BothForceFlags,
    #[error("the candidate composition does not match the given contract/library pair")]
    CandidateMismatch,
    #[error("the candidate already refines the contract; nothing to repair or search for")]
    NothingToFix,
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Library(#[from] LibraryError),
    #[error("internal error: the {0} result failed its refinement re-verification")]
    VerificationFailed(&'static str),
}

/// A quotient refinement found in an extra library during search.
#[derive(Clone, Debug)]
pub struct FoundRefinement {
    pub library: String,
    pub candidate: CandidateComposition,
}

#[derive(Clone, Debug)]
pub enum AnalysisOutcome {
    /// The candidate composition already refines the contract.
    Complete { candidate: CandidateComposition },
    /// No strategy applies; the similarity score explains why.
    Failed {
        similarity: f64,
        note: Option<String>,
    },
    /// Search outcome: the quotient is always reported; when some extra
    /// library refines it, the completed composition (quotient refinement
    /// composed with the candidate) is included and has been re-verified to
    /// refine the goal contract.
    SearchResult {
        quotient: Contract,
        found: Option<FoundRefinement>,
        completed: Option<Contract>,
    },
    /// Repair outcome: the separation patch and the repaired contract,
    /// re-verified to be refined by the candidate.
    RepairResult {
        separation: Contract,
        repaired: Contract,
    },
}

/// Routing of the refinement analysis, in order: refinement already complete;
/// zero similarity fails; a forced repair; a forced search (needs extra
/// libraries); repair when similarity is at least 80%; search when extra
/// libraries exist; otherwise failure.
#[allow(clippy::too_many_arguments)]
pub fn refinement_analysis(
    c: &Contract,
    lib: &ComponentLibrary,
    candidate: &CandidateComposition,
    extra_libs: &[&ComponentLibrary],
    force_repair: bool,
    force_search: bool,
    world: &WorldModel,
    search_opts: &SearchOptions,
    sat: &SatOptions,
) -> Result<AnalysisOutcome, EngineError> {
    if force_repair && force_search {
        return Err(EngineError::BothForceFlags);
    }
    verify_candidate_source(candidate, lib)?;

    if refines(&candidate.composed, c, Some(world), sat)? {
        return Ok(AnalysisOutcome::Complete {
            candidate: candidate.clone(),
        });
    }
    if candidate.similarity == 0.0 {
        return Ok(AnalysisOutcome::Failed {
            similarity: candidate.similarity,
            note: None,
        });
    }
    if force_repair {
        return repair_procedure(candidate, c, world, sat);
    }
    if force_search && !extra_libs.is_empty() {
        return search_procedure(candidate, c, extra_libs, world, search_opts, sat);
    }
    if candidate.similarity >= 80.0 {
        return repair_procedure(candidate, c, world, sat);
    }
    if !extra_libs.is_empty() {
        return search_procedure(candidate, c, extra_libs, world, search_opts, sat);
    }
    Ok(AnalysisOutcome::Failed {
        similarity: candidate.similarity,
        note: None,
    })
}

fn verify_candidate_source(
    candidate: &CandidateComposition,
    lib: &ComponentLibrary,
) -> Result<(), EngineError> {
    let selected: Option<Vec<&Contract>> = candidate
        .selection
        .iter()
        .map(|name| lib.get(name).map(|c| &c.contract))
        .collect();
    let Some(selected) = selected else {
        return Err(EngineError::CandidateMismatch);
    };
    match compose_all(selected) {
        Some(composed) if composed == candidate.composed => Ok(()),
        _ => Err(EngineError::CandidateMismatch),
    }
}

/// Search for the missing specification: Q = c / candidate, then look for a
/// refinement of Q in the extra libraries. On success the refinement is
/// composed back with the candidate and re-verified against c. With no hit,
/// the quotient itself is the deliverable (it can be implemented by a third
/// party).
pub fn search_procedure(
    candidate: &CandidateComposition,
    c: &Contract,
    extra_libs: &[&ComponentLibrary],
    world: &WorldModel,
    search_opts: &SearchOptions,
    sat: &SatOptions,
) -> Result<AnalysisOutcome, EngineError> {
    if refines(&candidate.composed, c, Some(world), sat)? {
        return Err(EngineError::NothingToFix);
    }
    let q = quotient(c, &candidate.composed);
    if !is_consistent(&q, Some(world), sat)? {
        return Ok(AnalysisOutcome::Failed {
            similarity: candidate.similarity,
            note: Some(
                "the quotient is inconsistent: no specification can complete the candidate".into(),
            ),
        });
    }
    for lib in extra_libs {
        let found = match best_candidate_composition(&q, lib, world, search_opts, sat) {
            Ok(found) => found,
            Err(LibraryError::NoComposableSubset | LibraryError::EmptyLibrary) => continue,
            Err(e) => return Err(e.into()),
        };
        if !refines(&found.composed, &q, Some(world), sat)? {
            continue;
        }
        let completed = compose(&found.composed, &candidate.composed);
        if !refines(&completed, c, Some(world), sat)? {
            return Err(EngineError::VerificationFailed("search"));
        }
        return Ok(AnalysisOutcome::SearchResult {
            quotient: q,
            found: Some(FoundRefinement {
                library: lib.name.clone(),
                candidate: found,
            }),
            completed: Some(completed),
        });
    }
    Ok(AnalysisOutcome::SearchResult {
        quotient: q,
        found: None,
        completed: None,
    })
}

/// Repair the specification: S = candidate ÷ c (note the dividend/divisor
/// order is opposite to the quotient's), then c' = S merged with c. The
/// candidate is re-verified to refine c'.
pub fn repair_procedure(
    candidate: &CandidateComposition,
    c: &Contract,
    world: &WorldModel,
    sat: &SatOptions,
) -> Result<AnalysisOutcome, EngineError> {
    if refines(&candidate.composed, c, Some(world), sat)? {
        return Err(EngineError::NothingToFix);
    }
    let separation = separate(&candidate.composed, c);
    let repaired = merge(&separation, c);
    if !refines(&candidate.composed, &repaired, Some(world), sat)? {
        return Err(EngineError::VerificationFailed("repair"));
    }
    Ok(AnalysisOutcome::RepairResult {
        separation,
        repaired,
    })
}

/// External synthesizer invocation: `{input}` in the command template is
/// replaced by the path of the generated input file.
#[derive(Clone, Debug)]
pub struct ExternalSynthConfig {
    pub command_template: String,
    pub timeout: Duration,
}

impl ExternalSynthConfig {
    pub fn new(command_template: impl Into<String>) -> Self {
        ExternalSynthConfig {
            command_template: command_template.into(),
            timeout: Duration::from_secs(60),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RealizabilityVerdict {
    Realizable,
    Unrealizable,
    /// The tool is missing, timed out, or produced no verdict. Never
    /// conflated with an actual verdict.
    ToolError(String),
}

/// Check realizability of `(A & MTX(A) & ADJ(A)) -> (G & MTX(G) & ADJ(G))`
/// with the given input/output partition via the external tool. A contract
/// whose guarantees simplify to `false` is unrealizable without a tool call.
pub fn check_realizability(
    c: &Contract,
    world: &WorldModel,
    adapter: Option<&ExternalSynthConfig>,
    inputs: &[Ap],
    outputs: &[Ap],
) -> RealizabilityVerdict {
    assert!(
        c.is_saturated(),
        "check_realizability requires a saturated contract"
    );
    if simplify(c.guarantees()) == Formula::False {
        return RealizabilityVerdict::Unrealizable;
    }
    let Some(adapter) = adapter else {
        return RealizabilityVerdict::ToolError("no adapter configured".into());
    };

    let formula = realizability_formula(c, world);
    let input_text = render_synth_input(inputs, outputs, &formula);
    let path = match write_temp_input(&input_text) {
        Ok(p) => p,
        Err(e) => return RealizabilityVerdict::ToolError(format!("cannot write input file: {e}")),
    };
    let verdict = run_adapter(adapter, &path);
    let _ = std::fs::remove_file(&path);
    verdict
}

/// The formula handed to the synthesizer: both sides grounded with their
/// mutex and adjacency context. Extension and covering constraints are not
/// included: the contract lives on a single abstraction level.
pub fn realizability_formula(c: &Contract, world: &WorldModel) -> Formula {
    let a_aps = c.assumptions().atoms();
    let g_aps = c.guarantees().atoms();
    let lhs = c
        .assumptions()
        .clone()
        .and(world.mtx(&a_aps))
        .and(world.adj(&a_aps));
    let rhs = c
        .guarantees()
        .clone()
        .and(world.mtx(&g_aps))
        .and(world.adj(&g_aps));
    simplify(&lhs).implies(simplify(&rhs))
}

pub fn render_synth_input(inputs: &[Ap], outputs: &[Ap], formula: &Formula) -> String {
    let names = |aps: &[Ap]| {
        aps.iter()
            .map(|a| a.name().to_string())
            .collect::<Vec<_>>()
            .join(" ")
    };
    format!(
        "INPUTS: {}\nOUTPUTS: {}\nFORMULA: {}\n",
        names(inputs),
        names(outputs),
        print(formula)
    )
}

fn write_temp_input(text: &str) -> std::io::Result<PathBuf> {
    use std::sync::atomic::{AtomicU64, Ordering};
    static COUNTER: AtomicU64 = AtomicU64::new(0);
    let n = COUNTER.fetch_add(1, Ordering::Relaxed);
    let path = std::env::temp_dir().join(format!("agc-synth-{}-{n}.txt", std::process::id()));
    let mut f = std::fs::File::create(&path)?;
    f.write_all(text.as_bytes())?;
    Ok(path)
}

fn run_adapter(adapter: &ExternalSynthConfig, input: &std::path::Path) -> RealizabilityVerdict {
    let command_line = adapter
        .command_template
        .replace("{input}", &input.to_string_lossy());
    let mut parts = command_line.split_whitespace();
    let Some(program) = parts.next() else {
        return RealizabilityVerdict::ToolError("empty adapter command".into());
    };
    let mut child = match Command::new(program)
        .args(parts)
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
    {
        Ok(c) => c,
        Err(e) => return RealizabilityVerdict::ToolError(format!("cannot start '{program}': {e}")),
    };

    let deadline = Instant::now() + adapter.timeout;
    loop {
        match child.try_wait() {
            Ok(Some(_)) => break,
            Ok(None) => {
                if Instant::now() >= deadline {
                    let _ = child.kill();
                    let _ = child.wait();
                    return RealizabilityVerdict::ToolError(format!(
                        "timed out after {:?}",
                        adapter.timeout
                    ));
                }
                std::thread::sleep(Duration::from_millis(20));
            }
            Err(e) => return RealizabilityVerdict::ToolError(format!("wait failed: {e}")),
        }
    }
    let output = match child.wait_with_output() {
        Ok(o) => o,
        Err(e) => return RealizabilityVerdict::ToolError(format!("cannot read output: {e}")),
    };
    let stdout = String::from_utf8_lossy(&output.stdout);
    match parse_verdict(&stdout) {
        Some(v) => v,
        None => RealizabilityVerdict::ToolError(format!(
            "no REALIZABLE/UNREALIZABLE verdict in output: {}",
            stdout.trim()
        )),
    }
}

/// First match wins; UNREALIZABLE is checked first at each position since
/// REALIZABLE is its suffix.
fn parse_verdict(stdout: &str) -> Option<RealizabilityVerdict> {
    let bytes = stdout.as_bytes();
    for i in 0..bytes.len() {
        let rest = &stdout[i..];
        if rest.starts_with("UNREALIZABLE") {
            return Some(RealizabilityVerdict::Unrealizable);
        }
        if rest.starts_with("REALIZABLE") {
            return Some(RealizabilityVerdict::Realizable);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::library::{Component, TieBreak};
    use crate::ltl::parse;
    use crate::world::{store_world, TypeKind};

    fn opts() -> SatOptions {
        SatOptions::default()
    }

    fn search_opts() -> SearchOptions {
        SearchOptions::default()
    }

    fn contract(a: &str, g: &str) -> Contract {
        Contract::new(parse(a).unwrap(), parse(g).unwrap())
    }

    fn comp(name: &str, guarantee: &str) -> Component {
        Component {
            name: name.to_string(),
            contract: contract("true", guarantee),
            impl_ref: None,
        }
    }

    fn lib(name: &str, comps: Vec<Component>) -> ComponentLibrary {
        ComponentLibrary::new(name, comps).unwrap()
    }

    fn candidate_for(
        c: &Contract,
        library: &ComponentLibrary,
        world: &WorldModel,
    ) -> CandidateComposition {
        best_candidate_composition(c, library, world, &search_opts(), &opts()).unwrap()
    }

    /// A small world with five independent mutex-free location types.
    fn plain_world() -> WorldModel {
        let mut w = WorldModel::new();
        for id in ["TA", "TB", "TC", "TD", "TE"] {
            w.add_type(id, TypeKind::Location).unwrap();
        }
        w
    }

    #[test]
    fn complete_when_candidate_refines() {
        let w = plain_world();
        let goal = contract("true", "F ta");
        let library = lib("L", vec![comp("Stronger", "G F ta")]);
        let cand = candidate_for(&goal, &library, &w);
        let out = refinement_analysis(
            &goal,
            &library,
            &cand,
            &[],
            false,
            false,
            &w,
            &search_opts(),
            &opts(),
        )
        .unwrap();
        assert!(matches!(out, AnalysisOutcome::Complete { .. }));
    }

    #[test]
    fn failed_on_zero_similarity() {
        let w = plain_world();
        let goal = contract("true", "G F ta");
        let library = lib("L", vec![comp("Elsewhere", "G F tb")]);
        let cand = candidate_for(&goal, &library, &w);
        assert_eq!(cand.similarity, 0.0);
        // Even with extra libraries available, zero similarity fails first.
        let extra = lib("D2", vec![comp("X", "G F ta")]);
        let out = refinement_analysis(
            &goal,
            &library,
            &cand,
            &[&extra],
            false,
            false,
            &w,
            &search_opts(),
            &opts(),
        )
        .unwrap();
        assert!(matches!(out, AnalysisOutcome::Failed { similarity, .. } if similarity == 0.0));
    }

    #[test]
    fn high_similarity_routes_to_repair() {
        let w = plain_world();
        // Five types, library covers four: exactly 80%.
        let goal = contract("true", "F ta & F tb & F tc & F td & F te");
        let library = lib(
            "L",
            vec![
                comp("C", "G (ta & tb & tc & td) -> false"),
                comp("D", "F ta & F tb & F tc & F td"),
            ],
        );
        let cand = candidate_for(&goal, &library, &w);
        assert_eq!(cand.similarity, 80.0);
        let out = refinement_analysis(
            &goal,
            &library,
            &cand,
            &[],
            false,
            false,
            &w,
            &search_opts(),
            &opts(),
        )
        .unwrap();
        assert!(matches!(out, AnalysisOutcome::RepairResult { .. }));
    }

    #[test]
    fn low_similarity_with_extra_libs_routes_to_search() {
        let w = plain_world();
        let goal = contract("true", "G F ta & G F tb");
        let library = lib("L", vec![comp("OnlyB", "G F tb")]);
        let cand = candidate_for(&goal, &library, &w);
        assert_eq!(cand.similarity, 50.0);
        let extra = lib("D2", vec![comp("TheRest", "G F ta")]);
        let out = refinement_analysis(
            &goal,
            &library,
            &cand,
            &[&extra],
            false,
            false,
            &w,
            &search_opts(),
            &opts(),
        )
        .unwrap();
        match out {
            AnalysisOutcome::SearchResult {
                found, completed, ..
            } => {
                assert_eq!(found.unwrap().library, "D2");
                assert!(completed.is_some());
            }
            other => panic!("expected search result, got {other:?}"),
        }
    }

    #[test]
    fn low_similarity_without_extra_libs_fails() {
        let w = plain_world();
        let goal = contract("true", "G F ta & G F tb");
        let library = lib("L", vec![comp("OnlyB", "G F tb")]);
        let cand = candidate_for(&goal, &library, &w);
        let out = refinement_analysis(
            &goal,
            &library,
            &cand,
            &[],
            false,
            false,
            &w,
            &search_opts(),
            &opts(),
        )
        .unwrap();
        assert!(matches!(out, AnalysisOutcome::Failed { similarity, .. } if similarity == 50.0));
    }

    #[test]
    fn forced_repair_overrides_search_routing() {
        let w = plain_world();
        let goal = contract("true", "G F ta & G F tb");
        let library = lib("L", vec![comp("OnlyB", "G F tb")]);
        let cand = candidate_for(&goal, &library, &w);
        let extra = lib("D2", vec![comp("TheRest", "G F ta")]);
        let out = refinement_analysis(
            &goal,
            &library,
            &cand,
            &[&extra],
            true,
            false,
            &w,
            &search_opts(),
            &opts(),
        )
        .unwrap();
        assert!(matches!(out, AnalysisOutcome::RepairResult { .. }));
    }

    #[test]
    fn forced_search_overrides_repair_threshold() {
        let w = plain_world();
        let goal = contract("true", "G F ta & G F tb");
        let library = lib("L", vec![comp("Both", "F ta & F tb")]);
        let cand = candidate_for(&goal, &library, &w);
        assert_eq!(cand.similarity, 100.0);
        let extra = lib("D2", vec![comp("Q", "G F ta & G F tb")]);
        let out = refinement_analysis(
            &goal,
            &library,
            &cand,
            &[&extra],
            false,
            true,
            &w,
            &search_opts(),
            &opts(),
        )
        .unwrap();
        assert!(matches!(out, AnalysisOutcome::SearchResult { .. }));
    }

    #[test]
    fn forced_search_without_extra_libs_falls_through_to_repair() {
        let w = plain_world();
        let goal = contract("true", "G F ta & G F tb");
        let library = lib("L", vec![comp("Both", "F ta & F tb")]);
        let cand = candidate_for(&goal, &library, &w);
        let out = refinement_analysis(
            &goal,
            &library,
            &cand,
            &[],
            false,
            true,
            &w,
            &search_opts(),
            &opts(),
        )
        .unwrap();
        assert!(matches!(out, AnalysisOutcome::RepairResult { .. }));
    }

    #[test]
    fn both_force_flags_rejected() {
        let w = plain_world();
        let goal = contract("true", "G F ta");
        let library = lib("L", vec![comp("A", "F ta")]);
        let cand = candidate_for(&goal, &library, &w);
        let err = refinement_analysis(
            &goal,
            &library,
            &cand,
            &[],
            true,
            true,
            &w,
            &search_opts(),
            &opts(),
        )
        .unwrap_err();
        assert!(matches!(err, EngineError::BothForceFlags));
    }

    #[test]
    fn mismatched_candidate_rejected() {
        let w = plain_world();
        let goal = contract("true", "G F ta");
        let library = lib("L", vec![comp("A", "F ta")]);
        let other_lib = lib("M", vec![comp("B", "F tb")]);
        let cand = candidate_for(&goal, &other_lib, &w);
        let err = refinement_analysis(
            &goal,
            &library,
            &cand,
            &[],
            false,
            false,
            &w,
            &search_opts(),
            &opts(),
        )
        .unwrap_err();
        assert!(matches!(err, EngineError::CandidateMismatch));
    }

    #[test]
    fn search_returns_quotient_when_nothing_refines() {
        let w = plain_world();
        let goal = contract("true", "G F ta & G F tb");
        let library = lib("L", vec![comp("OnlyB", "G F tb")]);
        let cand = candidate_for(&goal, &library, &w);
        let junk = lib("D2", vec![comp("Junk", "F tc")]);
        let out = search_procedure(&cand, &goal, &[&junk], &w, &search_opts(), &opts()).unwrap();
        match out {
            AnalysisOutcome::SearchResult {
                quotient,
                found,
                completed,
            } => {
                assert!(found.is_none());
                assert!(completed.is_none());
                // The quotient's assumptions inherit the part's guarantees.
                assert!(quotient.is_saturated());
            }
            other => panic!("expected search result, got {other:?}"),
        }
        // No libraries at all: the quotient itself is the deliverable.
        let out = search_procedure(&cand, &goal, &[], &w, &search_opts(), &opts()).unwrap();
        assert!(matches!(
            out,
            AnalysisOutcome::SearchResult {
                found: None,
                completed: None,
                ..
            }
        ));
    }

    #[test]
    fn search_succeeds_with_component_equal_to_quotient() {
        let w = plain_world();
        let goal = contract("true", "G F ta & G F tb");
        let library = lib("L", vec![comp("OnlyB", "G F tb")]);
        let cand = candidate_for(&goal, &library, &w);
        let q = quotient(&goal, &cand.composed);
        let exact = ComponentLibrary::new(
            "Exact",
            vec![Component {
                name: "Quotient".into(),
                contract: q,
                impl_ref: None,
            }],
        )
        .unwrap();
        let out = search_procedure(&cand, &goal, &[&exact], &w, &search_opts(), &opts()).unwrap();
        match out {
            AnalysisOutcome::SearchResult { completed, .. } => assert!(completed.is_some()),
            other => panic!("expected search result, got {other:?}"),
        }
    }

    #[test]
    fn repair_patches_delayed_greeting() {
        let w = store_world();
        let c2 = contract("G F s", "G F s -> G (s -> g)");
        let library = lib("Actions", vec![comp("DelayedGreet", "G (s -> X g)")]);
        let cand = candidate_for(&c2, &library, &w);
        assert_eq!(cand.similarity, 100.0);
        let out = refinement_analysis(
            &c2,
            &library,
            &cand,
            &[],
            true,
            false,
            &w,
            &search_opts(),
            &opts(),
        )
        .unwrap();
        match out {
            AnalysisOutcome::RepairResult {
                separation,
                repaired,
            } => {
                assert!(refines(&cand.composed, &repaired, Some(&w), &opts()).unwrap());
                assert!(separation.is_saturated());
            }
            other => panic!("expected repair result, got {other:?}"),
        }
    }

    #[test]
    fn repair_rejects_already_refining_candidate() {
        let w = plain_world();
        let goal = contract("true", "F ta");
        let library = lib("L", vec![comp("Stronger", "G F ta")]);
        let cand = candidate_for(&goal, &library, &w);
        let err = repair_procedure(&cand, &goal, &w, &opts()).unwrap_err();
        assert!(matches!(err, EngineError::NothingToFix));
    }

    #[test]
    fn analysis_is_deterministic() {
        let w = plain_world();
        let goal = contract("true", "G F ta & G F tb");
        let library = lib("L", vec![comp("OnlyB", "G F tb")]);
        let cand = candidate_for(&goal, &library, &w);
        let extra = lib("D2", vec![comp("TheRest", "G F ta")]);
        for _ in 0..2 {
            let out = refinement_analysis(
                &goal,
                &library,
                &cand,
                &[&extra],
                false,
                false,
                &w,
                &search_opts(),
                &opts(),
            )
            .unwrap();
            assert!(matches!(out, AnalysisOutcome::SearchResult { .. }));
        }
    }

    #[test]
    fn seeded_tie_break_flag_reaches_search() {
        let w = plain_world();
        let goal = contract("true", "G F ta & G F tb");
        let library = lib("L", vec![comp("OnlyB", "G F tb")]);
        let cand = candidate_for(&goal, &library, &w);
        let extra = lib("D2", vec![comp("TheRest", "G F ta")]);
        let seeded = SearchOptions {
            tie_break: TieBreak::Seeded(42),
            ..Default::default()
        };
        let out = refinement_analysis(
            &goal,
            &library,
            &cand,
            &[&extra],
            false,
            false,
            &w,
            &seeded,
            &opts(),
        )
        .unwrap();
        assert!(matches!(out, AnalysisOutcome::SearchResult { .. }));
    }

    #[test]
    fn store_search_completes_the_ordered_patrol() {
        // The full store walkthrough: the best candidate patrols both
        // locations but not in order; the strict-order contract from the
        // second library refines the quotient, and composing the two yields
        // a refinement of the ordered-patrol goal.
        let w = store_world();
        let c1 = Contract::new(
            parse("true").unwrap(),
            crate::patterns::expand_call("OrderedPatrolling", &[Ap::new("lf"), Ap::new("lb")])
                .unwrap(),
        );
        let delta = lib(
            "Delta",
            vec![
                comp("L1", "G F l5"),
                comp("L2", "G F l3"),
                comp("L3", "F l3 & F l1"),
                comp("L4", "F l5"),
            ],
        );
        let strict = crate::patterns::expand_call(
            "StrictOrderedPatrolling",
            &[Ap::new("l3"), Ap::new("l5")],
        )
        .unwrap();
        let delta_prime = ComponentLibrary::new(
            "DeltaPrime",
            vec![Component {
                name: "StrictOrder".into(),
                contract: Contract::new(parse("true").unwrap(), strict),
                impl_ref: None,
            }],
        )
        .unwrap();

        let cand = candidate_for(&c1, &delta, &w);
        assert_eq!(cand.selection, vec!["L1".to_string(), "L2".to_string()]);

        let strict_contract = &delta_prime.components()[0].contract;
        let q = quotient(&c1, &cand.composed);
        assert!(refines(strict_contract, &q, Some(&w), &opts()).unwrap());
        assert!(!refines(strict_contract, &c1, Some(&w), &opts()).unwrap());
        assert!(!refines(&cand.composed, &c1, Some(&w), &opts()).unwrap());

        let out = refinement_analysis(
            &c1,
            &delta,
            &cand,
            &[&delta_prime],
            false,
            true,
            &w,
            &search_opts(),
            &opts(),
        )
        .unwrap();
        match out {
            AnalysisOutcome::SearchResult {
                found, completed, ..
            } => {
                assert_eq!(
                    found.unwrap().candidate.selection,
                    vec!["StrictOrder".to_string()]
                );
                let l_star = completed.expect("search completes the refinement");
                assert!(refines(&l_star, &c1, Some(&w), &opts()).unwrap());
            }
            other => panic!("expected search result, got {other:?}"),
        }
    }

    #[test]
    fn unconfigured_adapter_is_a_tool_error() {
        let w = store_world();
        let c = contract("true", "G F l1");
        let verdict = check_realizability(&c, &w, None, &[], &[Ap::new("l1")]);
        assert_eq!(
            verdict,
            RealizabilityVerdict::ToolError("no adapter configured".into())
        );
    }

    #[test]
    fn false_guarantee_is_unrealizable_without_a_tool() {
        let w = store_world();
        let c = Contract::from_saturated_parts(parse("true").unwrap(), Formula::False);
        let verdict = check_realizability(&c, &w, None, &[], &[]);
        assert_eq!(verdict, RealizabilityVerdict::Unrealizable);
    }

    #[test]
    fn realizability_formula_includes_the_grounded_context() {
        // Patrolling l1 and l3 on the concrete map: mutex plus the
        // per-location successor constraints, conjoined with the guarantee.
        let w = store_world();
        let c = contract("true", "G F l1 & G F l3");
        let f = print(&realizability_formula(&c, &w));
        assert!(f.contains("G (l1 -> !l3)"));
        assert!(f.contains("G (l3 -> !l1)"));
        assert!(f.contains("G (l1 -> X (l1 | l2 | l3))"));
        assert!(f.contains("G (l3 -> X (l3 | l1 | l4 | l5))"));
        assert!(f.contains("G (F l1)"));
        assert!(f.contains("G (F l3)"));
    }

    #[test]
    fn verdict_parsing_prefers_the_longer_keyword() {
        assert_eq!(
            parse_verdict("result: UNREALIZABLE\n"),
            Some(RealizabilityVerdict::Unrealizable)
        );
        assert_eq!(
            parse_verdict("this is REALIZABLE indeed"),
            Some(RealizabilityVerdict::Realizable)
        );
        assert_eq!(parse_verdict("nothing to see"), None);
    }

    #[test]
    fn adapter_runs_a_real_command() {
        let w = store_world();
        let c = contract("true", "G F l1");
        let adapter = ExternalSynthConfig::new("cat {input}");
        // `cat` echoes the input file, which contains no verdict.
        let verdict = check_realizability(&c, &w, Some(&adapter), &[], &[Ap::new("l1")]);
        assert!(
            matches!(verdict, RealizabilityVerdict::ToolError(msg) if msg.contains("no REALIZABLE"))
        );
    }

    #[test]
    fn adapter_reads_realizable_from_stdout() {
        let w = store_world();
        let c = contract("true", "G F l1");
        let adapter = ExternalSynthConfig::new("echo REALIZABLE");
        let verdict = check_realizability(&c, &w, Some(&adapter), &[], &[Ap::new("l1")]);
        assert_eq!(verdict, RealizabilityVerdict::Realizable);
    }

    #[test]
    fn missing_tool_is_a_tool_error() {
        let w = store_world();
        let c = contract("true", "G F l1");
        let adapter = ExternalSynthConfig::new("definitely-not-a-tool {input}");
        let verdict = check_realizability(&c, &w, Some(&adapter), &[], &[Ap::new("l1")]);
        assert!(matches!(verdict, RealizabilityVerdict::ToolError(_)));
    }
}
