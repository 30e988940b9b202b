//! CLI integration: exit codes, report shapes, the machine-conformance
//! check for bundled implementations, and the external-tool adapter.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::process::Command;

use agc::ltl::{evaluate_on_lasso, LassoTrace};
use agc::machine::MealyMachine;
use agc::mission::MissionFile;
use agc::sat::SatOptions;
use agc::Ap;

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_agc")
}

fn mission() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../missions/store.mission")
}

fn run(args: &[&str]) -> (Option<i32>, String, String) {
    let out = Command::new(bin())
        .arg("--mission")
        .arg(mission())
        .args(args)
        .output()
        .expect("binary runs");
    (
        out.status.code(),
        String::from_utf8_lossy(&out.stdout).to_string(),
        String::from_utf8_lossy(&out.stderr).to_string(),
    )
}

#[test]
fn refines_is_reflexive_with_exit_zero() {
    let (code, stdout, _) = run(&["refines", "C1", "C1"]);
    assert_eq!(code, Some(0), "{stdout}");
    assert!(stdout.contains("holds"));
}

#[test]
fn non_refinement_exits_one() {
    let (code, stdout, _) = run(&["refines", "C2", "C1"]);
    assert_eq!(code, Some(1), "{stdout}");
    assert!(stdout.contains("does-not-hold"));
}

#[test]
fn missing_mission_is_a_usage_error() {
    let out = Command::new(bin())
        .env_remove("AGC_MISSION")
        .args(["check", "C1"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unknown_contract_is_a_usage_error() {
    let (code, stdout, _) = run(&["check", "Nope"]);
    assert_eq!(code, Some(2), "{stdout}");
    assert!(stdout.contains("unknown contract"));
}

#[test]
fn unknown_subcommand_is_a_usage_error() {
    let out = Command::new(bin()).args(["frobnicate"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn check_reports_well_formedness() {
    let (code, stdout, _) = run(&["check", "C1"]);
    assert_eq!(code, Some(0), "{stdout}");
    assert!(stdout.contains("well-formed"));
    assert!(stdout.contains("compatible: yes"));
    assert!(stdout.contains("consistent: yes"));
}

#[test]
fn check_dump_automata_prints_states() {
    let (code, stdout, _) = run(&["check", "C2", "--dump-automata"]);
    assert_eq!(code, Some(0));
    assert!(stdout.contains("state 0"));
    assert!(stdout.contains("aps:"));
}

#[test]
fn compose_prints_the_result_contract() {
    let (code, stdout, _) = run(&["compose", "C1", "C2"]);
    assert_eq!(code, Some(0));
    assert!(stdout.contains("result"));
    assert!(stdout.contains("guarantees"));
}

#[test]
fn quotient_merge_separate_run() {
    for cmd in ["quotient", "merge", "separate"] {
        let (code, stdout, _) = run(&[cmd, "C1", "C2"]);
        assert_eq!(code, Some(0), "{cmd}: {stdout}");
        assert!(stdout.contains("computed"));
    }
}

#[test]
fn expand_prints_pattern_formula() {
    let out = Command::new(bin())
        .args(["expand", "OrderedPatrolling(lf, lb)"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("!lb U lf"));

    let out = Command::new(bin())
        .args(["expand", "InfOften(a, b)"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn score_reports_similarity_and_refinement() {
    let (code, stdout, _) = run(&["score", "C1", "Delta"]);
    assert_eq!(code, Some(0));
    assert!(stdout.contains("similarity: 100%"));
    assert!(stdout.contains("refinement(L1)"));
}

#[test]
fn seeded_candidate_is_reproducible() {
    let (_, first, _) = run(&["--seed", "11", "candidate", "C1", "Delta"]);
    let (_, second, _) = run(&["--seed", "11", "candidate", "C1", "Delta"]);
    assert_eq!(first, second);
}

#[test]
fn analyze_without_strategy_falls_back_to_failed() {
    // C1 has full similarity, so the default routing repairs; with an
    // unknown extra library the command must fail cleanly instead.
    let (code, stdout, _) = run(&["analyze", "C1", "Delta", "--extra-lib", "Nope"]);
    assert_eq!(code, Some(2), "{stdout}");
    assert!(stdout.contains("unknown library"));
}

#[test]
fn analyze_rejects_both_force_flags() {
    let (code, stdout, _) = run(&["analyze", "C1", "Delta", "--repair", "--search"]);
    assert_eq!(code, Some(2), "{stdout}");
}

#[test]
fn realizable_without_adapter_is_a_tool_error() {
    let (code, stdout, _) = run(&["realizable", "C2"]);
    assert_eq!(code, Some(3), "{stdout}");
    assert!(stdout.contains("tool-error"));
    assert!(stdout.contains("no adapter configured"));
}

#[test]
fn realizable_with_stub_adapter() {
    let (code, stdout, _) = run(&["--adapter-cmd", "echo REALIZABLE", "realizable", "C2"]);
    assert_eq!(code, Some(0), "{stdout}");
    assert!(stdout.contains("realizable"));

    let (code, stdout, _) = run(&["--adapter-cmd", "echo UNREALIZABLE", "realizable", "C2"]);
    assert_eq!(code, Some(1), "{stdout}");
    assert!(stdout.contains("unrealizable"));
}

#[test]
fn realizable_stub_receives_the_input_file() {
    // `grep -c FORMULA {input}` exits 0 and prints 1 when the input file has
    // the FORMULA line; no verdict appears, so this is a tool error.
    let (code, stdout, _) = run(&[
        "--adapter-cmd",
        "grep -c FORMULA {input}",
        "realizable",
        "C2",
    ]);
    assert_eq!(code, Some(3), "{stdout}");
    assert!(stdout.contains("no REALIZABLE"));
}

#[test]
fn json_reports_have_the_stable_shape() {
    let (code, stdout, _) = run(&["--json", "refines", "C1", "C1"]);
    assert_eq!(code, Some(0));
    let report: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    for key in [
        "command",
        "status",
        "exit_code",
        "verdicts",
        "scores",
        "contracts",
        "formulas",
        "selections",
        "notes",
        "warnings",
    ] {
        assert!(report.get(key).is_some(), "missing {key}");
    }
}

#[test]
fn env_variables_mirror_flags() {
    let out = Command::new(bin())
        .env("AGC_MISSION", mission())
        .env("AGC_JSON", "true")
        .args(["refines", "C1", "C1"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(serde_json::from_str::<serde_json::Value>(&stdout).is_ok());
}

// Bounded conformance of the bundled implementations: on a family of input
// lassos, each machine's combined trace satisfies its component's contract.
#[test]
fn bundled_machines_satisfy_their_contracts() {
    let mission = MissionFile::load(&mission(), &SatOptions::default()).unwrap();
    let mut checked = 0;
    for library in mission.libraries.values() {
        for component in library.components() {
            let Some(path) = &component.impl_ref else {
                continue;
            };
            let machine = MealyMachine::parse(&std::fs::read_to_string(path).unwrap()).unwrap();
            let spec = component
                .contract
                .assumptions()
                .clone()
                .implies(component.contract.guarantees().clone());
            for input in input_lassos(machine.inputs()) {
                let combined = machine.simulate(&input).unwrap();
                assert!(
                    evaluate_on_lasso(&spec, &combined, 0).unwrap(),
                    "machine for {}.{} violates its contract",
                    library.name,
                    component.name
                );
                checked += 1;
            }
        }
    }
    assert!(checked > 0, "no machine-backed components in the bundle");
}

fn input_lassos(inputs: &[Ap]) -> Vec<LassoTrace> {
    let aps: BTreeSet<Ap> = inputs.iter().cloned().collect();
    let assignments = |bits: u32| -> BTreeMap<Ap, bool> {
        inputs
            .iter()
            .enumerate()
            .map(|(i, ap)| (ap.clone(), bits >> i & 1 == 1))
            .collect()
    };
    let combos: Vec<BTreeMap<Ap, bool>> = (0..1u32 << inputs.len()).map(assignments).collect();
    let mut out = Vec::new();
    for first in &combos {
        for second in &combos {
            // Constant loops, alternating loops, and a prefixed variant.
            out.push(LassoTrace::new(aps.clone(), vec![], vec![first.clone()]).unwrap());
            out.push(
                LassoTrace::new(aps.clone(), vec![], vec![first.clone(), second.clone()]).unwrap(),
            );
            out.push(
                LassoTrace::new(aps.clone(), vec![first.clone()], vec![second.clone()]).unwrap(),
            );
        }
    }
    out
}
