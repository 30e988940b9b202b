//! Command-line frontend: mission loading, dispatch, exit codes.
//!
//! Exit codes: 0 affirmative/successful, 1 negative verdicts (not-refines,
//! analysis failed, unrealizable), 2 usage/load errors, 3 external-tool
//! errors.

use std::path::PathBuf;
use std::time::Duration;

use clap::{Parser, Subcommand};

use crate::contract::{
    compose, is_compatible, is_consistent, merge, quotient, refines, separate, AlgebraError,
    Contract,
};
use crate::engine::{
    check_realizability, refinement_analysis, AnalysisOutcome, EngineError, ExternalSynthConfig,
    RealizabilityVerdict,
};
use crate::library::{
    best_candidate_composition, refinement_score, similarity_score, LibraryError, SearchOptions,
    TieBreak,
};
use crate::ltl::{print, simplify, Ap};
use crate::mission::{MissionError, MissionFile};
use crate::patterns::{expand, PatternInstance, PatternName};
use crate::report::Report;
use crate::sat::{to_buchi, SatOptions};
use crate::world::TypeKind;

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_TOOL: i32 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "agc",
    version,
    about = "Assume-guarantee contract toolkit for LTL mission specifications"
)]
pub struct Cli {
    /// Mission file (world, contracts, libraries).
    #[arg(short, long, global = true, env = "AGC_MISSION")]
    pub mission: Option<PathBuf>,

    /// Emit the report as JSON.
    #[arg(long, global = true, env = "AGC_JSON")]
    pub json: bool,

    /// Maximum distinct atoms per satisfiability check.
    #[arg(long, global = true, env = "AGC_AP_CAP")]
    pub ap_cap: Option<usize>,

    /// Maximum component-subset size in the candidate search.
    #[arg(long, global = true, env = "AGC_SUBSET_CAP")]
    pub subset_cap: Option<usize>,

    /// Break candidate ties with a seeded random choice instead of the
    /// lexicographic default.
    #[arg(long, global = true, env = "AGC_SEED")]
    pub seed: Option<u64>,

    /// External synthesizer command template; `{input}` is replaced by the
    /// generated input file path.
    #[arg(long, global = true, env = "AGC_ADAPTER_CMD")]
    pub adapter_cmd: Option<String>,

    /// External tool timeout in seconds.
    #[arg(long, global = true, env = "AGC_TIMEOUT")]
    pub timeout: Option<u64>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Compatibility, consistency and well-formedness of a contract.
    Check {
        contract: String,
        /// Dump the Büchi automata built for the two checks (unstable format).
        #[arg(long)]
        dump_automata: bool,
    },
    /// Does the first contract refine the second?
    Refines { c1: String, c2: String },
    /// Contract composition (parallel assembly).
    Compose { c1: String, c2: String },
    /// Contract quotient: the missing part so that c2 completes c1.
    Quotient { c1: String, c2: String },
    /// Contract merging (viewpoint combination).
    Merge { c1: String, c2: String },
    /// Contract separation: the patch adjoint to merging.
    Separate { c1: String, c2: String },
    /// Best candidate composition from a library.
    Candidate { contract: String, library: String },
    /// Full refinement analysis: complete, search, repair or fail.
    Analyze {
        contract: String,
        library: String,
        /// Additional libraries searched for quotient refinements.
        #[arg(long = "extra-lib")]
        extra_libs: Vec<String>,
        /// Force the repair procedure.
        #[arg(long)]
        repair: bool,
        /// Force the search procedure.
        #[arg(long)]
        search: bool,
        /// Rank tied candidates by the lowest refinement score.
        #[arg(long)]
        prefer_least_refined: bool,
    },
    /// Expand a robotic pattern call, e.g. 'OrderedPatrolling(lf, lb)'.
    Expand { pattern: String },
    /// Similarity and refinement scores of a library against a contract.
    Score { contract: String, library: String },
    /// Realizability of a contract via the external synthesizer adapter.
    Realizable {
        contract: String,
        /// Input atoms (comma-separated); defaults to the contract's
        /// sensor-typed atoms.
        #[arg(long, value_delimiter = ',')]
        inputs: Vec<String>,
        /// Output atoms (comma-separated); defaults to the rest.
        #[arg(long, value_delimiter = ',')]
        outputs: Vec<String>,
    },
}

pub fn main_entry() -> i32 {
    run(Cli::parse())
}

pub fn run(cli: Cli) -> i32 {
    let report = match execute(&cli) {
        Ok(report) => report,
        Err(e) => e.into_report(),
    };
    if cli.json {
        println!("{}", report.to_json());
    } else {
        print!("{}", report.render_human());
    }
    report.exit_code
}

struct CliError {
    command: &'static str,
    exit_code: i32,
    message: String,
}

impl CliError {
    fn usage(command: &'static str, message: impl Into<String>) -> Self {
        CliError {
            command,
            exit_code: EXIT_USAGE,
            message: message.into(),
        }
    }

    fn into_report(self) -> Report {
        let mut r = Report::new(self.command, "error", self.exit_code);
        r.notes.push(self.message);
        r
    }
}

impl From<(&'static str, MissionError)> for CliError {
    fn from((command, e): (&'static str, MissionError)) -> Self {
        CliError::usage(command, e.to_string())
    }
}

fn sat_options(cli: &Cli) -> SatOptions {
    match cli.ap_cap {
        Some(cap) => SatOptions::with_ap_cap(cap),
        None => SatOptions::default(),
    }
}

fn search_options(cli: &Cli, prefer_least_refined: bool) -> SearchOptions {
    SearchOptions {
        subset_cap: cli.subset_cap.unwrap_or(4),
        prefer_least_refined,
        tie_break: match cli.seed {
            Some(seed) => TieBreak::Seeded(seed),
            None => TieBreak::Lexicographic,
        },
    }
}

fn load_mission(cli: &Cli, command: &'static str) -> Result<MissionFile, CliError> {
    let Some(path) = &cli.mission else {
        return Err(CliError::usage(
            command,
            "a mission file is required: pass --mission <path> or set AGC_MISSION",
        ));
    };
    MissionFile::load(path, &sat_options(cli)).map_err(|e| (command, e).into())
}

fn algebra_exit(e: &AlgebraError) -> i32 {
    match e {
        AlgebraError::PrecheckFailed { .. } => EXIT_USAGE,
        AlgebraError::Sat(_) => EXIT_USAGE,
    }
}

fn execute(cli: &Cli) -> Result<Report, CliError> {
    let sat = sat_options(cli);
    match &cli.command {
        Command::Check {
            contract,
            dump_automata,
        } => {
            let mission = load_mission(cli, "check")?;
            let c = mission
                .contract(contract)
                .map_err(|e| ("check", e).into_usage())?;
            if *dump_automata && !cli.json {
                dump_check_automata(c, &mission, &sat);
            }
            let compatible =
                is_compatible(c, Some(&mission.world), &sat).map_err(|e| CliError {
                    command: "check",
                    exit_code: algebra_exit(&e),
                    message: e.to_string(),
                })?;
            let consistent =
                is_consistent(c, Some(&mission.world), &sat).map_err(|e| CliError {
                    command: "check",
                    exit_code: algebra_exit(&e),
                    message: e.to_string(),
                })?;
            let well_formed = compatible && consistent;
            let status = if well_formed {
                "well-formed"
            } else {
                "ill-formed"
            };
            let mut r = Report::new(
                "check",
                status,
                if well_formed { EXIT_OK } else { EXIT_NEGATIVE },
            )
            .with_contract(contract, c);
            r.verdicts.insert("compatible".into(), compatible);
            r.verdicts.insert("consistent".into(), consistent);
            r.verdicts.insert("well_formed".into(), well_formed);
            r.warnings = mission.warnings.clone();
            Ok(r)
        }
        Command::Refines { c1, c2 } => {
            let mission = load_mission(cli, "refines")?;
            let first = mission
                .contract(c1)
                .map_err(|e| ("refines", e).into_usage())?;
            let second = mission
                .contract(c2)
                .map_err(|e| ("refines", e).into_usage())?;
            let holds =
                refines(first, second, Some(&mission.world), &sat).map_err(|e| CliError {
                    command: "refines",
                    exit_code: algebra_exit(&e),
                    message: e.to_string(),
                })?;
            let mut r = Report::new(
                "refines",
                if holds { "holds" } else { "does-not-hold" },
                if holds { EXIT_OK } else { EXIT_NEGATIVE },
            );
            r.verdicts.insert("refines".into(), holds);
            r.contracts.insert(c1.clone(), first.into());
            r.contracts.insert(c2.clone(), second.into());
            Ok(r)
        }
        Command::Compose { c1, c2 } => binary_op(cli, "compose", c1, c2, compose),
        Command::Quotient { c1, c2 } => binary_op(cli, "quotient", c1, c2, quotient),
        Command::Merge { c1, c2 } => binary_op(cli, "merge", c1, c2, merge),
        Command::Separate { c1, c2 } => binary_op(cli, "separate", c1, c2, separate),
        Command::Candidate { contract, library } => {
            let mission = load_mission(cli, "candidate")?;
            let c = mission
                .contract(contract)
                .map_err(|e| ("candidate", e).into_usage())?;
            let lib = mission
                .library(library)
                .map_err(|e| ("candidate", e).into_usage())?;
            let search = search_options(cli, false);
            match best_candidate_composition(c, lib, &mission.world, &search, &sat) {
                Ok(cand) => {
                    let mut r = Report::new("candidate", "found", EXIT_OK)
                        .with_contract("composed", &cand.composed);
                    r.selections
                        .insert("selection".into(), cand.selection.clone());
                    r.scores.insert("similarity".into(), cand.similarity);
                    r.scores
                        .insert("refinement_score".into(), cand.refinement_score);
                    Ok(r)
                }
                Err(LibraryError::NoComposableSubset) => Ok(Report::new(
                    "candidate",
                    "no-composable-subset",
                    EXIT_NEGATIVE,
                )),
                Err(e) => Err(CliError::usage("candidate", e.to_string())),
            }
        }
        Command::Analyze {
            contract,
            library,
            extra_libs,
            repair,
            search,
            prefer_least_refined,
        } => analyze(
            cli,
            contract,
            library,
            extra_libs,
            *repair,
            *search,
            *prefer_least_refined,
        ),
        Command::Expand { pattern } => {
            let instance =
                parse_pattern_call(pattern).map_err(|msg| CliError::usage("expand", msg))?;
            let formula = expand(&instance);
            let mut r = Report::new("expand", "expanded", EXIT_OK);
            r.formulas.insert(instance.to_string(), print(&formula));
            Ok(r)
        }
        Command::Score { contract, library } => {
            let mission = load_mission(cli, "score")?;
            let c = mission
                .contract(contract)
                .map_err(|e| ("score", e).into_usage())?;
            let lib = mission
                .library(library)
                .map_err(|e| ("score", e).into_usage())?;
            let similarity = similarity_score(c, lib.components(), &mission.world)
                .map_err(|e| CliError::usage("score", e.to_string()))?;
            let mut r = Report::new("score", "scored", EXIT_OK);
            r.scores.insert("similarity".into(), similarity);
            let pool = lib.contracts();
            for component in lib.components() {
                let score = refinement_score(&component.contract, &pool, &sat)
                    .map_err(|e| CliError::usage("score", e.to_string()))?;
                r.scores
                    .insert(format!("refinement({})", component.name), score);
            }
            Ok(r)
        }
        Command::Realizable {
            contract,
            inputs,
            outputs,
        } => {
            let mission = load_mission(cli, "realizable")?;
            let c = mission
                .contract(contract)
                .map_err(|e| ("realizable", e).into_usage())?;
            let (ins, outs) = partition_io(c, &mission, inputs, outputs);
            let adapter = cli.adapter_cmd.as_ref().map(|template| {
                let mut config = ExternalSynthConfig::new(template.clone());
                if let Some(secs) = cli.timeout {
                    config.timeout = Duration::from_secs(secs);
                }
                config
            });
            let verdict = check_realizability(c, &mission.world, adapter.as_ref(), &ins, &outs);
            let (status, exit) = match &verdict {
                RealizabilityVerdict::Realizable => ("realizable", EXIT_OK),
                RealizabilityVerdict::Unrealizable => ("unrealizable", EXIT_NEGATIVE),
                RealizabilityVerdict::ToolError(_) => ("tool-error", EXIT_TOOL),
            };
            let mut r = Report::new("realizable", status, exit).with_contract(contract, c);
            r.verdicts.insert(
                "realizable".into(),
                verdict == RealizabilityVerdict::Realizable,
            );
            if let RealizabilityVerdict::ToolError(msg) = verdict {
                r.notes.push(msg);
            }
            Ok(r)
        }
    }
}

trait IntoUsage {
    fn into_usage(self) -> CliError;
}

impl IntoUsage for (&'static str, MissionError) {
    fn into_usage(self) -> CliError {
        CliError::usage(self.0, self.1.to_string())
    }
}

fn binary_op(
    cli: &Cli,
    command: &'static str,
    c1: &str,
    c2: &str,
    op: fn(&Contract, &Contract) -> Contract,
) -> Result<Report, CliError> {
    let mission = load_mission(cli, command)?;
    let first = mission
        .contract(c1)
        .map_err(|e| CliError::usage(command, e.to_string()))?;
    let second = mission
        .contract(c2)
        .map_err(|e| CliError::usage(command, e.to_string()))?;
    let result = op(first, second);
    Ok(Report::new(command, "computed", EXIT_OK).with_contract("result", &result))
}

#[allow(clippy::too_many_arguments)]
fn analyze(
    cli: &Cli,
    contract: &str,
    library: &str,
    extra_lib_names: &[String],
    force_repair: bool,
    force_search: bool,
    prefer_least_refined: bool,
) -> Result<Report, CliError> {
    let sat = sat_options(cli);
    let mission = load_mission(cli, "analyze")?;
    let c = mission
        .contract(contract)
        .map_err(|e| ("analyze", e).into_usage())?;
    let lib = mission
        .library(library)
        .map_err(|e| ("analyze", e).into_usage())?;
    let mut extra_libs = Vec::new();
    for name in extra_lib_names {
        extra_libs.push(
            mission
                .library(name)
                .map_err(|e| ("analyze", e).into_usage())?,
        );
    }
    let search = search_options(cli, prefer_least_refined);

    let candidate = match best_candidate_composition(c, lib, &mission.world, &search, &sat) {
        Ok(cand) => cand,
        Err(LibraryError::NoComposableSubset) => {
            return Ok(Report::new(
                "analyze",
                "no-composable-subset",
                EXIT_NEGATIVE,
            ));
        }
        Err(e) => return Err(CliError::usage("analyze", e.to_string())),
    };

    let outcome = refinement_analysis(
        c,
        lib,
        &candidate,
        &extra_libs,
        force_repair,
        force_search,
        &mission.world,
        &search,
        &sat,
    )
    .map_err(|e| {
        let exit = match &e {
            EngineError::Algebra(err) => algebra_exit(err),
            _ => EXIT_USAGE,
        };
        CliError {
            command: "analyze",
            exit_code: exit,
            message: e.to_string(),
        }
    })?;

    let mut r = match outcome {
        AnalysisOutcome::Complete { candidate } => {
            let mut r = Report::new("analyze", "complete", EXIT_OK)
                .with_contract("candidate", &candidate.composed);
            r.selections.insert("selection".into(), candidate.selection);
            r.verdicts.insert(format!("refines {contract}"), true);
            r
        }
        AnalysisOutcome::Failed { similarity, note } => {
            let mut r = Report::new("analyze", "failed", EXIT_NEGATIVE);
            r.scores.insert("similarity".into(), similarity);
            if let Some(note) = note {
                r.notes.push(note);
            }
            r
        }
        AnalysisOutcome::SearchResult {
            quotient,
            found,
            completed,
        } => {
            let success = completed.is_some();
            let mut r = Report::new(
                "analyze",
                if success {
                    "search-complete"
                } else {
                    "search-quotient-only"
                },
                if success { EXIT_OK } else { EXIT_NEGATIVE },
            )
            .with_contract("quotient", &quotient);
            if let Some(found) = found {
                r.selections.insert(
                    format!("found in {}", found.library),
                    found.candidate.selection,
                );
                r = r.with_contract("found", &found.candidate.composed);
            } else {
                r.notes.push(
                    "no extra library refines the quotient; it can be delegated as the missing specification".into(),
                );
            }
            if let Some(completed) = completed {
                r = r.with_contract("completed", &completed);
                r.verdicts.insert(format!("refines {contract}"), true);
            }
            r
        }
        AnalysisOutcome::RepairResult {
            separation,
            repaired,
        } => {
            let mut r = Report::new("analyze", "repaired", EXIT_OK)
                .with_contract("separation", &separation)
                .with_contract("repaired", &repaired);
            r.verdicts.insert("candidate refines repaired".into(), true);
            r
        }
    };
    r.selections
        .entry("candidate".into())
        .or_insert_with(|| candidate.selection.clone());
    r.scores.insert("similarity".into(), candidate.similarity);
    r.scores
        .insert("refinement_score".into(), candidate.refinement_score);
    r.warnings = mission.warnings;
    Ok(r)
}

/// Pattern-call syntax: `Name(arg, arg, ...)`.
fn parse_pattern_call(text: &str) -> Result<PatternInstance, String> {
    let open = text.find('(').ok_or("expected 'Pattern(args)'")?;
    let close = text.rfind(')').ok_or("expected closing ')'")?;
    if close < open || !text[close + 1..].trim().is_empty() {
        return Err("expected 'Pattern(args)'".into());
    }
    let name: PatternName = text[..open].trim().parse().map_err(|e| format!("{e}"))?;
    let args: Vec<Ap> = text[open + 1..close]
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(Ap::new)
        .collect();
    PatternInstance::new(name, args).map_err(|e| e.to_string())
}

fn partition_io(
    c: &Contract,
    mission: &MissionFile,
    inputs: &[String],
    outputs: &[String],
) -> (Vec<Ap>, Vec<Ap>) {
    if !inputs.is_empty() || !outputs.is_empty() {
        return (
            inputs.iter().map(Ap::new).collect(),
            outputs.iter().map(Ap::new).collect(),
        );
    }
    let mut ins = Vec::new();
    let mut outs = Vec::new();
    for ap in c.atoms() {
        match mission.world.type_of_ap(&ap) {
            Some(t) if t.kind == TypeKind::Sensor => ins.push(ap),
            _ => outs.push(ap),
        }
    }
    (ins, outs)
}

fn dump_check_automata(c: &Contract, mission: &MissionFile, sat: &SatOptions) {
    for (side, formula) in [
        ("assumptions", c.assumptions()),
        ("guarantees", c.guarantees()),
    ] {
        let aps = formula.atoms();
        let grounded = formula
            .clone()
            .and(mission.world.mtx(&aps))
            .and(mission.world.adj(&aps));
        println!("# automaton for {side}: {}", print(&simplify(&grounded)));
        match to_buchi(&grounded, sat) {
            Ok(gba) => print!("{}", gba.dump()),
            Err(e) => println!("# translation failed: {e}"),
        }
    }
}
