//! Minimal Mealy machines for pre-implemented components: a line-oriented
//! file format and exact simulation on input lassos.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use thiserror::Error;

use crate::ltl::{Ap, LassoTrace};

#[derive(Clone, PartialEq, Eq, Debug, Error)]
pub enum MachineError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("missing '{0}:' section")]
    MissingSection(&'static str),
    #[error("machine is not total: state '{state}' lacks a transition for {assignment}")]
    NotTotal { state: String, assignment: String },
    #[error("duplicate transition from '{state}' under {assignment}")]
    DuplicateTransition { state: String, assignment: String },
    #[error("input trace must be over exactly the machine inputs")]
    InputMismatch,
    #[error("machine has {0} inputs, at most 16 are supported")]
    TooManyInputs(usize),
}

/// Deterministic, total Mealy machine: δ : S × 2^I -> S × 2^O.
#[derive(Clone, Debug)]
pub struct MealyMachine {
    states: Vec<String>,
    initial: usize,
    inputs: Vec<Ap>,
    outputs: Vec<Ap>,
    transitions: HashMap<(usize, u64), (usize, u64)>,
}

impl MealyMachine {
    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn inputs(&self) -> &[Ap] {
        &self.inputs
    }

    pub fn outputs(&self) -> &[Ap] {
        &self.outputs
    }

    /// Parses the line-oriented machine format:
    ///
    /// ```text
    /// states: s0 s1
    /// initial: s0
    /// inputs: s
    /// outputs: g
    /// trans: s0 s=1 -> s1 g=0
    /// ```
    ///
    /// Assignments are comma-separated `ap=0|1` items and may be empty when
    /// the corresponding alphabet is empty. Totality and determinism are
    /// checked.
    pub fn parse(text: &str) -> Result<Self, MachineError> {
        let mut states: Option<Vec<String>> = None;
        let mut initial: Option<String> = None;
        let mut inputs: Option<Vec<Ap>> = None;
        let mut outputs: Option<Vec<Ap>> = None;
        let mut trans_lines: Vec<(usize, String)> = Vec::new();

        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |message: String| MachineError::Parse {
                line: line_no,
                message,
            };
            if let Some(rest) = line.strip_prefix("states:") {
                states = Some(rest.split_whitespace().map(String::from).collect());
            } else if let Some(rest) = line.strip_prefix("initial:") {
                initial = Some(rest.trim().to_string());
            } else if let Some(rest) = line.strip_prefix("inputs:") {
                inputs = Some(rest.split_whitespace().map(Ap::new).collect());
            } else if let Some(rest) = line.strip_prefix("outputs:") {
                outputs = Some(rest.split_whitespace().map(Ap::new).collect());
            } else if let Some(rest) = line.strip_prefix("trans:") {
                trans_lines.push((line_no, rest.to_string()));
            } else {
                return Err(err(format!("unrecognized line '{line}'")));
            }
        }

        let states = states.ok_or(MachineError::MissingSection("states"))?;
        let initial_name = initial.ok_or(MachineError::MissingSection("initial"))?;
        let inputs = inputs.ok_or(MachineError::MissingSection("inputs"))?;
        let outputs = outputs.ok_or(MachineError::MissingSection("outputs"))?;
        if inputs.len() > 16 {
            return Err(MachineError::TooManyInputs(inputs.len()));
        }
        let state_index: HashMap<&str, usize> = states
            .iter()
            .enumerate()
            .map(|(i, s)| (s.as_str(), i))
            .collect();
        let initial = *state_index
            .get(initial_name.as_str())
            .ok_or(MachineError::Parse {
                line: 0,
                message: format!("initial state '{initial_name}' is not declared"),
            })?;

        let mut transitions = HashMap::new();
        for (line, body) in trans_lines {
            let err = |message: String| MachineError::Parse { line, message };
            let (lhs, rhs) = body
                .split_once("->")
                .ok_or_else(|| err("transition needs '->'".into()))?;
            let mut lhs_tokens = lhs.split_whitespace();
            let src = lhs_tokens
                .next()
                .ok_or_else(|| err("missing source state".into()))?;
            let src = *state_index
                .get(src)
                .ok_or_else(|| err(format!("unknown state '{src}'")))?;
            let in_mask =
                parse_assignment(lhs_tokens.next().unwrap_or(""), &inputs).map_err(&err)?;
            if lhs_tokens.next().is_some() {
                return Err(err("unexpected tokens before '->'".into()));
            }
            let mut rhs_tokens = rhs.split_whitespace();
            let dst = rhs_tokens
                .next()
                .ok_or_else(|| err("missing target state".into()))?;
            let dst = *state_index
                .get(dst)
                .ok_or_else(|| err(format!("unknown state '{dst}'")))?;
            let out_mask =
                parse_assignment(rhs_tokens.next().unwrap_or(""), &outputs).map_err(&err)?;
            if rhs_tokens.next().is_some() {
                return Err(err("unexpected tokens after output assignment".into()));
            }
            if transitions
                .insert((src, in_mask), (dst, out_mask))
                .is_some()
            {
                return Err(MachineError::DuplicateTransition {
                    state: states[src].clone(),
                    assignment: render_assignment(in_mask, &inputs),
                });
            }
        }

        // Totality over the full input alphabet.
        for (s, name) in states.iter().enumerate() {
            for mask in 0..(1u64 << inputs.len()) {
                if !transitions.contains_key(&(s, mask)) {
                    return Err(MachineError::NotTotal {
                        state: name.clone(),
                        assignment: render_assignment(mask, &inputs),
                    });
                }
            }
        }

        Ok(MealyMachine {
            states,
            initial,
            inputs,
            outputs,
            transitions,
        })
    }

    /// Runs the machine on an input lasso and returns the combined
    /// input/output lasso. The run closes into a loop as soon as a
    /// (machine state, input position) pair repeats.
    pub fn simulate(&self, input: &LassoTrace) -> Result<LassoTrace, MachineError> {
        let declared: BTreeSet<Ap> = input.aps().cloned().collect();
        let expected: BTreeSet<Ap> = self.inputs.iter().cloned().collect();
        if declared != expected {
            return Err(MachineError::InputMismatch);
        }

        let norm = |pos: usize| {
            if pos < input.prefix_len() {
                pos
            } else {
                input.prefix_len() + (pos - input.prefix_len()) % input.cycle_len()
            }
        };

        let mut seen: HashMap<(usize, usize), usize> = HashMap::new();
        let mut steps: Vec<BTreeMap<Ap, bool>> = Vec::new();
        let mut state = self.initial;
        let mut pos = 0;
        let loop_start = loop {
            let key = (state, norm(pos));
            if let Some(&k) = seen.get(&key) {
                break k;
            }
            seen.insert(key, steps.len());
            let assignment = input.state(norm(pos));
            let mut in_mask = 0u64;
            for (bit, ap) in self.inputs.iter().enumerate() {
                if assignment[ap] {
                    in_mask |= 1 << bit;
                }
            }
            let &(next_state, out_mask) =
                self.transitions
                    .get(&(state, in_mask))
                    .ok_or(MachineError::NotTotal {
                        state: self.states[state].clone(),
                        assignment: render_assignment(in_mask, &self.inputs),
                    })?;
            let mut combined = assignment;
            for (bit, ap) in self.outputs.iter().enumerate() {
                combined.insert(ap.clone(), out_mask >> bit & 1 == 1);
            }
            steps.push(combined);
            state = next_state;
            pos += 1;
        };

        let aps: BTreeSet<Ap> = self.inputs.iter().chain(&self.outputs).cloned().collect();
        let cycle = steps.split_off(loop_start);
        Ok(LassoTrace::new(aps, steps, cycle).expect("loop is non-empty by construction"))
    }
}

fn parse_assignment(text: &str, aps: &[Ap]) -> Result<u64, String> {
    let mut mask = 0u64;
    let mut seen = BTreeSet::new();
    if !text.is_empty() {
        for item in text.split(',') {
            let (name, value) = item
                .split_once('=')
                .ok_or_else(|| format!("bad assignment item '{item}'"))?;
            let bit = aps
                .iter()
                .position(|a| a.name() == name)
                .ok_or_else(|| format!("unknown proposition '{name}'"))?;
            if !seen.insert(bit) {
                return Err(format!("'{name}' assigned twice"));
            }
            match value {
                "0" => {}
                "1" => mask |= 1 << bit,
                other => return Err(format!("value of '{name}' must be 0 or 1, got '{other}'")),
            }
        }
    }
    if seen.len() != aps.len() {
        let missing: Vec<&str> = aps
            .iter()
            .enumerate()
            .filter(|(i, _)| !seen.contains(i))
            .map(|(_, a)| a.name())
            .collect();
        return Err(format!("assignment misses {}", missing.join(", ")));
    }
    Ok(mask)
}

fn render_assignment(mask: u64, aps: &[Ap]) -> String {
    if aps.is_empty() {
        return "<empty>".to_string();
    }
    aps.iter()
        .enumerate()
        .map(|(bit, ap)| format!("{}={}", ap.name(), mask >> bit & 1))
        .collect::<Vec<_>>()
        .join(",")
}
