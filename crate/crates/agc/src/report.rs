//! Machine- and human-readable command reports. The JSON schema is stable:
//! every report carries `command`, `status`, `exit_code`, `verdicts`,
//! `scores`, `contracts`, `formulas`, `selections`, `notes` and `warnings`.
//! Formulas are rendered in the input grammar and re-parse.

use std::collections::BTreeMap;
use std::fmt::Write;

use serde::{Deserialize, Serialize};

use crate::contract::Contract;

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct ContractRepr {
    pub assumptions: String,
    pub guarantees: String,
}

impl From<&Contract> for ContractRepr {
    fn from(c: &Contract) -> Self {
        ContractRepr {
            assumptions: c.display_assumptions(),
            guarantees: c.display_guarantees(),
        }
    }
}

#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub status: String,
    pub exit_code: i32,
    pub verdicts: BTreeMap<String, bool>,
    pub scores: BTreeMap<String, f64>,
    pub contracts: BTreeMap<String, ContractRepr>,
    pub formulas: BTreeMap<String, String>,
    pub selections: BTreeMap<String, Vec<String>>,
    pub notes: Vec<String>,
    pub warnings: Vec<String>,
}

impl Report {
    pub fn new(command: impl Into<String>, status: impl Into<String>, exit_code: i32) -> Self {
        Report {
            command: command.into(),
            status: status.into(),
            exit_code,
            verdicts: BTreeMap::new(),
            scores: BTreeMap::new(),
            contracts: BTreeMap::new(),
            formulas: BTreeMap::new(),
            selections: BTreeMap::new(),
            notes: Vec::new(),
            warnings: Vec::new(),
        }
    }

    pub fn with_contract(mut self, key: &str, c: &Contract) -> Self {
        self.contracts
            .insert(key.to_string(), ContractRepr::from(c));
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization is infallible")
    }

    pub fn render_human(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{}: {}", self.command, self.status);
        for (name, value) in &self.verdicts {
            let _ = writeln!(out, "  {name}: {}", if *value { "yes" } else { "no" });
        }
        for (name, value) in &self.scores {
            let _ = writeln!(out, "  {name}: {value}%");
        }
        for (name, selection) in &self.selections {
            let _ = writeln!(out, "  {name}: {{{}}}", selection.join(", "));
        }
        for (name, c) in &self.contracts {
            let _ = writeln!(out, "  {name}:");
            let _ = writeln!(out, "    assumptions: {}", c.assumptions);
            let _ = writeln!(out, "    guarantees:  {}", c.guarantees);
        }
        for (name, f) in &self.formulas {
            let _ = writeln!(out, "  {name}: {f}");
        }
        for note in &self.notes {
            let _ = writeln!(out, "  note: {note}");
        }
        for warning in &self.warnings {
            let _ = writeln!(out, "  warning: {warning}");
        }
        out
    }
}
