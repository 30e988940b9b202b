//! Mission files: the world block, named contracts and component libraries,
//! parsed, validated and saturated in one load step.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::contract::{is_compatible, is_consistent, AlgebraError, Contract};
use crate::library::{Component, ComponentLibrary, LibraryError};
use crate::ltl::lexer::{tokenize, Pos, Tok};
use crate::ltl::{parse_with_calls_tokens, Formula, ParseError};
use crate::machine::{MachineError, MealyMachine};
use crate::patterns::expand_call;
use crate::sat::SatOptions;
use crate::world::{TypeKind, Violation, WorldError, WorldModel};

#[derive(Debug, Error)]
pub enum MissionError {
    #[error("cannot read '{path}': {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("{line}:{col}: {source}")]
    World {
        line: u32,
        col: u32,
        source: WorldError,
    },
    #[error("world model is invalid:\n{}", render_violations(.0))]
    Validation(Vec<Violation>),
    #[error("duplicate {category} '{name}'")]
    DuplicateName {
        category: &'static str,
        name: String,
    },
    #[error(transparent)]
    Library(#[from] LibraryError),
    #[error("component '{component}': machine file '{path}': {source}")]
    Machine {
        component: String,
        path: PathBuf,
        source: MachineError,
    },
    #[error("component '{library}.{component}' is {defect} under the world context")]
    ComponentIllFormed {
        library: String,
        component: String,
        defect: &'static str,
    },
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("unknown contract '{0}'")]
    UnknownContract(String),
    #[error("unknown library '{0}'")]
    UnknownLibrary(String),
}

fn render_violations(violations: &[Violation]) -> String {
    violations
        .iter()
        .map(|v| format!("  - {v}"))
        .collect::<Vec<_>>()
        .join("\n")
}

/// A fully validated mission: world model, saturated contracts, libraries
/// with parsed machine references, and the warnings produced on load.
#[derive(Debug)]
pub struct MissionFile {
    pub world: WorldModel,
    pub contracts: BTreeMap<String, Contract>,
    pub libraries: BTreeMap<String, ComponentLibrary>,
    pub warnings: Vec<String>,
}

impl MissionFile {
    pub fn load(path: &Path, sat: &SatOptions) -> Result<Self, MissionError> {
        let text = std::fs::read_to_string(path).map_err(|source| MissionError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        Self::parse_str(&text, base, sat)
    }

    pub fn parse_str(text: &str, base_dir: &Path, sat: &SatOptions) -> Result<Self, MissionError> {
        let staged = StagedMission::parse(text)?;
        staged.finish(base_dir, sat)
    }

    pub fn contract(&self, name: &str) -> Result<&Contract, MissionError> {
        self.contracts
            .get(name)
            .ok_or_else(|| MissionError::UnknownContract(name.to_string()))
    }

    pub fn library(&self, name: &str) -> Result<&ComponentLibrary, MissionError> {
        self.libraries
            .get(name)
            .ok_or_else(|| MissionError::UnknownLibrary(name.to_string()))
    }
}

struct RawComponent {
    name: String,
    assumes: Formula,
    guarantees: Formula,
    impl_ref: Option<String>,
}

struct StagedMission {
    world: WorldModel,
    contracts: Vec<(String, Formula, Formula)>,
    libraries: Vec<(String, Vec<RawComponent>)>,
}

impl StagedMission {
    fn parse(text: &str) -> Result<Self, MissionError> {
        let toks = tokenize(text)?;
        let mut p = MissionParser {
            toks: &toks,
            idx: 0,
        };
        p.file()
    }

    fn finish(self, base_dir: &Path, sat: &SatOptions) -> Result<MissionFile, MissionError> {
        let StagedMission {
            mut world,
            contracts,
            libraries,
        } = self;

        let violations = world.validate();
        if !violations.is_empty() {
            return Err(MissionError::Validation(violations));
        }

        let mut warnings = Vec::new();
        let mut register = |world: &mut WorldModel, owner: String, f: &Formula| {
            for ap in f.atoms() {
                if world.type_of_ap(&ap).is_none() {
                    world.register_free_atom(&ap);
                    warnings.push(format!(
                        "{owner}: atom '{ap}' is not declared in the world; registered as an anonymous type"
                    ));
                }
            }
        };

        let mut contract_map = BTreeMap::new();
        for (name, assumes, guarantees) in contracts {
            register(&mut world, format!("contract {name}"), &assumes);
            register(&mut world, format!("contract {name}"), &guarantees);
            if contract_map
                .insert(name.clone(), Contract::new(assumes, guarantees))
                .is_some()
            {
                return Err(MissionError::DuplicateName {
                    category: "contract",
                    name,
                });
            }
        }

        let mut library_map = BTreeMap::new();
        for (lib_name, raw_components) in libraries {
            let mut components = Vec::new();
            for raw in raw_components {
                register(
                    &mut world,
                    format!("component {lib_name}.{}", raw.name),
                    &raw.assumes,
                );
                register(
                    &mut world,
                    format!("component {lib_name}.{}", raw.name),
                    &raw.guarantees,
                );
                let contract = Contract::new(raw.assumes, raw.guarantees);
                let impl_ref = match raw.impl_ref {
                    Some(rel) => {
                        let path = base_dir.join(&rel);
                        let text =
                            std::fs::read_to_string(&path).map_err(|source| MissionError::Io {
                                path: path.clone(),
                                source,
                            })?;
                        MealyMachine::parse(&text).map_err(|source| MissionError::Machine {
                            component: format!("{lib_name}.{}", raw.name),
                            path: path.clone(),
                            source,
                        })?;
                        Some(path)
                    }
                    None => None,
                };
                components.push(Component {
                    name: raw.name,
                    contract,
                    impl_ref,
                });
            }
            let library = ComponentLibrary::new(lib_name.clone(), components)?;
            if library_map.insert(lib_name.clone(), library).is_some() {
                return Err(MissionError::DuplicateName {
                    category: "library",
                    name: lib_name,
                });
            }
        }

        // Contracts of loaded components must be well-formed in the world.
        for library in library_map.values() {
            for component in library.components() {
                if !is_compatible(&component.contract, Some(&world), sat)? {
                    return Err(MissionError::ComponentIllFormed {
                        library: library.name.clone(),
                        component: component.name.clone(),
                        defect: "incompatible",
                    });
                }
                if !is_consistent(&component.contract, Some(&world), sat)? {
                    return Err(MissionError::ComponentIllFormed {
                        library: library.name.clone(),
                        component: component.name.clone(),
                        defect: "inconsistent",
                    });
                }
            }
        }

        Ok(MissionFile {
            world,
            contracts: contract_map,
            libraries: library_map,
            warnings,
        })
    }
}

struct MissionParser<'a> {
    toks: &'a [(Tok, Pos)],
    idx: usize,
}

impl<'a> MissionParser<'a> {
    fn pos(&self) -> Pos {
        self.toks
            .get(self.idx)
            .or_else(|| self.toks.last())
            .map(|(_, p)| *p)
            .unwrap_or(Pos { line: 1, col: 1 })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.idx).map(|(t, _)| t)
    }

    fn bump(&mut self) -> Option<(Tok, Pos)> {
        let t = self.toks.get(self.idx).cloned();
        if t.is_some() {
            self.idx += 1;
        }
        t
    }

    fn error(&self, message: impl Into<String>) -> MissionError {
        let pos = self.pos();
        MissionError::Parse(ParseError {
            line: pos.line,
            col: pos.col,
            message: message.into(),
        })
    }

    fn expect_tok(&mut self, tok: &Tok) -> Result<(), MissionError> {
        match self.bump() {
            Some((t, _)) if &t == tok => Ok(()),
            Some((t, p)) => Err(MissionError::Parse(ParseError {
                line: p.line,
                col: p.col,
                message: format!("expected '{tok}', found '{t}'"),
            })),
            None => Err(self.error(format!("expected '{tok}', found end of input"))),
        }
    }

    fn keyword(&mut self, word: &str) -> bool {
        if matches!(self.peek(), Some(Tok::Ident(w)) if w == word) {
            self.idx += 1;
            true
        } else {
            false
        }
    }

    /// Any identifier-like token, including the reserved operator letters;
    /// used for names that live outside formula syntax.
    fn name(&mut self, what: &str) -> Result<String, MissionError> {
        match self.bump() {
            Some((t, p)) => t.ident_like().ok_or(MissionError::Parse(ParseError {
                line: p.line,
                col: p.col,
                message: format!("expected {what}, found '{t}'"),
            })),
            None => Err(self.error(format!("expected {what}, found end of input"))),
        }
    }

    fn file(&mut self) -> Result<StagedMission, MissionError> {
        let mut world = WorldModel::new();
        let mut contracts = Vec::new();
        let mut libraries = Vec::new();
        if self.keyword("world") {
            self.world_block(&mut world)?;
        }
        loop {
            if self.keyword("contract") {
                contracts.push(self.contract_block()?);
            } else if self.keyword("library") {
                libraries.push(self.library_block()?);
            } else if let Some(t) = self.peek() {
                return Err(self.error(format!("expected 'contract' or 'library', found '{t}'")));
            } else {
                break;
            }
        }
        Ok(StagedMission {
            world,
            contracts,
            libraries,
        })
    }

    fn world_block(&mut self, world: &mut WorldModel) -> Result<(), MissionError> {
        self.expect_tok(&Tok::LBrace)?;
        loop {
            let pos = self.pos();
            let wrap = |source: WorldError| MissionError::World {
                line: pos.line,
                col: pos.col,
                source,
            };
            if self.keyword("type") {
                let kind = match self.name("type kind")?.as_str() {
                    "location" => TypeKind::Location,
                    "sensor" => TypeKind::Sensor,
                    "action" => TypeKind::Action,
                    other => {
                        return Err(self.error(format!(
                            "type kind must be location, sensor or action, got '{other}'"
                        )))
                    }
                };
                let id = self.name("type identifier")?;
                if !id.chars().next().is_some_and(|c| c.is_ascii_uppercase()) {
                    return Err(self.error(format!(
                        "type identifier '{id}' must be capitalized; its atom is the lowercase form"
                    )));
                }
                world.add_type(&id, kind).map_err(wrap)?;
                if self.keyword("extends") {
                    let sup = self.type_ref(world)?;
                    world.declare_extends(&id, &sup).map_err(wrap)?;
                }
            } else if self.keyword("mutex") {
                let a = self.type_ref(world)?;
                let b = self.type_ref(world)?;
                world.declare_mutex(&a, &b).map_err(wrap)?;
            } else if self.keyword("adjacent") {
                let a = self.type_ref(world)?;
                let b = self.type_ref(world)?;
                world.declare_adjacent(&a, &b).map_err(wrap)?;
            } else if self.keyword("covers") {
                let covered = self.type_ref(world)?;
                self.expect_tok(&Tok::Equals)?;
                let mut members = vec![self.type_ref(world)?];
                while matches!(self.peek(), Some(Tok::Comma)) {
                    self.bump();
                    members.push(self.type_ref(world)?);
                }
                world.declare_covering(&covered, members).map_err(wrap)?;
            } else if matches!(self.peek(), Some(Tok::RBrace)) {
                self.bump();
                return Ok(());
            } else {
                let found = match self.peek() {
                    Some(t) => format!("'{t}'"),
                    None => "end of input".to_string(),
                };
                return Err(self.error(format!(
                    "expected a world declaration or '}}', found {found}"
                )));
            }
        }
    }

    /// A reference to a declared type: by identifier, or by its atom name.
    fn type_ref(&mut self, world: &WorldModel) -> Result<String, MissionError> {
        let name = self.name("type reference")?;
        if world.get_type(&name).is_some() {
            return Ok(name);
        }
        if let Some(t) = world.type_of_ap(&crate::ltl::Ap::new(name.to_lowercase())) {
            return Ok(t.id.clone());
        }
        // Leave resolution errors to the world model for a uniform message.
        Ok(name)
    }

    fn contract_block(&mut self) -> Result<(String, Formula, Formula), MissionError> {
        let name = self.name("contract name")?;
        self.expect_tok(&Tok::LBrace)?;
        self.expect_keyword("assumes")?;
        self.expect_tok(&Tok::Colon)?;
        let assumes = self.expr()?;
        self.expect_keyword("guarantees")?;
        self.expect_tok(&Tok::Colon)?;
        let guarantees = self.expr()?;
        self.expect_tok(&Tok::RBrace)?;
        Ok((name, assumes, guarantees))
    }

    fn library_block(&mut self) -> Result<(String, Vec<RawComponent>), MissionError> {
        let name = self.name("library name")?;
        self.expect_tok(&Tok::LBrace)?;
        let mut components = Vec::new();
        while self.keyword("component") {
            components.push(self.component_block()?);
        }
        self.expect_tok(&Tok::RBrace)?;
        Ok((name, components))
    }

    fn component_block(&mut self) -> Result<RawComponent, MissionError> {
        let name = self.name("component name")?;
        self.expect_tok(&Tok::LBrace)?;
        let assumes = if self.keyword("assumes") {
            self.expect_tok(&Tok::Colon)?;
            self.expr()?
        } else {
            Formula::True
        };
        self.expect_keyword("guarantees")?;
        self.expect_tok(&Tok::Colon)?;
        let guarantees = self.expr()?;
        let impl_ref = if self.keyword("impl") {
            self.expect_tok(&Tok::Colon)?;
            let path = match self.bump() {
                Some((Tok::Str(s), _)) => s,
                _ => return Err(self.error("expected a quoted path after 'impl:'")),
            };
            self.expect_tok(&Tok::Semi)?;
            Some(path)
        } else {
            None
        };
        self.expect_tok(&Tok::RBrace)?;
        Ok(RawComponent {
            name,
            assumes,
            guarantees,
            impl_ref,
        })
    }

    fn expect_keyword(&mut self, word: &str) -> Result<(), MissionError> {
        if self.keyword(word) {
            Ok(())
        } else {
            let found = match self.peek() {
                Some(t) => format!("'{t}'"),
                None => "end of input".to_string(),
            };
            Err(self.error(format!("expected '{word}', found {found}")))
        }
    }

    /// An LTL expression with pattern calls, running to the closing ';'.
    fn expr(&mut self) -> Result<Formula, MissionError> {
        let start = self.idx;
        let mut depth = 0usize;
        let end = loop {
            match self.toks.get(self.idx) {
                Some((Tok::Semi, _)) if depth == 0 => break self.idx,
                Some((Tok::LParen, _)) => {
                    depth += 1;
                    self.idx += 1;
                }
                Some((Tok::RParen, _)) => {
                    depth = depth.saturating_sub(1);
                    self.idx += 1;
                }
                Some(_) => self.idx += 1,
                None => return Err(self.error("expected ';' after the formula")),
            }
        };
        let slice = &self.toks[start..end];
        self.idx = end + 1; // consume the ';'
        let expander = |name: &str, args: &[crate::ltl::Ap]| {
            expand_call(name, args).map_err(|e| e.to_string())
        };
        let formula = parse_with_calls_tokens(slice, &expander)?;
        Ok(formula)
    }
}
