//! Recursive-descent parser for the LTL surface syntax.
//!
//! Precedence, lowest to highest: `<->`, `->` (right), `|`, `&`, `U`/`R`
//! (right), unary `! X F G`. Parentheses override.

use std::collections::BTreeSet;

use thiserror::Error;

use super::ast::{Ap, Formula};
use super::lexer::{tokenize, Pos, Tok};

#[derive(Clone, PartialEq, Eq, Debug, Error)]
#[error("{line}:{col}: {message}")]
pub struct ParseError {
    pub line: u32,
    pub col: u32,
    pub message: String,
}

impl ParseError {
    pub(crate) fn at(pos: Pos, message: impl Into<String>) -> Self {
        ParseError {
            line: pos.line,
            col: pos.col,
            message: message.into(),
        }
    }
}

/// Resolves `Name(arg, ...)` calls met where a formula is expected.
pub type CallExpander<'a> = &'a dyn Fn(&str, &[Ap]) -> Result<Formula, String>;

/// Result of a parse together with the atoms not present in the declared set.
#[derive(Clone, Debug)]
pub struct Parsed {
    pub formula: Formula,
    /// Atoms absent from the `known` set, in name order.
    pub fresh: Vec<Ap>,
}

pub fn parse(text: &str) -> Result<Formula, ParseError> {
    let toks = tokenize(text)?;
    check_size(&toks)?;
    let mut p = Parser::new(&toks, None);
    let f = p.formula()?;
    p.expect_end()?;
    Ok(f)
}

/// Parse against a declared atom set; undeclared atoms are accepted and
/// reported back as fresh.
pub fn parse_with_known(text: &str, known: &BTreeSet<Ap>) -> Result<Parsed, ParseError> {
    let f = parse(text)?;
    Ok(with_fresh(f, known))
}

/// Parse with pattern-call syntax enabled; `expander` receives the call name
/// and its argument atoms.
pub fn parse_with_calls(text: &str, expander: CallExpander) -> Result<Formula, ParseError> {
    let toks = tokenize(text)?;
    parse_with_calls_tokens(&toks, expander)
}

/// Same, over an already-lexed token slice (the mission parser hands over
/// expression spans).
pub(crate) fn parse_with_calls_tokens(
    toks: &[(Tok, Pos)],
    expander: CallExpander,
) -> Result<Formula, ParseError> {
    check_size(toks)?;
    let mut p = Parser::new(toks, Some(expander));
    let f = p.formula()?;
    p.expect_end()?;
    Ok(f)
}

fn check_size(toks: &[(Tok, Pos)]) -> Result<(), ParseError> {
    if toks.len() > MAX_FORMULA_TOKENS {
        let pos = toks[MAX_FORMULA_TOKENS].1;
        return Err(ParseError::at(
            pos,
            format!("formula exceeds {MAX_FORMULA_TOKENS} tokens"),
        ));
    }
    Ok(())
}

pub(crate) fn with_fresh(formula: Formula, known: &BTreeSet<Ap>) -> Parsed {
    let mut fresh = Vec::new();
    for ap in formula.atoms() {
        if !known.contains(&ap) {
            fresh.push(ap);
        }
    }
    Parsed { formula, fresh }
}

// Guards the recursive descent against stack exhaustion on adversarial
// inputs like unbounded '(' or '!' chains.
const MAX_NESTING: usize = 512;

// Flat operator chains build trees whose depth downstream traversals
// (printing, rewriting, dropping) recurse over; the token cap bounds it.
const MAX_FORMULA_TOKENS: usize = 10_000;

pub(crate) struct Parser<'a> {
    toks: &'a [(Tok, Pos)],
    idx: usize,
    depth: usize,
    expander: Option<CallExpander<'a>>,
}

impl<'a> Parser<'a> {
    pub(crate) fn new(toks: &'a [(Tok, Pos)], expander: Option<CallExpander<'a>>) -> Self {
        Parser {
            toks,
            idx: 0,
            depth: 0,
            expander,
        }
    }

    pub(crate) fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.idx).map(|(t, _)| t)
    }

    pub(crate) fn pos(&self) -> Pos {
        self.toks
            .get(self.idx)
            .or_else(|| self.toks.last())
            .map(|(_, p)| *p)
            .unwrap_or(Pos { line: 1, col: 1 })
    }

    pub(crate) fn next_tok(&mut self) -> Option<(Tok, Pos)> {
        let t = self.toks.get(self.idx).cloned();
        if t.is_some() {
            self.idx += 1;
        }
        t
    }

    pub(crate) fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == Some(tok) {
            self.idx += 1;
            true
        } else {
            false
        }
    }

    pub(crate) fn expect(&mut self, tok: &Tok) -> Result<(), ParseError> {
        let pos = self.pos();
        match self.next_tok() {
            Some((t, _)) if &t == tok => Ok(()),
            Some((t, p)) => Err(ParseError::at(p, format!("expected '{tok}', found '{t}'"))),
            None => Err(ParseError::at(
                pos,
                format!("expected '{tok}', found end of input"),
            )),
        }
    }

    pub(crate) fn expect_end(&mut self) -> Result<(), ParseError> {
        match self.toks.get(self.idx) {
            None => Ok(()),
            Some((t, p)) => Err(ParseError::at(*p, format!("unexpected trailing '{t}'"))),
        }
    }

    pub(crate) fn formula(&mut self) -> Result<Formula, ParseError> {
        self.iff()
    }

    fn iff(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.implication()?;
        while self.eat(&Tok::DArrow) {
            let rhs = self.implication()?;
            lhs = lhs.iff(rhs);
        }
        Ok(lhs)
    }

    // Right-associative, folded iteratively.
    fn implication(&mut self) -> Result<Formula, ParseError> {
        let mut operands = vec![self.or()?];
        while self.eat(&Tok::Arrow) {
            operands.push(self.or()?);
        }
        let mut acc = operands.pop().unwrap();
        while let Some(lhs) = operands.pop() {
            acc = lhs.implies(acc);
        }
        Ok(acc)
    }

    fn or(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.and()?;
        while self.eat(&Tok::Pipe) {
            let rhs = self.and()?;
            lhs = lhs.or(rhs);
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.until()?;
        while self.eat(&Tok::Amp) {
            let rhs = self.until()?;
            lhs = lhs.and(rhs);
        }
        Ok(lhs)
    }

    // Right-associative, folded iteratively.
    fn until(&mut self) -> Result<Formula, ParseError> {
        let mut operands = vec![self.unary()?];
        let mut ops = Vec::new();
        loop {
            if self.eat(&Tok::OpU) {
                ops.push(Tok::OpU);
            } else if self.eat(&Tok::OpR) {
                ops.push(Tok::OpR);
            } else {
                break;
            }
            operands.push(self.unary()?);
        }
        let mut acc = operands.pop().unwrap();
        while let Some(op) = ops.pop() {
            let lhs = operands.pop().unwrap();
            acc = match op {
                Tok::OpU => lhs.until(acc),
                _ => lhs.release(acc),
            };
        }
        Ok(acc)
    }

    // Every recursive production passes through here at least once per
    // level, so this is the single place the nesting cap is enforced.
    fn unary(&mut self) -> Result<Formula, ParseError> {
        if self.depth >= MAX_NESTING {
            return Err(ParseError::at(
                self.pos(),
                format!("formula nesting exceeds {MAX_NESTING} levels"),
            ));
        }
        self.depth += 1;
        let result = self.unary_inner();
        self.depth -= 1;
        result
    }

    fn unary_inner(&mut self) -> Result<Formula, ParseError> {
        let pos = self.pos();
        match self.next_tok() {
            Some((Tok::Bang, _)) => Ok(self.unary()?.not()),
            Some((Tok::OpX, _)) => Ok(self.unary()?.next()),
            Some((Tok::OpF, _)) => Ok(self.unary()?.eventually()),
            Some((Tok::OpG, _)) => Ok(self.unary()?.globally()),
            Some((Tok::True, _)) => Ok(Formula::True),
            Some((Tok::False, _)) => Ok(Formula::False),
            Some((Tok::Ident(name), _)) => Ok(Formula::Atom(Ap::new(name))),
            Some((Tok::LParen, _)) => {
                let f = self.formula()?;
                self.expect(&Tok::RParen)?;
                Ok(f)
            }
            Some((Tok::UpperIdent(name), p)) => self.pattern_call(name, p),
            Some((t @ (Tok::OpU | Tok::OpR), p)) => Err(ParseError::at(
                p,
                format!("'{t}' is a reserved operator and cannot be used as an atom"),
            )),
            Some((t, p)) => Err(ParseError::at(p, format!("expected formula, found '{t}'"))),
            None => Err(ParseError::at(pos, "expected formula, found end of input")),
        }
    }

    fn pattern_call(&mut self, name: String, pos: Pos) -> Result<Formula, ParseError> {
        let Some(expander) = self.expander else {
            return Err(ParseError::at(
                pos,
                format!("'{name}': pattern calls are not allowed in this context"),
            ));
        };
        self.expect(&Tok::LParen)?;
        let mut args = Vec::new();
        if self.peek() != Some(&Tok::RParen) {
            loop {
                let p = self.pos();
                match self.next_tok() {
                    Some((Tok::Ident(arg), _)) => args.push(Ap::new(arg)),
                    Some((t, p)) => {
                        return Err(ParseError::at(
                            p,
                            format!("expected atom argument, found '{t}'"),
                        ))
                    }
                    None => return Err(ParseError::at(p, "expected atom argument")),
                }
                if !self.eat(&Tok::Comma) {
                    break;
                }
            }
        }
        self.expect(&Tok::RParen)?;
        expander(&name, &args).map_err(|msg| ParseError::at(pos, msg))
    }
}
