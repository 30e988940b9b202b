//! Token stream shared by the formula parser and the mission-file parser.

use std::fmt;

use super::parser::ParseError;

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Tok {
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
    Colon,
    Semi,
    Equals,
    Arrow,
    DArrow,
    Pipe,
    Amp,
    Bang,
    OpU,
    OpR,
    OpX,
    OpF,
    OpG,
    True,
    False,
    /// `[a-z][a-zA-Z0-9_]*`
    Ident(String),
    /// `[A-Z][a-zA-Z0-9_]*`, except the single reserved letters U R X F G.
    UpperIdent(String),
    /// Double-quoted string literal.
    Str(String),
}

impl Tok {
    /// The identifier text when this token can serve as a declaration name.
    /// The reserved operator letters are valid type names in world blocks.
    pub fn ident_like(&self) -> Option<String> {
        match self {
            Tok::Ident(s) | Tok::UpperIdent(s) => Some(s.clone()),
            Tok::OpU => Some("U".into()),
            Tok::OpR => Some("R".into()),
            Tok::OpX => Some("X".into()),
            Tok::OpF => Some("F".into()),
            Tok::OpG => Some("G".into()),
            _ => None,
        }
    }
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::LParen => write!(f, "("),
            Tok::RParen => write!(f, ")"),
            Tok::LBrace => write!(f, "{{"),
            Tok::RBrace => write!(f, "}}"),
            Tok::Comma => write!(f, ","),
            Tok::Colon => write!(f, ":"),
            Tok::Semi => write!(f, ";"),
            Tok::Equals => write!(f, "="),
            Tok::Arrow => write!(f, "->"),
            Tok::DArrow => write!(f, "<->"),
            Tok::Pipe => write!(f, "|"),
            Tok::Amp => write!(f, "&"),
            Tok::Bang => write!(f, "!"),
            Tok::OpU => write!(f, "U"),
            Tok::OpR => write!(f, "R"),
            Tok::OpX => write!(f, "X"),
            Tok::OpF => write!(f, "F"),
            Tok::OpG => write!(f, "G"),
            Tok::True => write!(f, "true"),
            Tok::False => write!(f, "false"),
            Tok::Ident(s) | Tok::UpperIdent(s) => write!(f, "{s}"),
            Tok::Str(s) => write!(f, "\"{s}\""),
        }
    }
}

/// Source position, 1-based.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Pos {
    pub line: u32,
    pub col: u32,
}

pub fn tokenize(text: &str) -> Result<Vec<(Tok, Pos)>, ParseError> {
    let mut out = Vec::new();
    let mut chars = text.chars().peekable();
    let mut line: u32 = 1;
    let mut col: u32 = 1;

    macro_rules! bump {
        () => {{
            let c = chars.next();
            if c == Some('\n') {
                line += 1;
                col = 1;
            } else if c.is_some() {
                col += 1;
            }
            c
        }};
    }

    while let Some(&c) = chars.peek() {
        let pos = Pos { line, col };
        match c {
            ' ' | '\t' | '\r' | '\n' => {
                bump!();
            }
            '#' => {
                // Line comment.
                while let Some(&c) = chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    bump!();
                }
            }
            '(' => {
                bump!();
                out.push((Tok::LParen, pos));
            }
            ')' => {
                bump!();
                out.push((Tok::RParen, pos));
            }
            '{' => {
                bump!();
                out.push((Tok::LBrace, pos));
            }
            '}' => {
                bump!();
                out.push((Tok::RBrace, pos));
            }
            ',' => {
                bump!();
                out.push((Tok::Comma, pos));
            }
            ':' => {
                bump!();
                out.push((Tok::Colon, pos));
            }
            ';' => {
                bump!();
                out.push((Tok::Semi, pos));
            }
            '=' => {
                bump!();
                out.push((Tok::Equals, pos));
            }
            '|' => {
                bump!();
                out.push((Tok::Pipe, pos));
            }
            '&' => {
                bump!();
                out.push((Tok::Amp, pos));
            }
            '!' => {
                bump!();
                out.push((Tok::Bang, pos));
            }
            '-' => {
                bump!();
                if chars.peek() == Some(&'>') {
                    bump!();
                    out.push((Tok::Arrow, pos));
                } else {
                    return Err(ParseError::at(pos, "expected '>' after '-'"));
                }
            }
            '<' => {
                bump!();
                if chars.peek() == Some(&'-') {
                    bump!();
                    if chars.peek() == Some(&'>') {
                        bump!();
                        out.push((Tok::DArrow, pos));
                    } else {
                        return Err(ParseError::at(pos, "expected '>' after '<-'"));
                    }
                } else {
                    return Err(ParseError::at(pos, "expected '-' after '<'"));
                }
            }
            '"' => {
                bump!();
                let mut s = String::new();
                loop {
                    match bump!() {
                        Some('"') => break,
                        Some('\n') | None => {
                            return Err(ParseError::at(pos, "unterminated string literal"));
                        }
                        Some(c) => s.push(c),
                    }
                }
                out.push((Tok::Str(s), pos));
            }
            c if c.is_ascii_alphabetic() => {
                let mut word = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_ascii_alphanumeric() || c == '_' {
                        word.push(c);
                        bump!();
                    } else {
                        break;
                    }
                }
                let tok = match word.as_str() {
                    "true" => Tok::True,
                    "false" => Tok::False,
                    "U" => Tok::OpU,
                    "R" => Tok::OpR,
                    "X" => Tok::OpX,
                    "F" => Tok::OpF,
                    "G" => Tok::OpG,
                    _ if word.chars().next().unwrap().is_ascii_uppercase() => Tok::UpperIdent(word),
                    _ => Tok::Ident(word),
                };
                out.push((tok, pos));
            }
            other => {
                return Err(ParseError::at(
                    pos,
                    format!("unexpected character '{other}'"),
                ));
            }
        }
    }
    Ok(out)
}
