//! Canonical formula rendering. `parse(print(f))` is structurally equal to
//! `f`; arguments of unary operators are parenthesized unless atomic.

use std::fmt::Write;

use super::ast::Formula;

// Binding strength, mirrors the grammar levels.
const PREC_IFF: u8 = 0;
const PREC_IMPLIES: u8 = 1;
const PREC_OR: u8 = 2;
const PREC_AND: u8 = 3;
const PREC_UNTIL: u8 = 4;
const PREC_UNARY: u8 = 5;
const PREC_ATOM: u8 = 6;

fn prec(f: &Formula) -> u8 {
    match f {
        Formula::True | Formula::False | Formula::Atom(_) => PREC_ATOM,
        Formula::Not(_) | Formula::Next(_) | Formula::Eventually(_) | Formula::Globally(_) => {
            PREC_UNARY
        }
        Formula::Until(_, _) | Formula::Release(_, _) => PREC_UNTIL,
        Formula::And(_, _) => PREC_AND,
        Formula::Or(_, _) => PREC_OR,
        Formula::Implies(_, _) => PREC_IMPLIES,
        Formula::Iff(_, _) => PREC_IFF,
    }
}

pub fn print(f: &Formula) -> String {
    let mut out = String::new();
    write_at(f, 0, &mut out);
    out
}

fn write_at(f: &Formula, min: u8, out: &mut String) {
    let p = prec(f);
    if p < min {
        out.push('(');
        write_node(f, out);
        out.push(')');
    } else {
        write_node(f, out);
    }
}

fn write_node(f: &Formula, out: &mut String) {
    match f {
        Formula::True => out.push_str("true"),
        Formula::False => out.push_str("false"),
        Formula::Atom(ap) => {
            let _ = write!(out, "{ap}");
        }
        Formula::Not(a) => {
            out.push('!');
            write_at(a, PREC_ATOM, out);
        }
        Formula::Next(a) => {
            out.push_str("X ");
            write_at(a, PREC_ATOM, out);
        }
        Formula::Eventually(a) => {
            out.push_str("F ");
            write_at(a, PREC_ATOM, out);
        }
        Formula::Globally(a) => {
            out.push_str("G ");
            write_at(a, PREC_ATOM, out);
        }
        Formula::Until(a, b) => {
            write_at(a, PREC_UNARY, out);
            out.push_str(" U ");
            write_at(b, PREC_UNTIL, out);
        }
        Formula::Release(a, b) => {
            write_at(a, PREC_UNARY, out);
            out.push_str(" R ");
            write_at(b, PREC_UNTIL, out);
        }
        Formula::And(a, b) => {
            write_at(a, PREC_AND, out);
            out.push_str(" & ");
            write_at(b, PREC_AND + 1, out);
        }
        Formula::Or(a, b) => {
            write_at(a, PREC_OR, out);
            out.push_str(" | ");
            write_at(b, PREC_OR + 1, out);
        }
        Formula::Implies(a, b) => {
            write_at(a, PREC_IMPLIES + 1, out);
            out.push_str(" -> ");
            write_at(b, PREC_IMPLIES, out);
        }
        Formula::Iff(a, b) => {
            write_at(a, PREC_IFF, out);
            out.push_str(" <-> ");
            write_at(b, PREC_IFF + 1, out);
        }
    }
}
