//! Brute-force lasso enumeration. Independent of the tableau path: evaluates
//! formulas directly on candidate lassos, shortest first.
//!
//! One-sided: a hit proves satisfiability, absence within the bound proves
//! nothing.

use std::collections::HashMap;

use thiserror::Error;

use crate::ltl::{Ap, Formula, LassoTrace};

pub const ORACLE_MAX_ATOMS: usize = 4;
pub const ORACLE_MAX_BOUND: usize = 8;

#[derive(Clone, PartialEq, Eq, Debug, Error)]
pub enum OracleError {
    #[error("oracle supports at most {ORACLE_MAX_ATOMS} atoms, formula has {0}")]
    TooManyAtoms(usize),
    #[error("oracle bound must be between 1 and {ORACLE_MAX_BOUND}, got {0}")]
    BadBound(usize),
}

/// Enumerates every lasso with `|prefix| + |loop| <= bound` over the
/// formula's atoms and returns the first satisfying one.
pub fn lasso_oracle(f: &Formula, bound: usize) -> Result<Option<LassoTrace>, OracleError> {
    let atoms: Vec<Ap> = f.atoms().into_iter().collect();
    if atoms.len() > ORACLE_MAX_ATOMS {
        return Err(OracleError::TooManyAtoms(atoms.len()));
    }
    if bound == 0 || bound > ORACLE_MAX_BOUND {
        return Err(OracleError::BadBound(bound));
    }

    let prog = Prog::compile(f, &atoms);
    let k = atoms.len();
    for total in 1..=bound {
        for prefix_len in 0..total {
            let cycle_len = total - prefix_len;
            let words = 1u64 << (k * total);
            let state_mask = (1u64 << k) - 1;
            for word in 0..words {
                let state = |i: usize| word >> (k * i) & state_mask;
                if prog.eval(&state, total, prefix_len, cycle_len) {
                    let masks: Vec<u64> = (0..total).map(state).collect();
                    return Ok(Some(LassoTrace::from_masks(
                        atoms,
                        masks[..prefix_len].to_vec(),
                        masks[prefix_len..].to_vec(),
                    )));
                }
            }
        }
    }
    Ok(None)
}

// Instruction over deduplicated subformulas in dependency order. Operands
// are indices of earlier instructions.
enum Op {
    True,
    False,
    Atom(usize),
    Not(usize),
    And(usize, usize),
    Or(usize, usize),
    Implies(usize, usize),
    Iff(usize, usize),
    Next(usize),
    Until(usize, usize),
    Release(usize, usize),
    Eventually(usize),
    Globally(usize),
}

struct Prog {
    ops: Vec<Op>,
}

impl Prog {
    fn compile(f: &Formula, atoms: &[Ap]) -> Prog {
        let mut prog = Prog { ops: Vec::new() };
        let mut memo = HashMap::new();
        prog.add(f, atoms, &mut memo);
        prog
    }

    fn add(&mut self, f: &Formula, atoms: &[Ap], memo: &mut HashMap<Formula, usize>) -> usize {
        if let Some(&idx) = memo.get(f) {
            return idx;
        }
        let op = match f {
            Formula::True => Op::True,
            Formula::False => Op::False,
            Formula::Atom(ap) => Op::Atom(atoms.iter().position(|a| a == ap).unwrap()),
            Formula::Not(a) => Op::Not(self.add(a, atoms, memo)),
            Formula::And(a, b) => Op::And(self.add(a, atoms, memo), self.add(b, atoms, memo)),
            Formula::Or(a, b) => Op::Or(self.add(a, atoms, memo), self.add(b, atoms, memo)),
            Formula::Implies(a, b) => {
                Op::Implies(self.add(a, atoms, memo), self.add(b, atoms, memo))
            }
            Formula::Iff(a, b) => Op::Iff(self.add(a, atoms, memo), self.add(b, atoms, memo)),
            Formula::Next(a) => Op::Next(self.add(a, atoms, memo)),
            Formula::Until(a, b) => Op::Until(self.add(a, atoms, memo), self.add(b, atoms, memo)),
            Formula::Release(a, b) => {
                Op::Release(self.add(a, atoms, memo), self.add(b, atoms, memo))
            }
            Formula::Eventually(a) => Op::Eventually(self.add(a, atoms, memo)),
            Formula::Globally(a) => Op::Globally(self.add(a, atoms, memo)),
        };
        let idx = self.ops.len();
        self.ops.push(op);
        memo.insert(f.clone(), idx);
        idx
    }

    /// Truth of the root at position 0. Each value is a bitmask over the
    /// positions of the lasso (bit i = truth at position i).
    fn eval(
        &self,
        state: &impl Fn(usize) -> u64,
        total: usize,
        prefix_len: usize,
        cycle_len: usize,
    ) -> bool {
        let all = if total == 64 {
            u64::MAX
        } else {
            (1u64 << total) - 1
        };
        // Truth at successor positions: bit i of shift(v) = bit next(i) of v.
        let shift = |v: u64| -> u64 {
            let mut out = v >> 1 & all;
            let wrap_bit = prefix_len + (total - prefix_len) % cycle_len;
            if v >> wrap_bit & 1 == 1 {
                out |= 1 << (total - 1);
            }
            out
        };
        let mut vals: Vec<u64> = Vec::with_capacity(self.ops.len());
        for op in &self.ops {
            let v = match *op {
                Op::True => all,
                Op::False => 0,
                Op::Atom(bit) => {
                    let mut v = 0u64;
                    for i in 0..total {
                        if state(i) >> bit & 1 == 1 {
                            v |= 1 << i;
                        }
                    }
                    v
                }
                Op::Not(a) => !vals[a] & all,
                Op::And(a, b) => vals[a] & vals[b],
                Op::Or(a, b) => vals[a] | vals[b],
                Op::Implies(a, b) => (!vals[a] | vals[b]) & all,
                Op::Iff(a, b) => !(vals[a] ^ vals[b]) & all,
                Op::Next(a) => shift(vals[a]),
                Op::Until(a, b) => {
                    let mut v = 0u64;
                    loop {
                        let next = vals[b] | (vals[a] & shift(v));
                        if next == v {
                            break v;
                        }
                        v = next;
                    }
                }
                Op::Release(a, b) => {
                    let mut v = all;
                    loop {
                        let next = vals[b] & (vals[a] | shift(v));
                        if next == v {
                            break v;
                        }
                        v = next;
                    }
                }
                Op::Eventually(a) => {
                    let mut v = 0u64;
                    loop {
                        let next = vals[a] | shift(v);
                        if next == v {
                            break v;
                        }
                        v = next;
                    }
                }
                Op::Globally(a) => {
                    let mut v = all;
                    loop {
                        let next = vals[a] & shift(v);
                        if next == v {
                            break v;
                        }
                        v = next;
                    }
                }
            };
            vals.push(v);
        }
        *vals.last().unwrap() & 1 == 1
    }
}
