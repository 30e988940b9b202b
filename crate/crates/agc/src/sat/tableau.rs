//! On-the-fly tableau translation from NNF formulas to generalized Büchi
//! automata, with one acceptance set per Until subformula.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write;

use crate::ltl::{print, Ap, Formula};

use super::{SatError, SatOptions};

/// A state of the automaton. The label is a conjunction of literals over the
/// automaton's atoms: `pos` lists atoms required true, `neg` atoms required
/// false (bit positions index into `Gba::aps`). Contradictory label sets are
/// discarded during construction, so every label is satisfiable.
#[derive(Clone, Debug)]
pub struct GbaState {
    pub pos: u64,
    pub neg: u64,
    pub succs: Vec<usize>,
}

/// Generalized Büchi automaton over the alphabet `2^aps`. A run is accepting
/// when it visits every acceptance set infinitely often; with no acceptance
/// sets every infinite run accepts.
#[derive(Clone, Debug)]
pub struct Gba {
    pub aps: Vec<Ap>,
    pub states: Vec<GbaState>,
    pub initial: Vec<usize>,
    pub acceptance: Vec<BTreeSet<usize>>,
}

impl Gba {
    /// Line-oriented debug dump; for human inspection only.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "aps: {}",
            self.aps
                .iter()
                .map(|a| a.name().to_string())
                .collect::<Vec<_>>()
                .join(" ")
        );
        let _ = writeln!(
            out,
            "initial: {}",
            self.initial
                .iter()
                .map(|i| i.to_string())
                .collect::<Vec<_>>()
                .join(" ")
        );
        for (i, set) in self.acceptance.iter().enumerate() {
            let _ = writeln!(
                out,
                "acc {i}: {}",
                set.iter()
                    .map(|s| s.to_string())
                    .collect::<Vec<_>>()
                    .join(" ")
            );
        }
        for (i, st) in self.states.iter().enumerate() {
            let mut lits = Vec::new();
            for (bit, ap) in self.aps.iter().enumerate() {
                if st.pos >> bit & 1 == 1 {
                    lits.push(ap.name().to_string());
                }
                if st.neg >> bit & 1 == 1 {
                    lits.push(format!("!{}", ap.name()));
                }
            }
            let label = if lits.is_empty() {
                "true".to_string()
            } else {
                lits.join(" & ")
            };
            let succs = st
                .succs
                .iter()
                .map(|s| s.to_string())
                .collect::<Vec<_>>()
                .join(" ");
            let _ = writeln!(out, "state {i} [{label}] -> {succs}");
        }
        out
    }
}

// Work node of the expansion. `new` holds obligations still to be processed,
// `old` the processed ones, `next` the obligations deferred one step.
#[derive(Clone, Debug)]
struct Node {
    id: usize,
    incoming: BTreeSet<usize>,
    new: BTreeSet<Formula>,
    old: BTreeSet<Formula>,
    next: BTreeSet<Formula>,
}

const INIT: usize = 0;

/// Translate an NNF formula into a GBA whose language is exactly the set of
/// models of the formula.
pub(crate) fn translate(f: &Formula, opts: &SatOptions) -> Result<Gba, SatError> {
    debug_assert!(
        is_nnf(f),
        "translate requires negation normal form: {}",
        print(f)
    );
    let aps: Vec<Ap> = f.atoms().into_iter().collect();

    let mut done: Vec<Node> = Vec::new();
    // (old, next) -> index into done
    let mut seen: HashMap<(BTreeSet<Formula>, BTreeSet<Formula>), usize> = HashMap::new();
    let mut next_id = INIT + 1;
    let mut fresh = || {
        let id = next_id;
        next_id += 1;
        id
    };

    let mut stack = vec![Node {
        id: fresh(),
        incoming: [INIT].into_iter().collect(),
        new: [f.clone()].into_iter().collect(),
        old: BTreeSet::new(),
        next: BTreeSet::new(),
    }];

    while let Some(mut q) = stack.pop() {
        let Some(eta) = q.new.pop_first() else {
            // Fully expanded: merge with an equivalent state or register.
            let key = (q.old.clone(), q.next.clone());
            if let Some(&idx) = seen.get(&key) {
                let incoming = q.incoming;
                done[idx].incoming.extend(incoming);
            } else {
                if done.len() >= opts.state_cap {
                    return Err(SatError::StateExplosion {
                        cap: opts.state_cap,
                    });
                }
                let succ = Node {
                    id: fresh(),
                    incoming: [q.id].into_iter().collect(),
                    new: q.next.clone(),
                    old: BTreeSet::new(),
                    next: BTreeSet::new(),
                };
                seen.insert(key, done.len());
                done.push(q);
                stack.push(succ);
            }
            continue;
        };

        match &eta {
            Formula::False => {} // inconsistent, drop
            // True carries no obligation; keeping it out of `old` avoids
            // splitting otherwise-identical states. Untils with a `true`
            // right-hand side get their acceptance handled separately.
            Formula::True => {
                stack.push(q);
            }
            Formula::Atom(_) => {
                if q.old.contains(&eta.clone().not()) {
                    continue;
                }
                q.old.insert(eta);
                stack.push(q);
            }
            Formula::Not(inner) => {
                debug_assert!(matches!(inner.as_ref(), Formula::Atom(_)));
                if q.old.contains(inner.as_ref()) {
                    continue;
                }
                q.old.insert(eta);
                stack.push(q);
            }
            Formula::And(a, b) => {
                let (a, b) = (a.as_ref().clone(), b.as_ref().clone());
                for part in [a, b] {
                    if !discharged(&q.old, &part) {
                        q.new.insert(part);
                    }
                }
                q.old.insert(eta);
                stack.push(q);
            }
            Formula::Or(a, b) => {
                let (a, b) = (a.as_ref().clone(), b.as_ref().clone());
                q.old.insert(eta);
                // Already entailed by a processed disjunct: no split.
                if discharged(&q.old, &a) || discharged(&q.old, &b) {
                    stack.push(q);
                    continue;
                }
                let mut q2 = q.clone();
                q2.id = fresh();
                q.new.insert(a);
                q2.new.insert(b);
                stack.push(q);
                stack.push(q2);
            }
            Formula::Next(a) => {
                let a = a.as_ref().clone();
                q.old.insert(eta);
                q.next.insert(a);
                stack.push(q);
            }
            // a U b = b | (a & X(a U b))
            Formula::Until(a, b) => {
                let (a, b) = (a.as_ref().clone(), b.as_ref().clone());
                q.old.insert(eta.clone());
                // Right-hand side already holds: satisfied now, no split.
                if discharged(&q.old, &b) {
                    stack.push(q);
                    continue;
                }
                let mut q2 = q.clone();
                q2.id = fresh();
                if !discharged(&q.old, &a) {
                    q.new.insert(a);
                }
                q.next.insert(eta);
                q2.new.insert(b);
                stack.push(q);
                stack.push(q2);
            }
            // a R b = (a & b) | (b & X(a R b))
            Formula::Release(a, b) => {
                let (a, b) = (a.as_ref().clone(), b.as_ref().clone());
                q.old.insert(eta.clone());
                if discharged(&q.old, &a) && discharged(&q.old, &b) {
                    stack.push(q);
                    continue;
                }
                let mut q2 = q.clone();
                q2.id = fresh();
                if !discharged(&q.old, &b) {
                    q.new.insert(b.clone());
                }
                q.next.insert(eta);
                for part in [a, b] {
                    if !discharged(&q2.old, &part) {
                        q2.new.insert(part);
                    }
                }
                stack.push(q);
                stack.push(q2);
            }
            Formula::Implies(_, _)
            | Formula::Iff(_, _)
            | Formula::Eventually(_)
            | Formula::Globally(_) => {
                unreachable!("formula not in negation normal form: {}", print(&eta))
            }
        }
    }

    // Compact ids and wire up edges.
    let id_to_index: HashMap<usize, usize> = done
        .iter()
        .enumerate()
        .map(|(idx, node)| (node.id, idx))
        .collect();
    let ap_bit: HashMap<&Ap, usize> = aps.iter().enumerate().map(|(i, a)| (a, i)).collect();

    let mut states: Vec<GbaState> = done
        .iter()
        .map(|node| {
            let mut pos = 0u64;
            let mut neg = 0u64;
            for g in &node.old {
                match g {
                    Formula::Atom(ap) => pos |= 1 << ap_bit[ap],
                    Formula::Not(inner) => {
                        if let Formula::Atom(ap) = inner.as_ref() {
                            neg |= 1 << ap_bit[ap];
                        }
                    }
                    _ => {}
                }
            }
            GbaState {
                pos,
                neg,
                succs: Vec::new(),
            }
        })
        .collect();

    let mut initial = Vec::new();
    for (idx, node) in done.iter().enumerate() {
        for src in &node.incoming {
            if *src == INIT {
                initial.push(idx);
            } else if let Some(&s) = id_to_index.get(src) {
                states[s].succs.push(idx);
            }
        }
    }
    for st in &mut states {
        st.succs.sort_unstable();
        st.succs.dedup();
    }

    // One acceptance set per Until subformula: states that either do not owe
    // the until or have already satisfied its right-hand side. `true` is not
    // recorded in `old`, so a trivially-satisfied until accepts everywhere.
    let mut untils = BTreeSet::new();
    collect_untils(f, &mut untils);
    let acceptance = untils
        .iter()
        .map(|u| {
            let rhs = match u {
                Formula::Until(_, b) => b.as_ref(),
                _ => unreachable!(),
            };
            done.iter()
                .enumerate()
                .filter(|(_, node)| {
                    !node.old.contains(u) || *rhs == Formula::True || node.old.contains(rhs)
                })
                .map(|(idx, _)| idx)
                .collect()
        })
        .collect();

    Ok(Gba {
        aps,
        states,
        initial,
        acceptance,
    })
}

// A formula counts as discharged in this node when it was processed into
// `old`, or is the constant `true` (never stored).
fn discharged(old: &BTreeSet<Formula>, f: &Formula) -> bool {
    *f == Formula::True || old.contains(f)
}

fn collect_untils(f: &Formula, out: &mut BTreeSet<Formula>) {
    match f {
        Formula::Until(a, b) => {
            out.insert(f.clone());
            collect_untils(a, out);
            collect_untils(b, out);
        }
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Release(a, b) => {
            collect_untils(a, out);
            collect_untils(b, out);
        }
        Formula::Not(a) | Formula::Next(a) => collect_untils(a, out),
        Formula::True | Formula::False | Formula::Atom(_) => {}
        Formula::Implies(_, _)
        | Formula::Iff(_, _)
        | Formula::Eventually(_)
        | Formula::Globally(_) => {
            unreachable!("formula not in negation normal form")
        }
    }
}

pub(crate) fn is_nnf(f: &Formula) -> bool {
    match f {
        Formula::True | Formula::False | Formula::Atom(_) => true,
        Formula::Not(a) => matches!(a.as_ref(), Formula::Atom(_)),
        Formula::Next(a) => is_nnf(a),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Until(a, b) | Formula::Release(a, b) => {
            is_nnf(a) && is_nnf(b)
        }
        _ => false,
    }
}
