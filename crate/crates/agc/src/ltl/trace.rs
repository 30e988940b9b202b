//! Ultimately periodic (lasso) traces and exact LTL evaluation on them.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use thiserror::Error;

use super::ast::{Ap, Formula};

#[derive(Clone, PartialEq, Eq, Debug, Error)]
pub enum TraceError {
    #[error("lasso loop must be non-empty")]
    EmptyLoop,
    #[error("state {index} does not assign exactly the declared atom set")]
    BadAssignment { index: usize },
}

#[derive(Clone, PartialEq, Eq, Debug, Error)]
pub enum EvalError {
    #[error("atom '{0}' is not declared by the trace")]
    UndeclaredAtom(Ap),
    #[error("position {pos} is out of range (prefix {prefix} + loop {cycle})")]
    PositionOutOfRange {
        pos: usize,
        prefix: usize,
        cycle: usize,
    },
}

/// A lasso denotes the infinite word `prefix · loop^ω`. Every state assigns
/// every atom of the declared set.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LassoTrace {
    aps: Vec<Ap>,
    prefix: Vec<Vec<bool>>,
    cycle: Vec<Vec<bool>>,
}

impl LassoTrace {
    pub fn new(
        aps: BTreeSet<Ap>,
        prefix: Vec<BTreeMap<Ap, bool>>,
        cycle: Vec<BTreeMap<Ap, bool>>,
    ) -> Result<Self, TraceError> {
        if cycle.is_empty() {
            return Err(TraceError::EmptyLoop);
        }
        let order: Vec<Ap> = aps.iter().cloned().collect();
        let convert = |states: Vec<BTreeMap<Ap, bool>>, base: usize| {
            states
                .into_iter()
                .enumerate()
                .map(|(i, state)| {
                    if state.len() != order.len() {
                        return Err(TraceError::BadAssignment { index: base + i });
                    }
                    order
                        .iter()
                        .map(|ap| {
                            state
                                .get(ap)
                                .copied()
                                .ok_or(TraceError::BadAssignment { index: base + i })
                        })
                        .collect()
                })
                .collect::<Result<Vec<Vec<bool>>, TraceError>>()
        };
        let prefix_len = prefix.len();
        Ok(LassoTrace {
            prefix: convert(prefix, 0)?,
            cycle: convert(cycle, prefix_len)?,
            aps: order,
        })
    }

    /// Builds a trace from per-state bitmasks, bit `i` holding the value of
    /// the `i`-th atom in `aps` order.
    pub(crate) fn from_masks(aps: Vec<Ap>, prefix: Vec<u64>, cycle: Vec<u64>) -> Self {
        debug_assert!(!cycle.is_empty());
        debug_assert!(aps.len() <= 64);
        let expand = |masks: Vec<u64>| {
            masks
                .into_iter()
                .map(|m| (0..aps.len()).map(|i| m >> i & 1 == 1).collect())
                .collect()
        };
        LassoTrace {
            prefix: expand(prefix),
            cycle: expand(cycle),
            aps,
        }
    }

    pub fn aps(&self) -> impl Iterator<Item = &Ap> {
        self.aps.iter()
    }

    /// Extends the declared atom set; new atoms are false in every state.
    /// Used to widen a witness found over a simplified formula back to the
    /// original formula's atoms, which the simplified form is agnostic to.
    pub(crate) fn extend_atoms(mut self, extra: impl IntoIterator<Item = Ap>) -> Self {
        for ap in extra {
            if self.aps.contains(&ap) {
                continue;
            }
            self.aps.push(ap);
            for row in self.prefix.iter_mut().chain(self.cycle.iter_mut()) {
                row.push(false);
            }
        }
        self
    }

    pub fn prefix_len(&self) -> usize {
        self.prefix.len()
    }

    pub fn cycle_len(&self) -> usize {
        self.cycle.len()
    }

    /// Number of distinct positions: |prefix| + |loop|.
    pub fn len(&self) -> usize {
        self.prefix.len() + self.cycle.len()
    }

    pub fn is_empty(&self) -> bool {
        false // the loop is never empty
    }

    fn row(&self, pos: usize) -> &[bool] {
        if pos < self.prefix.len() {
            &self.prefix[pos]
        } else {
            &self.cycle[pos - self.prefix.len()]
        }
    }

    /// The assignment at a (normalized) position, for display.
    pub fn state(&self, pos: usize) -> BTreeMap<Ap, bool> {
        let pos = self.normalize(pos);
        self.aps
            .iter()
            .cloned()
            .zip(self.row(pos).iter().copied())
            .collect()
    }

    /// Positions at or past the prefix are reduced modulo the loop length.
    fn normalize(&self, pos: usize) -> usize {
        if pos < self.prefix.len() {
            pos
        } else {
            self.prefix.len() + (pos - self.prefix.len()) % self.cycle.len()
        }
    }

    fn successor(&self, pos: usize) -> usize {
        self.normalize(pos + 1)
    }
}

/// Exact LTL semantics at `position` of the infinite word, memoized per
/// subformula. Temporal operators are solved by fixpoint iteration over the
/// finitely many normalized positions.
pub fn evaluate_on_lasso(
    f: &Formula,
    trace: &LassoTrace,
    position: usize,
) -> Result<bool, EvalError> {
    if position >= trace.len() {
        return Err(EvalError::PositionOutOfRange {
            pos: position,
            prefix: trace.prefix_len(),
            cycle: trace.cycle_len(),
        });
    }
    let mut memo: HashMap<Formula, Vec<bool>> = HashMap::new();
    let values = eval_vec(f, trace, &mut memo)?;
    Ok(values[position])
}

fn eval_vec(
    f: &Formula,
    trace: &LassoTrace,
    memo: &mut HashMap<Formula, Vec<bool>>,
) -> Result<Vec<bool>, EvalError> {
    if let Some(v) = memo.get(f) {
        return Ok(v.clone());
    }
    let n = trace.len();
    let v = match f {
        Formula::True => vec![true; n],
        Formula::False => vec![false; n],
        Formula::Atom(ap) => {
            let idx = trace
                .aps
                .iter()
                .position(|a| a == ap)
                .ok_or_else(|| EvalError::UndeclaredAtom(ap.clone()))?;
            (0..n).map(|i| trace.row(i)[idx]).collect()
        }
        Formula::Not(a) => eval_vec(a, trace, memo)?.iter().map(|b| !b).collect(),
        Formula::And(a, b) => zip_with(
            &eval_vec(a, trace, memo)?,
            &eval_vec(b, trace, memo)?,
            |x, y| x && y,
        ),
        Formula::Or(a, b) => zip_with(
            &eval_vec(a, trace, memo)?,
            &eval_vec(b, trace, memo)?,
            |x, y| x || y,
        ),
        Formula::Implies(a, b) => zip_with(
            &eval_vec(a, trace, memo)?,
            &eval_vec(b, trace, memo)?,
            |x, y| !x || y,
        ),
        Formula::Iff(a, b) => zip_with(
            &eval_vec(a, trace, memo)?,
            &eval_vec(b, trace, memo)?,
            |x, y| x == y,
        ),
        Formula::Next(a) => {
            let av = eval_vec(a, trace, memo)?;
            (0..n).map(|i| av[trace.successor(i)]).collect()
        }
        Formula::Until(a, b) => {
            let av = eval_vec(a, trace, memo)?;
            let bv = eval_vec(b, trace, memo)?;
            fixpoint(trace, false, |v, i| {
                bv[i] || (av[i] && v[trace.successor(i)])
            })
        }
        Formula::Release(a, b) => {
            let av = eval_vec(a, trace, memo)?;
            let bv = eval_vec(b, trace, memo)?;
            fixpoint(trace, true, |v, i| {
                bv[i] && (av[i] || v[trace.successor(i)])
            })
        }
        Formula::Eventually(a) => {
            let av = eval_vec(a, trace, memo)?;
            fixpoint(trace, false, |v, i| av[i] || v[trace.successor(i)])
        }
        Formula::Globally(a) => {
            let av = eval_vec(a, trace, memo)?;
            fixpoint(trace, true, |v, i| av[i] && v[trace.successor(i)])
        }
    };
    memo.insert(f.clone(), v.clone());
    Ok(v)
}

fn zip_with(a: &[bool], b: &[bool], op: impl Fn(bool, bool) -> bool) -> Vec<bool> {
    a.iter().zip(b).map(|(&x, &y)| op(x, y)).collect()
}

/// Iterates the one-step expansion from the given starting value until
/// stable. Starting from all-false computes a least fixpoint, from all-true a
/// greatest fixpoint.
fn fixpoint(trace: &LassoTrace, start: bool, step: impl Fn(&[bool], usize) -> bool) -> Vec<bool> {
    let n = trace.len();
    let mut v = vec![start; n];
    loop {
        let next: Vec<bool> = (0..n).map(|i| step(&v, i)).collect();
        if next == v {
            return v;
        }
        v = next;
    }
}
