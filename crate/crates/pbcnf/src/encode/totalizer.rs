//! Unary counters: the totalizer structure used by the watchdog encoders.
//!
//! A counter represents a number in order encoding: output `j` is true
//! when the counted value is at least `j`. Only the lower-bound direction
//! is clausified, which is enough for unit propagation to force output
//! prefixes upward, and keeps the clause count down. Counters may carry a
//! constant offset (a known prefix of always-true positions), which is how
//! the watchdog tare enters the sum without extra clauses.

use crate::model::Literal;

use super::{Clause, FormulaBuilder, VarAllocator};

/// An order-encoded count: the value is at least `offset + k` whenever the
/// first `k` literals of `outs` are true.
#[derive(Debug, Clone)]
pub(crate) struct Unary {
    pub offset: u64,
    pub outs: Vec<Literal>,
}

impl Unary {
    pub fn zero() -> Unary {
        Unary {
            offset: 0,
            outs: Vec::new(),
        }
    }

    pub fn single(lit: Literal) -> Unary {
        Unary {
            offset: 0,
            outs: vec![lit],
        }
    }

    /// Largest representable value.
    pub fn capacity(&self) -> u64 {
        self.offset + self.outs.len() as u64
    }

    /// The literal asserting `value >= pos`; `pos` must exceed the constant
    /// offset and stay within capacity.
    pub fn lit_at(&self, pos: u64) -> Literal {
        debug_assert!(pos > self.offset && pos <= self.capacity());
        self.outs[(pos - self.offset - 1) as usize]
    }
}

/// Merges two counters into one counting their sum. For every pair of
/// asserted prefixes the corresponding output position is implied:
/// `(~a_i | ~b_j | r_{i+j})`, with the `i = 0` respectively `j = 0` rows
/// covering one-sided pushes. Offsets add up and need no clauses.
pub(crate) fn merge(a: &Unary, b: &Unary, out: &mut FormulaBuilder<'_>) -> Unary {
    if a.outs.is_empty() {
        return Unary {
            offset: a.offset + b.offset,
            outs: b.outs.clone(),
        };
    }
    if b.outs.is_empty() {
        return Unary {
            offset: a.offset + b.offset,
            outs: a.outs.clone(),
        };
    }
    let outs: Vec<Literal> = (0..a.outs.len() + b.outs.len())
        .map(|_| out.fresh().pos_lit())
        .collect();
    for j in 0..=b.outs.len() {
        for i in 0..=a.outs.len() {
            if i == 0 && j == 0 {
                continue;
            }
            let mut lits = Vec::with_capacity(3);
            if i > 0 {
                lits.push(a.outs[i - 1].negated());
            }
            if j > 0 {
                lits.push(b.outs[j - 1].negated());
            }
            lits.push(outs[i + j - 1]);
            out.push(lits);
        }
    }
    Unary {
        offset: a.offset + b.offset,
        outs,
    }
}

/// A counter for half the value: position `t` reuses position `2t` of the
/// input, so no clauses are needed.
pub(crate) fn halve(u: &Unary) -> Unary {
    let offset = u.offset / 2;
    let mut outs = Vec::new();
    let mut t = offset + 1;
    while 2 * t <= u.capacity() {
        outs.push(u.lit_at(2 * t));
        t += 1;
    }
    Unary { offset, outs }
}

/// Balanced-tree totalizer over the inputs.
pub(crate) fn build_totalizer(inputs: &[Literal], out: &mut FormulaBuilder<'_>) -> Unary {
    match inputs.len() {
        0 => Unary::zero(),
        1 => Unary::single(inputs[0]),
        n => {
            let mid = n / 2;
            let left = build_totalizer(&inputs[..mid], out);
            let right = build_totalizer(&inputs[mid..], out);
            merge(&left, &right, out)
        }
    }
}

/// Unary counter over the inputs: output `o_j` is forced true by unit
/// propagation whenever at least `j` inputs are true. A single input passes
/// through without clauses.
pub fn totalizer(inputs: &[Literal], alloc: &mut VarAllocator) -> (Vec<Literal>, Vec<Clause>) {
    assert!(!inputs.is_empty(), "totalizer needs at least one input");
    let mut out = FormulaBuilder::new(alloc);
    let counter = build_totalizer(inputs, &mut out);
    let formula = out.finish();
    (counter.outs, formula.clauses().to_vec())
}
