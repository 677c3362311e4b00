//! Adder-network encoding: linear in the total coefficient bit count, at
//! the price of propagation strength. Unit propagation is only guaranteed
//! to notice violations once an assignment is complete.
//!
//! Every literal is dropped into one bucket per set bit of its
//! coefficient. Buckets are reduced with full and half adders whose sum
//! and carry outputs are clausified in the lower-bound direction only (7
//! respectively 3 clauses), carries promoted to the next bucket. The final
//! one-literal-per-bit sum is compared against the bound with the usual
//! lexicographic comparator: for every zero bit of the bound, the sum must
//! not have that bit set while matching the bound on all higher one bits.

use std::collections::VecDeque;

use num_traits::Zero;

use crate::model::Literal;
use crate::normalize::RawConstraint;

use super::{CnfFormula, FormulaBuilder, VarAllocator};

/// Sum and carry of three inputs, lower-bound direction: the sum is implied
/// on odd parity, the carry whenever two inputs hold.
fn full_adder(
    a: Literal,
    b: Literal,
    c: Literal,
    out: &mut FormulaBuilder<'_>,
) -> (Literal, Literal) {
    let sum = out.fresh().pos_lit();
    let carry = out.fresh().pos_lit();
    out.push(vec![a.negated(), b, c, sum]);
    out.push(vec![a, b.negated(), c, sum]);
    out.push(vec![a, b, c.negated(), sum]);
    out.push(vec![a.negated(), b.negated(), c.negated(), sum]);
    out.push(vec![a.negated(), b.negated(), carry]);
    out.push(vec![a.negated(), c.negated(), carry]);
    out.push(vec![b.negated(), c.negated(), carry]);
    (sum, carry)
}

fn half_adder(a: Literal, b: Literal, out: &mut FormulaBuilder<'_>) -> (Literal, Literal) {
    let sum = out.fresh().pos_lit();
    let carry = out.fresh().pos_lit();
    out.push(vec![a.negated(), b, sum]);
    out.push(vec![a, b.negated(), sum]);
    out.push(vec![a.negated(), b.negated(), carry]);
    (sum, carry)
}

pub fn encode_adder(r: &RawConstraint, alloc: &mut VarAllocator) -> CnfFormula {
    let mut out = FormulaBuilder::new(alloc);
    debug_assert!(*r.bound() >= num_bigint::BigInt::zero());

    let coeff_bits = r
        .terms()
        .iter()
        .map(|(c, _)| c.magnitude().bits())
        .max()
        .unwrap_or(0);
    let mut buckets: Vec<VecDeque<Literal>> = vec![VecDeque::new(); coeff_bits as usize];
    for (c, l) in r.terms() {
        let mag = c.magnitude();
        for bit in 0..mag.bits() {
            if mag.bit(bit) {
                buckets[bit as usize].push_back(*l);
            }
        }
    }

    // Reduce each bucket to a single sum bit, promoting carries upward.
    let mut digits: Vec<Option<Literal>> = Vec::new();
    let mut level = 0;
    while level < buckets.len() {
        while buckets[level].len() >= 3 {
            let a = buckets[level].pop_front().unwrap();
            let b = buckets[level].pop_front().unwrap();
            let c = buckets[level].pop_front().unwrap();
            let (sum, carry) = full_adder(a, b, c, &mut out);
            buckets[level].push_back(sum);
            if level + 1 == buckets.len() {
                buckets.push(VecDeque::new());
            }
            buckets[level + 1].push_back(carry);
        }
        if buckets[level].len() == 2 {
            let a = buckets[level].pop_front().unwrap();
            let b = buckets[level].pop_front().unwrap();
            let (sum, carry) = half_adder(a, b, &mut out);
            buckets[level].push_back(sum);
            if level + 1 == buckets.len() {
                buckets.push(VecDeque::new());
            }
            buckets[level + 1].push_back(carry);
        }
        digits.push(buckets[level].pop_front());
        level += 1;
    }

    // Lexicographic comparison of the binary sum against the bound.
    let bound = r.bound().magnitude().clone();
    let width = (digits.len() as u64).max(bound.bits());
    'positions: for j in 0..width {
        if bound.bit(j) {
            continue;
        }
        let Some(Some(digit)) = digits.get(j as usize) else {
            // Constant-zero digit cannot raise the sum past the bound.
            continue;
        };
        let mut lits = vec![digit.negated()];
        for i in (j + 1)..width {
            if bound.bit(i) {
                match digits.get(i as usize) {
                    Some(Some(higher)) => lits.push(higher.negated()),
                    // A higher one bit of the bound can never be matched,
                    // so no violation passes through this position.
                    _ => continue 'positions,
                }
            }
        }
        out.push(lits);
    }

    out.finish()
}
