//! Watchdog encodings: polynomial-size schemes built from per-bit
//! totalizers and a binary carry chain.
//!
//! The core gadget sums the constraint terms bit by bit: coefficients are
//! decomposed into binary buckets, each bucket gets a unary counter, and
//! the counters are folded from the least significant level upwards, each
//! level passing half its count on as carry. A tare constant pads the
//! threshold to the next power of two, so exceeding the bound is equivalent
//! to a single carry bit at the top level: the watchdog output. Unit
//! propagation forces that output exactly when the coefficients of the
//! currently true literals already exceed the bound.
//!
//! [`encode_bargraph`] plants one global watchdog and forbids it: the
//! smallest of the encodings, detecting inconsistencies but not forcing
//! literals ahead of time. [`encode_watchdog`] builds one watchdog per
//! term over the residual constraint without it, paying a factor of the
//! term count in size to force every literal arc consistency would fix.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};

use crate::model::Literal;
use crate::normalize::RawConstraint;

use super::totalizer::{build_totalizer, halve, merge, Unary};
use super::{CnfFormula, FormulaBuilder, VarAllocator};

/// Builds the watchdog for `sum(terms) > bound`: the returned literal is
/// forced true by unit propagation whenever the sum of the coefficients of
/// true literals exceeds `bound`. Returns `None` when the coefficient sum
/// cannot exceed the bound, in which case nothing is emitted.
pub(crate) fn global_watchdog(
    terms: &[(BigInt, Literal)],
    bound: &BigInt,
    out: &mut FormulaBuilder<'_>,
) -> Option<Literal> {
    debug_assert!(*bound >= BigInt::zero());
    let coeff_sum: BigInt = terms.iter().map(|(c, _)| c).sum();
    let threshold = bound + 1;
    if coeff_sum < threshold {
        return None;
    }

    // Levels cover every coefficient bit and enough range for the
    // threshold; the tare tops the threshold up to exactly 2^levels.
    let threshold_mag = threshold.magnitude();
    let needed_for_threshold = (threshold_mag - BigUint::one()).bits();
    let needed_for_coeffs = terms
        .iter()
        .map(|(c, _)| c.magnitude().bits())
        .max()
        .unwrap_or(0);
    let levels = needed_for_threshold.max(needed_for_coeffs);
    let tare = (BigUint::one() << levels) - threshold_mag;

    let mut carry = Unary::zero();
    for level in 0..levels {
        let bucket: Vec<Literal> = terms
            .iter()
            .filter(|(c, _)| c.magnitude().bit(level))
            .map(|(_, l)| *l)
            .collect();
        let mut counter = build_totalizer(&bucket, out);
        if tare.bit(level) {
            counter.offset += 1;
        }
        let sum = merge(&counter, &carry, out);
        carry = halve(&sum);
    }

    // The tare is below 2^levels, so the top carry has no constant prefix,
    // and the coefficient sum reaching the threshold guarantees position 1
    // exists.
    debug_assert_eq!(carry.offset, 0);
    Some(carry.lit_at(1))
}

/// Single global watchdog, forbidden by a unit clause. Size-optimal among
/// the watchdog family; detects every arc-consistency inconsistency under
/// unit propagation without generally forcing literals beforehand.
pub fn encode_bargraph(r: &RawConstraint, alloc: &mut VarAllocator) -> CnfFormula {
    let mut out = FormulaBuilder::new(alloc);
    if let Some(w) = global_watchdog(r.terms(), r.bound(), &mut out) {
        out.push(vec![w.negated()]);
    }
    out.finish()
}

/// One watchdog per term: term `i` watches the residual constraint (the
/// other terms against `bound - coeff_i`), and `(~w_i | ~l_i)` lets unit
/// propagation retract `l_i` exactly when taking it would make the
/// constraint arc-inconsistent.
pub fn encode_watchdog(r: &RawConstraint, alloc: &mut VarAllocator) -> CnfFormula {
    let mut out = FormulaBuilder::new(alloc);
    for (i, (coeff, lit)) in r.terms().iter().enumerate() {
        let residual_bound = r.bound() - coeff;
        if residual_bound < BigInt::zero() {
            // The term alone overshoots.
            out.push(vec![lit.negated()]);
            continue;
        }
        let rest: Vec<(BigInt, Literal)> = r
            .terms()
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, t)| t.clone())
            .collect();
        if let Some(w) = global_watchdog(&rest, &residual_bound, &mut out) {
            out.push(vec![w.negated(), lit.negated()]);
        }
    }
    out.finish()
}
