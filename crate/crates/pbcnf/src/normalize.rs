//! Canonical internal constraint form.
//!
//! Every encoder consumes a [`RawConstraint`]: positive coefficients over
//! distinct variables, terms sorted by decreasing coefficient, nonnegative
//! bound. [`to_raw`] rewrites an input constraint into that form, peeling
//! off trivialities and literals whose value is already decided:
//!
//! * duplicate literals merge, opposite literals cancel against the bound;
//! * a negative bound after cancellation means the constraint is
//!   unsatisfiable;
//! * a coefficient larger than the bound forces the literal false;
//! * a coefficient sum within the bound makes the remainder trivially true.
//!
//! The term ordering is fixed here because the shape of every downstream
//! encoding (and therefore the serialized output) depends on it.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::model::{Literal, PbLeqConstraint, Variable};

/// A normalized pseudo-Boolean inequality: `sum(coeff * lit) <= bound` with
/// `coeff > 0`, no variable repeated, terms in canonical order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawConstraint {
    terms: Vec<(BigInt, Literal)>,
    bound: BigInt,
}

impl RawConstraint {
    /// Builds a raw constraint directly, sorting the terms canonically.
    ///
    /// Callers must supply positive coefficients, distinct variables and a
    /// nonnegative bound; [`to_raw`] is the general entry point for
    /// arbitrary input constraints. Unlike the residuals produced by
    /// normalization, a directly built constraint may have coefficients
    /// exceeding the bound or a coefficient sum within it; the encoders
    /// accept both.
    pub fn new(terms: Vec<(BigInt, Literal)>, bound: BigInt) -> Self {
        assert!(!terms.is_empty(), "raw constraint needs at least one term");
        assert!(bound >= BigInt::zero(), "raw constraint bound must be nonnegative");
        let mut seen = std::collections::BTreeSet::new();
        for (c, l) in &terms {
            assert!(*c > BigInt::zero(), "raw constraint coefficients must be positive");
            assert!(seen.insert(l.var()), "variable {} appears twice", l.var());
        }
        let mut raw = RawConstraint { terms, bound };
        raw.sort_terms();
        raw
    }

    fn sort_terms(&mut self) {
        self.terms.sort_by(|(ca, la), (cb, lb)| {
            // Decreasing coefficient, then ascending variable id, then
            // positive before negative.
            cb.cmp(ca)
                .then_with(|| la.var().cmp(&lb.var()))
                .then_with(|| lb.is_positive().cmp(&la.is_positive()))
        });
    }

    pub fn terms(&self) -> &[(BigInt, Literal)] {
        &self.terms
    }

    pub fn bound(&self) -> &BigInt {
        &self.bound
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff_sum(&self) -> BigInt {
        self.terms.iter().map(|(c, _)| c).sum()
    }

    /// True when the coefficient sum is within the bound, so every
    /// assignment satisfies the constraint.
    pub fn is_trivially_true(&self) -> bool {
        self.coeff_sum() <= self.bound
    }

    /// The distinct variables of the constraint, in term order.
    pub fn variables(&self) -> Vec<Variable> {
        self.terms.iter().map(|(_, l)| l.var()).collect()
    }
}

impl std::fmt::Display for RawConstraint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for (i, (c, l)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{c}.{l}")?;
        }
        write!(f, " <= {}", self.bound)
    }
}

/// What became of a constraint under normalization.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormalizeStatus {
    /// No assignment satisfies the constraint.
    Unsat,
    /// Every assignment extending the forced literals satisfies it; there is
    /// no residual to encode.
    TriviallyTrue,
    /// A nontrivial residual remains.
    Residual,
}

/// Result of [`to_raw`]: an assignment satisfies the original constraint iff
/// it sets every forced literal true and satisfies the residual (when one
/// exists). `status == Residual` iff `residual.is_some()`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalizeResult {
    pub status: NormalizeStatus,
    pub forced: Vec<Literal>,
    pub residual: Option<RawConstraint>,
}

/// Rewrites an input constraint to canonical form.
pub fn to_raw(q: &PbLeqConstraint) -> NormalizeResult {
    let mut bound = q.bound().clone();

    // Merge duplicate literals and cancel opposite ones. Per variable, keep
    // the polarity with the larger combined coefficient; the smaller side is
    // charged to the bound (a*l + a'*~l = (a-a')*l + a' when a >= a').
    let mut per_var: BTreeMap<Variable, (BigInt, BigInt)> = BTreeMap::new();
    for (c, l) in q.coeffs().iter().zip(q.lits()) {
        let entry = per_var
            .entry(l.var())
            .or_insert_with(|| (BigInt::zero(), BigInt::zero()));
        if l.is_positive() {
            entry.0 += c;
        } else {
            entry.1 += c;
        }
    }
    let mut terms: Vec<(BigInt, Literal)> = Vec::with_capacity(per_var.len());
    for (var, (pos, neg)) in per_var {
        match pos.cmp(&neg) {
            Ordering::Greater => {
                bound -= &neg;
                terms.push((pos - neg, var.pos_lit()));
            }
            Ordering::Less => {
                bound -= &pos;
                terms.push((neg - pos, var.neg_lit()));
            }
            Ordering::Equal => {
                // The pair contributes exactly `pos` regardless of the
                // assignment; the term vanishes.
                bound -= &pos;
            }
        }
    }

    if bound < BigInt::zero() {
        return NormalizeResult {
            status: NormalizeStatus::Unsat,
            forced: Vec::new(),
            residual: None,
        };
    }

    // Canonical order before extraction so the forced list is deterministic.
    let mut partial = RawConstraint { terms, bound };
    partial.sort_terms();
    let RawConstraint { terms, bound } = partial;

    // A coefficient beyond the bound decides its literal.
    let mut forced = Vec::new();
    let mut kept: Vec<(BigInt, Literal)> = Vec::with_capacity(terms.len());
    for (c, l) in terms {
        if c > bound {
            forced.push(l.negated());
        } else {
            kept.push((c, l));
        }
    }

    let sum: BigInt = kept.iter().map(|(c, _)| c).sum();
    if sum <= bound {
        return NormalizeResult {
            status: NormalizeStatus::TriviallyTrue,
            forced,
            residual: None,
        };
    }

    NormalizeResult {
        status: NormalizeStatus::Residual,
        forced,
        residual: Some(RawConstraint { terms: kept, bound }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{make_leq, InputModel, TagContext};
    use num_bigint::BigInt;
    use proptest::prelude::*;

    fn model_with_vars(n: usize) -> (InputModel, Vec<Variable>) {
        let mut m = InputModel::new();
        let vars = (0..n).map(|_| m.new_variable()).collect();
        (m, vars)
    }

    fn leq(coeffs: &[i64], lits: &[Literal], bound: i64) -> PbLeqConstraint {
        make_leq(coeffs, lits, bound, &TagContext::new()).unwrap()
    }

    /// Direct evaluation of the input constraint under a complete
    /// assignment (bit i of `mask` gives the value of `vars[i]`),
    /// independent of the normalization path.
    fn satisfies(q: &PbLeqConstraint, vars: &[Variable], mask: u32) -> bool {
        let mut sum = BigInt::zero();
        for (c, l) in q.coeffs().iter().zip(q.lits()) {
            let idx = vars.iter().position(|v| *v == l.var()).unwrap();
            let value = (mask >> idx) & 1 == 1;
            if value == l.is_positive() {
                sum += c;
            }
        }
        sum <= *q.bound()
    }

    fn result_satisfies(r: &NormalizeResult, vars: &[Variable], mask: u32) -> bool {
        if r.status == NormalizeStatus::Unsat {
            return false;
        }
        for f in &r.forced {
            let idx = vars.iter().position(|v| *v == f.var()).unwrap();
            let value = (mask >> idx) & 1 == 1;
            if value != f.is_positive() {
                return false;
            }
        }
        match &r.residual {
            None => true,
            Some(raw) => {
                let mut sum = BigInt::zero();
                for (c, l) in raw.terms() {
                    let idx = vars.iter().position(|v| *v == l.var()).unwrap();
                    let value = (mask >> idx) & 1 == 1;
                    if value == l.is_positive() {
                        sum += c;
                    }
                }
                sum <= *raw.bound()
            }
        }
    }

    fn assert_semantics_preserved(q: &PbLeqConstraint, vars: &[Variable]) {
        let r = to_raw(q);
        for mask in 0..(1u32 << vars.len()) {
            assert_eq!(
                satisfies(q, vars, mask),
                result_satisfies(&r, vars, mask),
                "assignment {mask:b} disagrees for {q}"
            );
        }
    }

    #[test]
    fn introductory_constraint_is_already_canonical() {
        let (_m, v) = model_with_vars(3);
        let q = leq(&[5, 3, 1], &[v[0].pos_lit(), v[1].neg_lit(), v[2].pos_lit()], 8);
        let r = to_raw(&q);
        assert_eq!(r.status, NormalizeStatus::Residual);
        assert!(r.forced.is_empty());
        let raw = r.residual.unwrap();
        assert_eq!(raw.bound(), &BigInt::from(8));
        assert_eq!(
            raw.terms(),
            &[
                (BigInt::from(5), v[0].pos_lit()),
                (BigInt::from(3), v[1].neg_lit()),
                (BigInt::from(1), v[2].pos_lit()),
            ]
        );
    }

    #[test]
    fn opposite_literals_cancel_to_trivial() {
        let (_m, v) = model_with_vars(1);
        let q = leq(&[3, 2], &[v[0].pos_lit(), v[0].neg_lit()], 4);
        let r = to_raw(&q);
        assert_eq!(r.status, NormalizeStatus::TriviallyTrue);
        assert!(r.forced.is_empty());
        assert!(r.residual.is_none());
        assert_semantics_preserved(&q, &v);
    }

    #[test]
    fn large_coefficient_forces_literal() {
        let (_m, v) = model_with_vars(2);
        let q = leq(&[9, 1], &[v[0].pos_lit(), v[1].pos_lit()], 8);
        let r = to_raw(&q);
        assert_eq!(r.status, NormalizeStatus::TriviallyTrue);
        assert_eq!(r.forced, vec![v[0].neg_lit()]);
        assert!(r.residual.is_none());
        assert_semantics_preserved(&q, &v);
    }

    #[test]
    fn two_forced_literals() {
        let (_m, v) = model_with_vars(2);
        let q = leq(&[2, 2], &[v[0].pos_lit(), v[1].pos_lit()], 1);
        let r = to_raw(&q);
        assert_eq!(r.status, NormalizeStatus::TriviallyTrue);
        assert_eq!(r.forced, vec![v[0].neg_lit(), v[1].neg_lit()]);
        assert_semantics_preserved(&q, &v);
    }

    #[test]
    fn generous_bound_is_trivially_true() {
        let (_m, v) = model_with_vars(3);
        let q = leq(&[4, 2, 1], &[v[0].pos_lit(), v[1].pos_lit(), v[2].neg_lit()], 7);
        let r = to_raw(&q);
        assert_eq!(r.status, NormalizeStatus::TriviallyTrue);
        assert!(r.forced.is_empty());
    }

    #[test]
    fn negative_bound_is_unsat() {
        let (_m, v) = model_with_vars(1);
        let q = leq(&[1], &[v[0].pos_lit()], -1);
        let r = to_raw(&q);
        assert_eq!(r.status, NormalizeStatus::Unsat);
        assert!(r.forced.is_empty());
        assert!(r.residual.is_none());
    }

    #[test]
    fn duplicate_literals_merge() {
        let (_m, v) = model_with_vars(2);
        let q = leq(&[2, 3, 1], &[v[0].pos_lit(), v[0].pos_lit(), v[1].pos_lit()], 5);
        let r = to_raw(&q);
        let raw = r.residual.unwrap();
        assert_eq!(
            raw.terms(),
            &[
                (BigInt::from(5), v[0].pos_lit()),
                (BigInt::from(1), v[1].pos_lit()),
            ]
        );
        assert_semantics_preserved(&q, &v);
    }

    #[test]
    fn term_order_breaks_ties_by_variable_id() {
        let (_m, v) = model_with_vars(3);
        let q = leq(&[2, 2, 3], &[v[2].pos_lit(), v[1].neg_lit(), v[0].pos_lit()], 4);
        let raw = to_raw(&q).residual.unwrap();
        assert_eq!(
            raw.terms(),
            &[
                (BigInt::from(3), v[0].pos_lit()),
                (BigInt::from(2), v[1].neg_lit()),
                (BigInt::from(2), v[2].pos_lit()),
            ]
        );
    }

    #[test]
    fn normalization_is_idempotent() {
        let (_m, v) = model_with_vars(3);
        let q = leq(&[1, 3, 2], &[v[0].pos_lit(), v[1].neg_lit(), v[2].pos_lit()], 4);
        let first = to_raw(&q).residual.unwrap();
        let rebuilt = make_leq(
            &first.terms().iter().map(|(c, _)| c.clone()).collect::<Vec<_>>(),
            &first.terms().iter().map(|(_, l)| *l).collect::<Vec<_>>(),
            first.bound().clone(),
            &TagContext::new(),
        )
        .unwrap();
        let second = to_raw(&rebuilt).residual.unwrap();
        assert_eq!(first, second);
    }

    proptest! {
        /// Semantic preservation over arbitrary small constraints, including
        /// repeated and opposite literals and out-of-range bounds.
        #[test]
        fn preserves_satisfying_set(
            picks in proptest::collection::vec((0usize..5, any::<bool>(), 1i64..=12), 1..8),
            bound in -6i64..40,
        ) {
            let (_m, vars) = model_with_vars(5);
            let lits: Vec<Literal> = picks.iter().map(|(i, s, _)| vars[*i].lit(*s)).collect();
            let coeffs: Vec<i64> = picks.iter().map(|(_, _, c)| *c).collect();
            let q = leq(&coeffs, &lits, bound);
            assert_semantics_preserved(&q, &vars);
        }

        /// The canonical residual never violates its structural invariants.
        #[test]
        fn residual_invariants(
            picks in proptest::collection::vec((0usize..6, any::<bool>(), 1i64..=12), 1..8),
            bound in 0i64..30,
        ) {
            let (_m, vars) = model_with_vars(6);
            let lits: Vec<Literal> = picks.iter().map(|(i, s, _)| vars[*i].lit(*s)).collect();
            let coeffs: Vec<i64> = picks.iter().map(|(_, _, c)| *c).collect();
            let q = leq(&coeffs, &lits, bound);
            if let Some(raw) = to_raw(&q).residual {
                let mut seen = std::collections::BTreeSet::new();
                let mut prev: Option<BigInt> = None;
                for (c, l) in raw.terms() {
                    prop_assert!(*c > BigInt::from(0));
                    prop_assert!(c <= raw.bound());
                    prop_assert!(seen.insert(l.var()));
                    if let Some(p) = prev {
                        prop_assert!(*c <= p);
                    }
                    prev = Some(c.clone());
                }
                prop_assert!(raw.coeff_sum() > *raw.bound());
            }
        }
    }
}
