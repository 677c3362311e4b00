//! Input problems: variables, literals, and tagged pseudo-Boolean
//! inequality constraints of the form `a1*l1 + ... + an*ln <= b`.
//!
//! An [`InputModel`] owns a variable registry and an ordered list of
//! constraints. Constraints are built with [`make_leq`] (or [`make_eq`],
//! which expands an equality into two inequalities) and carry the tags of
//! the [`TagContext`] that was active when they were created. Tags later
//! select which encoders translate each constraint.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::atomic::{AtomicU32, Ordering};

use num_bigint::BigInt;
use num_traits::Zero;
use thiserror::Error;

/// Identifies the model a variable was created in, so that literals cannot
/// silently leak between models.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ModelId(u32);

static NEXT_MODEL_ID: AtomicU32 = AtomicU32::new(1);

/// A propositional variable. Ids are dense and creation-ordered within a
/// model: the k-th variable created has id `k`, starting at 1. Auxiliary
/// variables introduced during encoding extend the same id space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Variable {
    model: ModelId,
    id: u32,
}

impl Variable {
    pub(crate) fn new(model: ModelId, id: u32) -> Self {
        Variable { model, id }
    }

    /// The 1-based id used in DIMACS and OPB output.
    pub fn id(&self) -> u32 {
        self.id
    }

    pub(crate) fn model_id(&self) -> ModelId {
        self.model
    }

    /// The positive literal over this variable.
    ///
    /// Literals are plain values: every call returns a literal equal to every
    /// other call's result, so the memoization of literals holds by
    /// construction.
    pub fn pos_lit(&self) -> Literal {
        Literal::new(*self, true)
    }

    /// The negative literal over this variable.
    pub fn neg_lit(&self) -> Literal {
        Literal::new(*self, false)
    }

    /// `pos_lit` or `neg_lit` according to `sign` (`true` = positive).
    pub fn lit(&self, sign: bool) -> Literal {
        Literal::new(*self, sign)
    }
}

impl fmt::Display for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x{}", self.id)
    }
}

/// A variable or its negation. The building block of input constraints and
/// of the clauses produced by the encoders.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    var: Variable,
    positive: bool,
}

impl Literal {
    /// Direct construction. Equivalent to `var.lit(positive)`; the value is
    /// canonical either way, so no redundant literal objects can arise.
    pub fn new(var: Variable, positive: bool) -> Self {
        Literal { var, positive }
    }

    pub fn var(&self) -> Variable {
        self.var
    }

    pub fn is_positive(&self) -> bool {
        self.positive
    }

    /// The literal over the same variable with the opposite sign.
    pub fn negated(&self) -> Literal {
        Literal {
            var: self.var,
            positive: !self.positive,
        }
    }
}

impl std::ops::Not for Literal {
    type Output = Literal;

    fn not(self) -> Literal {
        self.negated()
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.positive {
            write!(f, "{}", self.var)
        } else {
            write!(f, "~{}", self.var)
        }
    }
}

/// Errors raised while building an input model.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum ModelError {
    #[error("coefficient and literal lists have different lengths ({coeffs} vs {lits})")]
    LengthMismatch { coeffs: usize, lits: usize },
    #[error("constraint has no literals")]
    EmptyLiterals,
    #[error("coefficient at position {index} is not positive")]
    NonpositiveCoefficient { index: usize },
    #[error("a tag context holds between 1 and 4 tags, got {given}")]
    TagCount { given: usize },
    #[error("literal {literal} does not belong to this model")]
    ForeignVariable { literal: String },
    #[error("equality bound {bound} is outside [0, {coeff_sum}]; the equality has no solution")]
    EqualityBoundOutOfRange { bound: BigInt, coeff_sum: BigInt },
}

/// The set of tags applied to constraints created while the context is
/// active. Holds 1 to 4 tags; a fresh context starts with the single tag 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TagContext {
    active: BTreeSet<i32>,
}

impl TagContext {
    pub fn new() -> Self {
        TagContext {
            active: BTreeSet::from([1]),
        }
    }

    /// Replaces the active tags. Duplicates collapse (set semantics); the
    /// count refers to the values given, so `set_tags(&[5, 5])` is accepted
    /// and leaves the single tag 5 active.
    pub fn set_tags(&mut self, tags: &[i32]) -> Result<(), ModelError> {
        if tags.is_empty() || tags.len() > 4 {
            return Err(ModelError::TagCount { given: tags.len() });
        }
        self.active = tags.iter().copied().collect();
        Ok(())
    }

    pub fn active_tags(&self) -> &BTreeSet<i32> {
        &self.active
    }
}

impl Default for TagContext {
    fn default() -> Self {
        TagContext::new()
    }
}

/// A pseudo-Boolean inequality constraint `a1*l1 + ... + an*ln <= b` with
/// positive integer coefficients, carrying one or more tags.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PbLeqConstraint {
    coeffs: Vec<BigInt>,
    lits: Vec<Literal>,
    bound: BigInt,
    tags: BTreeSet<i32>,
}

impl PbLeqConstraint {
    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn lits(&self) -> &[Literal] {
        &self.lits
    }

    pub fn bound(&self) -> &BigInt {
        &self.bound
    }

    /// Tags in ascending order.
    pub fn tags(&self) -> &BTreeSet<i32> {
        &self.tags
    }

    pub fn len(&self) -> usize {
        self.lits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lits.is_empty()
    }
}

impl fmt::Display for PbLeqConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (c, l)) in self.coeffs.iter().zip(&self.lits).enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{c}.{l}")?;
        }
        write!(f, " <= {}", self.bound)
    }
}

/// Creates the constraint `coeffs[0]*lits[0] + ... <= bound` tagged with the
/// context's active tags.
///
/// Coefficients must be positive. The bound may be any integer; a negative
/// bound makes the constraint unsatisfiable, which normalization reports
/// rather than construction.
pub fn make_leq<C, B>(
    coeffs: &[C],
    lits: &[Literal],
    bound: B,
    ctx: &TagContext,
) -> Result<PbLeqConstraint, ModelError>
where
    C: Clone + Into<BigInt>,
    B: Into<BigInt>,
{
    if coeffs.len() != lits.len() {
        return Err(ModelError::LengthMismatch {
            coeffs: coeffs.len(),
            lits: lits.len(),
        });
    }
    if lits.is_empty() {
        return Err(ModelError::EmptyLiterals);
    }
    let coeffs: Vec<BigInt> = coeffs.iter().cloned().map(Into::into).collect();
    for (index, c) in coeffs.iter().enumerate() {
        if *c <= BigInt::zero() {
            return Err(ModelError::NonpositiveCoefficient { index });
        }
    }
    Ok(PbLeqConstraint {
        coeffs,
        lits: lits.to_vec(),
        bound: bound.into(),
        tags: ctx.active_tags().clone(),
    })
}

/// Expands the equality `sum(ci*li) = b` into the two inequalities
/// `sum(ci*li) <= b` and `sum(ci*~li) <= sum(ci) - b`, both tagged.
///
/// Errors when `b` lies outside `[0, sum(ci)]`, in which case the equality
/// has no solution at all.
pub fn make_eq<C, B>(
    coeffs: &[C],
    lits: &[Literal],
    bound: B,
    ctx: &TagContext,
) -> Result<(PbLeqConstraint, PbLeqConstraint), ModelError>
where
    C: Clone + Into<BigInt>,
    B: Into<BigInt>,
{
    let bound: BigInt = bound.into();
    let upper = make_leq(coeffs, lits, bound.clone(), ctx)?;
    let coeff_sum: BigInt = upper.coeffs().iter().sum();
    if bound < BigInt::zero() || bound > coeff_sum {
        return Err(ModelError::EqualityBoundOutOfRange { bound, coeff_sum });
    }
    let neg_lits: Vec<Literal> = lits.iter().map(|l| l.negated()).collect();
    let lower = make_leq(
        upper.coeffs(),
        &neg_lits,
        coeff_sum - &bound,
        ctx,
    )?;
    Ok((upper, lower))
}

/// The container for input constraints, together with the variable registry.
///
/// Building a model is single-threaded; once complete, a model may be read
/// concurrently (all accessors take `&self`).
#[derive(Debug)]
pub struct InputModel {
    id: ModelId,
    variable_count: u32,
    constraints: Vec<PbLeqConstraint>,
}

impl InputModel {
    pub fn new() -> Self {
        InputModel {
            id: ModelId(NEXT_MODEL_ID.fetch_add(1, Ordering::Relaxed)),
            variable_count: 0,
            constraints: Vec::new(),
        }
    }

    pub(crate) fn id(&self) -> ModelId {
        self.id
    }

    /// Registers a fresh variable; the k-th call returns id k.
    pub fn new_variable(&mut self) -> Variable {
        self.variable_count += 1;
        Variable::new(self.id, self.variable_count)
    }

    pub fn variable_count(&self) -> u32 {
        self.variable_count
    }

    /// Appends a constraint. Every literal must refer to a variable created
    /// by this model.
    pub fn add_constraint(&mut self, q: PbLeqConstraint) -> Result<(), ModelError> {
        for l in q.lits() {
            let v = l.var();
            if v.model_id() != self.id || v.id() == 0 || v.id() > self.variable_count {
                return Err(ModelError::ForeignVariable {
                    literal: l.to_string(),
                });
            }
        }
        self.constraints.push(q);
        Ok(())
    }

    /// Constraints in insertion order.
    pub fn constraints(&self) -> &[PbLeqConstraint] {
        &self.constraints
    }
}

impl Default for InputModel {
    fn default() -> Self {
        InputModel::new()
    }
}

impl fmt::Display for InputModel {
    /// One header line `<n> constraints`, then one constraint per line in
    /// insertion order, rendered as `<coeff>.<lit> + ... <= <bound>`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} constraints", self.constraints.len())?;
        for q in &self.constraints {
            write!(f, "\n{q}")?;
        }
        Ok(())
    }
}
