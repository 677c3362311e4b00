//! Reduced ordered BDD of a pseudo-Boolean inequality, and the encoding
//! that introduces one auxiliary variable per node.
//!
//! The decision order is the canonical term order. Sub-problems are keyed
//! by the residual budget left for the suffix: two budgets at the same
//! depth reach the same node exactly when they admit the same satisfying
//! suffixes, which is an interval condition, so each level memoizes
//! `[lo, hi] -> node` entries instead of single budgets. This is what
//! factorizes identical subgraphs.

use num_bigint::BigInt;
use num_traits::Zero;

use crate::model::Literal;
use crate::normalize::RawConstraint;

use super::{CnfFormula, FormulaBuilder, VarAllocator};

/// Child pointer: a terminal or an index into [`Bdd::nodes`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BddRef {
    True,
    False,
    Node(u32),
}

/// A decision node branching on the literal of term `level`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BddNode {
    pub level: usize,
    pub high: BddRef,
    pub low: BddRef,
}

/// A reduced ordered BDD. Nodes are stored in creation order (children
/// before parents); the root is the last node unless the function is
/// constant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bdd {
    nodes: Vec<BddNode>,
    root: BddRef,
}

impl Bdd {
    pub fn root(&self) -> BddRef {
        self.root
    }

    pub fn nodes(&self) -> &[BddNode] {
        &self.nodes
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Evaluates the function under a complete assignment of the terms'
    /// literals (`true` meaning the literal holds).
    pub fn eval(&self, lit_values: impl Fn(usize) -> bool) -> bool {
        let mut cursor = self.root;
        loop {
            match cursor {
                BddRef::True => return true,
                BddRef::False => return false,
                BddRef::Node(i) => {
                    let node = &self.nodes[i as usize];
                    cursor = if lit_values(node.level) {
                        node.high
                    } else {
                        node.low
                    };
                }
            }
        }
    }
}

/// Budget interval with optionally unbounded endpoints (`None` meaning
/// minus respectively plus infinity).
#[derive(Debug, Clone, PartialEq, Eq)]
struct Interval {
    lo: Option<BigInt>,
    hi: Option<BigInt>,
}

impl Interval {
    fn contains(&self, budget: &BigInt) -> bool {
        self.lo.as_ref().map_or(true, |lo| lo <= budget)
            && self.hi.as_ref().map_or(true, |hi| budget <= hi)
    }

    fn shifted(&self, delta: &BigInt) -> Interval {
        Interval {
            lo: self.lo.as_ref().map(|lo| lo + delta),
            hi: self.hi.as_ref().map(|hi| hi + delta),
        }
    }

    fn intersect(self, other: Interval) -> Interval {
        let lo = match (self.lo, other.lo) {
            (None, b) => b,
            (a, None) => a,
            (Some(a), Some(b)) => Some(a.max(b)),
        };
        let hi = match (self.hi, other.hi) {
            (None, b) => b,
            (a, None) => a,
            (Some(a), Some(b)) => Some(a.min(b)),
        };
        Interval { lo, hi }
    }
}

struct Builder<'a> {
    terms: &'a [(BigInt, Literal)],
    /// `suffix_sums[i]` is the coefficient sum of terms `i..`.
    suffix_sums: Vec<BigInt>,
    memo: Vec<Vec<(Interval, BddRef)>>,
    nodes: Vec<BddNode>,
}

impl<'a> Builder<'a> {
    fn new(r: &'a RawConstraint) -> Self {
        let n = r.len();
        let mut suffix_sums = vec![BigInt::zero(); n + 1];
        for i in (0..n).rev() {
            suffix_sums[i] = &suffix_sums[i + 1] + &r.terms()[i].0;
        }
        Builder {
            terms: r.terms(),
            suffix_sums,
            memo: vec![Vec::new(); n],
            nodes: Vec::new(),
        }
    }

    fn build(&mut self, level: usize, budget: BigInt) -> (BddRef, Interval) {
        if budget < BigInt::zero() {
            return (
                BddRef::False,
                Interval {
                    lo: None,
                    hi: Some(BigInt::from(-1)),
                },
            );
        }
        if self.suffix_sums[level] <= budget {
            return (
                BddRef::True,
                Interval {
                    lo: Some(self.suffix_sums[level].clone()),
                    hi: None,
                },
            );
        }
        for (interval, node) in &self.memo[level] {
            if interval.contains(&budget) {
                return (*node, interval.clone());
            }
        }
        let coeff = self.terms[level].0.clone();
        let (high, high_int) = self.build(level + 1, &budget - &coeff);
        let (low, low_int) = self.build(level + 1, budget);
        let interval = high_int.shifted(&coeff).intersect(low_int);
        let result = if high == low {
            // The function does not depend on this level for these budgets.
            high
        } else {
            let idx = self.nodes.len() as u32;
            self.nodes.push(BddNode { level, high, low });
            BddRef::Node(idx)
        };
        self.memo[level].push((interval.clone(), result));
        (result, interval)
    }
}

/// Builds the reduced ordered BDD of `sum(ai * li) <= b` with the
/// constraint's term order as decision order.
pub fn build_robdd(r: &RawConstraint) -> Bdd {
    let mut builder = Builder::new(r);
    let (root, _) = builder.build(0, r.bound().clone());
    Bdd {
        nodes: builder.nodes,
        root,
    }
}

/// Encodes the BDD with one auxiliary variable per node. A node `d`
/// branching on `l` towards children `h` and `lo` contributes
/// `(~d | ~l | Dh)` and `(~d | Dlo)`, where a true child drops its clause
/// and a false child drops its disjunct; a unit clause asserts the root.
/// Valid because the normalized constraint is monotone: taking a literal
/// can only lose satisfying suffixes, so the high child implies the low
/// child.
pub fn encode_bdd(r: &RawConstraint, alloc: &mut VarAllocator) -> CnfFormula {
    let bdd = build_robdd(r);
    let mut out = FormulaBuilder::new(alloc);
    match bdd.root() {
        BddRef::True => return out.finish(),
        BddRef::False => {
            out.push(Vec::new());
            return out.finish();
        }
        BddRef::Node(_) => {}
    }
    let node_vars: Vec<Literal> = bdd.nodes().iter().map(|_| out.fresh().pos_lit()).collect();
    let root_var = match bdd.root() {
        BddRef::Node(i) => node_vars[i as usize],
        _ => unreachable!(),
    };
    out.push(vec![root_var]);
    for (idx, node) in bdd.nodes().iter().enumerate() {
        let d = node_vars[idx];
        let branch = r.terms()[node.level].1;
        match node.high {
            BddRef::True => {}
            BddRef::False => out.push(vec![d.negated(), branch.negated()]),
            BddRef::Node(j) => {
                out.push(vec![d.negated(), branch.negated(), node_vars[j as usize]])
            }
        }
        match node.low {
            BddRef::True => {}
            BddRef::False => out.push(vec![d.negated()]),
            BddRef::Node(j) => out.push(vec![d.negated(), node_vars[j as usize]]),
        }
    }
    out.finish()
}
