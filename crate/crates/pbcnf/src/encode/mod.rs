//! Translation of one [`RawConstraint`] into output constraints.
//!
//! Five CNF encoders are available, trading output size against the
//! strength of unit propagation on the result:
//!
//! | encoder    | size                     | propagation strength        |
//! |------------|--------------------------|-----------------------------|
//! | `direct`   | exponential              | forces like arc consistency |
//! | `bdd`      | exponential in general   | forces like arc consistency |
//! | `adder`    | linear                   | detects only complete violations |
//! | `watchdog` | polynomial               | forces like arc consistency |
//! | `bargraph` | polynomial, smallest     | detects inconsistency only  |
//!
//! A sixth encoder, [`encode_pb_basic`], rewrites the constraint into the
//! normalized `>=` form used by OPB output instead of producing clauses.

use std::fmt;

use num_bigint::BigInt;

use crate::model::{Literal, ModelId, Variable};
use crate::normalize::RawConstraint;

mod adder;
mod bdd;
mod direct;
mod totalizer;
mod watchdog;

pub use adder::encode_adder;
pub use bdd::{build_robdd, encode_bdd, Bdd, BddNode, BddRef};
pub use direct::encode_direct;
pub use totalizer::totalizer;
pub use watchdog::{encode_bargraph, encode_watchdog};

/// A disjunction of literals. Construction removes duplicate literals and
/// rejects tautologies (a variable together with its negation).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Clause {
    lits: Vec<Literal>,
}

impl Clause {
    /// Returns `None` when the clause would be tautological. Duplicates are
    /// dropped, keeping the first occurrence so literal order is preserved.
    pub fn new(lits: Vec<Literal>) -> Option<Clause> {
        let mut kept: Vec<Literal> = Vec::with_capacity(lits.len());
        for l in lits {
            if kept.contains(&l) {
                continue;
            }
            if kept.contains(&l.negated()) {
                return None;
            }
            kept.push(l);
        }
        Some(Clause { lits: kept })
    }

    /// The empty clause, satisfiable by nothing.
    pub fn empty() -> Clause {
        Clause { lits: Vec::new() }
    }

    pub fn unit(lit: Literal) -> Clause {
        Clause { lits: vec![lit] }
    }

    pub fn lits(&self) -> &[Literal] {
        &self.lits
    }

    pub fn len(&self) -> usize {
        self.lits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lits.is_empty()
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, l) in self.lits.iter().enumerate() {
            if i > 0 {
                write!(f, " | ")?;
            }
            write!(f, "{l}")?;
        }
        write!(f, ")")
    }
}

/// A set of clauses over input and auxiliary variables, together with the
/// auxiliary variables allocated while producing it.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CnfFormula {
    clauses: Vec<Clause>,
    aux_vars: Vec<Variable>,
}

impl CnfFormula {
    pub fn new() -> CnfFormula {
        CnfFormula::default()
    }

    pub fn push_clause(&mut self, clause: Clause) {
        self.clauses.push(clause);
    }

    /// Appends another formula, keeping clause and allocation order.
    pub fn append(&mut self, mut other: CnfFormula) {
        self.clauses.append(&mut other.clauses);
        self.aux_vars.append(&mut other.aux_vars);
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn clause_count(&self) -> usize {
        self.clauses.len()
    }

    pub fn aux_vars(&self) -> &[Variable] {
        &self.aux_vars
    }

    pub fn aux_count(&self) -> usize {
        self.aux_vars.len()
    }

    /// Largest variable id mentioned in a clause or allocated, 0 if none.
    pub fn max_var_id(&self) -> u32 {
        let in_clauses = self
            .clauses
            .iter()
            .flat_map(|c| c.lits())
            .map(|l| l.var().id())
            .max()
            .unwrap_or(0);
        let allocated = self.aux_vars.iter().map(|v| v.id()).max().unwrap_or(0);
        in_clauses.max(allocated)
    }
}

/// Issues fresh auxiliary variables. Ids increase monotonically and are
/// never reused; one allocator is shared across all constraints of an
/// output problem so the numbering stays dense.
#[derive(Debug, Clone)]
pub struct VarAllocator {
    model: ModelId,
    next: u32,
}

impl VarAllocator {
    /// Starts numbering after the model's input variables.
    pub fn for_model(m: &crate::model::InputModel) -> VarAllocator {
        VarAllocator {
            model: m.id(),
            next: m.variable_count() + 1,
        }
    }

    /// Starts numbering after the largest variable of `r`.
    pub fn after_constraint(r: &RawConstraint) -> VarAllocator {
        let (_, first) = &r.terms()[0];
        let max_id = r.terms().iter().map(|(_, l)| l.var().id()).max().unwrap();
        VarAllocator {
            model: first.var().model_id(),
            next: max_id + 1,
        }
    }

    pub fn fresh(&mut self) -> Variable {
        let v = Variable::new(self.model, self.next);
        self.next += 1;
        v
    }

    pub fn next_id(&self) -> u32 {
        self.next
    }
}

/// Collects clauses and records the auxiliaries drawn from the shared
/// allocator, so a finished formula knows exactly which variables it
/// introduced.
pub(crate) struct FormulaBuilder<'a> {
    alloc: &'a mut VarAllocator,
    formula: CnfFormula,
}

impl<'a> FormulaBuilder<'a> {
    pub fn new(alloc: &'a mut VarAllocator) -> Self {
        FormulaBuilder {
            alloc,
            formula: CnfFormula::new(),
        }
    }

    pub fn fresh(&mut self) -> Variable {
        let v = self.alloc.fresh();
        self.formula.aux_vars.push(v);
        v
    }

    /// Pushes a clause unless it is tautological.
    pub fn push(&mut self, lits: Vec<Literal>) {
        if let Some(clause) = Clause::new(lits) {
            self.formula.push_clause(clause);
        }
    }

    pub fn finish(self) -> CnfFormula {
        self.formula
    }
}

/// Names the available encoders. CNF encoders feed a CNF output problem,
/// the `pb` encoder feeds a pseudo-Boolean one; the output layer checks the
/// kind at assignment time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EncoderId {
    Direct,
    Bdd,
    Adder,
    Watchdog,
    Bargraph,
    PbBasic,
}

impl EncoderId {
    pub const ALL_CNF: [EncoderId; 5] = [
        EncoderId::Direct,
        EncoderId::Bdd,
        EncoderId::Adder,
        EncoderId::Watchdog,
        EncoderId::Bargraph,
    ];

    pub fn name(self) -> &'static str {
        match self {
            EncoderId::Direct => "direct",
            EncoderId::Bdd => "bdd",
            EncoderId::Adder => "adder",
            EncoderId::Watchdog => "watchdog",
            EncoderId::Bargraph => "bargraph",
            EncoderId::PbBasic => "pb",
        }
    }

    pub fn parse(name: &str) -> Option<EncoderId> {
        match name {
            "direct" => Some(EncoderId::Direct),
            "bdd" => Some(EncoderId::Bdd),
            "adder" => Some(EncoderId::Adder),
            "watchdog" => Some(EncoderId::Watchdog),
            "bargraph" => Some(EncoderId::Bargraph),
            "pb" => Some(EncoderId::PbBasic),
            _ => None,
        }
    }

    pub fn is_cnf(self) -> bool {
        !matches!(self, EncoderId::PbBasic)
    }

    /// Runs the CNF encoder this id names.
    ///
    /// Panics on [`EncoderId::PbBasic`], which does not produce clauses;
    /// the output layer rejects that combination before translation.
    pub fn encode_cnf(self, r: &RawConstraint, alloc: &mut VarAllocator) -> CnfFormula {
        match self {
            EncoderId::Direct => encode_direct(r, alloc),
            EncoderId::Bdd => encode_bdd(r, alloc),
            EncoderId::Adder => encode_adder(r, alloc),
            EncoderId::Watchdog => encode_watchdog(r, alloc),
            EncoderId::Bargraph => encode_bargraph(r, alloc),
            EncoderId::PbBasic => panic!("the pb encoder does not produce CNF"),
        }
    }
}

impl fmt::Display for EncoderId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A pseudo-Boolean output constraint in OPB normal form: signed integer
/// terms over plain (unnegated) variables, relation `>=`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PbOutputConstraint {
    terms: Vec<(BigInt, Variable)>,
    bound: BigInt,
}

impl PbOutputConstraint {
    pub fn new(terms: Vec<(BigInt, Variable)>, bound: BigInt) -> Self {
        PbOutputConstraint { terms, bound }
    }

    pub fn terms(&self) -> &[(BigInt, Variable)] {
        &self.terms
    }

    pub fn bound(&self) -> &BigInt {
        &self.bound
    }
}

/// Rewrites `sum(ai * li) <= b` into OPB normal form: a negated literal
/// `a*~x` becomes `-a*x` while lowering the bound by `a`, and the whole
/// inequality is multiplied by -1 to obtain a `>=` relation over plain
/// variables.
pub fn encode_pb_basic(r: &RawConstraint) -> PbOutputConstraint {
    let mut terms = Vec::with_capacity(r.len());
    let mut rhs = -r.bound().clone();
    for (c, l) in r.terms() {
        if l.is_positive() {
            terms.push((-c.clone(), l.var()));
        } else {
            // a*~x <= ...   becomes   -a*x <= ... - a; negating flips both.
            terms.push((c.clone(), l.var()));
            rhs += c;
        }
    }
    PbOutputConstraint::new(terms, rhs)
}
