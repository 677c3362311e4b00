//! Output problems: tag dispatch, the translation pass, variable
//! numbering, and bit-exact DIMACS respectively OPB serialization.
//!
//! An output problem starts fresh, collects encoder assignments per tag,
//! reads an input model exactly once, and serializes afterwards. During
//! the read, every constraint is normalized; its forced literals come out
//! as unit clauses (or unit pseudo-Boolean constraints), the residual goes
//! through each encoder any of its tags selects, once per (tag, encoder)
//! pair and in that order. Input variables keep their ids, auxiliaries
//! continue numbering from `input_count + 1` in allocation order.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_bigint::BigInt;
use thiserror::Error;

use crate::encode::{
    encode_pb_basic, Clause, CnfFormula, EncoderId, PbOutputConstraint, VarAllocator,
};
use crate::model::{InputModel, Literal};
use crate::normalize::{to_raw, NormalizeStatus};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OutputError {
    #[error("encoder `{encoder}` does not produce {expected} output")]
    EncoderKindMismatch {
        encoder: EncoderId,
        expected: &'static str,
    },
    #[error("the input model was already read")]
    AlreadyRead,
    #[error("no input model has been read yet")]
    NotYetRead,
    #[error("constraint {index} with tags {tags:?} matches no assigned encoder")]
    UnassignedConstraint { index: usize, tags: Vec<i32> },
}

/// Ordered encoder lists per tag; assignment order within a tag is the
/// translation order.
#[derive(Debug, Clone, Default)]
pub struct EncoderAssignment {
    by_tag: BTreeMap<i32, Vec<EncoderId>>,
}

impl EncoderAssignment {
    pub fn assign(&mut self, tag: i32, encoder: EncoderId) {
        self.by_tag.entry(tag).or_default().push(encoder);
    }

    pub fn encoders_for(&self, tag: i32) -> &[EncoderId] {
        self.by_tag.get(&tag).map_or(&[], Vec::as_slice)
    }

    /// The (tag, encoder) pairs translating a constraint with these tags,
    /// tags ascending, assignment order within each tag.
    fn pairs_for(&self, tags: &std::collections::BTreeSet<i32>) -> Vec<(i32, EncoderId)> {
        let mut pairs = Vec::new();
        for tag in tags {
            for e in self.encoders_for(*tag) {
                pairs.push((*tag, *e));
            }
        }
        pairs
    }
}

/// Per-(constraint, tag, encoder) translation counters, for diagnostics.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TranslationRecord {
    pub constraint_index: usize,
    pub tag: i32,
    pub encoder: EncoderId,
    pub clauses: usize,
    pub aux_vars: usize,
}

/// A CNF output problem serialized as DIMACS.
#[derive(Debug, Default)]
pub struct CnfProblem {
    assignment: EncoderAssignment,
    comments: Vec<String>,
    read: Option<CnfReadState>,
}

#[derive(Debug)]
struct CnfReadState {
    formula: CnfFormula,
    input_vars: u32,
    records: Vec<TranslationRecord>,
}

impl CnfProblem {
    pub fn new() -> Self {
        CnfProblem::default()
    }

    /// Appends a CNF encoder to the tag's list. Several encoders on one tag
    /// translate matching constraints redundantly, in assignment order.
    pub fn assign_encoder(&mut self, tag: i32, encoder: EncoderId) -> Result<(), OutputError> {
        if self.read.is_some() {
            return Err(OutputError::AlreadyRead);
        }
        if !encoder.is_cnf() {
            return Err(OutputError::EncoderKindMismatch {
                encoder,
                expected: "CNF",
            });
        }
        self.assignment.assign(tag, encoder);
        Ok(())
    }

    /// Adds a `c`-prefixed comment line emitted ahead of the DIMACS header.
    pub fn add_comment(&mut self, line: &str) {
        self.comments.push(line.to_string());
    }

    /// Translates the model. Usable exactly once; fails without touching
    /// the problem when some constraint matches no assigned encoder.
    pub fn read(&mut self, m: &InputModel) -> Result<(), OutputError> {
        if self.read.is_some() {
            return Err(OutputError::AlreadyRead);
        }
        let plan = plan_translation(&self.assignment, m)?;

        let mut alloc = VarAllocator::for_model(m);
        let mut formula = CnfFormula::new();
        let mut records = Vec::new();
        for (index, q) in m.constraints().iter().enumerate() {
            let norm = to_raw(q);
            for (tag, encoder) in &plan[index] {
                let clauses_before = formula.clause_count();
                let aux_before = formula.aux_count();
                match norm.status {
                    NormalizeStatus::Unsat => formula.push_clause(Clause::empty()),
                    _ => {
                        for f in &norm.forced {
                            formula.push_clause(Clause::unit(*f));
                        }
                        if let Some(residual) = &norm.residual {
                            formula.append(encoder.encode_cnf(residual, &mut alloc));
                        }
                    }
                }
                records.push(TranslationRecord {
                    constraint_index: index,
                    tag: *tag,
                    encoder: *encoder,
                    clauses: formula.clause_count() - clauses_before,
                    aux_vars: formula.aux_count() - aux_before,
                });
            }
        }
        self.read = Some(CnfReadState {
            formula,
            input_vars: m.variable_count(),
            records,
        });
        Ok(())
    }

    pub fn formula(&self) -> Result<&CnfFormula, OutputError> {
        self.read
            .as_ref()
            .map(|s| &s.formula)
            .ok_or(OutputError::NotYetRead)
    }

    pub fn input_variable_count(&self) -> Result<u32, OutputError> {
        self.read
            .as_ref()
            .map(|s| s.input_vars)
            .ok_or(OutputError::NotYetRead)
    }

    pub fn records(&self) -> Result<&[TranslationRecord], OutputError> {
        self.read
            .as_ref()
            .map(|s| s.records.as_slice())
            .ok_or(OutputError::NotYetRead)
    }

    /// The DIMACS text: `p cnf <vars> <clauses>`, one clause per line,
    /// zero-terminated, newline after every line.
    pub fn get_output(&self) -> Result<String, OutputError> {
        let state = self.read.as_ref().ok_or(OutputError::NotYetRead)?;
        let vars = state.input_vars as usize + state.formula.aux_count();
        let mut text = String::new();
        for line in &self.comments {
            writeln!(text, "c {line}").unwrap();
        }
        writeln!(text, "p cnf {} {}", vars, state.formula.clause_count()).unwrap();
        for clause in state.formula.clauses() {
            for lit in clause.lits() {
                let id = lit.var().id() as i64;
                let signed = if lit.is_positive() { id } else { -id };
                write!(text, "{signed} ").unwrap();
            }
            writeln!(text, "0").unwrap();
        }
        Ok(text)
    }
}

/// A pseudo-Boolean output problem serialized as OPB.
#[derive(Debug, Default)]
pub struct PbProblem {
    assignment: EncoderAssignment,
    read: Option<PbReadState>,
}

#[derive(Debug)]
struct PbReadState {
    constraints: Vec<PbOutputConstraint>,
    input_vars: u32,
    records: Vec<TranslationRecord>,
    unsat_without_vars: bool,
}

impl PbProblem {
    pub fn new() -> Self {
        PbProblem::default()
    }

    pub fn assign_encoder(&mut self, tag: i32, encoder: EncoderId) -> Result<(), OutputError> {
        if self.read.is_some() {
            return Err(OutputError::AlreadyRead);
        }
        if encoder.is_cnf() {
            return Err(OutputError::EncoderKindMismatch {
                encoder,
                expected: "pseudo-Boolean",
            });
        }
        self.assignment.assign(tag, encoder);
        Ok(())
    }

    pub fn read(&mut self, m: &InputModel) -> Result<(), OutputError> {
        if self.read.is_some() {
            return Err(OutputError::AlreadyRead);
        }
        let plan = plan_translation(&self.assignment, m)?;

        let mut constraints: Vec<PbOutputConstraint> = Vec::new();
        let mut records = Vec::new();
        let mut unsat_without_vars = false;
        for (index, q) in m.constraints().iter().enumerate() {
            let norm = to_raw(q);
            for (tag, encoder) in &plan[index] {
                let before = constraints.len();
                match norm.status {
                    NormalizeStatus::Unsat => {
                        // No empty pseudo-Boolean constraint is portable;
                        // demand the impossible of the first variable.
                        if m.variable_count() > 0 {
                            let v = q.lits()[0].var();
                            constraints.push(PbOutputConstraint::new(
                                vec![(BigInt::from(1), v)],
                                BigInt::from(2),
                            ));
                        } else {
                            unsat_without_vars = true;
                        }
                    }
                    _ => {
                        for f in &norm.forced {
                            constraints.push(unit_pb(*f));
                        }
                        if let Some(residual) = &norm.residual {
                            constraints.push(encode_pb_basic(residual));
                        }
                    }
                }
                records.push(TranslationRecord {
                    constraint_index: index,
                    tag: *tag,
                    encoder: *encoder,
                    clauses: constraints.len() - before,
                    aux_vars: 0,
                });
            }
        }
        self.read = Some(PbReadState {
            constraints,
            input_vars: m.variable_count(),
            records,
            unsat_without_vars,
        });
        Ok(())
    }

    pub fn constraints(&self) -> Result<&[PbOutputConstraint], OutputError> {
        self.read
            .as_ref()
            .map(|s| s.constraints.as_slice())
            .ok_or(OutputError::NotYetRead)
    }

    pub fn records(&self) -> Result<&[TranslationRecord], OutputError> {
        self.read
            .as_ref()
            .map(|s| s.records.as_slice())
            .ok_or(OutputError::NotYetRead)
    }

    /// The OPB text: a count header comment, then one `>=` constraint per
    /// line with explicitly signed coefficients over plain variables.
    pub fn get_output(&self) -> Result<String, OutputError> {
        let state = self.read.as_ref().ok_or(OutputError::NotYetRead)?;
        let mut text = String::new();
        writeln!(
            text,
            "* #variable= {} #constraint= {}",
            state.input_vars,
            state.constraints.len()
        )
        .unwrap();
        if state.unsat_without_vars {
            writeln!(text, "* unsat").unwrap();
        }
        for c in &state.constraints {
            for (coeff, var) in c.terms() {
                let sign = if coeff >= &BigInt::from(0) { "+" } else { "" };
                write!(text, "{sign}{coeff} x{} ", var.id()).unwrap();
            }
            writeln!(text, ">= {} ;", c.bound()).unwrap();
        }
        Ok(text)
    }
}

/// Validates dispatch for the whole model up front so a failed read leaves
/// the problem fresh. Returns the (tag, encoder) pairs per constraint.
fn plan_translation(
    assignment: &EncoderAssignment,
    m: &InputModel,
) -> Result<Vec<Vec<(i32, EncoderId)>>, OutputError> {
    let mut plan = Vec::with_capacity(m.constraints().len());
    for (index, q) in m.constraints().iter().enumerate() {
        let pairs = assignment.pairs_for(q.tags());
        if pairs.is_empty() {
            return Err(OutputError::UnassignedConstraint {
                index,
                tags: q.tags().iter().copied().collect(),
            });
        }
        plan.push(pairs);
    }
    Ok(plan)
}

/// A forced literal as a pseudo-Boolean unit: `x` becomes `+1 x >= 1`,
/// `~x` becomes `-1 x >= 0`.
fn unit_pb(lit: Literal) -> PbOutputConstraint {
    if lit.is_positive() {
        PbOutputConstraint::new(vec![(BigInt::from(1), lit.var())], BigInt::from(1))
    } else {
        PbOutputConstraint::new(vec![(BigInt::from(-1), lit.var())], BigInt::from(0))
    }
}
