//! The translation pipeline behind the command line: OPB text in, DIMACS
//! or normalized OPB text out.
//!
//! OPB has no tag syntax, so tags are synthesized: with a single default
//! encoder every constraint is tagged 1; with per-tag bindings the n-th
//! constraint of the file is tagged n, which lets a binding pick encoders
//! per constraint.

use num_bigint::BigInt;
use num_traits::Zero;
use thiserror::Error;

use pbcnf::encode::EncoderId;
use pbcnf::model::{make_eq, make_leq, InputModel, Literal, ModelError, TagContext, Variable};
use pbcnf::normalize::{to_raw, NormalizeStatus};
use pbcnf::output::{CnfProblem, OutputError, PbProblem, TranslationRecord};

use crate::opb::{OpbConstraint, OpbDocument, OpbError, Relation};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CliError {
    #[error(transparent)]
    Opb(#[from] OpbError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Output(#[from] OutputError),
    #[error("unknown encoder `{name}` (expected direct, bdd, adder, watchdog, bargraph or pb)")]
    UnknownEncoder { name: String },
    #[error("encoder `{encoder}` cannot feed {kind} output")]
    EncoderKind { encoder: EncoderId, kind: &'static str },
    #[error("tag binding {tag} refers to no constraint (the file has {count})")]
    TagWithoutConstraint { tag: i32, count: usize },
    #[error("line {line}: constraint has no literals left and cannot be satisfied")]
    ConstraintInfeasible { line: usize },
    #[error("line {line}: the equality cannot be satisfied ({source})")]
    EqualityInfeasible { line: usize, source: ModelError },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputKind {
    Dimacs,
    Opb,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EncoderSpec {
    /// One encoder for every constraint (all tagged 1).
    Default(EncoderId),
    /// Per-tag encoder lists; constraint n carries tag n.
    PerTag(Vec<(i32, Vec<EncoderId>)>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunOutput {
    /// The DIMACS or OPB text for the primary stream.
    pub text: String,
    /// Comment-prefixed statistics block for the diagnostic stream.
    pub stats: Option<String>,
    /// Some constraint normalized to an unsatisfiable form; the formula is
    /// still emitted, the caller signals the condition.
    pub unsat_detected: bool,
}

/// Signed OPB terms turned into the positive-coefficient `<=` form via
/// `x = 1 - ~x`: a negative term flips its literal and charges the bound.
fn leq_parts(
    terms: &[(BigInt, u32)],
    bound: &BigInt,
    vars: &[Variable],
) -> (Vec<BigInt>, Vec<Literal>, BigInt) {
    let mut coeffs = Vec::with_capacity(terms.len());
    let mut lits = Vec::with_capacity(terms.len());
    let mut new_bound = bound.clone();
    for (c, id) in terms {
        let var = vars[(*id - 1) as usize];
        if c.is_zero() {
            continue;
        }
        if *c > BigInt::zero() {
            coeffs.push(c.clone());
            lits.push(var.pos_lit());
        } else {
            coeffs.push(-c);
            lits.push(var.neg_lit());
            new_bound -= c;
        }
    }
    (coeffs, lits, new_bound)
}

fn build_constraints(
    parsed: &OpbConstraint,
    vars: &[Variable],
    ctx: &TagContext,
) -> Result<Vec<pbcnf::model::PbLeqConstraint>, CliError> {
    let (terms, bound) = match parsed.relation {
        Relation::Le | Relation::Eq => (parsed.terms.clone(), parsed.bound.clone()),
        Relation::Ge => (
            parsed.terms.iter().map(|(c, v)| (-c, *v)).collect(),
            -parsed.bound.clone(),
        ),
    };
    let (coeffs, lits, bound) = leq_parts(&terms, &bound, vars);
    if lits.is_empty() {
        let holds = match parsed.relation {
            Relation::Eq => bound.is_zero(),
            _ => bound >= BigInt::zero(),
        };
        return if holds {
            Ok(Vec::new())
        } else {
            Err(CliError::ConstraintInfeasible { line: parsed.line })
        };
    }
    match parsed.relation {
        Relation::Le | Relation::Ge => Ok(vec![make_leq(&coeffs, &lits, bound, ctx)?]),
        Relation::Eq => match make_eq(&coeffs, &lits, bound, ctx) {
            Ok((upper, lower)) => Ok(vec![upper, lower]),
            Err(source @ ModelError::EqualityBoundOutOfRange { .. }) => {
                Err(CliError::EqualityInfeasible {
                    line: parsed.line,
                    source,
                })
            }
            Err(other) => Err(other.into()),
        },
    }
}

/// Builds the input model a document describes, tagging constraints by the
/// rule the encoder spec implies: all 1 for a default encoder, the 1-based
/// file position with per-tag bindings.
pub fn build_model(doc: &OpbDocument, encoders: &EncoderSpec) -> Result<InputModel, CliError> {
    let mut model = InputModel::new();
    let vars: Vec<Variable> = (0..doc.variable_count())
        .map(|_| model.new_variable())
        .collect();
    let mut ctx = TagContext::new();
    for (index, parsed) in doc.constraints.iter().enumerate() {
        let tag = match encoders {
            EncoderSpec::Default(_) => 1,
            EncoderSpec::PerTag(_) => (index + 1) as i32,
        };
        ctx.set_tags(&[tag]).expect("one tag is always valid");
        for q in build_constraints(parsed, &vars, &ctx)? {
            model.add_constraint(q).expect("variables come from this model");
        }
    }
    Ok(model)
}

/// Runs the whole pipeline on parsed input.
pub fn translate(
    doc: &OpbDocument,
    output_kind: OutputKind,
    encoders: &EncoderSpec,
    stats: bool,
) -> Result<RunOutput, CliError> {
    // Validate encoder kinds and tag bindings before building anything.
    let kind_name = match output_kind {
        OutputKind::Dimacs => "DIMACS",
        OutputKind::Opb => "OPB",
    };
    let bindings: Vec<(i32, Vec<EncoderId>)> = match encoders {
        EncoderSpec::Default(e) => vec![(1, vec![*e])],
        EncoderSpec::PerTag(bindings) => bindings.clone(),
    };
    for (tag, list) in &bindings {
        if matches!(encoders, EncoderSpec::PerTag(_))
            && (*tag < 1 || *tag as usize > doc.constraints.len())
        {
            return Err(CliError::TagWithoutConstraint {
                tag: *tag,
                count: doc.constraints.len(),
            });
        }
        for e in list {
            let compatible = match output_kind {
                OutputKind::Dimacs => e.is_cnf(),
                OutputKind::Opb => !e.is_cnf(),
            };
            if !compatible {
                return Err(CliError::EncoderKind {
                    encoder: *e,
                    kind: kind_name,
                });
            }
        }
    }

    let model = build_model(doc, encoders)?;

    let unsat_detected = model
        .constraints()
        .iter()
        .any(|q| to_raw(q).status == NormalizeStatus::Unsat);

    let (text, records, vars_total): (String, Vec<TranslationRecord>, usize) = match output_kind {
        OutputKind::Dimacs => {
            let mut out = CnfProblem::new();
            for (tag, list) in &bindings {
                for e in list {
                    out.assign_encoder(*tag, *e)?;
                }
            }
            out.read(&model)?;
            let total = model.variable_count() as usize + out.formula()?.aux_count();
            (out.get_output()?, out.records()?.to_vec(), total)
        }
        OutputKind::Opb => {
            let mut out = PbProblem::new();
            for (tag, list) in &bindings {
                for e in list {
                    out.assign_encoder(*tag, *e)?;
                }
            }
            out.read(&model)?;
            let total = model.variable_count() as usize;
            (out.get_output()?, out.records()?.to_vec(), total)
        }
    };

    let stats = stats.then(|| {
        let prefix = match output_kind {
            OutputKind::Dimacs => "c",
            OutputKind::Opb => "*",
        };
        let mut block = String::new();
        let mut clause_total = 0;
        let mut aux_total = 0;
        for r in &records {
            clause_total += r.clauses;
            aux_total += r.aux_vars;
            block.push_str(&format!(
                "{prefix} constraint={} tag={} encoder={} clauses={} aux={}\n",
                r.constraint_index + 1,
                r.tag,
                r.encoder,
                r.clauses,
                r.aux_vars
            ));
        }
        block.push_str(&format!(
            "{prefix} total clauses={clause_total} aux={aux_total} vars={vars_total}\n"
        ));
        block
    });

    Ok(RunOutput {
        text,
        stats,
        unsat_detected,
    })
}

/// Parses an encoder name as used on the command line.
pub fn encoder_by_name(name: &str) -> Result<EncoderId, CliError> {
    EncoderId::parse(name).ok_or_else(|| CliError::UnknownEncoder {
        name: name.to_string(),
    })
}

/// Parses one `--tag` binding of the form `<n>=<name>[,<name>...]`.
pub fn parse_tag_binding(value: &str) -> Result<(i32, Vec<EncoderId>), CliError> {
    let err = || CliError::UnknownEncoder {
        name: value.to_string(),
    };
    let (tag, names) = value.split_once('=').ok_or_else(err)?;
    let tag: i32 = tag.trim().parse().map_err(|_| err())?;
    let encoders = names
        .split(',')
        .map(|n| encoder_by_name(n.trim()))
        .collect::<Result<Vec<_>, _>>()?;
    if encoders.is_empty() {
        return Err(err());
    }
    Ok((tag, encoders))
}
