//! Compilation of tagged pseudo-Boolean inequality constraints into CNF
//! (DIMACS) or normalized pseudo-Boolean (OPB) form.
//!
//! The pipeline: build an [`model::InputModel`] of constraints
//! `a1*l1 + ... + an*ln <= b` tagged with integers, assign encoders to
//! tags on an output problem, then read the model to translate every
//! constraint with the encoders its tags select.
//!
//! ```
//! use pbcnf::model::{make_leq, InputModel, TagContext};
//! use pbcnf::output::CnfProblem;
//! use pbcnf::encode::EncoderId;
//!
//! let mut m = InputModel::new();
//! let x: Vec<_> = (0..3).map(|_| m.new_variable()).collect();
//! let mut ctx = TagContext::new();
//! ctx.set_tags(&[1]).unwrap();
//! let q = make_leq(
//!     &[5i64, 3, 1],
//!     &[x[0].pos_lit(), x[1].neg_lit(), x[2].pos_lit()],
//!     8i64,
//!     &ctx,
//! )
//! .unwrap();
//! m.add_constraint(q).unwrap();
//!
//! let mut out = CnfProblem::new();
//! out.assign_encoder(1, EncoderId::Direct).unwrap();
//! out.read(&m).unwrap();
//! assert_eq!(out.get_output().unwrap(), "p cnf 3 1\n-1 2 -3 0\n");
//! ```

pub mod encode;
pub mod model;
pub mod normalize;
pub mod output;
pub mod verify;

pub use encode::{CnfFormula, Clause, EncoderId, PbOutputConstraint, VarAllocator};
pub use model::{make_eq, make_leq, InputModel, Literal, ModelError, TagContext, Variable};
pub use normalize::{to_raw, NormalizeResult, NormalizeStatus, RawConstraint};
pub use output::{CnfProblem, OutputError, PbProblem};
