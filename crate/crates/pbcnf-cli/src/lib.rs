//! Library surface of the `pbcnf` command line tool: the OPB reader and
//! the translation pipeline, kept callable for tests and embedding.

pub mod opb;
pub mod run;

pub use opb::{parse_opb, OpbDocument, OpbError};
pub use run::{translate, CliError, EncoderSpec, OutputKind, RunOutput};
