//! Symbolic sequences and their ideal limits.

mod analysis;
mod block;
mod construct;
mod double;
mod symseq;
mod term;

pub use analysis::*;
pub use construct::{compress, decompose, Compression, Decomposition, POINTWISE_CHECK};
pub use block::BlockSeq;
pub use double::{decompose_double, DoubleDecomposition, DoubleSeq};
pub use symseq::{Piece, SymSeq};
pub use term::{apply_chain, first_reaching, Chain, Decay, DecayKind, GenTerm, Growth, Step, TermLimit};

use crate::ideals::IdealError;
use crate::natset::SetError;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SeqError {
    #[error(transparent)]
    Set(#[from] SetError),
    #[error(transparent)]
    Ideal(#[from] IdealError),
    #[error("not convergent: {0}")]
    NotConvergent(String),
    #[error("undecidable: {0}")]
    Undecidable(String),
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("invalid sequence: {0}")]
    Invalid(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("schema error: {0}")]
    Schema(String),
}
