//! Finite relational structures: signatures, models, pointed models, and
//! binary words, together with generators, validators, and file I/O.
//!
//! A model is immutable after construction and safe to share across threads
//! for read-only use. All iteration (nodes, interpretation sets, successor
//! lists) follows the stored domain order, so downstream runs are reproducible
//! bit for bit.

mod generate;
mod io;
mod model;
mod validate;
mod word;

pub use generate::{build_cycle_model, build_path_model};
pub use io::{load_model, save_model};
pub use model::{Model, NodeId, PointedModel, Signature};
pub use validate::{
    validate_pn, validate_sb, PnReport, PnViolation, SbReport, SbViolation, Subject,
};
pub use word::{thue_morse_prefix, Word};

use thiserror::Error;

/// Errors raised while constructing, querying, or parsing models.
#[derive(Debug, Error)]
pub enum StructureError {
    #[error("duplicate symbol '{0}' in signature")]
    DuplicateSymbol(String),
    #[error("empty domain: a model needs at least one node")]
    EmptyDomain,
    #[error("duplicate node '{0}' in domain")]
    DuplicateNode(String),
    #[error("unknown node '{0}'")]
    UnknownNode(String),
    #[error("unknown unary symbol '{0}'")]
    UnknownUnarySymbol(String),
    #[error("unknown binary symbol '{0}'")]
    UnknownBinarySymbol(String),
    #[error("duplicate entry for symbol '{0}'")]
    DuplicateInterpretation(String),
    #[error("duplicate node '{node}' in interpretation of '{symbol}'")]
    DuplicateMember { symbol: String, node: String },
    #[error("duplicate pair ({from},{to}) in interpretation of '{symbol}'")]
    DuplicatePair {
        symbol: String,
        from: String,
        to: String,
    },
    #[error("signature mismatch: {0}")]
    SignatureMismatch(String),
    #[error("empty word")]
    EmptyWord,
    #[error("word symbol '{0}' is not 0 or 1")]
    BadWordSymbol(char),
    #[error("prefix length must be at least 1")]
    ZeroLength,
    #[error("cycle needs at least 3 nodes, got {0}")]
    CycleTooShort(usize),
    #[error("parse error at {path}: {message}")]
    Parse { path: String, message: String },
}
