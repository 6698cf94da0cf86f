use thiserror::Error;

use crate::atoms::Atom;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("degenerate transposition ({0} {0})")]
    DegenerateTransposition(Atom),

    #[error("no ordered form of empty partition")]
    EmptyPartition,

    #[error("arity must be positive")]
    ZeroArity,

    #[error("invalid fresh tuple: {0}")]
    InvalidFreshTuple(String),

    #[error("arity mismatch: expected {expected}, found {found}")]
    ArityMismatch { expected: usize, found: usize },

    #[error("frame {target:?} does not contain the current support {current:?}")]
    NotASuperset { current: Vec<Atom>, target: Vec<Atom> },

    #[error("membership not supported by P: {0}")]
    NotSupported(String),

    #[error("tuple not in cell")]
    TupleNotInCell,

    #[error("invalid cell {cell} for arity {n} and support size {q}")]
    InvalidCell { cell: String, n: usize, q: usize },

    #[error("partition block index {index} exceeds arity {n}")]
    BlockIndexOutOfRange { index: usize, n: usize },

    #[error("enum index out of range: t={t}, i={i}, n={n}")]
    EnumRange { t: usize, i: usize, n: usize },

    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },

    #[error("predicate variable {var} has arity {expected} but is applied to {found} arguments")]
    PredicateArity {
        var: String,
        expected: usize,
        found: usize,
    },

    #[error("formula uses reserved variable {0}")]
    ReservedVariable(String),

    #[error("unbound variable {0}")]
    UnboundVariable(String),

    #[error("atom {atom} is outside the finite domain of size {size}")]
    OutOfDomain { atom: u32, size: u32 },

    #[error("finite domain size {0} is out of range (1..=4)")]
    DomainSize(u32),

    #[error("antecedent fails")]
    AntecedentFails,

    #[error("no witness within bounds for cell {0}")]
    NoWitness(String),

    #[error("unknown suite name {0:?}")]
    UnknownSuite(String),
}
