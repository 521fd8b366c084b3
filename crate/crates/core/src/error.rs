//! Crate-wide error type.
//!
//! Every fallible operation in the library returns [`Result`]. Violations of
//! mathematical invariants that the library itself guarantees (as opposed to
//! bad caller input) are reported through dedicated variants carrying a
//! witness, so a falsified identity is always accompanied by the data that
//! falsifies it.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// The characteristic passed to a field constructor is not prime.
    #[error("{0} is not prime")]
    NonPrime(usize),

    /// A construction would exceed the supported desk-scale bounds.
    #[error("size bound exceeded: {0}")]
    SizeExceeded(String),

    /// Malformed caller input that is not covered by a more specific variant.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A vector or matrix has the wrong dimension for the ambient space.
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    /// Partial basis data does not satisfy the pairing relations required of
    /// the standard-basis slots it is assigned to.
    #[error("basis assignment violates the required pairing relations: {0}")]
    GramMismatch(String),

    /// The matrix does not scale the form by any nonzero constant.
    #[error("matrix does not preserve the form up to a nonzero scalar")]
    NotGsp,

    /// The tower's base field or degree does not match the form context.
    #[error("field tower does not match the form context")]
    TowerMismatch,

    /// A strong-regularity count came out wrong; `(u, v)` is the offending
    /// pair (`u == v` reports a degree failure).
    #[error("not strongly regular: pair ({u},{v}) has count {found}, expected {expected}")]
    NotSrg {
        u: usize,
        v: usize,
        found: usize,
        expected: usize,
    },

    /// Unknown or empty export format name.
    #[error("unsupported export format: {0:?}")]
    FormatUnsupported(String),

    /// A color class contains an edge.
    #[error("coloring is not proper: class contains the edge ({u},{v})")]
    ImproperColoring { u: usize, v: usize },

    /// A cross-class neighbour count differs from the predicted constant.
    #[error("vertex {v} has {found} neighbours in class {class}, expected {expected}")]
    CountMismatch {
        v: usize,
        class: usize,
        found: usize,
        expected: usize,
    },

    /// An edge-transitivity witness was requested for a non-edge.
    #[error("({a},{b}) is not an edge")]
    NotAnEdge { a: usize, b: usize },

    /// The supplied vertex map does not preserve adjacency.
    #[error("permutation is not a graph automorphism")]
    NotAutomorphism,

    /// Factor extraction from an automorphism failed; the message records
    /// which structural step broke.
    #[error("factor extraction failed: {0}")]
    ExtractionMismatch(String),

    /// The recovered vertex map over the two-element field is not additive;
    /// `b1`, `b2` are the vector codes of a failing pair.
    #[error("vertex map is not additive on vector pair ({b1}, {b2})")]
    AdditivityFail { b1: usize, b2: usize },

    /// One of the scalar-family identities failed at the recorded arguments.
    #[error("scalar-family identity violated at map {index} with a={a}, b={b}")]
    IdentityViolated { index: usize, a: usize, b: usize },

    /// Malformed graph6 input.
    #[error("graph6 decode error: {0}")]
    DecodeError(String),
}
