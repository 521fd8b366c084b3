//! Symplectic graphs over small prime-power fields.
//!
//! The graph Sp(2ν, q) has the one-dimensional subspaces of F_q^{2ν} as
//! vertices, two of them adjacent exactly when they are non-orthogonal with
//! respect to the standard alternating form. This crate builds these graphs
//! for desk-scale parameters and machine-checks their structure exactly:
//!
//! * strong regularity and the integer spectrum ([`graph`]),
//! * proper colorings from symplectic spreads and the chromatic number
//!   ([`spread`]),
//! * the automorphism group: matrix-induced maps, the coordinate subgroup
//!   fixing the standard basis, factorization of arbitrary automorphisms,
//!   and an independent partition-backtracking search that recomputes the
//!   group order from adjacency alone ([`aut`]).
//!
//! All arithmetic is exact; there are no floating-point numbers anywhere.

pub mod aut;
pub mod error;
pub mod gf;
pub mod graph;
pub mod spread;
pub mod symplectic;

pub use error::{Error, Result};
