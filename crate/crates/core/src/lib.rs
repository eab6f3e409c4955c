//! Matrix properties of finitely complete categories.
//!
//! An extended matrix of variables determines a property of relations: a
//! relation is strictly closed under the matrix when every row-wise
//! interpretation whose left columns lie in the relation also has its right
//! column in the relation. This crate decides implications between such
//! properties, classifies matrices as trivial, anti-trivial or
//! non-degenerate, places them relative to the Mal'tsev and majority
//! matrices, and builds the posets of matrix classes for small shapes.

pub mod canonical;
pub mod classifier;
pub mod degeneracy;
pub mod engine;
mod error;
pub mod finite_models;
pub mod format;
pub mod matrix;
pub mod poset;

pub use canonical::{canonicalize, CanonicalMatrix};
pub use degeneracy::{degeneracy_class, is_anti_trivial, is_trivial, DegeneracyTag, TruthTable};
pub use engine::{equivalent_lex, implies_lex, implies_lex_with, Limits};
pub use error::{Error, Result};
pub use format::{parse_matrix, render_matrix, Format};
pub use matrix::{ari, gen_mn, gen_named, maj, mal, validate, Column, Matrix, Named, VarId};
