//! Term rewriting engine and finite-algebra workbench for n-valued
//! classical logic: deciding validity by normalization to canonical
//! decision trees, embedding finite tabular logics via truth-table
//! synthesis, and exhaustively verifying representation theorems on
//! finite algebras.

pub mod algebra;
pub mod canon;
pub mod hnf;
pub mod logics;
pub mod power;
pub mod semantics;
pub mod term;
