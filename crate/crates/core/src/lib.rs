//! First-order term rewriting and a checker for termination certificates
//! built from dependency pairs, dependency-graph decompositions and
//! polynomial interpretations.

pub mod checker;
pub mod dp;
pub mod graph;
pub mod io;
pub mod poly;
pub mod rewrite;
pub mod term;
pub mod unify;

#[cfg(test)]
mod testing;
