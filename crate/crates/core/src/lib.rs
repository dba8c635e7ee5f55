//! Semantic scaffolds for tabular data: predicates over records, validation of
//! model-proposed groupings, and a navigable text structure built from them.

pub mod dataset;
pub mod diagnostic;
pub mod predicate;
pub mod scaffold;
pub mod gateway;
pub mod structure;
