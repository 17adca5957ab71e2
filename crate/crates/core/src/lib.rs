//! Exact asymptotic densities of symbolic subsets of the naturals, symbolic infinite
//! utility streams, the Pareto dominance hierarchy, social welfare functions, and
//! finite-truncation checks of two classic impossibility constructions.

pub mod axioms;
pub mod corpus;
pub mod gadgets;
pub mod num;
pub mod setalg;
pub mod sternbrocot;
pub mod streams;
pub mod swf;

pub use setalg::{DensityBound, DensityResult, Finiteness, IndexSet, SetError};
