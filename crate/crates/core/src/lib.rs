//! Exact real-RAM toolkit.
//!
//! Everything here runs on exact arbitrary-precision arithmetic: a word/real
//! RAM interpreter with cost accounting, the rounding-based factoring
//! pipeline, straight-line programs with a sign oracle and a computation
//! tracer, reduction passes over existential real-arithmetic formulas, and an
//! exact rational geometry kit (duality, von Staudt gadgets, pseudoline
//! arrangements and the reductions built on them).

pub mod etr;
pub mod exactnum;
pub mod geometry;
pub mod machine;
pub mod realalgo;
pub mod slp;

pub use exactnum::{BigInt, Rational};
