//! Multifractal analysis of the pointwise Assouad dimension for
//! self-similar and Bernoulli measures.
//!
//! The crate is organised in four layers:
//!
//! * [`ifs`]: weighted IFS model, validation, words and word statistics;
//! * [`spectrum`]: `tau(q)`, `alpha(q)`, `f(alpha)` and its envelope;
//! * [`symbolic`]: method of types, the subword estimator for the pointwise
//!   Assouad dimension, greedy words, block alphabets and Moran sets;
//! * [`geometry`]: certified enclosures of `mu(B(x, r))` on the line,
//!   doubling and Assouad scans, non-doubling witnesses.

pub mod error;
pub mod geometry;
pub mod ifs;
mod roots;
pub mod spectrum;
pub mod symbolic;
pub mod table;

pub use error::{Error, Result};
pub use ifs::{alpha_bounds, validate_system, word_stats, SystemSpec, WeightedSystem, Word};
