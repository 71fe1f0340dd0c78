//! Committee selection under feasibility constraints with exact arithmetic:
//! scoring rules, Global and Local solvers, brute-force stability verifiers,
//! lower-bound constructions and sampling experiments.

pub mod cli;
pub mod committee;
pub mod constraints;
pub mod error;
pub mod instances;
pub mod interval;
pub mod model;
pub mod rational;
pub mod sampling;
pub mod scoring;
pub mod solvers;
pub mod suite;
pub mod surd;
pub mod verifiers;

pub use committee::Committee;
pub use error::{Error, Result};
pub use rational::Rational;
