//! Exact truncated π-typical Witt vectors, π-derivations, arithmetic jet
//! rings and the lateral Frobenius on jet fiber products, with a randomized
//! and symbolic verification engine.

pub mod algebra;
pub mod cli;
pub mod error;
pub mod gallery;
pub mod ideal;
pub mod jet;
pub mod lateral;
pub mod report;
pub mod suites;
pub mod witt;

pub use error::{Error, Result};

/// Deterministic PRNG used by every randomized check.
pub type Prng = rand_chacha::ChaCha8Rng;
