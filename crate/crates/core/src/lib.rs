//! Homomorphic program encryption over the integers via tame polynomial
//! automorphisms.
//!
//! A secret automorphism `φ` of `Z^n` (with polynomial inverse `ψ`) acts as a
//! random curvilinear coordinate system. Data is encrypted by moving it into
//! the new coordinates, and a straight-line program is encrypted by rewriting
//! every step `f` as `φ ∘ f ∘ ψ`, so the rewritten program computes on
//! ciphertexts directly.

pub mod automorphism;
pub mod bounds;
pub mod crypto;
pub mod error;
pub mod poly;
pub mod program;
pub mod rewrite;
pub mod rng;
pub mod samples;
mod serde_util;

pub use error::{Error, Result};
