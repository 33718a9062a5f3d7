//! Finite-dimensional operator-algebra numerics.
//!
//! Matrix *-algebras and states, the GNS construction with central
//! projections, truncated Fock spaces with Weyl operators, covariant 1-to-2
//! cloners, and generalized-limit estimates on eigenvalue sequences.

pub mod algebra;
pub mod cli;
pub mod cloner;
pub mod dixmier;
pub mod error;
pub mod fock;
pub mod gns;
pub mod io;
pub mod matrix;

use rand_chacha::rand_core::SeedableRng;

/// One explicitly seeded RNG stream; all random fixtures derive from it.
pub fn seeded_rng(seed: u64) -> rand_chacha::ChaCha8Rng {
    rand_chacha::ChaCha8Rng::seed_from_u64(seed)
}

#[cfg(test)]
pub(crate) fn test_rng(seed: u64) -> rand_chacha::ChaCha8Rng {
    seeded_rng(seed)
}
