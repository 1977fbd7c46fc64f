//! Enumeration, counting and congruence classification of binary
//! alternating algebras (equivalently binary bibraces) over F2.
//!
//! An algebra with parameters `(m, d)` is determined by `d` skew-symmetric
//! `m × m` defining matrices; isomorphism classes correspond to orbits of
//! subspaces of `Λ_m` under `A · X · Aᵗ`, `A ∈ GL(m, 2)`.

pub mod algebra;
pub mod census;
pub mod counting;
pub mod error;
pub mod exec;
pub mod f2core;
pub mod orbits;
pub mod published;
pub mod spaces;

pub use error::{Error, Result};
pub use exec::ExecPolicy;
