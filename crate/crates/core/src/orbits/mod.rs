//! The congruence action of `GL(m, 2)` on subspaces of `Λ_m`: orbits,
//! stabilizers and classification.

mod action;
mod bfs;
mod checkpoint;
mod classify;
mod stabilizer;
mod group;
mod keyset;

pub use action::{act, CongruenceMap};
pub use checkpoint::{CheckpointLock, FORMAT_VERSION as CHECKPOINT_VERSION};
pub use classify::{
    census_2dim, census_2dim_with, classify, partition, Census, CensusOptions, CheckpointPolicy, Classification, Layer,
    RunStatus, DEFAULT_CHECKPOINT_INTERVAL,
};
pub use bfs::{find_congruence, orbit_of, OrbitClass, OrbitOptions, Witness, DEFAULT_MEMORY_BUDGET};
pub use group::{
    closure, filter_gl, generated_order, generators, gl_elements, gl_generators, gl_order, gl_pair_generators,
    GeneratorSet, GroupElement, MatrixGroup, MAX_ENUMERATED_M,
};
pub use keyset::{KeySet, DENSE_MAX_BITS};
pub use stabilizer::{
    normalizer, right_transversal, self_congruence_group, syc_via_normalizer, symplectic_stabilizer, syp_intersection,
    verify_prop_conjugacy, SycDerivation, MAX_NORMALIZER_M,
};
