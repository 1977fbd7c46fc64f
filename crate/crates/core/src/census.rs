//! The stored orbit partition of 2-dimensional subspaces of `Λ_6`.
//!
//! Produced by `bibrace census --m 6 --save-table FILE` and embedded so that
//! isomorphism queries for `m = 6, d = 2` need no orbit search. Class
//! membership of a space is decided by its [`Fingerprint`], which is a
//! congruence invariant; loading fails unless the stored classes have
//! pairwise distinct fingerprints, which makes the lookup exact.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::counting::gaussian_binomial;
use crate::error::{Error, Result};
use crate::f2core::skew_dim;
use crate::orbits::OrbitClass;
use crate::spaces::{Fingerprint, RankSequence, SkewSpace};

const LAMBDA6_PLANES: &str = include_str!("../data/census_m6_k2.json");

/// Current version of the census file schema.
pub const CENSUS_SCHEMA: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusFile {
    pub schema: u32,
    pub m: usize,
    pub k: usize,
    pub classes: Vec<CensusEntry>,
}

/// One class as stored on disk.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusEntry {
    pub representative: String,
    pub rank_seq: RankSequence,
    pub cardinality: u64,
    pub nondegenerate: bool,
}

impl From<&OrbitClass> for CensusEntry {
    fn from(c: &OrbitClass) -> Self {
        CensusEntry {
            representative: c.representative.to_text(),
            rank_seq: c.rank_seq.clone(),
            cardinality: c.cardinality,
            nondegenerate: c.nondegenerate,
        }
    }
}

impl CensusFile {
    pub fn from_classes(m: usize, k: usize, classes: &[OrbitClass]) -> Self {
        CensusFile { schema: CENSUS_SCHEMA, m, k, classes: classes.iter().map(CensusEntry::from).collect() }
    }
}

/// A validated census with fingerprints for lookup.
#[derive(Clone, Debug)]
pub struct CensusTable {
    pub m: usize,
    pub k: usize,
    pub classes: Vec<OrbitClass>,
    fingerprints: Vec<Fingerprint>,
}

impl CensusTable {
    /// Checks schema, that the classes cover all `k`-dim subspaces exactly
    /// (by cardinality sum), and that fingerprints separate the classes.
    pub fn from_file(file: &CensusFile) -> Result<Self> {
        if file.schema != CENSUS_SCHEMA {
            return Err(Error::Parse(format!("census schema {} (expected {CENSUS_SCHEMA})", file.schema)));
        }
        let classes = file
            .classes
            .iter()
            .map(|e| {
                let rep = SkewSpace::parse(&e.representative)?;
                if (rep.m(), rep.dim()) != (file.m, file.k) {
                    return Err(Error::Parse(format!("{} is not a {}-dim subspace of Λ_{}", e.representative, file.k, file.m)));
                }
                let class = OrbitClass::new(rep, e.cardinality);
                if class.rank_seq != e.rank_seq || class.nondegenerate != e.nondegenerate {
                    return Err(Error::Parse(format!("stored invariants of {} are inconsistent", e.representative)));
                }
                Ok(class)
            })
            .collect::<Result<Vec<_>>>()?;
        let total: u128 = classes.iter().map(|c| c.cardinality as u128).sum();
        if Some(total) != gaussian_binomial(skew_dim(file.m), file.k) {
            return Err(Error::Parse(format!("census cardinalities sum to {total}, not to the number of subspaces")));
        }
        let fingerprints: Vec<Fingerprint> = classes.iter().map(|c| c.representative.fingerprint()).collect();
        let mut sorted = fingerprints.clone();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != fingerprints.len() {
            return Err(Error::Infeasible("stored classes share fingerprints; lookup would be ambiguous".into()));
        }
        Ok(CensusTable { m: file.m, k: file.k, classes, fingerprints })
    }

    /// Index of the class containing `s`.
    pub fn class_of(&self, s: &SkewSpace) -> Result<usize> {
        if (s.m(), s.dim()) != (self.m, self.k) {
            return Err(Error::Precondition(format!("census covers {}-dim subspaces of Λ_{}", self.k, self.m)));
        }
        let fp = s.fingerprint();
        self.fingerprints
            .iter()
            .position(|f| *f == fp)
            .ok_or_else(|| Error::Precondition(format!("{s} matches no stored class")))
    }
}

/// The embedded census of 2-dimensional subspaces of `Λ_6`.
pub fn lambda6_planes() -> Result<&'static CensusTable> {
    static TABLE: OnceLock<std::result::Result<CensusTable, String>> = OnceLock::new();
    TABLE
        .get_or_init(|| {
            let file: CensusFile = serde_json::from_str(LAMBDA6_PLANES).map_err(|e| e.to_string())?;
            CensusTable::from_file(&file).map_err(|e| e.to_string())
        })
        .as_ref()
        .map_err(|e| Error::Parse(format!("embedded census: {e}")))
}
