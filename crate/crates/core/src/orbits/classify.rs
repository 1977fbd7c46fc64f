//! Orbit partitions of whole layers of subspaces: classification by
//! `(m, d)` and the full census of 2-dimensional subspaces.
//!
//! Subspaces are scanned in increasing key order; every key not yet visited
//! seeds a breadth-first orbit search. Since all smaller keys have been
//! scanned already, the seed is the least key of its orbit, so class
//! representatives come out canonical and sorted without extra work.

use std::path::{Path, PathBuf};

use serde::Serialize;

use super::action::KeyAction;
use super::bfs::{BfsState, OrbitClass, OrbitOptions};
use super::checkpoint::{self, CheckpointLock, Snapshot};
use super::group::{generators, GeneratorSet};
use super::keyset::KeySet;
use crate::counting::gaussian_binomial;
use crate::error::{Error, Result};
use crate::f2core::{check_m, skew_dim};
use crate::spaces::{admissible_params, key_bits, pack_key, RrefIter, SkewSpace};

/// Which subspaces take part in a partition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Layer {
    /// Every subspace of the given dimension.
    All,
    /// Only nondegenerate ones (a congruence-invariant condition).
    Nondegenerate,
}

/// Where and how often a [`Census`] saves its state.
#[derive(Debug, Clone)]
pub struct CheckpointPolicy {
    pub path: PathBuf,
    /// Orbit-node expansions between two saves.
    pub interval: u64,
}

/// Default number of expansions between checkpoints.
pub const DEFAULT_CHECKPOINT_INTERVAL: u64 = 20_000_000;

/// Resumable orbit partition of the `k`-dimensional subspaces of `Λ_m`.
pub struct Census {
    m: usize,
    k: usize,
    layer: Layer,
    generators: GeneratorSet,
    action: KeyAction,
    visited: KeySet,
    /// First basis vector of the scan position; earlier ones are exhausted.
    cursor: u32,
    classes: Vec<(u64, u64)>,
    current: Option<BfsState>,
    expansions: u64,
    opts: OrbitOptions,
    _lock: Option<CheckpointLock>,
}

/// Outcome of [`Census::run`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunStatus {
    Complete,
    /// Stopped at the expansion limit; state is saved when checkpointing.
    Suspended,
}

impl Census {
    pub fn new(m: usize, k: usize, layer: Layer, opts: &OrbitOptions) -> Result<Self> {
        check_m(m)?;
        let w = skew_dim(m);
        if k == 0 || k > w {
            return Err(Error::Precondition(format!("subspace dimension {k} outside 1..={w}")));
        }
        let action = KeyAction::new(m, k, &generators(m, opts.generators)?)?;
        let total = gaussian_binomial(w, k).map_or(u64::MAX, |t| t.min(u64::MAX as u128) as u64);
        let visited = KeySet::new(key_bits(m, k), total, opts.memory_budget)?;
        Ok(Census {
            m,
            k,
            layer,
            generators: opts.generators,
            action,
            visited,
            cursor: 1,
            classes: Vec::new(),
            current: None,
            expansions: 0,
            opts: *opts,
            _lock: None,
        })
    }

    /// Reopens a saved census. The generator set and layer recorded in the
    /// file win over `opts`; the execution policy comes from `opts`.
    pub fn resume(path: &Path, opts: &OrbitOptions) -> Result<Self> {
        let lock = CheckpointLock::acquire(path)?;
        let snap = checkpoint::read(path)?;
        let m = snap.m as usize;
        let k = snap.k as usize;
        check_m(m)?;
        let action = KeyAction::new(m, k, &generators(m, snap.generators)?)?;
        let bits = key_bits(m, k);
        let required = KeySet::required_bytes(bits, 0);
        if required > opts.memory_budget {
            return Err(Error::MemoryBudget { required, budget: opts.memory_budget });
        }
        let visited = KeySet::from_dense_words(bits, snap.bitmap)?;
        let census = Census {
            m,
            k,
            layer: snap.layer,
            generators: snap.generators,
            action,
            visited,
            cursor: snap.cursor,
            classes: snap.classes,
            current: snap.current,
            expansions: snap.expansions,
            opts: OrbitOptions { generators: snap.generators, ..*opts },
            _lock: Some(lock),
        };
        census.check_consistency()?;
        Ok(census)
    }

    /// [`Census::resume`], failing unless the file holds the 2-dimensional
    /// census of `Λ_m`.
    pub fn resume_2dim(m: usize, path: &Path, opts: &OrbitOptions) -> Result<Self> {
        let c = Census::resume(path, opts)?;
        if (c.m, c.k, c.layer) != (m, 2, Layer::All) {
            return Err(Error::Checkpoint(format!(
                "checkpoint holds a census of {}-dim spaces in Λ_{}, not the 2-dim census of Λ_{m}",
                c.k, c.m
            )));
        }
        Ok(c)
    }

    /// The visited set must hold exactly the finished classes plus the
    /// partial orbit; this is the checkpoint digest.
    fn check_consistency(&self) -> Result<()> {
        let recorded: u64 = self.classes.iter().map(|c| c.1).sum::<u64>() + self.current.as_ref().map_or(0, |s| s.count);
        let present = self.visited.count();
        if recorded != present {
            return Err(Error::Checkpoint(format!("digest mismatch: {present} visited keys, {recorded} recorded")));
        }
        Ok(())
    }

    /// Holds the lock file for `path` for the lifetime of this census.
    pub fn lock(&mut self, path: &Path) -> Result<()> {
        if self._lock.is_none() {
            self._lock = Some(CheckpointLock::acquire(path)?);
        }
        Ok(())
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let (_, words) = self
            .visited
            .dense_words()
            .ok_or_else(|| Error::Checkpoint("only dense visited sets can be checkpointed".into()))?;
        let snap = Snapshot {
            m: self.m as u8,
            k: self.k as u8,
            layer: self.layer,
            generators: self.generators,
            cursor: self.cursor,
            expansions: self.expansions,
            classes: self.classes.clone(),
            current: self.current.clone(),
            bitmap: Vec::new(),
        };
        checkpoint::write(path, &snap, words)
    }

    pub fn expansions(&self) -> u64 {
        self.expansions
    }

    /// Keys visited so far (finished classes plus the running orbit).
    pub fn visited(&self) -> u64 {
        self.classes.iter().map(|c| c.1).sum::<u64>() + self.current.as_ref().map_or(0, |s| s.count)
    }

    pub fn classes_found(&self) -> usize {
        self.classes.len()
    }

    /// Runs until done or until `limit` further expansions have been made.
    /// With a checkpoint policy the state is saved every `interval`
    /// expansions and whenever the run suspends.
    pub fn run(
        &mut self,
        limit: Option<u64>,
        checkpoint: Option<&CheckpointPolicy>,
        on_class: &mut dyn FnMut(&OrbitClass),
    ) -> Result<RunStatus> {
        let w = skew_dim(self.m);
        let stop_at = limit.map(|l| self.expansions.saturating_add(l));
        let mut last_save = self.expansions;
        loop {
            if self.current.is_none() {
                match self.next_seed(w) {
                    Some(seed) => self.current = Some(BfsState::start(seed, &self.visited)),
                    None => {
                        if let Some(cp) = checkpoint {
                            self.save(&cp.path)?;
                        }
                        return Ok(RunStatus::Complete);
                    }
                }
            }
            let state = self.current.as_mut().expect("seeded above");
            let before = state.expansions;
            state.step(&self.action, &self.visited, self.opts.policy);
            self.expansions += state.expansions - before;
            if state.is_done() {
                debug_assert_eq!(state.min_key, state.seed);
                let class = (state.seed, state.count);
                self.current = None;
                self.classes.push(class);
                on_class(&self.class_record(class)?);
            }
            if let Some(cp) = checkpoint {
                if self.expansions - last_save >= cp.interval {
                    self.save(&cp.path)?;
                    last_save = self.expansions;
                }
            }
            if stop_at.is_some_and(|s| self.expansions >= s) {
                if let Some(cp) = checkpoint {
                    self.save(&cp.path)?;
                }
                return Ok(RunStatus::Suspended);
            }
        }
    }

    /// Next unvisited key of the layer, advancing the cursor.
    fn next_seed(&mut self, w: usize) -> Option<u64> {
        while (self.cursor as u64) < 1u64 << w {
            for basis in RrefIter::with_first(w, self.k, self.cursor) {
                let key = pack_key(&basis, w);
                if self.visited.contains(key) {
                    continue;
                }
                if self.layer == Layer::Nondegenerate && !SkewSpace::from_reduced(self.m, &basis).is_nondegenerate() {
                    continue;
                }
                return Some(key);
            }
            self.cursor += 1;
        }
        None
    }

    fn class_record(&self, (key, count): (u64, u64)) -> Result<OrbitClass> {
        Ok(OrbitClass::new(SkewSpace::from_key(self.m, self.k, key)?, count))
    }

    /// Finished classes in representative-key order.
    pub fn classes(&self) -> Result<Vec<OrbitClass>> {
        let mut v = self.classes.iter().map(|&c| self.class_record(c)).collect::<Result<Vec<_>>>()?;
        v.sort_by(|a, b| a.representative.cmp(&b.representative));
        Ok(v)
    }
}

/// All orbits of `k`-dimensional subspaces of `Λ_m` in the given layer.
pub fn partition(m: usize, k: usize, layer: Layer, opts: &OrbitOptions) -> Result<Vec<OrbitClass>> {
    let mut census = Census::new(m, k, layer, opts)?;
    census.run(None, None, &mut |_| {})?;
    census.classes()
}

/// Result of [`classify`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Classification {
    pub m: usize,
    pub d: usize,
    /// Nondegenerate classes of every dimension `1 ≤ k ≤ d`, by dimension.
    pub classes: Vec<OrbitClass>,
    pub n_classes: usize,
    /// Classes of dimension exactly `d`.
    pub n_primitive: usize,
}

/// Isomorphism classes of nondegenerate algebras with parameters `(m, d)`:
/// orbits of nondegenerate subspaces of `Λ_m` of dimension `1..=d`.
pub fn classify(m: usize, d: usize, opts: &OrbitOptions) -> Result<Classification> {
    if m >= 6 && d >= 3 || m > 6 {
        let count = gaussian_binomial(skew_dim(m), d.min(skew_dim(m))).map_or("too many".into(), |c| c.to_string());
        return Err(Error::Infeasible(format!(
            "classification for m = {m}, d = {d} is out of scope: Λ_{m} has {count} subspaces of dimension {d}, \
             beyond an exhaustive orbit partition (m = 6 is supported for d ≤ 2)"
        )));
    }
    let n = m + d;
    if !(3..=8).contains(&n) || !admissible_params(n)?.contains(&(m, d)) {
        return Err(Error::NotAdmissible {
            m,
            d,
            reason: if (3..=8).contains(&n) {
                "d = 1 needs even m".into()
            } else {
                "m + d must lie in 3..=8".into()
            },
        });
    }
    let mut classes = Vec::new();
    for k in 1..=d.min(skew_dim(m)) {
        classes.extend(partition(m, k, Layer::Nondegenerate, opts)?);
    }
    let n_primitive = classes.iter().filter(|c| c.dim() == d).count();
    Ok(Classification { m, d, n_classes: classes.len(), n_primitive, classes })
}

/// Options for [`census_2dim`].
#[derive(Debug, Clone, Default)]
pub struct CensusOptions {
    pub orbit: OrbitOptions,
    pub checkpoint: Option<CheckpointPolicy>,
    /// Continue from the checkpoint file instead of starting afresh.
    pub resume: bool,
}

/// Orbit partition of all 2-dimensional subspaces of `Λ_m`, `m ≤ 6`.
pub fn census_2dim(m: usize, opts: &CensusOptions) -> Result<Vec<OrbitClass>> {
    census_2dim_with(m, opts, &mut |_| {})
}

/// [`census_2dim`] with a callback per finished class.
pub fn census_2dim_with(m: usize, opts: &CensusOptions, on_class: &mut dyn FnMut(&OrbitClass)) -> Result<Vec<OrbitClass>> {
    check_m(m)?;
    if !(3..=6).contains(&m) {
        return Err(Error::Precondition(format!("2-dim census needs 3 ≤ m ≤ 6, got {m}")));
    }
    let mut census = match (&opts.checkpoint, opts.resume) {
        (Some(cp), true) => Census::resume_2dim(m, &cp.path, &opts.orbit)?,
        (None, true) => return Err(Error::Precondition("resume requested without a checkpoint path".into())),
        (cp, false) => {
            let mut c = Census::new(m, 2, Layer::All, &opts.orbit)?;
            if let Some(cp) = cp {
                c.lock(&cp.path)?;
            }
            c
        }
    };
    census.run(None, opts.checkpoint.as_ref(), on_class)?;
    census.classes()
}
