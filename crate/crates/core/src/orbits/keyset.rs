//! Concurrent insert-if-absent sets of word-sized canonical keys.

use std::sync::atomic::{AtomicU64, Ordering};

use crate::error::{Error, Result};

/// Keys up to this many bits use a dense bitmap (128 MiB at 30 bits).
pub const DENSE_MAX_BITS: usize = 30;

/// Set of visited keys shared by orbit-search workers.
pub enum KeySet {
    /// One bit per possible key.
    Dense { bits: usize, words: Vec<AtomicU64> },
    /// Open addressing with linear probing; slots hold `key + 1`, 0 = empty.
    Hashed { mask: usize, slots: Vec<AtomicU64> },
}

impl KeySet {
    /// Bytes a set for `key_bits`-bit keys holding at most `max_items` needs.
    pub fn required_bytes(key_bits: usize, max_items: u64) -> u64 {
        if key_bits <= DENSE_MAX_BITS {
            (1u64 << key_bits).div_ceil(64) * 8
        } else {
            hashed_capacity(max_items) as u64 * 8
        }
    }

    pub fn new(key_bits: usize, max_items: u64, budget: u64) -> Result<Self> {
        let required = Self::required_bytes(key_bits, max_items);
        if required > budget {
            return Err(Error::MemoryBudget { required, budget });
        }
        if key_bits > 63 {
            return Err(Error::Infeasible(format!("{key_bits}-bit keys")));
        }
        Ok(if key_bits <= DENSE_MAX_BITS {
            let n = (1usize << key_bits).div_ceil(64);
            KeySet::Dense { bits: key_bits, words: (0..n).map(|_| AtomicU64::new(0)).collect() }
        } else {
            let cap = hashed_capacity(max_items);
            KeySet::Hashed { mask: cap - 1, slots: (0..cap).map(|_| AtomicU64::new(0)).collect() }
        })
    }

    /// Inserts `key`; true if it was absent.
    #[inline]
    pub fn insert(&self, key: u64) -> bool {
        match self {
            KeySet::Dense { words, .. } => {
                let w = &words[(key >> 6) as usize];
                let bit = 1u64 << (key & 63);
                if w.load(Ordering::Relaxed) & bit != 0 {
                    return false;
                }
                w.fetch_or(bit, Ordering::Relaxed) & bit == 0
            }
            KeySet::Hashed { mask, slots } => {
                let tag = key + 1;
                let mut i = hash(key) & mask;
                loop {
                    let cur = slots[i].load(Ordering::Relaxed);
                    if cur == tag {
                        return false;
                    }
                    if cur == 0 {
                        match slots[i].compare_exchange(0, tag, Ordering::Relaxed, Ordering::Relaxed) {
                            Ok(_) => return true,
                            Err(actual) if actual == tag => return false,
                            Err(_) => {}
                        }
                    }
                    i = (i + 1) & mask;
                }
            }
        }
    }

    #[inline]
    pub fn contains(&self, key: u64) -> bool {
        match self {
            KeySet::Dense { words, .. } => words[(key >> 6) as usize].load(Ordering::Relaxed) >> (key & 63) & 1 == 1,
            KeySet::Hashed { mask, slots } => {
                let tag = key + 1;
                let mut i = hash(key) & mask;
                loop {
                    match slots[i].load(Ordering::Relaxed) {
                        0 => return false,
                        t if t == tag => return true,
                        _ => i = (i + 1) & mask,
                    }
                }
            }
        }
    }

    /// Number of keys present (linear scan).
    pub fn count(&self) -> u64 {
        match self {
            KeySet::Dense { words, .. } => words.iter().map(|w| w.load(Ordering::Relaxed).count_ones() as u64).sum(),
            KeySet::Hashed { slots, .. } => slots.iter().filter(|s| s.load(Ordering::Relaxed) != 0).count() as u64,
        }
    }

    /// Rebuilds a dense set from saved bitmap words.
    pub(crate) fn from_dense_words(bits: usize, words: Vec<u64>) -> Result<Self> {
        if bits > DENSE_MAX_BITS || words.len() != (1usize << bits).div_ceil(64) {
            return Err(Error::Checkpoint(format!("bitmap of {} words does not fit {bits}-bit keys", words.len())));
        }
        Ok(KeySet::Dense { bits, words: words.into_iter().map(AtomicU64::new).collect() })
    }

    pub(crate) fn dense_words(&self) -> Option<(usize, &[AtomicU64])> {
        match self {
            KeySet::Dense { bits, words } => Some((*bits, words)),
            KeySet::Hashed { .. } => None,
        }
    }
}

fn hashed_capacity(max_items: u64) -> usize {
    (max_items.max(8) * 2).next_power_of_two() as usize
}

#[inline]
fn hash(key: u64) -> usize {
    (key.wrapping_mul(0x9e37_79b9_7f4a_7c15) >> 20) as usize
}
