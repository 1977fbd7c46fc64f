//! Counts of defining sequences and algebra structures.
//!
//! `s(m, d)` is the number of ordered `d`-tuples in `Λ_m` whose horizontal
//! concatenation has rank `m`; `t(m, d)` the number of `d`-dimensional
//! subspaces of `F2^(m+d)` (choices of annihilator). Two independent routes
//! compute `s`: a direct scan of all tuples, and a sum over nondegenerate
//! subspaces weighted by the number of tuples spanning each of them.

use std::collections::BTreeMap;

use arrayvec::ArrayVec;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::{self, ExecPolicy};
use crate::f2core::{check_m, packed, skew_dim};
use crate::spaces::{admissible_params, RrefIter};

/// Gaussian binomial `(n choose d)_2`, exact. `None` on overflow.
pub fn gaussian_binomial(n: usize, d: usize) -> Option<u128> {
    if d > n {
        return Some(0);
    }
    // (n choose d)_q = (n-1 choose d-1)_q + q^d (n-1 choose d)_q, row by row
    let mut row = vec![1u128];
    for i in 1..=n {
        let mut next = vec![1u128; i + 1];
        for j in 1..i {
            let shifted = row[j].checked_mul(1u128.checked_shl(j as u32)?)?;
            next[j] = row[j - 1].checked_add(shifted)?;
        }
        row = next;
    }
    Some(row[d])
}

/// Number of surjective linear maps `F2^d → F2^k`: `∏_{i<k} (2^d − 2^i)`.
pub fn surjections(d: usize, k: usize) -> u128 {
    (0..k).map(|i| (1u128 << d).saturating_sub(1u128 << i)).product()
}

/// Scan cap for [`count_sequences_bruteforce`]: `2^32` tuples.
pub const BRUTEFORCE_MAX_BITS: usize = 32;

/// Exact number of `d`-tuples `(B_1, …, B_d)` in `Λ_m` with
/// `rank [B_1 | … | B_d] = m`, by scanning every tuple.
///
/// The outer loop runs over the first `d − 1` matrices and computes their
/// common kernel `K`; the last matrix `B` is then accepted iff `x ↦ xB` is
/// injective on `K`. The inner loop walks `Λ_m` in Gray-code order so each
/// step updates the images of the kernel basis with one XOR.
pub fn count_sequences_bruteforce(m: usize, d: usize, policy: ExecPolicy) -> Result<u64> {
    check_m(m)?;
    if d == 0 {
        return Err(Error::Precondition("d must be at least 1".into()));
    }
    let w = skew_dim(m);
    if w * d > BRUTEFORCE_MAX_BITS {
        return Err(Error::Infeasible(format!("2^{} tuples exceed the 2^{BRUTEFORCE_MAX_BITS} scan budget", w * d)));
    }
    // delta[c][row] = contribution of E_c to x·B for x = e_row
    let coord_rows: Vec<u64> = (0..w).map(|c| packed::skew_rows(1 << c, m)).collect();
    let prefixes = 1u64 << (w * (d - 1));
    let inner = 1u64 << w;
    Ok(exec::sum_range(policy, 0..prefixes, |prefix| {
        let kernel = prefix_kernel(prefix, d - 1, w, m);
        if kernel.is_empty() {
            return inner;
        }
        let r = kernel.len();
        // lane i (8 bits) holds k_i · B
        let deltas: Vec<u64> = coord_rows
            .iter()
            .map(|&rows| {
                kernel
                    .iter()
                    .enumerate()
                    .fold(0u64, |acc, (i, &k)| acc | packed::left_mul(k, rows) << (8 * i))
            })
            .collect();
        let mut state = 0u64;
        let mut count = lanes_independent(state, r) as u64;
        for step in 1..inner {
            state ^= deltas[step.trailing_zeros() as usize];
            count += lanes_independent(state, r) as u64;
        }
        count
    }))
}

/// Common left kernel of the `count` matrices packed in `prefix`.
fn prefix_kernel(prefix: u64, count: usize, w: usize, m: usize) -> ArrayVec<u64, 8> {
    let mut basis: ArrayVec<u64, 8> = (0..m).map(|i| 1u64 << i).collect();
    let mask = (1u64 << w) - 1;
    for t in 0..count {
        if basis.is_empty() {
            break;
        }
        basis = restricted_kernel(&basis, (prefix >> (w * t) & mask) as u32, m);
    }
    basis
}

/// Basis of `{x ∈ span(kernel) : x·B = 0}` for the skew matrix `B = flat`.
fn restricted_kernel(kernel: &[u64], flat: u32, m: usize) -> ArrayVec<u64, 8> {
    let rows = packed::skew_rows(flat, m);
    // (image, preimage) pairs, eliminated on the image's leading bit
    let mut pivots: [(u64, u64); 8] = [(0, 0); 8];
    let mut out = ArrayVec::new();
    for &k in kernel {
        let (mut v, mut tag) = (packed::left_mul(k, rows), k);
        loop {
            if v == 0 {
                out.push(tag);
                break;
            }
            let h = 63 - v.leading_zeros() as usize;
            if pivots[h].0 == 0 {
                pivots[h] = (v, tag);
                break;
            }
            v ^= pivots[h].0;
            tag ^= pivots[h].1;
        }
    }
    out
}

#[inline]
fn lanes_independent(state: u64, r: usize) -> bool {
    let mut basis = [0u8; 8];
    for i in 0..r {
        let mut v = (state >> (8 * i)) as u8;
        loop {
            if v == 0 {
                return false;
            }
            let h = 7 - v.leading_zeros() as usize;
            if basis[h] == 0 {
                basis[h] = v;
                break;
            }
            v ^= basis[h];
        }
    }
    true
}

/// Number of nondegenerate `k`-dimensional subspaces of `Λ_m`, by enumeration.
pub fn nondegenerate_subspace_count(m: usize, k: usize, policy: ExecPolicy) -> Result<u64> {
    check_m(m)?;
    let w = skew_dim(m);
    if k > w {
        return Ok(0);
    }
    if k == 0 {
        return Ok(0);
    }
    let full: ArrayVec<u64, 8> = (0..m).map(|i| 1u64 << i).collect();
    Ok(exec::sum_range(policy, 1..1u64 << w, |first| {
        let kernel = restricted_kernel(&full, first as u32, m);
        let iter = RrefIter::with_first(w, k, first as u32);
        if kernel.is_empty() {
            return iter.count() as u64;
        }
        iter.filter(|b| {
            let mut kern = kernel.clone();
            for &v in &b[1..] {
                kern = restricted_kernel(&kern, v, m);
                if kern.is_empty() {
                    return true;
                }
            }
            false
        })
        .count() as u64
    }))
}

/// `s(m, d) = Σ_k N_k · ∏_{i<k} (2^d − 2^i)`, with `N_k` the number of
/// nondegenerate `k`-dimensional subspaces of `Λ_m`.
pub fn count_sequences_by_subspace(d: usize, nondeg_counts: &BTreeMap<usize, u64>) -> u128 {
    nondeg_counts.iter().map(|(&k, &n)| n as u128 * surjections(d, k)).sum()
}

/// `N_k` for `1 ≤ k ≤ min(d, dim Λ_m)` by enumeration.
pub fn nondegenerate_counts(m: usize, d: usize, policy: ExecPolicy) -> Result<BTreeMap<usize, u64>> {
    let kmax = d.min(skew_dim(m));
    (1..=kmax).map(|k| Ok((k, nondegenerate_subspace_count(m, k, policy)?))).collect()
}

/// Which algorithm fills the `s` column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SequenceMethod {
    #[default]
    BruteForce,
    BySubspace,
}

/// One row of the structure count table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountReport {
    pub n: usize,
    pub m: usize,
    pub d: usize,
    pub t: u128,
    pub s: u128,
    pub total: u128,
}

impl CountReport {
    pub fn new(m: usize, d: usize, s: u128) -> Result<Self> {
        let t = gaussian_binomial(m + d, d).ok_or_else(|| Error::Infeasible("overflow in t".into()))?;
        let total = s.checked_mul(t).ok_or_else(|| Error::Infeasible("overflow in s·t".into()))?;
        Ok(CountReport { n: m + d, m, d, t, s, total })
    }
}

pub fn sequence_count(m: usize, d: usize, method: SequenceMethod, policy: ExecPolicy) -> Result<u128> {
    match method {
        SequenceMethod::BruteForce => Ok(count_sequences_bruteforce(m, d, policy)? as u128),
        SequenceMethod::BySubspace => Ok(count_sequences_by_subspace(d, &nondegenerate_counts(m, d, policy)?)),
    }
}

/// One row per admissible `(m, d)` with `3 ≤ m + d ≤ n_max`, ordered by `n`
/// then decreasing `m`.
pub fn table1(n_max: usize, method: SequenceMethod, policy: ExecPolicy) -> Result<Vec<CountReport>> {
    if !(3..=8).contains(&n_max) {
        return Err(Error::Precondition(format!("n_max = {n_max} outside 3..=8")));
    }
    let mut rows = Vec::new();
    for n in 3..=n_max {
        for (m, d) in admissible_params(n)? {
            rows.push(CountReport::new(m, d, sequence_count(m, d, method, policy)?)?);
        }
    }
    Ok(rows)
}

/// `Σ s·t` over the rows with `m + d = n`.
pub fn total_operations(rows: &[CountReport], n: usize) -> u128 {
    rows.iter().filter(|r| r.n == n).map(|r| r.total).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_binomial_examples() {
        assert_eq!(gaussian_binomial(3, 1), Some(7));
        assert_eq!(gaussian_binomial(8, 4), Some(200_787));
        assert_eq!(gaussian_binomial(5, 0), Some(1));
        assert_eq!(gaussian_binomial(2, 3), Some(0));
        assert_eq!(gaussian_binomial(15, 2), Some(178_940_587));
    }

    #[test]
    fn gaussian_binomial_matches_product_formula() {
        for n in 0..=10usize {
            for d in 0..=n {
                let num: u128 = (0..d).map(|i| (1u128 << n) - (1u128 << i)).product();
                let den: u128 = (0..d).map(|i| (1u128 << d) - (1u128 << i)).product();
                assert_eq!(gaussian_binomial(n, d), Some(num / den), "n={n} d={d}");
            }
        }
    }

    #[test]
    fn bruteforce_small_rows() {
        let p = ExecPolicy::Sequential;
        assert_eq!(count_sequences_bruteforce(2, 1, p).unwrap(), 1);
        assert_eq!(count_sequences_bruteforce(2, 2, p).unwrap(), 3);
        assert_eq!(count_sequences_bruteforce(4, 1, p).unwrap(), 28);
        assert_eq!(count_sequences_bruteforce(6, 1, p).unwrap(), 13_888);
        assert_eq!(count_sequences_bruteforce(3, 1, p).unwrap(), 0);
        assert!(count_sequences_bruteforce(6, 3, p).is_err());
    }

    #[test]
    fn by_subspace_small_rows() {
        assert_eq!(count_sequences_by_subspace(2, &BTreeMap::from([(1, 1)])), 3);
        assert_eq!(count_sequences_by_subspace(2, &BTreeMap::from([(1, 13_888), (2, 168_732_256)])), 1_012_435_200);
        assert_eq!(count_sequences_by_subspace(3, &BTreeMap::from([(1, 0), (2, 0)])), 0);
    }

    #[test]
    fn surjection_counts() {
        assert_eq!(surjections(2, 1), 3);
        assert_eq!(surjections(2, 2), 6);
        assert_eq!(surjections(2, 3), 0);
        assert_eq!(surjections(5, 0), 1);
    }
}
