//! Subspaces of `Λ_m`: canonical form, enumeration and congruence invariants.
//!
//! A [`SkewSpace`] stores its flattened basis in reduced echelon form keyed
//! by the highest set bit: `basis[0]` has the highest pivot, each pivot bit
//! is clear in every other basis vector. Two generating sets of the same
//! span therefore yield identical bases, and the concatenation of the basis
//! words (with `basis[0]` most significant) is a canonical integer key.
//! Ordering keys numerically orders spaces lexicographically by basis.

use std::collections::BTreeSet;
use std::fmt;

use arrayvec::ArrayVec;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::f2core::{check_m, decode_hex, encode_hex, packed, rank_table, row_rank, skew_dim, SkewMatrix};

/// Maximum dimension of `Λ_m` for supported `m`.
pub const MAX_SKEW_DIM: usize = skew_dim(crate::f2core::MAX_M);

/// Basis storage; `k ≤ dim Λ_m ≤ 28`.
pub type Basis = ArrayVec<u32, MAX_SKEW_DIM>;

#[inline]
fn high_bit(v: u32) -> u32 {
    31 - v.leading_zeros()
}

/// In-place reduced echelon form of a small set of words; returns the rank.
/// The nonzero rows end up in `v[..rank]` sorted by decreasing pivot.
#[inline]
pub(crate) fn rref_in_place(v: &mut [u32]) -> usize {
    let mut rank = 0;
    for i in 0..v.len() {
        let mut x = v[i];
        for &b in &v[..rank] {
            if x >> high_bit(b) & 1 == 1 {
                x ^= b;
            }
        }
        if x == 0 {
            continue;
        }
        let p = high_bit(x);
        for b in &mut v[..rank] {
            if *b >> p & 1 == 1 {
                *b ^= x;
            }
        }
        // insertion keeps pivots decreasing
        let mut j = rank;
        while j > 0 && high_bit(v[j - 1]) < p {
            v[j] = v[j - 1];
            j -= 1;
        }
        v[j] = x;
        rank += 1;
    }
    rank
}

/// Packs a reduced basis into a key: `basis[0]` in the most significant slot.
#[inline]
pub(crate) fn pack_key(basis: &[u32], width: usize) -> u64 {
    basis.iter().fold(0u64, |acc, &b| acc << width | b as u64)
}

#[inline]
pub(crate) fn unpack_key(key: u64, k: usize, width: usize, out: &mut [u32]) {
    let mask = (1u64 << width) - 1;
    for (i, slot) in out[..k].iter_mut().enumerate() {
        *slot = (key >> (width * (k - 1 - i)) & mask) as u32;
    }
}

/// Bits needed for the canonical key of a `k`-dimensional subspace of `Λ_m`.
pub fn key_bits(m: usize, k: usize) -> usize {
    k * skew_dim(m)
}

/// A subspace of `Λ_m` in canonical reduced echelon form.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SkewSpace {
    m: u8,
    basis: Basis,
}

impl SkewSpace {
    pub fn zero(m: usize) -> Result<Self> {
        check_m(m)?;
        Ok(SkewSpace { m: m as u8, basis: Basis::new() })
    }

    /// The whole of `Λ_m`.
    pub fn full(m: usize) -> Result<Self> {
        check_m(m)?;
        Self::from_flat_words(m, (0..skew_dim(m)).map(|c| 1u32 << c))
    }

    /// Span of flattened generators.
    pub fn from_flat_words<I: IntoIterator<Item = u32>>(m: usize, gens: I) -> Result<Self> {
        check_m(m)?;
        let w = skew_dim(m);
        let mut basis = Basis::new();
        for g in gens {
            if w < 32 && g >> w != 0 {
                return Err(Error::DimensionMismatch { expected: w, got: 32 - g.leading_zeros() as usize });
            }
            basis.push(g);
            let r = rref_in_place(&mut basis);
            basis.truncate(r);
        }
        Ok(SkewSpace { m: m as u8, basis })
    }

    /// Canonical form of the span of `gens` inside `Λ_m`.
    pub fn span(m: usize, gens: &[SkewMatrix]) -> Result<Self> {
        if let Some(bad) = gens.iter().find(|g| g.m() != m) {
            return Err(Error::DimensionMismatch { expected: m, got: bad.m() });
        }
        Self::from_flat_words(m, gens.iter().map(SkewMatrix::flat))
    }

    pub(crate) fn from_reduced(m: usize, basis: &[u32]) -> Self {
        SkewSpace { m: m as u8, basis: basis.iter().copied().collect() }
    }

    /// Rebuilds a space from its canonical key.
    pub fn from_key(m: usize, k: usize, key: u64) -> Result<Self> {
        check_m(m)?;
        let w = skew_dim(m);
        if k * w > 64 {
            return Err(Error::Infeasible(format!("key of a {k}-dim subspace of Λ_{m} needs {} bits", k * w)));
        }
        let mut buf = [0u32; 64];
        unpack_key(key, k, w, &mut buf);
        let s = Self::from_flat_words(m, buf[..k].iter().copied())?;
        if s.dim() != k || s.basis.as_slice() != &buf[..k] {
            return Err(Error::Parse(format!("{key:#x} is not a canonical key for k = {k}, m = {m}")));
        }
        Ok(s)
    }

    pub fn m(&self) -> usize {
        self.m as usize
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[u32] {
        &self.basis
    }

    pub fn basis_matrices(&self) -> Vec<SkewMatrix> {
        self.basis.iter().map(|&b| SkewMatrix::from_flat_unchecked(self.m(), b)).collect()
    }

    /// Canonical key, when it fits a word.
    pub fn key(&self) -> Option<u64> {
        let w = skew_dim(self.m());
        (self.dim() * w <= 64).then(|| pack_key(&self.basis, w))
    }

    /// Canonical key as a wide integer (always available).
    pub fn wide_key(&self) -> u128 {
        let w = skew_dim(self.m()) as u32;
        self.basis.iter().fold(0u128, |acc, &b| acc.checked_shl(w).unwrap_or(0) | b as u128)
    }

    pub fn contains(&self, b: &SkewMatrix) -> bool {
        b.m() == self.m() && self.contains_flat(b.flat())
    }

    pub(crate) fn contains_flat(&self, mut v: u32) -> bool {
        for &b in &self.basis {
            if v >> high_bit(b) & 1 == 1 {
                v ^= b;
            }
        }
        v == 0
    }

    pub fn is_subspace_of(&self, other: &SkewSpace) -> bool {
        self.m == other.m && self.basis.iter().all(|&b| other.contains_flat(b))
    }

    /// The `2^k − 1` nonzero elements, flattened, in Gray-code order.
    pub fn nonzero_elements(&self) -> impl Iterator<Item = u32> + '_ {
        let k = self.dim();
        let mut acc = 0u32;
        (1u64..1 << k).map(move |i| {
            acc ^= self.basis[i.trailing_zeros() as usize];
            acc
        })
    }

    pub fn rank_sequence(&self) -> RankSequence {
        let m = self.m();
        let mut ranks: Vec<u8> = if m <= 7 {
            let table = rank_table(m);
            self.nonzero_elements().map(|e| table[e as usize]).collect()
        } else {
            self.nonzero_elements().map(|e| packed::rank(packed::skew_rows(e, m), m) as u8).collect()
        };
        ranks.sort_unstable();
        RankSequence(ranks)
    }

    /// Rank of the horizontal concatenation of any basis.
    pub fn hconcat_rank(&self) -> usize {
        let m = self.m();
        row_rank(self.basis.iter().flat_map(|&b| packed::rows(packed::skew_rows(b, m), m)))
    }

    /// True iff the defining bilinear map is nondegenerate (concatenation rank `m`).
    pub fn is_nondegenerate(&self) -> bool {
        self.hconcat_rank() == self.m()
    }

    /// A `d`-dimensional nondegenerate space, i.e. the span of the defining
    /// matrices of a primitive algebra with parameters `(m, d)`.
    pub fn is_primitive_candidate(&self, d: usize) -> bool {
        self.dim() == d && self.is_nondegenerate()
    }

    /// Rank sequences of all `j`-dimensional subspaces of this space.
    pub fn subspace_rank_profiles(&self, j: usize) -> BTreeSet<RankSequence> {
        let k = self.dim();
        let mut out = BTreeSet::new();
        if j > k {
            return out;
        }
        for coords in RrefIter::new(k, j) {
            let gens = coords.iter().map(|&c| {
                let mut v = 0u32;
                let mut bits = c;
                while bits != 0 {
                    v ^= self.basis[bits.trailing_zeros() as usize];
                    bits &= bits - 1;
                }
                v
            });
            let sub = SkewSpace::from_flat_words(self.m(), gens).expect("subspace of a valid space");
            out.insert(sub.rank_sequence());
        }
        out
    }

    /// A congruence invariant finer than the rank sequence.
    ///
    /// For every ordered pair `(B, C)` of distinct nonzero elements it records
    /// `rank B`, `rank C`, `rank [B | C]` and the rank of the form `C`
    /// restricted to `ker B`; the multiset of these tuples, together with the
    /// dimension of the common kernel, is preserved by `X ↦ A X Aᵗ`.
    pub fn fingerprint(&self) -> Fingerprint {
        let m = self.m();
        let elems: Vec<u32> = self.nonzero_elements().collect();
        let rows: Vec<u64> = elems.iter().map(|&e| packed::skew_rows(e, m)).collect();
        let kernels: Vec<Vec<u64>> = rows
            .iter()
            .map(|&r| crate::f2core::F2Matrix::from_rows(m, packed::rows(r, m).collect()).expect("fits").left_kernel())
            .collect();
        let mut pairs = Vec::with_capacity(elems.len() * elems.len().saturating_sub(1));
        for (a, &ra) in rows.iter().enumerate() {
            let rank_a = packed::rank(ra, m) as u8;
            for (c, &rc) in rows.iter().enumerate() {
                if a == c {
                    continue;
                }
                let rank_c = packed::rank(rc, m) as u8;
                let joint = row_rank(packed::rows(ra, m).chain(packed::rows(rc, m))) as u8;
                let ker = &kernels[a];
                let restricted = row_rank(ker.iter().map(|&x| {
                    let xc = packed::left_mul(x, rc);
                    ker.iter().enumerate().fold(0u64, |acc, (j, &y)| acc | (((xc & y).count_ones() & 1) as u64) << j)
                })) as u8;
                pairs.push([rank_a, rank_c, joint, restricted]);
            }
        }
        pairs.sort_unstable();
        Fingerprint { common_kernel_dim: (m - self.hconcat_rank()) as u8, pairs }
    }

    /// Text form `m:k:hex1,hex2,…` of the canonical basis.
    pub fn to_text(&self) -> String {
        let hex: Vec<String> = self.basis.iter().map(|&b| encode_hex(b as u64)).collect();
        format!("{}:{}:{}", self.m, self.dim(), hex.join(","))
    }

    /// Parses `m:k:hex1,…`; the generators may be any spanning set of a
    /// `k`-dimensional space.
    pub fn parse(text: &str) -> Result<Self> {
        let mut parts = text.trim().splitn(3, ':');
        let (Some(m), Some(k), Some(rest)) = (parts.next(), parts.next(), parts.next()) else {
            return Err(Error::Parse(format!("expected m:k:hex,… but got {text:?}")));
        };
        let m: usize = m.parse().map_err(|_| Error::Parse(format!("bad m in {text:?}")))?;
        let k: usize = k.parse().map_err(|_| Error::Parse(format!("bad k in {text:?}")))?;
        let s = Self::parse_basis(m, rest)?;
        if s.dim() != k {
            return Err(Error::Parse(format!("generators span dimension {} but k = {k}", s.dim())));
        }
        Ok(s)
    }

    /// Span of a comma-separated list of hex-encoded matrices in `Λ_m`.
    pub fn parse_basis(m: usize, list: &str) -> Result<Self> {
        check_m(m)?;
        let w = skew_dim(m);
        let gens = list
            .split(',')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(|t| decode_hex(t, w).map(|v| v as u32))
            .collect::<Result<Vec<_>>>()?;
        Self::from_flat_words(m, gens)
    }
}

impl fmt::Debug for SkewSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<")?;
        for (i, b) in self.basis_matrices().iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{b:?}")?;
        }
        write!(f, ">")
    }
}

impl fmt::Display for SkewSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl PartialOrd for SkewSpace {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for SkewSpace {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.m, self.dim(), self.basis.as_slice()).cmp(&(other.m, other.dim(), other.basis.as_slice()))
    }
}

/// Canonical form of the span of `gens` in `Λ_m`.
pub fn canonicalize(m: usize, gens: &[SkewMatrix]) -> Result<SkewSpace> {
    SkewSpace::span(m, gens)
}

/// Ascending ranks of the nonzero elements of a space.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RankSequence(Vec<u8>);

impl RankSequence {
    pub fn new(mut ranks: Vec<u8>) -> Self {
        ranks.sort_unstable();
        RankSequence(ranks)
    }

    pub fn entries(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for RankSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(u8::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

impl fmt::Debug for RankSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl std::str::FromStr for RankSequence {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let inner = s.trim().trim_start_matches('(').trim_end_matches(')');
        let ranks = inner
            .split(',')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(|t| t.parse::<u8>().map_err(|_| Error::Parse(format!("bad rank {t:?} in {s:?}"))))
            .collect::<Result<Vec<_>>>()?;
        Ok(RankSequence::new(ranks))
    }
}

/// See [`SkewSpace::fingerprint`].
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub struct Fingerprint {
    pub common_kernel_dim: u8,
    pub pairs: Vec<[u8; 4]>,
}

/// Enumerates reduced echelon bases of `k`-dimensional subspaces of
/// `F2^width` (`width ≤ 32`) in increasing canonical-key order.
#[derive(Clone, Debug)]
pub struct RrefIter {
    width: u32,
    k: usize,
    vecs: [u32; 32],
    first: Option<u32>,
    state: IterState,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum IterState {
    Fresh,
    Running,
    Done,
}

impl RrefIter {
    pub fn new(width: usize, k: usize) -> Self {
        assert!(width <= 32 && k <= width, "need k <= width <= 32");
        RrefIter { width: width as u32, k, vecs: [0; 32], first: None, state: IterState::Fresh }
    }

    /// Only the bases whose first (highest-pivot) vector is `first`.
    pub fn with_first(width: usize, k: usize, first: u32) -> Self {
        let mut it = Self::new(width, k);
        if k == 0 || first == 0 || (width < 32 && first >> width != 0) {
            it.state = IterState::Done;
        }
        it.first = Some(first);
        it
    }

    fn candidate(&self, t: usize, resume: bool) -> Option<u32> {
        if t == 0 {
            if let Some(f) = self.first {
                return (!resume).then_some(f);
            }
        }
        let limit = if t == 0 { self.width } else { high_bit(self.vecs[t - 1]) };
        let forbidden = self.vecs[..t].iter().fold(0u32, |a, &b| a | b);
        let start = if resume {
            let b = self.vecs[t];
            let next = b + 1;
            if high_bit(next) == high_bit(b) {
                return Some(next);
            }
            high_bit(b) + 1
        } else {
            0
        };
        (start..limit).find(|&p| forbidden >> p & 1 == 0).map(|p| 1u32 << p)
    }

    fn advance(&mut self, mut t: usize, mut resume: bool) -> bool {
        loop {
            match self.candidate(t, resume) {
                Some(b) => {
                    self.vecs[t] = b;
                    if t + 1 == self.k {
                        return true;
                    }
                    t += 1;
                    resume = false;
                }
                None => {
                    if t == 0 {
                        return false;
                    }
                    t -= 1;
                    resume = true;
                }
            }
        }
    }
}

impl Iterator for RrefIter {
    type Item = ArrayVec<u32, 32>;

    fn next(&mut self) -> Option<Self::Item> {
        let ok = match self.state {
            IterState::Done => return None,
            IterState::Fresh if self.k == 0 => {
                self.state = IterState::Done;
                return Some(ArrayVec::new());
            }
            IterState::Fresh => {
                self.state = IterState::Running;
                self.advance(0, false)
            }
            IterState::Running => self.advance(self.k - 1, true),
        };
        if ok {
            Some(self.vecs[..self.k].iter().copied().collect())
        } else {
            self.state = IterState::Done;
            None
        }
    }
}

/// Every `k`-dimensional subspace of `Λ_m` exactly once, in key order.
pub fn enumerate_subspaces(m: usize, k: usize) -> Result<impl Iterator<Item = SkewSpace>> {
    check_m(m)?;
    let w = skew_dim(m);
    if k > w {
        return Err(Error::Precondition(format!("k = {k} exceeds dim Λ_{m} = {w}")));
    }
    Ok(RrefIter::new(w, k).map(move |b| SkewSpace::from_reduced(m, &b)))
}

/// The `(m, d)` pairs with `m + d = n` that admit a nondegenerate defining
/// sequence: `m ≥ 2`, `d ≥ 1`, and `d = 1` only for even `m`.
pub fn admissible_params(n: usize) -> Result<Vec<(usize, usize)>> {
    if !(3..=8).contains(&n) {
        return Err(Error::Precondition(format!("n = {n} outside 3..=8")));
    }
    Ok((1..=n - 2)
        .rev()
        .map(|m| (m + 1, n - m - 1))
        .filter(|&(m, d)| d >= 1 && (d > 1 || m % 2 == 0))
        .collect())
}
