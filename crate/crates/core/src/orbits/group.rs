use std::collections::HashSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::exec::{self, ExecPolicy};
use crate::f2core::{check_m, packed, F2Matrix, SkewMatrix};

/// An element of `GL(m, 2)` for `m ≤ 8`, packed one row per byte.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupElement {
    m: u8,
    packed: u64,
}

impl GroupElement {
    pub fn identity(m: usize) -> Result<Self> {
        check_m(m)?;
        Ok(GroupElement { m: m as u8, packed: packed::identity(m) })
    }

    /// From packed rows (byte `i` = row `i`); fails on singular input.
    pub fn from_packed(m: usize, packed: u64) -> Result<Self> {
        check_m(m)?;
        if m < 8 && (0..8).any(|i| i >= m && packed::row(packed, i) != 0 || i < m && packed::row(packed, i) >> m != 0) {
            return Err(Error::DimensionMismatch { expected: m, got: 8 });
        }
        if packed::rank(packed, m) != m {
            return Err(Error::Singular);
        }
        Ok(GroupElement { m: m as u8, packed })
    }

    pub fn from_matrix(a: &F2Matrix) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::DimensionMismatch { expected: a.rows(), got: a.cols() });
        }
        Self::from_packed(a.rows(), packed::from_rows(a.row_words()))
    }

    pub fn to_matrix(&self) -> F2Matrix {
        F2Matrix::from_rows(self.m(), packed::rows(self.packed, self.m()).collect()).expect("rows fit")
    }

    /// The elementary transvection `I + e_ij` (zero-based, `i ≠ j`): adds
    /// row `j` to row `i` when multiplied on the left.
    pub fn transvection(m: usize, i: usize, j: usize) -> Result<Self> {
        check_m(m)?;
        if i == j || i >= m || j >= m {
            return Err(Error::Precondition(format!("transvection ({i}, {j}) invalid for m = {m}")));
        }
        Ok(GroupElement { m: m as u8, packed: packed::identity(m) | 1 << (8 * i + j) })
    }

    /// Permutation matrix sending basis vector `e_i` to `e_{perm[i]}`.
    pub fn permutation(perm: &[usize]) -> Result<Self> {
        let m = perm.len();
        check_m(m)?;
        let rows: Vec<u64> = perm.iter().map(|&p| 1u64 << p).collect();
        Self::from_packed(m, packed::from_rows(&rows))
    }

    pub fn m(&self) -> usize {
        self.m as usize
    }

    pub fn packed(&self) -> u64 {
        self.packed
    }

    /// Matrix product `self · rhs`.
    pub fn mul(&self, rhs: &GroupElement) -> GroupElement {
        assert_eq!(self.m, rhs.m, "size mismatch");
        GroupElement { m: self.m, packed: packed::mul(self.packed, rhs.packed, self.m()) }
    }

    pub fn inverse(&self) -> GroupElement {
        let inv = packed::inverse(self.packed, self.m()).expect("group elements are invertible");
        GroupElement { m: self.m, packed: inv }
    }

    pub fn is_identity(&self) -> bool {
        self.packed == packed::identity(self.m())
    }

    /// `A · B · Aᵗ`.
    pub fn congruence(&self, b: &SkewMatrix) -> SkewMatrix {
        assert_eq!(self.m(), b.m(), "size mismatch");
        SkewMatrix::from_flat_unchecked(self.m(), packed::congruence_flat(self.packed, b.flat(), self.m()))
    }

    /// Dense index of the matrix bits (`m²` bits, row-major).
    pub(crate) fn dense_index(&self) -> u64 {
        dense_index(self.packed, self.m())
    }
}

impl fmt::Debug for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = packed::rows(self.packed, self.m())
            .map(|r| (0..self.m()).map(|j| if r >> j & 1 == 1 { '1' } else { '0' }).collect())
            .collect();
        write!(f, "[{}]", rows.join(" "))
    }
}

pub(crate) fn dense_index(p: u64, m: usize) -> u64 {
    (0..m).fold(0, |acc, i| acc | packed::row(p, i) << (m * i))
}

pub(crate) fn from_dense_index(idx: u64, m: usize) -> u64 {
    let mask = (1u64 << m) - 1;
    (0..m).fold(0, |acc, i| acc | (idx >> (m * i) & mask) << (8 * i))
}

/// `|GL(m, 2)| = ∏_{j<m} (2^m − 2^j)`.
pub fn gl_order(m: usize) -> u128 {
    (0..m).map(|j| (1u128 << m) - (1u128 << j)).product()
}

/// Which generating set of `GL(m, 2)` drives orbit searches.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GeneratorSet {
    /// All `m(m−1)` elementary transvections.
    #[default]
    Transvections,
    /// The transvection `I + e_12` together with the cyclic permutation
    /// matrix `e_i ↦ e_{i+1}`.
    Pair,
}

/// The `m(m−1)` elementary transvections `I + e_ij`, `i ≠ j`.
pub fn gl_generators(m: usize) -> Result<Vec<GroupElement>> {
    check_m(m)?;
    let mut out = Vec::with_capacity(m * (m - 1));
    for i in 0..m {
        for j in 0..m {
            if i != j {
                out.push(GroupElement::transvection(m, i, j)?);
            }
        }
    }
    Ok(out)
}

/// Two generators of `GL(m, 2)`: `I + e_12` and an `m`-cycle.
pub fn gl_pair_generators(m: usize) -> Result<Vec<GroupElement>> {
    check_m(m)?;
    let cycle: Vec<usize> = (0..m).map(|i| (i + 1) % m).collect();
    Ok(vec![GroupElement::transvection(m, 0, 1)?, GroupElement::permutation(&cycle)?])
}

pub fn generators(m: usize, set: GeneratorSet) -> Result<Vec<GroupElement>> {
    match set {
        GeneratorSet::Transvections => gl_generators(m),
        GeneratorSet::Pair => gl_pair_generators(m),
    }
}

/// Largest `m` for which `GL(m, 2)` is enumerated element by element.
pub const MAX_ENUMERATED_M: usize = 5;

/// Calls `keep` on every element of `GL(m, 2)` (`m ≤ 5`) and collects the
/// accepted ones in increasing packed order.
pub fn filter_gl<F>(m: usize, policy: ExecPolicy, keep: F) -> Result<Vec<GroupElement>>
where
    F: Fn(&GroupElement) -> bool + Sync + Send,
{
    check_m(m)?;
    if m > MAX_ENUMERATED_M {
        return Err(Error::Infeasible(format!("enumerating GL({m}, 2) element by element")));
    }
    let mut out = exec::filter_map_range(policy, 0..1u64 << (m * m), |idx| {
        let p = from_dense_index(idx, m);
        if packed::rank(p, m) != m {
            return None;
        }
        let g = GroupElement { m: m as u8, packed: p };
        keep(&g).then_some(g)
    });
    out.sort_unstable();
    Ok(out)
}

/// All of `GL(m, 2)` for `m ≤ 5`.
pub fn gl_elements(m: usize, policy: ExecPolicy) -> Result<Vec<GroupElement>> {
    filter_gl(m, policy, |_| true)
}

/// Elements of the group generated by `gens`, sorted. Breadth-first closure
/// under right multiplication by the generators.
pub fn closure(m: usize, gens: &[GroupElement]) -> Result<Vec<GroupElement>> {
    check_m(m)?;
    if let Some(g) = gens.iter().find(|g| g.m() != m) {
        return Err(Error::DimensionMismatch { expected: m, got: g.m() });
    }
    let id = GroupElement::identity(m)?;
    let mut seen: HashSet<u64> = HashSet::from([id.packed]);
    let mut frontier = vec![id];
    let mut all = vec![id];
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for x in &frontier {
            for g in gens {
                let y = x.mul(g);
                if seen.insert(y.packed) {
                    next.push(y);
                }
            }
        }
        all.extend_from_slice(&next);
        frontier = next;
    }
    all.sort_unstable();
    Ok(all)
}

/// Order of the group generated by `gens`, via the regular action on itself
/// (orbit of the identity, i.e. of the standard ordered basis). Uses a dense
/// bitmap for `m ≤ 5`.
pub fn generated_order(m: usize, gens: &[GroupElement]) -> Result<u128> {
    check_m(m)?;
    if m > MAX_ENUMERATED_M {
        return Ok(closure(m, gens)?.len() as u128);
    }
    let mut seen = vec![0u64; (1usize << (m * m)).div_ceil(64)];
    let id = GroupElement::identity(m)?;
    let mark = |seen: &mut Vec<u64>, g: &GroupElement| {
        let i = g.dense_index() as usize;
        let fresh = seen[i / 64] >> (i % 64) & 1 == 0;
        seen[i / 64] |= 1 << (i % 64);
        fresh
    };
    mark(&mut seen, &id);
    let mut frontier = vec![id];
    let mut count = 1u128;
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for x in &frontier {
            for g in gens {
                let y = x.mul(g);
                if mark(&mut seen, &y) {
                    next.push(y);
                }
            }
        }
        count += next.len() as u128;
        frontier = next;
    }
    Ok(count)
}

/// A subgroup of `GL(m, 2)`: always its order, optionally the sorted
/// element list and a generating set.
#[derive(Clone, Debug)]
pub struct MatrixGroup {
    m: usize,
    order: u128,
    generators: Vec<GroupElement>,
    elements: Option<Vec<GroupElement>>,
}

impl MatrixGroup {
    /// Wraps a materialized element list (sorted and deduplicated here).
    pub fn from_elements(m: usize, mut elements: Vec<GroupElement>) -> Self {
        elements.sort_unstable();
        elements.dedup();
        let generators = if elements.len() <= 1 << 16 { greedy_generators(m, &elements) } else { Vec::new() };
        MatrixGroup { m, order: elements.len() as u128, generators, elements: Some(elements) }
    }

    pub fn generated_by(m: usize, gens: &[GroupElement]) -> Result<Self> {
        let elements = closure(m, gens)?;
        Ok(MatrixGroup { m, order: elements.len() as u128, generators: gens.to_vec(), elements: Some(elements) })
    }

    pub fn order_only(m: usize, order: u128) -> Self {
        MatrixGroup { m, order, generators: Vec::new(), elements: None }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn order(&self) -> u128 {
        self.order
    }

    pub fn generators(&self) -> &[GroupElement] {
        &self.generators
    }

    pub fn elements(&self) -> Option<&[GroupElement]> {
        self.elements.as_deref()
    }

    pub fn is_materialized(&self) -> bool {
        self.elements.is_some()
    }

    fn materialized(&self) -> Result<&[GroupElement]> {
        self.elements()
            .ok_or_else(|| Error::Precondition("group elements are not materialized".into()))
    }

    pub fn contains(&self, g: &GroupElement) -> Result<bool> {
        Ok(self.materialized()?.binary_search(g).is_ok())
    }

    /// Closure check: every product of two listed elements is listed.
    pub fn is_closed(&self) -> Result<bool> {
        let els = self.materialized()?;
        Ok(els.iter().all(|a| els.iter().all(|b| els.binary_search(&a.mul(b)).is_ok())))
    }

    pub fn is_subgroup_of(&self, other: &MatrixGroup) -> Result<bool> {
        let theirs = other.materialized()?;
        Ok(self.materialized()?.iter().all(|g| theirs.binary_search(g).is_ok()))
    }

    pub fn intersection(&self, other: &MatrixGroup) -> Result<MatrixGroup> {
        let theirs = other.materialized()?;
        let common: Vec<GroupElement> =
            self.materialized()?.iter().filter(|g| theirs.binary_search(g).is_ok()).copied().collect();
        Ok(MatrixGroup::from_elements(self.m, common))
    }

    /// `z⁻¹ · G · z`.
    pub fn conjugate_by(&self, z: &GroupElement) -> Result<MatrixGroup> {
        let zi = z.inverse();
        let conj = self.materialized()?.iter().map(|x| zi.mul(x).mul(z)).collect();
        Ok(MatrixGroup::from_elements(self.m, conj))
    }

    /// Same element set.
    pub fn same_elements(&self, other: &MatrixGroup) -> Result<bool> {
        Ok(self.materialized()? == other.materialized()?)
    }
}

/// Picks elements in increasing order that are not yet generated.
fn greedy_generators(m: usize, elements: &[GroupElement]) -> Vec<GroupElement> {
    let mut gens = Vec::new();
    let mut generated: HashSet<u64> = elements
        .first()
        .map(|_| HashSet::from([packed::identity(m)]))
        .unwrap_or_default();
    for g in elements {
        if generated.contains(&g.packed) {
            continue;
        }
        gens.push(*g);
        // re-close: the new group is generated by the old group and g
        let mut frontier: Vec<u64> = generated.iter().copied().collect();
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for &x in &frontier {
                for h in &gens {
                    let y = packed::mul(x, h.packed, m);
                    if generated.insert(y) {
                        next.push(y);
                    }
                }
            }
            frontier = next;
        }
    }
    gens
}
