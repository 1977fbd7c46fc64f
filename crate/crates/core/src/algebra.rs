//! Binary alternating algebras `R = V ⊕ W`, `V = F2^m`, `W = F2^d`, with
//! product `(x1, y1)·(x2, y2) = (0, (x1 B_k x2ᵗ)_k)` and circle operation
//! `a ∘ b = a + b + a·b`, which makes `(R, +, ∘)` a binary bibrace.
//!
//! Elements are packed into one word: bits `0..m` hold `x`, bits `m..m+d`
//! hold `y`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::census;
use crate::error::{Error, Result};
use crate::exec::{self, ExecPolicy};
use crate::f2core::{check_m, hconcat_rank, packed, F2Matrix, F2Subspace, F2Vector, SkewMatrix};
use crate::orbits::{act, find_congruence, GeneratorSet, GroupElement, MAX_ENUMERATED_M};
use crate::spaces::SkewSpace;

/// Largest total dimension `m + d` handled (elements fit a byte).
pub const MAX_N: usize = 8;

/// An alternating algebra given by its defining matrices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlternatingAlgebra {
    m: usize,
    d: usize,
    defining: Vec<SkewMatrix>,
    /// Packed rows of each defining matrix.
    rows: Vec<u64>,
}

/// An element `(x, y)` of `V ⊕ W`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlgebraElement {
    pub x: F2Vector,
    pub y: F2Vector,
}

impl AlternatingAlgebra {
    pub fn new(m: usize, defining: Vec<SkewMatrix>) -> Result<Self> {
        check_m(m)?;
        let d = defining.len();
        if d == 0 || m + d > MAX_N {
            return Err(Error::Precondition(format!("need 1 ≤ d and m + d ≤ {MAX_N}, got m = {m}, d = {d}")));
        }
        if let Some(b) = defining.iter().find(|b| b.m() != m) {
            return Err(Error::DimensionMismatch { expected: m, got: b.m() });
        }
        let rows = defining.iter().map(SkewMatrix::packed_rows).collect();
        Ok(AlternatingAlgebra { m, d, defining, rows })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// Total dimension `n = m + d`.
    pub fn n(&self) -> usize {
        self.m + self.d
    }

    pub fn defining(&self) -> &[SkewMatrix] {
        &self.defining
    }

    /// The span `⟨B_1, …, B_d⟩ ⊆ Λ_m`.
    pub fn defining_span(&self) -> SkewSpace {
        SkewSpace::span(self.m, &self.defining).expect("validated sizes")
    }

    pub fn is_nondegenerate(&self) -> bool {
        hconcat_rank(&self.defining).expect("validated sizes") == self.m
    }

    pub fn element(&self, x: &F2Vector, y: &F2Vector) -> Result<u64> {
        if x.len() != self.m || y.len() != self.d {
            return Err(Error::DimensionMismatch { expected: self.n(), got: x.len() + y.len() });
        }
        Ok(x.as_u64() | y.as_u64() << self.m)
    }

    pub fn unpack(&self, a: u64) -> AlgebraElement {
        AlgebraElement {
            x: F2Vector::from_u64(self.m, a & self.x_mask()).expect("m bits"),
            y: F2Vector::from_u64(self.d, a >> self.m).expect("d bits"),
        }
    }

    fn x_mask(&self) -> u64 {
        (1 << self.m) - 1
    }

    /// `a · b` on packed elements.
    #[inline]
    pub fn product_word(&self, a: u64, b: u64) -> u64 {
        let (xa, xb) = (a & self.x_mask(), b & self.x_mask());
        let mut y = 0u64;
        for (k, &rows) in self.rows.iter().enumerate() {
            y |= ((packed::left_mul(xa, rows) & xb).count_ones() as u64 & 1) << k;
        }
        y << self.m
    }

    pub fn product(&self, a: &AlgebraElement, b: &AlgebraElement) -> Result<AlgebraElement> {
        let (a, b) = (self.element(&a.x, &a.y)?, self.element(&b.x, &b.y)?);
        Ok(self.unpack(self.product_word(a, b)))
    }

    #[inline]
    pub fn circle_word(&self, a: u64, b: u64) -> u64 {
        a ^ b ^ self.product_word(a, b)
    }

    pub fn circle(&self, a: &AlgebraElement, b: &AlgebraElement) -> Result<AlgebraElement> {
        let (a, b) = (self.element(&a.x, &a.y)?, self.element(&b.x, &b.y)?);
        Ok(self.unpack(self.circle_word(a, b)))
    }

    /// Full product table, entry `a << n | b`.
    pub fn product_table(&self) -> Vec<u8> {
        let n = self.n();
        (0..1u64 << (2 * n)).map(|ab| self.product_word(ab >> n, ab & ((1 << n) - 1)) as u8).collect()
    }

    /// `Ann(R) = {a : a·R = 0}`, solved from the products of basis vectors.
    pub fn annihilator(&self) -> F2Subspace {
        let n = self.n();
        // row j: the products e_j · e_i for all i, side by side
        let rows: Vec<u64> = (0..n)
            .map(|j| (0..n).fold(0u64, |acc, i| acc | (self.product_word(1 << j, 1 << i) >> self.m) << (i * self.d)))
            .collect();
        let images = F2Matrix::from_rows(n * self.d, rows).expect("n·d ≤ 64");
        F2Subspace::span_words(n, images.left_kernel()).expect("kernel vectors fit")
    }

    /// `R² = ⟨a·b⟩`, spanned by the products of basis vectors.
    pub fn square(&self) -> F2Subspace {
        let n = self.n();
        let products = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| self.product_word(1 << i, 1 << j));
        F2Subspace::span_words(n, products).expect("products fit")
    }

    /// `R` is primitive when `Ann(R) = R²`.
    pub fn is_primitive(&self) -> bool {
        let (ann, sq) = (self.annihilator(), self.square());
        ann.dim() == sq.dim() && sq.is_subspace_of(&ann)
    }

    /// The algebra with parameters `(m, dim ⟨B_i⟩)` whose defining sequence is
    /// the reduced basis of the span: the quotient by a complement of `R²`
    /// in `W`.
    pub fn strip_to_basis(&self) -> Result<AlternatingAlgebra> {
        let span = self.defining_span();
        if span.dim() == 0 {
            return Err(Error::Precondition("all defining matrices vanish".into()));
        }
        AlternatingAlgebra::new(self.m, span.basis_matrices())
    }

    /// Replaces the defining span by `A · span · Aᵗ`, keeping `d`.
    pub fn transformed(&self, a: &GroupElement) -> Result<AlternatingAlgebra> {
        let defining = self.defining.iter().map(|b| a.congruence(b)).collect();
        AlternatingAlgebra::new(self.m, defining)
    }

    pub fn to_file_format(&self) -> AlgebraFile {
        AlgebraFile { m: self.m, d: self.d, defining: self.defining.iter().map(SkewMatrix::to_hex).collect() }
    }

    pub fn from_file_format(f: &AlgebraFile) -> Result<Self> {
        if f.defining.len() != f.d {
            return Err(Error::Parse(format!("d = {} but {} defining matrices listed", f.d, f.defining.len())));
        }
        let defining = f.defining.iter().map(|t| SkewMatrix::parse_hex(f.m, t)).collect::<Result<Vec<_>>>()?;
        AlternatingAlgebra::new(f.m, defining)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let f: AlgebraFile = serde_json::from_str(text).map_err(|e| Error::Parse(format!("algebra file: {e}")))?;
        Self::from_file_format(&f)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

/// On-disk description of an algebra: `{"m": 4, "d": 2, "defining": ["9", "6"]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlgebraFile {
    pub m: usize,
    pub d: usize,
    pub defining: Vec<String>,
}

/// Outcome of an exhaustive check of the bibrace axioms.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BibraceReport {
    /// `(x + y) ∘ z = x ∘ z + z + y ∘ z`.
    pub left_distributive: bool,
    /// `x ∘ y + z = ((x + z) ∘ z) ∘ (y + z)`.
    pub shifted_identity: bool,
    /// The same with the right-hand side grouped as `(x + z) ∘ (z ∘ (y + z))`.
    pub shifted_identity_right_grouped: bool,
    pub associative: bool,
    pub commutative: bool,
    /// `0` is neutral for `∘`.
    pub neutral_zero: bool,
    /// `x ∘ x = 0`.
    pub involutive: bool,
}

impl BibraceReport {
    /// Both defining identities hold and `(R, ∘)` is an elementary abelian
    /// 2-group.
    pub fn is_bibrace(&self) -> bool {
        self.left_distributive
            && self.shifted_identity
            && self.associative
            && self.commutative
            && self.neutral_zero
            && self.involutive
    }
}

/// Checks the bibrace axioms for `circle` on all of `F2^n` (triples
/// exhaustively; `n ≤ 8`). `circle` takes packed operands.
pub fn check_bibrace_with<F>(n: usize, circle: F, policy: ExecPolicy) -> Result<BibraceReport>
where
    F: Fn(u64, u64) -> u64 + Sync,
{
    if n == 0 || n > MAX_N {
        return Err(Error::Precondition(format!("exhaustive checks need 1 ≤ n ≤ {MAX_N}")));
    }
    let size = 1u64 << n;
    let table: Vec<u8> = (0..size * size).map(|ab| circle(ab >> n, ab & (size - 1)) as u8).collect();
    let c = |a: u64, b: u64| table[(a << n | b) as usize] as u64;
    let mut report = BibraceReport {
        commutative: exec::all_range(policy, 0..size, |a| (0..size).all(|b| c(a, b) == c(b, a))),
        neutral_zero: (0..size).all(|a| c(a, 0) == a && c(0, a) == a),
        involutive: (0..size).all(|a| c(a, a) == 0),
        ..Default::default()
    };
    let triples = |check: &(dyn Fn(u64, u64, u64) -> bool + Sync)| {
        exec::all_range(policy, 0..size, |x| (0..size).all(|y| (0..size).all(|z| check(x, y, z))))
    };
    report.left_distributive = triples(&|x, y, z| c(x ^ y, z) == c(x, z) ^ z ^ c(y, z));
    report.shifted_identity = triples(&|x, y, z| c(x, y) ^ z == c(c(x ^ z, z), y ^ z));
    report.shifted_identity_right_grouped = triples(&|x, y, z| c(x, y) ^ z == c(x ^ z, c(z, y ^ z)));
    report.associative = triples(&|x, y, z| c(c(x, y), z) == c(x, c(y, z)));
    Ok(report)
}

/// [`check_bibrace_with`] for the circle operation of `r`.
pub fn check_bibrace(r: &AlternatingAlgebra, policy: ExecPolicy) -> Result<BibraceReport> {
    check_bibrace_with(r.n(), |a, b| r.circle_word(a, b), policy)
}

/// `x·x = 0` for all `x` and `(x·y)·z = x·(y·z) = 0` for all triples.
pub fn check_alternating_nilpotent(r: &AlternatingAlgebra, policy: ExecPolicy) -> bool {
    let size = 1u64 << r.n();
    let table = r.product_table();
    let n = r.n();
    let p = |a: u64, b: u64| table[(a << n | b) as usize] as u64;
    (0..size).all(|a| p(a, a) == 0)
        && exec::all_range(policy, 0..size, |x| {
            (0..size).all(|y| {
                let xy = p(x, y);
                (0..size).all(|z| p(xy, z) == 0 && p(z, xy) == 0)
            })
        })
}

/// Recovers `x·y = x + y + x ∘ y` from the circle table and compares it to
/// the product.
pub fn product_roundtrip(r: &AlternatingAlgebra) -> bool {
    let size = 1u64 << r.n();
    (0..size).all(|a| (0..size).all(|b| a ^ b ^ r.circle_word(a, b) == r.product_word(a, b)))
}

/// How [`are_isomorphic`] reached its answer.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum IsoMethod {
    /// Differing dimension or rank sequence of the defining spans.
    Invariant,
    /// Breadth-first search for a congruence.
    Search,
    /// Normal forms of single matrices.
    NormalForm,
    /// Lookup in the stored census of 2-dimensional subspaces of `Λ_6`.
    Census,
}

/// Result of [`are_isomorphic`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IsoResult {
    pub isomorphic: bool,
    /// `A` with `A · span(R2) · Aᵗ = span(R1)`, when one was constructed.
    pub witness: Option<GroupElement>,
    pub method: IsoMethod,
}

/// Two algebras with the same `(m, d)` are isomorphic iff their defining
/// spans are congruent.
pub fn are_isomorphic(r1: &AlternatingAlgebra, r2: &AlternatingAlgebra) -> Result<IsoResult> {
    if (r1.m, r1.d) != (r2.m, r2.d) {
        return Err(Error::Precondition(format!(
            "parameters differ: ({}, {}) vs ({}, {})",
            r1.m, r1.d, r2.m, r2.d
        )));
    }
    let m = r1.m;
    let (s1, s2) = (r1.defining_span(), r2.defining_span());
    let not_iso = IsoResult { isomorphic: false, witness: None, method: IsoMethod::Invariant };
    if s1.dim() != s2.dim() || s1.rank_sequence() != s2.rank_sequence() {
        return Ok(not_iso);
    }
    if s1 == s2 {
        return Ok(IsoResult { isomorphic: true, witness: Some(GroupElement::identity(m)?), method: IsoMethod::Invariant });
    }
    if s1.dim() == 1 {
        // nonzero matrices of equal rank are congruent
        let (a1, _) = s1.basis_matrices()[0].normal_form();
        let (a2, _) = s2.basis_matrices()[0].normal_form();
        let a = GroupElement::from_matrix(&a1)?.inverse().mul(&GroupElement::from_matrix(&a2)?);
        debug_assert_eq!(act(&a, &s2)?, s1);
        return Ok(IsoResult { isomorphic: true, witness: Some(a), method: IsoMethod::NormalForm });
    }
    if m <= MAX_ENUMERATED_M {
        let w = find_congruence(&s2, &s1, GeneratorSet::Transvections)?;
        return Ok(match w {
            Some(w) => IsoResult { isomorphic: true, witness: Some(w.matrix(m)?), method: IsoMethod::Search },
            None => IsoResult { isomorphic: false, witness: None, method: IsoMethod::Search },
        });
    }
    if m == 6 && s1.dim() == 2 {
        let table = census::lambda6_planes()?;
        let (c1, c2) = (table.class_of(&s1)?, table.class_of(&s2)?);
        return Ok(IsoResult { isomorphic: c1 == c2, witness: None, method: IsoMethod::Census });
    }
    Err(Error::Infeasible(format!(
        "isomorphism of {}-dimensional defining spans in Λ_{m} is not supported",
        s1.dim()
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(m: usize, i: usize, j: usize) -> SkewMatrix {
        SkewMatrix::unit(m, i, j).unwrap()
    }

    fn v(bits: &[u8]) -> F2Vector {
        F2Vector::from_bits(&bits.iter().map(|&b| b == 1).collect::<Vec<_>>())
    }

    #[test]
    fn product_and_circle_examples() {
        let r = AlternatingAlgebra::new(2, vec![e(2, 1, 2)]).unwrap();
        let a = AlgebraElement { x: v(&[1, 0]), y: v(&[0]) };
        let b = AlgebraElement { x: v(&[0, 1]), y: v(&[0]) };
        assert_eq!(r.product(&a, &b).unwrap(), AlgebraElement { x: v(&[0, 0]), y: v(&[1]) });
        assert_eq!(r.circle(&a, &b).unwrap(), AlgebraElement { x: v(&[1, 1]), y: v(&[1]) });
        let zero = AlgebraElement { x: v(&[0, 0]), y: v(&[0]) };
        assert_eq!(r.circle(&a, &zero).unwrap(), a);
        assert_eq!(r.circle(&a, &a).unwrap(), zero);
        assert_eq!(r.product(&a, &a).unwrap(), zero);
    }

    #[test]
    fn smallest_bibrace() {
        let r = AlternatingAlgebra::new(2, vec![e(2, 1, 2)]).unwrap();
        assert!(check_bibrace(&r, ExecPolicy::Sequential).unwrap().is_bibrace());
        assert!(check_alternating_nilpotent(&r, ExecPolicy::Sequential));
        assert!(product_roundtrip(&r));
    }

    #[test]
    fn corrupted_table_is_rejected() {
        let r = AlternatingAlgebra::new(4, vec![e(4, 1, 2), e(4, 3, 4)]).unwrap();
        let n = r.n();
        let mut table = r.product_table();
        // one asymmetric entry: (e_1 · e_3) gains a W-component, (e_3 · e_1) does not
        table[(1 << n) | 4] ^= 1 << r.m();
        let report =
            check_bibrace_with(n, |a, b| a ^ b ^ table[(a << n | b) as usize] as u64, ExecPolicy::Sequential).unwrap();
        assert!(!report.is_bibrace());
        assert!(!report.commutative);
    }

    #[test]
    fn annihilator_examples() {
        let nd = AlternatingAlgebra::new(4, vec![e(4, 1, 2), e(4, 3, 4)]).unwrap();
        assert_eq!(nd.annihilator().dim(), 2);
        let deg = AlternatingAlgebra::new(4, vec![e(4, 1, 2), SkewMatrix::zero(4).unwrap()]).unwrap();
        assert_eq!(deg.annihilator().dim(), 4);
        let zero = AlternatingAlgebra::new(3, vec![SkewMatrix::zero(3).unwrap(); 2]).unwrap();
        assert_eq!(zero.annihilator().dim(), 5);
        assert_eq!(zero.square().dim(), 0);
    }

    #[test]
    fn square_examples() {
        let r = AlternatingAlgebra::new(2, vec![e(2, 1, 2), e(2, 1, 2)]).unwrap();
        assert_eq!(r.square().dim(), 1);
        assert!(r.square().is_subspace_of(&r.annihilator()));
        let stripped = r.strip_to_basis().unwrap();
        assert_eq!((stripped.m(), stripped.d()), (2, 1));
        assert!(stripped.is_primitive());
    }

    #[test]
    fn file_roundtrip() {
        let r = AlternatingAlgebra::new(4, vec![e(4, 1, 4), e(4, 2, 3)]).unwrap();
        let json = serde_json::to_string(&r.to_file_format()).unwrap();
        assert_eq!(AlternatingAlgebra::from_json(&json).unwrap(), r);
        assert!(matches!(
            AlternatingAlgebra::from_json(r#"{"m":3,"d":1,"defining":["zz"]}"#),
            Err(Error::Parse(_))
        ));
    }
}
