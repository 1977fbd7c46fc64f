use std::fmt;
use std::ops::Add;
use std::sync::OnceLock;

use super::{check_m, coord, decode_hex, encode_hex, packed, row_rank, skew_dim, F2Matrix, F2Vector};
use crate::error::{Error, Result};

/// An element of `Λ_m`: symmetric with zero diagonal, stored flattened.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SkewMatrix {
    m: u8,
    bits: u32,
}

impl SkewMatrix {
    pub fn zero(m: usize) -> Result<Self> {
        check_m(m)?;
        Ok(SkewMatrix { m: m as u8, bits: 0 })
    }

    /// From flattened coordinates (bit `c` = coefficient of the `c`-th `E_ij`).
    pub fn from_flat(m: usize, bits: u32) -> Result<Self> {
        check_m(m)?;
        let w = skew_dim(m);
        if w < 32 && bits >> w != 0 {
            return Err(Error::DimensionMismatch { expected: w, got: 32 - bits.leading_zeros() as usize });
        }
        Ok(SkewMatrix { m: m as u8, bits })
    }

    pub(crate) fn from_flat_unchecked(m: usize, bits: u32) -> Self {
        SkewMatrix { m: m as u8, bits }
    }

    /// `E_ij = e_ij + e_ji` with one-based `1 ≤ i < j ≤ m`.
    pub fn unit(m: usize, i: usize, j: usize) -> Result<Self> {
        check_m(m)?;
        if !(1 <= i && i < j && j <= m) {
            return Err(Error::Precondition(format!("E_{i}{j} needs 1 <= i < j <= {m}")));
        }
        Ok(SkewMatrix { m: m as u8, bits: 1 << coord(m, i - 1, j - 1) })
    }

    /// Sum of `E_ij` over one-based pairs.
    pub fn sum_of_units(m: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        pairs.iter().try_fold(Self::zero(m)?, |acc, &(i, j)| Ok(acc + Self::unit(m, i, j)?))
    }

    pub fn from_matrix(a: &F2Matrix) -> Result<Self> {
        let m = a.rows();
        if !a.is_square() {
            return Err(Error::DimensionMismatch { expected: a.rows(), got: a.cols() });
        }
        check_m(m)?;
        for i in 0..m {
            if a.get(i, i) {
                return Err(Error::NotSkew);
            }
            for j in i + 1..m {
                if a.get(i, j) != a.get(j, i) {
                    return Err(Error::NotSkew);
                }
            }
        }
        let flat = packed::upper_flat(packed::from_rows(a.row_words()), m);
        Ok(SkewMatrix { m: m as u8, bits: flat })
    }

    pub fn to_matrix(&self) -> F2Matrix {
        let p = self.packed_rows();
        F2Matrix::from_rows(self.m(), packed::rows(p, self.m()).collect()).expect("rows fit")
    }

    pub fn m(&self) -> usize {
        self.m as usize
    }

    pub fn flat(&self) -> u32 {
        self.bits
    }

    pub fn is_zero(&self) -> bool {
        self.bits == 0
    }

    pub fn flatten(&self) -> F2Vector {
        F2Vector::from_u64(skew_dim(self.m()), self.bits as u64).expect("flat bits fit")
    }

    pub fn unflatten(v: &F2Vector, m: usize) -> Result<Self> {
        check_m(m)?;
        let w = skew_dim(m);
        if v.len() != w {
            return Err(Error::DimensionMismatch { expected: w, got: v.len() });
        }
        Ok(SkewMatrix { m: m as u8, bits: v.as_u64() as u32 })
    }

    /// Entry `(i, j)`, zero-based.
    pub fn get(&self, i: usize, j: usize) -> bool {
        let m = self.m();
        assert!(i < m && j < m);
        match i.cmp(&j) {
            std::cmp::Ordering::Equal => false,
            std::cmp::Ordering::Less => self.bits >> coord(m, i, j) & 1 == 1,
            std::cmp::Ordering::Greater => self.bits >> coord(m, j, i) & 1 == 1,
        }
    }

    /// All rows packed into one word, byte `i` = row `i`.
    pub fn packed_rows(&self) -> u64 {
        packed::skew_rows(self.bits, self.m())
    }

    /// Row `i` as a packed word.
    pub fn row_word(&self, i: usize) -> u64 {
        packed::row(self.packed_rows(), i)
    }

    pub fn rank(&self) -> usize {
        let m = self.m();
        if m <= RANK_TABLE_MAX_M {
            rank_table(m)[self.bits as usize] as usize
        } else {
            packed::rank(self.packed_rows(), m)
        }
    }

    /// The bilinear form `x · B · yᵗ` on packed row vectors.
    pub fn form(&self, x: u64, y: u64) -> bool {
        (packed::left_mul(x, self.packed_rows()) & y).count_ones() & 1 == 1
    }

    /// `A · self · Aᵗ`; `A` must be invertible of matching size.
    pub fn congruence(&self, a: &F2Matrix) -> Result<SkewMatrix> {
        if a.rows() != self.m() || !a.is_square() {
            return Err(Error::DimensionMismatch { expected: self.m(), got: a.rows() });
        }
        if !a.is_invertible() {
            return Err(Error::Singular);
        }
        let pa = packed::from_rows(a.row_words());
        Ok(SkewMatrix { m: self.m, bits: packed::congruence_flat(pa, self.bits, self.m()) })
    }

    /// Symplectic basis extraction: returns invertible `A` and `r = rank`
    /// with `A · self · Aᵗ = E_12 + E_34 + … + E_{r-1,r}`.
    pub fn normal_form(&self) -> (F2Matrix, usize) {
        let m = self.m();
        let rows = self.packed_rows();
        let form = |x: u64, y: u64| (packed::left_mul(x, rows) & y).count_ones() & 1 == 1;

        let mut pending: Vec<u64> = (0..m).map(|i| 1u64 << i).collect();
        let mut out = Vec::with_capacity(m);
        loop {
            let pair = pending.iter().enumerate().find_map(|(a, &x)| {
                pending.iter().enumerate().skip(a + 1).find(|&(_, &y)| form(x, y)).map(|(b, _)| (a, b))
            });
            let Some((a, b)) = pair else { break };
            let (x, y) = (pending[a], pending[b]);
            out.push(x);
            out.push(y);
            pending = pending
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != a && i != b)
                .map(|(_, &w)| {
                    let mut p = w;
                    if form(w, y) {
                        p ^= x;
                    }
                    if form(w, x) {
                        p ^= y;
                    }
                    p
                })
                .collect();
        }
        let r = out.len();
        out.extend(pending);
        (F2Matrix::from_rows(m, out).expect("basis rows fit"), r)
    }

    /// The canonical matrix `E_12 + E_34 + …` of rank `r`.
    pub fn canonical_of_rank(m: usize, r: usize) -> Result<Self> {
        check_m(m)?;
        if r % 2 == 1 || r > m {
            return Err(Error::Precondition(format!("no skew matrix of rank {r} in size {m}")));
        }
        let pairs: Vec<_> = (0..r / 2).map(|t| (2 * t + 1, 2 * t + 2)).collect();
        Self::sum_of_units(m, &pairs)
    }

    pub fn to_hex(&self) -> String {
        encode_hex(self.bits as u64)
    }

    pub fn parse_hex(m: usize, token: &str) -> Result<Self> {
        check_m(m)?;
        let bits = decode_hex(token, skew_dim(m))?;
        Ok(SkewMatrix { m: m as u8, bits: bits as u32 })
    }
}

impl Add for SkewMatrix {
    type Output = SkewMatrix;

    fn add(self, rhs: SkewMatrix) -> SkewMatrix {
        assert_eq!(self.m, rhs.m, "size mismatch");
        SkewMatrix { m: self.m, bits: self.bits ^ rhs.bits }
    }
}

impl fmt::Debug for SkewMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = self.m();
        let mut terms = Vec::new();
        for i in 0..m {
            for j in i + 1..m {
                if self.get(i, j) {
                    terms.push(format!("E{}{}", i + 1, j + 1));
                }
            }
        }
        if terms.is_empty() {
            write!(f, "0[{m}]")
        } else {
            write!(f, "{}[{m}]", terms.join("+"))
        }
    }
}

/// The `m(m-1)/2` matrices `E_ij` in flattening order.
pub fn standard_basis(m: usize) -> Result<Vec<SkewMatrix>> {
    check_m(m)?;
    Ok((0..skew_dim(m)).map(|c| SkewMatrix { m: m as u8, bits: 1 << c }).collect())
}

/// Rank of the `m × (m·d)` horizontal concatenation `[B_1 | … | B_d]`.
///
/// Each `B_k` is symmetric, so this equals the rank of the vertical stack
/// of the same matrices.
pub fn hconcat_rank(mats: &[SkewMatrix]) -> Result<usize> {
    let Some(first) = mats.first() else { return Ok(0) };
    let m = first.m();
    if let Some(bad) = mats.iter().find(|b| b.m() != m) {
        return Err(Error::DimensionMismatch { expected: m, got: bad.m() });
    }
    Ok(row_rank(mats.iter().flat_map(|b| packed::rows(b.packed_rows(), m))))
}

const RANK_TABLE_MAX_M: usize = 7;

/// Rank of every element of `Λ_m`, indexed by flattened bits (`m ≤ 7`).
pub fn rank_table(m: usize) -> &'static [u8] {
    static TABLES: [OnceLock<Vec<u8>>; RANK_TABLE_MAX_M + 1] = [const { OnceLock::new() }; RANK_TABLE_MAX_M + 1];
    assert!((2..=RANK_TABLE_MAX_M).contains(&m), "rank table only for 2 <= m <= {RANK_TABLE_MAX_M}");
    TABLES[m].get_or_init(|| {
        (0u32..1 << skew_dim(m))
            .map(|f| packed::rank(packed::skew_rows(f, m), m) as u8)
            .collect()
    })
}

/// Number of elements of `Λ_m` of each rank (index = rank).
pub fn skew_count_by_rank(m: usize) -> Result<Vec<u64>> {
    check_m(m)?;
    if m > RANK_TABLE_MAX_M {
        return Err(Error::Infeasible(format!("rank census of Λ_{m}")));
    }
    let mut counts = vec![0u64; m + 1];
    for &r in rank_table(m) {
        counts[r as usize] += 1;
    }
    Ok(counts)
}

/// Common left kernel `∩_k ker B_k` as packed vectors.
pub fn common_kernel(mats: &[SkewMatrix], m: usize) -> Vec<u64> {
    // x·B_k = 0 for all k  ⇔  x · [B_1 | … | B_d] = 0
    if mats.len() * m > 64 {
        // fall back to stacking: kernel of the m × (m·d) matrix, computed in slices
        let mut basis: Vec<u64> = (0..m).map(|i| 1u64 << i).collect();
        for b in mats {
            let mat = F2Matrix::from_rows(m, packed::rows(b.packed_rows(), m).collect()).expect("fits");
            let restricted: Vec<u64> = basis.iter().map(|&x| mat.left_mul_word(x)).collect();
            let sub = F2Matrix::from_rows(m, restricted).expect("fits");
            let ker = sub.left_kernel();
            basis = ker
                .iter()
                .map(|&t| {
                    let mut v = 0;
                    let mut bits = t;
                    while bits != 0 {
                        v ^= basis[bits.trailing_zeros() as usize];
                        bits &= bits - 1;
                    }
                    v
                })
                .collect();
        }
        return basis;
    }
    let cols: Vec<u64> = (0..m)
        .map(|i| mats.iter().enumerate().fold(0u64, |acc, (k, b)| acc | b.row_word(i) << (k * m)))
        .collect();
    F2Matrix::from_rows(mats.len() * m, cols).expect("fits").left_kernel()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(m: usize, i: usize, j: usize) -> SkewMatrix {
        SkewMatrix::unit(m, i, j).unwrap()
    }

    #[test]
    fn rank_examples() {
        assert_eq!(SkewMatrix::zero(4).unwrap().rank(), 0);
        assert_eq!(e(4, 1, 2).rank(), 2);
        assert_eq!((e(4, 1, 3) + e(4, 2, 4)).rank(), 4);
        assert_eq!(SkewMatrix::zero(8).unwrap().rank(), 0);
        assert_eq!((e(8, 1, 2) + e(8, 7, 8)).rank(), 4);
    }

    #[test]
    fn hconcat_rank_examples() {
        assert_eq!(hconcat_rank(&[e(2, 1, 2)]).unwrap(), 2);
        assert_eq!(hconcat_rank(&[e(4, 1, 2)]).unwrap(), 2);
        assert_eq!(hconcat_rank(&[e(4, 1, 2), e(4, 3, 4)]).unwrap(), 4);
        assert!(hconcat_rank(&[e(4, 1, 2), e(3, 1, 2)]).is_err());
    }

    #[test]
    fn standard_basis_lengths_and_order() {
        assert_eq!(standard_basis(2).unwrap(), vec![e(2, 1, 2)]);
        assert_eq!(standard_basis(3).unwrap(), vec![e(3, 1, 2), e(3, 1, 3), e(3, 2, 3)]);
        assert_eq!(standard_basis(6).unwrap().len(), 15);
        assert!(standard_basis(1).is_err());
        assert!(standard_basis(0).is_err());
    }

    #[test]
    fn flatten_examples() {
        assert!(SkewMatrix::zero(3).unwrap().flatten().is_zero());
        assert_eq!(e(3, 1, 2).flatten(), F2Vector::from_bits(&[true, false, false]));
        let v = F2Vector::from_bits(&[true, true, false]);
        assert_eq!(SkewMatrix::unflatten(&v, 3).unwrap(), e(3, 1, 2) + e(3, 1, 3));
        assert!(SkewMatrix::unflatten(&F2Vector::zero(4), 3).is_err());
    }

    #[test]
    fn hex_encoding_examples() {
        assert_eq!(e(3, 1, 2).to_hex(), "1");
        assert_eq!((e(3, 1, 2) + e(3, 2, 3)).to_hex(), "5");
        assert_eq!(SkewMatrix::parse_hex(3, "5").unwrap(), e(3, 1, 2) + e(3, 2, 3));
        assert!(SkewMatrix::parse_hex(3, "8").is_err());
    }

    #[test]
    fn congruence_examples() {
        let id = F2Matrix::identity(4);
        let b = e(4, 1, 2) + e(4, 3, 4);
        assert_eq!(b.congruence(&id).unwrap(), b);
        let swap = F2Matrix::from_rows(4, vec![0b0010, 0b0001, 0b0100, 0b1000]).unwrap();
        assert_eq!(e(4, 1, 2).congruence(&swap).unwrap(), e(4, 1, 2));
        let singular = F2Matrix::zeros(4, 4);
        assert!(matches!(b.congruence(&singular), Err(Error::Singular)));
    }

    #[test]
    fn matrix_round_trip_and_validation() {
        let b = e(5, 1, 4) + e(5, 2, 5);
        assert_eq!(SkewMatrix::from_matrix(&b.to_matrix()).unwrap(), b);
        let diag = F2Matrix::identity(3);
        assert!(matches!(SkewMatrix::from_matrix(&diag), Err(Error::NotSkew)));
        let asym = F2Matrix::from_rows(3, vec![0b010, 0, 0]).unwrap();
        assert!(matches!(SkewMatrix::from_matrix(&asym), Err(Error::NotSkew)));
    }

    #[test]
    fn normal_form_trivial_cases() {
        let (a, r) = SkewMatrix::zero(4).unwrap().normal_form();
        assert_eq!((a, r), (F2Matrix::identity(4), 0));
        let (a, r) = e(2, 1, 2).normal_form();
        assert_eq!((a, r), (F2Matrix::identity(2), 2));
    }

    #[test]
    fn rank_census_of_small_spaces() {
        // Λ_4: 1 zero, 35 of rank 2, 28 of rank 4
        assert_eq!(skew_count_by_rank(4).unwrap(), vec![1, 0, 35, 0, 28]);
        assert_eq!(skew_count_by_rank(6).unwrap()[6], 13888);
    }

    #[test]
    fn common_kernel_matches_rank() {
        let mats = [e(5, 1, 2), e(5, 3, 4)];
        let k = common_kernel(&mats, 5);
        assert_eq!(k.len(), 5 - hconcat_rank(&mats).unwrap());
        for x in k {
            for b in &mats {
                assert_eq!(packed::left_mul(x, b.packed_rows()), 0);
            }
        }
    }

    #[test]
    fn ranks_are_even_up_to_seven() {
        for m in 2..=6 {
            assert!(rank_table(m).iter().all(|r| r % 2 == 0));
        }
    }
}
