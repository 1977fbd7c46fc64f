use std::fmt;

use super::vector::F2Vector;
use crate::error::{Error, Result};

/// Rank of a set of packed row words (elimination keyed by leading bit).
pub fn row_rank<I: IntoIterator<Item = u64>>(rows: I) -> usize {
    let mut basis = [0u64; 64];
    let mut rank = 0;
    for mut v in rows {
        while v != 0 {
            let h = 63 - v.leading_zeros() as usize;
            if basis[h] == 0 {
                basis[h] = v;
                rank += 1;
                break;
            }
            v ^= basis[h];
        }
    }
    rank
}

/// A dense matrix over F2 with at most 64 columns; each row is one word.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct F2Matrix {
    rows: usize,
    cols: usize,
    data: Vec<u64>,
}

impl F2Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(cols <= 64, "at most 64 columns are supported");
        F2Matrix { rows, cols, data: vec![0; rows] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i] = 1 << i;
        }
        m
    }

    /// Builds a matrix from packed rows, bit `j` of `rows[i]` being entry `(i, j)`.
    pub fn from_rows(cols: usize, rows: Vec<u64>) -> Result<Self> {
        if cols > 64 {
            return Err(Error::DimensionMismatch { expected: 64, got: cols });
        }
        let mask = if cols == 64 { u64::MAX } else { (1u64 << cols) - 1 };
        if rows.iter().any(|r| r & !mask != 0) {
            return Err(Error::DimensionMismatch { expected: cols, got: 64 });
        }
        Ok(F2Matrix { rows: rows.len(), cols, data: rows })
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> bool) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                if f(i, j) {
                    m.data[i] |= 1 << j;
                }
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        assert!(i < self.rows && j < self.cols);
        self.data[i] >> j & 1 == 1
    }

    pub fn set(&mut self, i: usize, j: usize, v: bool) {
        assert!(i < self.rows && j < self.cols);
        if v {
            self.data[i] |= 1 << j;
        } else {
            self.data[i] &= !(1 << j);
        }
    }

    pub fn row_words(&self) -> &[u64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> F2Vector {
        F2Vector::from_u64(self.cols, self.data[i]).expect("row fits its width")
    }

    pub fn rank(&self) -> usize {
        row_rank(self.data.iter().copied())
    }

    pub fn transpose(&self) -> F2Matrix {
        let mut t = F2Matrix::zeros(self.cols, self.rows);
        for (i, &r) in self.data.iter().enumerate() {
            let mut bits = r;
            while bits != 0 {
                let j = bits.trailing_zeros() as usize;
                t.data[j] |= 1 << i;
                bits &= bits - 1;
            }
        }
        t
    }

    /// Matrix product `self · rhs`.
    pub fn mul(&self, rhs: &F2Matrix) -> Result<F2Matrix> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch { expected: self.cols, got: rhs.rows });
        }
        let data = self
            .data
            .iter()
            .map(|&r| {
                let mut acc = 0u64;
                let mut bits = r;
                while bits != 0 {
                    acc ^= rhs.data[bits.trailing_zeros() as usize];
                    bits &= bits - 1;
                }
                acc
            })
            .collect();
        Ok(F2Matrix { rows: self.rows, cols: rhs.cols, data })
    }

    /// Row vector times matrix, `x · self` for a packed `x`.
    pub fn left_mul_word(&self, x: u64) -> u64 {
        let mut acc = 0u64;
        let mut bits = x;
        while bits != 0 {
            acc ^= self.data[bits.trailing_zeros() as usize];
            bits &= bits - 1;
        }
        acc
    }

    pub fn is_invertible(&self) -> bool {
        self.is_square() && self.rank() == self.rows
    }

    pub fn inverse(&self) -> Result<F2Matrix> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch { expected: self.rows, got: self.cols });
        }
        let n = self.rows;
        let mut a = self.data.clone();
        let mut inv: Vec<u64> = (0..n).map(|i| 1u64 << i).collect();
        for col in 0..n {
            let pivot = (col..n).find(|&r| a[r] >> col & 1 == 1).ok_or(Error::Singular)?;
            a.swap(col, pivot);
            inv.swap(col, pivot);
            for r in 0..n {
                if r != col && a[r] >> col & 1 == 1 {
                    a[r] ^= a[col];
                    inv[r] ^= inv[col];
                }
            }
        }
        Ok(F2Matrix { rows: n, cols: n, data: inv })
    }

    /// Basis of the left null space `{x : x · self = 0}`, as packed words of
    /// length `rows` (requires `rows ≤ 64`).
    pub fn left_kernel(&self) -> Vec<u64> {
        assert!(self.rows <= 64, "left kernel needs at most 64 rows");
        let mut pivots: [Option<(u64, u64)>; 64] = [None; 64];
        let mut kernel = Vec::new();
        for (i, &r) in self.data.iter().enumerate() {
            let mut v = r;
            let mut tag = 1u64 << i;
            loop {
                if v == 0 {
                    kernel.push(tag);
                    break;
                }
                let h = 63 - v.leading_zeros() as usize;
                match pivots[h] {
                    Some((pv, pt)) => {
                        v ^= pv;
                        tag ^= pt;
                    }
                    None => {
                        pivots[h] = Some((v, tag));
                        break;
                    }
                }
            }
        }
        kernel
    }

    /// Horizontal concatenation `[self | rhs]`.
    pub fn hconcat(&self, rhs: &F2Matrix) -> Result<F2Matrix> {
        if self.rows != rhs.rows {
            return Err(Error::DimensionMismatch { expected: self.rows, got: rhs.rows });
        }
        if self.cols + rhs.cols > 64 {
            return Err(Error::DimensionMismatch { expected: 64, got: self.cols + rhs.cols });
        }
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| a | b << self.cols).collect();
        Ok(F2Matrix { rows: self.rows, cols: self.cols + rhs.cols, data })
    }
}

impl fmt::Debug for F2Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "F2Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                write!(f, "{}", self.get(i, j) as u8)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_matrix_has_rank_zero() {
        assert_eq!(F2Matrix::zeros(4, 4).rank(), 0);
        assert_eq!(F2Matrix::identity(5).rank(), 5);
    }

    #[test]
    fn inverse_round_trips() {
        let a = F2Matrix::from_rows(3, vec![0b011, 0b110, 0b100]).unwrap();
        let inv = a.inverse().unwrap();
        assert_eq!(a.mul(&inv).unwrap(), F2Matrix::identity(3));
        assert_eq!(inv.mul(&a).unwrap(), F2Matrix::identity(3));
        let singular = F2Matrix::from_rows(2, vec![0b11, 0b11]).unwrap();
        assert!(matches!(singular.inverse(), Err(Error::Singular)));
    }

    #[test]
    fn left_kernel_annihilates() {
        let a = F2Matrix::from_rows(3, vec![0b011, 0b110, 0b101, 0b000]).unwrap();
        let k = a.left_kernel();
        assert_eq!(k.len(), 4 - a.rank());
        for x in k {
            assert_eq!(a.left_mul_word(x), 0);
        }
    }

    #[test]
    fn transpose_and_hconcat() {
        let a = F2Matrix::from_rows(3, vec![0b001, 0b011]).unwrap();
        let t = a.transpose();
        assert_eq!(t.rows(), 3);
        assert!(t.get(0, 1) && t.get(1, 1) && !t.get(1, 0));
        let h = a.hconcat(&a).unwrap();
        assert_eq!(h.cols(), 6);
        assert_eq!(h.rank(), 2);
    }
}
