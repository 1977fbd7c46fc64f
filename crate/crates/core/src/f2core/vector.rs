use std::fmt;
use std::ops::{Add, AddAssign};

use crate::error::{Error, Result};

/// A vector of `F2^len`, bit `i` of the packed words is coordinate `i`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct F2Vector {
    len: usize,
    words: Vec<u64>,
}

impl F2Vector {
    pub fn zero(len: usize) -> Self {
        F2Vector { len, words: vec![0; len.div_ceil(64)] }
    }

    /// Builds a vector of length `len ≤ 64` from the low bits of `bits`.
    pub fn from_u64(len: usize, bits: u64) -> Result<Self> {
        if len > 64 {
            return Err(Error::DimensionMismatch { expected: 64, got: len });
        }
        if len < 64 && bits >> len != 0 {
            return Err(Error::DimensionMismatch { expected: len, got: 64 - bits.leading_zeros() as usize });
        }
        let mut v = Self::zero(len);
        if len > 0 {
            v.words[0] = bits;
        }
        Ok(v)
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        let mut v = Self::zero(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            v.set(i, b);
        }
        v
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "index {i} out of range for length {}", self.len);
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "index {i} out of range for length {}", self.len);
        let mask = 1u64 << (i % 64);
        if value {
            self.words[i / 64] |= mask;
        } else {
            self.words[i / 64] &= !mask;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    /// The single packed word of a vector with `len ≤ 64`.
    pub fn as_u64(&self) -> u64 {
        debug_assert!(self.len <= 64);
        self.words.first().copied().unwrap_or(0)
    }

    pub fn dot(&self, other: &Self) -> bool {
        assert_eq!(self.len, other.len);
        self.words
            .iter()
            .zip(&other.words)
            .fold(0u32, |acc, (a, b)| acc ^ (a & b).count_ones())
            & 1
            == 1
    }
}

impl AddAssign<&F2Vector> for F2Vector {
    fn add_assign(&mut self, rhs: &F2Vector) {
        assert_eq!(self.len, rhs.len, "length mismatch");
        for (a, b) in self.words.iter_mut().zip(&rhs.words) {
            *a ^= b;
        }
    }
}

impl Add for &F2Vector {
    type Output = F2Vector;

    fn add(self, rhs: &F2Vector) -> F2Vector {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl fmt::Debug for F2Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for i in 0..self.len {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", self.get(i) as u8)?;
        }
        write!(f, ")")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn addition_is_xor() {
        let a = F2Vector::from_bits(&[true, false, true]);
        let b = F2Vector::from_bits(&[true, true, false]);
        assert_eq!(&a + &b, F2Vector::from_bits(&[false, true, true]));
        assert!((&a + &a).is_zero());
    }

    #[test]
    fn bits_beyond_len_rejected() {
        assert!(F2Vector::from_u64(3, 0b1000).is_err());
        assert_eq!(F2Vector::from_u64(3, 0b101).unwrap().weight(), 2);
    }

    #[test]
    fn wide_vectors_span_words() {
        let mut v = F2Vector::zero(130);
        v.set(129, true);
        v.set(3, true);
        assert_eq!(v.weight(), 2);
        assert!(v.get(129));
        assert_eq!(format!("{:?}", F2Vector::from_bits(&[true, false])), "(1,0)");
    }
}
