use super::vector::F2Vector;
use crate::error::{Error, Result};

/// Reduces `vs` in place to reduced row-echelon form keyed by the highest set
/// bit: pivots strictly decreasing, every pivot bit cleared in all other
/// rows, zero rows dropped. Returns the rank.
pub(crate) fn rref_words(vs: &mut Vec<u64>) -> usize {
    let mut out: Vec<u64> = Vec::with_capacity(vs.len());
    for &v0 in vs.iter() {
        let mut v = v0;
        for &b in &out {
            let p = 63 - b.leading_zeros();
            if v >> p & 1 == 1 {
                v ^= b;
            }
        }
        if v != 0 {
            let p = 63 - v.leading_zeros();
            for b in out.iter_mut() {
                if *b >> p & 1 == 1 {
                    *b ^= v;
                }
            }
            out.push(v);
        }
    }
    out.sort_unstable_by_key(|b| b.leading_zeros());
    *vs = out;
    vs.len()
}

/// A subspace of `F2^n` (`n ≤ 64`) held as a canonical reduced echelon basis.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct F2Subspace {
    n: usize,
    basis: Vec<u64>,
}

impl F2Subspace {
    pub fn zero(n: usize) -> Self {
        assert!(n <= 64);
        F2Subspace { n, basis: Vec::new() }
    }

    pub fn full(n: usize) -> Self {
        Self::span_words(n, (0..n).map(|i| 1u64 << i)).expect("unit vectors fit")
    }

    pub fn span_words<I: IntoIterator<Item = u64>>(n: usize, gens: I) -> Result<Self> {
        if n > 64 {
            return Err(Error::DimensionMismatch { expected: 64, got: n });
        }
        let mask = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        let mut basis: Vec<u64> = gens.into_iter().collect();
        if basis.iter().any(|v| v & !mask != 0) {
            return Err(Error::DimensionMismatch { expected: n, got: 64 });
        }
        rref_words(&mut basis);
        Ok(F2Subspace { n, basis })
    }

    pub fn span(n: usize, gens: &[F2Vector]) -> Result<Self> {
        if let Some(bad) = gens.iter().find(|g| g.len() != n) {
            return Err(Error::DimensionMismatch { expected: n, got: bad.len() });
        }
        Self::span_words(n, gens.iter().map(F2Vector::as_u64))
    }

    pub fn ambient_dim(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis_words(&self) -> &[u64] {
        &self.basis
    }

    pub fn reduce(&self, mut v: u64) -> u64 {
        for &b in &self.basis {
            let p = 63 - b.leading_zeros();
            if v >> p & 1 == 1 {
                v ^= b;
            }
        }
        v
    }

    pub fn contains_word(&self, v: u64) -> bool {
        self.reduce(v) == 0
    }

    pub fn contains(&self, v: &F2Vector) -> bool {
        v.len() == self.n && self.contains_word(v.as_u64())
    }

    pub fn is_subspace_of(&self, other: &F2Subspace) -> bool {
        self.n == other.n && self.basis.iter().all(|&b| other.contains_word(b))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn span_is_canonical() {
        let a = F2Subspace::span_words(4, [0b0011, 0b0110]).unwrap();
        let b = F2Subspace::span_words(4, [0b0101, 0b0011, 0b0110]).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.dim(), 2);
        assert!(a.contains_word(0b0101));
        assert!(!a.contains_word(0b1000));
        assert!(a.is_subspace_of(&F2Subspace::full(4)));
        assert!(F2Subspace::zero(4).is_subspace_of(&a));
    }

    #[test]
    fn rref_pivots_are_unique_in_their_column() {
        let mut v = vec![0b1110, 0b0111, 0b1000, 0b1110];
        let r = rref_words(&mut v);
        assert_eq!(r, 3);
        for (i, &b) in v.iter().enumerate() {
            let p = 63 - b.leading_zeros();
            for (j, &c) in v.iter().enumerate() {
                if i != j {
                    assert_eq!(c >> p & 1, 0);
                }
            }
            if i > 0 {
                assert!(v[i - 1].leading_zeros() < b.leading_zeros());
            }
        }
    }
}
