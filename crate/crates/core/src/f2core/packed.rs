//! Whole-matrix packing for `m ≤ 8`: byte `i` of a `u64` is row `i`.

use super::{coord, skew_dim};

#[inline]
pub fn row(a: u64, i: usize) -> u64 {
    a >> (8 * i) & 0xff
}

pub fn identity(m: usize) -> u64 {
    (0..m).fold(0, |acc, i| acc | 1u64 << (9 * i))
}

pub fn from_rows(rows: &[u64]) -> u64 {
    rows.iter().enumerate().fold(0, |acc, (i, &r)| acc | (r & 0xff) << (8 * i))
}

pub fn rows(a: u64, m: usize) -> impl Iterator<Item = u64> {
    (0..m).map(move |i| row(a, i))
}

/// `x · a` for a row vector `x`.
#[inline]
pub fn left_mul(x: u64, a: u64) -> u64 {
    let mut acc = 0;
    let mut bits = x;
    while bits != 0 {
        acc ^= row(a, bits.trailing_zeros() as usize);
        bits &= bits - 1;
    }
    acc
}

pub fn mul(a: u64, b: u64, m: usize) -> u64 {
    (0..m).fold(0, |acc, i| acc | left_mul(row(a, i), b) << (8 * i))
}

pub fn rank(a: u64, m: usize) -> usize {
    super::row_rank(rows(a, m))
}

pub fn inverse(a: u64, m: usize) -> Option<u64> {
    let mut r: Vec<u64> = rows(a, m).collect();
    let mut inv: Vec<u64> = (0..m).map(|i| 1 << i).collect();
    for col in 0..m {
        let p = (col..m).find(|&k| r[k] >> col & 1 == 1)?;
        r.swap(col, p);
        inv.swap(col, p);
        for k in 0..m {
            if k != col && r[k] >> col & 1 == 1 {
                r[k] ^= r[col];
                inv[k] ^= inv[col];
            }
        }
    }
    Some(from_rows(&inv))
}

/// Packed rows of the skew matrix with flattened bits `flat`.
pub fn skew_rows(flat: u32, m: usize) -> u64 {
    let mut out = 0u64;
    let mut bits = flat;
    while bits != 0 {
        let c = bits.trailing_zeros() as usize;
        let (i, j) = super::coord_pair(m, c);
        out |= 1 << (8 * i + j) | 1 << (8 * j + i);
        bits &= bits - 1;
    }
    out
}

/// Flattened bits of the strictly upper triangle of packed `a`.
pub fn upper_flat(a: u64, m: usize) -> u32 {
    let mut f = 0u32;
    for i in 0..m {
        for j in i + 1..m {
            if a >> (8 * i + j) & 1 == 1 {
                f |= 1 << coord(m, i, j);
            }
        }
    }
    f
}

/// `A · B · Aᵗ` on a flattened skew matrix.
pub fn congruence_flat(a: u64, flat: u32, m: usize) -> u32 {
    let b = skew_rows(flat, m);
    let c = mul(a, b, m);
    let mut out = 0u32;
    let mut k = 0;
    for i in 0..m {
        let ci = row(c, i);
        for j in i + 1..m {
            if (ci & row(a, j)).count_ones() & 1 == 1 {
                out |= 1 << k;
            }
            k += 1;
        }
    }
    debug_assert_eq!(k, skew_dim(m));
    out
}
