//! Exact linear algebra over F2 with bit-packed rows.
//!
//! Skew-symmetric matrices of size `m` are kept in flattened form: one bit per
//! strictly-upper-triangular position, ordered `(1,2), (1,3), …, (1,m),
//! (2,3), …, (m-1,m)`. Bit `c` of the flattened word is the coefficient of
//! the `c`-th standard basis matrix `E_ij = e_ij + e_ji`. That single encoding
//! is shared by the text format, the canonical subspace keys and the tests.

mod matrix;
pub(crate) mod packed;
mod skew;
mod subspace;
mod vector;

pub use matrix::{row_rank, F2Matrix};
pub use skew::{
    common_kernel, hconcat_rank, rank_table, skew_count_by_rank, standard_basis, SkewMatrix,
};
pub use subspace::F2Subspace;
pub use vector::F2Vector;

use crate::error::{Error, Result};

/// Largest supported matrix size for skew-symmetric matrices and group
/// elements (a flattened skew matrix must fit a `u32`, a whole matrix a `u64`).
pub const MAX_M: usize = 8;

/// `dim Λ_m = m(m-1)/2`.
pub const fn skew_dim(m: usize) -> usize {
    m * (m.saturating_sub(1)) / 2
}

/// Flattened coordinate of `E_ij` for `0 ≤ i < j < m` (zero-based).
pub const fn coord(m: usize, i: usize, j: usize) -> usize {
    i * m - i * (i + 1) / 2 + (j - i - 1)
}

/// Inverse of [`coord`].
pub fn coord_pair(m: usize, c: usize) -> (usize, usize) {
    let mut base = 0;
    for i in 0..m {
        let row_len = m - i - 1;
        if c < base + row_len {
            return (i, i + 1 + (c - base));
        }
        base += row_len;
    }
    panic!("coordinate {c} out of range for m = {m}");
}

pub(crate) fn check_m(m: usize) -> Result<()> {
    if (2..=MAX_M).contains(&m) {
        Ok(())
    } else {
        Err(Error::BadSize(m))
    }
}

/// Lowercase hex of a flattened word; zero encodes as `"0"`.
pub fn encode_hex(bits: u64) -> String {
    format!("{bits:x}")
}

/// Parses the hex text form of a flattened word of at most `width` bits.
pub fn decode_hex(token: &str, width: usize) -> Result<u64> {
    let t = token.trim();
    if t.is_empty() || t.len() > 16 || !t.chars().all(|c| c.is_ascii_hexdigit()) {
        return Err(Error::Parse(format!("malformed hex token {token:?}")));
    }
    let v = u64::from_str_radix(t, 16).map_err(|_| Error::Parse(format!("malformed hex token {token:?}")))?;
    if width < 64 && v >> width != 0 {
        return Err(Error::Parse(format!(
            "hex token {token:?} has bits beyond the {width} coordinates"
        )));
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coordinates_follow_row_major_upper_triangle() {
        let m = 4;
        let order: Vec<_> = (0..skew_dim(m)).map(|c| coord_pair(m, c)).collect();
        assert_eq!(order, vec![(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]);
        for (c, &(i, j)) in order.iter().enumerate() {
            assert_eq!(coord(m, i, j), c);
        }
    }

    #[test]
    fn hex_round_trip_and_errors() {
        assert_eq!(encode_hex(0), "0");
        assert_eq!(encode_hex(5), "5");
        assert_eq!(decode_hex("1f", 6).unwrap(), 31);
        assert!(matches!(decode_hex("zz", 6), Err(Error::Parse(_))));
        assert!(matches!(decode_hex("40", 6), Err(Error::Parse(_))));
        assert!(decode_hex("", 6).is_err());
    }
}
