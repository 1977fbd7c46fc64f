//! The congruence action `X ↦ A X Aᵗ` on `Λ_m` and on its subspaces.

use super::group::GroupElement;
use crate::error::{Error, Result};
use crate::f2core::{packed, skew_dim};
use crate::spaces::{pack_key, rref_in_place, unpack_key, SkewSpace};

/// `X ↦ A X Aᵗ` as a linear map on flattened coordinates, tabulated per byte.
#[derive(Clone)]
pub struct CongruenceMap {
    m: usize,
    chunks: usize,
    tables: Vec<[u32; 256]>,
}

impl CongruenceMap {
    pub fn new(a: &GroupElement) -> Self {
        let m = a.m();
        let w = skew_dim(m);
        let images: Vec<u32> = (0..w).map(|c| packed::congruence_flat(a.packed(), 1 << c, m)).collect();
        let chunks = w.div_ceil(8);
        let tables = (0..chunks)
            .map(|ch| {
                let mut t = [0u32; 256];
                for byte in 1usize..256 {
                    let low = byte.trailing_zeros() as usize;
                    let c = ch * 8 + low;
                    let img = if c < w { images[c] } else { 0 };
                    t[byte] = t[byte & (byte - 1)] ^ img;
                }
                t
            })
            .collect();
        CongruenceMap { m, chunks, tables }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    #[inline]
    pub fn apply(&self, flat: u32) -> u32 {
        let mut out = 0;
        for (ch, t) in self.tables.iter().enumerate().take(self.chunks) {
            out ^= t[(flat >> (8 * ch) & 0xff) as usize];
        }
        out
    }
}

/// Congruence maps for a generator list, applied to packed subspace keys.
pub(crate) struct KeyAction {
    pub k: usize,
    pub width: usize,
    pub maps: Vec<CongruenceMap>,
}

impl KeyAction {
    pub fn new(m: usize, k: usize, gens: &[GroupElement]) -> Result<Self> {
        let width = skew_dim(m);
        if k * width > 64 {
            return Err(Error::Infeasible(format!(
                "orbit search over {k}-dim subspaces of Λ_{m} needs {}-bit keys (max 64)",
                k * width
            )));
        }
        Ok(KeyAction { k, width, maps: gens.iter().map(CongruenceMap::new).collect() })
    }

    #[inline]
    pub fn apply(&self, gen: usize, key: u64) -> u64 {
        let mut buf = [0u32; 8];
        let v = &mut buf[..self.k];
        unpack_key(key, self.k, self.width, v);
        let map = &self.maps[gen];
        for x in v.iter_mut() {
            *x = map.apply(*x);
        }
        let r = rref_in_place(v);
        debug_assert_eq!(r, self.k);
        pack_key(v, self.width)
    }
}

/// `A · S · Aᵗ`, re-canonicalized.
pub fn act(a: &GroupElement, s: &SkewSpace) -> Result<SkewSpace> {
    if a.m() != s.m() {
        return Err(Error::DimensionMismatch { expected: s.m(), got: a.m() });
    }
    let m = s.m();
    SkewSpace::from_flat_words(m, s.basis().iter().map(|&b| packed::congruence_flat(a.packed(), b, m)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::f2core::SkewMatrix;
    use crate::orbits::group::gl_generators;

    #[test]
    fn tabulated_map_matches_direct_congruence() {
        for m in 2..=6 {
            for g in gl_generators(m).unwrap() {
                let map = CongruenceMap::new(&g);
                for flat in (0u32..1 << skew_dim(m)).step_by(7) {
                    assert_eq!(map.apply(flat), packed::congruence_flat(g.packed(), flat, m));
                }
            }
        }
    }

    #[test]
    fn key_action_matches_act() {
        let m = 4;
        let gens = gl_generators(m).unwrap();
        let ka = KeyAction::new(m, 2, &gens).unwrap();
        let e = |i, j| SkewMatrix::unit(m, i, j).unwrap();
        let s = SkewSpace::span(m, &[e(1, 4), e(2, 3) + e(1, 2)]).unwrap();
        for (gi, g) in gens.iter().enumerate() {
            let via_key = ka.apply(gi, s.key().unwrap());
            assert_eq!(Some(via_key), act(g, &s).unwrap().key());
        }
    }

    #[test]
    fn identity_acts_trivially() {
        let s = SkewSpace::full(4).unwrap();
        let id = GroupElement::identity(4).unwrap();
        assert_eq!(act(&id, &s).unwrap(), s);
        assert!(act(&GroupElement::identity(3).unwrap(), &s).is_err());
    }
}
