//! Stabilizers under congruence: `Syp(B)` for one matrix, `Syc(S)` for a
//! space, and the route to `Syc(S)` through the normalizer of the pointwise
//! stabilizer `G = ∩ Syp(B_i)`.
//!
//! Up to `m = 5` groups are materialized by filtering all of `GL(m, 2)`. For
//! `m = 6` only orders are available, obtained from orbit sizes.

use super::action::act;
use super::bfs::{orbit_of, OrbitOptions};
use super::group::{filter_gl, gl_order, GroupElement, MatrixGroup, MAX_ENUMERATED_M};
use crate::error::{Error, Result};
use crate::exec::ExecPolicy;
use crate::f2core::{packed, SkewMatrix};
use crate::spaces::SkewSpace;

/// Largest `m` for which normalizers are materialized.
pub const MAX_NORMALIZER_M: usize = 4;

/// `Syp(B) = {A : A·B·Aᵗ = B}`. Materialized for `m ≤ 5`; for larger `m`
/// the order is `|GL(m,2)| / |orbit of B|`, the orbit being found by search.
pub fn symplectic_stabilizer(b: &SkewMatrix, opts: &OrbitOptions) -> Result<MatrixGroup> {
    let m = b.m();
    if m <= MAX_ENUMERATED_M {
        let flat = b.flat();
        return Ok(MatrixGroup::from_elements(
            m,
            filter_gl(m, opts.policy, |g| packed::congruence_flat(g.packed(), flat, m) == flat)?,
        ));
    }
    if b.is_zero() {
        return Ok(MatrixGroup::order_only(m, gl_order(m)));
    }
    // over F2 a line ⟨B⟩ has the single nonzero element B
    let orbit = orbit_of(&SkewSpace::span(m, std::slice::from_ref(b))?, opts)?;
    Ok(MatrixGroup::order_only(m, gl_order(m) / orbit.cardinality as u128))
}

/// `Syc(S) = {A : A·S·Aᵗ = S}`, materialized for `m ≤ 5`, order-only beyond.
pub fn self_congruence_group(s: &SkewSpace, opts: &OrbitOptions) -> Result<MatrixGroup> {
    let m = s.m();
    if m <= MAX_ENUMERATED_M {
        let basis = s.basis();
        return Ok(MatrixGroup::from_elements(
            m,
            filter_gl(m, opts.policy, |g| basis.iter().all(|&b| s.contains_flat(packed::congruence_flat(g.packed(), b, m))))?,
        ));
    }
    if s.dim() == 0 {
        return Ok(MatrixGroup::order_only(m, gl_order(m)));
    }
    let orbit = orbit_of(s, opts)?;
    Ok(MatrixGroup::order_only(m, gl_order(m) / orbit.cardinality as u128))
}

/// `Syp(B_1) ∩ … ∩ Syp(B_k)`, the elements fixing every `B_i` (`m ≤ 5`).
pub fn syp_intersection(mats: &[SkewMatrix], policy: ExecPolicy) -> Result<MatrixGroup> {
    let m = mats.first().ok_or_else(|| Error::Precondition("no matrices given".into()))?.m();
    if let Some(b) = mats.iter().find(|b| b.m() != m) {
        return Err(Error::DimensionMismatch { expected: m, got: b.m() });
    }
    let flats: Vec<u32> = mats.iter().map(SkewMatrix::flat).collect();
    Ok(MatrixGroup::from_elements(
        m,
        filter_gl(m, policy, |g| flats.iter().all(|&f| packed::congruence_flat(g.packed(), f, m) == f))?,
    ))
}

/// Normalizer of `g` in `GL(m, 2)`, `m ≤ 4`. Conjugating the generators is
/// enough: `x⁻¹Gx` has the order of `G`, so containment means equality.
pub fn normalizer(g: &MatrixGroup, policy: ExecPolicy) -> Result<MatrixGroup> {
    let m = g.m();
    if m > MAX_NORMALIZER_M {
        return Err(Error::Infeasible(format!("normalizers are only materialized for m ≤ {MAX_NORMALIZER_M}")));
    }
    let elements = g.elements().ok_or_else(|| Error::Precondition("group elements are not materialized".into()))?;
    let gens = g.generators();
    Ok(MatrixGroup::from_elements(
        m,
        filter_gl(m, policy, |x| {
            let xi = x.inverse();
            gens.iter().all(|h| elements.binary_search(&xi.mul(h).mul(x)).is_ok())
        })?,
    ))
}

/// One representative of each right coset `G·x` of `G` in `n`, least first.
pub fn right_transversal(g: &MatrixGroup, n: &MatrixGroup) -> Result<Vec<GroupElement>> {
    let sub = g.elements().ok_or_else(|| Error::Precondition("subgroup is not materialized".into()))?;
    let all = n.elements().ok_or_else(|| Error::Precondition("group is not materialized".into()))?;
    if !g.is_subgroup_of(n)? {
        return Err(Error::Precondition("first group is not contained in the second".into()));
    }
    let mut covered = std::collections::HashSet::with_capacity(all.len());
    let mut reps = Vec::new();
    for x in all {
        if covered.contains(x) {
            continue;
        }
        reps.push(*x);
        covered.extend(sub.iter().map(|h| h.mul(x)));
    }
    Ok(reps)
}

/// The pieces of the normalizer route to `Syc(S)`.
#[derive(Clone, Debug)]
pub struct SycDerivation {
    /// `G = ∩ Syp(B_i)` over the basis of `S`.
    pub pointwise: MatrixGroup,
    /// `N`, the normalizer of `G` in `GL(m, 2)`.
    pub normalizer: MatrixGroup,
    /// Transversal elements of `G` in `N` that map `S` onto itself.
    pub selected: Vec<GroupElement>,
    /// `⟨G ∪ selected⟩`.
    pub syc: MatrixGroup,
}

/// `Syc(S)` as `⟨G ∪ T_S⟩` where `T_S` are the members of a right transversal
/// of `G` in `N_{GL}(G)` that fix `S`. Only for `m ≤ 4`.
pub fn syc_via_normalizer(s: &SkewSpace, policy: ExecPolicy) -> Result<SycDerivation> {
    let m = s.m();
    if m > MAX_NORMALIZER_M {
        return Err(Error::Infeasible(format!("the normalizer route is only available for m ≤ {MAX_NORMALIZER_M}")));
    }
    if s.dim() == 0 {
        return Err(Error::Precondition("the zero space has no basis".into()));
    }
    let pointwise = syp_intersection(&s.basis_matrices(), policy)?;
    let normalizer = normalizer(&pointwise, policy)?;
    let mut selected = Vec::new();
    for t in right_transversal(&pointwise, &normalizer)? {
        if act(&t, s)? == *s {
            selected.push(t);
        }
    }
    let gens: Vec<GroupElement> = pointwise.generators().iter().chain(&selected).copied().collect();
    let syc = if gens.is_empty() {
        MatrixGroup::from_elements(m, vec![GroupElement::identity(m)?])
    } else {
        MatrixGroup::generated_by(m, &gens)?
    };
    Ok(SycDerivation { pointwise, normalizer, selected, syc })
}

/// For `Z` with `Z·S2·Zᵗ = S1`, checks element by element that
/// `Z⁻¹·G_1·Z = G_2` where `G_i` fixes each basis matrix of `S_i` (`m ≤ 4`).
pub fn verify_prop_conjugacy(s1: &SkewSpace, s2: &SkewSpace, z: &GroupElement, policy: ExecPolicy) -> Result<bool> {
    let m = s1.m();
    if s2.m() != m || z.m() != m {
        return Err(Error::DimensionMismatch { expected: m, got: if s2.m() != m { s2.m() } else { z.m() } });
    }
    if m > MAX_NORMALIZER_M {
        return Err(Error::Infeasible(format!("conjugacy check materializes groups only for m ≤ {MAX_NORMALIZER_M}")));
    }
    if act(z, s2)? != *s1 {
        return Err(Error::Precondition("Z does not map the second space onto the first".into()));
    }
    if s1.dim() == 0 {
        return Ok(true);
    }
    let g1 = syp_intersection(&s1.basis_matrices(), policy)?;
    let g2 = syp_intersection(&s2.basis_matrices(), policy)?;
    g1.conjugate_by(z)?.same_elements(&g2)
}
