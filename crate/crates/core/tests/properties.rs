//! Randomized invariants: round trips, action axioms and congruence
//! invariance of ranks and rank sequences.

use bibrace::f2core::{skew_dim, F2Vector, SkewMatrix};
use bibrace::orbits::{act, GroupElement};
use bibrace::spaces::SkewSpace;
use proptest::prelude::*;

fn skew(m: usize) -> impl Strategy<Value = SkewMatrix> {
    (0..1u32 << skew_dim(m)).prop_map(move |f| SkewMatrix::from_flat(m, f).unwrap())
}

/// Invertible matrices as products of transvections and a row permutation.
fn group_element(m: usize) -> impl Strategy<Value = GroupElement> {
    let transvections = prop::collection::vec((0..m, 1..m), 0..3 * m);
    (transvections, Just((0..m).collect::<Vec<_>>()).prop_shuffle()).prop_map(move |(ts, perm)| {
        ts.iter().fold(GroupElement::permutation(&perm).unwrap(), |acc, &(i, shift)| {
            GroupElement::transvection(m, i, (i + shift) % m).unwrap().mul(&acc)
        })
    })
}

fn space(m: usize, max_dim: usize) -> impl Strategy<Value = SkewSpace> {
    prop::collection::vec(skew(m), 1..=max_dim).prop_map(move |gens| SkewSpace::span(m, &gens).unwrap())
}

fn m_and<T: std::fmt::Debug + Clone>(f: impl Fn(usize) -> BoxedStrategy<T> + 'static) -> impl Strategy<Value = (usize, T)> {
    (2usize..=8).prop_flat_map(move |m| (Just(m), f(m)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn flatten_round_trip((m, b) in m_and(|m| skew(m).boxed())) {
        let v = b.flatten();
        prop_assert_eq!(v.len(), skew_dim(m));
        prop_assert_eq!(SkewMatrix::unflatten(&v, m).unwrap(), b);
        prop_assert_eq!(SkewMatrix::from_matrix(&b.to_matrix()).unwrap(), b);
        prop_assert_eq!(SkewMatrix::parse_hex(m, &b.to_hex()).unwrap(), b);
    }

    #[test]
    fn flatten_inverse_on_vectors((m, bits) in (2usize..=8).prop_flat_map(|m| (Just(m), 0..1u64 << skew_dim(m)))) {
        let v = F2Vector::from_u64(skew_dim(m), bits).unwrap();
        prop_assert_eq!(SkewMatrix::unflatten(&v, m).unwrap().flatten(), v);
    }

    #[test]
    fn skew_matrices_have_even_rank((_m, b) in m_and(|m| skew(m).boxed())) {
        prop_assert_eq!(b.rank() % 2, 0);
        let t = b.to_matrix();
        prop_assert_eq!(t.transpose(), t.clone());
        prop_assert!((0..t.rows()).all(|i| !t.get(i, i)));
    }

    #[test]
    fn congruence_preserves_rank((_m, (a, b)) in m_and(|m| (group_element(m), skew(m)).boxed())) {
        prop_assert_eq!(a.congruence(&b).rank(), b.rank());
        prop_assert_eq!(a.inverse().congruence(&a.congruence(&b)), b);
    }

    #[test]
    fn action_axioms((m, (a, b, s)) in (2usize..=6).prop_flat_map(|m| (Just(m), (group_element(m), group_element(m), space(m, 3))))) {
        let id = GroupElement::identity(m).unwrap();
        prop_assert_eq!(act(&id, &s).unwrap(), s.clone());
        prop_assert_eq!(act(&a.mul(&b), &s).unwrap(), act(&a, &act(&b, &s).unwrap()).unwrap());
        prop_assert_eq!(act(&a.inverse(), &act(&a, &s).unwrap()).unwrap(), s.clone());
        prop_assert_eq!(act(&a, &s).unwrap().dim(), s.dim());
    }

    #[test]
    fn span_is_independent_of_generator_order((m, gens) in m_and(|m| prop::collection::vec(skew(m), 1..=4).boxed())) {
        let forward = SkewSpace::span(m, &gens).unwrap();
        let mut rev = gens.clone();
        rev.reverse();
        prop_assert_eq!(SkewSpace::span(m, &rev).unwrap(), forward.clone());
        prop_assert!(gens.iter().all(|g| forward.contains(g)));
        prop_assert_eq!(SkewSpace::parse(&forward.to_text()).unwrap(), forward);
    }
}

// 1000 trials for each m
proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn rank_sequence_invariance_m3((a, s) in (group_element(3), space(3, 3))) {
        prop_assert_eq!(act(&a, &s).unwrap().rank_sequence(), s.rank_sequence());
    }

    #[test]
    fn rank_sequence_invariance_m4((a, s) in (group_element(4), space(4, 4))) {
        prop_assert_eq!(act(&a, &s).unwrap().rank_sequence(), s.rank_sequence());
    }

    #[test]
    fn rank_sequence_invariance_m5((a, s) in (group_element(5), space(5, 4))) {
        let t = act(&a, &s).unwrap();
        prop_assert_eq!(t.rank_sequence(), s.rank_sequence());
        prop_assert_eq!(t.is_nondegenerate(), s.is_nondegenerate());
    }

    #[test]
    fn rank_sequence_invariance_m6((a, s) in (group_element(6), space(6, 4))) {
        let t = act(&a, &s).unwrap();
        prop_assert_eq!(t.rank_sequence(), s.rank_sequence());
        prop_assert_eq!(t.fingerprint(), s.fingerprint());
    }

    #[test]
    fn rank_sequence_invariance_m7((a, s) in (group_element(7), space(7, 3))) {
        prop_assert_eq!(act(&a, &s).unwrap().rank_sequence(), s.rank_sequence());
    }

    #[test]
    fn rank_sequence_invariance_m8((a, s) in (group_element(8), space(8, 3))) {
        prop_assert_eq!(act(&a, &s).unwrap().rank_sequence(), s.rank_sequence());
    }
}
