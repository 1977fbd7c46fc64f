//! Breadth-first orbit enumeration over canonical subspace keys.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::action::KeyAction;
use super::group::{generators, gl_order, GeneratorSet, GroupElement};
use super::keyset::KeySet;
use crate::counting::gaussian_binomial;
use crate::error::{Error, Result};
use crate::exec::{self, ExecPolicy};
use crate::f2core::skew_dim;
use crate::spaces::{key_bits, RankSequence, SkewSpace};

/// Default memory budget for visited sets: 2 GiB.
pub const DEFAULT_MEMORY_BUDGET: u64 = 2 << 30;

#[derive(Debug, Clone, Copy)]
pub struct OrbitOptions {
    pub policy: ExecPolicy,
    pub generators: GeneratorSet,
    pub memory_budget: u64,
}

impl Default for OrbitOptions {
    fn default() -> Self {
        OrbitOptions {
            policy: ExecPolicy::Parallel,
            generators: GeneratorSet::Transvections,
            memory_budget: DEFAULT_MEMORY_BUDGET,
        }
    }
}

impl OrbitOptions {
    pub fn sequential() -> Self {
        OrbitOptions { policy: ExecPolicy::Sequential, ..Self::default() }
    }
}

/// A congruence class of subspaces of `Λ_m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitClass {
    /// Member with the least canonical key.
    pub representative: SkewSpace,
    pub rank_seq: RankSequence,
    pub cardinality: u64,
    pub nondegenerate: bool,
    /// `Some(k)` when the members span primitive algebras with `d = k`.
    pub primitive_for_d: Option<usize>,
}

impl OrbitClass {
    pub(crate) fn new(representative: SkewSpace, cardinality: u64) -> Self {
        let nondegenerate = representative.is_nondegenerate();
        let primitive_for_d = nondegenerate.then_some(representative.dim());
        OrbitClass { rank_seq: representative.rank_sequence(), representative, cardinality, nondegenerate, primitive_for_d }
    }

    pub fn m(&self) -> usize {
        self.representative.m()
    }

    pub fn dim(&self) -> usize {
        self.representative.dim()
    }

    /// `|GL(m,2)| / cardinality`, the order of the self-congruence group.
    pub fn stabilizer_order(&self) -> u128 {
        gl_order(self.m()) / self.cardinality as u128
    }

    pub fn divides_group_order(&self) -> bool {
        gl_order(self.m()).is_multiple_of(self.cardinality as u128)
    }
}

/// Upper bound on the size of one orbit of `k`-dim subspaces of `Λ_m`.
pub(crate) fn orbit_bound(m: usize, k: usize) -> u64 {
    let spaces = gaussian_binomial(skew_dim(m), k).unwrap_or(u128::MAX);
    spaces.min(gl_order(m)).min(u64::MAX as u128) as u64
}

/// Level-synchronous BFS state for one orbit; resumable between levels.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub(crate) struct BfsState {
    pub seed: u64,
    pub frontier: Vec<u64>,
    pub count: u64,
    pub min_key: u64,
    pub expansions: u64,
}

impl BfsState {
    pub fn start(seed: u64, visited: &KeySet) -> Self {
        let fresh = visited.insert(seed);
        debug_assert!(fresh, "seed already visited");
        BfsState { seed, frontier: vec![seed], count: 1, min_key: seed, expansions: 0 }
    }

    pub fn is_done(&self) -> bool {
        self.frontier.is_empty()
    }

    /// Expands one BFS level.
    pub fn step(&mut self, action: &KeyAction, visited: &KeySet, policy: ExecPolicy) {
        let gens = action.maps.len();
        let next = exec::flat_map_chunks(policy, &self.frontier, 2048, |chunk, out| {
            for &key in chunk {
                for g in 0..gens {
                    let nk = action.apply(g, key);
                    if visited.insert(nk) {
                        out.push(nk);
                    }
                }
            }
        });
        self.expansions += self.frontier.len() as u64;
        self.count += next.len() as u64;
        if let Some(mn) = exec::min_by_key_slice(policy, &next, |&k| k) {
            self.min_key = self.min_key.min(mn);
        }
        self.frontier = next;
    }

    pub fn run(&mut self, action: &KeyAction, visited: &KeySet, policy: ExecPolicy) {
        while !self.is_done() {
            self.step(action, visited, policy);
        }
    }
}

fn check_orbit_input(s: &SkewSpace) -> Result<u64> {
    if s.dim() == 0 {
        return Err(Error::Precondition("orbit of the zero space requested".into()));
    }
    s.key().ok_or_else(|| {
        Error::Infeasible(format!(
            "orbit search over {}-dim subspaces of Λ_{} needs {}-bit keys (max 64)",
            s.dim(),
            s.m(),
            key_bits(s.m(), s.dim())
        ))
    })
}

/// The congruence class of `s`: breadth-first closure under the generators.
/// Cardinality and representative do not depend on the worker schedule.
pub fn orbit_of(s: &SkewSpace, opts: &OrbitOptions) -> Result<OrbitClass> {
    let seed = check_orbit_input(s)?;
    let (m, k) = (s.m(), s.dim());
    let action = KeyAction::new(m, k, &generators(m, opts.generators)?)?;
    let visited = KeySet::new(key_bits(m, k), orbit_bound(m, k), opts.memory_budget)?;
    let mut state = BfsState::start(seed, &visited);
    state.run(&action, &visited, opts.policy);
    let rep = SkewSpace::from_key(m, k, state.min_key)?;
    Ok(OrbitClass::new(rep, state.count))
}

/// A group element mapping one space onto another, as a generator word.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub generators: Vec<GroupElement>,
    /// Indices into `generators`, applied first to last.
    pub word: Vec<usize>,
}

impl Witness {
    /// `g_t · … · g_1` for the word `(g_1, …, g_t)`.
    pub fn matrix(&self, m: usize) -> Result<GroupElement> {
        let mut acc = GroupElement::identity(m)?;
        for &i in &self.word {
            acc = self.generators[i].mul(&acc);
        }
        Ok(acc)
    }
}

/// Searches for `A` with `A · from · Aᵗ = to`. Returns `None` when the
/// spaces are not congruent. Sequential BFS recording back-pointers.
pub fn find_congruence(from: &SkewSpace, to: &SkewSpace, set: GeneratorSet) -> Result<Option<Witness>> {
    if from.m() != to.m() {
        return Err(Error::DimensionMismatch { expected: from.m(), got: to.m() });
    }
    if from.dim() != to.dim() || from.rank_sequence() != to.rank_sequence() {
        return Ok(None);
    }
    let m = from.m();
    let gens = generators(m, set)?;
    if from == to {
        return Ok(Some(Witness { generators: gens, word: Vec::new() }));
    }
    let start = check_orbit_input(from)?;
    let target = to.key().expect("same width as `from`");
    let action = KeyAction::new(m, from.dim(), &gens)?;
    let mut parent: HashMap<u64, (u64, u32)> = HashMap::from([(start, (start, u32::MAX))]);
    let mut frontier = vec![start];
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for &key in &frontier {
            for g in 0..gens.len() {
                let nk = action.apply(g, key);
                if parent.contains_key(&nk) {
                    continue;
                }
                parent.insert(nk, (key, g as u32));
                if nk == target {
                    let mut word = Vec::new();
                    let mut cur = nk;
                    while cur != start {
                        let (p, gi) = parent[&cur];
                        word.push(gi as usize);
                        cur = p;
                    }
                    word.reverse();
                    return Ok(Some(Witness { generators: gens, word }));
                }
                next.push(nk);
            }
        }
        frontier = next;
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::f2core::SkewMatrix;
    use crate::orbits::action::act;

    fn e(m: usize, i: usize, j: usize) -> SkewMatrix {
        SkewMatrix::unit(m, i, j).unwrap()
    }

    #[test]
    fn single_line_of_lambda3() {
        let s = SkewSpace::span(3, &[e(3, 1, 2)]).unwrap();
        let c = orbit_of(&s, &OrbitOptions::sequential()).unwrap();
        assert_eq!(c.cardinality, 7);
        assert_eq!(c.representative, s);
        assert_eq!(c.stabilizer_order(), 24);
    }

    #[test]
    fn generator_sets_and_policies_agree() {
        let s = SkewSpace::span(5, &[e(5, 1, 2) + e(5, 3, 4), e(5, 2, 5)]).unwrap();
        let mut results = Vec::new();
        for policy in [ExecPolicy::Sequential, ExecPolicy::Parallel] {
            for generators in [GeneratorSet::Transvections, GeneratorSet::Pair] {
                let opts = OrbitOptions { policy, generators, ..OrbitOptions::default() };
                results.push(orbit_of(&s, &opts).unwrap());
            }
        }
        assert!(results.windows(2).all(|w| w[0] == w[1]));
        assert!(results[0].divides_group_order());
    }

    #[test]
    fn witness_maps_source_to_target() {
        let m = 4;
        let from = SkewSpace::span(m, &[e(m, 1, 4), e(m, 2, 3)]).unwrap();
        let a = GroupElement::transvection(m, 2, 0).unwrap().mul(&GroupElement::transvection(m, 1, 3).unwrap());
        let to = act(&a, &from).unwrap();
        let w = find_congruence(&from, &to, GeneratorSet::Transvections).unwrap().unwrap();
        assert_eq!(act(&w.matrix(m).unwrap(), &from).unwrap(), to);
    }

    #[test]
    fn zero_space_rejected() {
        assert!(matches!(
            orbit_of(&SkewSpace::zero(4).unwrap(), &OrbitOptions::default()),
            Err(Error::Precondition(_))
        ));
    }
}
