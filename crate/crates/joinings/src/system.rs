//! Finite measure-preserving systems and their homomorphisms.
//!
//! The state space is `{0, …, n−1}`, the dynamics an invertible map (a
//! permutation), and the invariant measure a strictly positive rational
//! probability vector. Invariance `μ(T⁻¹A) = μ(A)` reduces to
//! `μ(T(i)) = μ(i)` on atoms and is checked exactly at construction.

use num::Zero;
use thiserror::Error;

use crate::rational::{ProbVector, Rational};

/// Errors from constructing systems, measures and factor maps.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SystemError {
    #[error("map is not a permutation of the state set")]
    NotAPermutation,
    #[error("measure is not invariant: state {state} and its image carry different mass")]
    NotInvariant { state: usize },
    #[error("state {state} has zero mass; zero-mass states are rejected, prune them first")]
    ZeroMassState { state: usize },
    #[error("measure must have at least one entry")]
    EmptyMeasure,
    #[error("measure entry {index} is negative")]
    NegativeMass { index: usize },
    #[error("measure entries sum to {total}, expected 1")]
    MassNotNormalized { total: Rational },
    #[error("measure length {measure} does not match state count {states}")]
    LengthMismatch { states: usize, measure: usize },
    #[error("factor map is not onto the target: state {target_state} has no preimage")]
    NotSurjective { target_state: usize },
    #[error("factor map does not push the measure forward: target state {target_state}")]
    NotMeasurePreserving { target_state: usize },
    #[error("factor map is not equivariant at source state {state}")]
    NotEquivariant { state: usize },
    #[error("factor map value {value} at state {state} is outside the target")]
    TargetOutOfRange { state: usize, value: usize },
    #[error("map must assign a value to every source state")]
    IncompleteMap,
}

/// A permutation of `{0, …, n−1}` in one-line notation.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm(Vec<usize>);

impl Perm {
    pub fn new(map: Vec<usize>) -> Result<Self, SystemError> {
        let n = map.len();
        let mut seen = vec![false; n];
        for &v in &map {
            if v >= n || seen[v] {
                return Err(SystemError::NotAPermutation);
            }
            seen[v] = true;
        }
        Ok(Perm(map))
    }

    pub fn identity(n: usize) -> Self {
        Perm((0..n).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn apply(&self, i: usize) -> usize {
        self.0[i]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Perm) -> Perm {
        assert_eq!(self.len(), other.len());
        Perm(other.0.iter().map(|&i| self.0[i]).collect())
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0; self.0.len()];
        for (i, &v) in self.0.iter().enumerate() {
            inv[v] = i;
        }
        Perm(inv)
    }

    /// `self` iterated `k` times.
    pub fn pow(&self, k: usize) -> Perm {
        let mut out = Perm::identity(self.len());
        for _ in 0..k {
            out = self.compose(&out);
        }
        out
    }

    /// The forward orbit of `start`, in visit order, ending just before
    /// `start` repeats.
    pub fn orbit(&self, start: usize) -> Vec<usize> {
        let mut orbit = vec![start];
        let mut cur = self.apply(start);
        while cur != start {
            orbit.push(cur);
            cur = self.apply(cur);
        }
        orbit
    }

    /// Cycle decomposition; cycles ordered by their minimal element.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.len()];
        let mut cycles = Vec::new();
        for start in 0..self.len() {
            if seen[start] {
                continue;
            }
            let orbit = self.orbit(start);
            for &i in &orbit {
                seen[i] = true;
            }
            cycles.push(orbit);
        }
        cycles
    }

    pub fn is_single_cycle(&self) -> bool {
        !self.is_empty() && self.orbit(0).len() == self.len()
    }
}

/// A finite measure-preserving system `(X, μ, T)`: a permutation of
/// `{0, …, n−1}` together with an exact invariant probability measure with
/// strictly positive atoms.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FiniteSystem {
    map: Perm,
    measure: ProbVector,
}

impl FiniteSystem {
    /// Validates that `map` permutes the states, the measure matches in
    /// length, carries no zero atom, and is invariant under the map.
    pub fn new(map: Perm, measure: ProbVector) -> Result<Self, SystemError> {
        if map.len() != measure.len() {
            return Err(SystemError::LengthMismatch {
                states: map.len(),
                measure: measure.len(),
            });
        }
        if let Some(state) = (0..measure.len()).find(|&i| measure[i].is_zero()) {
            return Err(SystemError::ZeroMassState { state });
        }
        for i in 0..map.len() {
            if measure[map.apply(i)] != measure[i] {
                return Err(SystemError::NotInvariant { state: i });
            }
        }
        Ok(FiniteSystem { map, measure })
    }

    /// Convenience constructor from one-line permutation data.
    pub fn from_parts(map: Vec<usize>, measure: Vec<Rational>) -> Result<Self, SystemError> {
        FiniteSystem::new(Perm::new(map)?, ProbVector::new(measure)?)
    }

    /// The trivial system on a single point.
    pub fn one_point() -> Self {
        FiniteSystem::new(Perm::identity(1), ProbVector::uniform(1)).unwrap()
    }

    /// The rotation `i ↦ i+1 (mod n)` with uniform measure, the generic
    /// ergodic system at this scale.
    pub fn cycle(n: usize) -> Self {
        let map = Perm::new((0..n).map(|i| (i + 1) % n).collect()).unwrap();
        FiniteSystem::new(map, ProbVector::uniform(n)).unwrap()
    }

    /// The identity map with an arbitrary (positive, normalized) measure.
    pub fn identity_with(measure: ProbVector) -> Result<Self, SystemError> {
        FiniteSystem::new(Perm::identity(measure.len()), measure)
    }

    pub fn size(&self) -> usize {
        self.map.len()
    }

    pub fn apply(&self, i: usize) -> usize {
        self.map.apply(i)
    }

    pub fn perm(&self) -> &Perm {
        &self.map
    }

    pub fn measure(&self) -> &ProbVector {
        &self.measure
    }

    pub fn mass(&self, i: usize) -> &Rational {
        &self.measure[i]
    }

    /// Ergodic ⟺ the permutation is a single cycle on the full state set.
    pub fn is_ergodic(&self) -> bool {
        self.map.is_single_cycle()
    }
}

/// A measurable subset of a system's state space.
#[derive(Debug, Clone)]
pub struct MeasurableSet<'a> {
    system: &'a FiniteSystem,
    indices: Vec<usize>,
}

impl<'a> MeasurableSet<'a> {
    /// Builds the set; indices are deduplicated and sorted. Out-of-range
    /// indices are rejected.
    pub fn new(system: &'a FiniteSystem, indices: impl IntoIterator<Item = usize>) -> Option<Self> {
        let mut indices: Vec<usize> = indices.into_iter().collect();
        indices.sort_unstable();
        indices.dedup();
        if indices.iter().any(|&i| i >= system.size()) {
            return None;
        }
        Some(MeasurableSet { system, indices })
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn measure(&self) -> Rational {
        self.indices
            .iter()
            .map(|&i| self.system.mass(i).clone())
            .sum()
    }

    /// `T⁻¹A`.
    pub fn preimage(&self) -> MeasurableSet<'a> {
        let inv = self.system.perm().inverse();
        MeasurableSet::new(self.system, self.indices.iter().map(|&i| inv.apply(i))).unwrap()
    }

    /// `TA`.
    pub fn image(&self) -> MeasurableSet<'a> {
        MeasurableSet::new(
            self.system,
            self.indices.iter().map(|&i| self.system.apply(i)),
        )
        .unwrap()
    }
}

/// A homomorphism of systems: an equivariant measure-preserving surjection
/// `π : X → Z` with `π∘T = R∘π` and `π(μ) = ρ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactorMap {
    source: FiniteSystem,
    target: FiniteSystem,
    map: Vec<usize>,
}

impl FactorMap {
    pub fn new(
        source: FiniteSystem,
        target: FiniteSystem,
        map: Vec<usize>,
    ) -> Result<Self, SystemError> {
        if map.len() != source.size() {
            return Err(SystemError::IncompleteMap);
        }
        for (state, &value) in map.iter().enumerate() {
            if value >= target.size() {
                return Err(SystemError::TargetOutOfRange { state, value });
            }
        }
        // surjectivity
        let mut hit = vec![false; target.size()];
        for &v in &map {
            hit[v] = true;
        }
        if let Some(target_state) = hit.iter().position(|&h| !h) {
            return Err(SystemError::NotSurjective { target_state });
        }
        // pushforward measure
        for z in 0..target.size() {
            let mass: Rational = (0..source.size())
                .filter(|&x| map[x] == z)
                .map(|x| source.mass(x).clone())
                .sum();
            if &mass != target.mass(z) {
                return Err(SystemError::NotMeasurePreserving { target_state: z });
            }
        }
        // equivariance π(Tx) = R(π(x))
        for x in 0..source.size() {
            if map[source.apply(x)] != target.apply(map[x]) {
                return Err(SystemError::NotEquivariant { state: x });
            }
        }
        Ok(FactorMap {
            source,
            target,
            map,
        })
    }

    /// The identity factor `T → T`.
    pub fn identity(system: &FiniteSystem) -> Self {
        FactorMap::new(
            system.clone(),
            system.clone(),
            (0..system.size()).collect(),
        )
        .expect("identity is always a factor map")
    }

    /// The trivial factor onto the one-point system.
    pub fn to_one_point(system: &FiniteSystem) -> Self {
        FactorMap::new(
            system.clone(),
            FiniteSystem::one_point(),
            vec![0; system.size()],
        )
        .expect("the one-point quotient is always a factor map")
    }

    pub fn source(&self) -> &FiniteSystem {
        &self.source
    }

    pub fn target(&self) -> &FiniteSystem {
        &self.target
    }

    pub fn apply(&self, x: usize) -> usize {
        self.map[x]
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    /// `other ∘ self` where `other` starts at this map's target.
    /// Functoriality: the composite validates as a factor map again.
    pub fn then(&self, other: &FactorMap) -> Result<FactorMap, SystemError> {
        assert_eq!(
            self.target, other.source,
            "composition requires matching middle system"
        );
        FactorMap::new(
            self.source.clone(),
            other.target.clone(),
            self.map.iter().map(|&z| other.apply(z)).collect(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    #[test]
    fn perm_rejects_non_bijections() {
        assert!(Perm::new(vec![0, 0]).is_err());
        assert!(Perm::new(vec![1, 2]).is_err());
        assert!(Perm::new(vec![1, 0]).is_ok());
    }

    #[test]
    fn one_point_system_is_valid() {
        let t = FiniteSystem::from_parts(vec![0], vec![rat(1, 1)]).unwrap();
        assert_eq!(t.size(), 1);
        assert!(t.is_ergodic());
    }

    #[test]
    fn two_cycle_uniform_is_valid_and_ergodic() {
        let t = FiniteSystem::from_parts(vec![1, 0], vec![rat(1, 2), rat(1, 2)]).unwrap();
        assert!(t.is_ergodic());
    }

    #[test]
    fn swap_with_unbalanced_measure_is_not_invariant() {
        let err = FiniteSystem::from_parts(vec![1, 0], vec![rat(1, 3), rat(2, 3)]).unwrap_err();
        assert!(matches!(err, SystemError::NotInvariant { state: 0 }));
    }

    #[test]
    fn identity_on_two_points_is_not_ergodic() {
        let t = FiniteSystem::identity_with(ProbVector::uniform(2)).unwrap();
        assert!(!t.is_ergodic());
    }

    #[test]
    fn product_of_two_cycles_has_two_orbits() {
        // pairs advance together: (a, b) ↦ (a+1, b+1) on 2 × 2, flattened to 4 states
        let t = FiniteSystem::from_parts(vec![3, 2, 1, 0], ProbVector::uniform(4).iter().cloned().collect())
            .unwrap();
        assert!(!t.is_ergodic());
        assert_eq!(t.perm().cycles().len(), 2);
    }

    #[test]
    fn zero_mass_state_rejected() {
        let err =
            FiniteSystem::from_parts(vec![0, 1], vec![rat(1, 1), rat(0, 1)]).unwrap_err();
        assert!(matches!(err, SystemError::ZeroMassState { state: 1 }));
    }

    #[test]
    fn parity_map_is_a_factor_of_the_four_cycle() {
        let four = FiniteSystem::cycle(4);
        let two = FiniteSystem::cycle(2);
        let pi = FactorMap::new(four, two, vec![0, 1, 0, 1]).unwrap();
        assert_eq!(pi.apply(3), 1);
    }

    #[test]
    fn identity_and_trivial_factors_always_exist() {
        let t = FiniteSystem::cycle(5);
        FactorMap::identity(&t);
        FactorMap::to_one_point(&t);
    }

    #[test]
    fn factor_map_error_cases() {
        let four = FiniteSystem::cycle(4);
        let two = FiniteSystem::cycle(2);
        // not equivariant: constant-ish map onto a moving target
        assert!(matches!(
            FactorMap::new(four.clone(), two.clone(), vec![0, 1, 1, 0]),
            Err(SystemError::NotEquivariant { .. })
        ));
        // wrong pushforward
        let skew =
            FiniteSystem::from_parts(vec![0, 1], vec![rat(1, 4), rat(3, 4)]).unwrap();
        assert!(matches!(
            FactorMap::new(four.clone(), skew, vec![0, 1, 0, 1]),
            Err(SystemError::NotMeasurePreserving { .. }) | Err(SystemError::NotEquivariant { .. })
        ));
        // not surjective
        let id2 = FiniteSystem::identity_with(ProbVector::uniform(2)).unwrap();
        let id1 = FiniteSystem::one_point();
        let _ = id1;
        assert!(matches!(
            FactorMap::new(id2.clone(), id2, vec![0, 0]),
            Err(SystemError::NotSurjective { .. }) | Err(SystemError::NotMeasurePreserving { .. })
        ));
    }

    #[test]
    fn factor_maps_compose() {
        let eight = FiniteSystem::cycle(8);
        let four = FiniteSystem::cycle(4);
        let two = FiniteSystem::cycle(2);
        let a = FactorMap::new(eight, four.clone(), (0..8).map(|i| i % 4).collect()).unwrap();
        let b = FactorMap::new(four, two, vec![0, 1, 0, 1]).unwrap();
        let ab = a.then(&b).unwrap();
        assert_eq!(ab.map(), &[0, 1, 0, 1, 0, 1, 0, 1]);
    }

    #[test]
    fn measurable_set_respects_invariance() {
        let t = FiniteSystem::cycle(6);
        let a = MeasurableSet::new(&t, [0, 2, 3]).unwrap();
        assert_eq!(a.measure(), rat(1, 2));
        assert_eq!(a.preimage().measure(), a.measure());
        assert_eq!(a.image().measure(), a.measure());
    }
}
