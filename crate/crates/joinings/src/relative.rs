//! Relatively independent joinings over a common factor, factor-lattice
//! enumeration, and classification of self-joinings against the obvious
//! ones.
//!
//! Given factor maps `π_T : X → Z` and `π_S : Y → Z` onto the same system,
//! the relatively independent joining `μ ⊗_R ν` glues `T` and `S` along the
//! factor coordinate: conditioned on `z`, the two sides are independent.
//! Over a nontrivial common factor it is never the product measure, which
//! makes it a computable non-disjointness witness.

use num::{One, Zero};
use thiserror::Error;

use crate::coupling::{
    graph_joining, product_joining, validate_joining, Coupling, JoiningError,
};
use crate::polytope::joining_polytope;
use crate::rational::{ProbVector, Rational};
use crate::system::{FactorMap, FiniteSystem, SystemError};
use crate::Caps;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RelativeError {
    #[error("the two couplings/factor maps do not share the same factor system")]
    FactorMismatch,
    #[error("{states} states exceed the partition-enumeration cap of {cap}")]
    BruteForceCapExceeded { states: usize, cap: usize },
    #[error(transparent)]
    Joining(#[from] JoiningError),
    #[error(transparent)]
    System(#[from] SystemError),
}

/// An exact 3-fold joining: a nonnegative tensor over `X × Y × Z` with
/// marginals `μ`, `ν`, `ρ`, invariant under `T × S × R`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TripleCoupling {
    x: FiniteSystem,
    y: FiniteSystem,
    z: FiniteSystem,
    weights: Vec<Vec<Vec<Rational>>>,
}

impl TripleCoupling {
    pub fn new(
        x: FiniteSystem,
        y: FiniteSystem,
        z: FiniteSystem,
        weights: Vec<Vec<Vec<Rational>>>,
    ) -> Result<Self, RelativeError> {
        let (nx, ny, nz) = (x.size(), y.size(), z.size());
        let shaped = weights.len() == nx
            && weights.iter().all(|plane| {
                plane.len() == ny && plane.iter().all(|row| row.len() == nz)
            });
        if !shaped {
            return Err(JoiningError::ShapeMismatch {
                rows: weights.len(),
                cols: weights.first().map_or(0, |p| p.len()),
                need_rows: nx,
                need_cols: ny,
            }
            .into());
        }
        let mut violations = Vec::new();
        let mut total = Rational::zero();
        for (ix, plane) in weights.iter().enumerate() {
            for (iy, row) in plane.iter().enumerate() {
                for (iz, w) in row.iter().enumerate() {
                    if w < &Rational::zero() {
                        violations.push(crate::coupling::JoiningViolation::Negative {
                            cell: (ix, iy * nz + iz),
                        });
                    }
                    total += w;
                }
            }
        }
        if !total.is_one() {
            violations.push(crate::coupling::JoiningViolation::NotNormalized { total });
        }
        for (axis, system) in [(0usize, &x), (1, &y), (2, &z)] {
            let marg = marginal_1d(&weights, nx, ny, nz, axis);
            for (i, m) in marg.iter().enumerate() {
                if m != system.mass(i) {
                    violations.push(crate::coupling::JoiningViolation::BadRowMarginal {
                        row: axis * (nx + ny + nz) + i,
                        expected: system.mass(i).clone(),
                        actual: m.clone(),
                    });
                }
            }
        }
        for ix in 0..nx {
            for iy in 0..ny {
                for iz in 0..nz {
                    let img = &weights[x.apply(ix)][y.apply(iy)][z.apply(iz)];
                    if img != &weights[ix][iy][iz] {
                        violations.push(crate::coupling::JoiningViolation::NotInvariant {
                            cell: (ix, iy * nz + iz),
                            image: (x.apply(ix), y.apply(iy) * nz + z.apply(iz)),
                        });
                    }
                }
            }
        }
        if !violations.is_empty() {
            return Err(JoiningError::InvalidJoining(violations).into());
        }
        Ok(TripleCoupling { x, y, z, weights })
    }

    pub fn systems(&self) -> (&FiniteSystem, &FiniteSystem, &FiniteSystem) {
        (&self.x, &self.y, &self.z)
    }

    pub fn weight(&self, x: usize, y: usize, z: usize) -> &Rational {
        &self.weights[x][y][z]
    }

    pub fn weights(&self) -> &Vec<Vec<Vec<Rational>>> {
        &self.weights
    }

    pub fn marginal_xy(&self) -> Vec<Vec<Rational>> {
        let (nx, ny) = (self.x.size(), self.y.size());
        let mut out = vec![vec![Rational::zero(); ny]; nx];
        for (ix, plane) in self.weights.iter().enumerate() {
            for (iy, row) in plane.iter().enumerate() {
                for w in row {
                    out[ix][iy] += w;
                }
            }
        }
        out
    }

    pub fn marginal_xz(&self) -> Vec<Vec<Rational>> {
        let (nx, nz) = (self.x.size(), self.z.size());
        let mut out = vec![vec![Rational::zero(); nz]; nx];
        for (ix, plane) in self.weights.iter().enumerate() {
            for row in plane {
                for (iz, w) in row.iter().enumerate() {
                    out[ix][iz] += w;
                }
            }
        }
        out
    }

    pub fn marginal_yz(&self) -> Vec<Vec<Rational>> {
        let (ny, nz) = (self.y.size(), self.z.size());
        let mut out = vec![vec![Rational::zero(); nz]; ny];
        for plane in &self.weights {
            for (iy, row) in plane.iter().enumerate() {
                for (iz, w) in row.iter().enumerate() {
                    out[iy][iz] += w;
                }
            }
        }
        out
    }
}

fn marginal_1d(
    weights: &[Vec<Vec<Rational>>],
    nx: usize,
    ny: usize,
    nz: usize,
    axis: usize,
) -> Vec<Rational> {
    let len = [nx, ny, nz][axis];
    let mut out = vec![Rational::zero(); len];
    for (ix, plane) in weights.iter().enumerate() {
        for (iy, row) in plane.iter().enumerate() {
            for (iz, w) in row.iter().enumerate() {
                out[[ix, iy, iz][axis]] += w;
            }
        }
    }
    out
}

/// Two factor maps onto the same target system: the data of a common
/// factor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactorPair {
    left: FactorMap,
    right: FactorMap,
}

impl FactorPair {
    pub fn new(left: FactorMap, right: FactorMap) -> Result<Self, RelativeError> {
        if left.target() != right.target() {
            return Err(RelativeError::FactorMismatch);
        }
        Ok(FactorPair { left, right })
    }

    pub fn left(&self) -> &FactorMap {
        &self.left
    }

    pub fn right(&self) -> &FactorMap {
        &self.right
    }

    pub fn target(&self) -> &FiniteSystem {
        self.left.target()
    }
}

/// Glues `λ_T ∈ J(T,R)` and `λ_S ∈ J(S,R)` along the shared `R` coordinate:
/// `w(x,y,z) = λ_T(x,z) · λ_S(y,z) / ρ(z)`. The `X×Z` marginal is `λ_T` and
/// the `Y×Z` marginal is `λ_S`.
pub fn relative_product(
    lambda_t: &Coupling,
    lambda_s: &Coupling,
) -> Result<TripleCoupling, RelativeError> {
    if lambda_t.right() != lambda_s.right() {
        return Err(RelativeError::FactorMismatch);
    }
    let r = lambda_t.right().clone();
    let (x, y) = (lambda_t.left().clone(), lambda_s.left().clone());
    let weights: Vec<Vec<Vec<Rational>>> = (0..x.size())
        .map(|ix| {
            (0..y.size())
                .map(|iy| {
                    (0..r.size())
                        .map(|iz| {
                            lambda_t.weight(ix, iz) * lambda_s.weight(iy, iz) / r.mass(iz)
                        })
                        .collect()
                })
                .collect()
        })
        .collect();
    TripleCoupling::new(x, y, r, weights)
}

/// The relatively independent joining `μ ⊗_R ν` of the two sources above
/// their common factor: the `X×Y` marginal of the relative product of the
/// two graph joinings. On its support, `π_T(x) = π_S(y)`.
pub fn rel_indep_joining(pair: &FactorPair) -> Coupling {
    let triple = relative_product(&graph_joining(pair.left()), &graph_joining(pair.right()))
        .expect("graph joinings share the factor system by construction");
    validate_joining(
        pair.left().source(),
        pair.right().source(),
        triple.marginal_xy(),
    )
    .expect("the X×Y marginal of a relative product is a joining")
}

/// The relatively independent joining when it certifies non-disjointness,
/// i.e. when it differs from the product measure; `None` exactly when the
/// common factor is the one-point system.
pub fn nondisjointness_witness(pair: &FactorPair) -> Option<Coupling> {
    let witness = rel_indep_joining(pair);
    let product = product_joining(pair.left().source(), pair.right().source());
    if witness == product {
        None
    } else {
        Some(witness)
    }
}

/// All factors of `T`, one canonical representative per `T`-invariant
/// partition of the state space, in lexicographic restricted-growth order.
/// Target states are labeled by first appearance, so the one-point factor
/// comes first and the identity factor (the singleton partition) last.
pub fn enumerate_factors(
    system: &FiniteSystem,
    caps: &Caps,
) -> Result<Vec<FactorMap>, RelativeError> {
    let n = system.size();
    if n > caps.partition_states {
        return Err(RelativeError::BruteForceCapExceeded {
            states: n,
            cap: caps.partition_states,
        });
    }
    let mut blocks = vec![0usize; n];
    let mut out = Vec::new();
    loop {
        if let Some(factor) = invariant_partition_to_factor(system, &blocks) {
            out.push(factor);
        }
        if !next_restricted_growth(&mut blocks) {
            break;
        }
    }
    Ok(out)
}

/// Advances a restricted-growth string in lexicographic order; `false` once
/// exhausted. `a[i] ≤ max(a[..i]) + 1` throughout.
fn next_restricted_growth(a: &mut [usize]) -> bool {
    let n = a.len();
    for i in (1..n).rev() {
        let max_prefix = *a[..i].iter().max().unwrap();
        if a[i] <= max_prefix {
            a[i] += 1;
            for slot in a[i + 1..].iter_mut() {
                *slot = 0;
            }
            return true;
        }
    }
    false
}

/// Builds the quotient factor map when the partition is invariant (blocks
/// map onto blocks); `None` otherwise.
fn invariant_partition_to_factor(system: &FiniteSystem, blocks: &[usize]) -> Option<FactorMap> {
    let n = system.size();
    let nblocks = blocks.iter().max().unwrap() + 1;
    let mut image = vec![usize::MAX; nblocks];
    for i in 0..n {
        let b = blocks[i];
        let ib = blocks[system.apply(i)];
        if image[b] == usize::MAX {
            image[b] = ib;
        } else if image[b] != ib {
            return None;
        }
    }
    // A well-defined block image under a bijection is itself a bijection.
    let target_perm = crate::system::Perm::new(image).expect("block image is a permutation");
    let mut masses = vec![Rational::zero(); nblocks];
    for i in 0..n {
        masses[blocks[i]] += system.mass(i);
    }
    let target = FiniteSystem::new(target_perm, ProbVector::new(masses).expect("pushforward"))
        .expect("quotient of an invariant measure is invariant");
    Some(
        FactorMap::new(system.clone(), target, blocks.to_vec())
            .expect("invariant partition induces a factor map"),
    )
}

/// All common factors of `T` and `S`: pairs `(π_T, π_S)` onto a shared
/// target, one entry per (canonical `T`-factor, isomorphism from an
/// `S`-factor target onto it). The trivial pair is always present.
pub fn common_factors(
    left: &FiniteSystem,
    right: &FiniteSystem,
    caps: &Caps,
) -> Result<Vec<FactorPair>, RelativeError> {
    let left_factors = enumerate_factors(left, caps)?;
    let right_factors = enumerate_factors(right, caps)?;
    let mut out = Vec::new();
    for qt in &left_factors {
        for qs in &right_factors {
            if qt.target().size() != qs.target().size() {
                continue;
            }
            for psi in crate::coupling::isomorphisms(qs.target(), qt.target()) {
                let relabeled = FactorMap::new(
                    right.clone(),
                    qt.target().clone(),
                    qs.map().iter().map(|&z| psi[z]).collect(),
                )
                .expect("isomorphism relabeling preserves the factor map");
                out.push(FactorPair::new(qt.clone(), relabeled).expect("shared target"));
            }
        }
    }
    Ok(out)
}

/// How a vertex of `J(T, T)` relates to the obvious self-joinings.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SelfJoiningLabel {
    /// The graph joining `Δ_{T^k}`.
    PowerGraph(usize),
    Product,
    Other,
}

/// Vertices of `J(T, T)` with each one labeled against the obvious
/// self-joinings.
#[derive(Debug, Clone)]
pub struct SelfJoiningReport {
    vertices: Vec<Coupling>,
    labels: Vec<SelfJoiningLabel>,
}

impl SelfJoiningReport {
    pub fn vertices(&self) -> &[Coupling] {
        &self.vertices
    }

    pub fn labels(&self) -> &[SelfJoiningLabel] {
        &self.labels
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Coupling, &SelfJoiningLabel)> {
        self.vertices.iter().zip(self.labels.iter())
    }

    pub fn power_graph_count(&self) -> usize {
        self.labels
            .iter()
            .filter(|l| matches!(l, SelfJoiningLabel::PowerGraph(_)))
            .count()
    }

    pub fn has_other(&self) -> bool {
        self.labels.iter().any(|l| matches!(l, SelfJoiningLabel::Other))
    }
}

/// Enumerates the ergodic self-joinings of an ergodic `T` (the vertices of
/// `J(T, T)`) and labels each as some `Δ_{T^k}`, the product measure, or
/// `Other`.
pub fn classify_self_joinings(
    system: &FiniteSystem,
    caps: &Caps,
) -> Result<SelfJoiningReport, JoiningError> {
    if !system.is_ergodic() {
        return Err(JoiningError::NotErgodic);
    }
    let vertices = joining_polytope(system, system).enumerate_vertices(caps)?;
    let powers: Vec<Coupling> = (0..system.size())
        .map(|k| {
            crate::coupling::self_joining_from_commutant(system, &system.perm().pow(k))
                .expect("powers of T lie in the commutant")
        })
        .collect();
    let product = product_joining(system, system);
    let labels = vertices
        .iter()
        .map(|v| {
            if let Some(k) = powers.iter().position(|p| p == v) {
                SelfJoiningLabel::PowerGraph(k)
            } else if *v == product {
                SelfJoiningLabel::Product
            } else {
                SelfJoiningLabel::Other
            }
        })
        .collect();
    Ok(SelfJoiningReport { vertices, labels })
}
