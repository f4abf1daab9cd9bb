//! Couplings of two finite systems: exact joint weight matrices with
//! prescribed marginals, invariant under the product map.
//!
//! A valid [`Coupling`] is a joining. Because the product map permutes the
//! cell grid, invariance forces the weight matrix to be constant along every
//! `T × S` orbit, and the ergodic joinings are exactly the couplings whose
//! support is a single orbit.

use std::cmp::Ordering;

use itertools::Itertools;
use num::{One, Signed, Zero};
use thiserror::Error;

use crate::rational::{two_pow_neg, Rational};
use crate::system::{FactorMap, FiniteSystem, Perm};
use crate::Caps;

/// One violated joining constraint, pinpointed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum JoiningViolation {
    Negative {
        cell: (usize, usize),
    },
    NotNormalized {
        total: Rational,
    },
    BadRowMarginal {
        row: usize,
        expected: Rational,
        actual: Rational,
    },
    BadColMarginal {
        col: usize,
        expected: Rational,
        actual: Rational,
    },
    /// Weight changes along a product orbit: `cell` maps to `image` with a
    /// different weight.
    NotInvariant {
        cell: (usize, usize),
        image: (usize, usize),
    },
}

impl std::fmt::Display for JoiningViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            JoiningViolation::Negative { cell } => {
                write!(f, "negative weight at cell ({}, {})", cell.0, cell.1)
            }
            JoiningViolation::NotNormalized { total } => {
                write!(f, "weights sum to {total}, expected 1")
            }
            JoiningViolation::BadRowMarginal {
                row,
                expected,
                actual,
            } => write!(f, "row {row} sums to {actual}, expected {expected}"),
            JoiningViolation::BadColMarginal {
                col,
                expected,
                actual,
            } => write!(f, "column {col} sums to {actual}, expected {expected}"),
            JoiningViolation::NotInvariant { cell, image } => write!(
                f,
                "weight at ({}, {}) differs from its image at ({}, {})",
                cell.0, cell.1, image.0, image.1
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum JoiningError {
    #[error("candidate is not a joining: {}", .0.iter().map(|v| v.to_string()).join("; "))]
    InvalidJoining(Vec<JoiningViolation>),
    #[error("weight matrix is {rows}×{cols}, systems need {need_rows}×{need_cols}")]
    ShapeMismatch {
        rows: usize,
        cols: usize,
        need_rows: usize,
        need_cols: usize,
    },
    #[error("couplings live over different system pairs")]
    SystemMismatch,
    #[error("product grid has {cells} cells, over the cap of {cap}")]
    DimensionCapExceeded { cells: usize, cap: usize },
    #[error("{states} states exceed the brute-force cap of {cap}")]
    BruteForceCapExceeded { states: usize, cap: usize },
    #[error("permutation does not commute with the dynamics or move the measure correctly")]
    NotInCommutant,
    #[error("operation requires an ergodic system")]
    NotErgodic,
}

/// A joining of two finite systems: an exact nonnegative matrix with
/// marginals `μ`, `ν`, invariant under `T × S`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Coupling {
    left: FiniteSystem,
    right: FiniteSystem,
    weights: Vec<Vec<Rational>>,
}

impl Coupling {
    pub fn left(&self) -> &FiniteSystem {
        &self.left
    }

    pub fn right(&self) -> &FiniteSystem {
        &self.right
    }

    pub fn weights(&self) -> &[Vec<Rational>] {
        &self.weights
    }

    pub fn weight(&self, x: usize, y: usize) -> &Rational {
        &self.weights[x][y]
    }

    /// Cells carrying positive weight, row-major.
    pub fn support(&self) -> Vec<(usize, usize)> {
        let mut cells = Vec::new();
        for (x, row) in self.weights.iter().enumerate() {
            for (y, w) in row.iter().enumerate() {
                if !w.is_zero() {
                    cells.push((x, y));
                }
            }
        }
        cells
    }

    /// Deterministic row-major lexicographic order on weight matrices; the
    /// canonical order for vertex listings and reports.
    pub fn cmp_weights(&self, other: &Coupling) -> Ordering {
        lex_cmp(&self.weights, &other.weights)
    }
}

pub(crate) fn lex_cmp(a: &[Vec<Rational>], b: &[Vec<Rational>]) -> Ordering {
    a.iter().flatten().cmp(b.iter().flatten())
}

/// Orbits of the product permutation `T × S` on the cell grid, each orbit in
/// walk order, orbits ordered by their first (row-major minimal) cell.
pub(crate) fn product_orbits(
    left: &FiniteSystem,
    right: &FiniteSystem,
) -> Vec<Vec<(usize, usize)>> {
    let (nx, ny) = (left.size(), right.size());
    let mut seen = vec![false; nx * ny];
    let mut orbits = Vec::new();
    for x in 0..nx {
        for y in 0..ny {
            if seen[x * ny + y] {
                continue;
            }
            let mut orbit = Vec::new();
            let (mut cx, mut cy) = (x, y);
            loop {
                seen[cx * ny + cy] = true;
                orbit.push((cx, cy));
                cx = left.apply(cx);
                cy = right.apply(cy);
                if (cx, cy) == (x, y) {
                    break;
                }
            }
            orbits.push(orbit);
        }
    }
    orbits
}

/// Validates a candidate weight matrix as a joining of `left` and `right`,
/// reporting every violated constraint at once on failure.
pub fn validate_joining(
    left: &FiniteSystem,
    right: &FiniteSystem,
    weights: Vec<Vec<Rational>>,
) -> Result<Coupling, JoiningError> {
    let (nx, ny) = (left.size(), right.size());
    if weights.len() != nx || weights.iter().any(|row| row.len() != ny) {
        return Err(JoiningError::ShapeMismatch {
            rows: weights.len(),
            cols: weights.first().map_or(0, |r| r.len()),
            need_rows: nx,
            need_cols: ny,
        });
    }
    let mut violations = Vec::new();
    for (x, row) in weights.iter().enumerate() {
        for (y, w) in row.iter().enumerate() {
            if w.is_negative() {
                violations.push(JoiningViolation::Negative { cell: (x, y) });
            }
        }
    }
    let total: Rational = weights.iter().flatten().cloned().sum();
    if !total.is_one() {
        violations.push(JoiningViolation::NotNormalized { total });
    }
    for x in 0..nx {
        let actual: Rational = weights[x].iter().cloned().sum();
        if &actual != left.mass(x) {
            violations.push(JoiningViolation::BadRowMarginal {
                row: x,
                expected: left.mass(x).clone(),
                actual,
            });
        }
    }
    for y in 0..ny {
        let actual: Rational = weights.iter().map(|row| row[y].clone()).sum();
        if &actual != right.mass(y) {
            violations.push(JoiningViolation::BadColMarginal {
                col: y,
                expected: right.mass(y).clone(),
                actual,
            });
        }
    }
    for x in 0..nx {
        for y in 0..ny {
            let (ix, iy) = (left.apply(x), right.apply(y));
            if weights[ix][iy] != weights[x][y] {
                violations.push(JoiningViolation::NotInvariant {
                    cell: (x, y),
                    image: (ix, iy),
                });
            }
        }
    }
    if !violations.is_empty() {
        return Err(JoiningError::InvalidJoining(violations));
    }
    Ok(Coupling {
        left: left.clone(),
        right: right.clone(),
        weights,
    })
}

/// The product joining `μ ⊗ ν`, the one element `J(T,S)` always contains.
pub fn product_joining(left: &FiniteSystem, right: &FiniteSystem) -> Coupling {
    let weights = (0..left.size())
        .map(|x| {
            (0..right.size())
                .map(|y| left.mass(x) * right.mass(y))
                .collect()
        })
        .collect();
    validate_joining(left, right, weights).expect("product measure is always a joining")
}

/// The graph joining `Δ_π` of a factor map: all mass sits on the graph
/// `{(x, π(x))}`, with `Δ_π(A × B) = μ(A ∩ π⁻¹B)`.
pub fn graph_joining(pi: &FactorMap) -> Coupling {
    let (src, tgt) = (pi.source(), pi.target());
    let mut weights = vec![vec![Rational::zero(); tgt.size()]; src.size()];
    for x in 0..src.size() {
        weights[x][pi.apply(x)] = src.mass(x).clone();
    }
    validate_joining(src, tgt, weights).expect("the graph of a factor map is always a joining")
}

/// Distance between two couplings over the same pair of systems:
/// `Σ_{i,j} 2^{−(i+j+2)} |λ({i}×{j}) − λ'({i}×{j})|` with singleton test sets
/// in state order. Symmetric, zero exactly on equal matrices.
pub fn joining_metric(a: &Coupling, b: &Coupling) -> Result<Rational, JoiningError> {
    if a.left != b.left || a.right != b.right {
        return Err(JoiningError::SystemMismatch);
    }
    let mut d = Rational::zero();
    for (i, row) in a.weights.iter().enumerate() {
        for (j, w) in row.iter().enumerate() {
            let diff = (w - &b.weights[i][j]).abs();
            if !diff.is_zero() {
                d += diff * two_pow_neg(i + j + 2);
            }
        }
    }
    Ok(d)
}

/// Ergodic ⟺ the support is a single orbit of `T × S`. (Invariance already
/// makes a coupling constant on each orbit, so no separate uniformity check
/// is needed.)
pub fn is_ergodic_joining(coupling: &Coupling) -> bool {
    support_orbit_count(coupling) == 1
}

fn support_orbit_count(coupling: &Coupling) -> usize {
    product_orbits(&coupling.left, &coupling.right)
        .iter()
        .filter(|orbit| {
            let (x, y) = orbit[0];
            !coupling.weights[x][y].is_zero()
        })
        .count()
}

/// One ergodic piece of a coupling: an invariant probability measure that is
/// uniform on a single product orbit.
///
/// Its marginals need not be `μ` and `ν` (they are whenever both systems are
/// ergodic), so the matrix is kept raw; [`ErgodicComponent::try_coupling`]
/// upgrades it when the marginals do match.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ErgodicComponent {
    pub weight: Rational,
    pub matrix: Vec<Vec<Rational>>,
}

impl ErgodicComponent {
    pub fn try_coupling(
        &self,
        left: &FiniteSystem,
        right: &FiniteSystem,
    ) -> Result<Coupling, JoiningError> {
        validate_joining(left, right, self.matrix.clone())
    }
}

/// Exact decomposition of a coupling into its ergodic components, one per
/// orbit meeting the support.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ErgodicDecomposition {
    components: Vec<ErgodicComponent>,
}

impl ErgodicDecomposition {
    pub fn components(&self) -> &[ErgodicComponent] {
        &self.components
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// The weighted sum of the components; equals the decomposed matrix
    /// exactly.
    pub fn reconstruct(&self) -> Vec<Vec<Rational>> {
        let rows = self.components[0].matrix.len();
        let cols = self.components[0].matrix[0].len();
        let mut out = vec![vec![Rational::zero(); cols]; rows];
        for comp in &self.components {
            for (x, row) in comp.matrix.iter().enumerate() {
                for (y, w) in row.iter().enumerate() {
                    if !w.is_zero() {
                        out[x][y] += &comp.weight * w;
                    }
                }
            }
        }
        out
    }
}

/// Splits a coupling along the orbits of `T × S`: the component for orbit `O`
/// is uniform on `O` and carries weight `λ(O)`. The weighted sum reproduces
/// the input exactly, and when both systems are ergodic every component is
/// itself an ergodic joining.
pub fn ergodic_decomposition(coupling: &Coupling) -> ErgodicDecomposition {
    let (nx, ny) = (coupling.left.size(), coupling.right.size());
    let mut components = Vec::new();
    for orbit in product_orbits(&coupling.left, &coupling.right) {
        let (x0, y0) = orbit[0];
        let cell_weight = coupling.weights[x0][y0].clone();
        if cell_weight.is_zero() {
            continue;
        }
        let len = Rational::from_integer((orbit.len() as i64).into());
        let mut matrix = vec![vec![Rational::zero(); ny]; nx];
        let uniform = Rational::one() / &len;
        for &(x, y) in &orbit {
            matrix[x][y] = uniform.clone();
        }
        components.push(ErgodicComponent {
            weight: cell_weight * len,
            matrix,
        });
    }
    ErgodicDecomposition { components }
}

/// The commutant `C(T)`: every permutation that commutes with the dynamics
/// and preserves the measure, in lexicographic order. Always contains the
/// powers of `T`.
pub fn commutant(system: &FiniteSystem, caps: &Caps) -> Result<Vec<Perm>, JoiningError> {
    let n = system.size();
    if n > caps.perm_states {
        return Err(JoiningError::BruteForceCapExceeded {
            states: n,
            cap: caps.perm_states,
        });
    }
    let t = system.perm();
    let mut out = Vec::new();
    for candidate in (0..n).permutations(n) {
        let commutes = (0..n).all(|i| candidate[t.apply(i)] == t.apply(candidate[i]));
        let preserves = (0..n).all(|i| system.mass(candidate[i]) == system.mass(i));
        if commutes && preserves {
            out.push(Perm::new(candidate).expect("permutations iterator yields permutations"));
        }
    }
    Ok(out)
}

/// The self-joining `Δ_S` for `S` in the commutant of `T`:
/// `Δ_S(A × B) = μ(A ∩ S⁻¹B)`, concentrated on `{(x, Sx)}`. Ergodic whenever
/// `T` is.
pub fn self_joining_from_commutant(
    system: &FiniteSystem,
    s: &Perm,
) -> Result<Coupling, JoiningError> {
    let n = system.size();
    let t = system.perm();
    let in_commutant = s.len() == n
        && (0..n).all(|i| s.apply(t.apply(i)) == t.apply(s.apply(i)))
        && (0..n).all(|i| system.mass(s.apply(i)) == system.mass(i));
    if !in_commutant {
        return Err(JoiningError::NotInCommutant);
    }
    let mut weights = vec![vec![Rational::zero(); n]; n];
    for x in 0..n {
        weights[x][s.apply(x)] = system.mass(x).clone();
    }
    validate_joining(system, system, weights)
}

/// What the support of a coupling looks like as a relation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GraphStructure {
    /// Each row meets the support once: the coupling is `Δ_π` for this
    /// factor map.
    FactorGraph(FactorMap),
    /// Rows and columns both meet the support once: `Δ_φ` for an
    /// isomorphism.
    IsomorphismGraph(FactorMap),
    NotAGraph,
}

/// Classifies a coupling by its support: the graph of a factor map, the
/// graph of an isomorphism, or neither. A single-supported row pattern
/// always induces a genuine factor map (marginals give the pushforward,
/// invariance gives equivariance), so the returned map is validated, not
/// merely read off.
pub fn detect_graph_structure(coupling: &Coupling) -> GraphStructure {
    let (nx, ny) = (coupling.left.size(), coupling.right.size());
    let mut map = Vec::with_capacity(nx);
    for x in 0..nx {
        let hits: Vec<usize> = (0..ny)
            .filter(|&y| !coupling.weights[x][y].is_zero())
            .collect();
        match hits.as_slice() {
            [y] => map.push(*y),
            _ => return GraphStructure::NotAGraph,
        }
    }
    let pi = FactorMap::new(coupling.left.clone(), coupling.right.clone(), map.clone())
        .expect("single-supported rows of a joining always induce a factor map");
    let mut seen = vec![false; ny];
    let injective = map.iter().all(|&y| !std::mem::replace(&mut seen[y], true));
    if injective && nx == ny {
        GraphStructure::IsomorphismGraph(pi)
    } else {
        GraphStructure::FactorGraph(pi)
    }
}

/// Searches for an isomorphism between two systems.
///
/// For ergodic systems the vertices of the joining polytope contain every
/// ergodic joining, and an isomorphism exists exactly when one of them is
/// supported on the graph of a bijection; otherwise falls back to direct
/// backtracking over measure-preserving equivariant bijections.
pub fn find_isomorphism(
    left: &FiniteSystem,
    right: &FiniteSystem,
    caps: &Caps,
) -> Result<Option<Vec<usize>>, JoiningError> {
    if left.is_ergodic() && right.is_ergodic() {
        let polytope = crate::polytope::joining_polytope(left, right);
        for vertex in polytope.enumerate_vertices(caps)? {
            if let GraphStructure::IsomorphismGraph(pi) = detect_graph_structure(&vertex) {
                return Ok(Some(pi.map().to_vec()));
            }
        }
        Ok(None)
    } else {
        let n = left.size().max(right.size());
        if n > caps.perm_states {
            return Err(JoiningError::BruteForceCapExceeded {
                states: n,
                cap: caps.perm_states,
            });
        }
        Ok(isomorphisms(left, right).into_iter().next())
    }
}

/// All isomorphisms `ψ : left → right` (equivariant measure-preserving
/// bijections), in lexicographic order of the map. Backtracks over cycle
/// representatives, so it stays cheap even when `n!` would not.
pub fn isomorphisms(left: &FiniteSystem, right: &FiniteSystem) -> Vec<Vec<usize>> {
    if left.size() != right.size() {
        return Vec::new();
    }
    let n = left.size();
    let cycles = left.perm().cycles();
    let mut used = vec![false; n];
    let mut map = vec![usize::MAX; n];
    let mut found = Vec::new();
    backtrack_iso(left, right, &cycles, 0, &mut used, &mut map, &mut found);
    found.sort_unstable();
    found
}

fn backtrack_iso(
    left: &FiniteSystem,
    right: &FiniteSystem,
    cycles: &[Vec<usize>],
    idx: usize,
    used: &mut Vec<bool>,
    map: &mut Vec<usize>,
    found: &mut Vec<Vec<usize>>,
) {
    if idx == cycles.len() {
        found.push(map.clone());
        return;
    }
    let cycle = &cycles[idx];
    'candidates: for target in 0..right.size() {
        if used[target] {
            continue;
        }
        // ψ(T^i r) = S^i ψ(r) forces the whole cycle; check length, measure
        // and disjointness as we go.
        let mut images = Vec::with_capacity(cycle.len());
        let mut y = target;
        for (step, &x) in cycle.iter().enumerate() {
            if used[y]
                || images.contains(&y)
                || left.mass(x) != right.mass(y)
                || (step > 0 && y == target)
            {
                continue 'candidates;
            }
            images.push(y);
            y = right.apply(y);
        }
        if y != target {
            // right cycle longer than the left one
            continue;
        }
        for (&x, &img) in cycle.iter().zip(&images) {
            map[x] = img;
            used[img] = true;
        }
        backtrack_iso(left, right, cycles, idx + 1, used, map, found);
        for &img in &images {
            used[img] = false;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, ProbVector};

    fn two_cycle() -> FiniteSystem {
        FiniteSystem::cycle(2)
    }

    #[test]
    fn product_of_one_point_systems() {
        let p = product_joining(&FiniteSystem::one_point(), &FiniteSystem::one_point());
        assert_eq!(p.weights(), &[vec![rat(1, 1)]]);
    }

    #[test]
    fn product_of_uniform_cycles_is_uniform() {
        let p = product_joining(&two_cycle(), &two_cycle());
        assert!(p.weights().iter().flatten().all(|w| *w == rat(1, 4)));
        let p = product_joining(&two_cycle(), &FiniteSystem::cycle(3));
        assert!(p.weights().iter().flatten().all(|w| *w == rat(1, 6)));
    }

    #[test]
    fn diagonal_between_two_cycles_is_a_joining() {
        // Δ_Id: T×S maps (0,0) ↔ (1,1)
        let w = vec![vec![rat(1, 2), rat(0, 1)], vec![rat(0, 1), rat(1, 2)]];
        assert!(validate_joining(&two_cycle(), &two_cycle(), w).is_ok());
    }

    #[test]
    fn diagonal_between_cycle_and_identity_is_not_invariant() {
        let id2 = FiniteSystem::identity_with(ProbVector::uniform(2)).unwrap();
        let w = vec![vec![rat(1, 2), rat(0, 1)], vec![rat(0, 1), rat(1, 2)]];
        let err = validate_joining(&two_cycle(), &id2, w).unwrap_err();
        match err {
            JoiningError::InvalidJoining(violations) => {
                assert!(violations
                    .iter()
                    .any(|v| matches!(v, JoiningViolation::NotInvariant { .. })));
            }
            other => panic!("expected invariance violation, got {other:?}"),
        }
    }

    #[test]
    fn validation_reports_every_violation() {
        let w = vec![vec![rat(2, 1), rat(-1, 2)], vec![rat(0, 1), rat(0, 1)]];
        let err = validate_joining(&two_cycle(), &two_cycle(), w).unwrap_err();
        let JoiningError::InvalidJoining(violations) = err else {
            panic!("expected InvalidJoining");
        };
        assert!(violations.len() >= 3);
    }

    #[test]
    fn graph_joining_of_identity_is_diagonal() {
        let t = two_cycle();
        let d = graph_joining(&FactorMap::identity(&t));
        assert_eq!(
            d.weights(),
            &[vec![rat(1, 2), rat(0, 1)], vec![rat(0, 1), rat(1, 2)]]
        );
    }

    #[test]
    fn graph_joining_of_trivial_factor_is_the_measure_column() {
        let t = FiniteSystem::cycle(3);
        let d = graph_joining(&FactorMap::to_one_point(&t));
        assert_eq!(
            d.weights(),
            &[vec![rat(1, 3)], vec![rat(1, 3)], vec![rat(1, 3)]]
        );
    }

    #[test]
    fn graph_joining_of_parity_map() {
        let four = FiniteSystem::cycle(4);
        let two = two_cycle();
        let pi = FactorMap::new(four, two, vec![0, 1, 0, 1]).unwrap();
        let d = graph_joining(&pi);
        for x in 0..4 {
            for y in 0..2 {
                let expect = if x % 2 == y { rat(1, 4) } else { rat(0, 1) };
                assert_eq!(*d.weight(x, y), expect);
            }
        }
    }

    #[test]
    fn metric_of_equal_couplings_is_zero() {
        let p = product_joining(&two_cycle(), &two_cycle());
        assert_eq!(joining_metric(&p, &p).unwrap(), rat(0, 1));
    }

    #[test]
    fn metric_between_the_two_cycle_graph_joinings() {
        let t = two_cycle();
        let id = graph_joining(&FactorMap::identity(&t));
        let flip = self_joining_from_commutant(&t, t.perm()).unwrap();
        // each cell differs by 1/2, weights 1/4+1/8+1/8+1/16 = 9/16
        assert_eq!(joining_metric(&id, &flip).unwrap(), rat(9, 32));
        let p = product_joining(&t, &t);
        assert_eq!(joining_metric(&p, &id).unwrap(), rat(9, 64));
    }

    #[test]
    fn metric_rejects_mismatched_systems() {
        let p = product_joining(&two_cycle(), &two_cycle());
        let q = product_joining(&two_cycle(), &FiniteSystem::cycle(3));
        assert!(matches!(
            joining_metric(&p, &q),
            Err(JoiningError::SystemMismatch)
        ));
    }

    #[test]
    fn ergodicity_of_couplings() {
        let t = two_cycle();
        let id = graph_joining(&FactorMap::identity(&t));
        assert!(is_ergodic_joining(&id));
        assert!(!is_ergodic_joining(&product_joining(&t, &t)));
        let s = FiniteSystem::cycle(5);
        let p = product_joining(&FiniteSystem::one_point(), &s);
        assert!(is_ergodic_joining(&p));
    }

    #[test]
    fn decomposition_of_the_product_on_the_two_cycle_pair() {
        let t = two_cycle();
        let p = product_joining(&t, &t);
        let d = ergodic_decomposition(&p);
        assert_eq!(d.len(), 2);
        for comp in d.components() {
            assert_eq!(comp.weight, rat(1, 2));
            let c = comp.try_coupling(&t, &t).unwrap();
            assert!(is_ergodic_joining(&c));
        }
        assert_eq!(d.reconstruct(), p.weights());
    }

    #[test]
    fn decomposition_of_an_ergodic_coupling_is_itself() {
        let t = two_cycle();
        let id = graph_joining(&FactorMap::identity(&t));
        let d = ergodic_decomposition(&id);
        assert_eq!(d.len(), 1);
        assert_eq!(d.components()[0].matrix, id.weights());
        assert_eq!(d.components()[0].weight, rat(1, 1));
    }

    #[test]
    fn decomposition_over_a_nonergodic_side_has_off_marginal_components() {
        let id2 = FiniteSystem::identity_with(ProbVector::uniform(2)).unwrap();
        let t = two_cycle();
        let p = product_joining(&id2, &t);
        let d = ergodic_decomposition(&p);
        // rows {0}×Y and {1}×Y, weight 1/2 each; not couplings of (μ, ν)
        assert_eq!(d.len(), 2);
        for comp in d.components() {
            assert_eq!(comp.weight, rat(1, 2));
            assert!(comp.try_coupling(&id2, &t).is_err());
        }
        assert_eq!(d.reconstruct(), p.weights());
    }

    #[test]
    fn commutant_of_a_five_cycle_is_its_powers() {
        let t = FiniteSystem::cycle(5);
        let c = commutant(&t, &Caps::default()).unwrap();
        assert_eq!(c.len(), 5);
        for k in 0..5 {
            assert!(c.contains(&t.perm().pow(k)));
        }
    }

    #[test]
    fn commutant_of_identity_depends_on_the_measure() {
        let id2 = FiniteSystem::identity_with(ProbVector::uniform(2)).unwrap();
        assert_eq!(commutant(&id2, &Caps::default()).unwrap().len(), 2);
        let skew = FiniteSystem::from_parts(vec![0, 1], vec![rat(1, 3), rat(2, 3)]).unwrap();
        let c = commutant(&skew, &Caps::default()).unwrap();
        assert_eq!(c, vec![Perm::identity(2)]);
    }

    #[test]
    fn commutant_respects_the_cap() {
        let t = FiniteSystem::cycle(9);
        assert!(matches!(
            commutant(&t, &Caps::default()),
            Err(JoiningError::BruteForceCapExceeded { states: 9, cap: 8 })
        ));
    }

    #[test]
    fn self_joinings_from_the_commutant_are_ergodic_graphs() {
        let t = FiniteSystem::cycle(3);
        for k in 0..3 {
            let d = self_joining_from_commutant(&t, &t.perm().pow(k)).unwrap();
            assert!(is_ergodic_joining(&d));
        }
        // Δ_T on the 3-cycle: μ(A ∩ T⁻¹B) puts mass at (x, x+1)
        let d = self_joining_from_commutant(&t, t.perm()).unwrap();
        for x in 0..3 {
            assert_eq!(*d.weight(x, (x + 1) % 3), rat(1, 3));
        }
    }

    #[test]
    fn non_commuting_permutation_is_rejected() {
        let t = FiniteSystem::cycle(3);
        let swap = Perm::new(vec![1, 0, 2]).unwrap();
        assert!(matches!(
            self_joining_from_commutant(&t, &swap),
            Err(JoiningError::NotInCommutant)
        ));
    }

    #[test]
    fn graph_detection_round_trips() {
        let four = FiniteSystem::cycle(4);
        let two = two_cycle();
        let pi = FactorMap::new(four.clone(), two, vec![0, 1, 0, 1]).unwrap();
        match detect_graph_structure(&graph_joining(&pi)) {
            GraphStructure::FactorGraph(found) => assert_eq!(found.map(), pi.map()),
            other => panic!("expected a factor graph, got {other:?}"),
        }
        let id = FactorMap::identity(&four);
        assert!(matches!(
            detect_graph_structure(&graph_joining(&id)),
            GraphStructure::IsomorphismGraph(_)
        ));
        assert!(matches!(
            detect_graph_structure(&product_joining(&two_cycle(), &two_cycle())),
            GraphStructure::NotAGraph
        ));
    }

    #[test]
    fn isomorphisms_between_three_cycles_are_the_rotations() {
        let t = FiniteSystem::cycle(3);
        let isos = isomorphisms(&t, &t);
        assert_eq!(isos.len(), 3);
        let found = find_isomorphism(&t, &t, &Caps::default()).unwrap();
        assert!(found.is_some());
    }

    #[test]
    fn no_isomorphism_across_sizes_or_structures() {
        let two = two_cycle();
        let three = FiniteSystem::cycle(3);
        assert_eq!(find_isomorphism(&two, &three, &Caps::default()).unwrap(), None);
        let id2 = FiniteSystem::identity_with(ProbVector::uniform(2)).unwrap();
        assert_eq!(find_isomorphism(&two, &id2, &Caps::default()).unwrap(), None);
        // non-ergodic fallback: two identity systems with matching measures
        let skew = FiniteSystem::from_parts(vec![0, 1], vec![rat(1, 3), rat(2, 3)]).unwrap();
        let iso = find_isomorphism(&skew, &skew, &Caps::default()).unwrap();
        assert_eq!(iso, Some(vec![0, 1]));
    }
}
