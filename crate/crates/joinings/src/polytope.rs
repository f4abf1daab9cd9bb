//! The joining polytope `J(T, S)` and its vertex enumeration.
//!
//! Invariance under `T × S` makes every joining constant on the product
//! orbits, so the polytope is parameterized by one value per orbit, subject
//! to the marginal equalities and nonnegativity. Vertices, which are the
//! ergodic joinings when both systems are ergodic, are enumerated by the
//! double description method over exact rationals, seeded from the affine
//! hull of the equality system.

use std::sync::OnceLock;

use num::{One, Signed, Zero};

use crate::coupling::{product_orbits, validate_joining, Coupling, JoiningError};
use crate::linalg;
use crate::rational::Rational;
use crate::system::FiniteSystem;
use crate::Caps;

/// One exact linear equality `Σ coeffs · w = rhs` over the flattened
/// `n_X · n_Y` cell coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearEquation {
    pub coeffs: Vec<(usize, Rational)>,
    pub rhs: Rational,
}

impl LinearEquation {
    pub fn eval(&self, flat_weights: &[Rational]) -> Rational {
        self.coeffs
            .iter()
            .map(|(i, c)| c * &flat_weights[*i])
            .sum()
    }

    pub fn is_satisfied(&self, flat_weights: &[Rational]) -> bool {
        self.eval(flat_weights) == self.rhs
    }
}

/// The set of joinings of a fixed pair of systems, held as an exact equality
/// system plus nonnegativity. Never empty: the product coupling satisfies
/// every constraint.
#[derive(Debug)]
pub struct JoiningPolytope {
    left: FiniteSystem,
    right: FiniteSystem,
    equalities: Vec<LinearEquation>,
    orbits: Vec<Vec<(usize, usize)>>,
    /// Product-coupling value on each orbit: the interior base point.
    base: Vec<Rational>,
    /// Nullspace basis of the marginal system over orbit coordinates.
    basis: Vec<Vec<Rational>>,
    vertex_cache: OnceLock<Vec<Coupling>>,
}

/// Builds the constraint system for `J(T, S)`: row and column marginal
/// equalities plus one representative invariance equation per orbit edge.
pub fn joining_polytope(left: &FiniteSystem, right: &FiniteSystem) -> JoiningPolytope {
    let (nx, ny) = (left.size(), right.size());
    let orbits = product_orbits(left, right);

    let mut equalities = Vec::new();
    for x in 0..nx {
        equalities.push(LinearEquation {
            coeffs: (0..ny).map(|y| (x * ny + y, Rational::one())).collect(),
            rhs: left.mass(x).clone(),
        });
    }
    for y in 0..ny {
        equalities.push(LinearEquation {
            coeffs: (0..nx).map(|x| (x * ny + y, Rational::one())).collect(),
            rhs: right.mass(y).clone(),
        });
    }
    for orbit in &orbits {
        for pair in orbit.windows(2) {
            let (ax, ay) = pair[0];
            let (bx, by) = pair[1];
            equalities.push(LinearEquation {
                coeffs: vec![
                    (bx * ny + by, Rational::one()),
                    (ax * ny + ay, -Rational::one()),
                ],
                rhs: Rational::zero(),
            });
        }
    }

    // Marginal system over one coordinate per orbit. Row x of the grid meets
    // orbit o in `count` cells, each carrying the orbit value.
    let g = orbits.len();
    let mut marginal_rows: Vec<Vec<Rational>> = Vec::with_capacity(nx + ny);
    for x in 0..nx {
        let mut row = vec![Rational::zero(); g];
        for (o, orbit) in orbits.iter().enumerate() {
            let count = orbit.iter().filter(|&&(cx, _)| cx == x).count();
            row[o] = Rational::from_integer((count as i64).into());
        }
        marginal_rows.push(row);
    }
    for y in 0..ny {
        let mut row = vec![Rational::zero(); g];
        for (o, orbit) in orbits.iter().enumerate() {
            let count = orbit.iter().filter(|&&(_, cy)| cy == y).count();
            row[o] = Rational::from_integer((count as i64).into());
        }
        marginal_rows.push(row);
    }
    let basis = linalg::nullspace(&marginal_rows, g);

    let base = orbits
        .iter()
        .map(|orbit| {
            let (x, y) = orbit[0];
            left.mass(x) * right.mass(y)
        })
        .collect();

    JoiningPolytope {
        left: left.clone(),
        right: right.clone(),
        equalities,
        orbits,
        base,
        basis,
        vertex_cache: OnceLock::new(),
    }
}

impl JoiningPolytope {
    pub fn left(&self) -> &FiniteSystem {
        &self.left
    }

    pub fn right(&self) -> &FiniteSystem {
        &self.right
    }

    pub fn equalities(&self) -> &[LinearEquation] {
        &self.equalities
    }

    pub fn orbits(&self) -> &[Vec<(usize, usize)>] {
        &self.orbits
    }

    /// Affine dimension of the polytope. The product coupling is strictly
    /// positive, so the polytope is full-dimensional inside the affine hull
    /// of the equality system.
    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    fn cells(&self) -> usize {
        self.left.size() * self.right.size()
    }

    fn expand(&self, orbit_values: &[Rational]) -> Vec<Vec<Rational>> {
        let mut weights = vec![vec![Rational::zero(); self.right.size()]; self.left.size()];
        for (orbit, value) in self.orbits.iter().zip(orbit_values) {
            for &(x, y) in orbit {
                weights[x][y] = value.clone();
            }
        }
        weights
    }

    fn orbit_point(&self, t: &[Rational]) -> Vec<Rational> {
        (0..self.orbits.len())
            .map(|o| {
                let mut v = self.base[o].clone();
                for (k, coeff) in t.iter().enumerate() {
                    if !coeff.is_zero() {
                        v += coeff * &self.basis[k][o];
                    }
                }
                v
            })
            .collect()
    }

    /// Complete, duplicate-free, canonically ordered list of extreme points,
    /// each validated as a joining. Results are cached; the cache is
    /// write-once and schedule-independent.
    pub fn enumerate_vertices(&self, caps: &Caps) -> Result<Vec<Coupling>, JoiningError> {
        if self.cells() > caps.cells {
            return Err(JoiningError::DimensionCapExceeded {
                cells: self.cells(),
                cap: caps.cells,
            });
        }
        if let Some(cached) = self.vertex_cache.get() {
            return Ok(cached.clone());
        }
        let d = self.dimension();
        let points: Vec<Vec<Rational>> = if d == 0 {
            vec![self.base.clone()]
        } else {
            // each orbit coordinate must stay nonnegative: basis_row · t + base ≥ 0
            let rows: Vec<Vec<Rational>> = (0..self.orbits.len())
                .map(|o| {
                    let mut row: Vec<Rational> =
                        (0..d).map(|k| self.basis[k][o].clone()).collect();
                    row.push(self.base[o].clone());
                    row
                })
                .collect();
            dd_rays(&rows, d)
                .into_iter()
                .map(|t| self.orbit_point(&t))
                .collect()
        };
        let mut vertices: Vec<Coupling> = points
            .into_iter()
            .map(|v| {
                validate_joining(&self.left, &self.right, self.expand(&v))
                    .expect("polytope vertices satisfy every joining constraint")
            })
            .collect();
        vertices.sort_by(|a, b| a.cmp_weights(b));
        vertices.dedup();
        let _ = self.vertex_cache.set(vertices.clone());
        Ok(vertices)
    }
}

/// Disjoint ⟺ the product measure is the only joining ⟺ the polytope is
/// zero-dimensional (it always contains the strictly positive product
/// coupling in its relative interior).
pub fn is_disjoint(
    left: &FiniteSystem,
    right: &FiniteSystem,
    caps: &Caps,
) -> Result<bool, JoiningError> {
    let cells = left.size() * right.size();
    if cells > caps.cells {
        return Err(JoiningError::DimensionCapExceeded {
            cells,
            cap: caps.cells,
        });
    }
    Ok(joining_polytope(left, right).dimension() == 0)
}

// ---------------------------------------------------------------------------
// Double description over exact rationals.
//
// Input: m halfspaces `a·t + c ≥ 0` given as rows `(a | c)` of length d+1,
// describing a bounded polytope with nonempty interior. Work happens on the
// homogenization cone {(t, s) : a·t + c·s ≥ 0, s ≥ 0}; the extreme rays all
// end with s > 0 and dehomogenize to the vertices.

#[derive(Debug, Clone)]
struct BitSet(Vec<u64>);

impl BitSet {
    fn new(len: usize) -> Self {
        BitSet(vec![0; len.div_ceil(64)])
    }

    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    fn intersection(&self, other: &BitSet) -> BitSet {
        BitSet(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a & b)
                .collect(),
        )
    }

    fn is_subset_of(&self, other: &BitSet) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a & !b == 0)
    }
}

#[derive(Debug, Clone)]
struct Ray {
    vec: Vec<Rational>,
    active: BitSet,
}

/// Scales to the primitive integer representative of the ray (positive
/// multiple only, so orientation inside the cone is preserved).
fn canonicalize(vec: &mut [Rational]) {
    use num::bigint::BigInt;
    use num::Integer;
    let mut l = BigInt::one();
    for x in vec.iter() {
        l = l.lcm(x.denom());
    }
    let mut g = BigInt::zero();
    let scaled: Vec<BigInt> = vec
        .iter()
        .map(|x| {
            let n = x.numer() * (&l / x.denom());
            g = g.gcd(&n);
            n
        })
        .collect();
    if g.is_zero() {
        return;
    }
    for (slot, n) in vec.iter_mut().zip(scaled) {
        *slot = Rational::from_integer(n / &g);
    }
}

fn dot(row: &[Rational], vec: &[Rational]) -> Rational {
    row.iter()
        .zip(vec)
        .filter(|(r, v)| !r.is_zero() && !v.is_zero())
        .map(|(r, v)| r * v)
        .sum()
}

fn dd_rays(rows: &[Vec<Rational>], d: usize) -> Vec<Vec<Rational>> {
    let m = rows.len();
    let total_constraints = m + 1; // +1 for the homogenization halfspace s ≥ 0
    let s_row: Vec<Rational> = (0..=d)
        .map(|i| {
            if i == d {
                Rational::one()
            } else {
                Rational::zero()
            }
        })
        .collect();

    // Seed: d rows with independent gradients, plus s ≥ 0, form a simplicial
    // cone whose rays are the columns of the inverse constraint matrix.
    let mut chosen: Vec<usize> = Vec::with_capacity(d);
    let mut elim: Vec<Vec<Rational>> = Vec::new();
    for (i, row) in rows.iter().enumerate() {
        if chosen.len() == d {
            break;
        }
        let mut v = row[..d].to_vec();
        for b in &elim {
            let p = b.iter().position(|x| !x.is_zero()).unwrap();
            if !v[p].is_zero() {
                let f = v[p].clone() / b[p].clone();
                for (slot, bx) in v.iter_mut().zip(b) {
                    *slot -= &f * bx;
                }
            }
        }
        if v.iter().any(|x| !x.is_zero()) {
            elim.push(v);
            chosen.push(i);
        }
    }
    assert_eq!(
        chosen.len(),
        d,
        "constraint gradients must span the parameter space"
    );

    let mut seed: Vec<Vec<Rational>> = chosen.iter().map(|&i| rows[i].clone()).collect();
    seed.push(s_row.clone());
    let inverse = linalg::invert(&seed).expect("seed constraint matrix is invertible");

    let constraint_row = |c: usize| -> &[Rational] {
        if c == m {
            &s_row
        } else {
            &rows[c]
        }
    };

    let mut processed: Vec<usize> = chosen.clone();
    processed.push(m);

    let mut rays: Vec<Ray> = (0..=d)
        .map(|j| {
            let mut vec: Vec<Rational> = (0..=d).map(|i| inverse[i][j].clone()).collect();
            canonicalize(&mut vec);
            let mut active = BitSet::new(total_constraints);
            for &c in &processed {
                if dot(constraint_row(c), &vec).is_zero() {
                    active.set(c);
                }
            }
            Ray { vec, active }
        })
        .collect();

    for h in 0..m {
        if chosen.contains(&h) {
            continue;
        }
        let dots: Vec<Rational> = rays.iter().map(|r| dot(&rows[h], &r.vec)).collect();
        let mut pos = Vec::new();
        let mut zero = Vec::new();
        let mut neg = Vec::new();
        for (i, v) in dots.iter().enumerate() {
            if v.is_zero() {
                zero.push(i);
            } else if v.is_positive() {
                pos.push(i);
            } else {
                neg.push(i);
            }
        }
        if neg.is_empty() {
            for &i in &zero {
                rays[i].active.set(h);
            }
            processed.push(h);
            continue;
        }
        // the homogenization point (0, 1) satisfies every constraint
        // strictly, so the cone always keeps rays on the positive side
        assert!(!pos.is_empty(), "lost the strictly feasible interior point");

        let mut next: Vec<Ray> = Vec::with_capacity(pos.len() + zero.len());
        for &i in &pos {
            next.push(rays[i].clone());
        }
        for &i in &zero {
            let mut r = rays[i].clone();
            r.active.set(h);
            next.push(r);
        }
        for &ip in &pos {
            for &ineg in &neg {
                let common = rays[ip].active.intersection(&rays[ineg].active);
                let blocked = rays.iter().enumerate().any(|(k, other)| {
                    k != ip && k != ineg && common.is_subset_of(&other.active)
                });
                if blocked {
                    continue;
                }
                // positive combination landing on the hyperplane h = 0
                let mut vec: Vec<Rational> = rays[ineg]
                    .vec
                    .iter()
                    .zip(&rays[ip].vec)
                    .map(|(vn, vp)| &dots[ip] * vn - &dots[ineg] * vp)
                    .collect();
                canonicalize(&mut vec);
                let mut active = common;
                active.set(h);
                next.push(Ray { vec, active });
            }
        }
        rays = next;
        processed.push(h);
    }

    rays.into_iter()
        .map(|r| {
            let s = r.vec[d].clone();
            assert!(
                s.is_positive(),
                "bounded polytope: every extreme ray dehomogenizes"
            );
            r.vec[..d].iter().map(|x| x / &s).collect()
        })
        .collect()
}
