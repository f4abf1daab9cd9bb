//! Long-run statistics: cylinder calculus on stationary Markov shifts
//! (mixing, multiple mixing, multiple recurrence) and orbit averages on
//! finite systems (empirical joinings, mixed Birkhoff averages).
//!
//! Cylinders are anchored at coordinate 0: the set of sequences whose block
//! `x_0 … x_{ℓ−1}` lies in a given word list. `T^{-n}B` moves the anchor to
//! position `n`, so intersections like `μ(A ∩ T^{-n}B ∩ T^{-(n+m)}C)` become
//! exact path sums: overlapping windows are merged symbol-by-symbol and gaps
//! are bridged by transition-matrix powers.
//!
//! Everything is generic over [`Scalar`]: run exact rationals by default,
//! `f64` for long horizons.

use std::collections::BTreeSet;

use itertools::Itertools;
use num::integer::gcd;
use thiserror::Error;

use crate::coupling::{validate_joining, Coupling};
use crate::linalg;
use crate::rational::{rat, Rational};
use crate::scalar::Scalar;
use crate::system::FiniteSystem;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MarkovError {
    #[error("transition matrix must be square and nonempty")]
    BadShape,
    #[error("transition row {row} does not sum to 1")]
    RowNotStochastic { row: usize },
    #[error("negative transition entry at ({row}, {col})")]
    NegativeEntry { row: usize, col: usize },
    #[error("supplied stationary vector is not stationary for the transition matrix")]
    NotStationary,
    #[error("stationary vector is not unique (chain is reducible); supply one explicitly")]
    StationaryNotUnique,
    #[error("stationary vector has nonpositive entries")]
    StationaryNotPositive,
    #[error("chain is reducible")]
    Reducible,
    #[error("cylinder words must share one length")]
    RaggedWords,
    #[error("cylinder word uses symbol {symbol}, alphabet has {alphabet} letters")]
    SymbolOutOfRange { symbol: usize, alphabet: usize },
    #[error("cylinder set needs at least one word")]
    EmptyCylinder,
}

/// A stationary Markov shift: an `m × m` stochastic matrix together with a
/// strictly positive stationary row vector.
#[derive(Debug, Clone, PartialEq)]
pub struct MarkovShift<W: Scalar> {
    transition: Vec<Vec<W>>,
    stationary: Vec<W>,
}

impl<W: Scalar> MarkovShift<W> {
    /// Validates the transition matrix (rows sum to 1, entries ≥ 0) and the
    /// stationary vector; when no vector is supplied it is solved for and
    /// must be unique, which holds exactly for irreducible chains.
    pub fn new(
        transition: Vec<Vec<W>>,
        stationary: Option<Vec<W>>,
    ) -> Result<Self, MarkovError> {
        let m = transition.len();
        if m == 0 || transition.iter().any(|row| row.len() != m) {
            return Err(MarkovError::BadShape);
        }
        for (i, row) in transition.iter().enumerate() {
            for (j, p) in row.iter().enumerate() {
                if *p < W::zero() && !p.is_negligible() {
                    return Err(MarkovError::NegativeEntry { row: i, col: j });
                }
            }
            let sum = row.iter().fold(W::zero(), |acc, p| acc + p.clone());
            if !(sum - W::one()).is_negligible() {
                return Err(MarkovError::RowNotStochastic { row: i });
            }
        }
        let stationary = match stationary {
            Some(pi) => {
                if pi.len() != m {
                    return Err(MarkovError::BadShape);
                }
                let sum = pi.iter().fold(W::zero(), |acc, p| acc + p.clone());
                if !(sum - W::one()).is_negligible() {
                    return Err(MarkovError::NotStationary);
                }
                for j in 0..m {
                    let image = (0..m).fold(W::zero(), |acc, i| {
                        acc + pi[i].clone() * transition[i][j].clone()
                    });
                    if !(image - pi[j].clone()).is_negligible() {
                        return Err(MarkovError::NotStationary);
                    }
                }
                pi
            }
            None => solve_stationary(&transition)?,
        };
        if stationary
            .iter()
            .any(|p| p.is_negligible() || *p < W::zero())
        {
            return Err(MarkovError::StationaryNotPositive);
        }
        Ok(MarkovShift {
            transition,
            stationary,
        })
    }

    /// The i.i.d. (Bernoulli) shift with the given letter distribution.
    pub fn bernoulli(law: Vec<W>) -> Result<Self, MarkovError> {
        let rows = vec![law.clone(); law.len()];
        MarkovShift::new(rows, Some(law))
    }

    pub fn alphabet_size(&self) -> usize {
        self.transition.len()
    }

    pub fn transition(&self) -> &[Vec<W>] {
        &self.transition
    }

    pub fn stationary(&self) -> &[W] {
        &self.stationary
    }

    fn adjacency(&self) -> Vec<Vec<usize>> {
        self.transition
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|(_, p)| !p.is_negligible())
                    .map(|(j, _)| j)
                    .collect()
            })
            .collect()
    }

    /// Strong connectivity of the positive-transition digraph.
    pub fn is_irreducible(&self) -> bool {
        let adj = self.adjacency();
        let m = self.alphabet_size();
        let mut reverse = vec![Vec::new(); m];
        for (u, outs) in adj.iter().enumerate() {
            for &v in outs {
                reverse[v].push(u);
            }
        }
        covers_all(&adj) && covers_all(&reverse)
    }

    /// Period of an irreducible chain: the gcd of its cycle lengths,
    /// computed from BFS level differences. `None` when reducible.
    pub fn period(&self) -> Option<usize> {
        if !self.is_irreducible() {
            return None;
        }
        let adj = self.adjacency();
        let m = self.alphabet_size();
        let mut level = vec![usize::MAX; m];
        level[0] = 0;
        let mut queue = std::collections::VecDeque::from([0usize]);
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                if level[v] == usize::MAX {
                    level[v] = level[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        let mut g: i64 = 0;
        for u in 0..m {
            for &v in &adj[u] {
                g = gcd(g, (level[u] as i64 + 1 - level[v] as i64).abs());
            }
        }
        Some(g as usize)
    }

    pub fn is_aperiodic(&self) -> bool {
        self.period() == Some(1)
    }

    /// Modulus of the second-largest transition eigenvalue, the geometric
    /// decay rate certificate. Computed in `f64` regardless of the scalar
    /// mode; the exactness-bearing quantities are the correlations
    /// themselves.
    pub fn spectral_certificate(&self) -> f64 {
        let m = self.alphabet_size();
        if m == 1 {
            return 0.0;
        }
        let a = nalgebra::DMatrix::from_fn(m, m, |i, j| self.transition[i][j].to_f64());
        let mut moduli: Vec<f64> = a.complex_eigenvalues().iter().map(|c| c.norm()).collect();
        moduli.sort_by(|x, y| y.partial_cmp(x).unwrap());
        moduli[1]
    }
}

/// Every state reachable from state 0.
fn covers_all(adjacency: &[Vec<usize>]) -> bool {
    let mut seen = vec![false; adjacency.len()];
    let mut stack = vec![0usize];
    seen[0] = true;
    while let Some(u) = stack.pop() {
        for &v in &adjacency[u] {
            if !seen[v] {
                seen[v] = true;
                stack.push(v);
            }
        }
    }
    seen.into_iter().all(|s| s)
}

fn solve_stationary<W: Scalar>(transition: &[Vec<W>]) -> Result<Vec<W>, MarkovError> {
    let m = transition.len();
    // πP = π ⟺ rows (over unknown π): Σ_i π_i (P[i][j] − δ_ij) = 0
    let rows: Vec<Vec<W>> = (0..m)
        .map(|j| {
            (0..m)
                .map(|i| {
                    let mut v = transition[i][j].clone();
                    if i == j {
                        v = v - W::one();
                    }
                    v
                })
                .collect()
        })
        .collect();
    let basis = linalg::nullspace(&rows, m);
    if basis.len() != 1 {
        return Err(MarkovError::StationaryNotUnique);
    }
    let sum = basis[0].iter().fold(W::zero(), |acc, p| acc + p.clone());
    if sum.is_negligible() {
        return Err(MarkovError::StationaryNotPositive);
    }
    Ok(basis[0].iter().map(|p| p.clone() / sum.clone()).collect())
}

/// A finite union of cylinders: equal-length words over the shift alphabet,
/// anchored at coordinate 0. Words are deduplicated and kept sorted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CylinderSet {
    words: Vec<Vec<usize>>,
    length: usize,
}

impl CylinderSet {
    pub fn new(alphabet_size: usize, words: Vec<Vec<usize>>) -> Result<Self, MarkovError> {
        if words.is_empty() {
            return Err(MarkovError::EmptyCylinder);
        }
        let length = words[0].len();
        if length == 0 || words.iter().any(|w| w.len() != length) {
            return Err(MarkovError::RaggedWords);
        }
        for word in &words {
            for &symbol in word {
                if symbol >= alphabet_size {
                    return Err(MarkovError::SymbolOutOfRange {
                        symbol,
                        alphabet: alphabet_size,
                    });
                }
            }
        }
        let mut words = words;
        words.sort_unstable();
        words.dedup();
        Ok(CylinderSet { words, length })
    }

    pub fn word_length(&self) -> usize {
        self.length
    }

    pub fn words(&self) -> &[Vec<usize>] {
        &self.words
    }
}

struct PowerCache<'a, W: Scalar> {
    base: &'a [Vec<W>],
    powers: Vec<Vec<Vec<W>>>,
}

impl<'a, W: Scalar> PowerCache<'a, W> {
    fn new(base: &'a [Vec<W>]) -> Self {
        let m = base.len();
        let identity = (0..m)
            .map(|i| {
                (0..m)
                    .map(|j| if i == j { W::one() } else { W::zero() })
                    .collect()
            })
            .collect();
        PowerCache {
            base,
            powers: vec![identity],
        }
    }

    fn entry(&mut self, k: usize, from: usize, to: usize) -> W {
        while self.powers.len() <= k {
            let prev = self.powers.last().unwrap();
            let m = self.base.len();
            let next: Vec<Vec<W>> = (0..m)
                .map(|i| {
                    (0..m)
                        .map(|j| {
                            (0..m).fold(W::zero(), |acc, l| {
                                acc + prev[i][l].clone() * self.base[l][j].clone()
                            })
                        })
                        .collect()
                })
                .collect();
            self.powers.push(next);
        }
        self.powers[k][from][to].clone()
    }
}

/// Measure of an intersection of shifted cylinder sets
/// `⋂ T^{-offset_i} A_i`, by exact path summation. Windows may overlap
/// (conflicting overlaps contribute nothing, coinciding merged patterns are
/// counted once) or leave gaps (bridged by transition powers).
pub fn joint_cylinder_measure<W: Scalar>(
    shift: &MarkovShift<W>,
    windows: &[(usize, &CylinderSet)],
) -> W {
    assert!(!windows.is_empty(), "need at least one window");
    let mut patterns: BTreeSet<Vec<(usize, usize)>> = BTreeSet::new();
    let word_lists: Vec<&[Vec<usize>]> = windows.iter().map(|(_, set)| set.words()).collect();
    'combos: for combo in word_lists
        .iter()
        .map(|words| words.iter())
        .multi_cartesian_product()
    {
        let mut pattern: Vec<(usize, usize)> = Vec::new();
        for ((offset, _), word) in windows.iter().zip(combo) {
            for (k, &symbol) in word.iter().enumerate() {
                let pos = offset + k;
                match pattern.iter().find(|(p, _)| *p == pos) {
                    Some((_, existing)) if *existing != symbol => continue 'combos,
                    Some(_) => {}
                    None => pattern.push((pos, symbol)),
                }
            }
        }
        pattern.sort_unstable();
        patterns.insert(pattern);
    }
    let mut cache = PowerCache::new(&shift.transition);
    let mut total = W::zero();
    for pattern in patterns {
        total = total + pattern_measure(shift, &pattern, &mut cache);
    }
    total
}

fn pattern_measure<W: Scalar>(
    shift: &MarkovShift<W>,
    pattern: &[(usize, usize)],
    cache: &mut PowerCache<'_, W>,
) -> W {
    let (_, first_symbol) = pattern[0];
    let mut value = shift.stationary[first_symbol].clone();
    for pair in pattern.windows(2) {
        let (p, a) = pair[0];
        let (q, b) = pair[1];
        value = value * cache.entry(q - p, a, b);
    }
    value
}

/// `μ(A)` for a union of anchored cylinders.
pub fn cylinder_measure<W: Scalar>(shift: &MarkovShift<W>, a: &CylinderSet) -> W {
    joint_cylinder_measure(shift, &[(0, a)])
}

/// `μ(A ∩ T^{-n}B)`, the basic mixing correlation.
pub fn correlation<W: Scalar>(
    shift: &MarkovShift<W>,
    a: &CylinderSet,
    b: &CylinderSet,
    n: usize,
) -> W {
    joint_cylinder_measure(shift, &[(0, a), (n, b)])
}

/// `μ(A ∩ T^{-n}B ∩ T^{-(n+m)}C)`, the 3-fold mixing statistic.
pub fn triple_correlation<W: Scalar>(
    shift: &MarkovShift<W>,
    a: &CylinderSet,
    b: &CylinderSet,
    c: &CylinderSet,
    n: usize,
    m: usize,
) -> W {
    joint_cylinder_measure(shift, &[(0, a), (n, b), (n + m, c)])
}

/// The multiple-recurrence average
/// `(1/n) Σ_{j=1..n} μ(A_0 ∩ T^{-j}A_1 ∩ ⋯ ∩ T^{-kj}A_k)`.
pub fn furstenberg_average<W: Scalar>(
    shift: &MarkovShift<W>,
    sets: &[&CylinderSet],
    n: usize,
) -> W {
    assert!(sets.len() >= 2, "need k ≥ 1 sets beyond A_0");
    assert!(n >= 1);
    let mut sum = W::zero();
    for j in 1..=n {
        let windows: Vec<(usize, &CylinderSet)> = sets
            .iter()
            .enumerate()
            .map(|(i, set)| (i * j, *set))
            .collect();
        sum = sum + joint_cylinder_measure(shift, &windows);
    }
    sum / W::from_integer(n as i64)
}

/// Correlation profile of a set pair, with the spectral decay certificate
/// and the exact mixing flag (irreducible + aperiodic).
#[derive(Debug, Clone)]
pub struct MixingReport<W: Scalar> {
    pub horizon: usize,
    /// `c_n = μ(A ∩ T^{-n}B)` for `n = 0..=horizon`.
    pub correlations: Vec<W>,
    /// `μ(A)μ(B)`, the mixing limit.
    pub target: W,
    /// Second-largest transition eigenvalue modulus.
    pub certificate: f64,
    pub aperiodic: bool,
    /// True exactly when the chain is irreducible and aperiodic.
    pub mixing: bool,
}

pub fn mixing_report<W: Scalar>(
    shift: &MarkovShift<W>,
    a: &CylinderSet,
    b: &CylinderSet,
    horizon: usize,
) -> Result<MixingReport<W>, MarkovError> {
    if !shift.is_irreducible() {
        return Err(MarkovError::Reducible);
    }
    let correlations = (0..=horizon).map(|n| correlation(shift, a, b, n)).collect();
    let target = cylinder_measure(shift, a) * cylinder_measure(shift, b);
    let aperiodic = shift.is_aperiodic();
    Ok(MixingReport {
        horizon,
        correlations,
        target,
        certificate: shift.spectral_certificate(),
        aperiodic,
        mixing: aperiodic,
    })
}

/// Result of testing `limsup μ(A ∩ T^{-n}B) ≤ θ·μ(A)μ(B)`.
#[derive(Debug, Clone)]
pub struct OrnsteinReport<W: Scalar> {
    pub target: W,
    pub bound: W,
    /// First index of the scan window, where the two cylinder windows
    /// separate.
    pub start: usize,
    pub horizon: usize,
    pub max_correlation: W,
    /// For an irreducible aperiodic chain the limsup equals the target
    /// exactly, so the finite scan certifies the verdict.
    pub tail_certified: bool,
    pub satisfied: bool,
}

pub fn ornstein_check<W: Scalar>(
    shift: &MarkovShift<W>,
    a: &CylinderSet,
    b: &CylinderSet,
    theta: &W,
    horizon: usize,
) -> Result<OrnsteinReport<W>, MarkovError> {
    if !shift.is_irreducible() {
        return Err(MarkovError::Reducible);
    }
    let start = a.word_length();
    let horizon = horizon.max(start);
    let target = cylinder_measure(shift, a) * cylinder_measure(shift, b);
    let bound = theta.clone() * target.clone();
    let mut max_correlation = correlation(shift, a, b, start);
    for n in start + 1..=horizon {
        let c = correlation(shift, a, b, n);
        if c > max_correlation {
            max_correlation = c;
        }
    }
    let tail_certified = shift.is_aperiodic();
    let satisfied =
        max_correlation <= bound && (!tail_certified || target <= bound);
    Ok(OrnsteinReport {
        target,
        bound,
        start,
        horizon,
        max_correlation,
        tail_certified,
        satisfied,
    })
}

/// The empirical occupation matrix of a joint orbit,
/// `δ_n(x, y) = (1/n) Σ_{k<n} δ_{(T^k x, S^k y)}`.
///
/// Partial-orbit averages are legitimately not joinings, so the raw matrix
/// is always returned; `coupling` carries the validated joining exactly when
/// the constraints all hold.
#[derive(Debug, Clone)]
pub struct EmpiricalJoining {
    pub matrix: Vec<Vec<Rational>>,
    pub coupling: Option<Coupling>,
}

pub fn empirical_joining(
    left: &FiniteSystem,
    right: &FiniteSystem,
    x: usize,
    y: usize,
    n: usize,
) -> EmpiricalJoining {
    assert!(n >= 1);
    let mut counts = vec![vec![0u64; right.size()]; left.size()];
    let (mut cx, mut cy) = (x, y);
    for _ in 0..n {
        counts[cx][cy] += 1;
        cx = left.apply(cx);
        cy = right.apply(cy);
    }
    let matrix: Vec<Vec<Rational>> = counts
        .into_iter()
        .map(|row| {
            row.into_iter()
                .map(|c| rat(c as i64, n as i64))
                .collect()
        })
        .collect();
    let coupling = validate_joining(left, right, matrix.clone()).ok();
    EmpiricalJoining { matrix, coupling }
}

/// A finite mixed Birkhoff average `(1/N) Σ f(T^n x) g(S^n y)` together with
/// its exact limit: the average over one period of the joint orbit, which
/// always exists on finite systems.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MixedBirkhoffAverage {
    pub average: Rational,
    pub limit: Rational,
    /// Period of the joint orbit of `(x, y)`.
    pub period: usize,
}

pub fn weak_disjointness_average(
    left: &FiniteSystem,
    right: &FiniteSystem,
    f: &[Rational],
    g: &[Rational],
    x: usize,
    y: usize,
    n: usize,
) -> MixedBirkhoffAverage {
    assert_eq!(f.len(), left.size());
    assert_eq!(g.len(), right.size());
    assert!(n >= 1);
    let term = |cx: usize, cy: usize| &f[cx] * &g[cy];
    let mut sum = Rational::from_integer(0.into());
    let (mut cx, mut cy) = (x, y);
    for _ in 0..n {
        sum += term(cx, cy);
        cx = left.apply(cx);
        cy = right.apply(cy);
    }
    let average = sum / Rational::from_integer((n as i64).into());

    let mut period_sum = Rational::from_integer(0.into());
    let (mut cx, mut cy) = (x, y);
    let mut period = 0usize;
    loop {
        period_sum += term(cx, cy);
        period += 1;
        cx = left.apply(cx);
        cy = right.apply(cy);
        if (cx, cy) == (x, y) {
            break;
        }
    }
    let limit = period_sum / Rational::from_integer((period as i64).into());
    MixedBirkhoffAverage {
        average,
        limit,
        period,
    }
}
