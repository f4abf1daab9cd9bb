//! Oracles for pairwise-independent triples.
//!
//! Three identically distributed, pairwise independent random variables tied
//! by a pointwise relation are heavily constrained:
//!
//! * if `ξ₃ = f(ξ₁, ξ₂)` for some function `f`, the common law must be
//!   uniform on its support, certified here through the bistochastic
//!   fixed-point identity `π = Mπ` ([`uniform_law_oracle`]);
//! * if the values live in a finite abelian group and `ξ₃ = ξ₁ + ξ₂`, the
//!   common law must be Haar (uniform) on the stabilizer subgroup
//!   `H = {g : ν invariant under +g}` ([`haar_oracle`]).
//!
//! The XOR construction ([`xor_triple`]) realizes the extreme case: word
//! pairs drawn i.i.d. with their bitwise sum are pairwise independent but
//! far from independent. [`support_growth`] computes the conditional-support
//! cardinalities `a_m` of the first-coordinate word process and reports the
//! dichotomy: the sequence either reaches 1 (a periodic factor) or stays
//! ≥ 2 (entropy at least log 2).

use num::{One, Signed, Zero};
use thiserror::Error;

use crate::rational::{ProbVector, Rational};

/// The hypotheses the oracles gate on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Hypothesis {
    IdenticalMarginals,
    PairwiseIndependence,
    FunctionalRelation,
    AdditiveRelation,
}

impl std::fmt::Display for Hypothesis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            Hypothesis::IdenticalMarginals => "identical marginals",
            Hypothesis::PairwiseIndependence => "pairwise independence",
            Hypothesis::FunctionalRelation => "functional relation ξ3 = f(ξ1, ξ2)",
            Hypothesis::AdditiveRelation => "additive relation ξ3 = ξ1 + ξ2",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IndependenceError {
    #[error("hypothesis failed: {0}")]
    HypothesisFailed(Hypothesis),
    #[error("oracle refuted: {0}")]
    OracleRefuted(String),
    #[error("law tensor must hold alphabet³ nonnegative weights summing to 1")]
    BadLaw,
    #[error("law alphabet {got} does not match the expected {expected}")]
    AlphabetMismatch { expected: usize, got: usize },
    #[error("invariant factors of a finite abelian group must be ≥ 2")]
    BadInvariantFactors,
}

/// The exact joint law of three random variables over a common finite
/// alphabet, stored as a flat `|A|³` tensor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TripleLaw {
    alphabet: usize,
    weights: Vec<Rational>,
}

impl TripleLaw {
    pub fn new(alphabet: usize, weights: Vec<Rational>) -> Result<Self, IndependenceError> {
        if alphabet == 0 || weights.len() != alphabet * alphabet * alphabet {
            return Err(IndependenceError::BadLaw);
        }
        if weights.iter().any(|w| w.is_negative()) {
            return Err(IndependenceError::BadLaw);
        }
        let total: Rational = weights.iter().cloned().sum();
        if !total.is_one() {
            return Err(IndependenceError::BadLaw);
        }
        Ok(TripleLaw { alphabet, weights })
    }

    pub fn from_fn(
        alphabet: usize,
        f: impl Fn(usize, usize, usize) -> Rational,
    ) -> Result<Self, IndependenceError> {
        let mut weights = Vec::with_capacity(alphabet * alphabet * alphabet);
        for i in 0..alphabet {
            for j in 0..alphabet {
                for k in 0..alphabet {
                    weights.push(f(i, j, k));
                }
            }
        }
        TripleLaw::new(alphabet, weights)
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet
    }

    #[inline]
    fn idx(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.alphabet + j) * self.alphabet + k
    }

    pub fn weight(&self, i: usize, j: usize, k: usize) -> &Rational {
        &self.weights[self.idx(i, j, k)]
    }

    /// One-dimensional marginal on coordinate `axis` (0, 1 or 2).
    pub fn marginal(&self, axis: usize) -> Vec<Rational> {
        let s = self.alphabet;
        let mut out = vec![Rational::zero(); s];
        for i in 0..s {
            for j in 0..s {
                for k in 0..s {
                    let w = &self.weights[self.idx(i, j, k)];
                    if !w.is_zero() {
                        out[[i, j, k][axis]] += w;
                    }
                }
            }
        }
        out
    }

    /// Two-dimensional marginal on the ordered coordinate pair.
    pub fn pair_marginal(&self, a: usize, b: usize) -> Vec<Vec<Rational>> {
        let s = self.alphabet;
        let mut out = vec![vec![Rational::zero(); s]; s];
        for i in 0..s {
            for j in 0..s {
                for k in 0..s {
                    let w = &self.weights[self.idx(i, j, k)];
                    if !w.is_zero() {
                        let t = [i, j, k];
                        out[t[a]][t[b]] += w;
                    }
                }
            }
        }
        out
    }

    /// True when the three one-dimensional marginals coincide.
    pub fn has_identical_marginals(&self) -> bool {
        let m0 = self.marginal(0);
        m0 == self.marginal(1) && m0 == self.marginal(2)
    }

    /// Positive-mass cells.
    pub fn support(&self) -> Vec<(usize, usize, usize)> {
        let s = self.alphabet;
        let mut out = Vec::new();
        for i in 0..s {
            for j in 0..s {
                for k in 0..s {
                    if !self.weights[self.idx(i, j, k)].is_zero() {
                        out.push((i, j, k));
                    }
                }
            }
        }
        out
    }
}

/// True iff every 2-dimensional marginal factorizes exactly as the product
/// of its 1-dimensional marginals.
pub fn check_pairwise_independent(law: &TripleLaw) -> bool {
    let margs = [law.marginal(0), law.marginal(1), law.marginal(2)];
    for (a, b) in [(0, 1), (0, 2), (1, 2)] {
        let pair = law.pair_marginal(a, b);
        for i in 0..law.alphabet {
            for j in 0..law.alphabet {
                if pair[i][j] != &margs[a][i] * &margs[b][j] {
                    return false;
                }
            }
        }
    }
    true
}

/// Finds `f : A × A → A` with `ξ₃ = f(ξ₁, ξ₂)` almost surely: every cell
/// `(i, j)` with positive pair mass must put its whole conditional mass on a
/// single `k`. The function is completed canonically off the support
/// (`f(i, j) = 0` where unconstrained).
pub fn find_functional_relation(law: &TripleLaw) -> Option<Vec<Vec<usize>>> {
    let s = law.alphabet;
    let mut f = vec![vec![0usize; s]; s];
    for i in 0..s {
        for j in 0..s {
            let hits: Vec<usize> = (0..s)
                .filter(|&k| !law.weight(i, j, k).is_zero())
                .collect();
            match hits.as_slice() {
                [] => {}
                [k] => f[i][j] = *k,
                _ => return None,
            }
        }
    }
    Some(f)
}

/// Certificate that a triple law satisfies the uniform-law conclusion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UniformLawCertificate {
    /// Symbols carrying positive mass; the common law is `1/|support|` on
    /// each.
    pub support: Vec<usize>,
    /// The bistochastic matrix `M` with `m_{k,i} = p_{j_k(i)}`, indexed by
    /// support position; the common law is its fixed point.
    pub bistochastic: Vec<Vec<Rational>>,
}

/// Verifies the uniform-law conclusion for a triple law satisfying the three
/// hypotheses (identical marginals, pairwise independence, functional
/// relation): the common marginal is uniform on its support, and the
/// reconstructed matrix `M` with `m_{k,i} = p_{j_k(i)}` is bistochastic with
/// `π = Mπ` exactly.
pub fn uniform_law_oracle(law: &TripleLaw) -> Result<UniformLawCertificate, IndependenceError> {
    if !law.has_identical_marginals() {
        return Err(IndependenceError::HypothesisFailed(
            Hypothesis::IdenticalMarginals,
        ));
    }
    if !check_pairwise_independent(law) {
        return Err(IndependenceError::HypothesisFailed(
            Hypothesis::PairwiseIndependence,
        ));
    }
    let Some(f) = find_functional_relation(law) else {
        return Err(IndependenceError::HypothesisFailed(
            Hypothesis::FunctionalRelation,
        ));
    };
    let marginal = law.marginal(0);
    let support: Vec<usize> = (0..law.alphabet)
        .filter(|&i| !marginal[i].is_zero())
        .collect();
    let uniform = Rational::new(1.into(), (support.len() as i64).into());
    for &i in &support {
        if marginal[i] != uniform {
            return Err(IndependenceError::OracleRefuted(format!(
                "marginal is not uniform on its support: p_{i} = {}",
                marginal[i]
            )));
        }
    }
    // m_{k,i} = p_{j_k(i)} where j_k(i) is the unique j in the support with
    // f(i, j) = k
    let mut bistochastic = vec![vec![Rational::zero(); support.len()]; support.len()];
    for (ki, &k) in support.iter().enumerate() {
        for (ii, &i) in support.iter().enumerate() {
            let js: Vec<usize> = support.iter().copied().filter(|&j| f[i][j] == k).collect();
            match js.as_slice() {
                [j] => bistochastic[ki][ii] = marginal[*j].clone(),
                _ => {
                    return Err(IndependenceError::OracleRefuted(format!(
                        "j_k(i) is not unique for i = {i}, k = {k}"
                    )))
                }
            }
        }
    }
    let n = support.len();
    for r in 0..n {
        let row: Rational = bistochastic[r].iter().cloned().sum();
        let col: Rational = (0..n).map(|r2| bistochastic[r2][r].clone()).sum();
        if !row.is_one() || !col.is_one() {
            return Err(IndependenceError::OracleRefuted(
                "reconstructed matrix is not bistochastic".into(),
            ));
        }
    }
    // π = Mπ on the support
    for (ki, &k) in support.iter().enumerate() {
        let image: Rational = support
            .iter()
            .enumerate()
            .map(|(ii, &i)| &bistochastic[ki][ii] * &marginal[i])
            .sum();
        if image != marginal[k] {
            return Err(IndependenceError::OracleRefuted(
                "π = Mπ fails".into(),
            ));
        }
    }
    Ok(UniformLawCertificate {
        support,
        bistochastic,
    })
}

/// A finite abelian group presented as a product of cyclic groups, with
/// elements encoded in mixed radix (big-endian over the factor list). The
/// empty factor list is the trivial group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteAbelianGroup {
    factors: Vec<usize>,
}

impl FiniteAbelianGroup {
    pub fn new(factors: Vec<usize>) -> Result<Self, IndependenceError> {
        if factors.iter().any(|&f| f < 2) {
            return Err(IndependenceError::BadInvariantFactors);
        }
        Ok(FiniteAbelianGroup { factors })
    }

    /// `Z/n`; `n = 1` yields the trivial group.
    pub fn cyclic(n: usize) -> Self {
        assert!(n >= 1);
        if n == 1 {
            FiniteAbelianGroup { factors: vec![] }
        } else {
            FiniteAbelianGroup { factors: vec![n] }
        }
    }

    pub fn invariant_factors(&self) -> &[usize] {
        &self.factors
    }

    pub fn order(&self) -> usize {
        self.factors.iter().product()
    }

    pub fn decode(&self, mut index: usize) -> Vec<usize> {
        let mut tuple = vec![0; self.factors.len()];
        for (slot, &f) in tuple.iter_mut().zip(&self.factors).rev() {
            *slot = index % f;
            index /= f;
        }
        tuple
    }

    pub fn encode(&self, tuple: &[usize]) -> usize {
        tuple
            .iter()
            .zip(&self.factors)
            .fold(0, |acc, (&t, &f)| acc * f + t)
    }

    pub fn add(&self, a: usize, b: usize) -> usize {
        let (ta, tb) = (self.decode(a), self.decode(b));
        let sum: Vec<usize> = ta
            .iter()
            .zip(&tb)
            .zip(&self.factors)
            .map(|((&x, &y), &f)| (x + y) % f)
            .collect();
        self.encode(&sum)
    }

    pub fn neg(&self, a: usize) -> usize {
        let t: Vec<usize> = self
            .decode(a)
            .iter()
            .zip(&self.factors)
            .map(|(&x, &f)| (f - x) % f)
            .collect();
        self.encode(&t)
    }
}

/// Certificate that a triple law's common marginal is Haar (uniform) on a
/// subgroup.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HaarCertificate {
    /// The stabilizer subgroup `H = {g : ν invariant under +g}`, sorted.
    pub subgroup: Vec<usize>,
}

/// Verifies the Haar conclusion for group-valued triples: under identical
/// marginals, pairwise independence and `ξ₃ = ξ₁ + ξ₂`, the stabilizer
/// `H = {g : ν(· + g) = ν}` is a subgroup containing the support, and the
/// common marginal is uniform on `H`.
pub fn haar_oracle(
    group: &FiniteAbelianGroup,
    law: &TripleLaw,
) -> Result<HaarCertificate, IndependenceError> {
    if law.alphabet_size() != group.order() {
        return Err(IndependenceError::AlphabetMismatch {
            expected: group.order(),
            got: law.alphabet_size(),
        });
    }
    if !law.has_identical_marginals() {
        return Err(IndependenceError::HypothesisFailed(
            Hypothesis::IdenticalMarginals,
        ));
    }
    if !check_pairwise_independent(law) {
        return Err(IndependenceError::HypothesisFailed(
            Hypothesis::PairwiseIndependence,
        ));
    }
    for (i, j, k) in law.support() {
        if k != group.add(i, j) {
            return Err(IndependenceError::HypothesisFailed(
                Hypothesis::AdditiveRelation,
            ));
        }
    }
    let nu = law.marginal(0);
    let order = group.order();
    let subgroup: Vec<usize> = (0..order)
        .filter(|&g| (0..order).all(|a| nu[group.add(a, g)] == nu[a]))
        .collect();
    // subgroup axioms hold by construction of the stabilizer; verify anyway
    if !subgroup.contains(&0)
        || subgroup
            .iter()
            .any(|&h| !subgroup.contains(&group.neg(h)))
        || subgroup
            .iter()
            .any(|&h1| subgroup.iter().any(|&h2| !subgroup.contains(&group.add(h1, h2))))
    {
        return Err(IndependenceError::OracleRefuted(
            "stabilizer is not a subgroup".into(),
        ));
    }
    for (g, mass) in nu.iter().enumerate() {
        if !mass.is_zero() && !subgroup.contains(&g) {
            return Err(IndependenceError::OracleRefuted(format!(
                "support element {g} lies outside the stabilizer"
            )));
        }
    }
    let uniform = Rational::new(1.into(), (subgroup.len() as i64).into());
    for &h in &subgroup {
        if nu[h] != uniform {
            return Err(IndependenceError::OracleRefuted(format!(
                "marginal is not Haar on the stabilizer: ν({h}) = {}",
                nu[h]
            )));
        }
    }
    Ok(HaarCertificate { subgroup })
}

/// The joint law of `(w, w', w ⊕ w')` for `w, w'` independent words of
/// length `m` with i.i.d. letters drawn from `p` on `{0, 1}`. Words are
/// encoded big-endian, so bitwise XOR of indices is letterwise addition
/// mod 2. For the fair coin this is the canonical pairwise independent,
/// non-independent triple.
pub fn xor_triple(p: &ProbVector, m: usize) -> Result<TripleLaw, IndependenceError> {
    if p.len() != 2 {
        return Err(IndependenceError::AlphabetMismatch {
            expected: 2,
            got: p.len(),
        });
    }
    if m == 0 {
        return Err(IndependenceError::BadLaw);
    }
    let words = 1usize << m;
    let mass = |w: usize| -> Rational {
        (0..m)
            .map(|bit| p[(w >> (m - 1 - bit)) & 1].clone())
            .product()
    };
    let masses: Vec<Rational> = (0..words).map(mass).collect();
    let mut weights = vec![Rational::zero(); words * words * words];
    for w in 0..words {
        if masses[w].is_zero() {
            continue;
        }
        for w2 in 0..words {
            if masses[w2].is_zero() {
                continue;
            }
            weights[(w * words + w2) * words + (w ^ w2)] = &masses[w] * &masses[w2];
        }
    }
    TripleLaw::new(words, weights)
}

/// Support-growth dichotomy verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GrowthVerdict {
    /// `a_m` reached 1 at the given `m`: the word process is eventually
    /// deterministic, a periodic factor.
    Periodic { at: usize },
    /// `a_m ≥ 2` throughout the horizon: entropy at least log 2.
    EntropyAtLeastLog2,
}

/// Conditional-support cardinalities of the first-coordinate word process.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SupportGrowth {
    /// `a_1, …, a_M`.
    pub sequence: Vec<usize>,
    pub verdict: GrowthVerdict,
}

/// Computes `a_m`: the support cardinality of the law of the `m`-th symbol
/// conditioned on any positive-probability `(m−1)`-prefix of the first
/// coordinate of `builder(m)`. The cardinality must not depend on the
/// prefix; a dependent support flags a hypothesis failure upstream and is
/// reported as an error. Word alphabets are `base^m` with big-endian
/// encoding.
pub fn support_growth<F>(
    base: usize,
    horizon: usize,
    builder: F,
) -> Result<SupportGrowth, IndependenceError>
where
    F: Fn(usize) -> TripleLaw,
{
    assert!(base >= 1 && horizon >= 1);
    let mut sequence = Vec::with_capacity(horizon);
    for m in 1..=horizon {
        let law = builder(m);
        let expected = base.pow(m as u32);
        if law.alphabet_size() != expected {
            return Err(IndependenceError::AlphabetMismatch {
                expected,
                got: law.alphabet_size(),
            });
        }
        let marginal = law.marginal(0);
        let prefixes = expected / base;
        let mut common: Option<usize> = None;
        for prefix in 0..prefixes {
            let cardinality = (0..base)
                .filter(|last| !marginal[prefix * base + last].is_zero())
                .count();
            if cardinality == 0 {
                continue; // zero-probability prefix
            }
            match common {
                None => common = Some(cardinality),
                Some(c) if c != cardinality => {
                    return Err(IndependenceError::OracleRefuted(format!(
                        "conditional support cardinality depends on the prefix at m = {m}"
                    )));
                }
                Some(_) => {}
            }
        }
        sequence.push(common.expect("law has mass on some prefix"));
    }
    let verdict = match sequence.iter().position(|&a| a == 1) {
        Some(pos) => GrowthVerdict::Periodic { at: pos + 1 },
        None => GrowthVerdict::EntropyAtLeastLog2,
    };
    Ok(SupportGrowth { sequence, verdict })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn fair() -> ProbVector {
        ProbVector::uniform(2)
    }

    fn coins_product() -> TripleLaw {
        TripleLaw::from_fn(2, |_, _, _| rat(1, 8)).unwrap()
    }

    fn diagonal() -> TripleLaw {
        TripleLaw::from_fn(2, |i, j, k| {
            if i == j && j == k {
                rat(1, 2)
            } else {
                rat(0, 1)
            }
        })
        .unwrap()
    }

    #[test]
    fn pairwise_independence_checks() {
        assert!(check_pairwise_independent(&coins_product()));
        assert!(check_pairwise_independent(&xor_triple(&fair(), 1).unwrap()));
        assert!(!check_pairwise_independent(&diagonal()));
    }

    #[test]
    fn functional_relations() {
        let f = find_functional_relation(&xor_triple(&fair(), 1).unwrap()).unwrap();
        assert_eq!(f[0][1], 1);
        assert_eq!(f[1][1], 0);
        assert!(find_functional_relation(&coins_product()).is_none());
        // uniform on {(a, b, max(a,b))}: relation exists, independence fails
        let max_law = TripleLaw::from_fn(2, |i, j, k| {
            if k == i.max(j) {
                rat(1, 4)
            } else {
                rat(0, 1)
            }
        })
        .unwrap();
        let f = find_functional_relation(&max_law).unwrap();
        assert_eq!(f, vec![vec![0, 1], vec![1, 1]]);
        assert!(!check_pairwise_independent(&max_law));
    }

    #[test]
    fn uniform_oracle_confirms_the_xor_triple() {
        let cert = uniform_law_oracle(&xor_triple(&fair(), 1).unwrap()).unwrap();
        assert_eq!(cert.support, vec![0, 1]);
        assert_eq!(
            cert.bistochastic,
            vec![vec![rat(1, 2), rat(1, 2)], vec![rat(1, 2), rat(1, 2)]]
        );
    }

    #[test]
    fn uniform_oracle_confirms_addition_mod_three() {
        let law = TripleLaw::from_fn(3, |i, j, k| {
            if (i + j) % 3 == k {
                rat(1, 9)
            } else {
                rat(0, 1)
            }
        })
        .unwrap();
        let cert = uniform_law_oracle(&law).unwrap();
        assert_eq!(cert.support, vec![0, 1, 2]);
    }

    #[test]
    fn uniform_oracle_reports_the_failing_hypothesis() {
        assert_eq!(
            uniform_law_oracle(&diagonal()).unwrap_err(),
            IndependenceError::HypothesisFailed(Hypothesis::PairwiseIndependence)
        );
        assert_eq!(
            uniform_law_oracle(&coins_product()).unwrap_err(),
            IndependenceError::HypothesisFailed(Hypothesis::FunctionalRelation)
        );
    }

    #[test]
    fn group_arithmetic() {
        let g = FiniteAbelianGroup::new(vec![2, 4]).unwrap();
        assert_eq!(g.order(), 8);
        for a in 0..8 {
            assert_eq!(g.add(a, g.neg(a)), 0);
            assert_eq!(g.add(a, 0), a);
            for b in 0..8 {
                assert_eq!(g.add(a, b), g.add(b, a));
            }
        }
        let z4 = FiniteAbelianGroup::cyclic(4);
        assert_eq!(z4.add(3, 2), 1);
        assert_eq!(FiniteAbelianGroup::cyclic(1).order(), 1);
        assert!(FiniteAbelianGroup::new(vec![1]).is_err());
    }

    #[test]
    fn haar_oracle_full_group_and_proper_subgroup() {
        let z4 = FiniteAbelianGroup::cyclic(4);
        let full = TripleLaw::from_fn(4, |i, j, k| {
            if (i + j) % 4 == k {
                rat(1, 16)
            } else {
                rat(0, 1)
            }
        })
        .unwrap();
        assert_eq!(haar_oracle(&z4, &full).unwrap().subgroup, vec![0, 1, 2, 3]);

        // uniform on the subgroup {0, 2}
        let sub = TripleLaw::from_fn(4, |i, j, k| {
            if i % 2 == 0 && j % 2 == 0 && (i + j) % 4 == k {
                rat(1, 4)
            } else {
                rat(0, 1)
            }
        })
        .unwrap();
        assert_eq!(haar_oracle(&z4, &sub).unwrap().subgroup, vec![0, 2]);
    }

    #[test]
    fn haar_oracle_rejects_skewed_marginals() {
        // the unique additive law on Z/2 with marginals (1/3, 2/3)
        let z2 = FiniteAbelianGroup::cyclic(2);
        let law = TripleLaw::from_fn(2, |i, j, k| {
            if (i + j) % 2 == k && (i, j) != (0, 0) {
                rat(1, 3)
            } else {
                rat(0, 1)
            }
        })
        .unwrap();
        assert!(law.has_identical_marginals());
        assert_eq!(
            haar_oracle(&z2, &law).unwrap_err(),
            IndependenceError::HypothesisFailed(Hypothesis::PairwiseIndependence)
        );
    }

    #[test]
    fn xor_triple_structure() {
        // (2^m)² supported cells of mass 4^{−m} each
        let law = xor_triple(&fair(), 1).unwrap();
        assert_eq!(law.support().len(), 4);
        for (i, j, k) in law.support() {
            assert_eq!(i ^ j, k);
            assert_eq!(*law.weight(i, j, k), rat(1, 4));
        }
        let law2 = xor_triple(&fair(), 2).unwrap();
        assert_eq!(law2.support().len(), 16);
        assert!(law2.support().iter().all(|&(i, j, k)| i ^ j == k));
        assert!(check_pairwise_independent(&law2));
        assert!(law2.has_identical_marginals());
    }

    #[test]
    fn xor_triple_is_not_fully_independent() {
        for m in 1..=3 {
            let law = xor_triple(&fair(), m).unwrap();
            let margs = [law.marginal(0), law.marginal(1), law.marginal(2)];
            let s = law.alphabet_size();
            let mut product_differs = false;
            for i in 0..s {
                for j in 0..s {
                    for k in 0..s {
                        let product = &margs[0][i] * &margs[1][j] * &margs[2][k];
                        if *law.weight(i, j, k) != product {
                            product_differs = true;
                        }
                    }
                }
            }
            assert!(product_differs, "m = {m}");
        }
    }

    #[test]
    fn degenerate_coin_gives_a_point_mass() {
        let p = ProbVector::new(vec![rat(1, 1), rat(0, 1)]).unwrap();
        let law = xor_triple(&p, 1).unwrap();
        assert_eq!(law.support(), vec![(0, 0, 0)]);
        assert_eq!(*law.weight(0, 0, 0), rat(1, 1));
    }

    #[test]
    fn support_growth_of_the_fair_xor_family() {
        let growth = support_growth(2, 6, |m| xor_triple(&fair(), m).unwrap()).unwrap();
        assert_eq!(growth.sequence, vec![2; 6]);
        assert_eq!(growth.verdict, GrowthVerdict::EntropyAtLeastLog2);
    }

    /// Alternating ±phase process: two equally likely words 0101… and
    /// 1010…, with the XOR triple on top.
    fn alternating_triple(m: usize) -> TripleLaw {
        let words = 1usize << m;
        let alt = |phase: usize| -> usize {
            (0..m).fold(0usize, |acc, bit| (acc << 1) | ((phase + bit) % 2))
        };
        let (w0, w1) = (alt(0), alt(1));
        let mut weights = vec![rat(0, 1); words * words * words];
        for &a in &[w0, w1] {
            for &b in &[w0, w1] {
                weights[(a * words + b) * words + (a ^ b)] = rat(1, 4);
            }
        }
        TripleLaw::new(words, weights).unwrap()
    }

    #[test]
    fn support_growth_of_a_periodic_process() {
        let growth = support_growth(2, 4, alternating_triple).unwrap();
        assert_eq!(growth.sequence, vec![2, 1, 1, 1]);
        assert_eq!(growth.verdict, GrowthVerdict::Periodic { at: 2 });
    }

    #[test]
    fn support_growth_of_a_constant_process() {
        let p = ProbVector::new(vec![rat(1, 1), rat(0, 1)]).unwrap();
        let growth = support_growth(2, 3, |m| xor_triple(&p, m).unwrap()).unwrap();
        assert_eq!(growth.sequence, vec![1, 1, 1]);
        assert_eq!(growth.verdict, GrowthVerdict::Periodic { at: 1 });
    }

    #[test]
    fn growth_sequence_is_nonincreasing_for_valid_families() {
        for law in [
            support_growth(2, 5, |m| xor_triple(&fair(), m).unwrap()).unwrap(),
            support_growth(2, 5, alternating_triple).unwrap(),
        ] {
            assert!(law.sequence.windows(2).all(|w| w[1] <= w[0]));
        }
    }
}
