//! Exact, desk-scale computations with joinings of measure-preserving systems.
//!
//! A *joining* of two systems `(X, μ, T)` and `(Y, ν, S)` is a probability
//! measure on `X × Y` with marginals `μ` and `ν` that is invariant under the
//! product map `T × S`. On finite state spaces with rational measures every
//! question about joinings becomes exact linear algebra, and this crate
//! answers the classical ones without any floating-point error:
//!
//! * build the joining polytope `J(T, S)` and enumerate its vertices (the
//!   ergodic joinings) by double description over rationals
//!   ([`polytope::JoiningPolytope`]),
//! * decide disjointness (`μ ⊗ ν` is the only joining) exactly
//!   ([`polytope::is_disjoint`]),
//! * construct graph joinings, commutants, ergodic decompositions and detect
//!   when a joining is supported on the graph of a factor map or an
//!   isomorphism ([`coupling`]),
//! * form relatively independent joinings over a common factor and use them
//!   as non-disjointness witnesses ([`relative`]),
//! * evaluate mixing, multiple-mixing and multiple-recurrence statistics of
//!   stationary Markov shifts by exact cylinder calculus ([`asymptotics`]),
//! * check the pairwise-independence lemmas for triple laws: the uniform-law
//!   fixed point `π = Mπ`, Haar measure on a stabilizer subgroup, the XOR
//!   counterexample and the conditional-support dichotomy ([`independence`]).
//!
//! All measures, weights and polytope data are [`rational::Rational`]
//! (arbitrary-precision fractions). The Markov shift module is additionally
//! generic over [`scalar::Scalar`] so long horizons can run in `f64`.

pub mod asymptotics;
pub mod coupling;
pub mod independence;
mod linalg;
pub mod polytope;
pub mod rational;
pub mod relative;
pub mod scalar;
pub mod system;

pub use coupling::{
    commutant, detect_graph_structure, ergodic_decomposition, find_isomorphism, graph_joining,
    is_ergodic_joining, joining_metric, product_joining, self_joining_from_commutant,
    validate_joining, Coupling, ErgodicDecomposition, GraphStructure, JoiningError,
};
pub use polytope::{is_disjoint, joining_polytope, JoiningPolytope};
pub use rational::{rat, ProbVector, Rational};
pub use relative::{
    classify_self_joinings, common_factors, enumerate_factors, nondisjointness_witness,
    rel_indep_joining, relative_product, FactorPair, RelativeError, SelfJoiningLabel,
    SelfJoiningReport, TripleCoupling,
};
pub use system::{FactorMap, FiniteSystem, MeasurableSet, Perm, SystemError};

/// Resource limits for the operations that enumerate or brute-force.
///
/// Everything beyond a cap fails loudly instead of approximating. The
/// defaults are generous for interactive use; raise them explicitly when you
/// know what you are asking for.
#[derive(Debug, Clone)]
pub struct Caps {
    /// Maximum number of product cells `n_X · n_Y` for polytope work.
    pub cells: usize,
    /// Maximum state count for permutation brute force (commutants,
    /// isomorphism search over bijections).
    pub perm_states: usize,
    /// Maximum state count for partition enumeration (factor lattices);
    /// partition counts grow like Bell numbers.
    pub partition_states: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            cells: 64,
            perm_states: 8,
            partition_states: 12,
        }
    }
}

impl Caps {
    /// Caps with the cell limit replaced by `cells`.
    pub fn with_cells(cells: usize) -> Self {
        Caps {
            cells,
            ..Caps::default()
        }
    }
}
