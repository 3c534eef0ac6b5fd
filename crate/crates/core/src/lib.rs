//! Finite models of the hyperspace monad `H`, the valuation monad `V`, the
//! probability monad `P`, and the support morphism `V → H`.
//!
//! Spaces are finite topological spaces, presented as preorders. Scalars are
//! generic over [`scalar::Scalar`]; the aliases below fix them to exact
//! rationals, which is what the command line tool and the law checker use.

pub mod hyperspace;
pub mod lawcheck;
pub mod mutants;
pub mod pointset;
pub mod probability;
pub mod scalar;
pub mod space;
pub mod support;
pub mod valuation;

pub use hyperspace::{build_hyperspace, ClosedSet, Hyperspace};
pub use pointset::PointSet;
pub use scalar::{ExtNonneg, Scalar};
pub use space::{product, ContinuousMap, FiniteSpace, ProductSpace};
pub use valuation::{LowerSemiFn, Valuation};

pub type Rational = num_rational::BigRational;
/// `[0, ∞]` over exact rationals.
pub type Ext = ExtNonneg<Rational>;
pub type QValuation = Valuation<Rational>;
pub type QLowerSemiFn = LowerSemiFn<Rational>;
pub type QProbValuation = probability::ProbValuation<Rational>;
pub type QFiniteMeasure = probability::FiniteMeasure<Rational>;
