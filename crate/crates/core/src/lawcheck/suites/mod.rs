//! Suite definitions. Each suite pairs a generator with a check over one
//! [`Instance`]; checks recompute everything from the instance data.

mod hyper;
mod prob;
mod supp;
mod topo;
mod val;

use num_rational::BigRational;
use rand::Rng;

use super::gen::{random_down_set, Gen};
use super::{CheckError, Instance, MapSpec, PointValues, SpaceSpec, SuiteDef};
use crate::pointset::PointSet;
use crate::probability::ProbabilityError;
use crate::scalar::ExtNonneg;
use crate::space::FiniteSpace;
use crate::valuation::Valuation;

type Q = ExtNonneg<BigRational>;
type Val = Valuation<BigRational>;

pub(super) static ALL: &[SuiteDef] = &[
    SuiteDef { name: "h-monad", generate: hyper::gen_monad, check: hyper::check_monad },
    SuiteDef { name: "h-strength", generate: hyper::gen_strength, check: hyper::check_strength },
    SuiteDef { name: "h-algebra", generate: hyper::gen_algebra, check: hyper::check_algebra },
    SuiteDef { name: "v-monad", generate: val::gen_monad, check: val::check_monad },
    SuiteDef { name: "v-strength", generate: val::gen_strength, check: val::check_strength },
    SuiteDef { name: "v-fubini", generate: val::gen_fubini, check: val::check_fubini },
    SuiteDef { name: "v-duality", generate: val::gen_duality, check: val::check_duality },
    SuiteDef { name: "v-portmanteau", generate: val::gen_portmanteau, check: val::check_portmanteau },
    SuiteDef { name: "p-submonad", generate: prob::gen_submonad, check: prob::check_submonad },
    SuiteDef { name: "p-extension", generate: prob::gen_extension, check: prob::check_extension },
    SuiteDef { name: "p-product", generate: prob::gen_product, check: prob::check_product },
    SuiteDef { name: "supp-unit", generate: supp::gen_unit, check: supp::check_unit },
    SuiteDef { name: "supp-mult", generate: supp::gen_mult, check: supp::check_mult },
    SuiteDef { name: "supp-natural", generate: supp::gen_natural, check: supp::check_natural },
    SuiteDef { name: "supp-monoidal", generate: supp::gen_monoidal, check: supp::check_monoidal },
    SuiteDef { name: "algebra-transfer", generate: supp::gen_transfer, check: supp::check_transfer },
    SuiteDef { name: "topology-core", generate: topo::gen_core, check: topo::check_core },
    SuiteDef { name: "appendixA-2cells", generate: topo::gen_2cells, check: topo::check_2cells },
    SuiteDef {
        name: "appendixC-morphism-equivalence",
        generate: supp::gen_equivalence,
        check: supp::check_equivalence,
    },
];

/// Largest product a two-factor suite builds.
const PRODUCT_CAP: usize = 9;
/// Largest triple product a three-factor suite builds.
const TRIPLE_CAP: usize = 8;
/// Sampled elements of `HHHX` (or `HHX`) when enumeration is too large.
const FAMILY_SAMPLES: usize = 100;
/// Largest `HX` whose hyperspace `HHX` is enumerated.
const HH_LIMIT: usize = 20;

fn space_specs(spaces: &[&FiniteSpace]) -> Vec<SpaceSpec> {
    spaces.iter().map(|s| SpaceSpec::of(s)).collect()
}

fn values(space: usize, values: Vec<Q>) -> PointValues {
    PointValues { space, values }
}

/// A random map when one exists, otherwise an out-of-range assignment that
/// makes the instance skip.
fn map_spec(g: &mut Gen, spaces: &[&FiniteSpace], from: usize, to: usize) -> MapSpec {
    let assignment = g.map(spaces[from], spaces[to]).unwrap_or_else(|| vec![usize::MAX; spaces[from].len()]);
    MapSpec { from, to, assignment }
}

/// A nonempty target whenever the source is nonempty, so maps exist.
fn target_for(g: &mut Gen, source: &FiniteSpace, max: usize) -> FiniteSpace {
    if source.is_empty() {
        g.space_at_most(max)
    } else {
        g.nonempty_space_at_most(max)
    }
}

/// Every closed set of `space` when `exhaustive`, otherwise random down-sets.
fn down_sets(rng: &mut impl Rng, space: &FiniteSpace, exhaustive: bool) -> Vec<PointSet> {
    if exhaustive {
        space.closed_sets()
    } else {
        (0..FAMILY_SAMPLES).map(|_| random_down_set(rng, space)).collect()
    }
}

/// Points of `HHX` (down-closed families of closed sets): all of them when
/// `HX` is small, random ones otherwise.
fn families(rng: &mut impl Rng, hx: &crate::hyperspace::Hyperspace) -> Vec<PointSet> {
    down_sets(rng, hx.space(), hx.len() <= HH_LIMIT)
}

/// Weight-level oracle for `Σ cᵢ·νᵢ` when each `νᵢ` comes from point weights.
fn combine(space: &FiniteSpace, terms: &[(Q, &[Q])]) -> Result<Val, CheckError> {
    let mut w = vec![Q::zero(); space.len()];
    for (c, weights) in terms {
        for (acc, x) in w.iter_mut().zip(weights.iter()) {
            *acc = acc.clone() + c.clone() * x.clone();
        }
    }
    Ok(Valuation::from_weights(space, &w)?)
}

/// `cl{x : w_x > 0}`: the support of `Σ w_x·δ_x`, computed from weights.
fn weight_support(space: &FiniteSpace, weights: &[Q]) -> PointSet {
    space.closure(&PointSet::from_indices(space.len(), (0..space.len()).filter(|&x| !weights[x].is_zero())))
}

/// Normalization failures mean the instance is no longer a probability
/// instance (for example after shrinking); everything else is a failure.
fn prob_err(e: ProbabilityError) -> CheckError {
    match e {
        ProbabilityError::NotNormalized(m) => CheckError::Skip(m),
        other => CheckError::Fail(other.to_string()),
    }
}

fn instance(spaces: &[&FiniteSpace], seed: u64) -> Instance {
    Instance { spaces: space_specs(spaces), seed, ..Instance::default() }
}
