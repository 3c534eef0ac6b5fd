//! Continuous valuations on finite spaces, lower semicontinuous functions
//! and the lower integral.
//!
//! A valuation is tabulated over the canonical open list of its space.
//! Scott continuity is not checked: a finite lattice contains the supremum
//! of every directed family, so strictness, monotonicity and modularity
//! already make a table continuous.

mod kernel;
mod order;
mod portmanteau;
mod product;
mod second_order;

use std::fmt;

pub use kernel::{bind, kleisli_compose, Kernel};
pub use order::{canonical_test_functions, order_checks, OrderReport};
pub use portmanteau::{
    check_certificate, portmanteau_witness, topology_membership, Certificate, CertificateTerm, Subbasic,
};
pub use product::{
    costrength_first_by_integration, costrength_first_molecular, costrength_v, product_valuation,
    rectangle_reconstruction, strength_first_by_integration, strength_first_molecular, strength_v,
};
pub use second_order::{mult_e, mult_e_integral_agrees, SimpleSecondOrder, SimpleThirdOrder};

use crate::mutants::{self, Mutation};
use crate::pointset::PointSet;
use crate::scalar::{ExtNonneg, Scalar};
use crate::space::{ContinuousMap, FiniteSpace, TopologyError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ValuationError {
    #[error("not strict: value {0} on the empty set")]
    NotStrict(String),
    #[error("not monotone: {smaller:?} ⊆ {larger:?} but {smaller_value} > {larger_value}")]
    NotMonotone { smaller: Vec<String>, larger: Vec<String>, smaller_value: String, larger_value: String },
    #[error("not modular at {left:?} and {right:?}: {union_plus_meet} ≠ {sum}")]
    NotModular { left: Vec<String>, right: Vec<String>, union_plus_meet: String, sum: String },
    #[error("not lower semicontinuous: {below} ≤ {above} but f({below}) > f({above})")]
    NotLowerSemicontinuous { below: String, above: String },
    #[error("kernel is not continuous: x ↦ k(x)({open:?}) fails at {below} ≤ {above}")]
    NotAKernel { open: Vec<String>, below: String, above: String },
    #[error("set {0:?} is not open")]
    NotOpen(Vec<String>),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("atom weight must be positive, got {0}")]
    NonPositiveWeight(String),
    #[error("inclusion-exclusion needs ∞ − ∞ on {0:?}")]
    InfinityIndeterminate(Vec<String>),
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    #[error("auxiliary preorder is not closed in X × X: ({0}, {1}) is below a related pair but unrelated")]
    OrderNotClosed(String, String),
    #[error("auxiliary relation is not a preorder")]
    NotAPreorder,
    #[error("internal cross-check failed: {0}")]
    CrossCheck(String),
    #[error(transparent)]
    Topology(#[from] TopologyError),
}

type Ext<S> = ExtNonneg<S>;

/// A continuous valuation, tabulated over `space.opens()`.
#[derive(Clone, PartialEq)]
pub struct Valuation<S> {
    space: FiniteSpace,
    table: Vec<Ext<S>>,
}

impl<S: Scalar> fmt::Debug for Valuation<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut m = f.debug_map();
        for (u, v) in self.space.opens().iter().zip(&self.table) {
            m.entry(&self.space.render(u), v);
        }
        m.finish()
    }
}

impl<S: Scalar> Valuation<S> {
    /// `U ↦ Σ_{x ∈ U} weights[x]`.
    pub fn from_weights(space: &FiniteSpace, weights: &[Ext<S>]) -> Result<Self, ValuationError> {
        if weights.len() != space.len() {
            return Err(ValuationError::ShapeMismatch(format!("{} weights for {} points", weights.len(), space.len())));
        }
        let table = space.opens().iter().map(|u| u.iter().map(|x| weights[x].clone()).sum()).collect();
        Ok(Valuation { space: space.clone(), table })
    }

    /// Validates a table indexed like `space.opens()`.
    pub fn validate(space: &FiniteSpace, table: Vec<Ext<S>>) -> Result<Self, ValuationError> {
        let opens = space.opens();
        if table.len() != opens.len() {
            return Err(ValuationError::ShapeMismatch(format!(
                "{} table entries for {} opens",
                table.len(),
                opens.len()
            )));
        }
        let empty = space.open_index(&space.empty_set()).expect("∅ is open");
        if !table[empty].is_zero() {
            return Err(ValuationError::NotStrict(table[empty].to_string()));
        }
        for (i, u) in opens.iter().enumerate() {
            for (j, v) in opens.iter().enumerate() {
                if u.is_subset(v) && table[i] > table[j] {
                    return Err(ValuationError::NotMonotone {
                        smaller: space.render(u),
                        larger: space.render(v),
                        smaller_value: table[i].to_string(),
                        larger_value: table[j].to_string(),
                    });
                }
            }
        }
        for (i, u) in opens.iter().enumerate() {
            for (j, v) in opens.iter().enumerate().skip(i + 1) {
                let join = space.open_index(&u.union(v)).expect("union-closed");
                let meet = space.open_index(&u.intersection(v)).expect("meet-closed");
                let lhs = &table[join] + &table[meet];
                let rhs = &table[i] + &table[j];
                if lhs != rhs {
                    return Err(ValuationError::NotModular {
                        left: space.render(u),
                        right: space.render(v),
                        union_plus_meet: lhs.to_string(),
                        sum: rhs.to_string(),
                    });
                }
            }
        }
        Ok(Valuation { space: space.clone(), table })
    }

    pub(crate) fn from_table_unchecked(space: &FiniteSpace, table: Vec<Ext<S>>) -> Self {
        debug_assert_eq!(table.len(), space.opens().len());
        Valuation { space: space.clone(), table }
    }

    pub fn zero(space: &FiniteSpace) -> Self {
        Valuation { space: space.clone(), table: vec![Ext::zero(); space.opens().len()] }
    }

    /// `δ_x(U) = ⟦x ∈ U⟧`.
    pub fn dirac(space: &FiniteSpace, x: usize) -> Self {
        let table = space.opens().iter().map(|u| if u.contains(x) { Ext::one() } else { Ext::zero() }).collect();
        Valuation { space: space.clone(), table }
    }

    pub fn space(&self) -> &FiniteSpace {
        &self.space
    }

    pub fn table(&self) -> &[Ext<S>] {
        &self.table
    }

    pub fn value(&self, u: &PointSet) -> Result<&Ext<S>, ValuationError> {
        self.space.open_index(u).map(|i| &self.table[i]).ok_or_else(|| ValuationError::NotOpen(self.space.render(u)))
    }

    pub fn total(&self) -> &Ext<S> {
        self.value(&self.space.full_set()).expect("whole space is open")
    }

    pub fn is_zero(&self) -> bool {
        self.table.iter().all(Ext::is_zero)
    }

    pub fn add(&self, other: &Valuation<S>) -> Result<Valuation<S>, ValuationError> {
        if self.space != other.space {
            return Err(ValuationError::ShapeMismatch("sum of valuations on different spaces".into()));
        }
        let table = self.table.iter().zip(&other.table).map(|(a, b)| a + b).collect();
        Ok(Valuation { space: self.space.clone(), table })
    }

    pub fn scale(&self, c: &Ext<S>) -> Valuation<S> {
        Valuation { space: self.space.clone(), table: self.table.iter().map(|v| c * v).collect() }
    }

    /// Pointwise order on opens.
    pub fn le(&self, other: &Valuation<S>) -> bool {
        self.space == other.space && self.table.iter().zip(&other.table).all(|(a, b)| a <= b)
    }
}

/// A lower semicontinuous function `X → [0, ∞]`: every strict upper level
/// set is open, equivalently the function is monotone for specialization.
#[derive(Clone, PartialEq)]
pub struct LowerSemiFn<S> {
    space: FiniteSpace,
    values: Vec<Ext<S>>,
}

impl<S: Scalar> fmt::Debug for LowerSemiFn<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut m = f.debug_map();
        for (x, v) in self.values.iter().enumerate() {
            m.entry(&self.space.name(x), v);
        }
        m.finish()
    }
}

impl<S: Scalar> LowerSemiFn<S> {
    pub fn new(space: &FiniteSpace, values: Vec<Ext<S>>) -> Result<Self, ValuationError> {
        if values.len() != space.len() {
            return Err(ValuationError::ShapeMismatch(format!("{} values for {} points", values.len(), space.len())));
        }
        let monotone_witness = space.specialization().into_iter().find(|&(x, y)| values[x] > values[y]);
        let f = LowerSemiFn { space: space.clone(), values };
        let levels_open =
            std::iter::once(Ext::zero()).chain(f.values.iter().cloned()).all(|r| space.is_open(&f.level_set_gt(&r)));
        match (monotone_witness, levels_open) {
            (None, true) => Ok(f),
            (Some((x, y)), false) => Err(ValuationError::NotLowerSemicontinuous {
                below: space.name(x).to_owned(),
                above: space.name(y).to_owned(),
            }),
            _ => Err(ValuationError::CrossCheck("monotonicity and open level sets disagree".into())),
        }
    }

    pub fn indicator(space: &FiniteSpace, u: &PointSet) -> Result<Self, ValuationError> {
        if !space.is_open(u) {
            return Err(ValuationError::NotOpen(space.render(u)));
        }
        let values = (0..space.len()).map(|x| if u.contains(x) { Ext::one() } else { Ext::zero() }).collect();
        Ok(LowerSemiFn { space: space.clone(), values })
    }

    pub fn constant(space: &FiniteSpace, c: Ext<S>) -> Self {
        LowerSemiFn { space: space.clone(), values: vec![c; space.len()] }
    }

    pub(crate) fn from_values_unchecked(space: &FiniteSpace, values: Vec<Ext<S>>) -> Self {
        LowerSemiFn { space: space.clone(), values }
    }

    pub fn space(&self) -> &FiniteSpace {
        &self.space
    }

    pub fn values(&self) -> &[Ext<S>] {
        &self.values
    }

    pub fn at(&self, x: usize) -> &Ext<S> {
        &self.values[x]
    }

    pub fn level_set_gt(&self, r: &Ext<S>) -> PointSet {
        PointSet::from_indices(self.space.len(), (0..self.space.len()).filter(|&x| &self.values[x] > r))
    }

    pub fn level_set_ge(&self, r: &Ext<S>) -> PointSet {
        PointSet::from_indices(self.space.len(), (0..self.space.len()).filter(|&x| &self.values[x] >= r))
    }

    /// The distinct finite positive values, ascending.
    pub fn finite_positive_values(&self) -> Vec<S> {
        let mut vals: Vec<S> =
            self.values.iter().filter_map(|v| v.as_finite().filter(|v| !v.is_zero()).cloned()).collect();
        vals.sort_by(|a, b| a.partial_cmp(b).expect("ordered scalar"));
        vals.dedup();
        vals
    }

    /// `g ∘ f` for a continuous `f` into this function's space.
    pub fn precompose(&self, f: &ContinuousMap) -> Result<LowerSemiFn<S>, ValuationError> {
        if f.target() != &self.space {
            return Err(ValuationError::ShapeMismatch("map does not land in the function's space".into()));
        }
        let values = f.assignment().iter().map(|&y| self.values[y].clone()).collect();
        Ok(LowerSemiFn { space: f.source().clone(), values })
    }

    pub fn le(&self, other: &LowerSemiFn<S>) -> bool {
        self.space == other.space && self.values.iter().zip(&other.values).all(|(a, b)| a <= b)
    }
}

/// `⟨ν, g⟩` by the layer-cake formula over the distinct values of `g`:
/// `Σᵢ (vᵢ − vᵢ₋₁)·ν({g ≥ vᵢ}) + ∞·ν({g = ∞})`.
pub fn integrate<S: Scalar>(nu: &Valuation<S>, g: &LowerSemiFn<S>) -> Result<Ext<S>, ValuationError> {
    if nu.space != g.space {
        return Err(ValuationError::ShapeMismatch("valuation and function live on different spaces".into()));
    }
    let strict = mutants::active(Mutation::IntegrateStrictLevels);
    let mut total = Ext::zero();
    let mut previous = S::zero();
    for v in g.finite_positive_values() {
        let level = Ext::Finite(v.clone());
        let set = if strict { g.level_set_gt(&level) } else { g.level_set_ge(&level) };
        let step = Ext::Finite(v.clone() - previous);
        total = total + step * nu.value(&set)?.clone();
        previous = v;
    }
    let top = g.level_set_ge(&Ext::Infinite);
    total = total + Ext::Infinite * nu.value(&top)?.clone();
    Ok(total)
}

/// `f_*ν(U) = ν(f⁻¹U)`.
pub fn pushforward<S: Scalar>(f: &ContinuousMap, nu: &Valuation<S>) -> Result<Valuation<S>, ValuationError> {
    if f.source() != &nu.space {
        return Err(ValuationError::ShapeMismatch("valuation does not live on the source of f".into()));
    }
    let table = f.target().opens().iter().map(|u| nu.value(&f.preimage(u)).cloned()).collect::<Result<Vec<_>, _>>()?;
    Ok(Valuation { space: f.target().clone(), table })
}

/// `⟨f_*ν, g⟩ = ⟨ν, g ∘ f⟩`.
pub fn pushforward_integral_agrees<S: Scalar>(
    f: &ContinuousMap,
    nu: &Valuation<S>,
    g: &LowerSemiFn<S>,
) -> Result<bool, ValuationError> {
    let pushed = pushforward(f, nu)?;
    Ok(integrate(&pushed, g)? == integrate(nu, &g.precompose(f)?)?)
}

/// `δ : X → VX`.
pub fn unit_delta<S: Scalar>(space: &FiniteSpace, x: usize) -> Valuation<S> {
    Valuation::dirac(space, x)
}

/// Whether `x ↦ δ_x` is injective.
pub fn delta_is_injective(space: &FiniteSpace) -> bool {
    let mut seen: Vec<Valuation<num_rational::BigRational>> = Vec::new();
    for x in 0..space.len() {
        let d = Valuation::dirac(space, x);
        if seen.contains(&d) {
            return false;
        }
        seen.push(d);
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::product;
    use num_rational::BigRational;

    type Q = Ext<BigRational>;

    fn q(n: i64, d: i64) -> Q {
        Q::ratio(n, d)
    }

    fn sierpinski_half() -> Valuation<BigRational> {
        Valuation::from_weights(&FiniteSpace::sierpinski(), &[q(1, 2), q(1, 2)]).unwrap()
    }

    #[test]
    fn weights_examples() {
        let s = FiniteSpace::sierpinski();
        let d = Valuation::<BigRational>::from_weights(&s, &[q(0, 1), q(1, 1)]).unwrap();
        assert_eq!(d, Valuation::dirac(&s, 1));
        assert!(Valuation::<BigRational>::from_weights(&s, &[q(0, 1), q(0, 1)]).unwrap().is_zero());
        let nu = sierpinski_half();
        assert_eq!(nu.value(&PointSet::singleton(2, 1)).unwrap(), &q(1, 2));
        assert_eq!(nu.total(), &q(1, 1));
    }

    #[test]
    fn validation_examples() {
        let s = FiniteSpace::sierpinski();
        let nu = sierpinski_half();
        assert!(Valuation::validate(&s, nu.table().to_vec()).is_ok());
        // opens in canonical order
        let mut table = vec![Q::zero(); 3];
        table[s.open_index(&PointSet::singleton(2, 1)).unwrap()] = q(1, 1);
        table[s.open_index(&s.full_set()).unwrap()] = q(1, 2);
        assert!(matches!(Valuation::validate(&s, table), Err(ValuationError::NotMonotone { .. })));
        let d = FiniteSpace::discrete(2);
        let mut table = vec![q(1, 1); 4];
        table[d.open_index(&d.empty_set()).unwrap()] = Q::zero();
        assert!(matches!(Valuation::validate(&d, table), Err(ValuationError::NotModular { .. })));
        let mut table = vec![q(1, 1); 4];
        table[d.open_index(&d.empty_set()).unwrap()] = q(1, 3);
        assert!(matches!(Valuation::validate(&d, table), Err(ValuationError::NotStrict(_))));
    }

    #[test]
    fn lsc_validation() {
        let s = FiniteSpace::sierpinski();
        assert!(LowerSemiFn::new(&s, vec![q(1, 1), q(2, 1)]).is_ok());
        assert!(matches!(
            LowerSemiFn::new(&s, vec![q(2, 1), q(1, 1)]),
            Err(ValuationError::NotLowerSemicontinuous { .. })
        ));
        assert!(LowerSemiFn::<BigRational>::indicator(&s, &PointSet::singleton(2, 0)).is_err());
    }

    #[test]
    fn integrate_examples() {
        let s = FiniteSpace::sierpinski();
        let g = LowerSemiFn::new(&s, vec![q(1, 1), q(2, 1)]).unwrap();
        assert_eq!(integrate(&sierpinski_half(), &g).unwrap(), q(3, 2));
        for x in 0..2 {
            assert_eq!(&integrate(&Valuation::dirac(&s, x), &g).unwrap(), g.at(x));
        }
        let nu = sierpinski_half();
        for u in s.opens() {
            let ind = LowerSemiFn::indicator(&s, u).unwrap();
            assert_eq!(&integrate(&nu, &ind).unwrap(), nu.value(u).unwrap());
        }
        let inf = LowerSemiFn::new(&s, vec![q(0, 1), Q::Infinite]).unwrap();
        assert_eq!(integrate(&nu, &inf).unwrap(), Q::Infinite);
        assert_eq!(integrate(&Valuation::dirac(&s, 0), &inf).unwrap(), Q::zero());
        let e = FiniteSpace::empty();
        assert_eq!(
            integrate(&Valuation::<BigRational>::zero(&e), &LowerSemiFn::constant(&e, q(5, 1))).unwrap(),
            Q::zero()
        );
    }

    #[test]
    fn pushforward_examples() {
        let s = FiniteSpace::sierpinski();
        let nu = sierpinski_half();
        assert_eq!(pushforward(&ContinuousMap::identity(&s), &nu).unwrap(), nu);
        let d = FiniteSpace::discrete(2);
        let f = ContinuousMap::constant(&d, &s, 1);
        let dx = Valuation::<BigRational>::dirac(&d, 0);
        assert_eq!(pushforward(&f, &dx).unwrap(), Valuation::dirac(&s, 1));
        let g = LowerSemiFn::new(&s, vec![q(1, 3), q(5, 2)]).unwrap();
        let w = Valuation::from_weights(&d, &[q(1, 4), q(3, 4)]).unwrap();
        assert!(pushforward_integral_agrees(&f, &w, &g).unwrap());
        assert!(pushforward(&f, &nu).is_err());
    }

    #[test]
    fn delta_injectivity_tracks_t0() {
        assert!(delta_is_injective(&FiniteSpace::sierpinski()));
        assert!(!delta_is_injective(&FiniteSpace::indiscrete(2)));
        let i2 = FiniteSpace::indiscrete(2);
        let d = Valuation::<BigRational>::dirac(&i2, 0);
        assert_eq!(d.table(), &[Q::zero(), q(1, 1)]);
    }

    #[test]
    fn product_space_valuations_use_product_opens() {
        let s = FiniteSpace::sierpinski();
        let ss = product(&s, &s);
        let nu = Valuation::<BigRational>::from_weights(&ss.space, &vec![q(1, 4); 4]).unwrap();
        assert_eq!(nu.table().len(), 6);
        assert_eq!(nu.total(), &q(1, 1));
    }

    #[test]
    fn float_valuations_work_for_exploration() {
        let s = FiniteSpace::sierpinski();
        let nu = Valuation::<f64>::from_weights(&s, &[ExtNonneg::Finite(0.5), ExtNonneg::Finite(0.5)]).unwrap();
        let g = LowerSemiFn::new(&s, vec![ExtNonneg::Finite(1.0), ExtNonneg::Finite(2.0)]).unwrap();
        assert_eq!(integrate(&nu, &g).unwrap(), ExtNonneg::Finite(1.5));
    }
}
