//! Probability valuations and their extension to measures on the power set.
//!
//! On a finite T0 space point closures separate points, so every subset is
//! Borel and a measure is its point weights. Non-T0 spaces are handled
//! through the Kolmogorov quotient.

use std::fmt;

use crate::mutants::{self, Mutation};
use crate::pointset::PointSet;
use crate::scalar::{ExtNonneg, Scalar};
use crate::space::{check_separation, kolmogorov_quotient, ContinuousMap, FiniteSpace, ProductSpace};
use crate::valuation::{
    mult_e, product_valuation, pushforward, LowerSemiFn, SimpleSecondOrder, Valuation, ValuationError,
};

type Ext<S> = ExtNonneg<S>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ProbabilityError {
    #[error("Möbius inversion produced weight {weight} at {point}")]
    NegativeWeight { point: String, weight: String },
    #[error("total mass is infinite")]
    InfiniteMass,
    #[error("not normalized: {0}")]
    NotNormalized(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("internal cross-check failed: {0}")]
    CrossCheck(String),
    #[error(transparent)]
    Valuation(#[from] ValuationError),
}

/// A valuation of total mass 1.
#[derive(Clone, PartialEq)]
pub struct ProbValuation<S> {
    underlying: Valuation<S>,
}

impl<S: Scalar> fmt::Debug for ProbValuation<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.underlying.fmt(f)
    }
}

impl<S: Scalar> ProbValuation<S> {
    pub fn new(underlying: Valuation<S>) -> Result<Self, ProbabilityError> {
        if underlying.total() != &Ext::one() {
            return Err(ProbabilityError::NotNormalized(format!("total mass {}", underlying.total())));
        }
        Ok(ProbValuation { underlying })
    }

    pub fn dirac(space: &FiniteSpace, x: usize) -> Self {
        ProbValuation { underlying: Valuation::dirac(space, x) }
    }

    pub fn underlying(&self) -> &Valuation<S> {
        &self.underlying
    }

    pub fn into_underlying(self) -> Valuation<S> {
        self.underlying
    }

    pub fn space(&self) -> &FiniteSpace {
        self.underlying.space()
    }

    pub fn push(&self, f: &ContinuousMap) -> Result<ProbValuation<S>, ProbabilityError> {
        ProbValuation::new(pushforward(f, &self.underlying)?)
    }
}

/// Point weights on a T0 space. When the input space was not T0, `quotient`
/// holds the map onto the Kolmogorov quotient that carries the weights.
#[derive(Clone, PartialEq)]
pub struct FiniteMeasure<S> {
    space: FiniteSpace,
    point_weights: Vec<S>,
    quotient: Option<ContinuousMap>,
}

impl<S: Scalar> fmt::Debug for FiniteMeasure<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut m = f.debug_map();
        for (x, w) in self.point_weights.iter().enumerate() {
            m.entry(&self.space.name(x), &format_args!("{w}"));
        }
        m.finish()
    }
}

impl<S: Scalar> FiniteMeasure<S> {
    pub fn new(space: &FiniteSpace, point_weights: Vec<S>) -> Result<Self, ProbabilityError> {
        if point_weights.len() != space.len() {
            return Err(ProbabilityError::ShapeMismatch("one weight per point expected".into()));
        }
        if let Some(x) = point_weights.iter().position(Scalar::is_negative_value) {
            return Err(ProbabilityError::NegativeWeight {
                point: space.name(x).to_owned(),
                weight: point_weights[x].to_string(),
            });
        }
        Ok(FiniteMeasure { space: space.clone(), point_weights, quotient: None })
    }

    /// The space the weights live on; the quotient when one was taken.
    pub fn space(&self) -> &FiniteSpace {
        &self.space
    }

    pub fn point_weights(&self) -> &[S] {
        &self.point_weights
    }

    pub fn quotient(&self) -> Option<&ContinuousMap> {
        self.quotient.as_ref()
    }

    /// `set` is a subset of [`Self::space`].
    pub fn measure_of(&self, set: &PointSet) -> S {
        set.iter().fold(S::zero(), |acc, x| acc + self.point_weights[x].clone())
    }

    pub fn total(&self) -> S {
        self.measure_of(&self.space.full_set())
    }

    /// The restriction to opens.
    pub fn to_valuation(&self) -> Valuation<S> {
        let weights: Vec<Ext<S>> = self.point_weights.iter().cloned().map(Ext::Finite).collect();
        Valuation::from_weights(&self.space, &weights).expect("weights match the space")
    }
}

/// Möbius function of the specialization order, read downwards:
/// `μ(x, y)` for `x ≤ y`, with `μ(x, x) = 1` and
/// `μ(x, y) = −Σ_{x ≤ z < y} μ(x, z)`.
fn mobius_row<S: Scalar>(space: &FiniteSpace, x: usize) -> Vec<S> {
    let n = space.len();
    let above: Vec<usize> = space.min_nbhd(x).iter().collect();
    let mut order = above.clone();
    order.sort_by_key(|&y| space.point_closure(y).len());
    let mut mu = vec![S::zero(); n];
    for &y in &order {
        if y == x {
            mu[y] = S::one();
            continue;
        }
        let mut s = S::zero();
        for &z in &above {
            if z != y && space.leq(z, y) {
                s = s + mu[z].clone();
            }
        }
        mu[y] = S::zero() - s;
    }
    mu
}

/// Point weights by Möbius inversion of `y ↦ ν(↑y)`:
/// `w_x = Σ_{y ≥ x} μ(x, y)·ν(↑y)`. The result is checked against `ν` on
/// every open.
pub fn extend_to_measure<S: Scalar>(nu: &Valuation<S>) -> Result<FiniteMeasure<S>, ProbabilityError> {
    let Ext::Finite(_) = nu.total() else {
        return Err(ProbabilityError::InfiniteMass);
    };
    let original = nu.space();
    let (space, quotient, nu) = if check_separation(original).is_t0 {
        (original.clone(), None, nu.clone())
    } else {
        let (q, map) = kolmogorov_quotient(original);
        let pushed = pushforward(&map, nu)?;
        (q, Some(map), pushed)
    };
    let drop_signs = mutants::active(Mutation::MobiusDropsSigns);
    let up_mass: Vec<S> = (0..space.len())
        .map(|y| nu.value(space.min_nbhd(y)).map(|v| v.as_finite().expect("finite total").clone()))
        .collect::<Result<_, _>>()?;
    let mut weights = Vec::with_capacity(space.len());
    for x in 0..space.len() {
        let mu = mobius_row::<S>(&space, x);
        let mut w = S::zero();
        for y in space.min_nbhd(x).iter() {
            let coefficient =
                if drop_signs && mu[y].is_negative_value() { S::zero() - mu[y].clone() } else { mu[y].clone() };
            w = w + coefficient * up_mass[y].clone();
        }
        if w.is_negative_value() {
            return Err(ProbabilityError::NegativeWeight { point: space.name(x).to_owned(), weight: w.to_string() });
        }
        weights.push(w);
    }
    let measure = FiniteMeasure { space, point_weights: weights, quotient };
    if measure.to_valuation() != nu {
        return Err(ProbabilityError::CrossCheck("extended measure disagrees with the valuation on an open".into()));
    }
    Ok(measure)
}

/// `Σ_x w_x·g(x)`. `g` may live on the measure's space or, for a quotient
/// measure, on the original space.
pub fn integrate_measure<S: Scalar>(m: &FiniteMeasure<S>, g: &LowerSemiFn<S>) -> Result<Ext<S>, ProbabilityError> {
    let values: Vec<Ext<S>> = if g.space() == &m.space {
        g.values().to_vec()
    } else {
        match &m.quotient {
            Some(q) if q.source() == g.space() => {
                let mut values = vec![Ext::zero(); m.space.len()];
                for (x, &c) in q.assignment().iter().enumerate() {
                    values[c] = g.at(x).clone();
                }
                values
            }
            _ => return Err(ProbabilityError::ShapeMismatch("function lives on a different space".into())),
        }
    };
    Ok(m.point_weights.iter().zip(values).map(|(w, v)| Ext::Finite(w.clone()) * v).sum())
}

fn ensure_probability<S: Scalar>(nu: &Valuation<S>) -> Result<(), ProbabilityError> {
    if nu.total() != &Ext::one() {
        return Err(ProbabilityError::NotNormalized(format!("atom of total mass {}", nu.total())));
    }
    Ok(())
}

/// Largest space on which measures are compared set by set rather than
/// point by point.
const POWER_SET_LIMIT: usize = 12;

/// `E(μ)` for a finite mixture of probability valuations. Computed as `ℰ` of
/// the underlying second-order valuation and as the mixture of extended
/// measures; the two must agree on every subset.
pub fn mult_e_measure<S: Scalar>(xi: &SimpleSecondOrder<S>) -> Result<ProbValuation<S>, ProbabilityError> {
    let mut weight_sum = Ext::zero();
    for (c, nu) in xi.atoms() {
        ensure_probability(nu)?;
        weight_sum = weight_sum + c.clone();
    }
    if weight_sum != Ext::one() {
        return Err(ProbabilityError::NotNormalized(format!("atom weights sum to {weight_sum}")));
    }
    let by_valuation = mult_e(xi);
    let mut mixture: Option<(FiniteSpace, Vec<S>)> = None;
    for (c, nu) in xi.atoms() {
        let m = extend_to_measure(nu)?;
        let c = c.as_finite().expect("weights sum to one").clone();
        let entry = mixture.get_or_insert_with(|| (m.space.clone(), vec![S::zero(); m.space.len()]));
        for (acc, w) in entry.1.iter_mut().zip(&m.point_weights) {
            *acc = acc.clone() + c.clone() * w.clone();
        }
    }
    let Some((space, mixed)) = mixture else {
        return Err(ProbabilityError::NotNormalized("empty mixture".into()));
    };
    let extended = extend_to_measure(&by_valuation)?;
    if space.len() <= POWER_SET_LIMIT {
        for mask in 0..(1u64 << space.len()) {
            let a = PointSet::from_mask(space.len(), mask);
            let lhs = a.iter().fold(S::zero(), |acc, x| acc + mixed[x].clone());
            if lhs != extended.measure_of(&a) {
                return Err(ProbabilityError::CrossCheck(format!("mixture disagrees on {:?}", space.render(&a))));
            }
        }
    } else if mixed != extended.point_weights {
        return Err(ProbabilityError::CrossCheck("mixture disagrees on a point".into()));
    }
    ProbValuation::new(by_valuation)
}

pub fn product_measure<S: Scalar>(
    prod: &ProductSpace,
    p: &ProbValuation<S>,
    q: &ProbValuation<S>,
) -> Result<ProbValuation<S>, ProbabilityError> {
    ProbValuation::new(product_valuation(prod, &p.underlying, &q.underlying)?)
}

/// Pushforwards along the two projections.
pub fn marginals<S: Scalar>(
    prod: &ProductSpace,
    mu: &ProbValuation<S>,
) -> Result<(ProbValuation<S>, ProbValuation<S>), ProbabilityError> {
    Ok((mu.push(&prod.pr1)?, mu.push(&prod.pr2)?))
}

/// `O(U, r) = {p : p(U) > r}`, evaluated on the extended measure.
pub fn a_topology_membership<S: Scalar>(p: &ProbValuation<S>, u: &PointSet, r: &S) -> Result<bool, ProbabilityError> {
    let space = p.space();
    if !space.is_open(u) {
        return Err(ValuationError::NotOpen(space.render(u)).into());
    }
    let m = extend_to_measure(&p.underlying)?;
    let image = match &m.quotient {
        Some(q) => q.image(u),
        None => u.clone(),
    };
    Ok(&m.measure_of(&image) > r)
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

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::from_ratio(n, d)
    }

    fn direct_weights(nu: &Valuation<BigRational>) -> Vec<BigRational> {
        let s = nu.space();
        (0..s.len())
            .map(|x| {
                let up = s.min_nbhd(x);
                let mut rest = up.clone();
                rest.remove(x);
                let a = nu.value(up).unwrap().as_finite().unwrap().clone();
                let b = nu.value(&rest).unwrap().as_finite().unwrap().clone();
                a - b
            })
            .collect()
    }

    #[test]
    fn extension_examples() {
        let s = FiniteSpace::sierpinski();
        let m = extend_to_measure(&Valuation::<BigRational>::dirac(&s, 0)).unwrap();
        assert_eq!(m.point_weights(), &[r(1, 1), r(0, 1)]);
        let nu = Valuation::from_weights(&s, &[q(2, 3), q(1, 3)]).unwrap();
        let m = extend_to_measure(&nu).unwrap();
        assert_eq!(m.point_weights(), &[r(2, 3), r(1, 3)]);
        assert_eq!(m.to_valuation(), nu);
        let g = LowerSemiFn::new(&s, vec![q(1, 1), q(2, 1)]).unwrap();
        assert_eq!(integrate_measure(&m, &g).unwrap(), q(4, 3));
        assert_eq!(crate::valuation::integrate(&nu, &g).unwrap(), q(4, 3));
        let inf = Valuation::from_weights(&s, &[Q::Infinite, q(1, 3)]).unwrap();
        assert_eq!(extend_to_measure(&inf), Err(ProbabilityError::InfiniteMass));
    }

    #[test]
    fn extension_matches_direct_formula_on_w() {
        let w = FiniteSpace::lattice_w();
        let nu = Valuation::from_weights(&w, &[q(1, 7), q(2, 1), q(0, 1), q(5, 3)]).unwrap();
        let m = extend_to_measure(&nu).unwrap();
        assert_eq!(m.point_weights(), direct_weights(&nu).as_slice());
        let bad = mutants::with_mutation(Mutation::MobiusDropsSigns, || extend_to_measure(&nu));
        assert!(bad.is_err());
    }

    #[test]
    fn non_t0_goes_through_the_quotient() {
        let i2 = FiniteSpace::indiscrete(2);
        let nu = Valuation::<BigRational>::dirac(&i2, 1);
        let m = extend_to_measure(&nu).unwrap();
        assert!(m.quotient().is_some());
        assert_eq!(m.space().len(), 1);
        assert_eq!(m.point_weights(), &[r(1, 1)]);
        let g = LowerSemiFn::constant(&i2, q(3, 1));
        assert_eq!(integrate_measure(&m, &g).unwrap(), q(3, 1));
    }

    #[test]
    fn measure_level_mixture() {
        let s = FiniteSpace::sierpinski();
        let xi =
            SimpleSecondOrder::new(&s, vec![(q(1, 2), Valuation::dirac(&s, 0)), (q(1, 2), Valuation::dirac(&s, 1))])
                .unwrap();
        let e = mult_e_measure(&xi).unwrap();
        assert_eq!(extend_to_measure(e.underlying()).unwrap().point_weights(), &[r(1, 2), r(1, 2)]);
        let single = SimpleSecondOrder::dirac(&Valuation::<BigRational>::dirac(&s, 1));
        assert_eq!(mult_e_measure(&single).unwrap(), ProbValuation::dirac(&s, 1));
        let heavy = SimpleSecondOrder::new(&s, vec![(q(2, 1), Valuation::<BigRational>::dirac(&s, 1))]).unwrap();
        assert!(matches!(mult_e_measure(&heavy), Err(ProbabilityError::NotNormalized(_))));
    }

    #[test]
    fn products_and_marginals() {
        let s = FiniteSpace::sierpinski();
        let ss = product(&s, &s);
        let u = ProbValuation::new(Valuation::from_weights(&s, &[q(1, 2), q(1, 2)]).unwrap()).unwrap();
        let pm = product_measure(&ss, &u, &u).unwrap();
        assert_eq!(extend_to_measure(pm.underlying()).unwrap().point_weights(), vec![r(1, 4); 4].as_slice());
        let (a, b) = marginals(&ss, &pm).unwrap();
        assert_eq!(a, u);
        assert_eq!(b, u);
        let d =
            product_measure(&ss, &ProbValuation::dirac(&s, 0), &ProbValuation::<BigRational>::dirac(&s, 1)).unwrap();
        assert_eq!(d, ProbValuation::dirac(&ss.space, ss.pair(0, 1)));
    }

    #[test]
    fn a_topology_agrees_with_theta() {
        let w = FiniteSpace::lattice_w();
        let p =
            ProbValuation::new(Valuation::from_weights(&w, &[q(1, 4), q(1, 4), q(0, 1), q(1, 2)]).unwrap()).unwrap();
        for u in w.opens() {
            for t in [r(0, 1), r(1, 4), r(1, 2), r(3, 4)] {
                let theta = p.underlying().value(u).unwrap() > &Ext::Finite(t.clone());
                assert_eq!(a_topology_membership(&p, u, &t).unwrap(), theta);
            }
        }
    }
}
