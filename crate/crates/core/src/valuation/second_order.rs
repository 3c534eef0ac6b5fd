//! Simple second- and third-order valuations and the multiplication `ℰ`.

use std::fmt;

use super::{integrate, Ext, LowerSemiFn, Valuation, ValuationError};
use crate::mutants::{self, Mutation};
use crate::scalar::Scalar;
use crate::space::FiniteSpace;

/// `ξ = Σⱼ cⱼ·δ_{νⱼ}` with every `cⱼ > 0` and every `νⱼ ∈ VX`.
#[derive(Clone, PartialEq)]
pub struct SimpleSecondOrder<S> {
    space: FiniteSpace,
    atoms: Vec<(Ext<S>, Valuation<S>)>,
}

impl<S: Scalar> fmt::Debug for SimpleSecondOrder<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.atoms).finish()
    }
}

impl<S: Scalar> SimpleSecondOrder<S> {
    pub fn new(space: &FiniteSpace, atoms: Vec<(Ext<S>, Valuation<S>)>) -> Result<Self, ValuationError> {
        for (c, nu) in &atoms {
            if c.is_zero() {
                return Err(ValuationError::NonPositiveWeight(c.to_string()));
            }
            if nu.space() != space {
                return Err(ValuationError::ShapeMismatch("atom lives on a different space".into()));
            }
        }
        Ok(SimpleSecondOrder { space: space.clone(), atoms })
    }

    /// `δ_ν`.
    pub fn dirac(nu: &Valuation<S>) -> Self {
        SimpleSecondOrder { space: nu.space().clone(), atoms: vec![(Ext::one(), nu.clone())] }
    }

    /// `Σₓ wₓ·δ_{δₓ}`, the image of `Σₓ wₓ·δₓ` under `V(δ)`. Zero weights are
    /// dropped.
    pub fn lift_units(space: &FiniteSpace, weights: &[Ext<S>]) -> Result<Self, ValuationError> {
        if weights.len() != space.len() {
            return Err(ValuationError::ShapeMismatch("one weight per point expected".into()));
        }
        let atoms = weights
            .iter()
            .enumerate()
            .filter(|(_, w)| !w.is_zero())
            .map(|(x, w)| (w.clone(), Valuation::dirac(space, x)))
            .collect();
        Ok(SimpleSecondOrder { space: space.clone(), atoms })
    }

    pub fn space(&self) -> &FiniteSpace {
        &self.space
    }

    pub fn atoms(&self) -> &[(Ext<S>, Valuation<S>)] {
        &self.atoms
    }

    /// `Σⱼ cⱼ·F(νⱼ)` for a functional on `VX`.
    pub fn integrate_with<F>(&self, mut functional: F) -> Result<Ext<S>, ValuationError>
    where
        F: FnMut(&Valuation<S>) -> Result<Ext<S>, ValuationError>,
    {
        let mut total = Ext::zero();
        for (c, nu) in &self.atoms {
            total = total + c * &functional(nu)?;
        }
        Ok(total)
    }

    /// `V(f)(ξ) = Σⱼ cⱼ·δ_{f(νⱼ)}` for a map `f : VX → VY`.
    pub fn map_atoms<F>(&self, target: &FiniteSpace, mut f: F) -> Result<Self, ValuationError>
    where
        F: FnMut(&Valuation<S>) -> Result<Valuation<S>, ValuationError>,
    {
        let atoms =
            self.atoms.iter().map(|(c, nu)| Ok((c.clone(), f(nu)?))).collect::<Result<Vec<_>, ValuationError>>()?;
        SimpleSecondOrder::new(target, atoms)
    }

    /// `c·ξ`, merging nothing.
    pub fn scale(&self, c: &Ext<S>) -> Result<Self, ValuationError> {
        let atoms = self.atoms.iter().map(|(w, nu)| (c * w, nu.clone())).collect();
        SimpleSecondOrder::new(&self.space, atoms)
    }
}

/// `ℰ(ξ)(U) = Σⱼ cⱼ·νⱼ(U)`.
pub fn mult_e<S: Scalar>(xi: &SimpleSecondOrder<S>) -> Valuation<S> {
    let ignore_weights = mutants::active(Mutation::MultIgnoresWeights);
    let mut out = Valuation::zero(&xi.space);
    for (c, nu) in &xi.atoms {
        let term = if ignore_weights { nu.clone() } else { nu.scale(c) };
        out = out.add(&term).expect("atoms share the space");
    }
    out
}

/// `⟨ℰ(ξ), g⟩ = Σⱼ cⱼ·⟨νⱼ, g⟩`.
pub fn mult_e_integral_agrees<S: Scalar>(
    xi: &SimpleSecondOrder<S>,
    g: &LowerSemiFn<S>,
) -> Result<bool, ValuationError> {
    let lhs = integrate(&mult_e(xi), g)?;
    let rhs = xi.integrate_with(|nu| integrate(nu, g))?;
    Ok(lhs == rhs)
}

/// `Ξ = Σₖ cₖ·δ_{ξₖ}` with `ξₖ` simple second-order valuations on `X`.
#[derive(Clone, PartialEq)]
pub struct SimpleThirdOrder<S> {
    space: FiniteSpace,
    atoms: Vec<(Ext<S>, SimpleSecondOrder<S>)>,
}

impl<S: Scalar> fmt::Debug for SimpleThirdOrder<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.atoms).finish()
    }
}

impl<S: Scalar> SimpleThirdOrder<S> {
    pub fn new(space: &FiniteSpace, atoms: Vec<(Ext<S>, SimpleSecondOrder<S>)>) -> Result<Self, ValuationError> {
        for (c, xi) in &atoms {
            if c.is_zero() {
                return Err(ValuationError::NonPositiveWeight(c.to_string()));
            }
            if xi.space() != space {
                return Err(ValuationError::ShapeMismatch("atom lives on a different space".into()));
            }
        }
        Ok(SimpleThirdOrder { space: space.clone(), atoms })
    }

    pub fn atoms(&self) -> &[(Ext<S>, SimpleSecondOrder<S>)] {
        &self.atoms
    }

    /// `ℰ_{VX}(Ξ) = Σₖ cₖ·ξₖ`, flattened into one simple second-order valuation.
    pub fn flatten(&self) -> Result<SimpleSecondOrder<S>, ValuationError> {
        let mut atoms = Vec::new();
        for (c, xi) in &self.atoms {
            atoms.extend(xi.scale(c)?.atoms);
        }
        SimpleSecondOrder::new(&self.space, atoms)
    }

    /// `V(ℰ_X)(Ξ) = Σₖ cₖ·δ_{ℰ(ξₖ)}`.
    pub fn map_mult(&self) -> Result<SimpleSecondOrder<S>, ValuationError> {
        let atoms = self.atoms.iter().map(|(c, xi)| (c.clone(), mult_e(xi))).collect();
        SimpleSecondOrder::new(&self.space, atoms)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    type Q = Ext<BigRational>;

    fn q(n: i64, d: i64) -> Q {
        Q::ratio(n, d)
    }

    #[test]
    fn mult_examples() {
        let s = FiniteSpace::sierpinski();
        let d0 = Valuation::dirac(&s, 0);
        let d1 = Valuation::dirac(&s, 1);
        let xi = SimpleSecondOrder::new(&s, vec![(q(1, 2), d0.clone()), (q(1, 2), d1.clone())]).unwrap();
        let half = Valuation::from_weights(&s, &[q(1, 2), q(1, 2)]).unwrap();
        assert_eq!(mult_e(&xi), half);
        assert_eq!(mult_e(&SimpleSecondOrder::dirac(&half)), half);
        let units = SimpleSecondOrder::lift_units(&s, &[q(1, 2), q(1, 2)]).unwrap();
        assert_eq!(mult_e(&units), half);
        let g = LowerSemiFn::new(&s, vec![q(1, 1), Q::Infinite]).unwrap();
        assert!(mult_e_integral_agrees(&xi, &g).unwrap());
        assert!(SimpleSecondOrder::new(&s, vec![(Q::zero(), d0)]).is_err());
    }

    #[test]
    fn associativity_on_a_tower() {
        let s = FiniteSpace::sierpinski();
        let d0 = Valuation::dirac(&s, 0);
        let d1 = Valuation::dirac(&s, 1);
        let xi1 = SimpleSecondOrder::new(&s, vec![(q(1, 3), d0.clone()), (q(2, 1), d1.clone())]).unwrap();
        let xi2 = SimpleSecondOrder::new(&s, vec![(Q::Infinite, d1)]).unwrap();
        let tower = SimpleThirdOrder::new(&s, vec![(q(3, 4), xi1), (q(5, 1), xi2)]).unwrap();
        assert_eq!(mult_e(&tower.flatten().unwrap()), mult_e(&tower.map_mult().unwrap()));
    }

    #[test]
    fn weights_matter() {
        let s = FiniteSpace::sierpinski();
        let xi = SimpleSecondOrder::new(&s, vec![(q(1, 4), Valuation::dirac(&s, 1))]).unwrap();
        let lhs = mult_e(&xi);
        let rhs = mutants::with_mutation(Mutation::MultIgnoresWeights, || mult_e(&xi));
        assert_ne!(lhs, rhs);
    }
}
