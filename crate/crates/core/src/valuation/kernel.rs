//! Continuous maps `X → VY` and their Kleisli composition.

use super::{integrate, Ext, LowerSemiFn, Valuation, ValuationError};
use crate::scalar::Scalar;
use crate::space::{ContinuousMap, FiniteSpace};

/// A continuous map `X → VY`, given row by row. Continuity into the weak
/// topology means `x ↦ k(x)(U)` is lower semicontinuous for each open `U`.
#[derive(Clone, PartialEq)]
pub struct Kernel<S> {
    source: FiniteSpace,
    target: FiniteSpace,
    rows: Vec<Valuation<S>>,
}

impl<S: Scalar> std::fmt::Debug for Kernel<S> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_map().entries(self.rows.iter().enumerate().map(|(x, r)| (self.source.name(x), r))).finish()
    }
}

impl<S: Scalar> Kernel<S> {
    pub fn new(source: &FiniteSpace, target: &FiniteSpace, rows: Vec<Valuation<S>>) -> Result<Self, ValuationError> {
        if rows.len() != source.len() {
            return Err(ValuationError::ShapeMismatch(format!("{} rows for {} points", rows.len(), source.len())));
        }
        if rows.iter().any(|r| r.space() != target) {
            return Err(ValuationError::ShapeMismatch("kernel row on the wrong space".into()));
        }
        for (i, u) in target.opens().iter().enumerate() {
            for (x, y) in source.specialization() {
                if rows[x].table()[i] > rows[y].table()[i] {
                    return Err(ValuationError::NotAKernel {
                        open: target.render(u),
                        below: source.name(x).to_owned(),
                        above: source.name(y).to_owned(),
                    });
                }
            }
        }
        Ok(Kernel { source: source.clone(), target: target.clone(), rows })
    }

    /// `x ↦ δ_{f(x)}`.
    pub fn from_map(f: &ContinuousMap) -> Self {
        let rows = f.assignment().iter().map(|&y| Valuation::dirac(f.target(), y)).collect();
        Kernel { source: f.source().clone(), target: f.target().clone(), rows }
    }

    pub fn unit(space: &FiniteSpace) -> Self {
        Kernel::from_map(&ContinuousMap::identity(space))
    }

    pub fn source(&self) -> &FiniteSpace {
        &self.source
    }

    pub fn target(&self) -> &FiniteSpace {
        &self.target
    }

    pub fn row(&self, x: usize) -> &Valuation<S> {
        &self.rows[x]
    }

    /// `x ↦ k(x)(U)`.
    pub fn column(&self, u: &crate::pointset::PointSet) -> Result<LowerSemiFn<S>, ValuationError> {
        let i = self.target.open_index(u).ok_or_else(|| ValuationError::NotOpen(self.target.render(u)))?;
        let values: Vec<Ext<S>> = self.rows.iter().map(|r| r.table()[i].clone()).collect();
        Ok(LowerSemiFn::from_values_unchecked(&self.source, values))
    }
}

/// `k†(ν)(U) = ⟨ν, x ↦ k(x)(U)⟩`.
pub fn bind<S: Scalar>(nu: &Valuation<S>, k: &Kernel<S>) -> Result<Valuation<S>, ValuationError> {
    if nu.space() != &k.source {
        return Err(ValuationError::ShapeMismatch("valuation does not live on the kernel's source".into()));
    }
    let table = k.target.opens().iter().map(|u| integrate(nu, &k.column(u)?)).collect::<Result<Vec<_>, _>>()?;
    Ok(Valuation::from_table_unchecked(&k.target, table))
}

/// `(k ∘ h)(x)(U) = ⟨h(x), y ↦ k(y)(U)⟩`.
pub fn kleisli_compose<S: Scalar>(k: &Kernel<S>, h: &Kernel<S>) -> Result<Kernel<S>, ValuationError> {
    if h.target != k.source {
        return Err(ValuationError::ShapeMismatch("kernels do not compose".into()));
    }
    let rows = h.rows.iter().map(|r| bind(r, k)).collect::<Result<Vec<_>, _>>()?;
    Kernel::new(&h.source, &k.target, rows)
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
    fn kernel_continuity_is_checked() {
        let s = FiniteSpace::sierpinski();
        let ok = Kernel::<BigRational>::new(&s, &s, vec![Valuation::zero(&s), Valuation::dirac(&s, 1)]);
        assert!(ok.is_ok());
        let bad = Kernel::<BigRational>::new(&s, &s, vec![Valuation::dirac(&s, 1), Valuation::zero(&s)]);
        assert!(matches!(bad, Err(ValuationError::NotAKernel { .. })));
    }

    #[test]
    fn kleisli_unit_laws() {
        let s = FiniteSpace::sierpinski();
        let half = Valuation::from_weights(&s, &[q(1, 2), q(1, 2)]).unwrap();
        let k =
            Kernel::new(&s, &s, vec![half.clone(), Valuation::from_weights(&s, &[q(0, 1), q(3, 1)]).unwrap()]).unwrap();
        let unit = Kernel::unit(&s);
        assert_eq!(kleisli_compose(&k, &unit).unwrap(), k);
        assert_eq!(kleisli_compose(&unit, &k).unwrap(), k);
        assert_eq!(bind(&half, &unit).unwrap(), half);
    }
}
