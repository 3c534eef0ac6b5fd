//! The weak topology on `VX` through its two subbases, and certificates
//! showing that a basic neighbourhood sits inside a `Θ(f, r)`.

use super::{integrate, Ext, LowerSemiFn, Valuation, ValuationError};
use crate::pointset::PointSet;
use crate::scalar::Scalar;

/// A subbasic open of `VX`. Only finite thresholds are supported.
#[derive(Clone)]
pub enum Subbasic<S> {
    /// `θ(U, r) = {ν : ν(U) > r}`.
    Theta { open: PointSet, r: S },
    /// `Θ(f, r) = {ν : ⟨ν, f⟩ > r}`.
    BigTheta { f: LowerSemiFn<S>, r: S },
}

impl<S: Scalar> std::fmt::Debug for Subbasic<S> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Subbasic::Theta { open, r } => write!(f, "θ({open:?}, {r})"),
            Subbasic::BigTheta { f: g, r } => write!(f, "Θ({g:?}, {r})"),
        }
    }
}

fn check_threshold<S: Scalar>(r: &S) -> Result<(), ValuationError> {
    if r.is_negative_value() {
        return Err(ValuationError::PreconditionFailed(format!("threshold {r} is negative")));
    }
    Ok(())
}

pub fn topology_membership<S: Scalar>(nu: &Valuation<S>, kind: &Subbasic<S>) -> Result<bool, ValuationError> {
    match kind {
        Subbasic::Theta { open, r } => {
            check_threshold(r)?;
            if open.width() != nu.space().len() {
                return Err(ValuationError::ShapeMismatch("open of the wrong width".into()));
            }
            Ok(nu.value(open)? > &Ext::Finite(r.clone()))
        }
        Subbasic::BigTheta { f, r } => {
            check_threshold(r)?;
            Ok(integrate(nu, f)? > Ext::Finite(r.clone()))
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CertificateTerm<S> {
    pub open: PointSet,
    pub coefficient: S,
    pub threshold: S,
}

/// Pairs `(Uᵢ, rᵢ)` with coefficients `cᵢ` such that `Σ cᵢ·1_{Uᵢ} ≤ f`,
/// `ν(Uᵢ) > rᵢ` and `Σ cᵢ·rᵢ > r`. Any `ρ` in every `θ(Uᵢ, rᵢ)` then has
/// `⟨ρ, f⟩ ≥ Σ cᵢ·ρ(Uᵢ) > Σ cᵢ·rᵢ > r`.
#[derive(Debug, Clone, PartialEq)]
pub struct Certificate<S> {
    pub terms: Vec<CertificateTerm<S>>,
}

pub fn portmanteau_witness<S: Scalar>(
    nu: &Valuation<S>,
    f: &LowerSemiFn<S>,
    r: &S,
) -> Result<Certificate<S>, ValuationError> {
    check_threshold(r)?;
    let total = integrate(nu, f)?;
    if total <= Ext::Finite(r.clone()) {
        return Err(ValuationError::PreconditionFailed(format!("⟨ν, f⟩ = {total} is not above {r}")));
    }
    let one = S::one();
    let top = f.level_set_ge(&Ext::Infinite);
    match nu.value(&top)? {
        Ext::Infinite => {
            return Ok(single(top, one.clone(), r.clone() + one));
        }
        Ext::Finite(m) if !m.is_zero() => {
            let half = m.clone() / S::from_ratio(2, 1);
            let coefficient = (r.clone() + one) / half.clone();
            return Ok(single(top, coefficient, half));
        }
        _ => {}
    }
    let mut layers: Vec<(PointSet, S, S)> = Vec::new();
    let mut previous = S::zero();
    for v in f.finite_positive_values() {
        let u = f.level_set_ge(&Ext::Finite(v.clone()));
        let c = v.clone() - previous;
        previous = v;
        match nu.value(&u)? {
            Ext::Infinite => {
                let threshold = r.clone() / c.clone() + one.clone();
                return Ok(single(u, c, threshold));
            }
            Ext::Finite(m) if !m.is_zero() => layers.push((u, c, m.clone())),
            _ => {}
        }
    }
    let Ext::Finite(total) = total else {
        return Err(ValuationError::CrossCheck("infinite integral without an infinite layer".into()));
    };
    let slack = total - r.clone();
    let coefficient_sum = layers.iter().fold(S::zero(), |acc, (_, c, _)| acc + c.clone());
    let mut eps = slack / coefficient_sum;
    for (_, _, m) in &layers {
        if m < &eps {
            eps = m.clone();
        }
    }
    let eps = eps / S::from_ratio(2, 1);
    let terms = layers
        .into_iter()
        .map(|(open, coefficient, m)| CertificateTerm { open, coefficient, threshold: m - eps.clone() })
        .collect();
    Ok(Certificate { terms })
}

fn single<S>(open: PointSet, coefficient: S, threshold: S) -> Certificate<S> {
    Certificate { terms: vec![CertificateTerm { open, coefficient, threshold }] }
}

/// Independent check of the certificate inequalities. Returns the first
/// violated condition.
pub fn check_certificate<S: Scalar>(
    cert: &Certificate<S>,
    nu: &Valuation<S>,
    f: &LowerSemiFn<S>,
    r: &S,
) -> Result<(), String> {
    let space = nu.space();
    let mut dominated = vec![S::zero(); space.len()];
    let mut sum = S::zero();
    for (i, t) in cert.terms.iter().enumerate() {
        if !space.is_open(&t.open) {
            return Err(format!("term {i}: set is not open"));
        }
        if t.coefficient <= S::zero() {
            return Err(format!("term {i}: coefficient {} is not positive", t.coefficient));
        }
        if t.threshold.is_negative_value() {
            return Err(format!("term {i}: threshold {} is negative", t.threshold));
        }
        let mass = nu.value(&t.open).map_err(|e| e.to_string())?;
        if mass <= &Ext::Finite(t.threshold.clone()) {
            return Err(format!("term {i}: ν(U) = {mass} is not above {}", t.threshold));
        }
        for x in t.open.iter() {
            dominated[x] = dominated[x].clone() + t.coefficient.clone();
        }
        sum = sum + t.coefficient.clone() * t.threshold.clone();
    }
    for (x, g) in dominated.into_iter().enumerate() {
        if &Ext::Finite(g.clone()) > f.at(x) {
            return Err(format!("simple function {g} exceeds f at {}", space.name(x)));
        }
    }
    if sum <= *r {
        return Err(format!("Σ cᵢ·rᵢ = {sum} is not above {r}"));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::FiniteSpace;
    use num_rational::BigRational;

    type Q = Ext<BigRational>;

    fn q(n: i64, d: i64) -> Q {
        Q::ratio(n, d)
    }

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::from_ratio(n, d)
    }

    #[test]
    fn membership() {
        let s = FiniteSpace::sierpinski();
        let nu = Valuation::from_weights(&s, &[q(1, 2), q(1, 2)]).unwrap();
        let empty = Subbasic::Theta { open: s.empty_set(), r: r(0, 1) };
        assert!(!topology_membership(&nu, &empty).unwrap());
        for u in s.opens() {
            for t in [r(0, 1), r(1, 3), r(1, 2), r(2, 1)] {
                let a = topology_membership(&nu, &Subbasic::Theta { open: u.clone(), r: t.clone() }).unwrap();
                let f = LowerSemiFn::indicator(&s, u).unwrap();
                assert_eq!(a, topology_membership(&nu, &Subbasic::BigTheta { f, r: t }).unwrap());
            }
        }
        let f = LowerSemiFn::new(&s, vec![q(1, 1), q(2, 1)]).unwrap();
        for x in 0..2 {
            let d = Valuation::dirac(&s, x);
            let member = topology_membership(&d, &Subbasic::BigTheta { f: f.clone(), r: r(3, 2) }).unwrap();
            assert_eq!(member, f.at(x) > &q(3, 2));
        }
        assert!(topology_membership(&nu, &Subbasic::Theta { open: PointSet::singleton(2, 0), r: r(0, 1) }).is_err());
    }

    #[test]
    fn witnesses() {
        let s = FiniteSpace::sierpinski();
        let nu = Valuation::from_weights(&s, &[q(1, 2), q(1, 2)]).unwrap();
        let g = LowerSemiFn::new(&s, vec![q(1, 1), q(2, 1)]).unwrap();
        let cert = portmanteau_witness(&nu, &g, &r(1, 1)).unwrap();
        assert_eq!(check_certificate(&cert, &nu, &g, &r(1, 1)), Ok(()));
        let u = PointSet::singleton(2, 1);
        let ind = LowerSemiFn::indicator(&s, &u).unwrap();
        let cert = portmanteau_witness(&nu, &ind, &r(1, 4)).unwrap();
        assert_eq!(cert.terms.len(), 1);
        assert_eq!(cert.terms[0].open, u);
        assert_eq!(check_certificate(&cert, &nu, &ind, &r(1, 4)), Ok(()));
        assert!(matches!(portmanteau_witness(&nu, &g, &r(3, 2)), Err(ValuationError::PreconditionFailed(_))));
    }

    #[test]
    fn witnesses_with_infinity() {
        let s = FiniteSpace::sierpinski();
        let nu = Valuation::from_weights(&s, &[q(1, 2), Q::Infinite]).unwrap();
        let g = LowerSemiFn::new(&s, vec![q(0, 1), q(1, 3)]).unwrap();
        let cert = portmanteau_witness(&nu, &g, &r(100, 1)).unwrap();
        assert_eq!(check_certificate(&cert, &nu, &g, &r(100, 1)), Ok(()));
        let nu = Valuation::from_weights(&s, &[q(1, 2), q(1, 5)]).unwrap();
        let g = LowerSemiFn::new(&s, vec![q(1, 1), Q::Infinite]).unwrap();
        let cert = portmanteau_witness(&nu, &g, &r(7, 1)).unwrap();
        assert_eq!(check_certificate(&cert, &nu, &g, &r(7, 1)), Ok(()));
    }

    #[test]
    fn checker_rejects_bad_certificates() {
        let s = FiniteSpace::sierpinski();
        let nu = Valuation::from_weights(&s, &[q(1, 2), q(1, 2)]).unwrap();
        let g = LowerSemiFn::new(&s, vec![q(1, 1), q(2, 1)]).unwrap();
        let greedy = Certificate {
            terms: vec![CertificateTerm { open: s.full_set(), coefficient: r(2, 1), threshold: r(1, 2) }],
        };
        assert!(check_certificate(&greedy, &nu, &g, &r(0, 1)).is_err());
        let tight = Certificate {
            terms: vec![CertificateTerm { open: s.full_set(), coefficient: r(1, 1), threshold: r(1, 1) }],
        };
        assert!(check_certificate(&tight, &nu, &g, &r(0, 1)).is_err());
        assert!(check_certificate(&Certificate { terms: vec![] }, &nu, &g, &r(0, 1)).is_err());
    }
}
