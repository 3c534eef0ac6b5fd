//! The support `supp : VX → HX` and checks of its compatibility with the
//! monad, strength and algebra structure.

use serde::Serialize;

use crate::hyperspace::{
    build_hyperspace, check_h_algebra, closed_of_functional, costrength_h, mult_union, product_closed, push_closed,
    strength_h, unit_sigma, ClosedSet, HitFunctional, Hyperspace, HyperspaceError,
};
use crate::mutants::{self, Mutation};
use crate::pointset::PointSet;
use crate::probability::{extend_to_measure, ProbabilityError};
use crate::scalar::{ExtNonneg, Scalar};
use crate::space::{ContinuousMap, FiniteSpace, ProductSpace};
use crate::valuation::{
    costrength_v, integrate, mult_e, product_valuation, pushforward, strength_v, LowerSemiFn, SimpleSecondOrder,
    Valuation, ValuationError,
};

type Ext<S> = ExtNonneg<S>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SupportError {
    #[error("structure map is not an H-algebra")]
    NotAnHAlgebra,
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("anomaly: {0}")]
    Anomaly(String),
    #[error(transparent)]
    Valuation(#[from] ValuationError),
    #[error(transparent)]
    Hyperspace(#[from] HyperspaceError),
    #[error(transparent)]
    Probability(#[from] ProbabilityError),
}

/// `supp ν`: the complement of the union of all `ν`-null opens.
pub fn support<S: Scalar>(nu: &Valuation<S>) -> ClosedSet {
    let space = nu.space();
    let first_only = mutants::active(Mutation::SupportFirstNullOpen);
    let mut null = space.empty_set();
    for (u, v) in space.opens().iter().zip(nu.table()) {
        if v.is_zero() && !u.is_empty() {
            null.union_with(u);
            if first_only {
                break;
            }
        }
    }
    ClosedSet::new(space, null.complement()).expect("complement of an open")
}

/// `⟨C, U⟩ = ⟦ν(U) > 0⟧` for every open `U`.
pub fn has_support_property<S: Scalar>(nu: &Valuation<S>, c: &ClosedSet) -> bool {
    c.space() == nu.space()
        && nu.space().opens().iter().zip(nu.table()).all(|(u, v)| c.members().intersects(u) == !v.is_zero())
}

/// The support read off the hit functional `U ↦ sgn ν(U)`.
pub fn support_via_sign<S: Scalar>(nu: &Valuation<S>) -> Result<ClosedSet, SupportError> {
    let table = nu.table().iter().map(Ext::sgn).collect();
    Ok(closed_of_functional(&HitFunctional::new(nu.space(), table)?))
}

/// `sgn⟨ν, g⟩`, checked against `⟨supp ν, {g > 0}⟩`.
pub fn support_test_lsc<S: Scalar>(nu: &Valuation<S>, g: &LowerSemiFn<S>) -> Result<bool, SupportError> {
    if nu.space() != g.space() {
        return Err(SupportError::ShapeMismatch("valuation and function live on different spaces".into()));
    }
    let lhs = integrate(nu, g)?.sgn();
    let rhs = support(nu).members().intersects(&g.level_set_gt(&Ext::zero()));
    if lhs != rhs {
        return Err(SupportError::Anomaly(format!("sgn⟨ν, g⟩ = {lhs} but supp ν hits {{g > 0}} is {rhs}")));
    }
    Ok(lhs)
}

/// The smallest closed set of full measure for the extended measure of `ν`.
pub fn measure_support<S: Scalar>(nu: &Valuation<S>) -> Result<ClosedSet, SupportError> {
    let m = extend_to_measure(nu)?;
    let space = nu.space();
    let total = m.total();
    let mut meet = space.full_set();
    for c in space.closed_sets() {
        let image = match m.quotient() {
            Some(q) => q.image(&c),
            None => c.clone(),
        };
        if m.measure_of(&image) == total {
            meet.intersect_with(&c);
        }
    }
    Ok(ClosedSet::new(space, meet)?)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub space: String,
    pub valuations: Vec<String>,
    pub open: Option<Vec<String>>,
    pub left: String,
    pub right: String,
}

/// Per-diagram results for one instance. A failed check always comes with
/// the first counterexample found.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MorphismVerdict {
    pub instance: String,
    pub checks: Vec<(String, bool)>,
    pub counterexample: Option<Counterexample>,
}

impl MorphismVerdict {
    fn new(instance: impl Into<String>) -> Self {
        MorphismVerdict { instance: instance.into(), checks: Vec::new(), counterexample: None }
    }

    pub fn holds(&self) -> bool {
        self.checks.iter().all(|(_, ok)| *ok)
    }

    fn record(&mut self, name: &str, ok: bool, witness: impl FnOnce() -> Counterexample) {
        match self.checks.iter_mut().find(|(n, _)| n == name) {
            Some(entry) => entry.1 &= ok,
            None => self.checks.push((name.to_owned(), ok)),
        }
        if !ok && self.counterexample.is_none() {
            self.counterexample = Some(witness());
        }
    }

    /// Folds another verdict's checks into this one.
    pub fn absorb(&mut self, other: MorphismVerdict) {
        for (name, ok) in other.checks {
            match self.checks.iter_mut().find(|(n, _)| *n == name) {
                Some(entry) => entry.1 &= ok,
                None => self.checks.push((name, ok)),
            }
        }
        if self.counterexample.is_none() {
            self.counterexample = other.counterexample;
        }
    }
}

fn closed_witness<S: Scalar>(
    space: &FiniteSpace,
    valuations: &[&Valuation<S>],
    open: Option<&PointSet>,
    left: &ClosedSet,
    right: &ClosedSet,
) -> Counterexample {
    Counterexample {
        space: format!("{space:?}"),
        valuations: valuations.iter().map(|v| format!("{v:?}")).collect(),
        open: open.map(|u| space.render(u)),
        left: format!("{:?}", left.render()),
        right: format!("{:?}", right.render()),
    }
}

/// `supp⁻¹(Hit(U)) = θ(U, 0)` over `family`, for every open `U`.
pub fn check_supp_continuity<S: Scalar>(space: &FiniteSpace, family: &[Valuation<S>]) -> MorphismVerdict {
    let mut verdict = MorphismVerdict::new(format!("continuity on {} valuations", family.len()));
    let supports: Vec<ClosedSet> = family.iter().map(support).collect();
    for u in space.opens() {
        for (nu, c) in family.iter().zip(&supports) {
            let via_hit = c.members().intersects(u);
            let via_theta = nu.value(u).map(|v| !v.is_zero()).unwrap_or(false);
            verdict.record("preimage-of-hit", via_hit == via_theta, || Counterexample {
                space: format!("{space:?}"),
                valuations: vec![format!("{nu:?}")],
                open: Some(space.render(u)),
                left: format!("hit: {via_hit}"),
                right: format!("ν(U) > 0: {via_theta}"),
            });
        }
    }
    verdict
}

/// `supp(f_*ν) = f♯(supp ν)`.
pub fn check_supp_naturality<S: Scalar>(f: &ContinuousMap, nu: &Valuation<S>) -> Result<MorphismVerdict, SupportError> {
    if f.source() != nu.space() {
        return Err(SupportError::ShapeMismatch("valuation does not live on the source of f".into()));
    }
    let mut verdict = MorphismVerdict::new("naturality");
    let left = support(&pushforward(f, nu)?);
    let right = push_closed(f, &support(nu))?;
    verdict.record("naturality", left == right, || closed_witness(f.target(), &[nu], None, &left, &right));
    Ok(verdict)
}

/// `𝒰 ∘ supp♯ ∘ supp` at a molecular `ξ`: the down-closure in `HX` of the
/// supports of the atoms, then the union.
pub fn supp_mult_right_route<S: Scalar>(hx: &Hyperspace, xi: &SimpleSecondOrder<S>) -> Result<ClosedSet, SupportError> {
    let mut points = PointSet::empty(hx.len());
    for (c, nu) in xi.atoms() {
        if c.is_zero() {
            continue;
        }
        points.insert(hx.point_of(&support(nu))?);
    }
    let family = hx.space().closure(&points);
    Ok(mult_union(hx, &family)?)
}

/// Unit square over every point and multiplication square over `xis`.
pub fn check_monad_morphism<S: Scalar>(
    space: &FiniteSpace,
    xis: &[SimpleSecondOrder<S>],
) -> Result<MorphismVerdict, SupportError> {
    let mut verdict = MorphismVerdict::new(format!("monad morphism with {} mixtures", xis.len()));
    for x in 0..space.len() {
        let d: Valuation<S> = Valuation::dirac(space, x);
        let left = support(&d);
        let right = unit_sigma(space, x);
        verdict.record("unit", left == right, || closed_witness(space, &[&d], None, &left, &right));
    }
    let hx = build_hyperspace(space);
    for xi in xis {
        if xi.space() != space {
            return Err(SupportError::ShapeMismatch("mixture on a different space".into()));
        }
        let left = support(&mult_e(xi));
        let right = supp_mult_right_route(&hx, xi)?;
        verdict.record("multiplication", left == right, || {
            let atoms: Vec<&Valuation<S>> = xi.atoms().iter().map(|(_, v)| v).collect();
            closed_witness(space, &atoms, None, &left, &right)
        });
    }
    Ok(verdict)
}

/// Strength, costrength, product and marginal squares for `ν` on the left
/// factor and `ρ` on the right.
pub fn check_supp_monoidal<S: Scalar>(
    prod: &ProductSpace,
    nu: &Valuation<S>,
    rho: &Valuation<S>,
) -> Result<MorphismVerdict, SupportError> {
    let mut verdict = MorphismVerdict::new("monoidal");
    let supp_nu = support(nu);
    let supp_rho = support(rho);
    for x in 0..prod.left.len() {
        let left = support(&strength_v(prod, x, rho)?);
        let right = strength_h(prod, x, &supp_rho)?;
        verdict.record("strength", left == right, || closed_witness(&prod.space, &[rho], None, &left, &right));
    }
    for y in 0..prod.right.len() {
        let left = support(&costrength_v(prod, nu, y)?);
        let right = costrength_h(prod, &supp_nu, y)?;
        verdict.record("costrength", left == right, || closed_witness(&prod.space, &[nu], None, &left, &right));
    }
    let mu = product_valuation(prod, nu, rho)?;
    let supp_mu = support(&mu);
    let right = product_closed(prod, &supp_nu, &supp_rho)?;
    verdict.record("product", supp_mu == right, || closed_witness(&prod.space, &[nu, rho], None, &supp_mu, &right));
    for (proj, factor) in [(&prod.pr1, &prod.left), (&prod.pr2, &prod.right)] {
        let left = support(&pushforward(proj, &mu)?);
        let right = push_closed(proj, &supp_mu)?;
        verdict.record("marginal", left == right, || closed_witness(factor, &[&mu], None, &left, &right));
    }
    Ok(verdict)
}

/// The `V`-algebra `e = a ∘ supp` induced by an `H`-algebra `(A, a)`, with
/// the cone operations it determines.
#[derive(Debug, Clone)]
pub struct InducedAlgebra {
    space: FiniteSpace,
    ha: Hyperspace,
    a_map: Vec<usize>,
}

/// Scalars on which the cone axioms are checked.
pub fn scalar_grid<S: Scalar>() -> Vec<Ext<S>> {
    vec![Ext::ratio(0, 1), Ext::ratio(1, 2), Ext::ratio(1, 1), Ext::ratio(2, 1), Ext::ratio(7, 3)]
}

pub fn induced_v_algebra(a_space: &FiniteSpace, a_map: &[usize]) -> Result<InducedAlgebra, SupportError> {
    if !check_h_algebra(a_space, a_map)?.is_algebra() {
        return Err(SupportError::NotAnHAlgebra);
    }
    Ok(InducedAlgebra { space: a_space.clone(), ha: build_hyperspace(a_space), a_map: a_map.to_vec() })
}

impl InducedAlgebra {
    pub fn space(&self) -> &FiniteSpace {
        &self.space
    }

    /// `e(ν) = a(supp ν)`.
    pub fn structure<S: Scalar>(&self, nu: &Valuation<S>) -> Result<usize, SupportError> {
        if nu.space() != &self.space {
            return Err(SupportError::ShapeMismatch("valuation does not live on the algebra".into()));
        }
        Ok(self.a_map[self.ha.point_of(&support(nu))?])
    }

    /// `x + y = e(δ_x + δ_y)`.
    pub fn add<S: Scalar>(&self, x: usize, y: usize) -> Result<usize, SupportError> {
        let sum = Valuation::<S>::dirac(&self.space, x).add(&Valuation::dirac(&self.space, y))?;
        self.structure(&sum)
    }

    /// `r·x = e(r·δ_x)`.
    pub fn scale<S: Scalar>(&self, r: &Ext<S>, x: usize) -> Result<usize, SupportError> {
        self.structure(&Valuation::<S>::dirac(&self.space, x).scale(r))
    }

    /// `0 = e(zero)`.
    pub fn zero<S: Scalar>(&self) -> Result<usize, SupportError> {
        self.structure(&Valuation::<S>::zero(&self.space))
    }

    /// Unit law over every point, multiplication law over `xis`, and the
    /// cone axioms and monotonicity in the scalar over [`scalar_grid`].
    pub fn verify<S: Scalar>(&self, xis: &[SimpleSecondOrder<S>]) -> Result<MorphismVerdict, SupportError> {
        let a = &self.space;
        let n = a.len();
        let mut v = MorphismVerdict::new(format!("induced V-algebra on {n} points"));
        let note = |what: String| Counterexample {
            space: format!("{a:?}"),
            valuations: Vec::new(),
            open: None,
            left: what,
            right: String::new(),
        };
        for x in 0..n {
            let ex = self.structure(&Valuation::<S>::dirac(a, x))?;
            v.record("unit", ex == x, || note(format!("e(δ_{}) = {}", a.name(x), a.name(ex))));
        }
        for xi in xis {
            let lhs = self.structure(&mult_e(xi))?;
            let mut weights = vec![Ext::<S>::zero(); n];
            for (c, nu) in xi.atoms() {
                let p = self.structure(nu)?;
                weights[p] = weights[p].clone() + c.clone();
            }
            let rhs = self.structure(&Valuation::from_weights(a, &weights)?)?;
            v.record("multiplication", lhs == rhs, || {
                note(format!("e(ℰξ) = {} but e(e_*ξ) = {}", a.name(lhs), a.name(rhs)))
            });
        }
        let zero = self.zero::<S>()?;
        let grid = scalar_grid::<S>();
        let same = |p: usize, q: usize| a.equivalent(p, q);
        for x in 0..n {
            v.record("additive-unit", same(self.add::<S>(x, zero)?, x), || note(format!("x = {}", a.name(x))));
            v.record("scalar-unit", same(self.scale(&Ext::<S>::one(), x)?, x), || note(format!("x = {}", a.name(x))));
            v.record("scalar-zero", same(self.scale(&Ext::<S>::zero(), x)?, zero), || {
                note(format!("x = {}", a.name(x)))
            });
            for y in 0..n {
                let xy = self.add::<S>(x, y)?;
                v.record("commutative", same(xy, self.add::<S>(y, x)?), || {
                    note(format!("{} + {}", a.name(x), a.name(y)))
                });
                for z in 0..n {
                    let l = self.add::<S>(xy, z)?;
                    let r = self.add::<S>(x, self.add::<S>(y, z)?)?;
                    v.record("associative", same(l, r), || {
                        note(format!("{}, {}, {}", a.name(x), a.name(y), a.name(z)))
                    });
                }
                for r in &grid {
                    let l = self.scale(r, xy)?;
                    let rr = self.add::<S>(self.scale(r, x)?, self.scale(r, y)?)?;
                    v.record("distributive-over-points", same(l, rr), || {
                        note(format!("{r}·({} + {})", a.name(x), a.name(y)))
                    });
                }
            }
            for r in &grid {
                for s in &grid {
                    let l = self.scale(&(r + s), x)?;
                    let rr = self.add::<S>(self.scale(r, x)?, self.scale(s, x)?)?;
                    v.record("distributive-over-scalars", same(l, rr), || note(format!("({r} + {s})·{}", a.name(x))));
                    let l = self.scale(&(r * s), x)?;
                    let rr = self.scale(r, self.scale(s, x)?)?;
                    v.record("scalar-associative", same(l, rr), || note(format!("({r}·{s})·{}", a.name(x))));
                    if r <= s {
                        let lo = self.scale(r, x)?;
                        let hi = self.scale(s, x)?;
                        v.record("monotone-in-scalar", a.leq(lo, hi), || {
                            note(format!("{r}·{} vs {s}·{}", a.name(x), a.name(x)))
                        });
                    }
                }
            }
        }
        Ok(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hyperspace::join_structure_map;
    use crate::space::product;
    use num_rational::BigRational;

    type Q = Ext<BigRational>;

    fn q(n: i64, d: i64) -> Q {
        Q::ratio(n, d)
    }

    #[test]
    fn support_examples() {
        let s = FiniteSpace::sierpinski();
        for x in 0..2 {
            let d = Valuation::<BigRational>::dirac(&s, x);
            assert_eq!(support(&d), unit_sigma(&s, x));
        }
        assert!(support(&Valuation::<BigRational>::zero(&s)).is_empty());
        let nu = Valuation::from_weights(&s, &[q(1, 1), q(0, 1)]).unwrap();
        assert_eq!(support(&nu).members(), &PointSet::singleton(2, 0));
        assert!(has_support_property(&nu, &support(&nu)));
        assert_eq!(support_via_sign(&nu).unwrap(), support(&nu));
        assert_eq!(measure_support(&nu).unwrap(), support(&nu));
    }

    #[test]
    fn lsc_test() {
        let s = FiniteSpace::sierpinski();
        let nu = Valuation::from_weights(&s, &[q(1, 2), q(1, 2)]).unwrap();
        let g = LowerSemiFn::new(&s, vec![q(1, 1), q(2, 1)]).unwrap();
        assert!(support_test_lsc(&nu, &g).unwrap());
        let zero = Valuation::<BigRational>::zero(&s);
        assert!(!support_test_lsc(&zero, &g).unwrap());
    }

    #[test]
    fn naturality_collapsing_discrete_pair() {
        let d = FiniteSpace::discrete(2);
        let p = FiniteSpace::point();
        let f = ContinuousMap::constant(&d, &p, 0);
        let nu = Valuation::from_weights(&d, &[q(1, 2), q(1, 2)]).unwrap();
        let v = check_supp_naturality(&f, &nu).unwrap();
        assert!(v.holds());
        assert_eq!(support(&pushforward(&f, &nu).unwrap()).members(), &p.full_set());
    }

    #[test]
    fn monad_morphism_on_mixtures() {
        let w = FiniteSpace::lattice_w();
        let nus: Vec<Valuation<BigRational>> = vec![
            Valuation::from_weights(&w, &[q(0, 1), q(1, 1), q(0, 1), q(0, 1)]).unwrap(),
            Valuation::from_weights(&w, &[q(0, 1), q(0, 1), q(2, 1), q(0, 1)]).unwrap(),
            Valuation::zero(&w),
        ];
        let xi = SimpleSecondOrder::new(&w, nus.iter().map(|n| (q(1, 3), n.clone())).collect()).unwrap();
        let single = SimpleSecondOrder::dirac(&nus[0]);
        let v = check_monad_morphism(&w, &[xi, single]).unwrap();
        assert!(v.holds(), "{v:?}");
    }

    #[test]
    fn monoidal_squares() {
        let s = FiniteSpace::sierpinski();
        let ss = product(&s, &s);
        let nu = Valuation::from_weights(&s, &[q(1, 2), q(0, 1)]).unwrap();
        let rho = Valuation::from_weights(&s, &[q(0, 1), Q::Infinite]).unwrap();
        assert!(check_supp_monoidal(&ss, &nu, &rho).unwrap().holds());
        let zero = Valuation::zero(&s);
        let v = check_supp_monoidal(&ss, &zero, &rho).unwrap();
        assert!(v.holds());
    }

    #[test]
    fn continuity_check() {
        let w = FiniteSpace::lattice_w();
        let family: Vec<Valuation<BigRational>> = (0..4).map(|x| Valuation::dirac(&w, x)).collect();
        assert!(check_supp_continuity(&w, &family).holds());
    }

    #[test]
    fn failed_verdicts_carry_counterexamples() {
        let d = FiniteSpace::discrete(3);
        let v = check_monad_morphism::<BigRational>(&d, &[]).unwrap();
        assert!(v.holds() && v.counterexample.is_none());
        let v = mutants::with_mutation(Mutation::SupportFirstNullOpen, || check_monad_morphism::<BigRational>(&d, &[]))
            .unwrap();
        assert!(!v.holds());
        let cx = v.counterexample.expect("failed verdict carries a witness");
        assert_ne!(cx.left, cx.right);
    }

    #[test]
    fn lattice_w_cone() {
        let w = FiniteSpace::lattice_w();
        let a_map = join_structure_map(&w).unwrap();
        let alg = induced_v_algebra(&w, &a_map).unwrap();
        let names = |x: usize| w.name(x).to_owned();
        let (x, y) = (w.index_of("x").unwrap(), w.index_of("y").unwrap());
        assert_eq!(names(alg.add::<BigRational>(x, y).unwrap()), "t");
        for p in 0..4 {
            assert_eq!(alg.scale(&q(1, 2), p).unwrap(), p);
            assert_eq!(names(alg.scale(&q(0, 1), p).unwrap()), "0");
        }
        let xi =
            SimpleSecondOrder::new(&w, vec![(q(1, 2), Valuation::dirac(&w, x)), (q(3, 1), Valuation::dirac(&w, y))])
                .unwrap();
        let v = alg.verify(&[xi]).unwrap();
        assert!(v.holds(), "{v:?}");
        let p = FiniteSpace::point();
        let alg = induced_v_algebra(&p, &join_structure_map(&p).unwrap()).unwrap();
        assert!(alg.verify::<BigRational>(&[]).unwrap().holds());
        assert!(matches!(induced_v_algebra(&w, &[0; 6][..a_map.len()]), Err(SupportError::NotAnHAlgebra)));
    }
}
