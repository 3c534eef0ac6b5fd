//! `p-submonad`, `p-extension`, `p-product`.

use super::*;
use crate::lawcheck::{ensure, CheckResult, MixtureSpec};
use crate::probability::{
    a_topology_membership, extend_to_measure, integrate_measure, marginals, mult_e_measure, product_measure,
    ProbValuation,
};
use crate::scalar::Scalar;
use crate::space::{check_separation, product};
use crate::support::{measure_support, support};
use crate::valuation::{integrate, mult_e, pushforward};

pub(super) fn gen_submonad(g: &mut Gen) -> Instance {
    let x = g.nonempty_primary_space();
    let y = target_for(g, &x, 3);
    let spaces = [&x, &y];
    let mut inst = instance(&spaces, g.seed());
    inst.maps = vec![map_spec(g, &spaces, 0, 1)];
    inst.valuations = vec![values(0, g.probability_weights(x.len()))];
    inst.mixtures = vec![MixtureSpec { space: 0, atoms: g.probability_mixture(&x, 3) }];
    inst.scalars = vec![g.finite_weight(true)];
    inst
}

pub(super) fn check_submonad(inst: &Instance) -> CheckResult {
    let b = inst.build()?;
    let (x, f) = (&b.spaces[0], &b.maps[0]);
    let nu = &b.valuations[0];
    let p = ProbValuation::new(nu.clone()).map_err(prob_err)?;
    let one = Q::one();

    for q in 0..x.len() {
        ensure!(ProbValuation::<BigRational>::dirac(x, q).underlying().total() == &one, "δ is not a probability");
    }
    let pushed = p.push(f)?;
    ensure!(*pushed.underlying() == pushforward(f, nu)?, "P(f) differs from V(f)");
    ensure!(pushed.underlying().total() == &one, "pushforward lost mass");

    let xi = &b.mixtures[0];
    let e = mult_e_measure(xi).map_err(prob_err)?;
    ensure!(*e.underlying() == mult_e(xi), "E on probabilities differs from ℰ");
    ensure!(e.underlying().total() == &one, "E(μ) is not normalized");

    let doubled = nu.scale(&Q::Finite(BigRational::from_integer(2.into())));
    ensure!(ProbValuation::new(doubled).is_err(), "a valuation of mass 2 was accepted");
    ensure!(ProbValuation::new(nu.clone()).is_ok(), "a probability valuation was rejected");

    let r = match b.scalars.first() {
        Some(Q::Finite(r)) => r.clone(),
        _ => BigRational::from_integer(0.into()),
    };
    for u in x.opens() {
        let member = a_topology_membership(&p, u, &r)?;
        ensure!(member == (nu.value(u)? > &Q::Finite(r.clone())), "A-topology membership wrong at {:?}", x.render(u));
    }
    Ok(())
}

pub(super) fn gen_extension(g: &mut Gen) -> Instance {
    let x = g.primary_space();
    let mut inst = instance(&[&x], g.seed());
    let w = g.finite_weights(x.len());
    let mut with_inf = w.clone();
    if !with_inf.is_empty() {
        let i = g.rng.gen_range(0..with_inf.len());
        with_inf[i] = Q::Infinite;
    }
    inst.valuations = vec![values(0, w), values(0, with_inf)];
    inst.functions = vec![values(0, g.lsc_values(&x))];
    inst
}

pub(super) fn check_extension(inst: &Instance) -> CheckResult {
    let b = inst.build()?;
    let x = &b.spaces[0];
    let nu = &b.valuations[0];
    let weights: Vec<BigRational> = inst.valuations[0]
        .values
        .iter()
        .map(|w| w.as_finite().cloned().ok_or_else(|| CheckError::Skip("infinite weight".into())))
        .collect::<Result<_, _>>()?;

    let m = extend_to_measure(nu)?;
    ensure!(m.point_weights().iter().all(|w| !w.is_negative_value()), "negative extended weight");
    match m.quotient() {
        None => {
            ensure!(check_separation(x).is_t0, "no quotient taken on a non-T0 space");
            ensure!(m.point_weights() == weights.as_slice(), "extended weights differ from the generating weights");
            ensure!(m.to_valuation() == *nu, "extension does not restrict to ν");
            for p in 0..x.len() {
                let up = x.min_nbhd(p);
                let mut strict = up.clone();
                strict.remove(p);
                let diff = match (nu.value(up)?, nu.value(&strict)?) {
                    (Q::Finite(a), Q::Finite(c)) => a - c,
                    _ => return Err(CheckError::Fail("infinite value of a finite valuation".into())),
                };
                ensure!(diff == m.point_weights()[p], "w_x ≠ ν(↑x) − ν(↑x ∖ {{x}})");
            }
        }
        Some(q) => {
            let mut sums = vec![BigRational::from_integer(0.into()); q.target().len()];
            for (p, w) in weights.iter().enumerate() {
                sums[q.apply(p)] += w;
            }
            ensure!(m.point_weights() == sums.as_slice(), "quotient weights differ from the class sums");
            ensure!(m.to_valuation() == pushforward(q, nu)?, "extension does not restrict to the pushed valuation");
        }
    }
    let g = &b.functions[0];
    ensure!(integrate_measure(&m, g)? == integrate(nu, g)?, "measure integral differs from the valuation integral");
    let supp = support(nu);
    ensure!(measure_support(nu)? == supp, "measure support differs from the valuation support");
    ensure!(*supp.members() == weight_support(x, &inst.valuations[0].values), "support differs from the weight oracle");

    let with_inf = &b.valuations[1];
    if with_inf.total().is_infinite() {
        ensure!(
            matches!(extend_to_measure(with_inf), Err(ProbabilityError::InfiniteMass)),
            "infinite mass was not rejected"
        );
    }
    Ok(())
}

pub(super) fn gen_product(g: &mut Gen) -> Instance {
    let x = g.nonempty_primary_space();
    let x = if x.len() > 3 { g.nonempty_space_at_most(3) } else { x };
    let y = g.nonempty_space_at_most(PRODUCT_CAP / x.len().max(1));
    let mut inst = instance(&[&x, &y], g.seed());
    inst.valuations = vec![values(0, g.probability_weights(x.len())), values(1, g.probability_weights(y.len()))];
    inst
}

pub(super) fn check_product(inst: &Instance) -> CheckResult {
    let b = inst.build()?;
    let (x, y) = (&b.spaces[0], &b.spaces[1]);
    let p = ProbValuation::new(b.valuations[0].clone()).map_err(prob_err)?;
    let q = ProbValuation::new(b.valuations[1].clone()).map_err(prob_err)?;
    let prod = product(x, y);
    let mu = product_measure(&prod, &p, &q)?;
    ensure!(mu.underlying().total() == &Q::one(), "product is not normalized");
    let (a, c) = marginals(&prod, &mu)?;
    ensure!(a == p && c == q, "marginals of p ⊗ q are not p and q");
    let (wp, wq) = (&inst.valuations[0].values, &inst.valuations[1].values);
    let mut w = vec![Q::zero(); prod.space.len()];
    for i in 0..x.len() {
        for j in 0..y.len() {
            w[prod.pair(i, j)] = wp[i].clone() * wq[j].clone();
        }
    }
    ensure!(*mu.underlying() == Valuation::from_weights(&prod.space, &w)?, "product differs from the weight product");
    Ok(())
}
