//! `supp-*`, `algebra-transfer`, `appendixC-morphism-equivalence`.

use super::*;
use crate::hyperspace::{
    build_hyperspace, join_of, join_structure_map, mult_union, push_closed, unit_sigma, CommutativityContext,
};
use crate::lawcheck::gen::random_finite_rational;
use crate::lawcheck::{ensure, CheckResult, MixtureSpec};
use crate::space::{check_separation, product};
use crate::support::{
    check_monad_morphism, check_supp_continuity, check_supp_monoidal, check_supp_naturality, has_support_property,
    induced_v_algebra, supp_mult_right_route, support, support_test_lsc, support_via_sign, MorphismVerdict,
};
use crate::valuation::{mult_e, pushforward, LowerSemiFn, SimpleSecondOrder};

/// Free algebras `(HX, 𝒰)` are checked when `HX` has at most this many points.
const FREE_ALGEBRA_LIMIT: usize = 6;

fn holds(v: &MorphismVerdict) -> CheckResult {
    if v.holds() {
        return Ok(());
    }
    let failed: Vec<&str> = v.checks.iter().filter(|(_, ok)| !ok).map(|(n, _)| n.as_str()).collect();
    Err(CheckError::Fail(format!("{}: {failed:?} fail; {:?}", v.instance, v.counterexample)))
}

pub(super) fn gen_unit(g: &mut Gen) -> Instance {
    let x = g.primary_space();
    let mut inst = instance(&[&x], g.seed());
    inst.valuations = (0..3).map(|_| values(0, g.weights(x.len()))).collect();
    inst.functions = vec![values(0, g.lsc_values(&x))];
    inst.scalars = vec![g.weight(false)];
    inst
}

pub(super) fn check_unit(inst: &Instance) -> CheckResult {
    let b = inst.build()?;
    let x = &b.spaces[0];
    let g: &LowerSemiFn<BigRational> = &b.functions[0];

    for (nu, spec) in b.valuations.iter().zip(&inst.valuations) {
        let s = support(nu);
        ensure!(
            *s.members() == weight_support(x, &spec.values),
            "supp ν = {:?}, expected the closure of the weighted points",
            s.render()
        );
        ensure!(has_support_property(nu, &s), "supp ν does not hit exactly the non-null opens");
        ensure!(support_via_sign(nu)? == s, "support via the sign functional differs");
        support_test_lsc(nu, g)?;
    }
    for p in 0..x.len() {
        ensure!(support(&Valuation::<BigRational>::dirac(x, p)) == unit_sigma(x, p), "supp δ_x ≠ cl{{x}}");
    }
    ensure!(support(&Valuation::<BigRational>::zero(x)).is_empty(), "supp 0 ≠ ∅");
    holds(&check_supp_continuity(x, &b.valuations))?;

    let (nu, rho) = (&b.valuations[0], &b.valuations[1]);
    let sum = nu.add(rho)?;
    let mut both = support(nu).members().clone();
    both.union_with(support(rho).members());
    ensure!(*support(&sum).members() == both, "supp(ν + ρ) ≠ supp ν ∪ supp ρ");
    ensure!(support(nu).is_subset(&support(&sum)), "supp is not monotone");
    let c = b.scalars.first().cloned().unwrap_or_else(Q::one);
    let expected = if c.is_zero() { ClosedSetOf::empty(x) } else { support(nu) };
    ensure!(support(&nu.scale(&c)) == expected, "supp(c·ν) wrong");
    ensure!(support(&nu.scale(&Q::zero())).is_empty(), "supp(0·ν) ≠ ∅");
    Ok(())
}

use crate::hyperspace::ClosedSet as ClosedSetOf;

pub(super) fn gen_mult(g: &mut Gen) -> Instance {
    let x = g.primary_space();
    let mut inst = instance(&[&x], g.seed());
    inst.mixtures = (0..2).map(|_| MixtureSpec { space: 0, atoms: g.mixture_atoms(&x, 3) }).collect();
    inst
}

pub(super) fn check_mult(inst: &Instance) -> CheckResult {
    let b = inst.build()?;
    let x = &b.spaces[0];
    holds(&check_monad_morphism(x, &b.mixtures)?)?;
    let hx = build_hyperspace(x);
    for (xi, spec) in b.mixtures.iter().zip(&inst.mixtures) {
        let atoms: Vec<(Q, &[Q])> = spec.atoms.iter().map(|(c, w)| (c.clone(), w.as_slice())).collect();
        let mixed: Vec<Q> = (0..x.len()).map(|p| atoms.iter().map(|(c, w)| c.clone() * w[p].clone()).sum()).collect();
        let oracle = weight_support(x, &mixed);
        ensure!(*support(&mult_e(xi)).members() == oracle, "supp ℰξ differs from the mixed weight support");
        let mut union = x.empty_set();
        for (c, w) in &atoms {
            if !c.is_zero() {
                union.union_with(&weight_support(x, w));
            }
        }
        ensure!(
            *supp_mult_right_route(&hx, xi)?.members() == union,
            "𝒰(H supp (supp ξ)) is not the union of the atom supports"
        );
    }
    Ok(())
}

pub(super) fn gen_natural(g: &mut Gen) -> Instance {
    let x = g.primary_space();
    let y = target_for(g, &x, 4);
    let spaces = [&x, &y];
    let mut inst = instance(&spaces, g.seed());
    inst.maps = vec![map_spec(g, &spaces, 0, 1)];
    inst.valuations = vec![values(0, g.weights(x.len()))];
    inst
}

pub(super) fn check_natural(inst: &Instance) -> CheckResult {
    let b = inst.build()?;
    let (f, nu) = (&b.maps[0], &b.valuations[0]);
    holds(&check_supp_naturality(f, nu)?)?;
    let y = f.target();
    let hit = (0..f.source().len()).filter(|&p| !inst.valuations[0].values[p].is_zero()).map(|p| f.apply(p));
    let oracle = y.closure(&PointSet::from_indices(y.len(), hit));
    ensure!(*support(&pushforward(f, nu)?).members() == oracle, "supp f_*ν ≠ cl f(weighted points)");
    ensure!(*push_closed(f, &support(nu))?.members() == oracle, "f♯ supp ν ≠ cl f(weighted points)");
    Ok(())
}

pub(super) fn gen_monoidal(g: &mut Gen) -> Instance {
    let x = g.primary_space();
    let x = if x.len() > 3 { g.space_at_most(3) } else { x };
    let y = g.factor_for(&x, PRODUCT_CAP);
    let mut inst = instance(&[&x, &y], g.seed());
    inst.valuations = vec![values(0, g.weights(x.len())), values(1, g.weights(y.len()))];
    inst
}

pub(super) fn check_monoidal(inst: &Instance) -> CheckResult {
    let b = inst.build()?;
    let (x, y) = (&b.spaces[0], &b.spaces[1]);
    let prod = product(x, y);
    let (nu, rho) = (&b.valuations[0], &b.valuations[1]);
    holds(&check_supp_monoidal(&prod, nu, rho)?)?;
    let a = weight_support(x, &inst.valuations[0].values);
    let c = weight_support(y, &inst.valuations[1].values);
    let mu = crate::valuation::product_valuation(&prod, nu, rho)?;
    ensure!(*support(&mu).members() == prod.rectangle(&a, &c), "supp(ν ⊗ ρ) ≠ supp ν × supp ρ");
    Ok(())
}

pub(super) fn gen_equivalence(g: &mut Gen) -> Instance {
    gen_monoidal(g)
}

pub(super) fn check_equivalence(inst: &Instance) -> CheckResult {
    let b = inst.build()?;
    let (x, y) = (&b.spaces[0], &b.spaces[1]);
    let prod = product(x, y);
    let (nu, rho) = (&b.valuations[0], &b.valuations[1]);
    let v = check_supp_monoidal(&prod, nu, rho)?;
    let get = |name: &str| v.checks.iter().find(|(n, _)| n == name).is_none_or(|(_, ok)| *ok);
    let strong = get("strength") && get("costrength");
    let monoidal = get("product") && get("marginal");
    ensure!(strong == monoidal, "strength verdict {strong} but monoidal verdict {monoidal}");
    holds(&v)?;
    if prod.space.len() <= 4 {
        let ctx = CommutativityContext::new(x, y);
        let (c, d) = (support(nu), support(rho));
        let both = crate::hyperspace::product_closed(&prod, &c, &d)?;
        ensure!(ctx.strength_first(&c, &d)? == both, "strength-first route differs from the product");
        ensure!(ctx.costrength_first(&c, &d)? == both, "costrength-first route differs from the product");
    }
    Ok(())
}

pub(super) fn gen_transfer(g: &mut Gen) -> Instance {
    let a = g.primary_space();
    let mut inst = instance(&[&a], g.seed());
    inst.mixtures = (0..2).map(|_| MixtureSpec { space: 0, atoms: g.mixture_atoms(&a, 3) }).collect();
    inst
}

fn random_mixture(rng: &mut impl Rng, space: &FiniteSpace) -> Result<SimpleSecondOrder<BigRational>, CheckError> {
    let k = rng.gen_range(1..=3);
    let mut atoms = Vec::with_capacity(k);
    for _ in 0..k {
        let c = Q::Finite(random_finite_rational(rng, 8) + BigRational::from_integer(1.into()));
        let w: Vec<Q> = (0..space.len())
            .map(|_| if rng.gen_range(0..4) == 0 { Q::zero() } else { Q::Finite(random_finite_rational(rng, 8)) })
            .collect();
        atoms.push((c, Valuation::from_weights(space, &w)?));
    }
    Ok(SimpleSecondOrder::new(space, atoms)?)
}

pub(super) fn check_transfer(inst: &Instance) -> CheckResult {
    let mut b = inst.build()?;
    let a = b.spaces[0].clone();
    let hx = build_hyperspace(&a);
    if hx.len() > HH_LIMIT {
        return Err(CheckError::Skip(format!("HA has {} points; HHA is not built", hx.len())));
    }
    if let Some(a_map) = join_structure_map(&a) {
        if !check_separation(&a).is_t0 {
            ensure!(induced_v_algebra(&a, &a_map).is_err(), "a join map on a non-T0 space was accepted");
            return Ok(());
        }
        let alg = induced_v_algebra(&a, &a_map)?;
        holds(&alg.verify(&b.mixtures)?)?;
        for xi in &b.mixtures {
            for (_, nu) in xi.atoms() {
                let expected = join_of(&a, support(nu).members());
                ensure!(Some(alg.structure(nu)?) == expected, "e(ν) is not the join of supp ν");
            }
        }
    }
    if hx.len() <= FREE_ALGEBRA_LIMIT {
        let free = hx.space().clone();
        let hhx = build_hyperspace(&free);
        let a_map =
            (0..hhx.len()).map(|i| hx.point_of(&mult_union(&hx, hhx.members_of(i))?)).collect::<Result<Vec<_>, _>>()?;
        let alg = induced_v_algebra(&free, &a_map)?;
        let xis = (0..2).map(|_| random_mixture(&mut b.rng, &free)).collect::<Result<Vec<_>, _>>()?;
        holds(&alg.verify(&xis)?)?;
    }
    Ok(())
}
