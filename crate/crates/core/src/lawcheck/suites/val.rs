//! `v-monad`, `v-strength`, `v-fubini`, `v-duality`, `v-portmanteau`.

use rand::seq::SliceRandom;

use super::*;
use crate::lawcheck::gen::random_subset;
use crate::lawcheck::{ensure, CheckResult};
use crate::space::{check_separation, product, ContinuousMap, ProductSpace};
use crate::valuation::{
    bind, check_certificate, costrength_first_by_integration, costrength_first_molecular, costrength_v,
    delta_is_injective, integrate, kleisli_compose, mult_e, mult_e_integral_agrees, order_checks, portmanteau_witness,
    product_valuation, pushforward, pushforward_integral_agrees, rectangle_reconstruction,
    strength_first_by_integration, strength_first_molecular, strength_v, topology_membership, unit_delta, Kernel,
    LowerSemiFn, SimpleSecondOrder, Subbasic, ValuationError,
};

type Fun = LowerSemiFn<BigRational>;

pub(super) fn gen_monad(g: &mut Gen) -> Instance {
    let x = g.primary_space();
    let y = target_for(g, &x, 3);
    let z = target_for(g, &y, 3);
    let spaces = [&x, &y, &z];
    let mut inst = instance(&spaces, g.seed());
    inst.maps = vec![map_spec(g, &spaces, 0, 1), map_spec(g, &spaces, 1, 2)];
    inst.valuations = vec![values(0, g.weights(x.len()))];
    inst.functions = vec![values(0, g.lsc_values(&x)), values(1, g.lsc_values(&y)), values(2, g.lsc_values(&z))];
    inst.kernels = vec![
        KernelSpec { from: 0, to: 1, rows: g.kernel_rows(&x, &y) },
        KernelSpec { from: 1, to: 2, rows: g.kernel_rows(&y, &z) },
    ];
    inst.mixtures = vec![MixtureSpec { space: 0, atoms: g.mixture_atoms(&x, 3) }];
    let k = g.rng.gen_range(1..=3);
    let atoms = (0..k).map(|_| (g.weight(false), g.mixture_atoms(&x, 2))).collect();
    inst.towers = vec![TowerSpec { space: 0, atoms }];
    inst
}

use super::super::{KernelSpec, MixtureSpec, TowerSpec};
use rand::Rng;

/// `Σₓ wₓ·k(x)` through valuation addition and scaling only.
fn bind_oracle(weights: &[Q], k: &Kernel<BigRational>) -> Result<Val, CheckError> {
    let mut acc = Valuation::zero(k.target());
    for (x, w) in weights.iter().enumerate() {
        acc = acc.add(&k.row(x).scale(w))?;
    }
    Ok(acc)
}

pub(super) fn check_monad(inst: &Instance) -> CheckResult {
    let b = inst.build()?;
    let (x, y) = (&b.spaces[0], &b.spaces[1]);
    let (f, e) = (&b.maps[0], &b.maps[1]);
    let nu = &b.valuations[0];
    let weights = &inst.valuations[0].values;
    let (h, k) = (&b.kernels[0], &b.kernels[1]);
    let xi = &b.mixtures[0];
    let tower = &b.towers[0];

    for p in 0..x.len() {
        let d: Val = unit_delta(x, p);
        for u in x.opens() {
            ensure!(d.value(u)? == &Q::from(BigRational::from_integer(u64::from(u.contains(p)).into())), "δ wrong");
        }
    }
    ensure!(mult_e(&SimpleSecondOrder::dirac(nu)) == *nu, "ℰ ∘ δ_V ≠ id");
    ensure!(mult_e(&SimpleSecondOrder::lift_units(x, weights)?) == *nu, "ℰ ∘ Vδ ≠ id");

    let atoms: Vec<(Q, &[Q])> = inst.mixtures[0].atoms.iter().map(|(c, w)| (c.clone(), w.as_slice())).collect();
    ensure!(mult_e(xi) == combine(x, &atoms)?, "ℰ disagrees with the weighted sum of its atoms");
    let flat = mult_e(&tower.flatten()?);
    ensure!(flat == mult_e(&tower.map_mult()?), "ℰ ∘ ℰ_V ≠ ℰ ∘ Vℰ");
    let mut nested: Vec<(Q, &[Q])> = Vec::new();
    for (c, inner) in &inst.towers[0].atoms {
        for (d, w) in inner {
            nested.push((c.clone() * d.clone(), w.as_slice()));
        }
    }
    ensure!(flat == combine(x, &nested)?, "tower multiplication disagrees with the weight oracle");

    ensure!(bind(nu, &Kernel::unit(x))? == *nu, "ν >>= δ ≠ ν");
    for p in 0..x.len() {
        ensure!(bind(&Valuation::dirac(x, p), h)? == *h.row(p), "δ_x >>= h ≠ h(x)");
    }
    let nh = bind(nu, h)?;
    ensure!(nh == bind_oracle(weights, h)?, "bind disagrees with the weighted row sum");
    ensure!(bind(&nh, k)? == bind(nu, &kleisli_compose(k, h)?)?, "Kleisli associativity fails");
    ensure!(kleisli_compose(h, &Kernel::unit(x))? == *h, "h ∘ δ ≠ h");
    ensure!(kleisli_compose(&Kernel::unit(y), h)? == *h, "δ ∘ h ≠ h");
    let molecular: Vec<(Q, Val)> =
        weights.iter().enumerate().filter(|(_, w)| !w.is_zero()).map(|(p, w)| (w.clone(), h.row(p).clone())).collect();
    ensure!(nh == mult_e(&SimpleSecondOrder::new(y, molecular)?), "bind and ℰ ∘ Vh disagree");
    ensure!(bind(nu, &Kernel::from_map(f))? == pushforward(f, nu)?, "bind along a map is not the pushforward");

    for p in 0..x.len() {
        ensure!(pushforward(f, &Val::dirac(x, p))? == Val::dirac(y, f.apply(p)), "δ not natural");
    }
    let left = pushforward(f, &mult_e(xi))?;
    let right = mult_e(&xi.map_atoms(y, |v| pushforward(f, v))?);
    ensure!(left == right, "ℰ not natural");
    ensure!(pushforward(&e.after(f)?, nu)? == pushforward(e, &pushforward(f, nu)?)?, "V does not preserve composition");
    ensure!(pushforward(&ContinuousMap::identity(x), nu)? == *nu, "V does not preserve identities");
    ensure!(pushforward_integral_agrees(f, nu, &b.functions[1])?, "change of variables fails");
    ensure!(mult_e_integral_agrees(xi, &b.functions[0])?, "⟨ℰξ, g⟩ ≠ Σ cⱼ⟨νⱼ, g⟩");
    let gz = &b.functions[2];
    let via_kernel = integrate(&bind(&nh, k)?, gz)?;
    let col = Fun::new(y, (0..y.len()).map(|q| integrate(k.row(q), gz)).collect::<Result<Vec<_>, _>>()?)?;
    ensure!(via_kernel == integrate(&nh, &col)?, "integral against a bind disagrees with iterated integration");
    Ok(())
}

pub(super) fn gen_strength(g: &mut Gen) -> Instance {
    let x = g.primary_space();
    let x = if x.len() > 3 { g.space_at_most(3) } else { x };
    let y = g.factor_for(&x, PRODUCT_CAP);
    let xy = x.len().max(1) * y.len().max(1);
    let z = g.space_at_most((TRIPLE_CAP / xy).max(1));
    let mut inst = instance(&[&x, &y, &z], g.seed());
    inst.valuations = vec![values(0, g.weights(x.len())), values(1, g.weights(y.len())), values(2, g.weights(z.len()))];
    inst.mixtures = vec![
        MixtureSpec { space: 0, atoms: g.mixture_atoms(&x, 3) },
        MixtureSpec { space: 1, atoms: g.mixture_atoms(&y, 3) },
    ];
    inst
}

/// `δ_x ⊗ ρ` from weights: `ρ_y` at `(x, y)`.
fn strength_oracle(prod: &ProductSpace, x: usize, rho: &[Q]) -> Result<Val, CheckError> {
    let mut w = vec![Q::zero(); prod.space.len()];
    for (y, r) in rho.iter().enumerate() {
        w[prod.pair(x, y)] = r.clone();
    }
    Ok(Valuation::from_weights(&prod.space, &w)?)
}

pub(super) fn check_strength(inst: &Instance) -> CheckResult {
    let b = inst.build()?;
    let (x, y, z) = (&b.spaces[0], &b.spaces[1], &b.spaces[2]);
    let (nu, rho, tau) = (&b.valuations[0], &b.valuations[1], &b.valuations[2]);
    let (xi_x, xi_y) = (&b.mixtures[0], &b.mixtures[1]);
    let prod = product(x, y);

    for p in 0..x.len() {
        for q in 0..y.len() {
            let d: Val = Valuation::dirac(&prod.space, prod.pair(p, q));
            ensure!(strength_v(&prod, p, &Valuation::dirac(y, q))? == d, "strength unit fails");
            ensure!(costrength_v(&prod, &Valuation::dirac(x, p), q)? == d, "costrength unit fails");
        }
    }
    for p in 0..x.len() {
        let s = strength_v(&prod, p, rho)?;
        ensure!(s == strength_oracle(&prod, p, &inst.valuations[1].values)?, "strength disagrees with weights");
        ensure!(pushforward(&prod.pr2, &s)? == *rho, "pr₂ ∘ s ≠ ρ");
        ensure!(pushforward(&prod.pr1, &s)? == Valuation::dirac(x, p).scale(rho.total()), "pr₁ ∘ s ≠ ρ(Y)·δ_x");
        let left = strength_v(&prod, p, &mult_e(xi_y))?;
        let right = mult_e(&xi_y.map_atoms(&prod.space, |r| strength_v(&prod, p, r))?);
        ensure!(left == right, "strength does not commute with ℰ");
    }
    for q in 0..y.len() {
        let t = costrength_v(&prod, nu, q)?;
        ensure!(pushforward(&prod.pr1, &t)? == *nu, "pr₁ ∘ t ≠ ν");
        let left = costrength_v(&prod, &mult_e(xi_x), q)?;
        let right = mult_e(&xi_x.map_atoms(&prod.space, |v| costrength_v(&prod, v, q))?);
        ensure!(left == right, "costrength does not commute with ℰ");
    }
    let point = FiniteSpace::point();
    let one_y = product(&point, y);
    ensure!(pushforward(&one_y.pr2, &strength_v(&one_y, 0, rho)?)? == *rho, "1 × VY ≅ VY fails");
    let x_one = product(x, &point);
    ensure!(pushforward(&x_one.pr1, &costrength_v(&x_one, nu, 0)?)? == *nu, "VX × 1 ≅ VX fails");

    let xy = product(x, y);
    let yz = product(y, z);
    let xy_z = product(&xy.space, z);
    let x_yz = product(x, &yz.space);
    let assignment = (0..x_yz.space.len())
        .map(|p| {
            let (a, bc) = x_yz.split(p);
            let (bb, c) = yz.split(bc);
            xy_z.pair(xy.pair(a, bb), c)
        })
        .collect();
    let assoc = ContinuousMap::new(x_yz.space.clone(), xy_z.space.clone(), assignment)?;
    for a in 0..x.len() {
        for bb in 0..y.len() {
            let left = strength_v(&xy_z, xy.pair(a, bb), tau)?;
            let right = pushforward(&assoc, &strength_v(&x_yz, a, &strength_v(&yz, bb, tau)?)?)?;
            ensure!(left == right, "strength associativity fails");
        }
    }
    Ok(())
}

pub(super) fn gen_fubini(g: &mut Gen) -> Instance {
    let x = g.primary_space();
    let x = if x.len() > 3 { g.space_at_most(3) } else { x };
    let y = g.factor_for(&x, PRODUCT_CAP);
    let mut inst = instance(&[&x, &y], g.seed());
    inst.valuations = vec![values(0, g.weights(x.len())), values(1, g.weights(y.len()))];
    inst.functions = vec![values(0, g.lsc_values(&x)), values(1, g.lsc_values(&y))];
    inst
}

pub(super) fn check_fubini(inst: &Instance) -> CheckResult {
    let b = inst.build()?;
    let (x, y) = (&b.spaces[0], &b.spaces[1]);
    let (nu, rho) = (&b.valuations[0], &b.valuations[1]);
    let (wn, wr) = (&inst.valuations[0].values, &inst.valuations[1].values);
    let prod = product(x, y);

    let mu = product_valuation(&prod, nu, rho)?;
    let mut w = vec![Q::zero(); prod.space.len()];
    for p in 0..x.len() {
        for q in 0..y.len() {
            w[prod.pair(p, q)] = wn[p].clone() * wr[q].clone();
        }
    }
    ensure!(mu == Valuation::from_weights(&prod.space, &w)?, "product valuation disagrees with the weight product");
    ensure!(rectangle_reconstruction(&prod, &mu, nu, rho)?, "μ(U × V) ≠ ν(U)·ρ(V)");
    ensure!(strength_first_by_integration(&prod, nu, rho)? == mu, "strength-first route differs");
    ensure!(costrength_first_by_integration(&prod, nu, rho)? == mu, "costrength-first route differs");
    ensure!(strength_first_molecular(&prod, nu, wr)? == mu, "molecular strength-first route differs");
    ensure!(costrength_first_molecular(&prod, wn, rho)? == mu, "molecular costrength-first route differs");

    let (gx, gy) = (&b.functions[0], &b.functions[1]);
    let tensor: Vec<Q> = (0..prod.space.len())
        .map(|p| {
            let (a, c) = prod.split(p);
            gx.at(a).clone() * gy.at(c).clone()
        })
        .collect();
    let joint = integrate(&mu, &Fun::new(&prod.space, tensor)?)?;
    ensure!(joint == integrate(nu, gx)? * integrate(rho, gy)?, "⟨ν ⊗ ρ, g ⊗ h⟩ ≠ ⟨ν, g⟩·⟨ρ, h⟩");
    Ok(())
}

pub(super) fn gen_duality(g: &mut Gen) -> Instance {
    let x = g.primary_space();
    let y = target_for(g, &x, 3);
    let spaces = [&x, &y];
    let mut inst = instance(&spaces, g.seed());
    inst.maps = vec![map_spec(g, &spaces, 0, 1)];
    inst.valuations = vec![values(0, g.weights(x.len())), values(0, g.weights(x.len()))];
    inst.functions = vec![values(0, g.lsc_values(&x)), values(0, g.lsc_values(&x)), values(1, g.lsc_values(&y))];
    inst.scalars = (0..4).map(|_| g.finite_weight(true)).collect();
    inst
}

/// `sup {Σᵢ (vᵢ − vᵢ₋₁)·ν({h ≥ vᵢ})}` over every lower semicontinuous
/// `h ≤ g` with values in `{0} ∪ g(X)`, by exhaustive search.
fn dominated_sup(nu: &Val, g: &Fun) -> Result<Q, CheckError> {
    let space = nu.space();
    let mut levels: Vec<Q> = g.values().to_vec();
    levels.push(Q::zero());
    levels.sort_by(|a, b| a.partial_cmp(b).expect("total order"));
    levels.dedup();
    let order = space.classes_bottom_up();
    let mut best = Q::zero();
    let mut h = vec![0usize; space.len()];
    search(space, &order, 0, &levels, g, nu, &mut h, &mut best)?;
    Ok(best)
}

#[allow(clippy::too_many_arguments)]
fn search(
    space: &FiniteSpace,
    classes: &[Vec<usize>],
    i: usize,
    levels: &[Q],
    g: &Fun,
    nu: &Val,
    h: &mut Vec<usize>,
    best: &mut Q,
) -> Result<(), CheckError> {
    if i == classes.len() {
        let mut total = Q::zero();
        for l in 1..levels.len() {
            let set = PointSet::from_indices(space.len(), (0..space.len()).filter(|&p| h[p] >= l));
            let step = match (&levels[l], &levels[l - 1]) {
                (Q::Finite(a), Q::Finite(b)) => Q::Finite(a - b),
                _ => Q::Infinite,
            };
            total = total + step * nu.value(&set)?.clone();
        }
        if total > *best {
            *best = total;
        }
        return Ok(());
    }
    let rep = classes[i][0];
    let floor = space.point_closure(rep).iter().filter(|&z| !space.equivalent(z, rep)).map(|z| h[z]).max().unwrap_or(0);
    for l in floor..levels.len() {
        if classes[i].iter().any(|&p| &levels[l] > g.at(p)) {
            break;
        }
        for &p in &classes[i] {
            h[p] = l;
        }
        search(space, classes, i + 1, levels, g, nu, h, best)?;
    }
    Ok(())
}

pub(super) fn check_duality(inst: &Instance) -> CheckResult {
    let mut b = inst.build()?;
    let x = b.spaces[0].clone();
    let (nu, rho) = (&b.valuations[0], &b.valuations[1]);
    let (g, h) = (&b.functions[0], &b.functions[1]);
    let weights = &inst.valuations[0].values;
    let s = |i: usize| b.scalars.get(i).cloned().unwrap_or_else(Q::one);
    let (a, c) = (s(0), s(1));

    let lhs = integrate(nu, g)?;
    let by_points: Q = weights.iter().zip(g.values()).map(|(w, v)| w.clone() * v.clone()).sum();
    ensure!(lhs == by_points, "⟨ν, g⟩ = {lhs} but Σ wₓ·g(x) = {by_points}");
    let sup = dominated_sup(nu, g)?;
    ensure!(lhs == sup, "⟨ν, g⟩ = {lhs} but the dominated supremum is {sup}");

    let opens = x.opens().to_vec();
    let picks: Vec<&PointSet> = opens.choose_multiple(&mut b.rng, 3).collect();
    let mut simple = vec![Q::zero(); x.len()];
    let mut expected = Q::zero();
    for (i, u) in picks.iter().enumerate() {
        let coefficient = s(i + 2 - 2 * (i / 2));
        for p in u.iter() {
            simple[p] = simple[p].clone() + coefficient.clone();
        }
        expected = expected + coefficient * nu.value(u)?.clone();
    }
    ensure!(integrate(nu, &Fun::new(&x, simple)?)? == expected, "integral depends on the simple representation");

    let sum_fn = Fun::new(&x, g.values().iter().zip(h.values()).map(|(p, q)| p.clone() + q.clone()).collect())?;
    ensure!(integrate(nu, &sum_fn)? == lhs.clone() + integrate(nu, h)?, "not additive in g");
    let scaled_fn = Fun::new(&x, g.values().iter().map(|v| a.clone() * v.clone()).collect())?;
    ensure!(integrate(nu, &scaled_fn)? == a.clone() * lhs.clone(), "not homogeneous in g");
    ensure!(integrate(&nu.add(rho)?, g)? == lhs.clone() + integrate(rho, g)?, "not additive in ν");
    ensure!(integrate(&nu.scale(&c), g)? == c.clone() * lhs.clone(), "not homogeneous in ν");
    let max_fn = Fun::new(&x, g.values().iter().zip(h.values()).map(|(p, q)| p.clone().max(q.clone())).collect())?;
    ensure!(integrate(nu, &max_fn)? >= lhs, "not monotone in g");

    let bigger = nu.add(rho)?;
    let report = order_checks(nu, &bigger, None)?;
    ensure!(report.opens_le && report.integrals_le, "ν ≰ ν + ρ: {report:?}");
    let report = order_checks(nu, rho, None)?;
    ensure!(report.opens_le == report.integrals_le, "order descriptions disagree: {report:?}");

    for (p, q) in x.specialization() {
        ensure!(Valuation::<BigRational>::dirac(&x, p).le(&Valuation::dirac(&x, q)), "δ is not monotone");
    }
    ensure!(delta_is_injective(&x) == check_separation(&x).is_t0, "δ injective exactly on T0 spaces");

    let keep = random_subset(&mut b.rng, x.len());
    let (sub, incl) = x.subspace(&keep);
    let kept: Vec<usize> = keep.iter().collect();
    let sub_weights: Vec<Q> = kept.iter().map(|&p| weights[p].clone()).collect();
    let nu_sub = Valuation::from_weights(&sub, &sub_weights)?;
    let mut extended = vec![Q::zero(); x.len()];
    for (i, &p) in kept.iter().enumerate() {
        extended[p] = sub_weights[i].clone();
    }
    ensure!(pushforward(&incl, &nu_sub)? == Valuation::from_weights(&x, &extended)?, "subspace pushforward wrong");
    ensure!(pushforward_integral_agrees(&incl, &nu_sub, g)?, "subspace change of variables fails");
    ensure!(pushforward_integral_agrees(&b.maps[0], nu, &b.functions[2])?, "change of variables fails");
    Ok(())
}

pub(super) fn gen_portmanteau(g: &mut Gen) -> Instance {
    let x = g.primary_space();
    let mut inst = instance(&[&x], g.seed());
    let w = g.weights(x.len());
    let f = g.lsc_values(&x);
    let total: Q = w.iter().zip(&f).map(|(a, b)| a.clone() * b.clone()).sum();
    let r = match (&total, g.rng.gen_bool(0.9)) {
        (Q::Finite(t), true) => {
            let k = g.rng.gen_range(1..=8i64);
            t * &BigRational::new(k.into(), (k + 1).into())
        }
        (Q::Infinite, true) => BigRational::from_integer(g.rng.gen_range(0..100i64).into()),
        _ => crate::lawcheck::gen::random_finite_rational(&mut g.rng, g.cfg.weight_denominator_bound),
    };
    inst.valuations = std::iter::once(values(0, w)).chain((0..4).map(|_| values(0, g.weights(x.len())))).collect();
    inst.functions = vec![values(0, f)];
    inst.scalars = vec![Q::Finite(r)];
    inst
}

pub(super) fn check_portmanteau(inst: &Instance) -> CheckResult {
    let b = inst.build()?;
    let x = &b.spaces[0];
    let nu = &b.valuations[0];
    let f = &b.functions[0];
    let Some(Q::Finite(r)) = b.scalars.first() else {
        return Err(CheckError::Skip("threshold must be finite".into()));
    };

    for u in x.opens() {
        for t in [r.clone(), BigRational::from_integer(0.into())] {
            let small = topology_membership(nu, &Subbasic::Theta { open: u.clone(), r: t.clone() })?;
            let big = topology_membership(nu, &Subbasic::BigTheta { f: Fun::indicator(x, u)?, r: t.clone() })?;
            ensure!(small == big, "θ(U, r) and Θ(χ_U, r) disagree");
            ensure!(small == (nu.value(u)? > &Q::Finite(t)), "θ(U, r) membership wrong");
        }
    }

    let total = integrate(nu, f)?;
    match portmanteau_witness(nu, f, r) {
        Ok(cert) => {
            ensure!(total > Q::Finite(r.clone()), "certificate issued although ⟨ν, f⟩ = {total} ≤ {r}");
            if let Err(why) = check_certificate(&cert, nu, f, r) {
                return Err(CheckError::Fail(format!("certificate rejected: {why}")));
            }
            for rho in &b.valuations[1..] {
                let inside = cert
                    .terms
                    .iter()
                    .map(|t| Ok::<_, ValuationError>(rho.value(&t.open)? > &Q::Finite(t.threshold.clone())))
                    .collect::<Result<Vec<bool>, _>>()?
                    .into_iter()
                    .all(|b| b);
                if inside {
                    let member = topology_membership(rho, &Subbasic::BigTheta { f: f.clone(), r: r.clone() })?;
                    ensure!(member, "a valuation in the certified neighbourhood lies outside Θ(f, r)");
                }
            }
        }
        Err(ValuationError::PreconditionFailed(_)) => {
            ensure!(total <= Q::Finite(r.clone()), "no certificate although ⟨ν, f⟩ = {total} > {r}");
        }
        Err(e) => return Err(e.into()),
    }
    Ok(())
}
