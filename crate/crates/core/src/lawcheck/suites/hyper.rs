//! `h-monad`, `h-strength`, `h-algebra`.

use super::*;
use crate::hyperspace::{
    build_hyperspace, check_h_algebra, closed_of_functional, costrength_h, functional_of_closed, join_structure_map,
    lift_map, lower_vietoris_opens, mult_union, mult_union_hits_agree, product_closed, push_closed,
    push_closed_hits_agree, sigma_is_embedding, strength_h, unit_sigma, ClosedSet, CommutativityContext, HitFunctional,
    Hyperspace,
};
use crate::lawcheck::gen::random_map;
use crate::lawcheck::{ensure, CheckResult};
use crate::space::{product, ContinuousMap, ProductSpace};

/// Largest open lattice whose boolean tables are enumerated.
const TABLE_LIMIT: usize = 16;

pub(super) fn gen_monad(g: &mut Gen) -> Instance {
    let x = g.primary_space();
    let y = target_for(g, &x, 3);
    let z = target_for(g, &y, 3);
    let spaces = [&x, &y, &z];
    let mut inst = instance(&spaces, g.seed());
    inst.maps = vec![map_spec(g, &spaces, 0, 1), map_spec(g, &spaces, 1, 2)];
    inst
}

/// Checks that every boolean table on the opens is a valid hit functional
/// exactly when it is strict and join-preserving, and that valid ones come
/// from a unique closed set.
fn brute_force_duality(x: &FiniteSpace, hx: &Hyperspace) -> CheckResult {
    let opens = x.opens();
    let m = opens.len();
    if m > TABLE_LIMIT {
        return Ok(());
    }
    let empty = x.open_index(&x.empty_set()).expect("∅ is open");
    let mut joins = Vec::new();
    for i in 0..m {
        for j in i + 1..m {
            joins.push((i, j, x.open_index(&opens[i].union(&opens[j])).expect("union of opens")));
        }
    }
    let bit = |mask: u32, i: usize| mask >> i & 1 == 1;
    let mut valid = 0usize;
    for mask in 0u32..(1u32 << m) {
        let ok = !bit(mask, empty) && joins.iter().all(|&(i, j, u)| bit(mask, u) == (bit(mask, i) || bit(mask, j)));
        let table: Vec<bool> = (0..m).map(|i| bit(mask, i)).collect();
        if ok {
            valid += 1;
            let phi = HitFunctional::new(x, table)?;
            let c = closed_of_functional(&phi);
            ensure!(functional_of_closed(&c) == phi, "functional {mask:#b} is not Φ of its closed set");
        } else if mask % 61 == 0 {
            ensure!(HitFunctional::new(x, table).is_err(), "invalid table {mask:#b} accepted");
        }
    }
    ensure!(valid == hx.len(), "{valid} valid functionals but {} closed sets", hx.len());
    Ok(())
}

pub(super) fn check_monad(inst: &Instance) -> CheckResult {
    let mut b = inst.build()?;
    let (x, y) = (&b.spaces[0], &b.spaces[1]);
    let (f, k) = (&b.maps[0], &b.maps[1]);
    let hx = build_hyperspace(x);
    let hy = build_hyperspace(y);

    if hx.len() <= HH_LIMIT {
        ensure!(
            lower_vietoris_opens(&hx) == hx.space().opens(),
            "lower Vietoris topology differs from inclusion up-sets"
        );
    } else {
        // Both topologies are Alexandrov, so they agree once every Hit(U) is
        // an up-set and the hits around each C cut out exactly ↑C.
        let hits: Vec<PointSet> = x.opens().iter().map(|u| hx.hit_set(u)).collect();
        for h in &hits {
            ensure!(hx.space().is_open(h), "a lower Vietoris subbasic open is not an up-set");
        }
        for c in 0..hx.len() {
            let around =
                hits.iter().filter(|h| h.contains(c)).fold(hx.space().full_set(), |acc, h| acc.intersection(h));
            let up = hx.space().up_closure(&PointSet::from_indices(hx.len(), [c]));
            ensure!(around == up, "lower Vietoris neighbourhoods differ from inclusion up-sets");
        }
    }
    for c in hx.closed_sets() {
        ensure!(closed_of_functional(&functional_of_closed(&c)) == c, "duality round trip fails at {:?}", c.render());
    }
    brute_force_duality(x, &hx)?;
    ensure!(sigma_is_embedding(&hx) == crate::space::check_separation(x).is_t0, "σ embedding disagrees with T0");

    let sigma = hx.sigma_map();
    for c in hx.closed_sets() {
        let pushed = push_closed(&sigma, &c)?;
        ensure!(mult_union(&hx, pushed.members())? == c, "𝒰 ∘ Hσ ≠ id at {:?}", c.render());
        let around = unit_sigma(hx.space(), hx.point_of(&c)?);
        ensure!(mult_union(&hx, around.members())? == c, "𝒰 ∘ σ_H ≠ id at {:?}", c.render());
    }

    let families = families(&mut b.rng, &hx);
    if hx.len() <= HH_LIMIT {
        let hhx = build_hyperspace(hx.space());
        let union = hx.union_map(&hhx)?;
        for fam in down_sets(&mut b.rng, hhx.space(), x.len() <= 2) {
            let left = mult_union(&hx, mult_union(&hhx, &fam)?.members())?;
            let pushed = push_closed(&union, &ClosedSet::new(hhx.space(), fam.clone())?)?;
            let right = mult_union(&hx, pushed.members())?;
            ensure!(left == right, "associativity: {:?} vs {:?}", left.render(), right.render());
        }
    } else {
        // On the element of HHHX generated by finitely many families both
        // routes reduce to unions, so HHX itself is never built.
        for chunk in families.chunks(3) {
            let mut all = hx.space().empty_set();
            let mut right = x.empty_set();
            for fam in chunk {
                all.union_with(fam);
                right.union_with(mult_union(&hx, fam)?.members());
            }
            ensure!(*mult_union(&hx, &all)?.members() == right, "associativity fails on a generated family");
        }
    }

    for p in 0..x.len() {
        let left = push_closed(f, &unit_sigma(x, p))?;
        ensure!(left == unit_sigma(y, f.apply(p)), "σ not natural at {}", x.name(p));
    }
    let hf = lift_map(f, &hx, &hy)?;
    for fam in families {
        ensure!(mult_union_hits_agree(&hx, &fam)?, "𝒰 disagrees with its hit description");
        let left = push_closed(f, &mult_union(&hx, &fam)?)?;
        let pushed = push_closed(&hf, &ClosedSet::new(hx.space(), fam)?)?;
        let right = mult_union(&hy, pushed.members())?;
        ensure!(left == right, "𝒰 not natural: {:?} vs {:?}", left.render(), right.render());
    }
    let kf = k.after(f)?;
    for c in hx.closed_sets() {
        let image = ClosedSet::closure_of(y, &f.image(c.members()));
        ensure!(push_closed(f, &c)? == image, "f♯ is not the closure of the image at {:?}", c.render());
        ensure!(push_closed_hits_agree(f, &c)?, "f♯ disagrees with preimages at {:?}", c.render());
        ensure!(push_closed(&kf, &c)? == push_closed(k, &push_closed(f, &c)?)?, "H does not preserve composition");
        ensure!(push_closed(&ContinuousMap::identity(x), &c)? == c, "H does not preserve identities");
    }
    Ok(())
}

pub(super) fn gen_strength(g: &mut Gen) -> Instance {
    let x = g.primary_space();
    let x = if x.len() > 3 { g.space_at_most(3) } else { x };
    let y = g.factor_for(&x, PRODUCT_CAP);
    let xy = x.len().max(1) * y.len().max(1);
    let z = g.space_at_most((TRIPLE_CAP / xy).max(1));
    instance(&[&x, &y, &z], g.seed())
}

fn union_of(
    sets: impl Iterator<Item = Result<ClosedSet, crate::hyperspace::HyperspaceError>>,
    width: usize,
) -> Result<PointSet, CheckError> {
    let mut out = PointSet::empty(width);
    for s in sets {
        out.union_with(s?.members());
    }
    Ok(out)
}

/// The associativity square: `s((x, y), C)` in `(X×Y)×Z` against
/// `s(x, s(y, C))` in `X×(Y×Z)`, compared through the associator.
fn strength_associativity(x: &FiniteSpace, y: &FiniteSpace, z: &FiniteSpace) -> CheckResult {
    let xy = product(x, y);
    let yz = product(y, z);
    let xy_z = product(&xy.space, z);
    let x_yz = product(x, &yz.space);
    let hz = build_hyperspace(z);
    let assoc = |p: usize| {
        let (a, bc) = x_yz.split(p);
        let (b, c) = yz.split(bc);
        xy_z.pair(xy.pair(a, b), c)
    };
    for a in 0..x.len() {
        for b in 0..y.len() {
            for c in hz.closed_sets() {
                let left = strength_h(&xy_z, xy.pair(a, b), &c)?;
                let right = strength_h(&x_yz, a, &strength_h(&yz, b, &c)?)?;
                let moved = PointSet::from_indices(xy_z.space.len(), right.members().iter().map(assoc));
                ensure!(moved == *left.members(), "strength associativity fails at {:?}", c.render());
            }
        }
    }
    Ok(())
}

fn commutativity(prod: &ProductSpace, hx: &Hyperspace, hy: &Hyperspace) -> CheckResult {
    let (x, y) = (&prod.left, &prod.right);
    let hx_y = product(hx.space(), y);
    let x_hy = product(x, hy.space());
    for c in hx.closed_sets() {
        for d in hy.closed_sets() {
            let s = strength_h(&hx_y, hx.point_of(&c)?, &d)?;
            let first = union_of(
                s.members().iter().map(|p| {
                    let (cp, q) = hx_y.split(p);
                    costrength_h(prod, &hx.closed_set(cp), q)
                }),
                prod.space.len(),
            )?;
            let t = costrength_h(&x_hy, &c, hy.point_of(&d)?)?;
            let second = union_of(
                t.members().iter().map(|p| {
                    let (q, dp) = x_hy.split(p);
                    strength_h(prod, q, &hy.closed_set(dp))
                }),
                prod.space.len(),
            )?;
            let rect = product_closed(prod, &c, &d)?;
            ensure!(first == second, "strength and costrength routes differ at {:?} × {:?}", c.render(), d.render());
            ensure!(first == *rect.members(), "double strength is not the product {:?} × {:?}", c.render(), d.render());
        }
    }
    if prod.space.len() <= 4 {
        let ctx = CommutativityContext::new(x, y);
        for c in hx.closed_sets() {
            for d in hy.closed_sets() {
                ensure!(ctx.strength_first(&c, &d)? == ctx.costrength_first(&c, &d)?, "commutativity square fails");
            }
        }
    }
    Ok(())
}

pub(super) fn check_strength(inst: &Instance) -> CheckResult {
    let mut b = inst.build()?;
    let (x, y, z) = (&b.spaces[0], &b.spaces[1], &b.spaces[2]);
    let prod = product(x, y);
    let hx = build_hyperspace(x);
    let hy = build_hyperspace(y);

    for p in 0..x.len() {
        for q in 0..y.len() {
            let unit = unit_sigma(&prod.space, prod.pair(p, q));
            ensure!(strength_h(&prod, p, &unit_sigma(y, q))? == unit, "strength unit fails at ({p}, {q})");
            ensure!(costrength_h(&prod, &unit_sigma(x, p), q)? == unit, "costrength unit fails at ({p}, {q})");
        }
    }

    let point = FiniteSpace::point();
    let left_unit = product(&point, y);
    for d in hy.closed_sets() {
        let s = strength_h(&left_unit, 0, &d)?;
        ensure!(
            *s.members() == left_unit.rectangle(&point.full_set(), d.members()),
            "1 × HY ≅ HY fails at {:?}",
            d.render()
        );
    }
    let right_unit = product(x, &point);
    for c in hx.closed_sets() {
        let t = costrength_h(&right_unit, &c, 0)?;
        ensure!(*t.members() == right_unit.rectangle(c.members(), &point.full_set()), "HX × 1 ≅ HX fails");
    }

    let x_hy = product(x, hy.space());
    let y_families = families(&mut b.rng, &hy);
    for p in 0..x.len() {
        for fam in y_families.iter().cloned() {
            let left = strength_h(&prod, p, &mult_union(&hy, &fam)?)?;
            let outer = strength_h(&x_hy, p, &ClosedSet::new(hy.space(), fam)?)?;
            let right = union_of(
                outer.members().iter().map(|r| {
                    let (q, d) = x_hy.split(r);
                    strength_h(&prod, q, &hy.closed_set(d))
                }),
                prod.space.len(),
            )?;
            ensure!(*left.members() == right, "strength does not commute with 𝒰 at {}", x.name(p));
        }
    }
    let hx_y = product(hx.space(), y);
    let x_families = families(&mut b.rng, &hx);
    for q in 0..y.len() {
        for fam in x_families.iter().cloned() {
            let left = costrength_h(&prod, &mult_union(&hx, &fam)?, q)?;
            let outer = costrength_h(&hx_y, &ClosedSet::new(hx.space(), fam)?, q)?;
            let right = union_of(
                outer.members().iter().map(|r| {
                    let (c, q2) = hx_y.split(r);
                    costrength_h(&prod, &hx.closed_set(c), q2)
                }),
                prod.space.len(),
            )?;
            ensure!(*left.members() == right, "costrength does not commute with 𝒰 at {}", y.name(q));
        }
    }

    strength_associativity(x, y, z)?;
    commutativity(&prod, &hx, &hy)
}

pub(super) fn gen_algebra(g: &mut Gen) -> Instance {
    let a = g.primary_space();
    instance(&[&a], g.seed())
}

/// Largest `HX` whose `(HX, 𝒰)` algebra is checked; the check builds `HHHX`.
const FREE_ALGEBRA_LIMIT: usize = 6;

pub(super) fn check_algebra(inst: &Instance) -> CheckResult {
    let mut b = inst.build()?;
    let a = &b.spaces[0];
    let ha = build_hyperspace(a);
    if ha.len() > HH_LIMIT {
        return Err(CheckError::Skip(format!("HA has {} points; HHA is not built", ha.len())));
    }
    if let Some(joins) = join_structure_map(a) {
        let v = check_h_algebra(a, &joins)?;
        ensure!(v.consistent, "join map: algebra laws and lattice description disagree: {v:?}");
    }
    if let Some(random) = random_map(&mut b.rng, ha.space(), a) {
        let v = check_h_algebra(a, &random)?;
        ensure!(v.consistent, "random map: algebra laws and lattice description disagree: {v:?}");
    }
    if ha.len() <= FREE_ALGEBRA_LIMIT {
        let hha = build_hyperspace(ha.space());
        let table =
            (0..hha.len()).map(|f| ha.point_of(&mult_union(&ha, hha.members_of(f))?)).collect::<Result<Vec<_>, _>>()?;
        let v = check_h_algebra(ha.space(), &table)?;
        ensure!(v.is_algebra() && v.consistent, "(HX, 𝒰) is not a consistent H-algebra: {v:?}");
    }
    Ok(())
}
