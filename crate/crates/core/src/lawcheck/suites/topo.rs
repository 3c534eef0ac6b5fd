//! `topology-core`, `appendixA-2cells`.

use super::*;
use crate::hyperspace::{push_closed, ClosedSet};
use crate::lawcheck::gen::random_map_above;
use crate::lawcheck::{ensure, CheckResult};
use crate::space::{check_separation, is_equivalence, kolmogorov_quotient, le_2cell, way_below, ContinuousMap};
use crate::support::support;
use crate::valuation::pushforward;

/// Spaces up to this size are compared against their full power set.
const POWER_SET_LIMIT: usize = 10;

pub(super) fn gen_core(g: &mut Gen) -> Instance {
    let x = g.primary_space();
    instance(&[&x], g.seed())
}

pub(super) fn check_core(inst: &Instance) -> CheckResult {
    let b = inst.build()?;
    let x = &b.spaces[0];
    let n = x.len();

    let again = FiniteSpace::from_open_sets(x.names().to_vec(), x.opens().to_vec())?;
    ensure!(again == *x, "opens → space round trip changed the space");
    let spec = x.specialization();
    let from_order = FiniteSpace::from_order_fn(x.names().to_vec(), |a, c| spec.contains(&(a, c)))?;
    ensure!(from_order.opens() == x.opens(), "specialization → opens round trip changed the topology");

    if n <= POWER_SET_LIMIT {
        let mut up_sets = 0;
        for mask in 0u64..(1 << n) {
            let s = PointSet::from_mask(n, mask);
            let upper = s.iter().all(|p| (0..n).all(|q| !x.leq(p, q) || s.contains(q)));
            ensure!(x.is_open(&s) == upper, "openness of {:?} differs from being an up-set", x.render(&s));
            up_sets += usize::from(upper);
            let closure = x.closure(&s);
            for u in x.opens() {
                ensure!(closure.intersects(u) == s.intersects(u), "cl({:?}) hits differently", x.render(&s));
            }
            ensure!(x.is_closed(&closure) && s.is_subset(&closure), "closure is not a closed superset");
        }
        ensure!(up_sets == x.opens().len(), "{up_sets} up-sets but {} opens", x.opens().len());
    }
    for c in x.closed_sets() {
        ensure!(x.is_open(&c.complement()), "complement of a closed set is not open");
    }

    let sep = check_separation(x);
    let antisymmetric = (0..n).all(|p| (0..n).all(|q| p == q || !x.equivalent(p, q)));
    ensure!(sep.is_t0 == antisymmetric, "T0 verdict disagrees with antisymmetry");
    ensure!(sep.is_t1 == (x.opens().len() == 1 << n), "T1 verdict disagrees with discreteness");
    ensure!(sep.is_sober == sep.is_t0, "a finite space is sober exactly when it is T0");

    for v in x.opens() {
        for u in x.opens() {
            ensure!(way_below(x, v, u)? == v.is_subset(u), "way-below differs from inclusion");
        }
    }

    let (q, map) = kolmogorov_quotient(x);
    ensure!(check_separation(&q).is_t0, "Kolmogorov quotient is not T0");
    let preimages: Vec<PointSet> = q.opens().iter().map(|u| map.preimage(u)).collect();
    let mut sorted = preimages.clone();
    sorted.sort();
    ensure!(sorted == x.opens(), "quotient map does not identify the open lattices");
    ensure!(is_equivalence(&map)?.is_equivalence, "quotient map is not an equivalence");
    Ok(())
}

pub(super) fn gen_2cells(g: &mut Gen) -> Instance {
    let x = g.primary_space();
    let y = target_for(g, &x, 3);
    let spaces = [&x, &y];
    let mut inst = instance(&spaces, g.seed());
    let f = map_spec(g, &spaces, 0, 1);
    let above = random_map_above(&mut g.rng, &x, &y, Some(&f.assignment)).unwrap_or_else(|| f.assignment.clone());
    inst.maps = vec![f, MapSpec { from: 0, to: 1, assignment: above }];
    inst.valuations = vec![values(0, g.weights(x.len()))];
    inst
}

pub(super) fn check_2cells(inst: &Instance) -> CheckResult {
    let b = inst.build()?;
    let x = &b.spaces[0];
    let nu = &b.valuations[0];
    for (f, g) in [(&b.maps[0], &b.maps[1]), (&b.maps[1], &b.maps[0])] {
        if !le_2cell(f, g)? {
            continue;
        }
        for c in x.closed_sets() {
            let c = ClosedSet::new(x, c)?;
            ensure!(push_closed(f, &c)?.is_subset(&push_closed(g, &c)?), "H is not 2-functorial at {:?}", c.render());
        }
        let (fv, gv) = (pushforward(f, nu)?, pushforward(g, nu)?);
        ensure!(fv.le(&gv), "V is not 2-functorial: f_*ν ≰ g_*ν");
        ensure!(support(&fv).is_subset(&support(&gv)), "supp does not respect the 2-cell");
    }
    let id = ContinuousMap::identity(x);
    ensure!(le_2cell(&id, &id)?, "identity 2-cell missing");
    let id_eq = is_equivalence(&id)?;
    ensure!(id_eq.is_equivalence, "identity is not an equivalence");
    let (_, q) = kolmogorov_quotient(x);
    let verdict = is_equivalence(&q)?;
    ensure!(verdict.is_equivalence, "quotient map is not an equivalence");
    let back = verdict.quasi_inverse.expect("equivalences carry a quasi-inverse");
    let round = back.after(&q)?;
    ensure!(le_2cell(&round, &id)? && le_2cell(&id, &round)?, "quasi-inverse round trip is not isomorphic to id");
    if check_separation(x).is_t0 {
        ensure!(round == id, "round trip on a T0 space is not the identity");
    }
    Ok(())
}
