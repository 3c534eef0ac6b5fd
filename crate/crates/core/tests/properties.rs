use proptest::prelude::*;

use powerdomain::hyperspace::{mult_union, push_closed, unit_sigma};
use powerdomain::probability::extend_to_measure;
use powerdomain::space::check_separation;
use powerdomain::support::support;
use powerdomain::valuation::{integrate, product_valuation, pushforward};
use powerdomain::{
    build_hyperspace, product, ContinuousMap, Ext, FiniteSpace, PointSet, QLowerSemiFn, QValuation, Rational,
};

/// A preorder on up to `max` points: a random relation closed up.
fn space(max: usize) -> impl Strategy<Value = FiniteSpace> {
    (0..=max).prop_flat_map(|n| proptest::collection::vec(any::<bool>(), n * n)).prop_map(|bits| {
        let n = (bits.len() as f64).sqrt() as usize;
        let mut le: Vec<bool> = (0..n * n).map(|i| bits[i] || i / n == i % n).collect();
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    if le[i * n + k] && le[k * n + j] {
                        le[i * n + j] = true;
                    }
                }
            }
        }
        FiniteSpace::from_order_fn((0..n).map(|i| i.to_string()).collect(), |a, b| le[a * n + b]).unwrap()
    })
}

fn rational() -> impl Strategy<Value = Rational> {
    (0i64..20, 1i64..8).prop_map(|(p, q)| Rational::new(p.into(), q.into()))
}

fn ext() -> impl Strategy<Value = Ext> {
    prop_oneof![9 => rational().prop_map(Ext::Finite), 1 => Just(Ext::Infinite)]
}

fn weighted(max: usize, infinite: bool) -> impl Strategy<Value = (FiniteSpace, Vec<Ext>)> {
    space(max).prop_flat_map(move |s| {
        let n = s.len();
        let w = if infinite { ext().boxed() } else { rational().prop_map(Ext::Finite).boxed() };
        (Just(s), proptest::collection::vec(w, n))
    })
}

/// `max` over up-closures of points with random values: always lower
/// semicontinuous.
fn lsc(s: &FiniteSpace, seeds: &[Ext]) -> QLowerSemiFn {
    let values = (0..s.len())
        .map(|y| (0..s.len()).filter(|&x| s.leq(x, y)).map(|x| seeds[x].clone()).fold(Ext::zero(), Ext::max))
        .collect();
    QLowerSemiFn::new(s, values).unwrap()
}

fn weight_sum(w: &[Ext], set: &PointSet) -> Ext {
    set.iter().map(|x| w[x].clone()).sum()
}

proptest! {
    #[test]
    fn opens_form_a_topology(s in space(5)) {
        let opens = s.opens();
        prop_assert!(opens.contains(&s.empty_set()) && opens.contains(&s.full_set()));
        for u in opens {
            for v in opens {
                prop_assert!(s.is_open(&u.union(v)));
                prop_assert!(s.is_open(&u.intersection(v)));
            }
            prop_assert!(s.is_closed(&s.full_set().difference(u)));
        }
    }

    #[test]
    fn weights_give_a_modular_valuation((s, w) in weighted(4, true)) {
        let nu = QValuation::from_weights(&s, &w).unwrap();
        for u in s.opens() {
            prop_assert_eq!(nu.value(u).unwrap(), &weight_sum(&w, u));
            for v in s.opens() {
                let lhs = nu.value(&u.union(v)).unwrap().clone() + nu.value(&u.intersection(v)).unwrap().clone();
                let rhs = nu.value(u).unwrap().clone() + nu.value(v).unwrap().clone();
                prop_assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn integral_is_the_weighted_sum((s, w) in weighted(4, true), seeds in proptest::collection::vec(ext(), 4)) {
        let nu = QValuation::from_weights(&s, &w).unwrap();
        let g = lsc(&s, &seeds);
        let expected: Ext = (0..s.len()).map(|x| w[x].clone() * g.at(x).clone()).sum();
        prop_assert_eq!(integrate(&nu, &g).unwrap(), expected);
    }

    #[test]
    fn pushforward_moves_weights((s, w) in weighted(4, true), target in 1usize..4, picks in proptest::collection::vec(0usize..4, 4)) {
        let t = FiniteSpace::discrete(target);
        let assignment: Vec<usize> = (0..s.len()).map(|x| picks[x] % target).collect();
        // A map into a discrete space is continuous when it is constant on
        // the components of the preorder, so send each point where its
        // component's first member goes.
        let root = |x: usize| (0..s.len()).find(|&r| connected(&s, r, x)).unwrap();
        let assignment: Vec<usize> = (0..s.len()).map(|x| assignment[root(x)]).collect();
        let f = ContinuousMap::new(s.clone(), t.clone(), assignment.clone()).unwrap();
        let nu = QValuation::from_weights(&s, &w).unwrap();
        let pushed = pushforward(&f, &nu).unwrap();
        for y in 0..target {
            let fibre = PointSet::from_indices(s.len(), (0..s.len()).filter(|&x| assignment[x] == y));
            prop_assert_eq!(pushed.value(&PointSet::from_indices(target, [y])).unwrap(), &weight_sum(&w, &fibre));
        }
    }

    #[test]
    fn support_is_the_closure_of_positive_weights((s, w) in weighted(4, true)) {
        let nu = QValuation::from_weights(&s, &w).unwrap();
        let positive = PointSet::from_indices(s.len(), (0..s.len()).filter(|&x| !w[x].is_zero()));
        prop_assert_eq!(support(&nu).members().clone(), s.closure(&positive));
    }

    #[test]
    fn extension_recovers_weights_on_t0((s, w) in weighted(4, false)) {
        prop_assume!(check_separation(&s).is_t0);
        let nu = QValuation::from_weights(&s, &w).unwrap();
        let m = extend_to_measure(&nu).unwrap();
        let back: Vec<Ext> = m.point_weights().iter().cloned().map(Ext::Finite).collect();
        prop_assert_eq!(back, w);
    }

    #[test]
    fn product_of_weights((a, v) in weighted(2, false), (b, u) in weighted(2, false)) {
        let p = product(&a, &b);
        let nu = QValuation::from_weights(&a, &v).unwrap();
        let rho = QValuation::from_weights(&b, &u).unwrap();
        let both = product_valuation(&p, &nu, &rho).unwrap();
        let w: Vec<Ext> = (0..p.space.len()).map(|q| { let (x, y) = p.split(q); v[x].clone() * u[y].clone() }).collect();
        prop_assert_eq!(both, QValuation::from_weights(&p.space, &w).unwrap());
    }

    #[test]
    fn union_of_point_closures_is_the_identity(s in space(4)) {
        let hx = build_hyperspace(&s);
        let sigma = hx.sigma_map();
        for c in hx.closed_sets() {
            let pushed = push_closed(&sigma, &c).unwrap();
            prop_assert_eq!(mult_union(&hx, pushed.members()).unwrap(), c.clone());
            let around = unit_sigma(hx.space(), hx.point_of(&c).unwrap());
            prop_assert_eq!(mult_union(&hx, around.members()).unwrap(), c);
        }
    }
}

fn connected(s: &FiniteSpace, a: usize, b: usize) -> bool {
    let mut seen = PointSet::from_indices(s.len(), [a]);
    loop {
        let grown = s.closure(&s.up_closure(&seen)).union(&s.up_closure(&s.closure(&seen)));
        if grown == seen {
            return seen.contains(b);
        }
        seen = grown;
    }
}
