//! Seeded generators for spaces, maps, weights and closed families.

use num_rational::BigRational;
use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::pointset::PointSet;
use crate::scalar::{ExtNonneg, Scalar};
use crate::space::{numbered, FiniteSpace};

type Q = ExtNonneg<BigRational>;

/// Generator settings. Identical configurations yield identical streams.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenConfig {
    pub seed: u64,
    pub max_points: usize,
    pub instance_count: usize,
    pub weight_denominator_bound: u32,
    pub allow_infinity: bool,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig { seed: 0, max_points: 3, instance_count: 200, weight_denominator_bound: 16, allow_infinity: true }
    }
}

impl GenConfig {
    pub fn rng_for(&self, stream: u64, index: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(stream);
        rng.set_word_pos(u128::from(index) << 20);
        rng
    }
}

/// The canned spaces, in a fixed order: empty, one point, Sierpiński,
/// discrete and indiscrete on two points, W, and chains of length 3 and 4.
pub fn corpus() -> Vec<FiniteSpace> {
    vec![
        FiniteSpace::empty(),
        FiniteSpace::point(),
        FiniteSpace::sierpinski(),
        FiniteSpace::discrete(2),
        FiniteSpace::indiscrete(2),
        FiniteSpace::lattice_w(),
        FiniteSpace::chain(3),
        FiniteSpace::chain(4),
    ]
}

/// A random preorder on `n` points: a random relation, reflexively and
/// transitively closed. Every preorder has positive probability.
pub fn random_space(rng: &mut impl Rng, n: usize) -> FiniteSpace {
    let p = rng.gen_range(0.1..0.6);
    let mut rel = vec![vec![false; n]; n];
    for (i, row) in rel.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            *cell = i == j || rng.gen_bool(p);
        }
    }
    for k in 0..n {
        for i in 0..n {
            if rel[i][k] {
                let through = rel[k].clone();
                for (to, &r) in rel[i].iter_mut().zip(&through) {
                    *to |= r;
                }
            }
        }
    }
    FiniteSpace::from_order_fn(numbered(n), |a, b| rel[a][b]).expect("closed relation is a preorder")
}

/// The space stream: corpus entries that fit, then random spaces.
pub fn generate_spaces(cfg: &GenConfig) -> impl Iterator<Item = FiniteSpace> + '_ {
    let fitting: Vec<FiniteSpace> = corpus().into_iter().filter(|s| s.len() <= cfg.max_points).collect();
    let mut rng = cfg.rng_for(u64::MAX, 0);
    fitting.into_iter().chain(std::iter::from_fn(move || {
        let n = rng.gen_range(0..=cfg.max_points);
        Some(random_space(&mut rng, n))
    }))
}

/// Per-instance generation context.
pub struct Gen<'a> {
    pub rng: ChaCha8Rng,
    pub cfg: &'a GenConfig,
    pub index: usize,
    /// Replaces the corpus and random choice of the primary space.
    pub primary: Option<FiniteSpace>,
}

impl Gen<'_> {
    /// Corpus entry `index` when it fits, otherwise a random space of at
    /// most `max_points` points.
    pub fn primary_space(&mut self) -> FiniteSpace {
        if let Some(s) = &self.primary {
            return s.clone();
        }
        let fitting: Vec<FiniteSpace> = corpus().into_iter().filter(|s| s.len() <= self.cfg.max_points).collect();
        match fitting.into_iter().nth(self.index) {
            Some(s) => s,
            None => self.space_at_most(self.cfg.max_points),
        }
    }

    /// As [`Gen::primary_space`], but replaces an empty space by a random
    /// nonempty one unless `max_points` is zero.
    pub fn nonempty_primary_space(&mut self) -> FiniteSpace {
        let x = self.primary_space();
        if x.is_empty() && self.cfg.max_points > 0 {
            self.nonempty_space_at_most(self.cfg.max_points)
        } else {
            x
        }
    }

    pub fn space_at_most(&mut self, max: usize) -> FiniteSpace {
        let n = self.rng.gen_range(0..=max.min(self.cfg.max_points));
        random_space(&mut self.rng, n)
    }

    pub fn nonempty_space_at_most(&mut self, max: usize) -> FiniteSpace {
        let cap = max.min(self.cfg.max_points).max(1);
        let n = self.rng.gen_range(1..=cap);
        random_space(&mut self.rng, n)
    }

    /// A second factor whose product with `first` has at most `cap` points.
    pub fn factor_for(&mut self, first: &FiniteSpace, cap: usize) -> FiniteSpace {
        let room = if first.is_empty() { cap } else { cap / first.len() };
        self.space_at_most(room.max(1))
    }

    pub fn weight(&mut self, allow_zero: bool) -> Q {
        if allow_zero && self.rng.gen_bool(0.25) {
            return Q::zero();
        }
        if self.cfg.allow_infinity && self.rng.gen_bool(0.04) {
            return Q::Infinite;
        }
        let bound = i64::from(self.cfg.weight_denominator_bound.max(1));
        let q = self.rng.gen_range(1..=bound);
        let p = self.rng.gen_range(1..=2 * q);
        Q::ratio(p, q)
    }

    pub fn finite_weight(&mut self, allow_zero: bool) -> Q {
        loop {
            let w = self.weight(allow_zero);
            if !w.is_infinite() {
                return w;
            }
        }
    }

    pub fn weights(&mut self, n: usize) -> Vec<Q> {
        (0..n).map(|_| self.weight(true)).collect()
    }

    pub fn finite_weights(&mut self, n: usize) -> Vec<Q> {
        (0..n).map(|_| self.finite_weight(true)).collect()
    }

    /// Weights with at least one nonzero entry, for a nonempty space.
    pub fn positive_finite_weights(&mut self, n: usize) -> Vec<Q> {
        let mut w = self.finite_weights(n);
        if n > 0 && w.iter().all(Q::is_zero) {
            let i = self.rng.gen_range(0..n);
            w[i] = self.finite_weight(false);
        }
        w
    }

    pub fn map(&mut self, source: &FiniteSpace, target: &FiniteSpace) -> Option<Vec<usize>> {
        random_map(&mut self.rng, source, target)
    }

    pub fn seed(&mut self) -> u64 {
        self.rng.gen()
    }

    /// Values of a lower semicontinuous function: `g(x) = max_{z ≤ x} r_z`.
    /// Every monotone function arises this way.
    pub fn lsc_values(&mut self, space: &FiniteSpace) -> Vec<Q> {
        let raw = self.weights(space.len());
        (0..space.len())
            .map(|x| space.point_closure(x).iter().map(|z| raw[z].clone()).fold(Q::zero(), Q::max))
            .collect()
    }

    /// Kernel rows `k(x) = Σ_{z ≤ x} b_z` for random point-weight rows
    /// `b_z`, so that every column is monotone.
    pub fn kernel_rows(&mut self, source: &FiniteSpace, target: &FiniteSpace) -> Vec<Vec<Q>> {
        let base: Vec<Vec<Q>> = (0..source.len()).map(|_| self.weights(target.len())).collect();
        (0..source.len())
            .map(|x| {
                (0..target.len()).map(|y| source.point_closure(x).iter().map(|z| base[z][y].clone()).sum()).collect()
            })
            .collect()
    }

    /// Between one and `max_atoms` atoms with nonzero weights.
    pub fn mixture_atoms(&mut self, space: &FiniteSpace, max_atoms: usize) -> Vec<(Q, Vec<Q>)> {
        let k = self.rng.gen_range(1..=max_atoms.max(1));
        (0..k).map(|_| (self.weight(false), self.weights(space.len()))).collect()
    }

    /// Finite weights summing to one on a nonempty space.
    pub fn probability_weights(&mut self, n: usize) -> Vec<Q> {
        let raw = self.positive_finite_weights(n);
        normalize(&raw)
    }

    /// A convex combination of probability valuations.
    pub fn probability_mixture(&mut self, space: &FiniteSpace, max_atoms: usize) -> Vec<(Q, Vec<Q>)> {
        let k = self.rng.gen_range(1..=max_atoms.max(1));
        let coefficients = normalize(&(0..k).map(|_| self.finite_weight(false)).collect::<Vec<_>>());
        coefficients.into_iter().map(|c| (c, self.probability_weights(space.len()))).collect()
    }
}

/// Divides finite weights by their (nonzero) sum.
pub fn normalize(weights: &[Q]) -> Vec<Q> {
    let total: Q = weights.iter().cloned().sum();
    match total {
        Q::Finite(t) if !t.is_zero() => weights
            .iter()
            .map(|w| match w {
                Q::Finite(v) => Q::Finite(v / &t),
                Q::Infinite => Q::Infinite,
            })
            .collect(),
        _ => weights.to_vec(),
    }
}

/// A random continuous map, built bottom-up so that every point lands above
/// the images of the points below it. Falls back to a constant map.
pub fn random_map(rng: &mut impl Rng, source: &FiniteSpace, target: &FiniteSpace) -> Option<Vec<usize>> {
    random_map_above(rng, source, target, None)
}

/// A random continuous map `g` with `floor(x) ≤ g(x)` for every `x`, when
/// `floor` is given. `floor` itself is always a candidate.
pub fn random_map_above(
    rng: &mut impl Rng,
    source: &FiniteSpace,
    target: &FiniteSpace,
    floor: Option<&[usize]>,
) -> Option<Vec<usize>> {
    if target.is_empty() {
        return source.is_empty().then(Vec::new);
    }
    let classes = source.classes_bottom_up();
    'attempt: for _ in 0..20 {
        let mut assignment = vec![usize::MAX; source.len()];
        for class in &classes {
            let rep = class[0];
            let below: Vec<usize> = source.point_closure(rep).iter().filter(|&z| !source.equivalent(z, rep)).collect();
            let candidates: Vec<usize> = (0..target.len())
                .filter(|&t| below.iter().all(|&z| target.leq(assignment[z], t)))
                .filter(|&t| floor.is_none_or(|f| class.iter().all(|&x| target.leq(f[x], t))))
                .collect();
            let Some(&t) = candidates.choose(rng) else { continue 'attempt };
            for &x in class {
                assignment[x] = t;
            }
        }
        return Some(assignment);
    }
    if let Some(f) = floor {
        return Some(f.to_vec());
    }
    Some(vec![rng.gen_range(0..target.len()); source.len()])
}

/// A random down-set: the down-closure of a random subset of a random
/// maximal antichain.
pub fn random_down_set(rng: &mut impl Rng, space: &FiniteSpace) -> PointSet {
    let mut order: Vec<usize> = (0..space.len()).collect();
    order.shuffle(rng);
    let mut antichain: Vec<usize> = Vec::new();
    for x in order {
        if antichain.iter().all(|&a| !space.leq(a, x) && !space.leq(x, a)) {
            antichain.push(x);
        }
    }
    let keep = PointSet::from_indices(space.len(), antichain.into_iter().filter(|_| rng.gen_bool(0.5)));
    space.closure(&keep)
}

pub fn random_subset(rng: &mut impl Rng, n: usize) -> PointSet {
    PointSet::from_indices(n, (0..n).filter(|_| rng.gen_bool(0.5)))
}

pub fn random_finite_rational(rng: &mut impl Rng, bound: u32) -> BigRational {
    let q = rng.gen_range(1..=i64::from(bound.max(1)));
    let p = rng.gen_range(0..=3 * q);
    BigRational::from_ratio(p, q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn streams_are_deterministic() {
        let cfg = GenConfig { seed: 7, ..GenConfig::default() };
        let a: Vec<FiniteSpace> = generate_spaces(&cfg).take(50).collect();
        let b: Vec<FiniteSpace> = generate_spaces(&cfg).take(50).collect();
        assert_eq!(a, b);
    }

    #[test]
    fn zero_points_gives_only_empty_spaces() {
        let cfg = GenConfig { max_points: 0, ..GenConfig::default() };
        assert!(generate_spaces(&cfg).take(20).all(|s| s.is_empty()));
    }

    #[test]
    fn all_29_labeled_three_point_topologies_appear() {
        let cfg = GenConfig { seed: 1, max_points: 3, ..GenConfig::default() };
        let mut seen = HashSet::new();
        for s in generate_spaces(&cfg).take(10_000) {
            if s.len() == 3 {
                seen.insert(s.opens().to_vec());
            }
        }
        assert_eq!(seen.len(), 29);
    }

    #[test]
    fn random_maps_are_continuous() {
        let cfg = GenConfig { seed: 3, max_points: 4, ..GenConfig::default() };
        let mut rng = cfg.rng_for(0, 0);
        let spaces: Vec<FiniteSpace> = generate_spaces(&cfg).take(60).collect();
        for pair in spaces.windows(2) {
            if let Some(a) = random_map(&mut rng, &pair[0], &pair[1]) {
                assert!(crate::space::ContinuousMap::new(pair[0].clone(), pair[1].clone(), a).is_ok());
            }
        }
    }

    #[test]
    fn random_down_sets_are_closed() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let w = FiniteSpace::lattice_w();
        for _ in 0..50 {
            assert!(w.is_closed(&random_down_set(&mut rng, &w)));
        }
    }
}
