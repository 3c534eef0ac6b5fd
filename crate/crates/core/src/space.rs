//! Finite topological spaces, continuous maps and the order theory around
//! them.
//!
//! A finite topology is the same thing as a preorder on its points: the
//! specialization preorder `x ≤ y ⟺ x ∈ cl({y})` determines the opens as
//! exactly its up-sets. [`FiniteSpace`] stores the preorder (as the smallest
//! open neighbourhood and the closure of every point) and materializes the
//! open lattice lazily, since hyperspaces of products can have hundreds of
//! points but only ever need their order.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, OnceLock};

use crate::pointset::PointSet;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TopologyError {
    #[error("relation is not reflexive: ({0}, {0}) missing")]
    NotReflexive(String),
    #[error("relation is not transitive: ({0}, {1}) and ({1}, {2}) present but ({0}, {2}) missing")]
    NotTransitive(String, String, String),
    #[error("open family is missing the {0} set")]
    MissingBound(&'static str),
    #[error("open family is not closed under {op}: {left:?} and {right:?}")]
    NotClosedUnder { op: &'static str, left: Vec<String>, right: Vec<String> },
    #[error("duplicate point identifier {0:?}")]
    DuplicatePoint(String),
    #[error("unknown point identifier {0:?}")]
    UnknownPoint(String),
    #[error("map is not continuous: preimage of open {open:?} is {preimage:?}, not open")]
    NotContinuous { open: Vec<String>, preimage: Vec<String> },
    #[error("assignment has {got} entries for a source with {expected} points")]
    AssignmentLength { expected: usize, got: usize },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("set {0:?} is not open")]
    NotOpen(Vec<String>),
    #[error("internal cross-check failed: {0}")]
    CrossCheck(String),
}

struct Inner {
    names: Vec<String>,
    /// `up[x]`: the smallest open neighbourhood of `x`.
    up: Vec<PointSet>,
    /// `down[x]`: the closure of `{x}`.
    down: Vec<PointSet>,
    opens: OnceLock<Vec<PointSet>>,
    open_index: OnceLock<HashMap<PointSet, usize>>,
}

/// An immutable finite topological space. Cloning is cheap.
#[derive(Clone)]
pub struct FiniteSpace(Arc<Inner>);

impl PartialEq for FiniteSpace {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || (self.0.names == other.0.names && self.0.up == other.0.up)
    }
}

impl Eq for FiniteSpace {}

impl fmt::Debug for FiniteSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rel: Vec<(String, String)> = self
            .specialization()
            .into_iter()
            .filter(|(x, y)| x != y)
            .map(|(x, y)| (self.name(x).to_owned(), self.name(y).to_owned()))
            .collect();
        f.debug_struct("FiniteSpace").field("points", &self.0.names).field("below", &rel).finish()
    }
}

fn check_unique(names: &[String]) -> Result<HashMap<&str, usize>, TopologyError> {
    let mut index = HashMap::with_capacity(names.len());
    for (i, n) in names.iter().enumerate() {
        if index.insert(n.as_str(), i).is_some() {
            return Err(TopologyError::DuplicatePoint(n.clone()));
        }
    }
    Ok(index)
}

impl FiniteSpace {
    /// Builds a space from up-sets that are already known to come from a
    /// preorder (`up[x]` contains `x` and is closed upwards).
    pub(crate) fn from_up_sets_unchecked(names: Vec<String>, up: Vec<PointSet>) -> Self {
        let n = names.len();
        let mut down = vec![PointSet::empty(n); n];
        for (x, u) in up.iter().enumerate() {
            for y in u.iter() {
                down[y].insert(x);
            }
        }
        FiniteSpace(Arc::new(Inner { names, up, down, opens: OnceLock::new(), open_index: OnceLock::new() }))
    }

    /// Builds the space whose opens are the up-sets of `le`, rejecting
    /// relations that are not reflexive and transitive.
    pub fn from_order_fn(names: Vec<String>, le: impl Fn(usize, usize) -> bool) -> Result<Self, TopologyError> {
        check_unique(&names)?;
        let n = names.len();
        let mut up = vec![PointSet::empty(n); n];
        for (x, u) in up.iter_mut().enumerate() {
            for y in 0..n {
                if le(x, y) {
                    u.insert(y);
                }
            }
        }
        for x in 0..n {
            if !up[x].contains(x) {
                return Err(TopologyError::NotReflexive(names[x].clone()));
            }
        }
        for x in 0..n {
            for y in up[x].iter() {
                if let Some(z) = up[y].difference(&up[x]).first() {
                    return Err(TopologyError::NotTransitive(names[x].clone(), names[y].clone(), names[z].clone()));
                }
            }
        }
        Ok(Self::from_up_sets_unchecked(names, up))
    }

    /// The space whose opens are the up-sets of the preorder given by
    /// `relation` (pairs `(x, y)` meaning `x ≤ y`).
    pub fn from_preorder<S: AsRef<str>>(points: &[S], relation: &[(S, S)]) -> Result<Self, TopologyError> {
        let names: Vec<String> = points.iter().map(|p| p.as_ref().to_owned()).collect();
        let index = check_unique(&names)?;
        let n = names.len();
        let mut matrix = vec![false; n * n];
        for (a, b) in relation {
            let i = *index.get(a.as_ref()).ok_or_else(|| TopologyError::UnknownPoint(a.as_ref().to_owned()))?;
            let j = *index.get(b.as_ref()).ok_or_else(|| TopologyError::UnknownPoint(b.as_ref().to_owned()))?;
            matrix[i * n + j] = true;
        }
        Self::from_order_fn(names, |i, j| matrix[i * n + j])
    }

    /// The space with the given open family, validated to contain `∅` and the
    /// whole space and to be closed under binary unions and intersections.
    pub fn from_opens<S: AsRef<str>>(points: &[S], opens: &[Vec<S>]) -> Result<Self, TopologyError> {
        let names: Vec<String> = points.iter().map(|p| p.as_ref().to_owned()).collect();
        let index = check_unique(&names)?;
        let n = names.len();
        let mut sets = Vec::with_capacity(opens.len());
        for o in opens {
            let mut s = PointSet::empty(n);
            for p in o {
                let i = *index.get(p.as_ref()).ok_or_else(|| TopologyError::UnknownPoint(p.as_ref().to_owned()))?;
                s.insert(i);
            }
            sets.push(s);
        }
        Self::from_open_sets(names, sets)
    }

    pub fn from_open_sets(names: Vec<String>, mut opens: Vec<PointSet>) -> Result<Self, TopologyError> {
        check_unique(&names)?;
        let n = names.len();
        opens.sort();
        opens.dedup();
        let empty = PointSet::empty(n);
        let full = PointSet::full(n);
        if opens.binary_search(&empty).is_err() {
            return Err(TopologyError::MissingBound("empty"));
        }
        if opens.binary_search(&full).is_err() {
            return Err(TopologyError::MissingBound("full"));
        }
        let render = |s: &PointSet| s.iter().map(|i| names[i].clone()).collect::<Vec<_>>();
        for (i, a) in opens.iter().enumerate() {
            for b in &opens[i + 1..] {
                if opens.binary_search(&a.union(b)).is_err() {
                    return Err(TopologyError::NotClosedUnder { op: "union", left: render(a), right: render(b) });
                }
                if opens.binary_search(&a.intersection(b)).is_err() {
                    return Err(TopologyError::NotClosedUnder {
                        op: "intersection",
                        left: render(a),
                        right: render(b),
                    });
                }
            }
        }
        let up: Vec<PointSet> = (0..n)
            .map(|x| opens.iter().filter(|o| o.contains(x)).fold(full.clone(), |acc, o| acc.intersection(o)))
            .collect();
        let space = Self::from_up_sets_unchecked(names, up);
        // Finite families closed under unions and intersections are exactly
        // the Alexandrov topologies, so the up-sets must reproduce `opens`.
        if space.opens() != opens.as_slice() {
            return Err(TopologyError::CrossCheck("open family differs from up-sets of its specialization".into()));
        }
        Ok(space)
    }

    pub fn empty() -> Self {
        Self::from_up_sets_unchecked(Vec::new(), Vec::new())
    }

    pub fn point() -> Self {
        Self::discrete_named(vec!["*".to_owned()])
    }

    /// `S = {0, 1}` with opens `∅, {1}, {0, 1}`.
    pub fn sierpinski() -> Self {
        Self::from_order_fn(vec!["0".into(), "1".into()], |x, y| x <= y).expect("chain")
    }

    pub fn discrete(n: usize) -> Self {
        Self::discrete_named(numbered(n))
    }

    pub fn discrete_named(names: Vec<String>) -> Self {
        Self::from_order_fn(names, |x, y| x == y).expect("identity is a preorder")
    }

    pub fn indiscrete(n: usize) -> Self {
        Self::from_order_fn(numbered(n), |_, _| true).expect("total relation is a preorder")
    }

    /// The chain `0 < 1 < … < n-1` with its up-set topology.
    pub fn chain(n: usize) -> Self {
        Self::from_order_fn(numbered(n), |x, y| x <= y).expect("chain")
    }

    /// The four-element lattice `W = {0, x, y, t}` with `0` below the
    /// incomparable `x, y`, both below the top `t = x ∨ y`.
    pub fn lattice_w() -> Self {
        let names = vec!["0".to_owned(), "x".into(), "y".into(), "t".into()];
        Self::from_order_fn(names, |a, b| a == b || a == 0 || b == 3).expect("lattice order")
    }

    pub fn len(&self) -> usize {
        self.0.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.0.names
    }

    pub fn name(&self, x: usize) -> &str {
        &self.0.names[x]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.0.names.iter().position(|n| n == name)
    }

    pub fn render(&self, set: &PointSet) -> Vec<String> {
        set.iter().map(|i| self.0.names[i].clone()).collect()
    }

    pub fn set_from_names<S: AsRef<str>>(&self, names: &[S]) -> Result<PointSet, TopologyError> {
        let mut s = PointSet::empty(self.len());
        for n in names {
            let i = self.index_of(n.as_ref()).ok_or_else(|| TopologyError::UnknownPoint(n.as_ref().to_owned()))?;
            s.insert(i);
        }
        Ok(s)
    }

    pub fn full_set(&self) -> PointSet {
        PointSet::full(self.len())
    }

    pub fn empty_set(&self) -> PointSet {
        PointSet::empty(self.len())
    }

    /// Smallest open set containing `x`.
    pub fn min_nbhd(&self, x: usize) -> &PointSet {
        &self.0.up[x]
    }

    /// `cl({x})`, the down-set of `x`.
    pub fn point_closure(&self, x: usize) -> &PointSet {
        &self.0.down[x]
    }

    /// `x ≤ y` in the specialization preorder.
    pub fn leq(&self, x: usize, y: usize) -> bool {
        self.0.up[x].contains(y)
    }

    pub fn equivalent(&self, x: usize, y: usize) -> bool {
        self.leq(x, y) && self.leq(y, x)
    }

    /// The specialization preorder as a list of pairs `(x, y)` with `x ≤ y`.
    pub fn specialization(&self) -> Vec<(usize, usize)> {
        (0..self.len()).flat_map(|x| self.0.up[x].iter().map(move |y| (x, y))).collect()
    }

    pub fn closure(&self, subset: &PointSet) -> PointSet {
        let mut c = self.empty_set();
        for x in subset.iter() {
            c.union_with(&self.0.down[x]);
        }
        c
    }

    pub fn up_closure(&self, subset: &PointSet) -> PointSet {
        let mut c = self.empty_set();
        for x in subset.iter() {
            c.union_with(&self.0.up[x]);
        }
        c
    }

    pub fn interior(&self, subset: &PointSet) -> PointSet {
        PointSet::from_indices(self.len(), (0..self.len()).filter(|&x| self.0.up[x].is_subset(subset)))
    }

    pub fn is_open(&self, subset: &PointSet) -> bool {
        subset.width() == self.len() && subset.iter().all(|x| self.0.up[x].is_subset(subset))
    }

    pub fn is_closed(&self, subset: &PointSet) -> bool {
        subset.width() == self.len() && subset.iter().all(|x| self.0.down[x].is_subset(subset))
    }

    /// Equivalence classes of the specialization preorder, each sorted, in
    /// an order where strictly lower classes come first.
    pub(crate) fn classes_bottom_up(&self) -> Vec<Vec<usize>> {
        let n = self.len();
        let mut seen = vec![false; n];
        let mut classes = Vec::new();
        for x in 0..n {
            if seen[x] {
                continue;
            }
            let class: Vec<usize> = (x..n).filter(|&y| self.equivalent(x, y)).collect();
            for &y in &class {
                seen[y] = true;
            }
            classes.push(class);
        }
        classes.sort_by_key(|c| (self.0.down[c[0]].len(), c[0]));
        classes
    }

    /// Every closed set (down-set), generated by a walk over the
    /// equivalence classes in bottom-up order. Never touches the power set.
    pub fn closed_sets(&self) -> Vec<PointSet> {
        let classes = self.classes_bottom_up();
        let strictly_below: Vec<PointSet> = classes
            .iter()
            .map(|c| {
                let mut below = self.0.down[c[0]].clone();
                for &y in c {
                    below.remove(y);
                }
                below
            })
            .collect();
        let mut out = Vec::new();
        let mut stack = vec![(0usize, self.empty_set())];
        while let Some((i, current)) = stack.pop() {
            if i == classes.len() {
                out.push(current);
                continue;
            }
            if strictly_below[i].is_subset(&current) {
                let mut with = current.clone();
                for &y in &classes[i] {
                    with.insert(y);
                }
                stack.push((i + 1, with));
            }
            stack.push((i + 1, current));
        }
        out.sort();
        out
    }

    /// The open lattice, sorted canonically. Materialized on first use.
    pub fn opens(&self) -> &[PointSet] {
        self.0.opens.get_or_init(|| {
            let mut opens: Vec<PointSet> = self.closed_sets().iter().map(PointSet::complement).collect();
            opens.sort();
            opens
        })
    }

    pub fn open_index(&self, set: &PointSet) -> Option<usize> {
        self.0
            .open_index
            .get_or_init(|| self.opens().iter().cloned().enumerate().map(|(i, o)| (o, i)).collect())
            .get(set)
            .copied()
    }

    pub fn require_open(&self, set: &PointSet) -> Result<usize, TopologyError> {
        if set.width() != self.len() {
            return Err(TopologyError::ShapeMismatch(format!(
                "set of width {} in a space of {} points",
                set.width(),
                self.len()
            )));
        }
        self.open_index(set).ok_or_else(|| TopologyError::NotOpen(self.render(set)))
    }

    /// Induced subspace on `keep`, with the inclusion map.
    pub fn subspace(&self, keep: &PointSet) -> (FiniteSpace, ContinuousMap) {
        let idx: Vec<usize> = keep.iter().collect();
        let names = idx.iter().map(|&i| self.0.names[i].clone()).collect();
        let sub = FiniteSpace::from_order_fn(names, |a, b| self.leq(idx[a], idx[b]))
            .expect("restriction of a preorder is a preorder");
        let inclusion = ContinuousMap::new(sub.clone(), self.clone(), idx).expect("inclusions are continuous");
        (sub, inclusion)
    }

    /// Same order, different point identifiers.
    pub fn renamed(&self, names: Vec<String>) -> Result<FiniteSpace, TopologyError> {
        if names.len() != self.len() {
            return Err(TopologyError::ShapeMismatch("rename needs one name per point".into()));
        }
        check_unique(&names)?;
        Ok(Self::from_up_sets_unchecked(names, self.0.up.clone()))
    }
}

pub(crate) fn numbered(n: usize) -> Vec<String> {
    (0..n).map(|i| i.to_string()).collect()
}

/// A continuous map between finite spaces, as a point assignment.
#[derive(Clone, PartialEq, Eq)]
pub struct ContinuousMap {
    source: FiniteSpace,
    target: FiniteSpace,
    assignment: Arc<Vec<usize>>,
}

impl fmt::Debug for ContinuousMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pairs: Vec<String> = self
            .assignment
            .iter()
            .enumerate()
            .map(|(x, &y)| format!("{}->{}", self.source.name(x), self.target.name(y)))
            .collect();
        f.debug_tuple("ContinuousMap").field(&pairs).finish()
    }
}

impl ContinuousMap {
    /// Validates continuity by checking that the preimage of every smallest
    /// neighbourhood is open, which on finite spaces is the same as the
    /// preimage of every open being open.
    pub fn new(source: FiniteSpace, target: FiniteSpace, assignment: Vec<usize>) -> Result<Self, TopologyError> {
        if assignment.len() != source.len() {
            return Err(TopologyError::AssignmentLength { expected: source.len(), got: assignment.len() });
        }
        if let Some(&bad) = assignment.iter().find(|&&y| y >= target.len()) {
            return Err(TopologyError::ShapeMismatch(format!("target index {bad} out of range")));
        }
        let map = ContinuousMap { source, target, assignment: Arc::new(assignment) };
        for y in 0..map.target.len() {
            let nbhd = map.target.min_nbhd(y);
            let pre = map.preimage(nbhd);
            if !map.source.is_open(&pre) {
                return Err(TopologyError::NotContinuous {
                    open: map.target.render(nbhd),
                    preimage: map.source.render(&pre),
                });
            }
        }
        Ok(map)
    }

    pub fn from_names<S: AsRef<str>>(
        source: FiniteSpace,
        target: FiniteSpace,
        pairs: &[(S, S)],
    ) -> Result<Self, TopologyError> {
        let mut assignment = vec![usize::MAX; source.len()];
        for (a, b) in pairs {
            let i = source.index_of(a.as_ref()).ok_or_else(|| TopologyError::UnknownPoint(a.as_ref().to_owned()))?;
            let j = target.index_of(b.as_ref()).ok_or_else(|| TopologyError::UnknownPoint(b.as_ref().to_owned()))?;
            assignment[i] = j;
        }
        if let Some(x) = assignment.iter().position(|&y| y == usize::MAX) {
            return Err(TopologyError::ShapeMismatch(format!("no image given for {}", source.name(x))));
        }
        Self::new(source, target, assignment)
    }

    pub fn identity(space: &FiniteSpace) -> Self {
        ContinuousMap { source: space.clone(), target: space.clone(), assignment: Arc::new((0..space.len()).collect()) }
    }

    /// Constant maps are always continuous.
    pub fn constant(source: &FiniteSpace, target: &FiniteSpace, value: usize) -> Self {
        assert!(value < target.len());
        ContinuousMap {
            source: source.clone(),
            target: target.clone(),
            assignment: Arc::new(vec![value; source.len()]),
        }
    }

    pub(crate) fn new_unchecked(source: FiniteSpace, target: FiniteSpace, assignment: Vec<usize>) -> Self {
        debug_assert_eq!(assignment.len(), source.len());
        ContinuousMap { source, target, assignment: Arc::new(assignment) }
    }

    pub fn source(&self) -> &FiniteSpace {
        &self.source
    }

    pub fn target(&self) -> &FiniteSpace {
        &self.target
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn apply(&self, x: usize) -> usize {
        self.assignment[x]
    }

    pub fn preimage(&self, set: &PointSet) -> PointSet {
        PointSet::from_indices(self.source.len(), (0..self.source.len()).filter(|&x| set.contains(self.assignment[x])))
    }

    pub fn image(&self, set: &PointSet) -> PointSet {
        PointSet::from_indices(self.target.len(), set.iter().map(|x| self.assignment[x]))
    }

    /// `self ∘ inner`.
    pub fn after(&self, inner: &ContinuousMap) -> Result<ContinuousMap, TopologyError> {
        if inner.target != self.source {
            return Err(TopologyError::ShapeMismatch("composition of non-composable maps".into()));
        }
        Ok(ContinuousMap {
            source: inner.source.clone(),
            target: self.target.clone(),
            assignment: Arc::new(inner.assignment.iter().map(|&y| self.assignment[y]).collect()),
        })
    }

    /// Checks continuity against the full open lattice of the target rather
    /// than the smallest neighbourhoods used by [`ContinuousMap::new`].
    pub fn preimages_open(&self) -> bool {
        self.target.opens().iter().all(|u| self.source.is_open(&self.preimage(u)))
    }
}

/// A binary product together with its projections.
#[derive(Clone, Debug)]
pub struct ProductSpace {
    pub space: FiniteSpace,
    pub left: FiniteSpace,
    pub right: FiniteSpace,
    pub pr1: ContinuousMap,
    pub pr2: ContinuousMap,
}

impl ProductSpace {
    /// The point `(x, y)`.
    pub fn pair(&self, x: usize, y: usize) -> usize {
        x * self.right.len() + y
    }

    pub fn split(&self, p: usize) -> (usize, usize) {
        (p / self.right.len(), p % self.right.len())
    }

    pub fn rectangle(&self, u: &PointSet, v: &PointSet) -> PointSet {
        let mut s = self.space.empty_set();
        for x in u.iter() {
            for y in v.iter() {
                s.insert(self.pair(x, y));
            }
        }
        s
    }

    /// `W_x = {y : (x, y) ∈ W}`.
    pub fn slice_at_left(&self, w: &PointSet, x: usize) -> PointSet {
        PointSet::from_indices(self.right.len(), (0..self.right.len()).filter(|&y| w.contains(self.pair(x, y))))
    }

    /// `W^y = {x : (x, y) ∈ W}`.
    pub fn slice_at_right(&self, w: &PointSet, y: usize) -> PointSet {
        PointSet::from_indices(self.left.len(), (0..self.left.len()).filter(|&x| w.contains(self.pair(x, y))))
    }

    /// The map `y ↦ (x, y)`.
    pub fn insert_left(&self, x: usize) -> ContinuousMap {
        ContinuousMap::new_unchecked(
            self.right.clone(),
            self.space.clone(),
            (0..self.right.len()).map(|y| self.pair(x, y)).collect(),
        )
    }

    /// The map `x ↦ (x, y)`.
    pub fn insert_right(&self, y: usize) -> ContinuousMap {
        ContinuousMap::new_unchecked(
            self.left.clone(),
            self.space.clone(),
            (0..self.left.len()).map(|x| self.pair(x, y)).collect(),
        )
    }

    /// The symmetry `X × Y → Y × X` into `other`, which must be the swapped
    /// product.
    pub fn swap_into(&self, other: &ProductSpace) -> ContinuousMap {
        assert!(other.left == self.right && other.right == self.left);
        ContinuousMap::new_unchecked(
            self.space.clone(),
            other.space.clone(),
            (0..self.space.len())
                .map(|p| {
                    let (x, y) = self.split(p);
                    other.pair(y, x)
                })
                .collect(),
        )
    }

    /// `f × g` into `target`, which must be the product of the codomains.
    pub fn map_product(&self, f: &ContinuousMap, g: &ContinuousMap, target: &ProductSpace) -> ContinuousMap {
        assert!(f.source() == &self.left && g.source() == &self.right);
        assert!(f.target() == &target.left && g.target() == &target.right);
        ContinuousMap::new_unchecked(
            self.space.clone(),
            target.space.clone(),
            (0..self.space.len())
                .map(|p| {
                    let (x, y) = self.split(p);
                    target.pair(f.apply(x), g.apply(y))
                })
                .collect(),
        )
    }
}

/// The product space with the componentwise specialization preorder.
pub fn product(a: &FiniteSpace, b: &FiniteSpace) -> ProductSpace {
    let names: Vec<String> =
        a.names().iter().flat_map(|x| b.names().iter().map(move |y| format!("({x},{y})"))).collect();
    let nb = b.len();
    let up: Vec<PointSet> = (0..a.len() * nb)
        .map(|p| {
            let (x, y) = (p / nb, p % nb);
            let mut s = PointSet::empty(a.len() * nb);
            for x2 in a.min_nbhd(x).iter() {
                for y2 in b.min_nbhd(y).iter() {
                    s.insert(x2 * nb + y2);
                }
            }
            s
        })
        .collect();
    let space = FiniteSpace::from_up_sets_unchecked(names, up);
    let pr1 = ContinuousMap::new_unchecked(space.clone(), a.clone(), (0..space.len()).map(|p| p / nb).collect());
    let pr2 = ContinuousMap::new_unchecked(space.clone(), b.clone(), (0..space.len()).map(|p| p % nb).collect());
    ProductSpace { space, left: a.clone(), right: b.clone(), pr1, pr2 }
}

/// The opens of `a × b` generated from the rectangles `U × V`. Rectangles are
/// closed under intersection, so closing under unions suffices.
pub fn rectangle_generated_opens(prod: &ProductSpace) -> Vec<PointSet> {
    let mut family: Vec<PointSet> = Vec::new();
    for u in prod.left.opens() {
        for v in prod.right.opens() {
            family.push(prod.rectangle(u, v));
        }
    }
    family.sort();
    family.dedup();
    let mut changed = true;
    while changed {
        changed = false;
        let snapshot = family.clone();
        for (i, a) in snapshot.iter().enumerate() {
            for b in &snapshot[i + 1..] {
                let u = a.union(b);
                if let Err(pos) = family.binary_search(&u) {
                    family.insert(pos, u);
                    changed = true;
                }
            }
        }
    }
    family
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct Separation {
    pub is_t0: bool,
    pub is_t1: bool,
    pub is_sober: bool,
}

/// T0, T1 and sobriety. Sobriety is decided by enumerating the closed sets
/// and testing each nonempty one for irreducibility directly.
pub fn check_separation(space: &FiniteSpace) -> Separation {
    let n = space.len();
    let is_t0 = (0..n).all(|x| (0..n).all(|y| x == y || !space.equivalent(x, y)));
    let is_t1 = (0..n).all(|x| space.min_nbhd(x).len() == 1);
    let closed = space.closed_sets();
    let is_sober = closed.iter().filter(|c| !c.is_empty()).all(|c| {
        if !is_irreducible(space, c, &closed) {
            return true;
        }
        let generic: Vec<usize> = c.iter().filter(|&x| space.point_closure(x) == c).collect();
        generic.len() == 1
    });
    Separation { is_t0, is_t1, is_sober }
}

/// `c` is irreducible when it is not the union of two proper closed subsets.
/// For a proper closed `a ⊊ c`, the smallest partner is `cl(c \ a)`.
fn is_irreducible(space: &FiniteSpace, c: &PointSet, closed: &[PointSet]) -> bool {
    !closed.iter().filter(|a| a.is_subset(c) && *a != c).any(|a| space.closure(&c.difference(a)) != *c)
}

/// Identifies points with the same smallest neighbourhood.
pub fn kolmogorov_quotient(space: &FiniteSpace) -> (FiniteSpace, ContinuousMap) {
    let n = space.len();
    let mut class_of = vec![usize::MAX; n];
    let mut reps: Vec<usize> = Vec::new();
    let mut members: Vec<Vec<usize>> = Vec::new();
    for x in 0..n {
        if class_of[x] != usize::MAX {
            continue;
        }
        let id = reps.len();
        reps.push(x);
        let class: Vec<usize> = (x..n).filter(|&y| space.min_nbhd(y) == space.min_nbhd(x)).collect();
        for &y in &class {
            class_of[y] = id;
        }
        members.push(class);
    }
    let names: Vec<String> =
        members.iter().map(|c| c.iter().map(|&i| space.name(i)).collect::<Vec<_>>().join("~")).collect();
    let quotient =
        FiniteSpace::from_order_fn(names, |a, b| space.leq(reps[a], reps[b])).expect("quotient of a preorder");
    let map = ContinuousMap::new(space.clone(), quotient.clone(), class_of).expect("quotient map is continuous");
    (quotient, map)
}

/// `f ≤ g` as a 2-cell: `f(x) ≤ g(x)` pointwise in the target's
/// specialization. The equivalent preimage criterion `f⁻¹(U) ⊆ g⁻¹(U)` for
/// every open `U` is evaluated as well and the two must agree.
pub fn le_2cell(f: &ContinuousMap, g: &ContinuousMap) -> Result<bool, TopologyError> {
    if f.source() != g.source() || f.target() != g.target() {
        return Err(TopologyError::ShapeMismatch("2-cells need parallel maps".into()));
    }
    let pointwise = (0..f.source().len()).all(|x| f.target().leq(f.apply(x), g.apply(x)));
    let by_preimage = f.target().opens().iter().all(|u| f.preimage(u).is_subset(&g.preimage(u)));
    if pointwise != by_preimage {
        return Err(TopologyError::CrossCheck(format!(
            "2-cell criteria disagree: pointwise {pointwise}, preimage {by_preimage}"
        )));
    }
    Ok(pointwise)
}

#[derive(Debug, Clone)]
pub struct EquivalenceVerdict {
    pub is_equivalence: bool,
    pub preimage_bijective: bool,
    pub essentially_surjective: bool,
    pub quasi_inverse: Option<ContinuousMap>,
}

/// Decides whether `f` is an equivalence (invertible up to 2-cells in both
/// directions) and builds a quasi-inverse when it is.
pub fn is_equivalence(f: &ContinuousMap) -> Result<EquivalenceVerdict, TopologyError> {
    let (src, tgt) = (f.source(), f.target());
    let mut preimages: Vec<PointSet> = tgt.opens().iter().map(|u| f.preimage(u)).collect();
    preimages.sort();
    preimages.dedup();
    let preimage_bijective = preimages.len() == tgt.opens().len() && preimages.as_slice() == src.opens();
    let mut section = Vec::with_capacity(tgt.len());
    let mut essentially_surjective = true;
    for y in 0..tgt.len() {
        match (0..src.len()).find(|&x| tgt.equivalent(f.apply(x), y)) {
            Some(x) => section.push(x),
            None => {
                essentially_surjective = false;
                break;
            }
        }
    }
    if !(preimage_bijective && essentially_surjective) {
        return Ok(EquivalenceVerdict {
            is_equivalence: false,
            preimage_bijective,
            essentially_surjective,
            quasi_inverse: None,
        });
    }
    let g = ContinuousMap::new(tgt.clone(), src.clone(), section)?;
    let gf = g.after(f)?;
    let fg = f.after(&g)?;
    let id_src = ContinuousMap::identity(src);
    let id_tgt = ContinuousMap::identity(tgt);
    let ok = le_2cell(&gf, &id_src)? && le_2cell(&id_src, &gf)? && le_2cell(&fg, &id_tgt)? && le_2cell(&id_tgt, &fg)?;
    if !ok {
        return Err(TopologyError::CrossCheck("quasi-inverse fails the 2-cell round trips".into()));
    }
    Ok(EquivalenceVerdict { is_equivalence: true, preimage_bijective, essentially_surjective, quasi_inverse: Some(g) })
}

/// `v ≪ u`: every open cover of `u` has a finite subfamily covering `v`.
///
/// A finite space has finitely many opens, so every cover is already finite
/// and the only obstruction is `v ⊄ u` (the one-element cover `{u}`).
pub fn way_below(space: &FiniteSpace, v: &PointSet, u: &PointSet) -> Result<bool, TopologyError> {
    space.require_open(v)?;
    space.require_open(u)?;
    Ok(v.is_subset(u))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all_subsets(n: usize) -> impl Iterator<Item = PointSet> {
        (0u64..1 << n).map(move |m| PointSet::from_mask(n, m))
    }

    #[test]
    fn sierpinski_from_preorder() {
        let s = FiniteSpace::from_preorder(&["0", "1"], &[("0", "0"), ("1", "1"), ("0", "1")]).unwrap();
        let rendered: Vec<Vec<String>> = s.opens().iter().map(|o| s.render(o)).collect();
        assert_eq!(rendered.len(), 3);
        assert!(rendered.contains(&vec![]));
        assert!(rendered.contains(&vec!["1".to_owned()]));
        assert!(rendered.contains(&vec!["0".to_owned(), "1".to_owned()]));
        assert_eq!(s, FiniteSpace::sierpinski());
    }

    #[test]
    fn singleton_and_lattice_w() {
        let p = FiniteSpace::from_preorder(&["a"], &[("a", "a")]).unwrap();
        assert_eq!(p.opens().len(), 2);
        let w = FiniteSpace::lattice_w();
        let brute = all_subsets(4).filter(|s| s.iter().all(|x| (0..4).all(|y| !w.leq(x, y) || s.contains(y)))).count();
        assert_eq!(brute, 6);
        assert_eq!(w.opens().len(), 6);
    }

    #[test]
    fn preorder_validation_reports_witness() {
        let err = FiniteSpace::from_preorder(&["a", "b"], &[("a", "a")]).unwrap_err();
        assert_eq!(err, TopologyError::NotReflexive("b".into()));
        let err =
            FiniteSpace::from_preorder(&["a", "b", "c"], &[("a", "a"), ("b", "b"), ("c", "c"), ("a", "b"), ("b", "c")])
                .unwrap_err();
        assert_eq!(err, TopologyError::NotTransitive("a".into(), "b".into(), "c".into()));
        assert!(matches!(FiniteSpace::from_preorder(&["a", "a"], &[]), Err(TopologyError::DuplicatePoint(_))));
    }

    #[test]
    fn open_family_validation() {
        let err = FiniteSpace::from_opens(&["a", "b"], &[vec![], vec!["a"], vec!["b"], vec!["a", "b"]]);
        assert!(err.is_ok());
        let err = FiniteSpace::from_opens(&["a", "b", "c"], &[vec![], vec!["a"], vec!["b"], vec!["a", "b", "c"]]);
        assert!(matches!(err, Err(TopologyError::NotClosedUnder { op: "union", .. })));
        let err = FiniteSpace::from_opens(&["a"], &[vec!["a"]]);
        assert_eq!(err.unwrap_err(), TopologyError::MissingBound("empty"));
    }

    #[test]
    fn specialization_examples() {
        let s = FiniteSpace::sierpinski();
        // closure of {1} by the complement-of-largest-disjoint-open oracle
        let one = PointSet::singleton(2, 1);
        let largest_disjoint =
            s.opens().iter().filter(|o| !o.intersects(&one)).fold(s.empty_set(), |acc, o| acc.union(o));
        assert_eq!(largest_disjoint.complement().to_vec(), vec![0, 1]);
        assert_eq!(s.specialization(), vec![(0, 0), (0, 1), (1, 1)]);
        assert_eq!(FiniteSpace::discrete(2).specialization(), vec![(0, 0), (1, 1)]);
        assert_eq!(FiniteSpace::indiscrete(2).specialization().len(), 4);
    }

    #[test]
    fn closure_examples() {
        let s = FiniteSpace::sierpinski();
        let one = PointSet::singleton(2, 1);
        let by_enumeration = all_subsets(2)
            .filter(|c| s.is_closed(c) && one.is_subset(c))
            .fold(s.full_set(), |acc, c| acc.intersection(&c));
        assert_eq!(s.closure(&one), by_enumeration);
        assert_eq!(s.closure(&one).to_vec(), vec![0, 1]);
        assert!(s.closure(&s.empty_set()).is_empty());
        let d = FiniteSpace::discrete(3);
        for a in all_subsets(3) {
            assert_eq!(d.closure(&a), a);
        }
    }

    #[test]
    fn products() {
        let s = FiniteSpace::sierpinski();
        let ss = product(&s, &s);
        assert_eq!(ss.space.len(), 4);
        // 9 rectangle pairs, 5 distinct rectangles, one extra union
        assert_eq!(rectangle_generated_opens(&ss).len(), 6);
        assert_eq!(rectangle_generated_opens(&ss), ss.space.opens());
        assert!(ss.pr1.preimages_open() && ss.pr2.preimages_open());
        let x1 = product(&s, &FiniteSpace::point());
        assert!(is_equivalence(&x1.pr1).unwrap().is_equivalence);
        let dd = product(&FiniteSpace::discrete(2), &FiniteSpace::discrete(2));
        assert!(check_separation(&dd.space).is_t1);
        assert_eq!(dd.space.opens().len(), 16);
    }

    #[test]
    fn separation_examples() {
        let s = check_separation(&FiniteSpace::sierpinski());
        assert_eq!(s, Separation { is_t0: true, is_t1: false, is_sober: true });
        let i = check_separation(&FiniteSpace::indiscrete(2));
        assert_eq!(i, Separation { is_t0: false, is_t1: false, is_sober: false });
        for n in 0..5 {
            let d = check_separation(&FiniteSpace::discrete(n));
            assert_eq!(d, Separation { is_t0: true, is_t1: true, is_sober: true });
        }
    }

    #[test]
    fn kolmogorov_examples() {
        let (q, _) = kolmogorov_quotient(&FiniteSpace::indiscrete(2));
        assert_eq!(q.len(), 1);
        let s = FiniteSpace::sierpinski();
        let (q, m) = kolmogorov_quotient(&s);
        assert_eq!(q.len(), 2);
        assert!(is_equivalence(&m).unwrap().is_equivalence);
        // x ~ y, z isolated
        let x =
            FiniteSpace::from_preorder(&["x", "y", "z"], &[("x", "x"), ("y", "y"), ("z", "z"), ("x", "y"), ("y", "x")])
                .unwrap();
        let (q, m) = kolmogorov_quotient(&x);
        assert_eq!(q.len(), 2);
        assert!(check_separation(&q).is_t1);
        assert_eq!(q.opens().len(), x.opens().len());
        assert!(m.preimages_open());
    }

    #[test]
    fn two_cells() {
        let s = FiniteSpace::sierpinski();
        let p = FiniteSpace::point();
        let c0 = ContinuousMap::constant(&p, &s, 0);
        let c1 = ContinuousMap::constant(&p, &s, 1);
        assert!(le_2cell(&c0, &c0).unwrap());
        assert!(le_2cell(&c0, &c1).unwrap());
        assert!(!le_2cell(&c1, &c0).unwrap());
        let other = ContinuousMap::constant(&s, &s, 0);
        assert!(matches!(le_2cell(&c0, &other), Err(TopologyError::ShapeMismatch(_))));
    }

    #[test]
    fn equivalence_examples() {
        let s = FiniteSpace::sierpinski();
        let v = is_equivalence(&ContinuousMap::identity(&s)).unwrap();
        assert!(v.is_equivalence);
        assert_eq!(v.quasi_inverse.unwrap(), ContinuousMap::identity(&s));
        let i2 = FiniteSpace::indiscrete(2);
        let p = FiniteSpace::point();
        assert!(is_equivalence(&ContinuousMap::constant(&i2, &p, 0)).unwrap().is_equivalence);
        let v = is_equivalence(&ContinuousMap::constant(&s, &p, 0)).unwrap();
        assert!(!v.is_equivalence && !v.preimage_bijective);
    }

    #[test]
    fn way_below_examples() {
        let s = FiniteSpace::sierpinski();
        let full = s.full_set();
        assert!(way_below(&s, &s.empty_set(), &full).unwrap());
        assert!(way_below(&s, &full, &full).unwrap());
        let one = PointSet::singleton(2, 1);
        assert!(!way_below(&s, &full, &one).unwrap());
        assert!(matches!(way_below(&s, &PointSet::singleton(2, 0), &full), Err(TopologyError::NotOpen(_))));
    }

    #[test]
    fn empty_space_is_legal() {
        let e = FiniteSpace::empty();
        assert_eq!(e.opens().len(), 1);
        assert_eq!(e.closed_sets().len(), 1);
        assert_eq!(check_separation(&e), Separation { is_t0: true, is_t1: true, is_sober: true });
        let (q, _) = kolmogorov_quotient(&e);
        assert!(q.is_empty());
        assert_eq!(product(&e, &FiniteSpace::sierpinski()).space.len(), 0);
    }

    #[test]
    fn non_continuous_map_rejected() {
        let s = FiniteSpace::sierpinski();
        // swapping 0 and 1 reverses the order
        let err = ContinuousMap::new(s.clone(), s.clone(), vec![1, 0]).unwrap_err();
        assert!(matches!(err, TopologyError::NotContinuous { .. }));
    }
}
