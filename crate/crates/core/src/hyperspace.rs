//! The hyperspace monad `H` on finite spaces.
//!
//! `HX` is the set of closed subsets of `X` (the empty set included) with
//! the lower Vietoris topology, generated by `Hit(U) = {C : C ∩ U ≠ ∅}`.
//! Its specialization order is inclusion, so points of `HX` are indexed by
//! the down-sets of `X` and `HX` is an ordinary [`FiniteSpace`]; `HHX` and
//! `HHHX` reuse the same machinery.

use std::collections::HashMap;
use std::fmt;

use crate::mutants::{self, Mutation};
use crate::pointset::PointSet;
use crate::space::{check_separation, product, ContinuousMap, FiniteSpace, ProductSpace, TopologyError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum HyperspaceError {
    #[error("set {0:?} is not closed")]
    NotClosed(Vec<String>),
    #[error("set {0:?} is not open")]
    NotOpen(Vec<String>),
    #[error("not a valid hit functional: {axiom} fails at {left:?} / {right:?}")]
    NotAValidFunctional { axiom: &'static str, left: Vec<String>, right: Vec<String> },
    #[error("family is not closed in the hyperspace: contains {member:?} but not its subset {missing:?}")]
    NotClosedFamily { member: String, missing: String },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error(transparent)]
    Topology(#[from] TopologyError),
}

/// A closed subset of a finite space: a point of `HX`.
#[derive(Clone, PartialEq, Eq)]
pub struct ClosedSet {
    space: FiniteSpace,
    members: PointSet,
}

impl fmt::Debug for ClosedSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.space.render(&self.members)).finish()
    }
}

impl ClosedSet {
    pub fn new(space: &FiniteSpace, members: PointSet) -> Result<Self, HyperspaceError> {
        if !space.is_closed(&members) {
            return Err(HyperspaceError::NotClosed(space.render(&members)));
        }
        Ok(ClosedSet { space: space.clone(), members })
    }

    /// Used by the mutation harness paths, where the result may fail to be
    /// closed on purpose.
    pub(crate) fn new_unchecked(space: &FiniteSpace, members: PointSet) -> Self {
        ClosedSet { space: space.clone(), members }
    }

    pub fn empty(space: &FiniteSpace) -> Self {
        ClosedSet { space: space.clone(), members: space.empty_set() }
    }

    pub fn whole(space: &FiniteSpace) -> Self {
        ClosedSet { space: space.clone(), members: space.full_set() }
    }

    /// `cl(subset)`.
    pub fn closure_of(space: &FiniteSpace, subset: &PointSet) -> Self {
        ClosedSet { space: space.clone(), members: space.closure(subset) }
    }

    pub fn space(&self) -> &FiniteSpace {
        &self.space
    }

    pub fn members(&self) -> &PointSet {
        &self.members
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn is_subset(&self, other: &ClosedSet) -> bool {
        self.members.is_subset(&other.members)
    }

    /// `⟨C, U⟩` for an arbitrary subset, without checking openness.
    pub fn hits_set(&self, set: &PointSet) -> bool {
        self.members.intersects(set)
    }

    pub fn render(&self) -> Vec<String> {
        self.space.render(&self.members)
    }
}

/// `⟨C, U⟩ = ⟦C ∩ U ≠ ∅⟧`.
pub fn hit(c: &ClosedSet, u: &PointSet) -> Result<bool, HyperspaceError> {
    if !c.space.is_open(u) {
        return Err(HyperspaceError::NotOpen(c.space.render(u)));
    }
    Ok(c.members.intersects(u))
}

/// `HX` with its index of closed sets.
#[derive(Clone, Debug)]
pub struct Hyperspace {
    base: FiniteSpace,
    space: FiniteSpace,
    closed: Vec<PointSet>,
    index: HashMap<PointSet, usize>,
}

fn set_label(space: &FiniteSpace, set: &PointSet) -> String {
    format!("{{{}}}", space.render(set).join(","))
}

/// Builds `HX`. Points are the closed sets of `x` in canonical sorted order;
/// the topology is the Alexandrov topology of inclusion, which agrees with
/// the lower Vietoris topology (see [`lower_vietoris_opens`]).
pub fn build_hyperspace(x: &FiniteSpace) -> Hyperspace {
    let closed = x.closed_sets();
    let m = closed.len();
    let names: Vec<String> = closed.iter().map(|c| set_label(x, c)).collect();
    let up: Vec<PointSet> =
        closed.iter().map(|c| PointSet::from_indices(m, (0..m).filter(|&j| c.is_subset(&closed[j])))).collect();
    let space = FiniteSpace::from_up_sets_unchecked(names, up);
    let index = closed.iter().cloned().enumerate().map(|(i, c)| (c, i)).collect();
    Hyperspace { base: x.clone(), space, closed, index }
}

impl Hyperspace {
    pub fn base(&self) -> &FiniteSpace {
        &self.base
    }

    /// `HX` as a finite space.
    pub fn space(&self) -> &FiniteSpace {
        &self.space
    }

    pub fn len(&self) -> usize {
        self.closed.len()
    }

    pub fn is_empty(&self) -> bool {
        self.closed.is_empty()
    }

    pub fn closed_set(&self, point: usize) -> ClosedSet {
        ClosedSet { space: self.base.clone(), members: self.closed[point].clone() }
    }

    pub fn members_of(&self, point: usize) -> &PointSet {
        &self.closed[point]
    }

    pub fn closed_sets(&self) -> impl Iterator<Item = ClosedSet> + '_ {
        (0..self.len()).map(|i| self.closed_set(i))
    }

    pub fn index_of(&self, members: &PointSet) -> Option<usize> {
        self.index.get(members).copied()
    }

    pub fn point_of(&self, c: &ClosedSet) -> Result<usize, HyperspaceError> {
        if c.space != self.base {
            return Err(HyperspaceError::ShapeMismatch("closed set of a different space".into()));
        }
        self.index_of(&c.members).ok_or_else(|| HyperspaceError::NotClosed(c.render()))
    }

    /// The subbasic open `Hit(U)` as a set of points of `HX`.
    pub fn hit_set(&self, u: &PointSet) -> PointSet {
        PointSet::from_indices(self.len(), (0..self.len()).filter(|&i| self.closed[i].intersects(u)))
    }

    /// `σ : X → HX`.
    pub fn sigma_map(&self) -> ContinuousMap {
        let assignment =
            (0..self.base.len()).map(|x| self.point_of(&unit_sigma(&self.base, x)).expect("σ(x) is closed")).collect();
        ContinuousMap::new_unchecked(self.base.clone(), self.space.clone(), assignment)
    }

    /// `𝒰 : HHX → HX`, where `outer` must be the hyperspace of `self.space()`.
    pub fn union_map(&self, outer: &Hyperspace) -> Result<ContinuousMap, HyperspaceError> {
        if outer.base != self.space {
            return Err(HyperspaceError::ShapeMismatch("outer hyperspace is not built over HX".into()));
        }
        let assignment = (0..outer.len())
            .map(|f| {
                let c = mult_union(self, outer.members_of(f))?;
                self.point_of(&c)
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(ContinuousMap::new_unchecked(outer.space.clone(), self.space.clone(), assignment))
    }
}

/// The topology on `HX` generated by the subbasis `{Hit(U) : U open}`:
/// finite intersections first, then unions.
pub fn lower_vietoris_opens(hx: &Hyperspace) -> Vec<PointSet> {
    let n = hx.len();
    let subbasis: Vec<PointSet> = hx.base.opens().iter().map(|u| hx.hit_set(u)).collect();
    let mut basis: Vec<PointSet> = vec![PointSet::full(n)];
    for s in &subbasis {
        let more: Vec<PointSet> = basis.iter().map(|b| b.intersection(s)).collect();
        basis.extend(more);
        basis.sort();
        basis.dedup();
    }
    let mut opens = vec![PointSet::empty(n)];
    for b in &basis {
        let more: Vec<PointSet> = opens.iter().map(|o| o.union(b)).collect();
        opens.extend(more);
        opens.sort();
        opens.dedup();
    }
    opens
}

/// A strict, join-preserving map `O(X) → {0, 1}`, tabulated over the
/// canonical open list of its space.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct HitFunctional {
    space: FiniteSpace,
    table: Vec<bool>,
}

impl HitFunctional {
    pub fn new(space: &FiniteSpace, table: Vec<bool>) -> Result<Self, HyperspaceError> {
        let opens = space.opens();
        if table.len() != opens.len() {
            return Err(HyperspaceError::ShapeMismatch(format!(
                "table has {} entries for {} opens",
                table.len(),
                opens.len()
            )));
        }
        let empty_ix = space.open_index(&space.empty_set()).expect("∅ is open");
        if table[empty_ix] {
            return Err(HyperspaceError::NotAValidFunctional { axiom: "strictness", left: vec![], right: vec![] });
        }
        for i in 0..opens.len() {
            for j in i + 1..opens.len() {
                let u = space.open_index(&opens[i].union(&opens[j])).expect("opens are union-closed");
                if table[u] != (table[i] || table[j]) {
                    return Err(HyperspaceError::NotAValidFunctional {
                        axiom: "join preservation",
                        left: space.render(&opens[i]),
                        right: space.render(&opens[j]),
                    });
                }
            }
        }
        Ok(HitFunctional { space: space.clone(), table })
    }

    pub fn space(&self) -> &FiniteSpace {
        &self.space
    }

    pub fn table(&self) -> &[bool] {
        &self.table
    }

    pub fn value(&self, u: &PointSet) -> Option<bool> {
        self.space.open_index(u).map(|i| self.table[i])
    }

    /// Pointwise order of functionals.
    pub fn le(&self, other: &HitFunctional) -> bool {
        self.table.iter().zip(&other.table).all(|(a, b)| !a || *b)
    }
}

/// `Φ_C(U) = ⟦C ∩ U ≠ ∅⟧`.
pub fn functional_of_closed(c: &ClosedSet) -> HitFunctional {
    let table = c.space.opens().iter().map(|u| c.members.intersects(u)).collect();
    HitFunctional { space: c.space.clone(), table }
}

/// The complement of the largest open on which `φ` vanishes.
pub fn closed_of_functional(phi: &HitFunctional) -> ClosedSet {
    let null = phi
        .space
        .opens()
        .iter()
        .zip(&phi.table)
        .filter(|(_, &v)| !v)
        .fold(phi.space.empty_set(), |acc, (u, _)| acc.union(u));
    ClosedSet { space: phi.space.clone(), members: null.complement() }
}

/// `f♯C = cl(f(C))`.
pub fn push_closed(f: &ContinuousMap, c: &ClosedSet) -> Result<ClosedSet, HyperspaceError> {
    if &c.space != f.source() {
        return Err(HyperspaceError::ShapeMismatch("closed set does not live on the source of f".into()));
    }
    let image = f.image(&c.members);
    if mutants::active(Mutation::PushImageWithoutClosure) {
        return Ok(ClosedSet::new_unchecked(f.target(), image));
    }
    Ok(ClosedSet::closure_of(f.target(), &image))
}

/// Checks `⟨f♯C, U⟩ = ⟨C, f⁻¹U⟩` on every open of the target.
pub fn push_closed_hits_agree(f: &ContinuousMap, c: &ClosedSet) -> Result<bool, HyperspaceError> {
    let pushed = push_closed(f, c)?;
    Ok(f.target().opens().iter().all(|u| pushed.hits_set(u) == c.hits_set(&f.preimage(u))))
}

/// `Hf : HX → HY` as a continuous map between the hyperspaces.
pub fn lift_map(f: &ContinuousMap, hx: &Hyperspace, hy: &Hyperspace) -> Result<ContinuousMap, HyperspaceError> {
    if &hx.base != f.source() || &hy.base != f.target() {
        return Err(HyperspaceError::ShapeMismatch("hyperspaces do not match the map".into()));
    }
    let assignment = hx.closed_sets().map(|c| hy.point_of(&push_closed(f, &c)?)).collect::<Result<Vec<_>, _>>()?;
    Ok(ContinuousMap::new_unchecked(hx.space.clone(), hy.space.clone(), assignment))
}

/// `σ(x) = cl({x})`.
pub fn unit_sigma(space: &FiniteSpace, x: usize) -> ClosedSet {
    if mutants::active(Mutation::SigmaSingleton) {
        return ClosedSet::new_unchecked(space, PointSet::singleton(space.len(), x));
    }
    ClosedSet { space: space.clone(), members: space.point_closure(x).clone() }
}

/// `𝒰𝒞 = cl(⋃𝒞)` for a family given as a set of points of `HX`.
pub fn mult_union(hx: &Hyperspace, family: &PointSet) -> Result<ClosedSet, HyperspaceError> {
    if family.width() != hx.len() {
        return Err(HyperspaceError::ShapeMismatch("family is not a subset of HX".into()));
    }
    for member in family.iter() {
        if let Some(missing) = hx.space.point_closure(member).difference(family).first() {
            return Err(HyperspaceError::NotClosedFamily {
                member: hx.space.name(member).to_owned(),
                missing: hx.space.name(missing).to_owned(),
            });
        }
    }
    if mutants::active(Mutation::UnionKeepsLastMember) {
        let last = family.iter().last().map(|m| hx.closed[m].clone()).unwrap_or_else(|| hx.base.empty_set());
        return Ok(ClosedSet { space: hx.base.clone(), members: last });
    }
    let mut union = hx.base.empty_set();
    for member in family.iter() {
        union.union_with(&hx.closed[member]);
    }
    Ok(ClosedSet::closure_of(&hx.base, &union))
}

/// `⟨𝒰𝒞, U⟩ = ⟨𝒞, Hit(U)⟩` for every open `U` of the base.
pub fn mult_union_hits_agree(hx: &Hyperspace, family: &PointSet) -> Result<bool, HyperspaceError> {
    let u = mult_union(hx, family)?;
    Ok(hx.base.opens().iter().all(|open| u.hits_set(open) == family.intersects(&hx.hit_set(open))))
}

/// Whether `c` lies in the closure of `σ(X)` inside `HX`, decided by the
/// finite-intersection criterion: every finite family of opens hit by `c`
/// has nonempty intersection. On a finite space the intersection of all
/// opens hit by `c` is itself such a finite intersection.
pub fn unit_closure_membership(x: &FiniteSpace, c: &ClosedSet) -> bool {
    let meet = x.opens().iter().filter(|u| c.members.intersects(u)).fold(x.full_set(), |acc, u| acc.intersection(u));
    !meet.is_empty()
}

/// The same membership decided directly: `cl(σ(X))` is the down-set of
/// `{cl{x}}` under inclusion.
pub fn unit_closure_membership_direct(x: &FiniteSpace, c: &ClosedSet) -> bool {
    (0..x.len()).any(|p| c.members.is_subset(x.point_closure(p)))
}

/// Whether `σ : X → HX` is a subspace embedding: injective, and every open
/// of `X` is the preimage of an open of `HX`.
pub fn sigma_is_embedding(hx: &Hyperspace) -> bool {
    let sigma = hx.sigma_map();
    let injective = {
        let mut seen = sigma.assignment().to_vec();
        seen.sort_unstable();
        seen.dedup();
        seen.len() == hx.base.len()
    };
    let initial = hx.base.opens().iter().all(|u| sigma.preimage(&hx.hit_set(u)) == *u);
    injective && initial
}

/// `s(x, C) = (j_x)♯ C = cl({x} × C)` in `X × Y`.
pub fn strength_h(prod: &ProductSpace, x: usize, c: &ClosedSet) -> Result<ClosedSet, HyperspaceError> {
    if c.space != prod.right {
        return Err(HyperspaceError::ShapeMismatch("closed set does not live on the right factor".into()));
    }
    let slice = prod.rectangle(&PointSet::singleton(prod.left.len(), x), &c.members);
    if mutants::active(Mutation::StrengthWithoutClosure) {
        return Ok(ClosedSet::new_unchecked(&prod.space, slice));
    }
    Ok(ClosedSet::closure_of(&prod.space, &slice))
}

/// `t(C, y) = cl(C × {y})` in `X × Y`.
pub fn costrength_h(prod: &ProductSpace, c: &ClosedSet, y: usize) -> Result<ClosedSet, HyperspaceError> {
    if c.space != prod.left {
        return Err(HyperspaceError::ShapeMismatch("closed set does not live on the left factor".into()));
    }
    let slice = prod.rectangle(&c.members, &PointSet::singleton(prod.right.len(), y));
    Ok(ClosedSet::closure_of(&prod.space, &slice))
}

/// `C × D`, closed in `X × Y`.
pub fn product_closed(prod: &ProductSpace, c: &ClosedSet, d: &ClosedSet) -> Result<ClosedSet, HyperspaceError> {
    if c.space != prod.left || d.space != prod.right {
        return Err(HyperspaceError::ShapeMismatch("factors do not match the product".into()));
    }
    Ok(ClosedSet::new_unchecked(&prod.space, prod.rectangle(&c.members, &d.members)))
}

/// Everything needed to evaluate the two diagonals of the commutativity
/// square for `H` on `X × Y`.
pub struct CommutativityContext {
    pub prod: ProductSpace,
    pub hx: Hyperspace,
    pub hy: Hyperspace,
    /// `H(X × Y)`.
    pub hxy: Hyperspace,
    /// `HX × Y`.
    pub hx_y: ProductSpace,
    /// `X × HY`.
    pub x_hy: ProductSpace,
}

impl CommutativityContext {
    pub fn new(x: &FiniteSpace, y: &FiniteSpace) -> Self {
        let prod = product(x, y);
        let hx = build_hyperspace(x);
        let hy = build_hyperspace(y);
        let hxy = build_hyperspace(&prod.space);
        let hx_y = product(hx.space(), y);
        let x_hy = product(x, hy.space());
        CommutativityContext { prod, hx, hy, hxy, hx_y, x_hy }
    }

    /// `𝒰 ∘ t♯ ∘ s` at `(C, D)`: strength first, costrength inside.
    pub fn strength_first(&self, c: &ClosedSet, d: &ClosedSet) -> Result<ClosedSet, HyperspaceError> {
        let cp = self.hx.point_of(c)?;
        let outer = strength_h(&self.hx_y, cp, d)?;
        let mut images = PointSet::empty(self.hxy.len());
        for p in outer.members.iter() {
            let (cx, y) = self.hx_y.split(p);
            let t = costrength_h(&self.prod, &self.hx.closed_set(cx), y)?;
            images.insert(self.hxy.point_of(&t)?);
        }
        let family = self.hxy.space.closure(&images);
        mult_union(&self.hxy, &family)
    }

    /// `𝒰 ∘ s♯ ∘ t` at `(C, D)`: costrength first, strength inside.
    pub fn costrength_first(&self, c: &ClosedSet, d: &ClosedSet) -> Result<ClosedSet, HyperspaceError> {
        let dp = self.hy.point_of(d)?;
        let outer = costrength_h(&self.x_hy, c, dp)?;
        let mut images = PointSet::empty(self.hxy.len());
        for p in outer.members.iter() {
            let (x, dy) = self.x_hy.split(p);
            let s = strength_h(&self.prod, x, &self.hy.closed_set(dy))?;
            images.insert(self.hxy.point_of(&s)?);
        }
        let family = self.hxy.space.closure(&images);
        mult_union(&self.hxy, &family)
    }
}

/// Outcome of [`check_h_algebra`]. The algebra side (`continuous`,
/// `unit_law`, `algebra_square`) and the lattice side (`is_join_of_closed`,
/// `is_topological_cjsl`) must agree, which is recorded in `consistent`.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct AlgebraVerdict {
    pub continuous: bool,
    pub unit_law: bool,
    pub algebra_square: bool,
    pub is_join_of_closed: bool,
    pub is_topological_cjsl: bool,
    pub binary_join_continuous: bool,
    pub closed_join_continuous: bool,
    pub consistent: bool,
}

impl AlgebraVerdict {
    pub fn is_algebra(&self) -> bool {
        self.continuous && self.unit_law && self.algebra_square
    }
}

/// Least upper bound of `set` in the specialization preorder, if one exists.
pub fn join_of(space: &FiniteSpace, set: &PointSet) -> Option<usize> {
    let upper = set.iter().fold(space.full_set(), |acc, x| acc.intersection(space.min_nbhd(x)));
    let least = upper.iter().find(|&u| upper.is_subset(space.min_nbhd(u)));
    least
}

/// Checks whether `a_map : HA → A` (tabulated over the points of `HA`) is an
/// `H`-algebra, and independently whether `A` is a topological complete
/// join-semilattice with `a_map` the join of closed sets.
pub fn check_h_algebra(a_space: &FiniteSpace, a_map: &[usize]) -> Result<AlgebraVerdict, HyperspaceError> {
    let ha = build_hyperspace(a_space);
    if a_map.len() != ha.len() || a_map.iter().any(|&p| p >= a_space.len()) {
        return Err(HyperspaceError::ShapeMismatch(format!(
            "structure map needs one point of A per point of HA ({} entries)",
            ha.len()
        )));
    }
    let continuous = ContinuousMap::new(ha.space.clone(), a_space.clone(), a_map.to_vec()).is_ok();
    let unit_law =
        (0..a_space.len()).all(|x| ha.point_of(&unit_sigma(a_space, x)).map(|p| a_map[p] == x).unwrap_or(false));
    let hha = build_hyperspace(ha.space());
    let algebra_square = (0..hha.len()).all(|f| {
        let family = hha.members_of(f);
        let pushed = a_space.closure(&PointSet::from_indices(a_space.len(), family.iter().map(|c| a_map[c])));
        let via_map = ha.index_of(&pushed).map(|p| a_map[p]);
        let via_union = mult_union(&ha, family).ok().and_then(|u| ha.index_of(u.members())).map(|p| a_map[p]);
        via_map.is_some() && via_map == via_union
    });

    let joins: Vec<Option<usize>> = (0..ha.len()).map(|c| join_of(a_space, ha.members_of(c))).collect();
    let is_join_of_closed = joins.iter().zip(a_map).all(|(j, &a)| j.is_some_and(|j| a_space.equivalent(j, a)));

    let sep = check_separation(a_space);
    let n = a_space.len();
    let has_bottom = join_of(a_space, &a_space.empty_set()).is_some();
    let binary: Vec<Option<usize>> =
        (0..n * n).map(|p| join_of(a_space, &PointSet::from_indices(n, [p / n, p % n]))).collect();
    let complete = has_bottom && binary.iter().all(Option::is_some);
    let binary_join_continuous = complete && {
        let aa = product(a_space, a_space);
        let assignment: Vec<usize> = binary.iter().map(|j| j.expect("complete")).collect();
        ContinuousMap::new(aa.space, a_space.clone(), assignment).is_ok()
    };
    let closed_join_continuous = joins.iter().all(Option::is_some) && {
        let assignment: Vec<usize> = joins.iter().map(|j| j.expect("checked")).collect();
        ContinuousMap::new(ha.space.clone(), a_space.clone(), assignment).is_ok()
    };
    let is_topological_cjsl = sep.is_t0 && sep.is_sober && complete && binary_join_continuous;
    let algebra = continuous && unit_law && algebra_square;
    let lattice = is_join_of_closed && is_topological_cjsl;
    Ok(AlgebraVerdict {
        continuous,
        unit_law,
        algebra_square,
        is_join_of_closed,
        is_topological_cjsl,
        binary_join_continuous,
        closed_join_continuous,
        consistent: algebra == lattice && (!complete || binary_join_continuous == closed_join_continuous),
    })
}

/// The join-of-closed-sets table for `a_space`, when every closed set has a
/// least upper bound.
pub fn join_structure_map(a_space: &FiniteSpace) -> Option<Vec<usize>> {
    build_hyperspace(a_space).closed_sets().map(|c| join_of(a_space, c.members())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_spaces() -> Vec<FiniteSpace> {
        let mut v = vec![
            FiniteSpace::empty(),
            FiniteSpace::point(),
            FiniteSpace::sierpinski(),
            FiniteSpace::discrete(2),
            FiniteSpace::indiscrete(2),
            FiniteSpace::chain(3),
            FiniteSpace::discrete(3),
            FiniteSpace::lattice_w(),
        ];
        v.push(
            FiniteSpace::from_order_fn(vec!["a".into(), "b".into(), "c".into()], |x, y| x == y || (x == 0 && y != 0))
                .unwrap(),
        );
        v
    }

    #[test]
    fn hyperspace_of_sierpinski_is_a_chain() {
        let hs = build_hyperspace(&FiniteSpace::sierpinski());
        assert_eq!(hs.len(), 3);
        let rendered: Vec<Vec<String>> = hs.closed_sets().map(|c| c.render()).collect();
        assert!(rendered.contains(&vec![]));
        assert!(rendered.contains(&vec!["0".to_owned()]));
        assert!(rendered.contains(&vec!["0".to_owned(), "1".to_owned()]));
        let s = hs.space();
        let (a, b, c) = (
            hs.index_of(&PointSet::empty(2)).unwrap(),
            hs.index_of(&PointSet::from_indices(2, [0])).unwrap(),
            hs.index_of(&PointSet::full(2)).unwrap(),
        );
        assert!(s.leq(a, b) && s.leq(b, c) && !s.leq(c, b));
        assert_eq!(s.opens().len(), 4);
        assert_eq!(lower_vietoris_opens(&hs), s.opens());
    }

    #[test]
    fn hyperspace_of_empty_and_discrete() {
        let he = build_hyperspace(&FiniteSpace::empty());
        assert_eq!(he.len(), 1);
        assert!(he.closed_set(0).is_empty());
        let hd = build_hyperspace(&FiniteSpace::discrete(2));
        assert_eq!(hd.len(), 4);
        assert_eq!(hd.space().specialization().len(), 9);
    }

    #[test]
    fn lower_vietoris_matches_inclusion_order() {
        for x in small_spaces() {
            let hx = build_hyperspace(&x);
            assert_eq!(lower_vietoris_opens(&hx), hx.space().opens(), "{x:?}");
        }
    }

    #[test]
    fn hit_examples() {
        let s = FiniteSpace::sierpinski();
        let one = PointSet::singleton(2, 1);
        assert!(!hit(&ClosedSet::empty(&s), &one).unwrap());
        let c0 = ClosedSet::new(&s, PointSet::singleton(2, 0)).unwrap();
        assert!(!hit(&c0, &one).unwrap());
        assert!(hit(&ClosedSet::whole(&s), &one).unwrap());
        assert!(matches!(hit(&c0, &PointSet::singleton(2, 0)), Err(HyperspaceError::NotOpen(_))));
        assert!(ClosedSet::new(&s, one).is_err());
    }

    #[test]
    fn hit_preserves_binary_unions() {
        for x in small_spaces() {
            for c in build_hyperspace(&x).closed_sets() {
                for u in x.opens() {
                    for v in x.opens() {
                        assert_eq!(hit(&c, &u.union(v)).unwrap(), hit(&c, u).unwrap() || hit(&c, v).unwrap());
                    }
                }
            }
        }
    }

    #[test]
    fn whole_space_functional() {
        let x = FiniteSpace::lattice_w();
        let phi = functional_of_closed(&ClosedSet::whole(&x));
        for (u, v) in x.opens().iter().zip(phi.table()) {
            assert_eq!(*v, !u.is_empty());
        }
    }

    #[test]
    fn duality_round_trip_and_surjectivity() {
        for x in small_spaces() {
            let hx = build_hyperspace(&x);
            for c in hx.closed_sets() {
                assert_eq!(closed_of_functional(&functional_of_closed(&c)), c);
                for d in hx.closed_sets() {
                    assert_eq!(c.is_subset(&d), functional_of_closed(&c).le(&functional_of_closed(&d)));
                }
            }
            if x.len() <= 3 {
                let k = x.opens().len();
                let valid: Vec<HitFunctional> = (0u64..1 << k)
                    .filter_map(|m| HitFunctional::new(&x, (0..k).map(|i| m >> i & 1 == 1).collect()).ok())
                    .collect();
                assert_eq!(valid.len(), hx.len());
                let mut recovered: Vec<PointSet> =
                    valid.iter().map(|p| closed_of_functional(p).members().clone()).collect();
                recovered.sort();
                recovered.dedup();
                assert_eq!(recovered.len(), hx.len());
            }
        }
    }

    #[test]
    fn invalid_functionals_have_witnesses() {
        let s = FiniteSpace::sierpinski();
        assert!(matches!(
            HitFunctional::new(&s, vec![true, true, true]),
            Err(HyperspaceError::NotAValidFunctional { axiom: "strictness", .. })
        ));
        // opens sorted: {}, {1}, {0,1}; φ({1}) = 1 but φ(S) = 0
        let ix1 = s.open_index(&PointSet::singleton(2, 1)).unwrap();
        let mut table = vec![false; 3];
        table[ix1] = true;
        assert!(matches!(
            HitFunctional::new(&s, table),
            Err(HyperspaceError::NotAValidFunctional { axiom: "join preservation", .. })
        ));
    }

    #[test]
    fn push_examples() {
        let s = FiniteSpace::sierpinski();
        let d = FiniteSpace::discrete(2);
        let c = ClosedSet::new(&d, PointSet::singleton(2, 0)).unwrap();
        let f = ContinuousMap::constant(&d, &s, 1);
        assert_eq!(push_closed(&f, &c).unwrap().members().to_vec(), vec![0, 1]);
        assert!(push_closed_hits_agree(&f, &c).unwrap());
        let id = ContinuousMap::identity(&d);
        assert_eq!(push_closed(&id, &c).unwrap(), c);
        assert!(matches!(push_closed(&f, &ClosedSet::whole(&s)), Err(HyperspaceError::ShapeMismatch(_))));
    }

    #[test]
    fn sigma_examples() {
        let s = FiniteSpace::sierpinski();
        assert_eq!(unit_sigma(&s, 1).members().to_vec(), vec![0, 1]);
        let d = FiniteSpace::discrete(3);
        assert_eq!(unit_sigma(&d, 2).members().to_vec(), vec![2]);
        for x in small_spaces() {
            let hx = build_hyperspace(&x);
            let sigma = hx.sigma_map();
            for u in x.opens() {
                assert_eq!(sigma.preimage(&hx.hit_set(u)), *u);
            }
            assert_eq!(sigma_is_embedding(&hx), check_separation(&x).is_t0);
        }
    }

    #[test]
    fn union_examples() {
        let s = FiniteSpace::sierpinski();
        let hs = build_hyperspace(&s);
        let bottom = hs.index_of(&PointSet::empty(2)).unwrap();
        let zero = hs.index_of(&PointSet::singleton(2, 0)).unwrap();
        let top = hs.index_of(&PointSet::full(2)).unwrap();
        assert!(mult_union(&hs, &PointSet::singleton(3, bottom)).unwrap().is_empty());
        let fam = PointSet::from_indices(3, [bottom, zero]);
        assert_eq!(mult_union(&hs, &fam).unwrap().members().to_vec(), vec![0]);
        assert!(mult_union_hits_agree(&hs, &fam).unwrap());
        let principal = hs.space().point_closure(top).clone();
        assert_eq!(mult_union(&hs, &principal).unwrap(), ClosedSet::whole(&s));
        let err = mult_union(&hs, &PointSet::singleton(3, top)).unwrap_err();
        assert!(matches!(err, HyperspaceError::NotClosedFamily { .. }));
    }

    #[test]
    fn unit_closure_examples() {
        for x in small_spaces() {
            for p in 0..x.len() {
                assert!(unit_closure_membership(&x, &unit_sigma(&x, p)));
            }
            for c in build_hyperspace(&x).closed_sets() {
                assert_eq!(unit_closure_membership(&x, &c), unit_closure_membership_direct(&x, &c));
            }
        }
        let d = FiniteSpace::discrete(2);
        assert!(!unit_closure_membership(&d, &ClosedSet::whole(&d)));
        let w = FiniteSpace::lattice_w();
        assert!(build_hyperspace(&w).closed_sets().all(|c| unit_closure_membership(&w, &c)));
    }

    #[test]
    fn strength_examples() {
        let s = FiniteSpace::sierpinski();
        let ss = product(&s, &s);
        assert!(strength_h(&ss, 1, &ClosedSet::empty(&s)).unwrap().is_empty());
        let r = strength_h(&ss, 1, &ClosedSet::whole(&s)).unwrap();
        assert_eq!(r.members().len(), 4);
        // rectangle law
        for x in 0..2 {
            for c in build_hyperspace(&s).closed_sets() {
                let st = strength_h(&ss, x, &c).unwrap();
                for u in s.opens() {
                    for v in s.opens() {
                        assert_eq!(st.hits_set(&ss.rectangle(u, v)), u.contains(x) && c.hits_set(v));
                    }
                }
            }
        }
    }

    #[test]
    fn product_closed_examples() {
        let s = FiniteSpace::sierpinski();
        let d = FiniteSpace::discrete(2);
        let ctx = CommutativityContext::new(&s, &d);
        let e = ClosedSet::empty(&s);
        assert!(product_closed(&ctx.prod, &e, &ClosedSet::whole(&d)).unwrap().is_empty());
        assert_eq!(
            product_closed(&ctx.prod, &ClosedSet::whole(&s), &ClosedSet::whole(&d)).unwrap(),
            ClosedSet::whole(&ctx.prod.space)
        );
        for c in ctx.hx.closed_sets() {
            for dd in ctx.hy.closed_sets() {
                let direct = product_closed(&ctx.prod, &c, &dd).unwrap();
                assert_eq!(ctx.strength_first(&c, &dd).unwrap(), direct);
                assert_eq!(ctx.costrength_first(&c, &dd).unwrap(), direct);
            }
        }
    }

    #[test]
    fn algebra_examples() {
        let w = FiniteSpace::lattice_w();
        let join = join_structure_map(&w).unwrap();
        let v = check_h_algebra(&w, &join).unwrap();
        assert!(v.is_algebra() && v.is_join_of_closed && v.is_topological_cjsl && v.consistent, "{v:?}");

        let d = FiniteSpace::discrete(2);
        let hd = build_hyperspace(&d);
        for m in 0u64..(1 << hd.len()) {
            let table: Vec<usize> = (0..hd.len()).map(|i| (m >> i & 1) as usize).collect();
            let v = check_h_algebra(&d, &table).unwrap();
            assert!(!v.is_algebra() && !v.is_topological_cjsl && v.consistent);
        }

        let p = FiniteSpace::point();
        let v = check_h_algebra(&p, &[0, 0]).unwrap();
        assert!(v.is_algebra() && v.is_topological_cjsl && v.consistent);
        assert!(matches!(check_h_algebra(&p, &[0]), Err(HyperspaceError::ShapeMismatch(_))));
    }
}
