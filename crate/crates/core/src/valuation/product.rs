//! Strength, costrength and product valuations.

use super::{integrate, mult_e, pushforward, Ext, LowerSemiFn, SimpleSecondOrder, Valuation, ValuationError};
use crate::mutants::{self, Mutation};
use crate::pointset::PointSet;
use crate::scalar::{Scalar, SignedAccumulator};
use crate::space::{FiniteSpace, ProductSpace};

fn check_factor<S: Scalar>(space: &FiniteSpace, nu: &Valuation<S>, which: &str) -> Result<(), ValuationError> {
    if nu.space() != space {
        return Err(ValuationError::ShapeMismatch(format!("valuation does not live on the {which} factor")));
    }
    Ok(())
}

/// `s(x, ρ)(W) = ρ(W_x)`, the pushforward along `y ↦ (x, y)`.
pub fn strength_v<S: Scalar>(
    prod: &ProductSpace,
    x: usize,
    rho: &Valuation<S>,
) -> Result<Valuation<S>, ValuationError> {
    check_factor(&prod.right, rho, "right")?;
    pushforward(&prod.insert_left(x), rho)
}

/// `t(ν, y)(W) = ν(W^y)`, the pushforward along `x ↦ (x, y)`.
pub fn costrength_v<S: Scalar>(
    prod: &ProductSpace,
    nu: &Valuation<S>,
    y: usize,
) -> Result<Valuation<S>, ValuationError> {
    check_factor(&prod.left, nu, "left")?;
    pushforward(&prod.insert_right(y), nu)
}

fn minimal_points(space: &FiniteSpace, w: &PointSet) -> Vec<usize> {
    let mut out: Vec<usize> = Vec::new();
    for m in w.iter() {
        let strictly_above_something = w.iter().any(|p| space.leq(p, m) && !space.leq(m, p));
        if !strictly_above_something && !out.iter().any(|&o| space.equivalent(o, m)) {
            out.push(m);
        }
    }
    out
}

/// The product valuation `ν ⊗ ρ`, by inclusion–exclusion over the
/// rectangles `↑x × ↑y` generated by the minimal points of each open.
///
/// A term `ν(∩↑xᵢ)·ρ(∩↑yᵢ)` is bounded by every single-rectangle term, so
/// if no single rectangle carries infinite mass every term is finite; if one
/// does, monotonicity makes the whole value infinite.
pub fn product_valuation<S: Scalar>(
    prod: &ProductSpace,
    nu: &Valuation<S>,
    rho: &Valuation<S>,
) -> Result<Valuation<S>, ValuationError> {
    check_factor(&prod.left, nu, "left")?;
    check_factor(&prod.right, rho, "right")?;
    let singletons_only = mutants::active(Mutation::ProductDropsIntersections);
    let mut table = Vec::with_capacity(prod.space.opens().len());
    for w in prod.space.opens() {
        let rects: Vec<(PointSet, PointSet)> = minimal_points(&prod.space, w)
            .into_iter()
            .map(|m| {
                let (x, y) = prod.split(m);
                (prod.left.min_nbhd(x).clone(), prod.right.min_nbhd(y).clone())
            })
            .collect();
        let mut singles_infinite = false;
        for (u, v) in &rects {
            if (nu.value(u)? * rho.value(v)?).is_infinite() {
                singles_infinite = true;
            }
        }
        if singles_infinite {
            table.push(Ext::Infinite);
            continue;
        }
        let mut acc = SignedAccumulator::new();
        let max_depth = if singletons_only { 1 } else { rects.len() };
        include_exclude(nu, rho, &rects, 0, None, 0, max_depth, &mut acc)?;
        match acc.resolve() {
            Some(v) => table.push(v),
            None => return Err(ValuationError::InfinityIndeterminate(prod.space.render(w))),
        }
    }
    Ok(Valuation::from_table_unchecked(&prod.space, table))
}

#[allow(clippy::too_many_arguments)]
fn include_exclude<S: Scalar>(
    nu: &Valuation<S>,
    rho: &Valuation<S>,
    rects: &[(PointSet, PointSet)],
    start: usize,
    current: Option<&(PointSet, PointSet)>,
    depth: usize,
    max_depth: usize,
    acc: &mut SignedAccumulator<S>,
) -> Result<(), ValuationError> {
    if depth == max_depth {
        return Ok(());
    }
    for i in start..rects.len() {
        let next = match current {
            None => rects[i].clone(),
            Some((u, v)) => (u.intersection(&rects[i].0), v.intersection(&rects[i].1)),
        };
        // empty meets stay empty in every extension
        if next.0.is_empty() || next.1.is_empty() {
            continue;
        }
        let term = nu.value(&next.0)? * rho.value(&next.1)?;
        acc.add(&term, depth.is_multiple_of(2));
        include_exclude(nu, rho, rects, i + 1, Some(&next), depth + 1, max_depth, acc)?;
    }
    Ok(())
}

/// Whether `μ(U × V) = ν(U)·ρ(V)` for all opens `U`, `V`.
pub fn rectangle_reconstruction<S: Scalar>(
    prod: &ProductSpace,
    mu: &Valuation<S>,
    nu: &Valuation<S>,
    rho: &Valuation<S>,
) -> Result<bool, ValuationError> {
    for u in prod.left.opens() {
        for v in prod.right.opens() {
            let r = prod.rectangle(u, v);
            if mu.value(&r)? != &(nu.value(u)? * rho.value(v)?) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// `ℰ ∘ V(t) ∘ s` at `(ν, ρ)`: `W ↦ ⟨ρ, y ↦ ν(W^y)⟩`.
pub fn strength_first_by_integration<S: Scalar>(
    prod: &ProductSpace,
    nu: &Valuation<S>,
    rho: &Valuation<S>,
) -> Result<Valuation<S>, ValuationError> {
    check_factor(&prod.left, nu, "left")?;
    check_factor(&prod.right, rho, "right")?;
    let mut table = Vec::new();
    for w in prod.space.opens() {
        let values = (0..prod.right.len())
            .map(|y| nu.value(&prod.slice_at_right(w, y)).cloned())
            .collect::<Result<Vec<_>, _>>()?;
        table.push(integrate(rho, &LowerSemiFn::new(&prod.right, values)?)?);
    }
    Ok(Valuation::from_table_unchecked(&prod.space, table))
}

/// `ℰ ∘ V(s) ∘ t` at `(ν, ρ)`: `W ↦ ⟨ν, x ↦ ρ(W_x)⟩`.
pub fn costrength_first_by_integration<S: Scalar>(
    prod: &ProductSpace,
    nu: &Valuation<S>,
    rho: &Valuation<S>,
) -> Result<Valuation<S>, ValuationError> {
    check_factor(&prod.left, nu, "left")?;
    check_factor(&prod.right, rho, "right")?;
    let mut table = Vec::new();
    for w in prod.space.opens() {
        let values = (0..prod.left.len())
            .map(|x| rho.value(&prod.slice_at_left(w, x)).cloned())
            .collect::<Result<Vec<_>, _>>()?;
        table.push(integrate(nu, &LowerSemiFn::new(&prod.left, values)?)?);
    }
    Ok(Valuation::from_table_unchecked(&prod.space, table))
}

/// `ℰ(Σ_y ρ_y·δ_{t(ν, y)})` for `ρ = Σ_y ρ_y·δ_y`.
pub fn strength_first_molecular<S: Scalar>(
    prod: &ProductSpace,
    nu: &Valuation<S>,
    rho_weights: &[Ext<S>],
) -> Result<Valuation<S>, ValuationError> {
    if rho_weights.len() != prod.right.len() {
        return Err(ValuationError::ShapeMismatch("one weight per point of the right factor".into()));
    }
    let mut atoms = Vec::new();
    for (y, w) in rho_weights.iter().enumerate().filter(|(_, w)| !w.is_zero()) {
        atoms.push((w.clone(), costrength_v(prod, nu, y)?));
    }
    Ok(mult_e(&SimpleSecondOrder::new(&prod.space, atoms)?))
}

/// `ℰ(Σ_x ν_x·δ_{s(x, ρ)})` for `ν = Σ_x ν_x·δ_x`.
pub fn costrength_first_molecular<S: Scalar>(
    prod: &ProductSpace,
    nu_weights: &[Ext<S>],
    rho: &Valuation<S>,
) -> Result<Valuation<S>, ValuationError> {
    if nu_weights.len() != prod.left.len() {
        return Err(ValuationError::ShapeMismatch("one weight per point of the left factor".into()));
    }
    let mut atoms = Vec::new();
    for (x, w) in nu_weights.iter().enumerate().filter(|(_, w)| !w.is_zero()) {
        atoms.push((w.clone(), strength_v(prod, x, rho)?));
    }
    Ok(mult_e(&SimpleSecondOrder::new(&prod.space, atoms)?))
}
