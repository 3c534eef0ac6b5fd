//! The specialization order of `VX` seen three ways.

use serde::Serialize;

use super::{integrate, Ext, LowerSemiFn, Valuation, ValuationError};
use crate::pointset::PointSet;
use crate::scalar::Scalar;
use crate::space::FiniteSpace;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct OrderReport {
    /// `ν(U) ≤ ρ(U)` for every open `U`.
    pub opens_le: bool,
    /// `⟨ν, g⟩ ≤ ⟨ρ, g⟩` over the canonical test family and all indicators.
    pub integrals_le: bool,
    /// `ν(U) ≤ ρ(U)` for every open `U` that is upper for the auxiliary preorder.
    pub stochastic_le: Option<bool>,
}

/// Every lower semicontinuous `X → {0, 1, …, |X|}`. The family grows like
/// `(|X|+1)^|X|` and is meant for small spaces.
pub fn canonical_test_functions<S: Scalar>(space: &FiniteSpace) -> Vec<LowerSemiFn<S>> {
    let classes = space.classes_bottom_up();
    let top = space.len();
    let mut out = Vec::new();
    let mut values = vec![0usize; space.len()];
    fill(space, &classes, 0, top, &mut values, &mut out);
    out
}

fn fill<S: Scalar>(
    space: &FiniteSpace,
    classes: &[Vec<usize>],
    i: usize,
    top: usize,
    values: &mut Vec<usize>,
    out: &mut Vec<LowerSemiFn<S>>,
) {
    if i == classes.len() {
        let ext = values.iter().map(|&v| Ext::Finite(S::from_count(v))).collect();
        out.push(LowerSemiFn::from_values_unchecked(space, ext));
        return;
    }
    let rep = classes[i][0];
    let floor =
        space.point_closure(rep).iter().filter(|&y| !space.equivalent(y, rep)).map(|y| values[y]).max().unwrap_or(0);
    for v in floor..=top {
        for &x in &classes[i] {
            values[x] = v;
        }
        fill(space, classes, i + 1, top, values, out);
    }
}

fn validate_aux(space: &FiniteSpace, aux: &[(usize, usize)]) -> Result<Vec<Vec<bool>>, ValuationError> {
    let n = space.len();
    let mut rel = vec![vec![false; n]; n];
    for &(a, b) in aux {
        if a >= n || b >= n {
            return Err(ValuationError::ShapeMismatch(format!("pair ({a}, {b}) out of range")));
        }
        rel[a][b] = true;
    }
    for (x, row) in rel.iter().enumerate() {
        if !row[x] {
            return Err(ValuationError::NotAPreorder);
        }
    }
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                if rel[a][b] && rel[b][c] && !rel[a][c] {
                    return Err(ValuationError::NotAPreorder);
                }
            }
        }
    }
    // closed in X × X means down-closed for the product specialization
    for a in 0..n {
        for b in 0..n {
            if !rel[a][b] {
                continue;
            }
            for a2 in space.point_closure(a).iter() {
                for b2 in space.point_closure(b).iter() {
                    if !rel[a2][b2] {
                        return Err(ValuationError::OrderNotClosed(
                            space.name(a2).to_owned(),
                            space.name(b2).to_owned(),
                        ));
                    }
                }
            }
        }
    }
    Ok(rel)
}

fn is_upper(rel: &[Vec<bool>], u: &PointSet) -> bool {
    u.iter().all(|a| rel[a].iter().enumerate().all(|(b, &r)| !r || u.contains(b)))
}

/// Compares `ν` and `ρ`. The opens order and the integral order must agree;
/// a disagreement is reported as [`ValuationError::CrossCheck`].
pub fn order_checks<S: Scalar>(
    nu: &Valuation<S>,
    rho: &Valuation<S>,
    aux: Option<&[(usize, usize)]>,
) -> Result<OrderReport, ValuationError> {
    let space = nu.space();
    if rho.space() != space {
        return Err(ValuationError::ShapeMismatch("valuations live on different spaces".into()));
    }
    let opens_le = nu.le(rho);
    let mut integrals_le = true;
    for u in space.opens() {
        let g = LowerSemiFn::indicator(space, u)?;
        integrals_le &= integrate(nu, &g)? <= integrate(rho, &g)?;
    }
    if integrals_le {
        for g in canonical_test_functions::<S>(space) {
            if integrate(nu, &g)? > integrate(rho, &g)? {
                integrals_le = false;
                break;
            }
        }
    }
    if opens_le != integrals_le {
        return Err(ValuationError::CrossCheck("opens order and integral order disagree".into()));
    }
    let stochastic_le = match aux {
        None => None,
        Some(pairs) => {
            let rel = validate_aux(space, pairs)?;
            let mut le = true;
            for (i, u) in space.opens().iter().enumerate() {
                if is_upper(&rel, u) && nu.table()[i] > rho.table()[i] {
                    le = false;
                }
            }
            Some(le)
        }
    };
    Ok(OrderReport { opens_le, integrals_le, stochastic_le })
}
