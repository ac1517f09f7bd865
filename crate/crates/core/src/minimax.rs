//! Linear programs behind the projection: the per-hyperedge min-β sandwich
//! and the symmetric lower-bound program over a finite family of costs.

use crate::cost::{class_masks, full_mask, CutCost};
use crate::error::{Error, Result};
use crate::lp::{solve_lp, LpInstance, LpStatus, Relation};
use crate::project::pairs;

/// Sandwich LP for one cost: variables are the pair weights in
/// lexicographic pair order followed by β; the objective is β.
pub fn build_projection_lp(cost: &CutCost, require_nonneg: bool) -> Result<LpInstance> {
    let d = cost.arity();
    let classes = cost.defined_classes();
    if classes.is_empty() {
        return Err(Error::Underspecified("no proper subset has a defined cost".into()));
    }
    let pair_list: Vec<(usize, usize)> = pairs(d).collect();
    let npairs = pair_list.len();
    let beta = npairs;
    let mut lp = LpInstance::new(npairs + 1);
    let mut objective = vec![0.0; npairs + 1];
    objective[beta] = 1.0;
    lp.minimize(objective);
    for v in 0..npairs {
        lp.set_lower_bound(v, if require_nonneg { Some(0.0) } else { None });
    }
    lp.set_lower_bound(beta, Some(1.0));

    for (mask, w) in classes {
        let crossing: Vec<f64> = pair_list
            .iter()
            .map(|&(a, b)| if (mask >> a & 1) != (mask >> b & 1) { 1.0 } else { 0.0 })
            .collect();
        if w == 0.0 {
            let mut row = crossing.clone();
            row.push(0.0);
            lp.add_constraint(row.clone(), Relation::Le, 0.0);
            lp.add_constraint(row, Relation::Ge, 0.0);
        } else {
            let mut lower = crossing.clone();
            lower.push(0.0);
            lp.add_constraint(lower, Relation::Ge, w);
            let mut upper = crossing;
            upper.push(-w);
            lp.add_constraint(upper, Relation::Le, 0.0);
        }
    }
    Ok(lp)
}

/// Canonical symmetry class of the coefficient `φ̃(r, s)`, where `r` is how
/// many pair endpoints lie in a subset of size `s`. Classes are
/// `(0, s)` for `1 <= s <= δ-2` (absorbing `(2, δ-s)`) and `(1, s)` for
/// `1 <= s <= δ/2` (absorbing `(1, δ-s)`).
pub fn coefficient_class(r: usize, s: usize, arity: usize) -> (usize, usize) {
    match r {
        0 => (0, s),
        1 => (1, s.min(arity - s)),
        _ => (0, arity - s),
    }
}

/// All coefficient classes for `arity`, in a fixed order.
pub fn coefficient_classes(arity: usize) -> Vec<(usize, usize)> {
    let mut out: Vec<(usize, usize)> = (1..=arity.saturating_sub(2)).map(|s| (0, s)).collect();
    out.extend((1..=arity / 2).map(|s| (1, s)));
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct LowerBound {
    pub beta: f64,
    /// Optimal `φ̃` per class from [`coefficient_classes`].
    pub coefficients: Vec<((usize, usize), f64)>,
}

/// Optimal β of the symmetric linear-map program restricted to the given
/// family. Every member must be submodular.
pub fn beta_lower_bound(arity: usize, families: &[CutCost]) -> Result<LowerBound> {
    for (i, w) in families.iter().enumerate() {
        if w.arity() != arity {
            return Err(Error::ArityMismatch {
                edge: i,
                expected: arity,
                found: w.arity(),
            });
        }
        if !w.is_submodular()? {
            return Err(Error::NotSubmodular);
        }
    }
    beta_lower_bound_unchecked(arity, families)
}

/// [`beta_lower_bound`] without the submodularity precondition.
pub fn beta_lower_bound_unchecked(arity: usize, families: &[CutCost]) -> Result<LowerBound> {
    if arity < 2 {
        return Err(Error::InvalidArgument("arity must be at least 2".into()));
    }
    if families.is_empty() {
        return Err(Error::InvalidArgument("empty cost family".into()));
    }
    let classes = coefficient_classes(arity);
    let nc = classes.len();
    let class_pos = |r: usize, s: usize| {
        let key = coefficient_class(r, s, arity);
        classes.iter().position(|&c| c == key).expect("class enumerated")
    };
    let full = full_mask(arity);
    let pair_list: Vec<(usize, usize)> = pairs(arity).collect();

    let mut lp = LpInstance::new(nc + 1);
    let mut objective = vec![0.0; nc + 1];
    objective[nc] = 1.0;
    lp.minimize(objective);
    for v in 0..nc {
        lp.set_free(v);
    }
    lp.set_lower_bound(nc, Some(1.0));

    for w in families {
        let table = w.to_table()?;
        let values: Vec<f64> = (1..full)
            .map(|m| {
                table
                    .eval_mask(m)
                    .ok_or_else(|| Error::Underspecified("lower bound needs full tables".into()))
            })
            .collect::<Result<_>>()?;
        // g[p][c] = Σ_{S'} w(S') [class(p, S') = c]
        let g: Vec<Vec<f64>> = pair_list
            .iter()
            .map(|&(a, b)| {
                let pair = (1u64 << a) | (1u64 << b);
                let mut row = vec![0.0; nc];
                for (m, &val) in (1..full).zip(&values) {
                    let r = (m & pair).count_ones() as usize;
                    row[class_pos(r, m.count_ones() as usize)] += val;
                }
                row
            })
            .collect();
        for mask in class_masks(arity) {
            let ws = values[(mask - 1) as usize];
            let mut row = vec![0.0; nc + 1];
            for (p, &(a, b)) in pair_list.iter().enumerate() {
                if (mask >> a & 1) != (mask >> b & 1) {
                    for c in 0..nc {
                        row[c] += g[p][c];
                    }
                }
            }
            if ws == 0.0 {
                lp.add_constraint(row.clone(), Relation::Le, 0.0);
                lp.add_constraint(row, Relation::Ge, 0.0);
            } else {
                lp.add_constraint(row.clone(), Relation::Ge, ws);
                row[nc] = -ws;
                lp.add_constraint(row, Relation::Le, 0.0);
            }
        }
    }
    let result = solve_lp(&lp)?;
    match result.status {
        LpStatus::Optimal => Ok(LowerBound {
            beta: result.solution[nc],
            coefficients: classes.into_iter().zip(result.solution[..nc].iter().copied()).collect(),
        }),
        LpStatus::Infeasible => Err(Error::Infeasible("no symmetric linear map satisfies the family".into())),
        LpStatus::Unbounded => Err(Error::Lp("lower-bound LP unbounded".into())),
    }
}

/// Rows of the extremal families, as digit strings over the subset columns
/// listed by [`family_columns`].
const FAMILY4: [&str; 4] = ["0111111", "0011011", "1111111", "1111222"];
const FAMILY5: [&str; 6] = [
    "011111111111111",
    "011111111222222",
    "111111111111111",
    "111111222222111",
    "111110222222111",
    "111112222222222",
];
const FAMILY6: [&str; 9] = [
    "0111111111111111111111111111111",
    "0111111111122222222222222222222",
    "1111111111111111111111111111111",
    "1111112222222222222223333333333",
    "1111111222222221111111111222222",
    "1111110222222221111111111222222",
    "1111111122212222221111222222222",
    "1111112222222222222221333333333",
    "1111111122212222221110222222222",
];

/// Column subsets (0-based positions): singletons, pairs in lexicographic
/// order, then for `δ = 6` the triples containing position 0.
fn family_columns(arity: usize) -> Vec<Vec<usize>> {
    let mut cols: Vec<Vec<usize>> = (0..arity).map(|v| vec![v]).collect();
    match arity {
        4 => cols.extend([vec![0, 1], vec![0, 2], vec![0, 3]]),
        _ => {
            cols.extend(pairs(arity).map(|(a, b)| vec![a, b]));
            if arity == 6 {
                for a in 1..6 {
                    for b in (a + 1)..6 {
                        cols.push(vec![0, a, b]);
                    }
                }
            }
        }
    }
    cols
}

/// Extremal submodular families certifying the linear-map constants for
/// `δ ∈ {4, 5, 6}`.
pub fn extremal_families(arity: usize) -> Option<Vec<CutCost>> {
    let rows: &[&str] = match arity {
        4 => &FAMILY4,
        5 => &FAMILY5,
        6 => &FAMILY6,
        _ => return None,
    };
    let cols = family_columns(arity);
    Some(
        rows.iter()
            .map(|row| {
                let entries = cols
                    .iter()
                    .zip(row.bytes())
                    .map(|(c, b)| (c.clone(), f64::from(b - b'0')));
                CutCost::table(arity, entries).expect("extremal family is well formed")
            })
            .collect(),
    )
}
