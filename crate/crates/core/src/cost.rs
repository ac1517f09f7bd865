//! Inhomogeneous cut-cost functions `w_e` over the subsets of one hyperedge.
//!
//! Subsets are bitmasks over *positions* inside the hyperedge (bit `i` is the
//! hyperedge's `i`-th vertex). A cost is symmetric, `w(S) = w(e \ S)`, and
//! vanishes on the empty and full sets, so tables store one value per
//! `{S, e \ S}` class, keyed by the representative that contains position 0.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lp::{solve_lp, LpInstance, LpStatus, Relation};

/// Largest hyperedge supported by the bitmask representation.
pub const MAX_ARITY: usize = 63;
/// Largest arity for which a dense class table is allowed.
pub const MAX_TABLE_ARITY: usize = 24;
/// Largest arity for which submodular completion builds its constraint set.
pub const MAX_COMPLETION_ARITY: usize = 8;
/// Slack allowed when checking submodular inequalities.
pub const SUBMODULAR_TOL: f64 = 1e-12;

/// Mask with the lowest `arity` bits set.
pub fn full_mask(arity: usize) -> u64 {
    debug_assert!(arity <= MAX_ARITY);
    (1u64 << arity) - 1
}

/// Representative of the class `{mask, complement}`: the side containing position 0.
pub fn class_rep(mask: u64, arity: usize) -> u64 {
    if mask & 1 == 1 {
        mask
    } else {
        full_mask(arity) ^ mask
    }
}

/// Number of `{S, e \ S}` classes of proper nonempty subsets.
pub fn class_count(arity: usize) -> usize {
    (1usize << (arity - 1)) - 1
}

fn class_index(mask: u64, arity: usize) -> usize {
    (class_rep(mask, arity) >> 1) as usize
}

/// Canonical representative masks of all proper nonempty classes, in table order.
pub fn class_masks(arity: usize) -> impl Iterator<Item = u64> {
    (0..class_count(arity) as u64).map(|x| (x << 1) | 1)
}

/// Sorted positions of the set bits of `mask`.
pub fn mask_positions(mask: u64) -> Vec<usize> {
    (0..64).filter(|i| mask >> i & 1 == 1).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub enum CostKind {
    /// One optional value per subset class; `None` means undefined.
    Table(Vec<Option<f64>>),
    /// Only the singleton cuts `w({v})` are known.
    SingletonOnly(Vec<f64>),
    /// `w(S) = w_h * |S| (δ - |S|) / δ`.
    Zhou(f64),
    /// `w(S) = w_h` for every proper nonempty `S`.
    Benson(f64),
}

/// A symmetric cut-cost function of a hyperedge of the given arity.
#[derive(Debug, Clone, PartialEq)]
pub struct CutCost {
    arity: usize,
    kind: CostKind,
}

/// Outcome of [`CutCost::complete_to_submodular`].
#[derive(Debug, Clone, PartialEq)]
pub enum Completion {
    Completed(CutCost),
    Infeasible,
}

fn check_weight(w: f64) -> Result<()> {
    if !w.is_finite() || w < 0.0 {
        return Err(Error::InvalidCost(format!(
            "weight {w} is not a finite nonnegative number"
        )));
    }
    Ok(())
}

fn check_arity(arity: usize) -> Result<()> {
    if arity < 2 {
        return Err(Error::InvalidCost(format!("arity {arity} < 2")));
    }
    if arity > MAX_ARITY {
        return Err(Error::ArityTooLarge {
            arity,
            limit: MAX_ARITY,
        });
    }
    Ok(())
}

impl CutCost {
    /// Builds a table from `(subset positions, weight)` entries. A subset and
    /// its complement describe the same class and must agree.
    pub fn table<I>(arity: usize, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<usize>, f64)>,
    {
        check_arity(arity)?;
        if arity > MAX_TABLE_ARITY {
            return Err(Error::ArityTooLarge {
                arity,
                limit: MAX_TABLE_ARITY,
            });
        }
        let mut values = vec![None; class_count(arity)];
        for (subset, w) in entries {
            check_weight(w)?;
            let mask = positions_to_mask(&subset, arity)?;
            if mask == 0 || mask == full_mask(arity) {
                if w != 0.0 {
                    return Err(Error::InvalidCost("empty and full subsets must have zero cost".into()));
                }
                continue;
            }
            let slot = &mut values[class_index(mask, arity)];
            match slot {
                Some(prev) if *prev != w => {
                    return Err(Error::InvalidCost(format!(
                        "conflicting values {prev} and {w} for subset {subset:?} or its complement"
                    )))
                }
                _ => *slot = Some(w),
            }
        }
        Ok(CutCost {
            arity,
            kind: CostKind::Table(values),
        })
    }

    /// Fully specified table from a function of the subset mask; `f` is only
    /// called on class representatives.
    pub fn from_fn(arity: usize, mut f: impl FnMut(u64) -> f64) -> Result<Self> {
        check_arity(arity)?;
        if arity > MAX_TABLE_ARITY {
            return Err(Error::ArityTooLarge {
                arity,
                limit: MAX_TABLE_ARITY,
            });
        }
        let values = class_masks(arity)
            .map(|m| {
                let w = f(m);
                check_weight(w).map(|_| Some(w))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(CutCost {
            arity,
            kind: CostKind::Table(values),
        })
    }

    pub fn singleton(values: Vec<f64>) -> Result<Self> {
        let arity = values.len();
        check_arity(arity)?;
        for &w in &values {
            check_weight(w)?;
        }
        if arity == 2 && values[0] != values[1] {
            return Err(Error::InvalidCost(format!(
                "two-vertex hyperedge needs equal singleton costs, got {values:?}"
            )));
        }
        Ok(CutCost {
            arity,
            kind: CostKind::SingletonOnly(values),
        })
    }

    pub fn zhou(arity: usize, w: f64) -> Result<Self> {
        check_arity(arity)?;
        check_weight(w)?;
        Ok(CutCost {
            arity,
            kind: CostKind::Zhou(w),
        })
    }

    pub fn benson(arity: usize, w: f64) -> Result<Self> {
        check_arity(arity)?;
        check_weight(w)?;
        Ok(CutCost {
            arity,
            kind: CostKind::Benson(w),
        })
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn kind(&self) -> &CostKind {
        &self.kind
    }

    /// `w(S)` for a subset mask; `None` when the value is not specified.
    pub fn eval_mask(&self, mask: u64) -> Option<f64> {
        let full = full_mask(self.arity);
        debug_assert_eq!(mask & !full, 0);
        if mask == 0 || mask == full {
            return Some(0.0);
        }
        let size = mask.count_ones() as usize;
        match &self.kind {
            CostKind::Table(values) => values[class_index(mask, self.arity)],
            CostKind::SingletonOnly(values) => {
                if size == 1 {
                    Some(values[mask.trailing_zeros() as usize])
                } else if size == self.arity - 1 {
                    Some(values[(full ^ mask).trailing_zeros() as usize])
                } else {
                    None
                }
            }
            CostKind::Zhou(w) => {
                let d = self.arity as f64;
                let s = size as f64;
                Some(w * s * (d - s) / d)
            }
            CostKind::Benson(w) => Some(*w),
        }
    }

    /// `w(S)` for a subset given as positions within the hyperedge.
    pub fn eval_subset(&self, positions: &[usize]) -> Result<Option<f64>> {
        let mask = positions_to_mask(positions, self.arity).map_err(|_| Error::SubsetNotInEdge)?;
        Ok(self.eval_mask(mask))
    }

    /// Singleton cut values, if all of them are defined.
    pub fn singleton_values(&self) -> Option<Vec<f64>> {
        (0..self.arity).map(|i| self.eval_mask(1 << i)).collect()
    }

    /// True when every proper subset has a defined value.
    pub fn is_fully_specified(&self) -> bool {
        match &self.kind {
            CostKind::Table(values) => values.iter().all(Option::is_some),
            CostKind::SingletonOnly(_) => self.arity <= 3,
            CostKind::Zhou(_) | CostKind::Benson(_) => true,
        }
    }

    /// `(representative mask, value)` for every class with a defined value.
    pub fn defined_classes(&self) -> Vec<(u64, f64)> {
        match &self.kind {
            CostKind::SingletonOnly(values) => {
                let full = full_mask(self.arity);
                let mut out: Vec<(u64, f64)> = (0..self.arity)
                    .map(|i| (class_rep(1 << i, self.arity), values[i]))
                    .collect();
                out.sort_by_key(|&(m, _)| m);
                out.dedup_by_key(|p| p.0);
                debug_assert!(out.iter().all(|(m, _)| m & full == *m));
                out
            }
            _ => class_masks(self.arity)
                .filter_map(|m| self.eval_mask(m).map(|w| (m, w)))
                .collect(),
        }
    }

    /// Class values in table order; errors if any value is undefined.
    pub fn class_values(&self) -> Result<Vec<f64>> {
        class_masks(self.arity)
            .map(|m| {
                self.eval_mask(m)
                    .ok_or_else(|| Error::Underspecified(format!("subset {:?} has no value", mask_positions(m))))
            })
            .collect()
    }

    /// Converts a fully specified cost of any variant into an explicit table.
    pub fn to_table(&self) -> Result<CutCost> {
        if self.arity > MAX_TABLE_ARITY {
            return Err(Error::ArityTooLarge {
                arity: self.arity,
                limit: MAX_TABLE_ARITY,
            });
        }
        let values = self.class_values()?;
        Ok(CutCost {
            arity: self.arity,
            kind: CostKind::Table(values.into_iter().map(Some).collect()),
        })
    }

    /// Exhaustive check of `w(A) + w(B) >= w(A ∩ B) + w(A ∪ B)` over all pairs
    /// of subsets (arity <= 12); larger arities use the equivalent local
    /// condition on pairs of added elements.
    pub fn is_submodular(&self) -> Result<bool> {
        if !self.is_fully_specified() {
            return Err(Error::Underspecified("submodularity needs every subset value".into()));
        }
        if self.arity > MAX_TABLE_ARITY {
            return Err(Error::ArityTooLarge {
                arity: self.arity,
                limit: MAX_TABLE_ARITY,
            });
        }
        let full = full_mask(self.arity);
        let w: Vec<f64> = (0..=full).map(|m| self.eval_mask(m).unwrap_or(0.0)).collect();
        let scale = w.iter().fold(1.0f64, |a, b| a.max(b.abs()));
        let tol = SUBMODULAR_TOL * scale;
        if self.arity <= 12 {
            for a in 0..=full {
                for b in (a + 1)..=full {
                    let lhs = w[a as usize] + w[b as usize];
                    let rhs = w[(a & b) as usize] + w[(a | b) as usize];
                    if lhs - rhs < -tol {
                        return Ok(false);
                    }
                }
            }
        } else {
            for s in 0..=full {
                for i in 0..self.arity {
                    if s >> i & 1 == 1 {
                        continue;
                    }
                    for j in (i + 1)..self.arity {
                        if s >> j & 1 == 1 {
                            continue;
                        }
                        let (si, sj) = (s | 1 << i, s | 1 << j);
                        let lhs = w[si as usize] + w[sj as usize];
                        let rhs = w[s as usize] + w[(si | sj) as usize];
                        if lhs - rhs < -tol {
                            return Ok(false);
                        }
                    }
                }
            }
        }
        Ok(true)
    }

    /// Fills undefined classes so the result is submodular, keeping every
    /// specified value. Among all completions, picks one maximizing the
    /// smallest submodular slack, with free values boxed in
    /// `[0, 2 * max specified value]`.
    pub fn complete_to_submodular(&self) -> Result<Completion> {
        if self.arity > MAX_COMPLETION_ARITY {
            return Err(Error::ArityTooLarge {
                arity: self.arity,
                limit: MAX_COMPLETION_ARITY,
            });
        }
        let d = self.arity;
        if self.singleton_values().is_none() {
            return Err(Error::Underspecified("all singleton costs are required".into()));
        }
        let classes: Vec<u64> = class_masks(d).collect();
        let known: Vec<Option<f64>> = classes.iter().map(|&m| self.eval_mask(m)).collect();
        let free: Vec<usize> = (0..classes.len()).filter(|&i| known[i].is_none()).collect();
        let mut var_of = vec![usize::MAX; classes.len()];
        for (v, &ci) in free.iter().enumerate() {
            var_of[ci] = v;
        }
        let slack_var = free.len();
        let upper = 2.0 * known.iter().flatten().fold(0.0f64, |a, &b| a.max(b));

        let mut lp = LpInstance::new(free.len() + 1);
        lp.set_free(slack_var);
        let mut objective = vec![0.0; free.len() + 1];
        objective[slack_var] = -1.0;
        lp.minimize(objective);
        for &v in &free {
            let mut row = vec![0.0; free.len() + 1];
            row[var_of[v]] = 1.0;
            lp.add_constraint(row, Relation::Le, upper);
        }

        // Local form: w(S+i) + w(S+j) - w(S) - w(S+i+j) >= t for i, j not in S.
        let full = full_mask(d);
        for s in 0..=full {
            for i in 0..d {
                if s >> i & 1 == 1 {
                    continue;
                }
                for j in (i + 1)..d {
                    if s >> j & 1 == 1 {
                        continue;
                    }
                    let terms = [
                        (s | 1 << i, 1.0),
                        (s | 1 << j, 1.0),
                        (s, -1.0),
                        (s | 1 << i | 1 << j, -1.0),
                    ];
                    let mut row = vec![0.0; free.len() + 1];
                    let mut constant = 0.0;
                    for (m, sign) in terms {
                        if m == 0 || m == full {
                            continue;
                        }
                        let ci = class_index(m, d);
                        match known[ci] {
                            Some(w) => constant += sign * w,
                            None => row[var_of[ci]] += sign,
                        }
                    }
                    row[slack_var] = -1.0;
                    // row·x - t >= -constant
                    lp.add_constraint(row, Relation::Ge, -constant);
                }
            }
        }
        let result = solve_lp(&lp)?;
        if result.status != LpStatus::Optimal {
            return Err(Error::Lp(format!("completion LP ended with {:?}", result.status)));
        }
        let min_slack = result.solution[slack_var];
        if min_slack < -1e-9 {
            return Ok(Completion::Infeasible);
        }
        let values = known
            .iter()
            .enumerate()
            .map(|(ci, k)| Some(k.unwrap_or_else(|| result.solution[var_of[ci]].max(0.0))))
            .collect();
        Ok(Completion::Completed(CutCost {
            arity: d,
            kind: CostKind::Table(values),
        }))
    }

    /// Vertex pairs `{v, u}` (positions, `v < u`) violating
    /// `w({v}) + w({u}) >= Σ w({v'}) / (δ - 1)`. An empty list means the
    /// singleton-only projection has no negative weight.
    pub fn singleton_balance_check(&self) -> Result<Vec<(usize, usize)>> {
        let values = self
            .singleton_values()
            .ok_or_else(|| Error::Underspecified("all singleton costs are required".into()))?;
        let d = self.arity;
        if d < 3 {
            return Ok(Vec::new());
        }
        let total: f64 = values.iter().sum();
        let threshold = total / (d - 1) as f64;
        let mut out = Vec::new();
        for v in 0..d {
            for u in (v + 1)..d {
                if (values[v] + values[u] - threshold) / ((d - 2) as f64) < -SUBMODULAR_TOL {
                    out.push((v, u));
                }
            }
        }
        Ok(out)
    }

    pub fn to_json(&self) -> CostJson {
        match &self.kind {
            CostKind::Table(values) => CostJson::Table {
                entries: class_masks(self.arity)
                    .zip(values)
                    .filter_map(|(m, w)| {
                        w.map(|w| TableEntry {
                            subset: mask_positions(m),
                            w,
                        })
                    })
                    .collect(),
            },
            CostKind::SingletonOnly(values) => CostJson::Singleton { values: values.clone() },
            CostKind::Zhou(w) => CostJson::Zhou { w: *w },
            CostKind::Benson(w) => CostJson::Benson { w: *w },
        }
    }

    pub fn from_json(json: &CostJson, arity: usize) -> Result<Self> {
        match json {
            CostJson::Table { entries } => CutCost::table(arity, entries.iter().map(|e| (e.subset.clone(), e.w))),
            CostJson::Singleton { values } => {
                if values.len() != arity {
                    return Err(Error::InvalidCost(format!(
                        "{} singleton values for a hyperedge of {arity} vertices",
                        values.len()
                    )));
                }
                CutCost::singleton(values.clone())
            }
            CostJson::Zhou { w } => CutCost::zhou(arity, *w),
            CostJson::Benson { w } => CutCost::benson(arity, *w),
        }
    }
}

fn positions_to_mask(positions: &[usize], arity: usize) -> Result<u64> {
    let mut mask = 0u64;
    for &p in positions {
        if p >= arity {
            return Err(Error::InvalidCost(format!(
                "position {p} outside hyperedge of {arity} vertices"
            )));
        }
        if mask >> p & 1 == 1 {
            return Err(Error::InvalidCost(format!("position {p} repeated")));
        }
        mask |= 1 << p;
    }
    Ok(mask)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableEntry {
    pub subset: Vec<usize>,
    pub w: f64,
}

/// Wire format of a cut cost; subset indices are positions in the hyperedge.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum CostJson {
    Table { entries: Vec<TableEntry> },
    Singleton { values: Vec<f64> },
    Zhou { w: f64 },
    Benson { w: f64 },
}
