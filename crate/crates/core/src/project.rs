//! Projection of inhomogeneous hyperedges onto weighted cliques, and merging
//! of the per-hyperedge cliques into one graph.
//!
//! Four projections are available:
//! - singleton-only costs: the perfect projection
//!   `w_vu = (w({v}) + w({u})) / (δ-2) - Σ w({v'}) / ((δ-1)(δ-2))`, β = 1;
//! - submodular tables: a fixed linear map `w* = M w_e` that depends only on
//!   the arity and is nonnegative on submodular inputs;
//! - anything else: the min-β sandwich LP;
//! - the homogeneous Zhou and Benson families, which have closed forms.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::cost::{class_masks, full_mask, CostKind, CutCost};
use crate::error::{Error, Result};
use crate::hypergraph::Hypergraph;
use crate::lp::{solve_lp, LpStatus};
use crate::minimax::build_projection_lp;
use crate::par::{map_slice, Execution};

/// Entries of the linear map above `-NEG_TOL * scale` are clamped to zero.
const NEG_TOL: f64 = 1e-12;
/// Arities whose linear-map matrix is cached.
const CACHE_ARITY: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProjectionMethod {
    /// Pick per hyperedge: singleton costs → singleton, homogeneous families
    /// → closed form, full submodular tables → linear map, otherwise LP.
    Auto,
    Singleton,
    Submodular,
    Lp,
    Homogeneous,
}

impl std::str::FromStr for ProjectionMethod {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(ProjectionMethod::Auto),
            "singleton" => Ok(ProjectionMethod::Singleton),
            "submodular" => Ok(ProjectionMethod::Submodular),
            "lp" => Ok(ProjectionMethod::Lp),
            "homogeneous" => Ok(ProjectionMethod::Homogeneous),
            other => Err(Error::InvalidArgument(format!("unknown projection method '{other}'"))),
        }
    }
}

/// Index of the unordered pair `{a, b}` (a < b) among the pairs of `0..arity`
/// in lexicographic order.
pub fn pair_index(a: usize, b: usize, arity: usize) -> usize {
    debug_assert!(a < b && b < arity);
    a * (2 * arity - a - 1) / 2 + (b - a - 1)
}

/// All pairs `(a, b)`, `a < b`, in [`pair_index`] order.
pub fn pairs(arity: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..arity).flat_map(move |a| ((a + 1)..arity).map(move |b| (a, b)))
}

/// Weighted clique replacing one hyperedge.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeProjection {
    arity: usize,
    /// Pair weights in [`pair_index`] order.
    weights: Vec<f64>,
    beta: Option<f64>,
    method: ProjectionMethod,
}

impl EdgeProjection {
    pub fn new(arity: usize, weights: Vec<f64>, beta: Option<f64>, method: ProjectionMethod) -> Self {
        debug_assert_eq!(weights.len(), arity * (arity - 1) / 2);
        EdgeProjection {
            arity,
            weights,
            beta,
            method,
        }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    /// Weight between positions `a` and `b` (0 on the diagonal).
    pub fn weight(&self, a: usize, b: usize) -> f64 {
        match a.cmp(&b) {
            std::cmp::Ordering::Less => self.weights[pair_index(a, b, self.arity)],
            std::cmp::Ordering::Greater => self.weights[pair_index(b, a, self.arity)],
            std::cmp::Ordering::Equal => 0.0,
        }
    }

    pub fn pair_weights(&self) -> &[f64] {
        &self.weights
    }

    /// Full symmetric `δ × δ` matrix with a zero diagonal.
    pub fn matrix(&self) -> Vec<Vec<f64>> {
        (0..self.arity)
            .map(|a| (0..self.arity).map(|b| self.weight(a, b)).collect())
            .collect()
    }

    pub fn beta(&self) -> Option<f64> {
        self.beta
    }

    pub fn method(&self) -> ProjectionMethod {
        self.method
    }

    /// `Vol_{G_e}(∂S)` for a local subset mask.
    pub fn cut_volume(&self, mask: u64) -> f64 {
        pairs(self.arity)
            .zip(&self.weights)
            .filter(|((a, b), _)| (mask >> a & 1) != (mask >> b & 1))
            .map(|(_, w)| w)
            .sum()
    }

    pub fn negatives_count(&self) -> usize {
        self.weights.iter().filter(|&&w| w < 0.0).count()
    }
}

/// Approximation constant certified for the linear map, by arity.
pub fn table1_beta(arity: usize) -> Option<f64> {
    match arity {
        2 | 3 => Some(1.0),
        4 => Some(1.5),
        5 => Some(2.0),
        6 => Some(4.0),
        7 => Some(6.0),
        _ => None,
    }
}

/// Scale `(2^δ - 2) / (δ(δ - 1))` by which the linear map multiplies the
/// weights of a latent graph whose cut function generated the cost.
pub fn consistency_factor(arity: usize) -> f64 {
    let d = arity as f64;
    ((1u64 << arity) as f64 - 2.0) / (d * (d - 1.0))
}

/// Perfect projection from singleton costs.
pub fn project_singleton(cost: &CutCost) -> Result<EdgeProjection> {
    let values = cost
        .singleton_values()
        .ok_or_else(|| Error::Underspecified("singleton projection needs every w({v})".into()))?;
    let d = cost.arity();
    if d == 2 {
        return Ok(EdgeProjection::new(
            2,
            vec![values[0]],
            Some(1.0),
            ProjectionMethod::Singleton,
        ));
    }
    let total: f64 = values.iter().sum();
    let df = d as f64;
    let weights = pairs(d)
        .map(|(a, b)| (values[a] + values[b]) / (df - 2.0) - total / ((df - 1.0) * (df - 2.0)))
        .collect();
    Ok(EdgeProjection::new(d, weights, Some(1.0), ProjectionMethod::Singleton))
}

/// Coefficient of `w(S)` in the linear map for a pair meeting `S` in `r`
/// vertices, `|S| = s`.
fn linear_map_coefficient(r: u32, s: usize, arity: usize) -> f64 {
    let (s, d) = (s as f64, arity as f64);
    match r {
        1 => 1.0 / (2.0 * s * (d - s)),
        0 => -1.0 / (2.0 * (s + 1.0) * (d - s - 1.0)),
        _ => -1.0 / (2.0 * (s - 1.0) * (d - s + 1.0)),
    }
}

/// Matrix `M` (pairs × subset classes) of the linear map, built by
/// enumerating every proper nonempty subset.
fn build_linear_map(arity: usize) -> Vec<Vec<f64>> {
    let full = full_mask(arity);
    let classes: Vec<u64> = class_masks(arity).collect();
    pairs(arity)
        .map(|(a, b)| {
            let pair = (1u64 << a) | (1u64 << b);
            classes
                .iter()
                .map(|&m| {
                    [m, full ^ m]
                        .iter()
                        .map(|&s| linear_map_coefficient((s & pair).count_ones(), s.count_ones() as usize, arity))
                        .sum()
                })
                .collect()
        })
        .collect()
}

type MapCache = Mutex<HashMap<usize, Arc<Vec<Vec<f64>>>>>;

/// Cached linear-map matrix for `arity`; rows follow [`pair_index`], columns
/// follow the class order of [`class_masks`].
pub fn linear_map(arity: usize) -> Arc<Vec<Vec<f64>>> {
    static CACHE: OnceLock<MapCache> = OnceLock::new();
    if arity > CACHE_ARITY {
        return Arc::new(build_linear_map(arity));
    }
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("linear map cache poisoned");
    guard
        .entry(arity)
        .or_insert_with(|| Arc::new(build_linear_map(arity)))
        .clone()
}

/// Applies the linear map without checking submodularity. Entries within
/// rounding distance of zero are set to zero.
pub fn apply_linear_map(cost: &CutCost) -> Result<EdgeProjection> {
    let d = cost.arity();
    let values = cost.class_values()?;
    let scale = values.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
    let map = linear_map(d);
    let weights = map
        .iter()
        .map(|row| {
            let w: f64 = row.iter().zip(&values).map(|(c, v)| c * v).sum();
            if w.abs() <= NEG_TOL * scale.max(1.0) {
                0.0
            } else {
                w
            }
        })
        .collect();
    Ok(EdgeProjection::new(
        d,
        weights,
        table1_beta(d),
        ProjectionMethod::Submodular,
    ))
}

/// Linear-map projection of a submodular cost. β is the certified constant
/// for arities up to 7 and unknown beyond.
pub fn project_submodular(cost: &CutCost) -> Result<EdgeProjection> {
    if !cost.is_submodular()? {
        return Err(Error::NotSubmodular);
    }
    apply_linear_map(cost)
}

/// Closed forms for the homogeneous families: Zhou → `w_h/δ` with β = 1,
/// Benson → `w_h/(δ-1)` with β = ⌊δ²/4⌋/(δ-1).
pub fn project_homogeneous(cost: &CutCost) -> Result<EdgeProjection> {
    let d = cost.arity();
    let df = d as f64;
    let npairs = d * (d - 1) / 2;
    match cost.kind() {
        CostKind::Zhou(w) => Ok(EdgeProjection::new(
            d,
            vec![w / df; npairs],
            Some(1.0),
            ProjectionMethod::Homogeneous,
        )),
        CostKind::Benson(w) => {
            let beta = if *w > 0.0 {
                ((d * d / 4) as f64) / (df - 1.0)
            } else {
                1.0
            };
            Ok(EdgeProjection::new(
                d,
                vec![w / (df - 1.0); npairs],
                Some(beta),
                ProjectionMethod::Homogeneous,
            ))
        }
        _ => Err(Error::InvalidArgument(
            "homogeneous projection needs a Zhou or Benson cost".into(),
        )),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpProjection {
    Projected(EdgeProjection),
    Infeasible,
}

/// Min-β sandwich projection; `require_nonneg` adds `w_vu >= 0`.
pub fn project_lp(cost: &CutCost, require_nonneg: bool) -> Result<LpProjection> {
    let lp = build_projection_lp(cost, require_nonneg)?;
    let result = solve_lp(&lp)?;
    match result.status {
        LpStatus::Infeasible => Ok(LpProjection::Infeasible),
        LpStatus::Unbounded => Err(Error::Lp("projection LP unbounded".into())),
        LpStatus::Optimal => {
            let npairs = lp.num_vars - 1;
            let beta = result.solution[npairs].max(1.0);
            let weights = result.solution[..npairs]
                .iter()
                .map(|&w| if require_nonneg { w.max(0.0) } else { w })
                .collect();
            Ok(LpProjection::Projected(EdgeProjection::new(
                cost.arity(),
                weights,
                Some(beta),
                ProjectionMethod::Lp,
            )))
        }
    }
}

/// Resolves `Auto` for one cost.
pub fn auto_method(cost: &CutCost) -> Result<ProjectionMethod> {
    Ok(match cost.kind() {
        CostKind::SingletonOnly(_) => ProjectionMethod::Singleton,
        CostKind::Zhou(_) | CostKind::Benson(_) => ProjectionMethod::Homogeneous,
        CostKind::Table(_) => {
            if cost.is_fully_specified() && cost.arity() <= crate::cost::MAX_TABLE_ARITY && cost.is_submodular()? {
                ProjectionMethod::Submodular
            } else {
                ProjectionMethod::Lp
            }
        }
    })
}

/// Projects one hyperedge cost with the requested method. An infeasible LP
/// becomes [`Error::Infeasible`].
pub fn project_cost(cost: &CutCost, method: ProjectionMethod) -> Result<EdgeProjection> {
    let method = match method {
        ProjectionMethod::Auto => auto_method(cost)?,
        m => m,
    };
    match method {
        ProjectionMethod::Singleton => project_singleton(cost),
        ProjectionMethod::Submodular => project_submodular(&cost.to_table()?),
        ProjectionMethod::Homogeneous => project_homogeneous(cost),
        ProjectionMethod::Lp | ProjectionMethod::Auto => match project_lp(cost, false)? {
            LpProjection::Projected(p) => Ok(p),
            LpProjection::Infeasible => Err(Error::Infeasible("sandwich LP has no solution".into())),
        },
    }
}

/// Projects every hyperedge of `h`, in hyperedge order.
pub fn project_all(h: &Hypergraph, method: ProjectionMethod, exec: Execution) -> Result<Vec<EdgeProjection>> {
    map_slice(exec, h.edges(), |e| project_cost(e.cost(), method))
        .into_iter()
        .enumerate()
        .map(|(i, r)| {
            r.map_err(|err| match err {
                Error::Infeasible(msg) => Error::Infeasible(format!("hyperedge {i}: {msg}")),
                Error::NotSubmodular => Error::InvalidHyperedge {
                    edge: i,
                    reason: "cost is not submodular; use the lp method".into(),
                },
                other => other,
            })
        })
        .collect()
}

/// Merged weighted graph over the hypergraph's vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectedGraph {
    n: usize,
    /// Keys `(u, v)` with `u < v`.
    weights: BTreeMap<(usize, usize), f64>,
    beta_star: Option<f64>,
    clipped: usize,
}

impl ProjectedGraph {
    /// Graph from an explicit weighted edge list; repeated pairs add up.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        let mut weights = BTreeMap::new();
        for (u, v, w) in edges {
            if u >= n || v >= n {
                return Err(Error::VertexOutOfRange { vertex: u.max(v), n });
            }
            if u == v {
                return Err(Error::InvalidArgument(format!("self-loop on vertex {u}")));
            }
            *weights.entry((u.min(v), u.max(v))).or_insert(0.0) += w;
        }
        Ok(ProjectedGraph {
            n,
            weights,
            beta_star: Some(1.0),
            clipped: 0,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn beta_star(&self) -> Option<f64> {
        self.beta_star
    }

    pub fn clipped(&self) -> usize {
        self.clipped
    }

    pub fn weight(&self, u: usize, v: usize) -> f64 {
        self.weights.get(&(u.min(v), u.max(v))).copied().unwrap_or(0.0)
    }

    /// `(u, v, w)` with `u < v`, sorted.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.weights.iter().map(|(&(u, v), &w)| (u, v, w))
    }

    pub fn min_weight(&self) -> f64 {
        self.weights.values().fold(f64::INFINITY, |a, &b| a.min(b))
    }

    pub fn degrees(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.n];
        for (u, v, w) in self.edges() {
            d[u] += w;
            d[v] += w;
        }
        d
    }

    pub fn dense(&self) -> Vec<Vec<f64>> {
        let mut a = vec![vec![0.0; self.n]; self.n];
        for (u, v, w) in self.edges() {
            a[u][v] = w;
            a[v][u] = w;
        }
        a
    }

    /// `Vol_G(∂S)`.
    pub fn cut_volume(&self, in_set: &[bool]) -> f64 {
        self.edges()
            .filter(|&(u, v, _)| in_set[u] != in_set[v])
            .map(|(_, _, w)| w)
            .sum()
    }

    pub fn volume(&self, in_set: &[bool]) -> f64 {
        self.degrees()
            .iter()
            .zip(in_set)
            .filter(|(_, &s)| s)
            .map(|(d, _)| d)
            .sum()
    }

    /// Graph normalized cut of `S`.
    pub fn ncut(&self, in_set: &[bool]) -> Result<f64> {
        let d = self.degrees();
        let (mut vs, mut vc) = (0.0, 0.0);
        for (v, &dv) in d.iter().enumerate() {
            if in_set[v] {
                vs += dv;
            } else {
                vc += dv;
            }
        }
        crate::hypergraph::ncut_value(self.cut_volume(in_set), vs, vc)
    }

    /// `u v w` per line.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        for (u, v, w) in self.edges() {
            let _ = writeln!(out, "{u} {v} {w}");
        }
        out
    }

    /// Multiplies every weight by `factor`.
    pub fn scaled(&self, factor: f64) -> ProjectedGraph {
        let mut g = self.clone();
        g.weights.values_mut().for_each(|w| *w *= factor);
        g
    }
}

/// Sums per-hyperedge projections into one graph, in hyperedge order. With
/// `clip`, every merged weight is replaced by `max(w, 0)` after summation;
/// clipping anything voids the β* certificate.
pub fn merge(h: &Hypergraph, projections: &[EdgeProjection], clip: bool) -> Result<ProjectedGraph> {
    if projections.len() != h.edges().len() {
        return Err(Error::InvalidArgument(format!(
            "{} projections for {} hyperedges",
            projections.len(),
            h.edges().len()
        )));
    }
    let mut weights: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    let mut beta_star = Some(1.0f64);
    for (i, (e, p)) in h.edges().iter().zip(projections).enumerate() {
        if p.arity() != e.arity() {
            return Err(Error::ArityMismatch {
                edge: i,
                expected: e.arity(),
                found: p.arity(),
            });
        }
        beta_star = match (beta_star, p.beta()) {
            (Some(b), Some(pb)) => Some(b.max(pb)),
            _ => None,
        };
        let vs = e.vertices();
        for ((a, b), &w) in pairs(e.arity()).zip(p.pair_weights()) {
            if w == 0.0 {
                continue;
            }
            let (u, v) = (vs[a].min(vs[b]), vs[a].max(vs[b]));
            *weights.entry((u, v)).or_insert(0.0) += w;
        }
    }
    let mut clipped = 0;
    if clip {
        let scale = weights.values().fold(0.0f64, |a, &b| a.max(b.abs())).max(1.0);
        for w in weights.values_mut() {
            if *w < 0.0 {
                if *w < -NEG_TOL * scale {
                    clipped += 1;
                }
                *w = 0.0;
            }
        }
    }
    if clipped > 0 {
        beta_star = None;
    }
    Ok(ProjectedGraph {
        n: h.n(),
        weights,
        beta_star,
        clipped,
    })
}

/// Per-hyperedge line of the projection report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectionReportEntry {
    pub index: usize,
    pub method: ProjectionMethod,
    pub beta: Option<f64>,
    pub negatives_count: usize,
}

pub fn projection_report(projections: &[EdgeProjection]) -> Vec<ProjectionReportEntry> {
    projections
        .iter()
        .enumerate()
        .map(|(index, p)| ProjectionReportEntry {
            index,
            method: p.method(),
            beta: p.beta(),
            negatives_count: p.negatives_count(),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-12
    }

    #[test]
    fn pair_indexing_is_lexicographic() {
        for d in 2..9 {
            for (i, (a, b)) in pairs(d).enumerate() {
                assert_eq!(pair_index(a, b, d), i);
            }
        }
    }

    #[test]
    fn example1_singleton_projection() {
        let p = project_singleton(&CutCost::singleton(vec![0.0, 0.0, 1.0]).unwrap()).unwrap();
        assert_eq!(p.beta(), Some(1.0));
        let w = p.pair_weights();
        assert!(close(w[0], -0.5) && close(w[1], 0.5) && close(w[2], 0.5));
        assert_eq!(p.negatives_count(), 1);
    }

    #[test]
    fn example3_singleton_projection() {
        let c = CutCost::singleton(vec![1.0 / 3.0, 1.0 / 3.0, 1.0, 1.0]).unwrap();
        let p = project_singleton(&c).unwrap();
        assert!(close(p.weight(0, 1), -1.0 / 9.0));
    }

    #[test]
    fn uniform_triangle_projection() {
        let p = project_singleton(&CutCost::singleton(vec![1.0; 3]).unwrap()).unwrap();
        assert!(p.pair_weights().iter().all(|&w| close(w, 0.5)));
    }

    #[test]
    fn two_vertex_projection_is_identity() {
        let c = CutCost::singleton(vec![2.5, 2.5]).unwrap();
        for p in [
            project_singleton(&c).unwrap(),
            project_cost(&c, ProjectionMethod::Lp).unwrap(),
        ] {
            assert!(close(p.weight(0, 1), 2.5));
            assert!(close(p.beta().unwrap(), 1.0));
        }
    }

    #[test]
    fn linear_map_reduces_to_singleton_projection_at_three() {
        let c = CutCost::singleton(vec![0.3, 1.1, 0.7]).unwrap();
        let a = apply_linear_map(&c.to_table().unwrap()).unwrap();
        let b = project_singleton(&c).unwrap();
        for (x, y) in a.pair_weights().iter().zip(b.pair_weights()) {
            assert!(close(*x, *y));
        }
    }

    #[test]
    fn benson_and_zhou_under_linear_map() {
        let b = project_submodular(&CutCost::benson(4, 1.0).unwrap().to_table().unwrap()).unwrap();
        assert!(b.pair_weights().iter().all(|&w| close(w, 1.0 / 3.0)));
        assert_eq!(b.beta(), Some(1.5));
        let z = project_submodular(&CutCost::zhou(3, 1.0).unwrap().to_table().unwrap()).unwrap();
        assert!(z.pair_weights().iter().all(|&w| close(w, 1.0 / 3.0)));
    }

    #[test]
    fn non_submodular_is_rejected() {
        let c = CutCost::from_fn(4, |m| if m == 0b1001 { 1.0 } else { 0.0 }).unwrap();
        assert_eq!(project_submodular(&c).unwrap_err(), Error::NotSubmodular);
    }

    #[test]
    fn lp_infeasible_examples() {
        let ex1 = CutCost::singleton(vec![0.0, 0.0, 1.0]).unwrap();
        assert_eq!(project_lp(&ex1, true).unwrap(), LpProjection::Infeasible);
        let ex2 = CutCost::from_fn(4, |m| if m == 0b1001 { 1.0 } else { 0.0 }).unwrap();
        assert_eq!(project_lp(&ex2, false).unwrap(), LpProjection::Infeasible);
    }

    #[test]
    fn lp_example1_without_sign_constraint() {
        let ex1 = CutCost::singleton(vec![0.0, 0.0, 1.0]).unwrap();
        let LpProjection::Projected(p) = project_lp(&ex1, false).unwrap() else {
            panic!("feasible");
        };
        assert!(close(p.beta().unwrap(), 1.0));
        let w = p.pair_weights();
        assert!((w[0] + 0.5).abs() < 1e-9 && (w[1] - 0.5).abs() < 1e-9 && (w[2] - 0.5).abs() < 1e-9);
    }

    #[test]
    fn fan_motif_lp() {
        let c = CutCost::table(
            4,
            vec![
                (vec![0], 1.0),
                (vec![1], 1.0),
                (vec![2], 1.0),
                (vec![3], 1.0),
                (vec![0, 1], 0.0),
                (vec![0, 2], 2.0),
                (vec![0, 3], 2.0),
            ],
        )
        .unwrap();
        let LpProjection::Projected(p) = project_lp(&c, true).unwrap() else {
            panic!("feasible");
        };
        assert!((p.beta().unwrap() - 1.0).abs() < 1e-9);
        for (a, b) in pairs(4) {
            let expected = if (a, b) == (0, 1) || (a, b) == (2, 3) { 1.0 } else { 0.0 };
            assert!((p.weight(a, b) - expected).abs() < 1e-9, "pair {a}{b}");
        }
    }

    #[test]
    fn merge_sums_and_clips_after_summation() {
        let h = Hypergraph::from_parts(
            4,
            vec![
                (vec![0, 1, 2], CutCost::singleton(vec![1.0; 3]).unwrap()),
                (vec![1, 2, 3], CutCost::singleton(vec![1.0; 3]).unwrap()),
            ],
        )
        .unwrap();
        let ps = project_all(&h, ProjectionMethod::Auto, Execution::Sequential).unwrap();
        let g = merge(&h, &ps, false).unwrap();
        assert!(close(g.weight(1, 2), 1.0));
        assert_eq!(g.beta_star(), Some(1.0));

        let h1 = Hypergraph::from_parts(
            3,
            vec![(vec![0, 1, 2], CutCost::singleton(vec![0.0, 0.0, 1.0]).unwrap())],
        )
        .unwrap();
        let p1 = project_all(&h1, ProjectionMethod::Auto, Execution::Sequential).unwrap();
        let raw = merge(&h1, &p1, false).unwrap();
        assert!(close(raw.weight(0, 1), -0.5));
        let g1 = merge(&h1, &p1, true).unwrap();
        assert_eq!(g1.weight(0, 1), 0.0);
        assert!(close(g1.weight(0, 2), 0.5) && close(g1.weight(1, 2), 0.5));
        assert_eq!(g1.clipped(), 1);
        assert_eq!(g1.beta_star(), None);
    }

    #[test]
    fn merge_rejects_arity_mismatch() {
        let h = Hypergraph::from_parts(3, vec![(vec![0, 1, 2], CutCost::singleton(vec![1.0; 3]).unwrap())]).unwrap();
        let wrong = EdgeProjection::new(2, vec![1.0], Some(1.0), ProjectionMethod::Singleton);
        assert!(matches!(merge(&h, &[wrong], false), Err(Error::ArityMismatch { .. })));
    }

    #[test]
    fn edge_list_export() {
        let g = ProjectedGraph::from_edges(3, vec![(0, 1, 0.5), (2, 1, 1.0)]).unwrap();
        assert_eq!(g.to_edge_list(), "0 1 0.5\n1 2 1\n");
    }
}
