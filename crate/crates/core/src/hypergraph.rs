//! Hypergraph model and the set quantities built on it: degrees, volumes,
//! hyperedge boundaries, normalized cuts and conductance.

use serde::{Deserialize, Serialize};

use crate::cost::{CostJson, CutCost};
use crate::error::{Error, Result};

pub type VertexId = usize;

#[derive(Debug, Clone, PartialEq)]
pub struct Hyperedge {
    vertices: Vec<VertexId>,
    cost: CutCost,
}

impl Hyperedge {
    pub fn new(vertices: Vec<VertexId>, cost: CutCost) -> Result<Self> {
        if vertices.len() < 2 {
            return Err(Error::InvalidHyperedge {
                edge: 0,
                reason: format!("needs at least 2 vertices, got {}", vertices.len()),
            });
        }
        if cost.arity() != vertices.len() {
            return Err(Error::InvalidHyperedge {
                edge: 0,
                reason: format!("cost arity {} does not match {} vertices", cost.arity(), vertices.len()),
            });
        }
        let mut sorted = vertices.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidHyperedge {
                edge: 0,
                reason: "duplicate vertex".into(),
            });
        }
        Ok(Hyperedge { vertices, cost })
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.vertices
    }

    pub fn cost(&self) -> &CutCost {
        &self.cost
    }

    pub fn arity(&self) -> usize {
        self.vertices.len()
    }

    /// Local mask of `e ∩ S` given membership of global vertices.
    pub fn local_mask(&self, in_set: &[bool]) -> u64 {
        self.vertices
            .iter()
            .enumerate()
            .filter(|(_, &v)| in_set[v])
            .fold(0u64, |m, (i, _)| m | 1 << i)
    }

    pub fn position_of(&self, v: VertexId) -> Option<usize> {
        self.vertices.iter().position(|&u| u == v)
    }
}

/// A side `S` of a cut, stored as a sorted list of distinct vertices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CutSelection(Vec<VertexId>);

impl CutSelection {
    pub fn new(mut vertices: Vec<VertexId>) -> Self {
        vertices.sort_unstable();
        vertices.dedup();
        CutSelection(vertices)
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn complement(&self, n: usize) -> CutSelection {
        let mask = self.membership(n);
        CutSelection((0..n).filter(|&v| !mask[v]).collect())
    }

    /// Membership vector over `0..n`; out-of-range ids are ignored.
    pub fn membership(&self, n: usize) -> Vec<bool> {
        let mut mask = vec![false; n];
        for &v in &self.0 {
            if v < n {
                mask[v] = true;
            }
        }
        mask
    }
}

impl FromIterator<VertexId> for CutSelection {
    fn from_iter<T: IntoIterator<Item = VertexId>>(iter: T) -> Self {
        CutSelection::new(iter.into_iter().collect())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Hypergraph {
    n: usize,
    edges: Vec<Hyperedge>,
}

impl Hypergraph {
    pub fn new(n: usize, edges: Vec<Hyperedge>) -> Result<Self> {
        for (i, e) in edges.iter().enumerate() {
            if let Some(&v) = e.vertices.iter().find(|&&v| v >= n) {
                return Err(Error::InvalidHyperedge {
                    edge: i,
                    reason: format!("vertex {v} out of range for {n} vertices"),
                });
            }
        }
        Ok(Hypergraph { n, edges })
    }

    /// Builds from `(vertices, cost)` pairs, reporting the failing edge index.
    pub fn from_parts<I>(n: usize, parts: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<VertexId>, CutCost)>,
    {
        let edges = parts
            .into_iter()
            .enumerate()
            .map(|(i, (vs, c))| {
                Hyperedge::new(vs, c).map_err(|e| match e {
                    Error::InvalidHyperedge { reason, .. } => Error::InvalidHyperedge { edge: i, reason },
                    other => other,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Hypergraph::new(n, edges)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[Hyperedge] {
        &self.edges
    }

    fn check_vertex(&self, v: VertexId) -> Result<()> {
        if v >= self.n {
            return Err(Error::VertexOutOfRange { vertex: v, n: self.n });
        }
        Ok(())
    }

    fn check_selection(&self, s: &CutSelection) -> Result<()> {
        s.vertices().iter().try_for_each(|&v| self.check_vertex(v))
    }

    /// All vertex degrees `d_v = Σ_{e ∋ v} w_e({v})`.
    pub fn degrees(&self) -> Result<Vec<f64>> {
        let mut d = vec![0.0; self.n];
        for (i, e) in self.edges.iter().enumerate() {
            for (p, &v) in e.vertices.iter().enumerate() {
                let w = e.cost.eval_mask(1 << p).ok_or_else(|| Error::UndefinedCost {
                    edge: i,
                    subset: vec![p],
                })?;
                d[v] += w;
            }
        }
        Ok(d)
    }

    pub fn degree(&self, v: VertexId) -> Result<f64> {
        self.check_vertex(v)?;
        let mut d = 0.0;
        for (i, e) in self.edges.iter().enumerate() {
            if let Some(p) = e.position_of(v) {
                d += e.cost.eval_mask(1 << p).ok_or_else(|| Error::UndefinedCost {
                    edge: i,
                    subset: vec![p],
                })?;
            }
        }
        Ok(d)
    }

    pub fn volume(&self, s: &CutSelection) -> Result<f64> {
        self.check_selection(s)?;
        let d = self.degrees()?;
        Ok(s.vertices().iter().map(|&v| d[v]).sum())
    }

    /// `Σ_e w_e(e ∩ S)`.
    pub fn boundary_volume(&self, s: &CutSelection) -> Result<f64> {
        self.check_selection(s)?;
        self.boundary_from_membership(&s.membership(self.n))
    }

    pub(crate) fn boundary_from_membership(&self, in_set: &[bool]) -> Result<f64> {
        let mut total = 0.0;
        for (i, e) in self.edges.iter().enumerate() {
            let m = e.local_mask(in_set);
            total += e.cost.eval_mask(m).ok_or_else(|| Error::UndefinedCost {
                edge: i,
                subset: crate::cost::mask_positions(m),
            })?;
        }
        Ok(total)
    }

    /// Boundary, `vol(S)` and `vol(S̄)` for a membership vector.
    pub(crate) fn cut_terms(&self, in_set: &[bool], degrees: &[f64]) -> Result<(f64, f64, f64)> {
        let boundary = self.boundary_from_membership(in_set)?;
        let (mut vs, mut vc) = (0.0, 0.0);
        for (v, &d) in degrees.iter().enumerate() {
            if in_set[v] {
                vs += d;
            } else {
                vc += d;
            }
        }
        Ok((boundary, vs, vc))
    }

    /// `vol(∂S) (1/vol(S) + 1/vol(S̄))`.
    pub fn ncut(&self, s: &CutSelection) -> Result<f64> {
        self.check_selection(s)?;
        let d = self.degrees()?;
        let (b, vs, vc) = self.cut_terms(&s.membership(self.n), &d)?;
        ncut_value(b, vs, vc)
    }

    /// `Σ_i vol(∂S_i) / vol(S_i)` over a partition of all vertices.
    pub fn kway_ncut(&self, parts: &[CutSelection]) -> Result<f64> {
        let mut owner = vec![None; self.n];
        for (i, p) in parts.iter().enumerate() {
            self.check_selection(p)?;
            for &v in p.vertices() {
                if owner[v].is_some() {
                    return Err(Error::InvalidPartition(format!("vertex {v} appears in two parts")));
                }
                owner[v] = Some(i);
            }
        }
        if let Some(v) = owner.iter().position(Option::is_none) {
            return Err(Error::InvalidPartition(format!("vertex {v} is in no part")));
        }
        let d = self.degrees()?;
        let mut total = 0.0;
        for p in parts {
            let mem = p.membership(self.n);
            let vol: f64 = p.vertices().iter().map(|&v| d[v]).sum();
            if vol <= 0.0 {
                return Err(Error::DegenerateCut(format!("part {:?} has zero volume", p.vertices())));
            }
            total += self.boundary_from_membership(&mem)? / vol;
        }
        Ok(total)
    }

    /// `vol(∂S) / min(vol(S), vol(S̄))`.
    pub fn conductance(&self, s: &CutSelection) -> Result<f64> {
        self.check_selection(s)?;
        let d = self.degrees()?;
        let (b, vs, vc) = self.cut_terms(&s.membership(self.n), &d)?;
        if vs <= 0.0 || vc <= 0.0 {
            return Err(Error::DegenerateCut("a side has zero volume".into()));
        }
        Ok(b / vs.min(vc))
    }

    pub fn to_json(&self) -> HypergraphJson {
        HypergraphJson {
            n: self.n,
            edges: self
                .edges
                .iter()
                .map(|e| EdgeJson {
                    vertices: e.vertices.clone(),
                    cost: e.cost.to_json(),
                })
                .collect(),
        }
    }

    pub fn from_json(json: &HypergraphJson) -> Result<Self> {
        let parts = json
            .edges
            .iter()
            .enumerate()
            .map(|(i, e)| {
                CutCost::from_json(&e.cost, e.vertices.len())
                    .map(|c| (e.vertices.clone(), c))
                    .map_err(|err| Error::InvalidHyperedge {
                        edge: i,
                        reason: err.to_string(),
                    })
            })
            .collect::<Result<Vec<_>>>()?;
        Hypergraph::from_parts(json.n, parts)
    }
}

pub(crate) fn ncut_value(boundary: f64, vol_s: f64, vol_c: f64) -> Result<f64> {
    if vol_s <= 0.0 || vol_c <= 0.0 {
        return Err(Error::DegenerateCut("a side has zero volume".into()));
    }
    Ok(boundary * (1.0 / vol_s + 1.0 / vol_c))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeJson {
    pub vertices: Vec<VertexId>,
    pub cost: CostJson,
}

/// `{"n": .., "edges": [{"vertices": [..], "cost": ..}]}`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypergraphJson {
    pub n: usize,
    pub edges: Vec<EdgeJson>,
}
