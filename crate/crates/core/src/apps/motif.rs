//! Fan-motif hypergraphs over directed networks and hierarchical
//! partitioning by repeated two-way splits.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::cost::CutCost;
use crate::error::{Error, Result};
use crate::hypergraph::{Hyperedge, Hypergraph};
use crate::par::{map_range, Execution};
use crate::project::{merge, project_cost, project_lp, EdgeProjection, LpProjection, ProjectionMethod};
use crate::spectral::partition_graph;

/// Directed graph without self-loops; parallel edges collapse.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiGraph {
    n: usize,
    out: Vec<BTreeSet<usize>>,
}

impl DiGraph {
    pub fn new<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut out = vec![BTreeSet::new(); n];
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::VertexOutOfRange { vertex: u.max(v), n });
            }
            if u == v {
                return Err(Error::InvalidArgument(format!("self-loop on vertex {u}")));
            }
            out[u].insert(v);
        }
        Ok(DiGraph { n, out })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.out[u].contains(&v)
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.out
            .iter()
            .enumerate()
            .flat_map(|(u, s)| s.iter().map(move |&v| (u, v)))
    }

    pub fn edge_count(&self) -> usize {
        self.out.iter().map(BTreeSet::len).sum()
    }

    pub fn reversed(&self) -> DiGraph {
        DiGraph::new(self.n, self.edges().map(|(u, v)| (v, u))).expect("edges already valid")
    }

    /// Subgraph on `vertices` (relabelled `0..len` in the given order).
    pub fn induced(&self, vertices: &[usize]) -> DiGraph {
        let local: BTreeMap<usize, usize> = vertices.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let edges = vertices.iter().flat_map(|&u| {
            self.out[u]
                .iter()
                .filter_map(|v| local.get(v).map(|&lv| (local[&u], lv)))
                .collect::<Vec<_>>()
        });
        DiGraph::new(vertices.len(), edges).expect("induced edges valid")
    }
}

/// Costs of a fan-motif hyperedge.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MotifCostSpec {
    pub singleton: f64,
    /// `w({v1, v2}) = w({v3, v4})`.
    pub same_layer: f64,
    /// Cost of each of the four producer/consumer pairs.
    pub cross_layer: f64,
}

impl Default for MotifCostSpec {
    fn default() -> Self {
        MotifCostSpec {
            singleton: 1.0,
            same_layer: 0.0,
            cross_layer: 2.0,
        }
    }
}

impl MotifCostSpec {
    /// Table over positions `(v1, v2, v3, v4)`.
    pub fn to_cost(&self) -> Result<CutCost> {
        if self.singleton < 0.0 || self.same_layer < 0.0 || self.cross_layer < 0.0 {
            return Err(Error::InvalidCost("motif costs must be nonnegative".into()));
        }
        CutCost::table(
            4,
            vec![
                (vec![0], self.singleton),
                (vec![1], self.singleton),
                (vec![2], self.singleton),
                (vec![3], self.singleton),
                (vec![0, 1], self.same_layer),
                (vec![0, 2], self.cross_layer),
                (vec![0, 3], self.cross_layer),
            ],
        )
    }
}

/// Producers `v1 < v2` both feeding consumers `v3 < v4`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct FanMotif {
    pub producers: (usize, usize),
    pub consumers: (usize, usize),
}

impl FanMotif {
    pub fn vertices(&self) -> [usize; 4] {
        [self.producers.0, self.producers.1, self.consumers.0, self.consumers.1]
    }

    pub fn vertex_set(&self) -> [usize; 4] {
        let mut v = self.vertices();
        v.sort_unstable();
        v
    }
}

/// Every fan motif of `g`, one per vertex set, sorted by vertex set. With
/// `strict`, quadruples with any consumer→producer edge are rejected.
pub fn enumerate_fan_motifs(g: &DiGraph, strict: bool, exec: Execution) -> Vec<FanMotif> {
    let found = map_range(exec, g.n(), |v1| {
        let mut local = Vec::new();
        for v2 in (v1 + 1)..g.n() {
            let common: Vec<usize> = g.out[v1]
                .intersection(&g.out[v2])
                .copied()
                .filter(|&c| c != v1 && c != v2)
                .collect();
            for (i, &v3) in common.iter().enumerate() {
                for &v4 in &common[i + 1..] {
                    let reverse = [v3, v4].iter().any(|&c| g.has_edge(c, v1) || g.has_edge(c, v2));
                    if strict && reverse {
                        continue;
                    }
                    local.push(FanMotif {
                        producers: (v1, v2),
                        consumers: (v3, v4),
                    });
                }
            }
        }
        local
    });
    let mut by_set: BTreeMap<[usize; 4], FanMotif> = BTreeMap::new();
    for m in found.into_iter().flatten() {
        by_set.entry(m.vertex_set()).or_insert(m);
    }
    by_set.into_values().collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct MotifHypergraph {
    pub hypergraph: Hypergraph,
    pub motifs: Vec<FanMotif>,
    /// Vertices in no motif.
    pub uncovered: Vec<usize>,
}

pub fn build_motif_hypergraph(
    g: &DiGraph,
    spec: &MotifCostSpec,
    strict: bool,
    exec: Execution,
) -> Result<MotifHypergraph> {
    let motifs = enumerate_fan_motifs(g, strict, exec);
    let cost = spec.to_cost()?;
    let edges = motifs
        .iter()
        .map(|m| Hyperedge::new(m.vertices().to_vec(), cost.clone()))
        .collect::<Result<Vec<_>>>()?;
    let mut covered = vec![false; g.n()];
    motifs.iter().flat_map(|m| m.vertices()).for_each(|v| covered[v] = true);
    Ok(MotifHypergraph {
        hypergraph: Hypergraph::new(g.n(), edges)?,
        motifs,
        uncovered: (0..g.n()).filter(|&v| !covered[v]).collect(),
    })
}

/// Projection shared by every motif hyperedge: the nonnegative LP when
/// feasible, otherwise the automatic choice.
pub fn motif_projection(spec: &MotifCostSpec) -> Result<EdgeProjection> {
    let cost = spec.to_cost()?;
    match project_lp(&cost, true)? {
        LpProjection::Projected(p) => Ok(p),
        LpProjection::Infeasible => project_cost(&cost, ProjectionMethod::Auto),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterNode {
    pub cluster: Vec<usize>,
    pub children: Vec<ClusterNode>,
    /// Vertices of this cluster in no motif of its induced subgraph.
    pub uncovered: Vec<usize>,
}

impl ClusterNode {
    fn leaf(cluster: Vec<usize>, uncovered: Vec<usize>) -> Self {
        ClusterNode {
            cluster,
            children: Vec::new(),
            uncovered,
        }
    }

    pub fn leaves(&self) -> Vec<&ClusterNode> {
        if self.children.is_empty() {
            vec![self]
        } else {
            self.children.iter().flat_map(ClusterNode::leaves).collect()
        }
    }

    pub fn depth(&self) -> usize {
        1 + self.children.iter().map(ClusterNode::depth).max().unwrap_or(0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HierarchyOptions {
    pub spec: MotifCostSpec,
    pub max_depth: usize,
    pub min_cluster_size: usize,
    pub strict: bool,
    pub exec: Execution,
}

impl Default for HierarchyOptions {
    fn default() -> Self {
        HierarchyOptions {
            spec: MotifCostSpec::default(),
            max_depth: 3,
            min_cluster_size: 4,
            strict: true,
            exec: Execution::default(),
        }
    }
}

/// Recursively splits `g`. Each node re-enumerates motifs in its induced
/// subgraph and splits its covered vertices: into the connected components
/// of the motif hypergraph if there are several, else into the components of
/// the projected graph, else by a spectral sweep cut. Uncovered vertices
/// become singleton leaves. A node stays a leaf at `max_depth`, below
/// `min_cluster_size`, without motifs, or when the projected graph has no
/// weight to cut.
pub fn hierarchical_partition(g: &DiGraph, options: &HierarchyOptions) -> Result<ClusterNode> {
    if options.max_depth < 1 {
        return Err(Error::InvalidArgument("max_depth must be at least 1".into()));
    }
    let proj = motif_projection(&options.spec)?;
    split_node(g, (0..g.n()).collect(), 1, options, &proj)
}

fn split_node(
    g: &DiGraph,
    cluster: Vec<usize>,
    depth: usize,
    options: &HierarchyOptions,
    proj: &EdgeProjection,
) -> Result<ClusterNode> {
    let sub = g.induced(&cluster);
    let mh = build_motif_hypergraph(&sub, &options.spec, options.strict, options.exec)?;
    let uncovered: Vec<usize> = mh.uncovered.iter().map(|&v| cluster[v]).collect();
    if mh.motifs.is_empty() {
        return Ok(ClusterNode::leaf(cluster, uncovered));
    }
    if depth >= options.max_depth || cluster.len() < options.min_cluster_size {
        return Ok(ClusterNode::leaf(cluster, uncovered));
    }
    let projections = vec![proj.clone(); mh.hypergraph.edges().len()];
    let graph = merge(&mh.hypergraph, &projections, true)?;
    if graph.edges().all(|(_, _, w)| w <= 0.0) {
        return Ok(ClusterNode::leaf(cluster, uncovered));
    }
    let covered: Vec<bool> = {
        let mut c = vec![true; cluster.len()];
        mh.uncovered.iter().for_each(|&v| c[v] = false);
        c
    };
    let motif_links = mh.hypergraph.edges().iter().flat_map(|e| {
        let vs = e.vertices();
        vs[1..].iter().map(move |&v| (vs[0], v))
    });
    let by_motif = components(cluster.len(), motif_links, &covered);
    let weighted: Vec<bool> = graph.degrees().iter().map(|&d| d > 0.0).collect();
    let by_graph = components(
        cluster.len(),
        graph.edges().filter(|e| e.2 > 0.0).map(|(u, v, _)| (u, v)),
        &weighted,
    );
    let (sides, isolated) = if by_motif.len() > 1 {
        (by_motif, Vec::new())
    } else if by_graph.len() > 1 {
        let isolated = (0..cluster.len()).filter(|&v| covered[v] && !weighted[v]).collect();
        (by_graph, isolated)
    } else {
        let part = partition_graph(&graph)?;
        (part.clusters(), part.excluded.clone())
    };
    let mut children = Vec::new();
    for side in sides {
        let members: Vec<usize> = side.iter().map(|&v| cluster[v]).collect();
        children.push(split_node(g, members, depth + 1, options, proj)?);
    }
    // Covered vertices isolated in the projected graph join the singletons.
    let loose: BTreeSet<usize> = uncovered
        .iter()
        .copied()
        .chain(isolated.iter().map(|&v| cluster[v]))
        .collect();
    children.extend(loose.into_iter().map(|v| ClusterNode::leaf(vec![v], Vec::new())));
    Ok(ClusterNode {
        cluster,
        children,
        uncovered,
    })
}

/// Connected components of the vertices flagged in `keep`, each sorted,
/// ordered by smallest member.
fn components<I>(n: usize, links: I, keep: &[bool]) -> Vec<Vec<usize>>
where
    I: IntoIterator<Item = (usize, usize)>,
{
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for (a, b) in links {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra != rb {
            parent[ra.max(rb)] = ra.min(rb);
        }
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for v in (0..n).filter(|&v| keep[v]) {
        let r = find(&mut parent, v);
        groups.entry(r).or_default().push(v);
    }
    let mut out: Vec<Vec<usize>> = groups.into_values().collect();
    out.sort_by_key(|c| c[0]);
    out
}
