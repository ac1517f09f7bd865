//! Normalized-Laplacian spectral partitioning: two-way sweep cuts and a
//! k-way embedding clustered with k-means.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypergraph::{CutSelection, Hypergraph};
use crate::par::{derive_seed, map_range, Execution};
use crate::project::{merge, project_all, ProjectedGraph, ProjectionMethod};

/// Vertices with degree at most this fraction of the largest degree are
/// treated as isolated.
const ISOLATED_TOL: f64 = 1e-12;
/// Relative margin a prefix must beat to replace the current best sweep cut.
const SWEEP_TIE_TOL: f64 = 1e-12;

/// `L = I - D^{-1/2} A D^{-1/2}` restricted to vertices of positive degree.
#[derive(Debug, Clone)]
pub struct LaplacianSystem {
    /// Original vertex ids of the rows, ascending.
    pub active: Vec<usize>,
    /// Degrees of the active vertices.
    pub degrees: Vec<f64>,
    pub laplacian: DMatrix<f64>,
    /// Vertices dropped for having zero degree.
    pub excluded: Vec<usize>,
}

impl LaplacianSystem {
    pub fn n(&self) -> usize {
        self.active.len()
    }
}

pub fn build_laplacian(g: &ProjectedGraph) -> Result<LaplacianSystem> {
    if let Some((u, v, w)) = g.edges().find(|&(_, _, w)| w < 0.0) {
        return Err(Error::NegativeWeight { u, v, weight: w });
    }
    let deg = g.degrees();
    let max = deg.iter().fold(0.0f64, |a, &b| a.max(b));
    if max <= 0.0 {
        return Err(Error::EmptyGraph);
    }
    let (active, excluded): (Vec<usize>, Vec<usize>) = (0..g.n()).partition(|&v| deg[v] > ISOLATED_TOL * max);
    let mut index = vec![usize::MAX; g.n()];
    for (i, &v) in active.iter().enumerate() {
        index[v] = i;
    }
    let n = active.len();
    let degrees: Vec<f64> = active.iter().map(|&v| deg[v]).collect();
    let inv_sqrt: Vec<f64> = degrees.iter().map(|d| 1.0 / d.sqrt()).collect();
    let mut l = DMatrix::<f64>::identity(n, n);
    for (u, v, w) in g.edges() {
        let (i, j) = (index[u], index[v]);
        if i == usize::MAX || j == usize::MAX {
            continue;
        }
        let x = w * inv_sqrt[i] * inv_sqrt[j];
        l[(i, j)] -= x;
        l[(j, i)] -= x;
    }
    Ok(LaplacianSystem {
        active,
        degrees,
        laplacian: l,
        excluded,
    })
}

/// Eigenvalues in ascending order with matching unit eigenvectors (columns).
pub fn spectrum(ls: &LaplacianSystem) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let n = ls.n();
    let eig = SymmetricEigen::try_new(ls.laplacian.clone(), f64::EPSILON, 100 * n.max(1)).ok_or_else(|| {
        Error::Eigen(format!(
            "symmetric eigensolver did not converge within {} iterations (n = {n})",
            100 * n
        ))
    })?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]).then(a.cmp(&b)));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    Ok((values, vectors))
}

/// Second-smallest eigenvalue and its eigenvector, made orthogonal to
/// `D^{1/2} 1`, unit length, first nonzero entry positive.
pub fn second_eigenpair(ls: &LaplacianSystem) -> Result<(f64, Vec<f64>)> {
    let n = ls.n();
    if n < 2 {
        return Err(Error::InvalidArgument(
            "need at least two vertices of positive degree".into(),
        ));
    }
    let (values, vectors) = spectrum(ls)?;
    let mut u: Vec<f64> = vectors.column(1).iter().copied().collect();
    let trivial: Vec<f64> = ls.degrees.iter().map(|d| d.sqrt()).collect();
    let tnorm2: f64 = trivial.iter().map(|t| t * t).sum();
    let dot: f64 = u.iter().zip(&trivial).map(|(a, b)| a * b).sum();
    u.iter_mut().zip(&trivial).for_each(|(x, t)| *x -= dot / tnorm2 * t);
    let norm = u.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm <= f64::EPSILON {
        return Err(Error::Eigen("second eigenvector collapsed onto the trivial one".into()));
    }
    u.iter_mut().for_each(|x| *x /= norm);
    if let Some(first) = u.iter().find(|x| x.abs() > 1e-12) {
        if *first < 0.0 {
            u.iter_mut().for_each(|x| *x = -*x);
        }
    }
    Ok((values[1].max(0.0), u))
}

/// Result of a spectral partitioning.
#[derive(Debug, Clone, PartialEq)]
pub struct Partition {
    /// Cluster of every vertex; `None` for excluded vertices.
    pub assignment: Vec<Option<usize>>,
    pub k: usize,
    /// Hypergraph objective of the clusters, when a hypergraph is known and
    /// the objective is defined.
    pub ncut: Option<f64>,
    /// Objective on the projected graph.
    pub graph_ncut: f64,
    pub beta_star: Option<f64>,
    pub lambda2: Option<f64>,
    pub excluded: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartitionJson {
    pub k: usize,
    pub ncut: Option<f64>,
    pub graph_ncut: f64,
    pub beta_star: Option<f64>,
    pub lambda2: Option<f64>,
    pub clusters: Vec<Vec<usize>>,
    pub excluded: Vec<usize>,
}

impl Partition {
    pub fn clusters(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.k];
        for (v, c) in self.assignment.iter().enumerate() {
            if let Some(c) = c {
                out[*c].push(v);
            }
        }
        out
    }

    /// Cluster 0 as a selection.
    pub fn side(&self) -> CutSelection {
        self.clusters().swap_remove(0).into_iter().collect()
    }

    pub fn to_json(&self) -> PartitionJson {
        PartitionJson {
            k: self.k,
            ncut: self.ncut,
            graph_ncut: self.graph_ncut,
            beta_star: self.beta_star,
            lambda2: self.lambda2,
            clusters: self.clusters(),
            excluded: self.excluded.clone(),
        }
    }
}

/// Sweeps the prefixes of the active vertices ordered by `D^{-1/2} u` and
/// keeps the one of least normalized cut. Cluster 0 is the smaller side.
pub fn sweep_cut(g: &ProjectedGraph, ls: &LaplacianSystem, u: &[f64]) -> Result<Partition> {
    let n = ls.n();
    if u.len() != n || n < 2 {
        return Err(Error::InvalidArgument(
            "eigenvector length does not match the Laplacian".into(),
        ));
    }
    let score: Vec<f64> = u.iter().zip(&ls.degrees).map(|(x, d)| x / d.sqrt()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| score[a].total_cmp(&score[b]).then(ls.active[a].cmp(&ls.active[b])));

    let mut pos = vec![usize::MAX; g.n()];
    for (i, &v) in ls.active.iter().enumerate() {
        pos[v] = i;
    }
    let mut adj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for (a, b, w) in g.edges() {
        if pos[a] != usize::MAX && pos[b] != usize::MAX {
            adj[pos[a]].push((pos[b], w));
            adj[pos[b]].push((pos[a], w));
        }
    }
    let total: f64 = ls.degrees.iter().sum();
    let mut in_s = vec![false; n];
    let (mut cut, mut vol) = (0.0, 0.0);
    let mut best: Option<(f64, usize)> = None;
    for (i, &a) in order.iter().take(n - 1).enumerate() {
        let inside: f64 = adj[a].iter().filter(|(b, _)| in_s[*b]).map(|(_, w)| w).sum();
        cut += ls.degrees[a] - 2.0 * inside;
        vol += ls.degrees[a];
        in_s[a] = true;
        let value = cut.max(0.0) * (1.0 / vol + 1.0 / (total - vol));
        match best {
            Some((b, _)) if value >= b - SWEEP_TIE_TOL * b.abs().max(1.0) => {}
            _ => best = Some((value, i + 1)),
        }
    }
    let (_, len) = best.expect("at least one prefix");
    let prefix: Vec<bool> = {
        let mut m = vec![false; n];
        order[..len].iter().for_each(|&a| m[a] = true);
        m
    };
    let prefix_is_s = len < n - len;
    let mut assignment = vec![None; g.n()];
    for (i, &v) in ls.active.iter().enumerate() {
        assignment[v] = Some(if prefix[i] == prefix_is_s { 0 } else { 1 });
    }
    let in_set: Vec<bool> = assignment.iter().map(|c| *c == Some(0)).collect();
    Ok(Partition {
        assignment,
        k: 2,
        ncut: None,
        graph_ncut: g.ncut(&in_set)?,
        beta_star: g.beta_star(),
        lambda2: None,
        excluded: ls.excluded.clone(),
    })
}

/// Two-way spectral partition of a weighted graph.
pub fn partition_graph(g: &ProjectedGraph) -> Result<Partition> {
    let ls = build_laplacian(g)?;
    let (lambda2, u) = second_eigenpair(&ls)?;
    let mut p = sweep_cut(g, &ls, &u)?;
    p.lambda2 = Some(lambda2);
    Ok(p)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PipelineOptions {
    pub method: ProjectionMethod,
    pub clip: bool,
    pub exec: Execution,
    /// k-means restarts for k-way partitioning.
    pub restarts: usize,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        PipelineOptions {
            method: ProjectionMethod::Auto,
            clip: true,
            exec: Execution::default(),
            restarts: 100,
        }
    }
}

/// Projects and merges every hyperedge of `h`.
pub fn project_hypergraph(h: &Hypergraph, options: &PipelineOptions) -> Result<ProjectedGraph> {
    let projections = project_all(h, options.method, options.exec)?;
    merge(h, &projections, options.clip)
}

fn hypergraph_objective(h: &Hypergraph, p: &Partition) -> Option<f64> {
    if !p.excluded.is_empty() {
        return None;
    }
    let parts: Vec<CutSelection> = p.clusters().into_iter().map(CutSelection::new).collect();
    if p.k == 2 {
        h.ncut(&parts[0]).ok()
    } else {
        h.kway_ncut(&parts).ok()
    }
}

/// Project, merge, and sweep.
pub fn partition2(h: &Hypergraph, options: &PipelineOptions) -> Result<Partition> {
    let g = project_hypergraph(h, options)?;
    let mut p = partition_graph(&g)?;
    p.ncut = hypergraph_objective(h, &p);
    Ok(p)
}

/// `Σ_i cut(C_i) / vol(C_i)` on the graph; infinite if a cluster has zero
/// volume.
pub fn graph_kway_ncut(g: &ProjectedGraph, assignment: &[Option<usize>], k: usize) -> f64 {
    let deg = g.degrees();
    let mut cut = vec![0.0; k];
    let mut vol = vec![0.0; k];
    for (v, c) in assignment.iter().enumerate() {
        if let Some(c) = c {
            vol[*c] += deg[v];
        }
    }
    for (u, v, w) in g.edges() {
        if let (Some(a), Some(b)) = (assignment[u], assignment[v]) {
            if a != b {
                cut[a] += w;
                cut[b] += w;
            }
        }
    }
    cut.iter()
        .zip(&vol)
        .map(|(c, v)| if *v > 0.0 { c / v } else { f64::INFINITY })
        .sum()
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// One k-means run with k-means++ seeding. Labels are relabelled in order of
/// first appearance so equal clusterings compare equal.
pub fn kmeans(points: &[Vec<f64>], k: usize, seed: u64, max_iter: usize) -> Vec<usize> {
    let n = points.len();
    let dim = points.first().map_or(0, Vec::len);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut centers: Vec<Vec<f64>> = vec![points[rng.random_range(0..n)].clone()];
    let mut d2: Vec<f64> = points.iter().map(|p| sq_dist(p, &centers[0])).collect();
    while centers.len() < k {
        let total: f64 = d2.iter().sum();
        let next = if total > 0.0 {
            let mut t = rng.random::<f64>() * total;
            let mut pick = n - 1;
            for (i, &d) in d2.iter().enumerate() {
                if t < d {
                    pick = i;
                    break;
                }
                t -= d;
            }
            pick
        } else {
            rng.random_range(0..n)
        };
        centers.push(points[next].clone());
        for (i, p) in points.iter().enumerate() {
            d2[i] = d2[i].min(sq_dist(p, &centers[centers.len() - 1]));
        }
    }

    let nearest = |p: &[f64], centers: &[Vec<f64>]| {
        let mut best = (f64::INFINITY, 0);
        for (c, center) in centers.iter().enumerate() {
            let d = sq_dist(p, center);
            if d < best.0 {
                best = (d, c);
            }
        }
        best
    };
    let mut labels: Vec<usize> = points.iter().map(|p| nearest(p, &centers).1).collect();
    for _ in 0..max_iter {
        let mut sums = vec![vec![0.0; dim]; k];
        let mut counts = vec![0usize; k];
        for (p, &l) in points.iter().zip(&labels) {
            counts[l] += 1;
            sums[l].iter_mut().zip(p).for_each(|(s, x)| *s += x);
        }
        for c in 0..k {
            if counts[c] > 0 {
                centers[c] = sums[c].iter().map(|s| s / counts[c] as f64).collect();
            }
        }
        // Refill empty clusters with the point farthest from its center.
        for c in 0..k {
            if counts[c] == 0 {
                let far = (0..n).filter(|&i| counts[labels[i]] > 1).max_by(|&a, &b| {
                    sq_dist(&points[a], &centers[labels[a]])
                        .total_cmp(&sq_dist(&points[b], &centers[labels[b]]))
                        .then(b.cmp(&a))
                });
                if let Some(i) = far {
                    counts[labels[i]] -= 1;
                    labels[i] = c;
                    counts[c] = 1;
                    centers[c] = points[i].clone();
                }
            }
        }
        let next: Vec<usize> = points.iter().map(|p| nearest(p, &centers).1).collect();
        if next == labels {
            break;
        }
        labels = next;
    }
    relabel(&labels)
}

fn relabel(labels: &[usize]) -> Vec<usize> {
    let mut map = std::collections::HashMap::new();
    labels
        .iter()
        .map(|&l| {
            let next = map.len();
            *map.entry(l).or_insert(next)
        })
        .collect()
}

/// Row-normalized embedding from the `k` smallest eigenvectors.
pub fn spectral_embedding(ls: &LaplacianSystem, k: usize) -> Result<Vec<Vec<f64>>> {
    let (_, vectors) = spectrum(ls)?;
    Ok((0..ls.n())
        .map(|r| {
            let row: Vec<f64> = (0..k).map(|c| vectors[(r, c)]).collect();
            let norm = row.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 0.0 {
                row.iter().map(|x| x / norm).collect()
            } else {
                row
            }
        })
        .collect())
}

/// k-way partition of a graph; `score` ranks restarts (lower is better),
/// ties go to the earlier restart.
fn kway_core<F>(g: &ProjectedGraph, k: usize, seed: u64, options: &PipelineOptions, score: F) -> Result<Partition>
where
    F: Fn(&Partition) -> (f64, f64) + Sync,
{
    let ls = build_laplacian(g)?;
    let n = ls.n();
    if k < 2 || k > n {
        return Err(Error::InvalidArgument(format!("k = {k} must lie in 2..={n}")));
    }
    let emb = spectral_embedding(&ls, k)?;
    let candidates = map_range(options.exec, options.restarts.max(1), |r| {
        let labels = kmeans(&emb, k, derive_seed(seed, r as u64), 300);
        let mut assignment = vec![None; g.n()];
        for (i, &v) in ls.active.iter().enumerate() {
            assignment[v] = Some(labels[i]);
        }
        let k_found = labels.iter().max().map_or(0, |m| m + 1);
        let p = Partition {
            graph_ncut: graph_kway_ncut(g, &assignment, k_found),
            assignment,
            k: k_found,
            ncut: None,
            beta_star: g.beta_star(),
            lambda2: None,
            excluded: ls.excluded.clone(),
        };
        let s = score(&p);
        (s, p)
    });
    let mut best: Option<((f64, f64), Partition)> = None;
    for (s, p) in candidates {
        let better = match &best {
            None => true,
            Some((b, _)) => s.0 < b.0 || (s.0 == b.0 && s.1 < b.1),
        };
        if better {
            best = Some((s, p));
        }
    }
    Ok(best.expect("at least one restart").1)
}

/// k-way partition of a weighted graph, scored by the graph objective.
pub fn kway_partition_graph(g: &ProjectedGraph, k: usize, seed: u64, options: &PipelineOptions) -> Result<Partition> {
    kway_core(g, k, seed, options, |p| (p.graph_ncut, p.graph_ncut))
}

/// k-way partition of a hypergraph: restarts are ranked by the hypergraph
/// objective, then by the graph objective.
pub fn kway_partition(h: &Hypergraph, k: usize, seed: u64, options: &PipelineOptions) -> Result<Partition> {
    let g = project_hypergraph(h, options)?;
    let mut p = kway_core(&g, k, seed, options, |p| {
        let hs = if p.k == k { hypergraph_objective(h, p) } else { None };
        (hs.unwrap_or(f64::INFINITY), p.graph_ncut)
    })?;
    p.ncut = hypergraph_objective(h, &p);
    Ok(p)
}
