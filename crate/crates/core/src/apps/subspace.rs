//! Subspace segmentation with inhomogeneous deviations: the cost of cutting
//! a point away from a sampled tuple decays with its distance to the affine
//! subspace fitted to the other points of the tuple.

use std::collections::HashSet;

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::cost::CutCost;
use crate::error::{Error, Result};
use crate::hypergraph::{Hyperedge, Hypergraph};
use crate::par::{map_range, Execution};
use crate::project::ProjectionMethod;
use crate::spectral::{kway_partition, Partition, PipelineOptions};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointCloud {
    pub dim: usize,
    pub points: Vec<Vec<f64>>,
    pub labels: Option<Vec<usize>>,
}

impl PointCloud {
    pub fn new(points: Vec<Vec<f64>>, labels: Option<Vec<usize>>) -> Result<Self> {
        let dim = points.first().map_or(0, Vec::len);
        if let Some(i) = points.iter().position(|p| p.len() != dim) {
            return Err(Error::InvalidArgument(format!(
                "point {i} has dimension {}, expected {dim}",
                points[i].len()
            )));
        }
        if labels.as_ref().is_some_and(|l| l.len() != points.len()) {
            return Err(Error::InvalidArgument("one label per point required".into()));
        }
        Ok(PointCloud { dim, points, labels })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Distance from `pts[v]` to the best-fit `p`-dimensional affine subspace of
/// the remaining points. A rank-deficient fit uses the lower-dimensional
/// hull.
pub fn inh_deviation(pts: &[Vec<f64>], v: usize, p: usize) -> Result<f64> {
    if v >= pts.len() {
        return Err(Error::VertexOutOfRange {
            vertex: v,
            n: pts.len(),
        });
    }
    let others: Vec<&Vec<f64>> = pts
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != v)
        .map(|(_, x)| x)
        .collect();
    if others.len() < p + 1 {
        return Err(Error::InvalidArgument(format!(
            "{} remaining points cannot determine a {p}-dimensional affine fit",
            others.len()
        )));
    }
    let dim = pts[v].len();
    let m = others.len();
    let centroid: Vec<f64> = (0..dim)
        .map(|c| others.iter().map(|x| x[c]).sum::<f64>() / m as f64)
        .collect();
    let centered = DMatrix::from_fn(m, dim, |r, c| others[r][c] - centroid[c]);
    let mut r: Vec<f64> = pts[v].iter().zip(&centroid).map(|(x, c)| x - c).collect();
    if p > 0 {
        let eig = SymmetricEigen::new(centered.transpose() * &centered);
        let mut order: Vec<usize> = (0..dim).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
        let lmax = order.first().map_or(0.0, |&i| eig.eigenvalues[i]);
        for &i in order.iter().take(p) {
            if eig.eigenvalues[i] <= 1e-12 * lmax.max(f64::MIN_POSITIVE) {
                break;
            }
            let dir = eig.eigenvectors.column(i);
            let dot: f64 = r.iter().zip(dir.iter()).map(|(a, b)| a * b).sum();
            r.iter_mut().zip(dir.iter()).for_each(|(a, b)| *a -= dot * b);
        }
    }
    Ok(r.iter().map(|x| x * x).sum::<f64>().sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubspaceConfig {
    pub p: usize,
    /// Hyperedge size ψ, at least `p + 2`.
    pub psi: usize,
    /// Weight scale; `None` picks the median sampled deviation.
    pub theta: Option<f64>,
    pub sample_count: usize,
    pub seed: u64,
}

impl SubspaceConfig {
    pub fn new(p: usize, sample_count: usize, seed: u64) -> Self {
        SubspaceConfig {
            p,
            psi: p + 2,
            theta: None,
            sample_count,
            seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubspaceHypergraph {
    pub hypergraph: Hypergraph,
    /// Per hyperedge, the deviation of each member in vertex order.
    pub deviations: Vec<Vec<f64>>,
    /// Per hyperedge, the mean of its deviations.
    pub mean_deviation: Vec<f64>,
    pub theta: f64,
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn all_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..k).collect();
    loop {
        out.push(cur.clone());
        let Some(i) = (0..k).rev().find(|&i| cur[i] < n - k + i) else {
            return out;
        };
        cur[i] += 1;
        for j in (i + 1)..k {
            cur[j] = cur[j - 1] + 1;
        }
    }
}

/// Distinct uniformly random `psi`-subsets; all of them when `count` is at
/// least their number.
pub fn sample_tuples(n: usize, psi: usize, count: usize, seed: u64) -> Vec<Vec<usize>> {
    if psi > n {
        return Vec::new();
    }
    if count as f64 >= binomial(n, psi) {
        return all_subsets(n, psi);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen = HashSet::new();
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let mut t: Vec<usize> = rand::seq::index::sample(&mut rng, n, psi).into_vec();
        t.sort_unstable();
        if seen.insert(t.clone()) {
            out.push(t);
        }
    }
    out
}

/// Median of the values; falls back to the mean, then to 1, when the
/// median is zero.
pub fn default_theta(deviations: &[f64]) -> f64 {
    if deviations.is_empty() {
        return 1.0;
    }
    let mut s = deviations.to_vec();
    s.sort_by(f64::total_cmp);
    let mid = s.len() / 2;
    let median = if s.len() % 2 == 1 {
        s[mid]
    } else {
        0.5 * (s[mid - 1] + s[mid])
    };
    if median > 0.0 {
        return median;
    }
    let mean = s.iter().sum::<f64>() / s.len() as f64;
    if mean > 0.0 {
        mean
    } else {
        1.0
    }
}

pub fn build_subspace_hypergraph(pc: &PointCloud, cfg: &SubspaceConfig, exec: Execution) -> Result<SubspaceHypergraph> {
    if cfg.psi < cfg.p + 2 {
        return Err(Error::InvalidArgument(format!(
            "hyperedge size {} below p + 2",
            cfg.psi
        )));
    }
    if cfg.theta.is_some_and(|t| t.is_nan() || t <= 0.0) {
        return Err(Error::InvalidArgument("theta must be positive".into()));
    }
    if pc.len() < cfg.psi {
        return Err(Error::InvalidArgument(format!(
            "{} points cannot form {}-tuples",
            pc.len(),
            cfg.psi
        )));
    }
    let tuples = sample_tuples(pc.len(), cfg.psi, cfg.sample_count, cfg.seed);
    let deviations = map_range(exec, tuples.len(), |t| -> Result<Vec<f64>> {
        let pts: Vec<Vec<f64>> = tuples[t].iter().map(|&i| pc.points[i].clone()).collect();
        (0..pts.len()).map(|v| inh_deviation(&pts, v, cfg.p)).collect()
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let theta = cfg
        .theta
        .unwrap_or_else(|| default_theta(&deviations.iter().flatten().copied().collect::<Vec<_>>()));
    let edges = tuples
        .iter()
        .zip(&deviations)
        .map(|(t, dev)| {
            let w = dev.iter().map(|d| (-(d * d) / (theta * theta)).exp()).collect();
            Hyperedge::new(t.clone(), CutCost::singleton(w)?)
        })
        .collect::<Result<Vec<_>>>()?;
    let mean_deviation = deviations
        .iter()
        .map(|d| d.iter().sum::<f64>() / d.len() as f64)
        .collect();
    Ok(SubspaceHypergraph {
        hypergraph: Hypergraph::new(pc.len(), edges)?,
        deviations,
        mean_deviation,
        theta,
    })
}

/// Unit line directions in 3-D with pairwise angles of at least 30°.
pub fn line_directions(k: usize) -> Result<Vec<[f64; 3]>> {
    let raw: Vec<[f64; 3]> = match k {
        2 => vec![[0.97, 0.26, 0.0], [0.97, -0.26, 0.0]],
        3 => vec![[0.95, 0.30, 0.0], [0.95, -0.15, 0.26], [0.95, -0.15, -0.26]],
        4 => vec![
            [0.93, 0.37, 0.0],
            [0.93, 0.0, 0.37],
            [0.93, -0.37, 0.0],
            [0.93, 0.0, -0.37],
        ],
        _ => return Err(Error::InvalidArgument(format!("no built-in directions for {k} lines"))),
    };
    Ok(raw
        .into_iter()
        .map(|d| {
            let n = d.iter().map(|x| x * x).sum::<f64>().sqrt();
            d.map(|x| x / n)
        })
        .collect())
}

/// `per_line` points on each line through the origin, uniform on the part
/// inside the unit ball, plus isotropic Gaussian noise.
pub fn generate_lines(directions: &[[f64; 3]], per_line: usize, noise: f64, seed: u64) -> Result<PointCloud> {
    let normal = Normal::new(0.0, noise).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points = Vec::with_capacity(directions.len() * per_line);
    let mut labels = Vec::with_capacity(points.capacity());
    for (l, d) in directions.iter().enumerate() {
        for _ in 0..per_line {
            let t: f64 = rng.random_range(-1.0..=1.0);
            points.push(d.iter().map(|x| t * x + normal.sample(&mut rng)).collect());
            labels.push(l);
        }
    }
    PointCloud::new(points, Some(labels))
}

pub fn generate_klines(k: usize, per_line: usize, noise: f64, seed: u64) -> Result<PointCloud> {
    generate_lines(&line_directions(k)?, per_line, noise, seed)
}

fn permutations(k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(k - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, k - 1);
            out.push(q);
        }
    }
    out
}

/// Percentage of points misassigned under the best matching of predicted
/// to true labels. Unassigned points count as errors.
pub fn misclassification_rate(pred: &Partition, truth: &[usize]) -> Result<f64> {
    if pred.assignment.len() != truth.len() {
        return Err(Error::InvalidArgument(
            "prediction and truth cover different points".into(),
        ));
    }
    let k_true = truth.iter().max().map_or(0, |m| m + 1);
    if pred.k != k_true {
        return Err(Error::InvalidArgument(format!(
            "{} predicted clusters vs {k_true} true labels",
            pred.k
        )));
    }
    if truth.is_empty() {
        return Ok(0.0);
    }
    let k = pred.k;
    let mut confusion = vec![vec![0usize; k]; k];
    for (p, &t) in pred.assignment.iter().zip(truth) {
        if let Some(p) = p {
            confusion[*p][t] += 1;
        }
    }
    let best = permutations(k)
        .iter()
        .map(|perm| (0..k).map(|c| confusion[c][perm[c]]).sum::<usize>())
        .max()
        .unwrap_or(0);
    Ok(100.0 * (truth.len() - best) as f64 / truth.len() as f64)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SegmentationResult {
    pub partition: Partition,
    pub theta: f64,
    pub error_rate: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentationJson {
    pub k: usize,
    pub theta: f64,
    pub ncut: Option<f64>,
    pub error_rate: Option<f64>,
    pub clusters: Vec<Vec<usize>>,
    pub excluded: Vec<usize>,
}

impl SegmentationResult {
    pub fn to_json(&self) -> SegmentationJson {
        SegmentationJson {
            k: self.partition.k,
            theta: self.theta,
            ncut: self.partition.ncut,
            error_rate: self.error_rate,
            clusters: self.partition.clusters(),
            excluded: self.partition.excluded.clone(),
        }
    }
}

/// Builds the deviation hypergraph and splits it into `k` clusters; scores
/// against the cloud's labels when present.
pub fn segment(pc: &PointCloud, cfg: &SubspaceConfig, k: usize, exec: Execution) -> Result<SegmentationResult> {
    let sh = build_subspace_hypergraph(pc, cfg, exec)?;
    let options = PipelineOptions {
        method: ProjectionMethod::Singleton,
        clip: true,
        exec,
        ..PipelineOptions::default()
    };
    let partition = kway_partition(&sh.hypergraph, k, cfg.seed, &options)?;
    let error_rate = match &pc.labels {
        Some(l) => Some(misclassification_rate(&partition, l)?),
        None => None,
    };
    Ok(SegmentationResult {
        partition,
        theta: sh.theta,
        error_rate,
    })
}
