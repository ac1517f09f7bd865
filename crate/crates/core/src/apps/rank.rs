//! Riffled-independence structure learning from full rankings.
//!
//! Each sampled triple `{i, j, k}` becomes a 3-vertex hyperedge whose
//! singleton costs are the plug-in mutual informations between the position
//! of one candidate and the relative order of the other two.

use rand::seq::index::sample as sample_indices;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cost::CutCost;
use crate::error::{Error, Result};
use crate::hypergraph::{CutSelection, Hyperedge, Hypergraph};
use crate::par::{derive_seed, map_range, Execution};
use crate::project::ProjectionMethod;
use crate::spectral::{partition2, Partition, PipelineOptions};

/// Full rankings of `n` candidates; `positions[t][a]` is the 0-based
/// position of candidate `a` in ranking `t`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankingDataset {
    n: usize,
    positions: Vec<Vec<usize>>,
}

fn check_permutation(n: usize, items: &[usize]) -> Result<()> {
    if items.len() != n {
        return Err(Error::InvalidArgument(format!(
            "ranking has {} entries, expected {n}",
            items.len()
        )));
    }
    let mut seen = vec![false; n];
    for &a in items {
        if a >= n || std::mem::replace(&mut seen[a], true) {
            return Err(Error::InvalidArgument(format!(
                "ranking is not a permutation of 0..{n}"
            )));
        }
    }
    Ok(())
}

impl RankingDataset {
    /// From rankings listed in rank order (best first).
    pub fn from_orders(n: usize, orders: &[Vec<usize>]) -> Result<Self> {
        let positions = orders
            .iter()
            .map(|o| {
                check_permutation(n, o)?;
                let mut pos = vec![0; n];
                o.iter().enumerate().for_each(|(p, &a)| pos[a] = p);
                Ok(pos)
            })
            .collect::<Result<_>>()?;
        Ok(RankingDataset { n, positions })
    }

    pub fn from_positions(n: usize, positions: Vec<Vec<usize>>) -> Result<Self> {
        positions.iter().try_for_each(|p| check_permutation(n, p))?;
        Ok(RankingDataset { n, positions })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn positions(&self) -> &[Vec<usize>] {
        &self.positions
    }

    /// Rankings in rank order.
    pub fn orders(&self) -> Vec<Vec<usize>> {
        self.positions
            .iter()
            .map(|pos| {
                let mut o = vec![0; self.n];
                pos.iter().enumerate().for_each(|(a, &p)| o[p] = a);
                o
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TripleMi {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    /// Bits.
    pub value: f64,
}

/// Plug-in `I(σ(i); 1[σ(j) < σ(k)])` in bits.
pub fn estimate_triple_mi(d: &RankingDataset, i: usize, j: usize, k: usize) -> Result<TripleMi> {
    let n = d.n();
    if i >= n || j >= n || k >= n {
        return Err(Error::VertexOutOfRange {
            vertex: i.max(j).max(k),
            n,
        });
    }
    if i == j || i == k || j == k {
        return Err(Error::InvalidArgument("triple ids must be distinct".into()));
    }
    if d.is_empty() {
        return Err(Error::InvalidArgument("no rankings".into()));
    }
    let (j, k) = (j.min(k), j.max(k));
    let mut joint = vec![[0usize; 2]; n];
    for pos in d.positions() {
        joint[pos[i]][usize::from(pos[j] < pos[k])] += 1;
    }
    let m = d.len() as f64;
    let py = [0, 1].map(|y| joint.iter().map(|c| c[y]).sum::<usize>() as f64 / m);
    let mut mi = 0.0;
    for c in &joint {
        let px = (c[0] + c[1]) as f64 / m;
        for y in 0..2 {
            if c[y] > 0 {
                let pxy = c[y] as f64 / m;
                mi += pxy * (pxy / (px * py[y])).log2();
            }
        }
    }
    Ok(TripleMi {
        i,
        j,
        k,
        value: mi.max(0.0),
    })
}

/// All triples `i < j < k` in lexicographic order.
pub fn all_triples(n: usize) -> Vec<[usize; 3]> {
    let mut out = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            for k in (j + 1)..n {
                out.push([i, j, k]);
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankingHypergraph {
    pub hypergraph: Hypergraph,
    pub triples: Vec<[usize; 3]>,
}

/// Keeps each triple independently with probability `rate`; the draw for
/// triple `t` depends only on `(seed, t)`.
pub fn build_ranking_hypergraph(
    d: &RankingDataset,
    rate: f64,
    seed: u64,
    exec: Execution,
) -> Result<RankingHypergraph> {
    if d.n() < 3 {
        return Err(Error::InvalidArgument("need at least three candidates".into()));
    }
    if !(rate > 0.0 && rate <= 1.0) {
        return Err(Error::InvalidArgument(format!("triple rate {rate} outside (0, 1]")));
    }
    let triples: Vec<[usize; 3]> = all_triples(d.n())
        .into_iter()
        .enumerate()
        .filter(|(t, _)| rate >= 1.0 || ChaCha8Rng::seed_from_u64(derive_seed(seed, *t as u64)).random::<f64>() < rate)
        .map(|(_, tr)| tr)
        .collect();
    let edges = map_range(exec, triples.len(), |t| -> Result<Hyperedge> {
        let [i, j, k] = triples[t];
        let values = vec![
            estimate_triple_mi(d, i, j, k)?.value,
            estimate_triple_mi(d, j, i, k)?.value,
            estimate_triple_mi(d, k, i, j)?.value,
        ];
        Hyperedge::new(vec![i, j, k], CutCost::singleton(values)?)
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    Ok(RankingHypergraph {
        hypergraph: Hypergraph::new(d.n(), edges)?,
        triples,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct RiffleSplit {
    pub partition: Partition,
    /// `vol_H(∂S)`.
    pub boundary: f64,
    /// Sum of `I_{i;j,k}` over sampled triples with `i` alone on its side.
    pub split_objective: f64,
    /// Set when every mutual information vanishes, so any split is optimal.
    pub low_confidence: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RiffleSplitJson {
    pub clusters: Vec<Vec<usize>>,
    pub ncut: Option<f64>,
    pub boundary: f64,
    pub split_objective: f64,
    pub low_confidence: bool,
}

impl RiffleSplit {
    pub fn to_json(&self) -> RiffleSplitJson {
        RiffleSplitJson {
            clusters: self.partition.clusters(),
            ncut: self.partition.ncut,
            boundary: self.boundary,
            split_objective: self.split_objective,
            low_confidence: self.low_confidence,
        }
    }
}

/// Sum over triples split 1+2 of the lone candidate's mutual information
/// with the pair's order.
pub fn split_objective(d: &RankingDataset, triples: &[[usize; 3]], side: &CutSelection) -> Result<f64> {
    let mem = side.membership(d.n());
    let mut total = 0.0;
    for &[a, b, c] in triples {
        let inside = [a, b, c].iter().filter(|&&v| mem[v]).count();
        if inside == 0 || inside == 3 {
            continue;
        }
        let lone = [a, b, c]
            .into_iter()
            .find(|&v| mem[v] == (inside == 1))
            .expect("one vertex alone");
        let rest: Vec<usize> = [a, b, c].into_iter().filter(|&v| v != lone).collect();
        total += estimate_triple_mi(d, lone, rest[0], rest[1])?.value;
    }
    Ok(total)
}

/// Two-way split of the candidates from the singleton-cost projection of
/// the triple hypergraph with post-merge clipping.
pub fn learn_riffled_partition(d: &RankingDataset, rate: f64, seed: u64, exec: Execution) -> Result<RiffleSplit> {
    let rh = build_ranking_hypergraph(d, rate, seed, exec)?;
    let h = &rh.hypergraph;
    let options = PipelineOptions {
        method: ProjectionMethod::Singleton,
        clip: true,
        exec,
        ..PipelineOptions::default()
    };
    let total: f64 = h.degrees()?.iter().sum();
    let (partition, low_confidence) = if total <= 0.0 {
        let mut assignment = vec![Some(1); d.n()];
        assignment[0] = Some(0);
        let p = Partition {
            assignment,
            k: 2,
            ncut: None,
            graph_ncut: 0.0,
            beta_star: None,
            lambda2: None,
            excluded: Vec::new(),
        };
        (p, true)
    } else {
        (partition2(h, &options)?, false)
    };
    let side = partition.side();
    Ok(RiffleSplit {
        boundary: h.boundary_volume(&side)?,
        split_objective: split_objective(d, &rh.triples, &side)?,
        partition,
        low_confidence,
    })
}

/// Plackett-Luce draw: returns the items of `0..scores.len()` in rank order.
pub fn sample_plackett_luce<R: Rng + ?Sized>(scores: &[f64], rng: &mut R) -> Result<Vec<usize>> {
    if let Some(s) = scores.iter().find(|&&s| !(s > 0.0 && s.is_finite())) {
        return Err(Error::InvalidArgument(format!(
            "Plackett-Luce score {s} must be positive"
        )));
    }
    let mut remaining: Vec<usize> = (0..scores.len()).collect();
    let mut order = Vec::with_capacity(scores.len());
    while !remaining.is_empty() {
        let total: f64 = remaining.iter().map(|&a| scores[a]).sum();
        let mut t = rng.random::<f64>() * total;
        let mut pick = remaining.len() - 1;
        for (idx, &a) in remaining.iter().enumerate() {
            if t < scores[a] {
                pick = idx;
                break;
            }
            t -= scores[a];
        }
        order.push(remaining.remove(pick));
    }
    Ok(order)
}

/// Interleaves two rank orders over disjoint candidate sets covering
/// `0..n`, choosing the positions of the first set uniformly.
pub fn riffle_interleave<R: Rng + ?Sized>(a: &[usize], b: &[usize], n: usize, rng: &mut R) -> Result<Vec<usize>> {
    let mut all: Vec<usize> = a.iter().chain(b).copied().collect();
    all.sort_unstable();
    if all != (0..n).collect::<Vec<_>>() {
        return Err(Error::InvalidArgument(
            "riffled sets must be disjoint and cover 0..n".into(),
        ));
    }
    let mut is_a = vec![false; n];
    sample_indices(rng, n, a.len()).into_iter().for_each(|p| is_a[p] = true);
    let (mut ia, mut ib) = (a.iter(), b.iter());
    Ok(is_a
        .into_iter()
        .map(|slot| *if slot { ia.next() } else { ib.next() }.expect("slot counts match"))
        .collect())
}

/// Rankings of `0..n` where `S* = 0..split` and its complement are ranked
/// independently by Plackett-Luce with `U(0,1]` scores, then riffled.
pub fn generate_riffled(n: usize, split: usize, m: usize, seed: u64) -> Result<RankingDataset> {
    if split == 0 || split >= n {
        return Err(Error::InvalidArgument("split must leave both sets nonempty".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scores: Vec<f64> = (0..n).map(|_| 1.0 - rng.random::<f64>()).collect();
    let (sa, sb) = scores.split_at(split);
    let orders = (0..m)
        .map(|_| {
            let a = sample_plackett_luce(sa, &mut rng)?;
            let b: Vec<usize> = sample_plackett_luce(sb, &mut rng)?
                .into_iter()
                .map(|x| x + split)
                .collect();
            riffle_interleave(&a, &b, n, &mut rng)
        })
        .collect::<Result<Vec<_>>>()?;
    RankingDataset::from_orders(n, &orders)
}
