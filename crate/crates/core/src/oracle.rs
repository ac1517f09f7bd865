//! Brute-force references, random submodular costs, and audits of the
//! projection guarantees.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cost::{class_masks, CutCost};
use crate::error::{Error, Result};
use crate::hypergraph::{CutSelection, Hypergraph};
use crate::par::{derive_seed, map_range, Execution};
use crate::project::{
    consistency_factor, merge, pairs, project_all, project_submodular, table1_beta, EdgeProjection, ProjectedGraph,
    ProjectionMethod,
};
use crate::spectral::{partition_graph, PipelineOptions};

/// Largest vertex count accepted by the exhaustive searches.
pub const MAX_BRUTE_FORCE: usize = 20;
/// Largest arity accepted by [`feasibility_ratio`].
pub const MAX_AUDIT_ARITY: usize = 12;

/// Random symmetric submodular costs: `latent · cut_G(S) + concave · g(|S|)`
/// where `G` has iid `U(0,1)` weights and `g(s) = Σ_t a_t min(s, δ-s, t)`
/// with iid `U(0,1)` coefficients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubmodularGenerator {
    pub arity: usize,
    pub latent: f64,
    pub concave: f64,
    pub seed: u64,
}

/// One generated cost with the latent graph weights (already scaled by the
/// latent coefficient) in lexicographic pair order.
#[derive(Debug, Clone, PartialEq)]
pub struct SubmodularSample {
    pub cost: CutCost,
    pub latent_weights: Vec<f64>,
}

impl SubmodularGenerator {
    pub fn new(arity: usize, seed: u64) -> Self {
        SubmodularGenerator {
            arity,
            latent: 1.0,
            concave: 1.0,
            seed,
        }
    }

    pub fn latent_only(arity: usize, seed: u64) -> Self {
        SubmodularGenerator {
            concave: 0.0,
            ..Self::new(arity, seed)
        }
    }

    pub fn concave_only(arity: usize, seed: u64) -> Self {
        SubmodularGenerator {
            latent: 0.0,
            ..Self::new(arity, seed)
        }
    }

    /// Sample number `index`; independent of any other index.
    pub fn sample(&self, index: u64) -> Result<SubmodularSample> {
        let d = self.arity;
        if !(2..=crate::cost::MAX_COMPLETION_ARITY).contains(&d) {
            return Err(Error::ArityTooLarge {
                arity: d,
                limit: crate::cost::MAX_COMPLETION_ARITY,
            });
        }
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(self.seed, index));
        let latent: Vec<f64> = pairs(d).map(|_| self.latent * rng.random::<f64>()).collect();
        let coeffs: Vec<f64> = (1..=d / 2).map(|_| self.concave * rng.random::<f64>()).collect();
        let pair_list: Vec<(usize, usize)> = pairs(d).collect();
        let cost = CutCost::from_fn(d, |m| {
            let cut: f64 = pair_list
                .iter()
                .zip(&latent)
                .filter(|((a, b), _)| (m >> a & 1) != (m >> b & 1))
                .map(|(_, w)| w)
                .sum();
            let s = m.count_ones() as usize;
            let g: f64 = coeffs
                .iter()
                .enumerate()
                .map(|(t, a)| a * s.min(d - s).min(t + 1) as f64)
                .sum();
            cut + g
        })?;
        if !cost.is_submodular()? {
            return Err(Error::InvalidCost(
                "generated cost failed the submodularity check".into(),
            ));
        }
        Ok(SubmodularSample {
            cost,
            latent_weights: latent,
        })
    }
}

pub fn random_submodular(gen: &SubmodularGenerator) -> Result<CutCost> {
    Ok(gen.sample(0)?.cost)
}

fn brute_force_min<F>(n: usize, exec: Execution, value: F) -> Result<(CutSelection, f64)>
where
    F: Fn(&[bool]) -> Option<f64> + Sync,
{
    if n < 2 {
        return Err(Error::InvalidArgument("need at least two vertices".into()));
    }
    if n > MAX_BRUTE_FORCE {
        return Err(Error::InvalidArgument(format!(
            "exhaustive search limited to {MAX_BRUTE_FORCE} vertices, got {n}"
        )));
    }
    // Vertex 0 always lies in S; mask bits cover vertices 1..n.
    let count = (1usize << (n - 1)) - 1;
    let values = map_range(exec, count, |m| {
        let mem: Vec<bool> = (0..n).map(|v| v == 0 || (m >> (v - 1)) & 1 == 1).collect();
        value(&mem)
    });
    let mut best: Option<(f64, Vec<usize>)> = None;
    for (m, val) in values.into_iter().enumerate() {
        let Some(val) = val else { continue };
        let better = match &best {
            None => true,
            Some((b, _)) if val < *b => true,
            Some((b, set)) if val == *b => {
                let s: Vec<usize> = (0..n).filter(|&v| v == 0 || (m >> (v - 1)) & 1 == 1).collect();
                s < *set
            }
            _ => false,
        };
        if better {
            let s: Vec<usize> = (0..n).filter(|&v| v == 0 || (m >> (v - 1)) & 1 == 1).collect();
            best = Some((val, s));
        }
    }
    let (val, s) = best.ok_or_else(|| Error::DegenerateCut("every cut has a zero-volume side".into()))?;
    Ok((CutSelection::new(s), val))
}

/// Exact hypergraph normalized-cut optimum. `S` always contains vertex 0;
/// ties go to the lexicographically smallest `S`.
pub fn brute_force_ncut(h: &Hypergraph) -> Result<(CutSelection, f64)> {
    brute_force_ncut_with(h, Execution::default())
}

pub fn brute_force_ncut_with(h: &Hypergraph, exec: Execution) -> Result<(CutSelection, f64)> {
    let d = h.degrees()?;
    brute_force_min(h.n(), exec, |mem| {
        let (b, vs, vc) = h.cut_terms(mem, &d).ok()?;
        crate::hypergraph::ncut_value(b, vs, vc).ok()
    })
}

/// Exact graph normalized-cut optimum, same conventions as
/// [`brute_force_ncut`].
pub fn brute_force_graph_ncut(g: &ProjectedGraph) -> Result<(CutSelection, f64)> {
    brute_force_min(g.n(), Execution::default(), |mem| g.ncut(mem).ok())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityReport {
    /// Least `Vol_{G_e}(∂S) / w_e(S)` over classes with positive cost.
    pub min_ratio: f64,
    pub max_ratio: f64,
    /// Classes (local masks) with zero cost but nonzero cut volume.
    pub violations: Vec<u64>,
}

/// Exhaustive sandwich ratios of a projection over the defined classes of
/// `cost`. With no positive class both ratios are 1.
pub fn feasibility_ratio(cost: &CutCost, proj: &EdgeProjection) -> Result<FeasibilityReport> {
    let d = cost.arity();
    if d > MAX_AUDIT_ARITY {
        return Err(Error::ArityTooLarge {
            arity: d,
            limit: MAX_AUDIT_ARITY,
        });
    }
    if proj.arity() != d {
        return Err(Error::ArityMismatch {
            edge: 0,
            expected: d,
            found: proj.arity(),
        });
    }
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    let mut violations = Vec::new();
    for (mask, w) in cost.defined_classes() {
        let vol = proj.cut_volume(mask);
        if w > 0.0 {
            let r = vol / w;
            lo = lo.min(r);
            hi = hi.max(r);
        } else if vol.abs() > 1e-9 {
            violations.push(mask);
        }
    }
    if lo > hi {
        (lo, hi) = (1.0, 1.0);
    }
    Ok(FeasibilityReport {
        min_ratio: lo,
        max_ratio: hi,
        violations,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Theorem1Report {
    /// Exact hypergraph optimum.
    pub alpha_h: f64,
    /// Hypergraph objective of the spectral output.
    pub alpha_star: f64,
    pub beta_star: f64,
    pub lambda2: f64,
    /// Graph objective of the spectral output.
    pub graph_ncut: f64,
    /// `α* >= α_H`.
    pub optimality_holds: bool,
    /// `(β*)³ α_H >= (α*)² / 8`.
    pub approximation_holds: bool,
    /// `(α_G)²/8 <= λ2 <= α_G` on the projected graph.
    pub cheeger_holds: bool,
}

const AUDIT_TOL: f64 = 1e-9;

/// Runs the pipeline against the exhaustive optimum and checks the
/// approximation chain. Refused when clipping or unknown β voids the
/// certificate.
pub fn theorem1_audit(h: &Hypergraph, method: ProjectionMethod) -> Result<Theorem1Report> {
    if h.n() > 12 {
        return Err(Error::InvalidArgument("audit limited to 12 vertices".into()));
    }
    let options = PipelineOptions {
        method,
        clip: true,
        exec: Execution::Sequential,
        ..PipelineOptions::default()
    };
    let projections = project_all(h, options.method, options.exec)?;
    let g = merge(h, &projections, true)?;
    if g.clipped() > 0 {
        return Err(Error::AuditRefused(format!(
            "{} merged weights were clipped",
            g.clipped()
        )));
    }
    let beta_star = g
        .beta_star()
        .ok_or_else(|| Error::AuditRefused("a hyperedge has no certified approximation constant".into()))?;
    let p = partition_graph(&g)?;
    if !p.excluded.is_empty() {
        return Err(Error::AuditRefused("projected graph has isolated vertices".into()));
    }
    let alpha_star = h.ncut(&p.side())?;
    let (_, alpha_h) = brute_force_ncut_with(h, Execution::Sequential)?;
    let lambda2 = p.lambda2.unwrap_or(0.0);
    let tol = |x: f64| AUDIT_TOL * x.abs().max(1.0);
    Ok(Theorem1Report {
        alpha_h,
        alpha_star,
        beta_star,
        lambda2,
        graph_ncut: p.graph_ncut,
        optimality_holds: alpha_star >= alpha_h - tol(alpha_h),
        approximation_holds: beta_star.powi(3) * alpha_h >= alpha_star * alpha_star / 8.0 - tol(alpha_star),
        cheeger_holds: lambda2 <= p.graph_ncut + tol(p.graph_ncut)
            && lambda2 >= p.graph_ncut * p.graph_ncut / 8.0 - tol(lambda2),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table1Report {
    pub arity: usize,
    pub trials: usize,
    pub seed: u64,
    /// Certified constant, if known for this arity.
    pub beta: Option<f64>,
    pub min_weight: f64,
    pub min_ratio: f64,
    pub max_ratio: f64,
    pub zero_class_violations: usize,
    pub passed: bool,
}

/// Linear-map projection of `trials` random submodular costs, audited
/// exhaustively.
pub fn table1_audit(arity: usize, trials: usize, seed: u64, exec: Execution) -> Result<Table1Report> {
    let gen = SubmodularGenerator::new(arity, seed);
    let results = map_range(exec, trials, |i| -> Result<(f64, FeasibilityReport)> {
        let cost = gen.sample(i as u64)?.cost;
        let proj = project_submodular(&cost)?;
        let min_w = proj.pair_weights().iter().fold(f64::INFINITY, |a, &b| a.min(b));
        Ok((min_w, feasibility_ratio(&cost, &proj)?))
    });
    let (mut min_weight, mut lo, mut hi, mut zero) = (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, 0);
    for r in results {
        let (w, rep) = r?;
        min_weight = min_weight.min(w);
        lo = lo.min(rep.min_ratio);
        hi = hi.max(rep.max_ratio);
        zero += rep.violations.len();
    }
    let beta = table1_beta(arity);
    let passed = min_weight >= -1e-12 && lo >= 1.0 - AUDIT_TOL && zero == 0 && beta.is_none_or(|b| hi <= b + AUDIT_TOL);
    Ok(Table1Report {
        arity,
        trials,
        seed,
        beta,
        min_weight,
        min_ratio: lo,
        max_ratio: hi,
        zero_class_violations: zero,
        passed,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Theorem4Report {
    pub arity: usize,
    pub trials: usize,
    pub seed: u64,
    pub factor: f64,
    /// Largest `|w* - c·w| / max(|c·w|, 1e-300)` over all entries.
    pub max_relative_error: f64,
    pub passed: bool,
}

/// Linear map applied to latent-graph cut costs, compared with the scaled
/// latent weights.
pub fn theorem4_audit(arity: usize, trials: usize, seed: u64, exec: Execution) -> Result<Theorem4Report> {
    let gen = SubmodularGenerator::latent_only(arity, seed);
    let factor = consistency_factor(arity);
    let errs = map_range(exec, trials, |i| -> Result<f64> {
        let sample = gen.sample(i as u64)?;
        let proj = project_submodular(&sample.cost)?;
        Ok(proj
            .pair_weights()
            .iter()
            .zip(&sample.latent_weights)
            .map(|(w, l)| (w - factor * l).abs() / (factor * l).abs().max(1e-300))
            .fold(0.0, f64::max))
    });
    let mut max_err = 0.0f64;
    for e in errs {
        max_err = max_err.max(e?);
    }
    Ok(Theorem4Report {
        arity,
        trials,
        seed,
        factor,
        max_relative_error: max_err,
        passed: max_err <= 1e-9,
    })
}

/// Sandwich of whole-graph cut and volume functions against the hypergraph:
/// returns the largest `Vol_G / Vol_H` and smallest such ratio over all cuts,
/// exhaustively.
pub fn graph_sandwich(h: &Hypergraph, g: &ProjectedGraph) -> Result<(f64, f64)> {
    let n = h.n();
    if n > MAX_BRUTE_FORCE {
        return Err(Error::InvalidArgument("graph sandwich limited to 20 vertices".into()));
    }
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for m in 0u64..(1u64 << (n - 1)) - 1 {
        let mem: Vec<bool> = (0..n).map(|v| v == 0 || (m >> (v - 1)) & 1 == 1).collect();
        let hv = h.boundary_from_membership(&mem)?;
        let gv = g.cut_volume(&mem);
        if hv > 0.0 {
            lo = lo.min(gv / hv);
            hi = hi.max(gv / hv);
        } else if gv.abs() > 1e-9 {
            hi = f64::INFINITY;
        }
    }
    Ok((lo, hi))
}

/// Exhaustive check that every class value of a table is reproduced by the
/// cut function of `proj` up to factor `β`.
pub fn sandwich_holds(cost: &CutCost, proj: &EdgeProjection, beta: f64) -> bool {
    class_masks(cost.arity()).all(|m| match cost.eval_mask(m) {
        Some(w) => {
            let vol = proj.cut_volume(m);
            vol >= w - 1e-9 && vol <= beta * w + 1e-9
        }
        None => true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph_hypergraph(n: usize, edges: &[(usize, usize, f64)]) -> Hypergraph {
        Hypergraph::from_parts(
            n,
            edges
                .iter()
                .map(|&(u, v, w)| (vec![u, v], CutCost::singleton(vec![w, w]).unwrap())),
        )
        .unwrap()
    }

    #[test]
    fn brute_force_examples() {
        let tri = graph_hypergraph(3, &[(0, 1, 1.0), (0, 2, 1.0), (1, 2, 1.0)]);
        let (s, v) = brute_force_ncut(&tri).unwrap();
        assert!((v - 1.5).abs() < 1e-12);
        assert_eq!(s.vertices(), &[0]);
        let path = graph_hypergraph(3, &[(0, 1, 1.0), (1, 2, 1.0)]);
        assert!((brute_force_ncut(&path).unwrap().1 - 4.0 / 3.0).abs() < 1e-12);
        let two = graph_hypergraph(4, &[(0, 1, 1.0), (2, 3, 1.0)]);
        let (s, v) = brute_force_ncut(&two).unwrap();
        assert_eq!(v, 0.0);
        assert_eq!(s.vertices(), &[0, 1]);
        assert_eq!(two.ncut(&s).unwrap(), v);
    }

    #[test]
    fn generator_samples_are_submodular_and_reproducible() {
        for d in 2..=7 {
            let gen = SubmodularGenerator::new(d, 3);
            let a = gen.sample(5).unwrap();
            assert_eq!(a, gen.sample(5).unwrap());
            assert!(a.cost.is_submodular().unwrap());
        }
        let zero = SubmodularGenerator {
            latent: 0.0,
            concave: 0.0,
            ..SubmodularGenerator::new(4, 0)
        };
        let c = random_submodular(&zero).unwrap();
        assert!(c.class_values().unwrap().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn concave_only_is_zhou_shaped() {
        let c = random_submodular(&SubmodularGenerator::concave_only(5, 1)).unwrap();
        let v1 = c.eval_mask(0b1).unwrap();
        assert_eq!(v1, c.eval_mask(0b10000).unwrap());
        assert!(c.eval_mask(0b11).unwrap() >= v1);
    }

    #[test]
    fn benson_ratios() {
        let cost = CutCost::benson(4, 1.0).unwrap();
        let proj = crate::project::project_homogeneous(&cost).unwrap();
        let rep = feasibility_ratio(&cost, &proj).unwrap();
        assert!((rep.min_ratio - 1.0).abs() < 1e-12);
        assert!((rep.max_ratio - 4.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn singleton_ratios_are_exact() {
        let cost = CutCost::singleton(vec![0.4, 1.3, 0.9, 2.0, 1.1]).unwrap();
        let proj = crate::project::project_singleton(&cost).unwrap();
        let rep = feasibility_ratio(&cost, &proj).unwrap();
        assert!((rep.min_ratio - 1.0).abs() < 1e-12 && (rep.max_ratio - 1.0).abs() < 1e-12);
    }

    #[test]
    fn small_audits_pass() {
        for d in 2..=7 {
            assert!(table1_audit(d, 20, 9, Execution::Sequential).unwrap().passed, "δ={d}");
        }
        for d in 3..=7 {
            assert!(theorem4_audit(d, 10, 9, Execution::Sequential).unwrap().passed, "δ={d}");
        }
    }

    #[test]
    fn theorem1_refuses_clipped_input() {
        let h = Hypergraph::from_parts(
            3,
            vec![(vec![0, 1, 2], CutCost::singleton(vec![0.0, 0.0, 1.0]).unwrap())],
        )
        .unwrap();
        assert!(matches!(
            theorem1_audit(&h, ProjectionMethod::Auto),
            Err(Error::AuditRefused(_))
        ));
    }

    #[test]
    fn theorem1_on_graph() {
        let h = graph_hypergraph(4, &[(0, 1, 1.0), (1, 2, 0.2), (2, 3, 1.0), (0, 3, 0.3)]);
        let r = theorem1_audit(&h, ProjectionMethod::Auto).unwrap();
        assert_eq!(r.beta_star, 1.0);
        assert!(r.optimality_holds && r.approximation_holds && r.cheeger_holds);
    }
}
