//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any criterion fails.

use std::collections::BTreeSet;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use inhclust::apps::rank::{generate_riffled, learn_riffled_partition};
use inhclust::apps::subspace::{generate_klines, segment, SubspaceConfig};
use inhclust::minimax::{beta_lower_bound, extremal_families};
use inhclust::oracle::SubmodularGenerator;
use inhclust::project::{
    merge, pair_index, project_all, project_cost, project_lp, project_singleton, project_submodular, EdgeProjection,
    LpProjection,
};
use inhclust::spectral::{partition_graph, PipelineOptions};
use inhclust::{CutCost, CutSelection, Execution, Hyperedge, Hypergraph, ProjectionMethod};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

/// Graph cut volume of local subset `mask`, summed pair by pair.
fn local_cut(p: &EdgeProjection, mask: u64) -> f64 {
    let d = p.arity();
    let mut total = 0.0;
    for a in 0..d {
        for b in (a + 1)..d {
            if (mask >> a & 1) != (mask >> b & 1) {
                total += p.pair_weights()[pair_index(a, b, d)];
            }
        }
    }
    total
}

/// Smallest and largest `cut_G(S) / w(S)` over every proper subset with a
/// positive cost; `None` when a zero-cost subset has a nonzero graph cut.
fn sandwich(cost: &CutCost, p: &EdgeProjection) -> Option<(f64, f64)> {
    let d = cost.arity();
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for mask in 1..(1u64 << d) - 1 {
        let w = cost.eval_mask(mask).expect("fully specified");
        let g = local_cut(p, mask);
        if w > 0.0 {
            lo = lo.min(g / w);
            hi = hi.max(g / w);
        } else if g.abs() > 1e-9 {
            return None;
        }
    }
    Some((lo, hi))
}

fn criterion1() -> Outcome {
    let start = Instant::now();
    let ex1 = CutCost::singleton(vec![0.0, 0.0, 1.0]).unwrap();
    let p = project_singleton(&ex1).unwrap();
    let w = p.pair_weights();
    let projection_ok =
        p.beta() == Some(1.0) && close(w[0], -0.5, 1e-9) && close(w[1], 0.5, 1e-9) && close(w[2], 0.5, 1e-9);
    let h = Hypergraph::new(3, vec![Hyperedge::new(vec![0, 1, 2], ex1.clone()).unwrap()]).unwrap();
    let g = merge(&h, &[p], true).unwrap();
    let merge_ok =
        close(g.weight(0, 1), 0.0, 1e-9) && close(g.weight(0, 2), 0.5, 1e-9) && close(g.weight(1, 2), 0.5, 1e-9);
    let ex3 = CutCost::singleton(vec![1.0 / 3.0, 1.0 / 3.0, 1.0, 1.0]).unwrap();
    let w12 = project_singleton(&ex3).unwrap().weight(0, 1);
    let ex3_ok = close(w12, -1.0 / 9.0, 1e-9);
    let ex2 = CutCost::from_fn(4, |m| if m == 0b1001 || m == 0b0110 { 1.0 } else { 0.0 }).unwrap();
    let ex2_ok = project_lp(&ex2, false).unwrap() == LpProjection::Infeasible;
    let ex1_nonneg_ok = project_lp(&ex1, true).unwrap() == LpProjection::Infeasible;
    let elapsed = start.elapsed();
    outcome(
        projection_ok && merge_ok && ex3_ok && ex2_ok && ex1_nonneg_ok && elapsed < Duration::from_secs(1),
        format!(
            "example1 projection {projection_ok}, clipped merge {merge_ok}, example3 w12 = {w12:.12}, \
             example2 infeasible {ex2_ok}, nonneg example1 infeasible {ex1_nonneg_ok}, {elapsed:.2?}"
        ),
    )
}

fn criterion2() -> Outcome {
    let start = Instant::now();
    let betas = [1.0, 1.0, 1.5, 2.0, 4.0, 6.0];
    let mut ok = true;
    let mut parts = Vec::new();
    for (d, beta) in (2..=7).zip(betas) {
        let gen = SubmodularGenerator::new(d, 2024 + d as u64);
        let (mut min_w, mut lo, mut hi) = (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY);
        let mut zero_violations = 0;
        for i in 0..1000 {
            let cost = gen.sample(i).unwrap().cost;
            let p = project_submodular(&cost).unwrap();
            min_w = p.pair_weights().iter().copied().fold(min_w, f64::min);
            match sandwich(&cost, &p) {
                Some((l, h)) => {
                    lo = lo.min(l);
                    hi = hi.max(h);
                }
                None => zero_violations += 1,
            }
        }
        let pass = min_w >= -1e-12 && lo >= 1.0 - 1e-9 && hi <= beta + 1e-9 && zero_violations == 0;
        ok &= pass;
        parts.push(format!("d={d} ratios [{lo:.4}, {hi:.4}] <= {beta}"));
    }
    let elapsed = start.elapsed();
    outcome(
        ok && elapsed < Duration::from_secs(60),
        format!("{}, {elapsed:.2?}", parts.join("; ")),
    )
}

fn criterion3() -> Outcome {
    let mut worst = 0.0f64;
    for d in 3..=7 {
        let gen = SubmodularGenerator::latent_only(d, 77 + d as u64);
        let factor = (2f64.powi(d as i32) - 2.0) / (d * (d - 1)) as f64;
        for i in 0..200 {
            let s = gen.sample(i).unwrap();
            let p = project_submodular(&s.cost).unwrap();
            for (w, l) in p.pair_weights().iter().zip(&s.latent_weights) {
                worst = worst.max((w - factor * l).abs() / (factor * l).abs());
            }
        }
    }
    outcome(worst <= 1e-9, format!("max relative error {worst:.3e}"))
}

fn criterion4() -> Outcome {
    let start = Instant::now();
    let mut ok = true;
    let mut parts = Vec::new();
    for (d, expected) in [(4, 1.5), (5, 2.0), (6, 4.0)] {
        let families = extremal_families(d).unwrap();
        let beta = beta_lower_bound(d, &families).unwrap().beta;
        ok &= close(beta, expected, 1e-6);
        parts.push(format!("d={d} beta {beta:.9}"));
    }
    let elapsed = start.elapsed();
    outcome(
        ok && elapsed < Duration::from_secs(60),
        format!("{}, {elapsed:.2?}", parts.join("; ")),
    )
}

fn random_hypergraph(rng: &mut ChaCha8Rng, index: u64) -> Hypergraph {
    let n = rng.random_range(4..=10usize);
    let mut covered = vec![false; n];
    let mut edges = Vec::new();
    let mut e = 0u64;
    while edges.len() < 3 || covered.iter().any(|c| !c) {
        let d = rng.random_range(2..=5usize.min(n));
        let vs: Vec<usize> = rand::seq::index::sample(rng, n, d).into_vec();
        vs.iter().for_each(|&v| covered[v] = true);
        let cost = SubmodularGenerator::new(d, index).sample(e).unwrap().cost;
        edges.push(Hyperedge::new(vs, cost).unwrap());
        e += 1;
    }
    Hypergraph::new(n, edges).unwrap()
}

fn exhaustive_ncut(h: &Hypergraph) -> f64 {
    let n = h.n();
    (0u64..(1 << (n - 1)) - 1)
        .filter_map(|m| {
            let s: CutSelection = (0..n).filter(|&v| v == 0 || m >> (v - 1) & 1 == 1).collect();
            h.ncut(&s).ok()
        })
        .fold(f64::INFINITY, f64::min)
}

fn exhaustive_graph_ncut(g: &inhclust::ProjectedGraph) -> f64 {
    let n = g.n();
    (0u64..(1 << (n - 1)) - 1)
        .filter_map(|m| {
            let mem: Vec<bool> = (0..n).map(|v| v == 0 || m >> (v - 1) & 1 == 1).collect();
            g.ncut(&mem).ok()
        })
        .fold(f64::INFINITY, f64::min)
}

fn criterion5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (mut checked, mut skipped, mut failures) = (0, 0, Vec::new());
    let options = PipelineOptions {
        method: ProjectionMethod::Submodular,
        exec: Execution::Sequential,
        ..PipelineOptions::default()
    };
    let mut index = 0u64;
    while checked < 200 {
        index += 1;
        let h = random_hypergraph(&mut rng, index);
        let projections = project_all(&h, options.method, options.exec).unwrap();
        let g = merge(&h, &projections, false).unwrap();
        if g.edges().any(|(_, _, w)| w < 0.0) || g.beta_star().is_none() {
            skipped += 1;
            continue;
        }
        let p = partition_graph(&g).unwrap();
        if !p.excluded.is_empty() {
            skipped += 1;
            continue;
        }
        let beta = g.beta_star().unwrap();
        let alpha_h = exhaustive_ncut(&h);
        let alpha_star = h.ncut(&p.side()).unwrap();
        let lambda2 = p.lambda2.unwrap();
        let alpha_g = exhaustive_graph_ncut(&g);
        let sweep = p.graph_ncut;
        let tol = 1e-9;
        let holds = alpha_star >= alpha_h - tol
            && beta.powi(3) * alpha_h >= alpha_star * alpha_star / 8.0 - tol
            && alpha_g >= lambda2 - tol
            && lambda2 >= sweep * sweep / 8.0 - tol;
        if !holds {
            failures.push(format!(
                "#{index}: alpha_h {alpha_h:.4} alpha* {alpha_star:.4} beta* {beta} \
                 alpha_g {alpha_g:.4} sweep {sweep:.4} lambda2 {lambda2:.4}"
            ));
        }
        checked += 1;
    }
    outcome(
        failures.is_empty(),
        format!(
            "{checked} hypergraphs, {skipped} skipped for clipping or isolated vertices, {} violations{}",
            failures.len(),
            failures.first().map(|f| format!(" (first {f})")).unwrap_or_default()
        ),
    )
}

fn criterion6() -> Outcome {
    let w_h = 1.7;
    let mut ok = true;
    for d in 3..=7 {
        let zhou = CutCost::zhou(d, w_h).unwrap();
        let pz = project_cost(&zhou, ProjectionMethod::Auto).unwrap();
        ok &= pz.beta() == Some(1.0) && pz.pair_weights().iter().all(|&w| close(w, w_h / d as f64, 1e-12));
        ok &= sandwich(&zhou, &pz).is_some_and(|(lo, hi)| close(lo, 1.0, 1e-12) && close(hi, 1.0, 1e-12));
        let benson = CutCost::benson(d, w_h).unwrap();
        let pb = project_cost(&benson, ProjectionMethod::Auto).unwrap();
        let expected = (d * d / 4) as f64 / (d - 1) as f64;
        ok &= pb.pair_weights().iter().all(|&w| close(w, w_h / (d - 1) as f64, 1e-12));
        ok &= sandwich(&benson, &pb).is_some_and(|(lo, hi)| close(lo, 1.0, 1e-12) && close(hi, expected, 1e-12));
        ok &= pb.beta().is_some_and(|b| close(b, expected, 1e-12));
    }
    outcome(ok, "zhou and benson costs for d = 3..7")
}

fn riffle_recovery(rate: f64) -> usize {
    let truth: BTreeSet<BTreeSet<usize>> = [(0..4).collect(), (4..8).collect()].into();
    (0..20u64)
        .filter(|&trial| {
            let d = generate_riffled(8, 4, 5000, trial).unwrap();
            let split = learn_riffled_partition(&d, rate, trial, Execution::Parallel).unwrap();
            let found: BTreeSet<BTreeSet<usize>> = split
                .partition
                .clusters()
                .into_iter()
                .map(|c| c.into_iter().collect())
                .collect();
            found == truth
        })
        .count()
}

fn criterion7() -> Outcome {
    let start = Instant::now();
    let full = riffle_recovery(1.0);
    let sparse = riffle_recovery(0.3);
    let elapsed = start.elapsed();
    outcome(
        full >= 18 && sparse >= 14 && elapsed < Duration::from_secs(120),
        format!("r=1 recovered {full}/20, r=0.3 recovered {sparse}/20, {elapsed:.2?}"),
    )
}

fn criterion8() -> Outcome {
    let start = Instant::now();
    let rates: Vec<f64> = (0..20u64)
        .map(|trial| {
            let pc = generate_klines(2, 40, 0.005, trial).unwrap();
            let cfg = SubspaceConfig::new(1, 400, trial);
            segment(&pc, &cfg, 2, Execution::Parallel).unwrap().error_rate.unwrap()
        })
        .collect();
    let mean = rates.iter().sum::<f64>() / rates.len() as f64;
    let elapsed = start.elapsed();
    outcome(
        mean < 5.0 && elapsed < Duration::from_secs(60),
        format!("mean misclassification {mean:.2}%, {elapsed:.2?}"),
    )
}

fn run_cli(args: &[&str], threads: &str) -> Result<Vec<u8>, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_inhclust"))
        .args(args)
        .env("INHCLUST_THREADS", threads)
        .output()
        .map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(String::from_utf8_lossy(&out.stderr).into_owned());
    }
    Ok(out.stdout)
}

fn write_inputs(dir: &Path) -> std::io::Result<()> {
    let rankings = generate_riffled(6, 3, 400, 11).unwrap();
    let text: String = rankings
        .orders()
        .iter()
        .map(|o| o.iter().map(usize::to_string).collect::<Vec<_>>().join(",") + "\n")
        .collect();
    std::fs::write(dir.join("rankings.txt"), text)?;
    let pc = generate_klines(3, 20, 0.01, 12).unwrap();
    let text: String = pc
        .points
        .iter()
        .zip(pc.labels.as_ref().unwrap())
        .map(|(p, l)| {
            format!(
                "{} | {l}\n",
                p.iter().map(|x| format!("{x:.17e}")).collect::<Vec<_>>().join(",")
            )
        })
        .collect();
    std::fs::write(dir.join("points.txt"), text)?;
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let h = random_hypergraph(&mut rng, 13);
    std::fs::write(
        dir.join("hypergraph.json"),
        serde_json::to_string(&h.to_json()).unwrap(),
    )
}

fn criterion9() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    write_inputs(dir.path()).unwrap();
    let p = |f: &str| dir.path().join(f).to_string_lossy().into_owned();
    let (hg, rk, pts) = (p("hypergraph.json"), p("rankings.txt"), p("points.txt"));
    let runs: Vec<Vec<&str>> = vec![
        vec!["kpartition", "--input", &hg, "--k", "3", "--seed", "4"],
        vec!["ranklearn", "--input", &rk, "--rate", "0.5", "--seed", "4"],
        vec!["subspace", "--input", &pts, "--k", "3", "--seed", "4"],
        vec!["audit", "table1", "--arity", "5", "--trials", "200", "--seed", "4"],
        vec!["audit", "theorem4", "--arity", "5", "--trials", "50", "--seed", "4"],
    ];
    let mut mismatches = Vec::new();
    for args in &runs {
        let results: Vec<Result<Vec<u8>, String>> = ["1", "1", "4"].iter().map(|t| run_cli(args, t)).collect();
        match &results[..] {
            [Ok(a), Ok(b), Ok(c)] if a == b && b == c => {}
            [Err(e), ..] => mismatches.push(format!("{} failed: {}", args[0], e.trim())),
            _ => mismatches.push(format!("{} output differs", args.join(" "))),
        }
    }
    outcome(
        mismatches.is_empty(),
        if mismatches.is_empty() {
            format!(
                "{} stochastic commands byte-identical across repeats and thread counts",
                runs.len()
            )
        } else {
            mismatches.join("; ")
        },
    )
}

type Criterion = (u32, &'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 9] = [
        (1, "worked examples", criterion1),
        (2, "table constants", criterion2),
        (3, "latent-graph consistency", criterion3),
        (4, "minimax lower bounds", criterion4),
        (5, "approximation and Cheeger chains", criterion5),
        (6, "homogeneous reductions", criterion6),
        (7, "riffled independence recovery", criterion7),
        (8, "k-lines segmentation", criterion8),
        (9, "determinism", criterion9),
    ];
    let mut failed = Vec::new();
    for (id, name, check) in criteria {
        let o = check();
        println!(
            "criterion {id} ({name}): {} | {}",
            if o.passed { "PASS" } else { "FAIL" },
            o.detail
        );
        if !o.passed {
            failed.push(id);
        }
    }
    if !failed.is_empty() {
        println!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
