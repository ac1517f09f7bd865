use std::collections::BTreeSet;

use inhclust::apps::motif::{
    build_motif_hypergraph, enumerate_fan_motifs, hierarchical_partition, DiGraph, HierarchyOptions, MotifCostSpec,
};
use inhclust::apps::rank::{
    all_triples, estimate_triple_mi, generate_riffled, learn_riffled_partition, RankingDataset,
};
use inhclust::apps::subspace::{
    build_subspace_hypergraph, generate_klines, inh_deviation, segment, PointCloud, SubspaceConfig,
};
use inhclust::Execution;
use proptest::prelude::*;

fn permutation(n: usize) -> impl Strategy<Value = Vec<usize>> {
    Just((0..n).collect::<Vec<_>>()).prop_shuffle()
}

fn dataset(n: usize, m: usize) -> impl Strategy<Value = RankingDataset> {
    proptest::collection::vec(permutation(n), m)
        .prop_map(move |orders| RankingDataset::from_orders(n, &orders).unwrap())
}

#[test]
fn mi_of_two_reversed_rankings_is_one_bit() {
    let d = RankingDataset::from_orders(3, &[vec![0, 1, 2], vec![2, 1, 0]]).unwrap();
    assert!((estimate_triple_mi(&d, 0, 1, 2).unwrap().value - 1.0).abs() < 1e-12);
}

#[test]
fn riffled_data_separates_cross_and_within_information() {
    let inside = |a: usize| a < 4;
    let (mut cross, mut within) = (Vec::new(), Vec::new());
    for trial in 0..20 {
        let d = generate_riffled(8, 4, 5000, trial).unwrap();
        for [a, b, c] in all_triples(8) {
            for (i, j, k) in [(a, b, c), (b, a, c), (c, a, b)] {
                let v = estimate_triple_mi(&d, i, j, k).unwrap().value;
                if inside(i) != inside(j) && inside(j) == inside(k) {
                    cross.push(v);
                } else if inside(i) == inside(j) && inside(j) == inside(k) {
                    within.push(v);
                }
            }
        }
    }
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    assert!(
        mean(&cross) < mean(&within) / 5.0,
        "cross {} within {}",
        mean(&cross),
        mean(&within)
    );
}

#[test]
fn cross_set_information_stays_at_estimator_bias() {
    let inside = |a: usize| a < 4;
    let bias = 7.0 / (2.0 * 5000.0 * std::f64::consts::LN_2);
    let mut cross = Vec::new();
    for trial in 0..20 {
        let d = generate_riffled(8, 4, 5000, trial).unwrap();
        for [a, b, c] in all_triples(8) {
            for (i, j, k) in [(a, b, c), (b, a, c), (c, a, b)] {
                if inside(i) != inside(j) && inside(j) == inside(k) {
                    cross.push(estimate_triple_mi(&d, i, j, k).unwrap().value);
                }
            }
        }
    }
    let mean = cross.iter().sum::<f64>() / cross.len() as f64;
    assert!(mean <= 1.5 * bias, "cross {mean} bias {bias}");
}

#[test]
fn three_candidates_split_off_least_informative() {
    let d = generate_riffled(3, 1, 300, 9).unwrap();
    let mi: Vec<f64> = [(0, 1, 2), (1, 0, 2), (2, 0, 1)]
        .iter()
        .map(|&(i, j, k)| estimate_triple_mi(&d, i, j, k).unwrap().value)
        .collect();
    let lone = (0..3).min_by(|&a, &b| mi[a].total_cmp(&mi[b])).unwrap();
    let split = learn_riffled_partition(&d, 1.0, 0, Execution::Sequential).unwrap();
    assert!(split.partition.clusters().contains(&vec![lone]));
}

fn line_distance(p: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
    (dy * (p[0] - a[0]) - dx * (p[1] - a[1])).abs() / dx.hypot(dy)
}

#[test]
fn lone_point_on_orthogonal_line_gets_smallest_weight() {
    let (a, b, c) = ([1.0, 0.0], [2.0, 0.0], [0.0, 1.5]);
    let pts: Vec<Vec<f64>> = [a, b, c].iter().map(|p| vec![p[0], p[1], 0.0]).collect();
    let expected = [line_distance(a, b, c), line_distance(b, a, c), line_distance(c, a, b)];
    for (v, e) in expected.iter().enumerate() {
        assert!((inh_deviation(&pts, v, 1).unwrap() - e).abs() < 1e-12);
    }
    let pc = PointCloud::new(pts, None).unwrap();
    let sh = build_subspace_hypergraph(&pc, &SubspaceConfig::new(1, 1, 0), Execution::Sequential).unwrap();
    let w = sh.hypergraph.edges()[0].cost().singleton_values().unwrap();
    let order: Vec<usize> = sh.hypergraph.edges()[0].vertices().to_vec();
    let lone = order.iter().position(|&v| v == 2).unwrap();
    assert!((0..3).filter(|&i| i != lone).all(|i| w[lone] < w[i]));
}

#[test]
fn two_lines_segment_with_low_error() {
    let good = (0..20u64)
        .filter(|&seed| {
            let pc = generate_klines(2, 40, 0.01, seed).unwrap();
            let r = segment(&pc, &SubspaceConfig::new(1, 400, seed), 2, Execution::Sequential).unwrap();
            r.error_rate.unwrap() < 5.0
        })
        .count();
    assert!(good >= 18, "{good}/20 trials below 5%");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn mi_is_bounded(d in (3usize..=7).prop_flat_map(|n| dataset(n, 30))) {
        for [i, j, k] in all_triples(d.n()) {
            let v = estimate_triple_mi(&d, i, j, k).unwrap().value;
            prop_assert!(v >= 0.0 && v <= (d.n() as f64).log2() + 1e-12);
        }
    }

    #[test]
    fn mi_is_relabeling_invariant((d, pi) in (3usize..=7).prop_flat_map(|n| (dataset(n, 25), permutation(n)))) {
        let n = d.n();
        let relabeled: Vec<Vec<usize>> = d.orders().iter().map(|o| o.iter().map(|&a| pi[a]).collect()).collect();
        let e = RankingDataset::from_orders(n, &relabeled).unwrap();
        for [i, j, k] in all_triples(n) {
            let a = estimate_triple_mi(&d, i, j, k).unwrap().value;
            let b = estimate_triple_mi(&e, pi[i], pi[j], pi[k]).unwrap().value;
            prop_assert!((a - b).abs() <= 1e-12);
        }
    }

    #[test]
    fn riffle_split_ignores_ranking_order(seed in 0u64..1000, rate in 0.3f64..=1.0) {
        let d = generate_riffled(6, 3, 200, seed).unwrap();
        let mut orders = d.orders();
        orders.reverse();
        let e = RankingDataset::from_orders(6, &orders).unwrap();
        let a = learn_riffled_partition(&d, rate, seed, Execution::Sequential).unwrap();
        let b = learn_riffled_partition(&e, rate, seed, Execution::Sequential).unwrap();
        prop_assert_eq!(a.partition.assignment, b.partition.assignment);
    }

    #[test]
    fn deviation_is_rigid_motion_invariant(
        pts in proptest::collection::vec(proptest::collection::vec(-2.0f64..2.0, 3), 3..=5),
        q in proptest::collection::vec(-1.0f64..1.0, 4),
        t in proptest::collection::vec(-5.0f64..5.0, 3),
    ) {
        let norm = q.iter().map(|x| x * x).sum::<f64>().sqrt();
        prop_assume!(norm > 0.1);
        let (w, x, y, z) = (q[0] / norm, q[1] / norm, q[2] / norm, q[3] / norm);
        let r = [
            [1.0 - 2.0 * (y * y + z * z), 2.0 * (x * y - w * z), 2.0 * (x * z + w * y)],
            [2.0 * (x * y + w * z), 1.0 - 2.0 * (x * x + z * z), 2.0 * (y * z - w * x)],
            [2.0 * (x * z - w * y), 2.0 * (y * z + w * x), 1.0 - 2.0 * (x * x + y * y)],
        ];
        let moved: Vec<Vec<f64>> = pts
            .iter()
            .map(|p| (0..3).map(|i| (0..3).map(|j| r[i][j] * p[j]).sum::<f64>() + t[i]).collect())
            .collect();
        let p = pts.len() - 2;
        for v in 0..pts.len() {
            let a = inh_deviation(&pts, v, p).unwrap();
            let b = inh_deviation(&moved, v, p).unwrap();
            prop_assert!((a - b).abs() <= 1e-8);
        }
    }

    #[test]
    fn subspace_weights_lie_in_unit_interval(
        pts in proptest::collection::vec(proptest::collection::vec(-1.0f64..1.0, 3), 6..=15),
        seed in any::<u64>(),
    ) {
        let pc = PointCloud::new(pts, None).unwrap();
        let sh = build_subspace_hypergraph(&pc, &SubspaceConfig::new(1, 40, seed), Execution::Sequential).unwrap();
        for (e, dev) in sh.hypergraph.edges().iter().zip(&sh.deviations) {
            for (w, d) in e.cost().singleton_values().unwrap().iter().zip(dev) {
                prop_assert!(*w > 0.0 && *w <= 1.0);
                prop_assert_eq!(*w == 1.0, *d == 0.0);
            }
        }
    }

    #[test]
    fn motif_enumeration_is_orientation_sound(
        n in 4usize..=9,
        raw in proptest::collection::vec((0usize..9, 0usize..9), 4..30),
        strict in any::<bool>(),
    ) {
        let edges: BTreeSet<(usize, usize)> = raw.into_iter().map(|(u, v)| (u % n, v % n)).filter(|(u, v)| u != v).collect();
        let g = DiGraph::new(n, edges).unwrap();
        let fwd = enumerate_fan_motifs(&g, strict, Execution::Sequential);
        let r = g.reversed();
        for m in &fwd {
            for p in [m.producers.0, m.producers.1] {
                for c in [m.consumers.0, m.consumers.1] {
                    prop_assert!(g.has_edge(p, c));
                    prop_assert!(r.has_edge(c, p));
                }
            }
        }
    }

    #[test]
    fn hierarchy_leaves_partition_vertices(
        n in 4usize..=14,
        raw in proptest::collection::vec((0usize..14, 0usize..14), 4..50),
    ) {
        let edges: BTreeSet<(usize, usize)> = raw.into_iter().map(|(u, v)| (u % n, v % n)).filter(|(u, v)| u != v).collect();
        let g = DiGraph::new(n, edges).unwrap();
        let tree = hierarchical_partition(&g, &HierarchyOptions { exec: Execution::Sequential, ..HierarchyOptions::default() }).unwrap();
        let mut seen: Vec<usize> = tree.leaves().iter().flat_map(|l| l.cluster.iter().copied()).collect();
        seen.sort_unstable();
        prop_assert_eq!(seen, (0..n).collect::<Vec<_>>());
        let mh = build_motif_hypergraph(&g, &MotifCostSpec::default(), true, Execution::Sequential).unwrap();
        for e in mh.hypergraph.edges() {
            prop_assert!(e.cost().is_submodular().unwrap());
        }
    }
}
