use inhclust::lp::{solve_lp, LpInstance, LpStatus, Relation};
use proptest::prelude::*;

/// Solves `A x = b` by Gaussian elimination with partial pivoting.
fn solve_square(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs()))?;
        if a[p][c].abs() < 1e-10 {
            return None;
        }
        a.swap(c, p);
        b.swap(c, p);
        for r in 0..n {
            if r != c {
                let f = a[r][c] / a[c][c];
                let pivot = a[c].clone();
                for (x, y) in a[r][c..n].iter_mut().zip(&pivot[c..n]) {
                    *x -= f * y;
                }
                b[r] -= f * b[c];
            }
        }
    }
    Some((0..n).map(|i| b[i] / a[i][i]).collect())
}

fn choose(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    if n < k {
        return Vec::new();
    }
    let mut out = choose(n - 1, k);
    for mut c in choose(n - 1, k - 1) {
        c.push(n - 1);
        out.push(c);
    }
    out
}

/// Best objective over basic feasible points of `{A x <= b, x >= 0}`.
fn vertex_enumeration(obj: &[f64], rows: &[(Vec<f64>, f64)]) -> Option<f64> {
    let n = obj.len();
    let mut all: Vec<(Vec<f64>, f64)> = rows.to_vec();
    for i in 0..n {
        let mut e = vec![0.0; n];
        e[i] = -1.0;
        all.push((e, 0.0));
    }
    choose(all.len(), n)
        .into_iter()
        .filter_map(|idx| {
            let a = idx.iter().map(|&i| all[i].0.clone()).collect();
            let b = idx.iter().map(|&i| all[i].1).collect();
            solve_square(a, b)
        })
        .filter(|x| {
            all.iter()
                .all(|(a, b)| a.iter().zip(x).map(|(p, q)| p * q).sum::<f64>() <= b + 1e-7)
        })
        .map(|x| obj.iter().zip(&x).map(|(c, v)| c * v).sum::<f64>())
        .min_by(f64::total_cmp)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn simplex_matches_vertex_enumeration(
        n in 1usize..=4,
        obj in proptest::collection::vec(0.0f64..5.0, 4),
        rows in proptest::collection::vec((proptest::collection::vec(-3.0f64..3.0, 4), 0.5f64..6.0), 1..=5),
        box_bound in 1.0f64..10.0,
    ) {
        // A cost vector of nonnegative entries plus a bounding box keeps the
        // instance feasible (x = 0) and bounded.
        let obj: Vec<f64> = obj[..n].iter().map(|c| c - 2.5).collect();
        let mut rows: Vec<(Vec<f64>, f64)> = rows.into_iter().map(|(a, b)| (a[..n].to_vec(), b)).collect();
        for i in 0..n {
            let mut e = vec![0.0; n];
            e[i] = 1.0;
            rows.push((e, box_bound));
        }
        let mut lp = LpInstance::new(n);
        lp.minimize(obj.clone());
        for (a, b) in &rows {
            lp.add_constraint(a.clone(), Relation::Le, *b);
        }
        let res = solve_lp(&lp).unwrap();
        prop_assert_eq!(res.status, LpStatus::Optimal);
        prop_assert!(lp.max_violation(&res.solution) <= 1e-8);
        prop_assert!((lp.objective_value(&res.solution) - res.objective).abs() <= 1e-8);
        let best = vertex_enumeration(&obj, &rows).unwrap();
        prop_assert!((res.objective - best).abs() <= 1e-6 * best.abs().max(1.0));
    }
}
