mod common;

use common::*;
use rand::Rng;
use timeaware::statkit::{
    backward_stepwise, cooks_distances, cooks_filter, fit_ols, mann_whitney_u, shapiro_wilk, wilcoxon_signed_rank,
    DesignMatrix, INTERCEPT,
};

#[test]
fn ols_matches_normal_equations() {
    let mut rng = rng(20240611);
    for case in 0..100 {
        let k = rng.gen_range(1..=4);
        let n = rng.gen_range(k + 2..=12);
        let d = random_design(&mut rng, n, k);
        let fit = fit_ols(&d).unwrap();
        let oracle = oracle_fit(&rows_of(&d), d.response()).unwrap();
        for (c, b) in fit.coefficients.iter().zip(&oracle.beta) {
            assert!((c.estimate - b).abs() < 1e-8, "case {case}: {} {} vs {b}", c.name, c.estimate);
        }
        for (c, p) in fit.coefficients.iter().zip(&oracle.p_values) {
            assert!((c.p_value - p).abs() < 1e-8, "case {case}: p of {}", c.name);
        }
        assert!((fit.sigma2 - oracle.sigma2).abs() < 1e-8 * oracle.sigma2.max(1.0));
    }
}

#[test]
fn adjusted_r2_definition() {
    let mut rng = rng(7);
    let d = random_design(&mut rng, 11, 3);
    let fit = fit_ols(&d).unwrap();
    let y = d.response();
    let ybar = y.iter().sum::<f64>() / y.len() as f64;
    let sst: f64 = y.iter().map(|v| (v - ybar).powi(2)).sum();
    let r2 = 1.0 - fit.ssr() / sst;
    let (n, p) = (11.0, 4.0);
    assert!((fit.r2 - r2).abs() < 1e-12);
    assert!((fit.adjusted_r2 - (1.0 - (1.0 - r2) * (n - 1.0) / (n - p))).abs() < 1e-12);
}

/// Replays backward elimination with normal-equation fits: at every step the
/// dropped column must be the droppable one with the largest p-value, that
/// p-value must exceed alpha, and the final model must have every droppable
/// p-value at or below alpha.
#[test]
fn stepwise_matches_replayed_elimination() {
    let mut rng = rng(99);
    for case in 0..40 {
        let k = rng.gen_range(2..=5);
        let n = rng.gen_range(k + 4..=20);
        let mut cols: Vec<(String, Vec<f64>)> = (0..k)
            .map(|j| (format!("x{j}"), (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect()))
            .collect();
        // only x0 and x1 matter
        let y: Vec<f64> = (0..n).map(|i| 1.0 + 2.0 * cols[0].1[i] - 1.5 * cols[1].1[i] + gauss(&mut rng)).collect();
        cols[0].0 = "size".into();
        let d = DesignMatrix::with_intercept(cols, y, (0..n).map(|i| i.to_string()).collect()).unwrap();
        let fit = backward_stepwise(&d, 0.05, &["size"]).unwrap();

        let mut current = d.clone();
        for dropped in &fit.selection_trace {
            let o = oracle_fit(&rows_of(&current), current.response()).unwrap();
            let (worst, p) = current
                .column_names()
                .iter()
                .zip(&o.p_values)
                .filter(|(name, _)| *name != INTERCEPT && *name != "size")
                .max_by(|a, b| a.1.total_cmp(b.1))
                .unwrap();
            assert_eq!(worst, dropped, "case {case}");
            assert!(*p > 0.05);
            current = current.without_column(dropped).unwrap();
        }
        let o = oracle_fit(&rows_of(&current), current.response()).unwrap();
        for (name, p) in current.column_names().iter().zip(&o.p_values) {
            if name != INTERCEPT && name != "size" {
                assert!(*p <= 0.05, "case {case}: {name} left with p {p}");
            }
        }
        assert_eq!(fit.column_names().collect::<Vec<_>>(), current.column_names());
        assert!(fit.estimate("size").is_some());
    }
}

/// With a single candidate that is irrelevant, elimination keeps only the
/// mandatory column: the all-subsets search over droppable columns agrees.
#[test]
fn stepwise_agrees_with_all_subsets_on_clear_signal() {
    let mut rng = rng(5);
    let n = 40;
    let names = ["size", "a", "b", "c"];
    let cols: Vec<(String, Vec<f64>)> =
        names.iter().map(|nm| (nm.to_string(), (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect())).collect();
    let y: Vec<f64> = (0..n).map(|i| 0.5 + 3.0 * cols[0].1[i] + 2.0 * cols[2].1[i] + 0.3 * gauss(&mut rng)).collect();
    let d = DesignMatrix::with_intercept(cols, y, (0..n).map(|i| i.to_string()).collect()).unwrap();
    let fit = backward_stepwise(&d, 0.05, &["size"]).unwrap();

    // all subsets of {a, b, c} whose members are all significant, largest first
    let mut best: Option<Vec<&str>> = None;
    for k in (0..=3).rev() {
        for subset in combinations(3, k) {
            let keep: Vec<&str> = subset.iter().map(|&i| names[i + 1]).collect();
            let mut cur = d.clone();
            for nm in &names[1..] {
                if !keep.contains(nm) {
                    cur = cur.without_column(nm).unwrap();
                }
            }
            let o = oracle_fit(&rows_of(&cur), cur.response()).unwrap();
            let ok = cur.column_names().iter().zip(&o.p_values).all(|(nm, p)| !keep.contains(&nm.as_str()) || *p <= 0.05);
            if ok && best.is_none() {
                best = Some(keep);
            }
        }
        if best.is_some() {
            break;
        }
    }
    let selected: Vec<&str> = fit.column_names().filter(|c| *c != INTERCEPT && *c != "size").collect();
    assert_eq!(selected, best.unwrap());
}

#[test]
fn cooks_distance_matches_leave_one_out_refits() {
    let mut rng = rng(31);
    for _ in 0..25 {
        let k = rng.gen_range(1..=3);
        let n = rng.gen_range(k + 4..=14);
        let d = random_design(&mut rng, n, k);
        let fit = fit_ols(&d).unwrap();
        let dist = cooks_distances(&fit);
        let x = rows_of(&d);
        let p = (k + 1) as f64;
        for i in 0..n {
            let xs: Vec<Vec<f64>> = x.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, r)| r.clone()).collect();
            let ys: Vec<f64> = d.response().iter().enumerate().filter(|(j, _)| *j != i).map(|(_, v)| *v).collect();
            let beta = normal_equations(&xs, &ys).unwrap();
            let shift: f64 = x
                .iter()
                .zip(&fit.fitted)
                .map(|(r, f)| (f - r.iter().zip(&beta).map(|(a, b)| a * b).sum::<f64>()).powi(2))
                .sum();
            let expected = shift / (p * fit.sigma2);
            assert!((dist[i] - expected).abs() < 1e-8 * expected.max(1.0), "row {i}: {} vs {expected}", dist[i]);
        }
    }
}

#[test]
fn cooks_filter_removes_planted_outlier() {
    let mut rng = rng(3);
    let n = 20;
    let x: Vec<f64> = (0..n).map(|i| i as f64).collect();
    let mut y: Vec<f64> = x.iter().map(|v| 2.0 + 0.5 * v + 0.2 * gauss(&mut rng)).collect();
    y[19] += 15.0;
    let d = DesignMatrix::with_intercept(vec![("x".into(), x)], y, (0..n).map(|i| format!("p{i}")).collect()).unwrap();
    let out = cooks_filter(&d, None).unwrap();
    assert_eq!(out.threshold, 4.0 / 20.0);
    assert!(out.removed().contains(&"p19".to_string()));
    assert!((out.fit.estimate("x").unwrap() - 0.5).abs() < 0.05);
    assert_eq!(out.fit.n_used, n - out.removed().len());
}

#[test]
fn mann_whitney_exact_matches_enumeration() {
    let mut rng = rng(17);
    for na in 1..=7 {
        for nb in 1..=7 {
            for _ in 0..4 {
                let v = distinct_values(&mut rng, na + nb);
                let (a, b) = v.split_at(na);
                let r = mann_whitney_u(a, b).unwrap();
                assert!(r.exact);
                let expected = mwu_enumerated_p(a, b);
                assert!((r.p_value - expected).abs() < 1e-12, "na={na} nb={nb}: {} vs {expected}", r.p_value);
            }
        }
    }
}

#[test]
fn wilcoxon_exact_matches_enumeration() {
    let mut rng = rng(23);
    for n in 1..=10 {
        for _ in 0..6 {
            let mags = distinct_values(&mut rng, n);
            let diffs: Vec<f64> =
                mags.iter().map(|m| if rng.gen_bool(0.5) { m + 0.5 } else { -(m + 0.5) }).collect();
            let pairs: Vec<(f64, f64)> = diffs.iter().map(|d| (100.0 + d, 100.0)).collect();
            let r = wilcoxon_signed_rank(&pairs).unwrap();
            assert!(r.exact);
            // 100 + d - 100 may round, so enumerate on the differences the test sees
            let seen: Vec<f64> = pairs.iter().map(|(a, b)| a - b).collect();
            let expected = wilcoxon_enumerated_p(&seen);
            assert!((r.p_value - expected).abs() < 1e-12, "n={n}: {} vs {expected}", r.p_value);
        }
    }
}

/// (values, W, p) captured from scipy.stats.shapiro 1.15.3.
fn sw_fixtures() -> Vec<(Vec<f64>, f64, f64)> {
    let exp30 = vec![
        0.702268, 0.083792, 0.066444, 0.312905, 0.23428, 0.760486, 1.422501, 0.583264, 0.104918, 1.717866, 2.548859,
        0.870714, 0.383387, 0.912771, 1.304649, 1.282769, 0.714896, 2.634342, 0.613686, 2.3822, 5.210599, 0.582497,
        0.358788, 0.117278, 1.8706, 3.902219, 0.733753, 1.316603, 1.709934, 2.142244,
    ];
    let log30: Vec<f64> = exp30.iter().map(|v: &f64| v.ln()).collect();
    vec![
        (vec![148.0, 154.0, 158.0, 160.0, 161.0, 162.0, 166.0, 170.0, 182.0, 195.0], 0.9080491141028906, 0.2678575575376505),
        (
            vec![0.1, 0.2, 0.2, 0.3, 0.5, 0.8, 1.3, 2.1, 3.4, 5.5, 8.9, 14.4],
            0.7336041784568541,
            0.0018114291810618114,
        ),
        (vec![1.0, 2.0, 4.0], 0.9642857142857142, 0.6368868450289689),
        ((1..=20).map(f64::from).collect(), 0.9603751832429884, 0.5513717457916771),
        (vec![2.3, -1.1, 0.4, 0.9, -0.2, 3.8, 1.5], 0.9862488456285139, 0.984147061387334),
        (exp30, 0.8365578964614141, 0.00032845365209534027),
        (log30, 0.9531876608563175, 0.2056316318427957),
    ]
}

#[test]
fn shapiro_wilk_reference_values() {
    for (values, w, p) in sw_fixtures() {
        let r = shapiro_wilk(&values).unwrap();
        assert!((r.statistic - w).abs() < 1e-3, "n={} W {} vs {w}", values.len(), r.statistic);
        assert!((r.p_value - p).abs() < 1e-3, "n={} p {} vs {p}", values.len(), r.p_value);
    }
}
