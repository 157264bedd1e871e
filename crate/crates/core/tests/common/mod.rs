//! Independent reference computations and synthetic data shared by the
//! integration tests and the acceptance target.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ContinuousCDF, StudentsT};

use timeaware::ingest::{Dataset, EffortMultipliers, Mode, ProjectRecord, Schema, EFFORT_MULTIPLIERS};
use timeaware::statkit::DesignMatrix;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gauss(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// Solves A x = b by Gaussian elimination with partial pivoting.
pub fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for k in 0..n {
        let piv = (k..n).max_by(|&i, &j| a[i][k].abs().total_cmp(&a[j][k].abs()))?;
        if a[piv][k].abs() < 1e-300 {
            return None;
        }
        a.swap(k, piv);
        b.swap(k, piv);
        for i in k + 1..n {
            let f = a[i][k] / a[k][k];
            for j in k..n {
                a[i][j] -= f * a[k][j];
            }
            b[i] -= f * b[k];
        }
    }
    let mut x = vec![0.0; n];
    for k in (0..n).rev() {
        let s: f64 = (k + 1..n).map(|j| a[k][j] * x[j]).sum();
        x[k] = (b[k] - s) / a[k][k];
    }
    Some(x)
}

/// Rows of the design as a dense row-major matrix.
pub fn rows_of(d: &DesignMatrix) -> Vec<Vec<f64>> {
    (0..d.n_rows()).map(|i| d.row(i)).collect()
}

/// Least squares via the normal equations X'X b = X'y.
pub fn normal_equations(x: &[Vec<f64>], y: &[f64]) -> Option<Vec<f64>> {
    let p = x[0].len();
    let mut xtx = vec![vec![0.0; p]; p];
    let mut xty = vec![0.0; p];
    for (row, &yi) in x.iter().zip(y) {
        for a in 0..p {
            xty[a] += row[a] * yi;
            for b in 0..p {
                xtx[a][b] += row[a] * row[b];
            }
        }
    }
    solve(xtx, xty)
}

/// Inverse of a small symmetric positive definite matrix, column by column.
pub fn inverse(a: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let n = a.len();
    let mut cols = Vec::new();
    for j in 0..n {
        let e: Vec<f64> = (0..n).map(|i| f64::from(u8::from(i == j))).collect();
        cols.push(solve(a.to_vec(), e)?);
    }
    Some((0..n).map(|i| (0..n).map(|j| cols[j][i]).collect()).collect())
}

pub struct OracleFit {
    pub beta: Vec<f64>,
    pub p_values: Vec<f64>,
    pub fitted: Vec<f64>,
    pub sigma2: f64,
}

/// Full classical fit from the normal equations: coefficients, two-sided
/// t-test p-values, fitted values and residual variance.
pub fn oracle_fit(x: &[Vec<f64>], y: &[f64]) -> Option<OracleFit> {
    let (n, p) = (x.len(), x[0].len());
    let beta = normal_equations(x, y)?;
    let fitted: Vec<f64> = x.iter().map(|r| r.iter().zip(&beta).map(|(a, b)| a * b).sum()).collect();
    let ssr: f64 = y.iter().zip(&fitted).map(|(a, b)| (a - b).powi(2)).sum();
    let df = (n - p) as f64;
    let sigma2 = ssr / df;
    let mut xtx = vec![vec![0.0; p]; p];
    for row in x {
        for a in 0..p {
            for b in 0..p {
                xtx[a][b] += row[a] * row[b];
            }
        }
    }
    let inv = inverse(&xtx)?;
    let t = StudentsT::new(0.0, 1.0, df).ok()?;
    let p_values = (0..p)
        .map(|j| {
            let se = (sigma2 * inv[j][j]).sqrt();
            2.0 * t.sf((beta[j] / se).abs())
        })
        .collect();
    Some(OracleFit { beta, p_values, fitted, sigma2 })
}

/// Random well-conditioned design with `n` rows and `k` explanatory columns.
pub fn random_design(rng: &mut ChaCha8Rng, n: usize, k: usize) -> DesignMatrix {
    let cols: Vec<(String, Vec<f64>)> = (0..k)
        .map(|j| (format!("x{j}"), (0..n).map(|_| rng.gen_range(-3.0..3.0)).collect()))
        .collect();
    let beta: Vec<f64> = (0..=k).map(|_| rng.gen_range(-2.0..2.0)).collect();
    let y = (0..n)
        .map(|i| beta[0] + (0..k).map(|j| beta[j + 1] * cols[j].1[i]).sum::<f64>() + 0.5 * gauss(rng))
        .collect();
    DesignMatrix::with_intercept(cols, y, (0..n).map(|i| format!("r{i}")).collect()).unwrap()
}

/// Every k-subset of 0..n, in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Two-sided Mann-Whitney p by enumerating every assignment of the pooled
/// ranks 1..na+nb to the first sample (tie-free data only).
pub fn mwu_enumerated_p(a: &[f64], b: &[f64]) -> f64 {
    let (na, nb) = (a.len(), b.len());
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    let rank = |v: f64| 1 + pooled.iter().filter(|&&w| w < v).count();
    let ra: usize = a.iter().map(|&v| rank(v)).sum();
    let u_obs = ra as i64 - (na * (na + 1) / 2) as i64;
    let (mut le, mut ge, mut total) = (0u64, 0u64, 0u64);
    for subset in combinations(na + nb, na) {
        let r: usize = subset.iter().map(|i| i + 1).sum();
        let u = r as i64 - (na * (na + 1) / 2) as i64;
        total += 1;
        le += u64::from(u <= u_obs);
        ge += u64::from(u >= u_obs);
    }
    (2.0 * le.min(ge) as f64 / total as f64).min(1.0)
}

/// Two-sided signed-rank p by enumerating all 2^n sign patterns
/// (tie-free, zero-free differences only).
pub fn wilcoxon_enumerated_p(diffs: &[f64]) -> f64 {
    let n = diffs.len();
    let rank = |v: f64| 1 + diffs.iter().filter(|w| w.abs() < v.abs()).count();
    let ranks: Vec<usize> = diffs.iter().map(|&d| rank(d)).collect();
    let w_obs: usize = diffs.iter().zip(&ranks).filter(|(d, _)| **d > 0.0).map(|(_, r)| r).sum();
    let (mut le, mut ge) = (0u64, 0u64);
    for mask in 0u32..(1 << n) {
        let w: usize = (0..n).filter(|i| mask & (1 << i) != 0).map(|i| ranks[i]).sum();
        le += u64::from(w <= w_obs);
        ge += u64::from(w >= w_obs);
    }
    (2.0 * le.min(ge) as f64 / (1u64 << n) as f64).min(1.0)
}

/// Distinct values drawn without replacement from a shuffled grid.
pub fn distinct_values(rng: &mut ChaCha8Rng, k: usize) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::with_capacity(k);
    while out.len() < k {
        let v = f64::from(rng.gen_range(0..10_000)) / 7.0;
        if !out.contains(&v) {
            out.push(v);
        }
    }
    out
}

pub fn fp_record(id: &str, year: i32, size: f64, effort: f64, lang: u8) -> ProjectRecord {
    ProjectRecord {
        id: id.into(),
        completion_year: year,
        size,
        effort,
        mode: None,
        center: None,
        language: Some(lang),
        app_type: None,
        effort_multipliers: None,
    }
}

/// Function-point dataset following effort = 5 * size^0.9 * language factor
/// with log-normal noise. `years` gives (year, project count).
pub fn synthetic_fp(seed: u64, years: &[(i32, usize)]) -> Dataset {
    let mut rng = rng(seed);
    let mut recs = Vec::new();
    let mut k = 0;
    for &(year, count) in years {
        for _ in 0..count {
            k += 1;
            let size: f64 = rng.gen_range(50.0..900.0);
            let lang = rng.gen_range(1..=3u8);
            let factor = [1.0, 0.6, 0.25][usize::from(lang - 1)];
            let effort = 5.0 * size.powf(0.9) * factor * (0.3 * gauss(&mut rng)).exp();
            recs.push(fp_record(&k.to_string(), year, size, effort, lang));
        }
    }
    Dataset::new("synthetic_fp", Schema::FpLanguage, recs).unwrap()
}

/// COCOMO81-style dataset: effort = 3 * kloc^1.05 * rely * cplx * noise,
/// other multipliers drawn from the usual rating levels.
pub fn synthetic_cocomo(seed: u64, years: &[(i32, usize)]) -> Dataset {
    const LEVELS: [f64; 5] = [0.75, 0.88, 1.0, 1.15, 1.4];
    let mut rng = rng(seed);
    let mut recs = Vec::new();
    let mut k = 0;
    for &(year, count) in years {
        for _ in 0..count {
            k += 1;
            let kloc: f64 = rng.gen_range(2.0..300.0);
            let mut em = [1.0; 15];
            for v in em.iter_mut() {
                *v = LEVELS[rng.gen_range(0..5)];
            }
            let rely = em[EFFORT_MULTIPLIERS.iter().position(|m| *m == "rely").unwrap()];
            let cplx = em[EFFORT_MULTIPLIERS.iter().position(|m| *m == "cplx").unwrap()];
            let effort = 3.0 * kloc.powf(1.05) * rely * cplx * (0.15 * gauss(&mut rng)).exp();
            recs.push(ProjectRecord {
                id: k.to_string(),
                completion_year: year,
                size: kloc,
                effort,
                mode: Some([Mode::Organic, Mode::Semidetached, Mode::Embedded][rng.gen_range(0..3)]),
                center: Some(rng.gen_range(1..=5).to_string()),
                language: None,
                app_type: None,
                effort_multipliers: Some(EffortMultipliers(em)),
            });
        }
    }
    Dataset::new("synthetic_cocomo", Schema::Cocomo81, recs).unwrap()
}

/// CSV text in the loader's layout for `data`.
pub fn to_csv(data: &Dataset) -> String {
    let mut out = timeaware::ingest::required_columns(data.schema).join(",");
    out.push('\n');
    for r in data.records() {
        let row: Vec<String> = match data.schema {
            Schema::Cocomo81 => {
                let mut v = vec![
                    r.id.clone(),
                    r.completion_year.to_string(),
                    r.center.clone().unwrap(),
                    r.mode.unwrap().as_str().to_string(),
                    r.size.to_string(),
                    r.effort.to_string(),
                ];
                v.extend(r.effort_multipliers.unwrap().0.iter().map(f64::to_string));
                v
            }
            Schema::FpLanguage => vec![
                r.id.clone(),
                (r.completion_year % 100).to_string(),
                r.effort.to_string(),
                r.size.to_string(),
                r.language.unwrap().to_string(),
            ],
        };
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// Brute-force check of the fold invariants for every approach on `data`:
/// chronology, well-formedness, TAMW nesting against TASA, and test-year
/// coverage recomputed from the year counts. Returns the number of folds
/// checked.
pub fn check_fold_invariants(data: &Dataset, spec: &timeaware::chrono::ModelSpec) -> Result<usize, String> {
    use std::collections::{BTreeMap, BTreeSet};
    use timeaware::chrono::{schedule, Approach};

    let years = data.year_counts();
    let min = spec.min_training();
    let year_of: BTreeMap<&str, i32> = data.records().iter().map(|r| (r.id.as_str(), r.completion_year)).collect();
    let ids_in = |ys: &[i32]| -> BTreeSet<String> {
        data.records().iter().filter(|r| ys.contains(&r.completion_year)).map(|r| r.id.clone()).collect()
    };
    let mut checked = 0;
    let mut by_approach = BTreeMap::new();
    for approach in Approach::ALL {
        let folds = schedule(data, approach, spec, 0).map_err(|e| format!("{approach}: {e}"))?;
        for f in &folds {
            checked += 1;
            if f.n_train() < min {
                return Err(format!("{approach} {}: n_train {} < {min}", f.test_year, f.n_train()));
            }
            let train_years: Vec<i32> = f.training_ids.iter().map(|id| year_of[id.as_str()]).collect();
            if approach.is_past_only() && train_years.iter().any(|y| *y >= f.test_year) {
                return Err(format!("{approach} {}: training reaches the test year", f.test_year));
            }
            if approach == Approach::Loo {
                let others: Vec<i32> = years.iter().map(|y| y.0).filter(|y| *y != f.test_year).collect();
                if f.training_ids.iter().cloned().collect::<BTreeSet<_>>() != ids_in(&others) {
                    return Err(format!("loo {}: training is not every other year", f.test_year));
                }
            }
            if f.test_ids.iter().any(|id| year_of[id.as_str()] != f.test_year)
                || f.test_ids.iter().cloned().collect::<BTreeSet<_>>() != ids_in(&[f.test_year])
            {
                return Err(format!("{approach} {}: test set is not the whole test year", f.test_year));
            }
            if f.window_start_year != *train_years.iter().min().unwrap() {
                return Err(format!("{approach} {}: window start is not the first training year", f.test_year));
            }
        }
        by_approach.insert(approach, folds);
    }

    // coverage: a window starting at data year w tests every year after the
    // first block of whole years from w holding at least `min` projects
    let first_test_from = |w: usize| -> Option<usize> {
        let mut c = 0;
        for (k, y) in years.iter().enumerate().skip(w) {
            c += y.1;
            if c >= min {
                return Some(k + 1);
            }
        }
        None
    };
    let tasa_years: Vec<i32> = by_approach[&Approach::Tasa].iter().map(|f| f.test_year).collect();
    let expected_tasa: Vec<i32> = match first_test_from(0) {
        Some(k) => years[k..].iter().map(|y| y.0).collect(),
        None => vec![],
    };
    if tasa_years != expected_tasa {
        return Err(format!("tasa test years {tasa_years:?}, expected {expected_tasa:?}"));
    }
    for (t, &(year, _)) in years.iter().enumerate() {
        let expected = (0..t).filter(|&w| first_test_from(w).is_some_and(|k| k <= t)).count();
        let got = by_approach[&Approach::Tamw].iter().filter(|f| f.test_year == year).count();
        if expected != got {
            return Err(format!("tamw multiplicity for {year}: {got}, expected {expected}"));
        }
    }

    // nesting: the first-year window equals TASA; other windows drop whole oldest years
    for f in &by_approach[&Approach::Tamw] {
        let tasa = by_approach[&Approach::Tasa]
            .iter()
            .find(|g| g.test_year == f.test_year)
            .ok_or_else(|| format!("tamw tests {} which tasa never tests", f.test_year))?;
        let tasa_set: BTreeSet<String> = tasa.training_ids.iter().cloned().collect();
        let set: BTreeSet<String> = f.training_ids.iter().cloned().collect();
        if f.window_start_year == years[0].0 && set != tasa_set {
            return Err(format!("tamw first window for {} differs from tasa", f.test_year));
        }
        let expected: BTreeSet<String> =
            tasa_set.iter().filter(|id| year_of[id.as_str()] >= f.window_start_year).cloned().collect();
        if set != expected {
            return Err(format!("tamw window {} for {} is not a suffix of tasa", f.window_start_year, f.test_year));
        }
    }

    // mean and median share the tasa geometry
    for kind in [Approach::Mean, Approach::Median] {
        let a: Vec<_> = by_approach[&kind].iter().map(|f| (f.test_year, f.training_ids.clone())).collect();
        let b: Vec<_> = by_approach[&Approach::Tasa].iter().map(|f| (f.test_year, f.training_ids.clone())).collect();
        if a != b {
            return Err(format!("{kind} folds differ from tasa"));
        }
    }
    Ok(checked)
}
