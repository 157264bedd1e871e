//! Ordinary least squares by Householder QR.

use statrs::distribution::{ContinuousCDF, StudentsT};

use super::design::DesignMatrix;
use crate::error::{Error, Result};

/// A column whose distance from the span of the preceding columns is below
/// this fraction of the largest column norm is treated as dependent.
pub const RANK_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct Coefficient {
    pub name: String,
    pub estimate: f64,
    pub std_error: f64,
    pub t_value: f64,
    /// Two-sided t-test p-value against zero.
    pub p_value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelFit {
    pub coefficients: Vec<Coefficient>,
    pub residuals: Vec<f64>,
    pub fitted: Vec<f64>,
    /// Diagonal of the hat matrix.
    pub leverage: Vec<f64>,
    pub r2: f64,
    pub adjusted_r2: f64,
    /// Residual variance estimate, SSR / (n - p).
    pub sigma2: f64,
    pub n_used: usize,
    pub row_ids: Vec<String>,
    pub removed_influential: Vec<String>,
    /// Columns dropped during selection, in removal order.
    pub selection_trace: Vec<String>,
    /// Mandatory columns kept although their p-value exceeded the removal
    /// threshold.
    pub exempted: Vec<String>,
}

impl ModelFit {
    pub fn coefficient(&self, name: &str) -> Option<&Coefficient> {
        self.coefficients.iter().find(|c| c.name == name)
    }

    pub fn estimate(&self, name: &str) -> Option<f64> {
        self.coefficient(name).map(|c| c.estimate)
    }

    pub fn column_names(&self) -> impl Iterator<Item = &str> {
        self.coefficients.iter().map(|c| c.name.as_str())
    }

    /// Linear predictor for a row whose column values are looked up by name.
    pub fn linear_predictor(&self, mut value_of: impl FnMut(&str) -> f64) -> f64 {
        self.coefficients.iter().map(|c| c.estimate * value_of(&c.name)).sum()
    }

    pub fn ssr(&self) -> f64 {
        self.residuals.iter().map(|e| e * e).sum()
    }
}

/// Householder factorisation of a column-major matrix.
struct Householder {
    /// Reflector vectors; `vs[k]` acts on rows k..n.
    vs: Vec<Vec<f64>>,
    betas: Vec<f64>,
    /// Upper-triangular R, row-major p x p.
    r: Vec<Vec<f64>>,
    n: usize,
}

impl Householder {
    /// Factorises `columns` (each of length n). Columns found dependent on
    /// earlier ones are reported by index and left out of the factor.
    fn factor(columns: &[&[f64]]) -> (Self, Vec<usize>) {
        let n = columns.first().map_or(0, |c| c.len());
        let max_norm = columns
            .iter()
            .map(|c| c.iter().map(|v| v * v).sum::<f64>().sqrt())
            .fold(0.0, f64::max);
        let tol = RANK_TOLERANCE * max_norm.max(f64::MIN_POSITIVE);

        let mut work: Vec<Vec<f64>> = columns.iter().map(|c| c.to_vec()).collect();
        let mut vs: Vec<Vec<f64>> = Vec::new();
        let mut betas = Vec::new();
        let mut kept = Vec::new();
        let mut dependent = Vec::new();

        for (j, _) in columns.iter().enumerate() {
            let k = vs.len();
            // apply previous reflectors to column j
            let col = &mut work[j];
            for (v, &beta) in vs.iter().zip(&betas) {
                let off = n - v.len();
                apply_reflector(v, beta, &mut col[off..]);
            }
            let tail = &col[k..];
            let norm = tail.iter().map(|v| v * v).sum::<f64>().sqrt();
            if k >= n || norm <= tol {
                dependent.push(j);
                continue;
            }
            let alpha = if tail[0] >= 0.0 { -norm } else { norm };
            let mut v = tail.to_vec();
            v[0] -= alpha;
            let vtv: f64 = v.iter().map(|x| x * x).sum();
            let beta = if vtv > 0.0 { 2.0 / vtv } else { 0.0 };
            apply_reflector(&v, beta, &mut col[k..]);
            vs.push(v);
            betas.push(beta);
            kept.push(j);
        }

        let p = kept.len();
        let mut r = vec![vec![0.0; p]; p];
        for (c, &j) in kept.iter().enumerate() {
            for (row, r_row) in r.iter_mut().enumerate().take(c + 1) {
                r_row[c] = work[j][row];
            }
        }
        (Householder { vs, betas, r, n }, dependent)
    }

    fn apply_qt(&self, y: &mut [f64]) {
        for (v, &beta) in self.vs.iter().zip(&self.betas) {
            let off = self.n - v.len();
            apply_reflector(v, beta, &mut y[off..]);
        }
    }

    /// Thin Q (n x p), column-major.
    fn thin_q(&self) -> Vec<Vec<f64>> {
        let p = self.vs.len();
        (0..p)
            .map(|j| {
                let mut e = vec![0.0; self.n];
                e[j] = 1.0;
                for (v, &beta) in self.vs.iter().zip(&self.betas).rev() {
                    let off = self.n - v.len();
                    apply_reflector(v, beta, &mut e[off..]);
                }
                e
            })
            .collect()
    }

    fn solve_r(&self, rhs: &[f64]) -> Vec<f64> {
        let p = self.r.len();
        let mut x = vec![0.0; p];
        for i in (0..p).rev() {
            let s: f64 = (i + 1..p).map(|j| self.r[i][j] * x[j]).sum();
            x[i] = (rhs[i] - s) / self.r[i][i];
        }
        x
    }

    /// Diagonal of (R'R)^-1 = R^-1 R^-T.
    fn unscaled_variances(&self) -> Vec<f64> {
        let p = self.r.len();
        // columns of R^-1
        let mut rinv = vec![vec![0.0; p]; p];
        for c in 0..p {
            let mut e = vec![0.0; p];
            e[c] = 1.0;
            let col = self.solve_r(&e);
            for i in 0..p {
                rinv[i][c] = col[i];
            }
        }
        (0..p).map(|i| rinv[i].iter().map(|v| v * v).sum()).collect()
    }
}

fn apply_reflector(v: &[f64], beta: f64, x: &mut [f64]) {
    let dot: f64 = v.iter().zip(x.iter()).map(|(a, b)| a * b).sum();
    let s = beta * dot;
    for (xi, vi) in x.iter_mut().zip(v) {
        *xi -= s * vi;
    }
}

/// Names of the columns that are linearly dependent on earlier columns.
pub fn dependent_columns(design: &DesignMatrix) -> Vec<String> {
    let cols: Vec<&[f64]> = (0..design.n_cols()).map(|j| design.column(j)).collect();
    let (_, dependent) = Householder::factor(&cols);
    dependent.into_iter().map(|j| design.column_names()[j].clone()).collect()
}

/// Least-squares fit with coefficient t-tests and adjusted R-squared.
pub fn fit_ols(design: &DesignMatrix) -> Result<ModelFit> {
    let n = design.n_rows();
    let p = design.n_cols();
    if n < p + 1 {
        return Err(Error::InsufficientData { required: p + 1, available: n });
    }
    let cols: Vec<&[f64]> = (0..p).map(|j| design.column(j)).collect();
    let (qr, dependent) = Householder::factor(&cols);
    if !dependent.is_empty() {
        return Err(Error::SingularDesign {
            columns: dependent.iter().map(|&j| design.column_names()[j].clone()).collect(),
        });
    }

    let y = design.response();
    let mut qty = y.to_vec();
    qr.apply_qt(&mut qty);
    let beta = qr.solve_r(&qty[..p]);

    let fitted: Vec<f64> = (0..n)
        .map(|i| cols.iter().zip(&beta).map(|(c, b)| c[i] * b).sum())
        .collect();
    let residuals: Vec<f64> = y.iter().zip(&fitted).map(|(a, b)| a - b).collect();
    let q = qr.thin_q();
    let leverage: Vec<f64> = (0..n).map(|i| q.iter().map(|c| c[i] * c[i]).sum()).collect();

    let ssr: f64 = residuals.iter().map(|e| e * e).sum();
    let ybar = y.iter().sum::<f64>() / n as f64;
    let sst: f64 = y.iter().map(|v| (v - ybar) * (v - ybar)).sum();
    let r2 = if ssr == 0.0 || sst == 0.0 { 1.0 } else { 1.0 - ssr / sst };
    let df = (n - p) as f64;
    let adjusted_r2 = 1.0 - (1.0 - r2) * (n as f64 - 1.0) / df;
    let sigma2 = ssr / df;

    let t_dist = StudentsT::new(0.0, 1.0, df).map_err(|e| Error::Internal(e.to_string()))?;
    let coefficients = design
        .column_names()
        .iter()
        .zip(beta.iter().zip(qr.unscaled_variances()))
        .map(|(name, (&estimate, v))| {
            let std_error = (sigma2 * v).sqrt();
            let (t_value, p_value) = if std_error > 0.0 {
                let t = estimate / std_error;
                (t, (2.0 * t_dist.sf(t.abs())).clamp(0.0, 1.0))
            } else if estimate == 0.0 {
                (0.0, 1.0)
            } else {
                (f64::INFINITY.copysign(estimate), 0.0)
            };
            Coefficient { name: name.clone(), estimate, std_error, t_value, p_value }
        })
        .collect();

    Ok(ModelFit {
        coefficients,
        residuals,
        fitted,
        leverage,
        r2,
        adjusted_r2,
        sigma2,
        n_used: n,
        row_ids: design.row_ids().to_vec(),
        removed_influential: Vec::new(),
        selection_trace: Vec::new(),
        exempted: Vec::new(),
    })
}
