//! Shapiro-Wilk W test with Royston's (1992/1995) coefficient and p-value
//! approximations, valid for 3 <= n <= 5000.

use statrs::distribution::{ContinuousCDF, Normal};

use super::{TestMethod, TestResult};
use crate::error::{Error, Result};

pub const SW_MIN_N: usize = 3;
pub const SW_MAX_N: usize = 5000;

const C1: [f64; 6] = [0.0, 0.221157, -0.147981, -2.071190, 4.434685, -2.706056];
const C2: [f64; 6] = [0.0, 0.042981, -0.293762, -1.752461, 5.682633, -3.582633];
const C3: [f64; 4] = [0.5440, -0.39978, 0.025054, -6.714e-4];
const C4: [f64; 4] = [1.3822, -0.77857, 0.062767, -0.0020322];
const C5: [f64; 4] = [-1.5861, -0.31082, -0.083751, 0.0038915];
const C6: [f64; 3] = [-0.4803, -0.082676, 0.0030302];
const G: [f64; 2] = [-2.273, 0.459];

/// Evaluates c[0] + c[1] x + c[2] x^2 + ...
fn poly(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &k| acc * x + k)
}

fn std_normal() -> Normal {
    Normal::new(0.0, 1.0).expect("unit normal")
}

/// Antisymmetric Shapiro-Wilk coefficients for the upper half of an ordered
/// sample of size n: `a[0]` pairs the extremes.
fn coefficients(n: usize) -> Vec<f64> {
    let nn2 = n / 2;
    if n == 3 {
        return vec![std::f64::consts::FRAC_1_SQRT_2];
    }
    let z = std_normal();
    let an = n as f64;
    let m: Vec<f64> = (1..=nn2).map(|i| z.inverse_cdf((i as f64 - 0.375) / (an + 0.25))).collect();
    let summ2 = 2.0 * m.iter().map(|v| v * v).sum::<f64>();
    let ssumm2 = summ2.sqrt();
    let rsn = 1.0 / an.sqrt();
    let a1 = poly(&C1, rsn) - m[0] / ssumm2;

    let mut a = vec![0.0; nn2];
    a[0] = a1;
    let (first, fac) = if n > 5 {
        let a2 = -m[1] / ssumm2 + poly(&C2, rsn);
        a[1] = a2;
        let fac = ((summ2 - 2.0 * m[0] * m[0] - 2.0 * m[1] * m[1]) / (1.0 - 2.0 * a1 * a1 - 2.0 * a2 * a2)).sqrt();
        (2, fac)
    } else {
        (1, ((summ2 - 2.0 * m[0] * m[0]) / (1.0 - 2.0 * a1 * a1)).sqrt())
    };
    for i in first..nn2 {
        a[i] = -m[i] / fac;
    }
    a
}

pub fn shapiro_wilk(values: &[f64]) -> Result<TestResult> {
    let n = values.len();
    if n < SW_MIN_N {
        return Err(Error::InsufficientData { required: SW_MIN_N, available: n });
    }
    if n > SW_MAX_N {
        return Err(Error::Config(format!("Shapiro-Wilk supports at most {SW_MAX_N} values, got {n}")));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::DegenerateSample("non-finite value".into()));
    }
    let mut x = values.to_vec();
    x.sort_by(f64::total_cmp);
    let range = x[n - 1] - x[0];
    if range < 1e-19 {
        return Err(Error::DegenerateSample("all values are equal".into()));
    }

    let a = coefficients(n);
    let nn2 = n / 2;
    // full coefficient vector aligned with the sorted sample
    let mut coef = vec![0.0; n];
    for i in 0..nn2 {
        coef[i] = -a[i];
        coef[n - 1 - i] = a[i];
    }

    // W as the squared correlation between the sample and the coefficients
    let xs: Vec<f64> = x.iter().map(|v| v / range).collect();
    let sx = xs.iter().sum::<f64>() / n as f64;
    let sa = coef.iter().sum::<f64>() / n as f64;
    let (mut ssa, mut ssx, mut sax) = (0.0, 0.0, 0.0);
    for (c, v) in coef.iter().zip(&xs) {
        let asa = c - sa;
        let xsx = v - sx;
        ssa += asa * asa;
        ssx += xsx * xsx;
        sax += asa * xsx;
    }
    let ssassx = (ssa * ssx).sqrt();
    let w1 = (ssassx - sax) * (ssassx + sax) / (ssa * ssx);
    let w = 1.0 - w1;

    let p_value = if n == 3 {
        const PI6: f64 = 6.0 / std::f64::consts::PI;
        const STQR: f64 = std::f64::consts::PI / 3.0;
        (PI6 * (w.sqrt().asin() - STQR)).clamp(0.0, 1.0)
    } else {
        let y = w1.ln();
        let an = n as f64;
        let (y, mean, sd) = if n <= 11 {
            let gamma = poly(&G, an);
            if y >= gamma {
                return Ok(result(w, 1e-99, n));
            }
            (-(gamma - y).ln(), poly(&C3, an), poly(&C4, an).exp())
        } else {
            let ln_n = an.ln();
            (y, poly(&C5, ln_n), poly(&C6, ln_n).exp())
        };
        std_normal().sf((y - mean) / sd)
    };
    Ok(result(w, p_value, n))
}

fn result(w: f64, p: f64, n: usize) -> TestResult {
    TestResult {
        method: TestMethod::ShapiroWilk,
        statistic: w,
        p_value: p.clamp(0.0, 1.0),
        n: vec![n],
        exact: false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_vector_is_degenerate() {
        assert!(matches!(shapiro_wilk(&[7.0; 6]), Err(Error::DegenerateSample(_))));
    }

    #[test]
    fn too_small() {
        assert!(matches!(shapiro_wilk(&[1.0, 2.0]), Err(Error::InsufficientData { required: 3, available: 2 })));
    }

    #[test]
    fn coefficients_are_normalised() {
        for n in [4, 5, 6, 11, 12, 30, 200] {
            let a = coefficients(n);
            let ss: f64 = 2.0 * a.iter().map(|v| v * v).sum::<f64>();
            assert!((ss - 1.0).abs() < 1e-3, "n={n} ss={ss}");
        }
    }

    #[test]
    fn order_invariant() {
        let a = shapiro_wilk(&[3.0, 1.0, 4.0, 1.5, 9.0, 2.6]).unwrap();
        let b = shapiro_wilk(&[9.0, 4.0, 3.0, 2.6, 1.5, 1.0]).unwrap();
        assert_eq!(a, b);
    }
}
