//! Pearson's chi-squared test on 2×2 system-by-outcome tables.

use serde::Serialize;
use thiserror::Error;

use crate::eval::AlignmentError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CompareError {
    #[error(transparent)]
    Alignment(#[from] AlignmentError),
    #[error("degenerate contingency table {0:?}: an expected cell count is zero")]
    Degenerate([[u64; 2]; 2]),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComparisonResult {
    pub statistic: f64,
    pub p_value: f64,
    /// Rows are systems (a, b); columns are (correct, incorrect).
    pub contingency: [[u64; 2]; 2],
}

/// Compare two systems' per-document outcomes (`true` = correct) with a
/// chi-squared test, one degree of freedom, no continuity correction.
pub fn chi_squared_compare(a: &[bool], b: &[bool]) -> Result<ComparisonResult, CompareError> {
    if a.len() != b.len() {
        return Err(AlignmentError::OutcomeLength { a: a.len(), b: b.len() }.into());
    }
    if a.is_empty() {
        return Err(AlignmentError::Empty.into());
    }
    let count = |xs: &[bool]| xs.iter().filter(|&&x| x).count() as u64;
    let (ca, cb) = (count(a), count(b));
    let table = [
        [ca, a.len() as u64 - ca],
        [cb, b.len() as u64 - cb],
    ];
    chi_squared_2x2(table)
}

/// Pearson statistic and upper-tail p-value for an arbitrary 2×2 table.
pub fn chi_squared_2x2(table: [[u64; 2]; 2]) -> Result<ComparisonResult, CompareError> {
    let rows = [
        (table[0][0] + table[0][1]) as f64,
        (table[1][0] + table[1][1]) as f64,
    ];
    let cols = [
        (table[0][0] + table[1][0]) as f64,
        (table[0][1] + table[1][1]) as f64,
    ];
    let total = rows[0] + rows[1];
    if rows.iter().chain(cols.iter()).any(|&m| m == 0.0) {
        return Err(CompareError::Degenerate(table));
    }

    let mut statistic = 0.0;
    for (i, row) in rows.iter().enumerate() {
        for (j, col) in cols.iter().enumerate() {
            let expected = row * col / total;
            let diff = table[i][j] as f64 - expected;
            statistic += diff * diff / expected;
        }
    }
    Ok(ComparisonResult {
        statistic,
        p_value: chi_squared_sf_df1(statistic),
        contingency: table,
    })
}

/// Survival function of the chi-squared distribution with one degree of
/// freedom: `Q(1/2, x/2)`.
pub fn chi_squared_sf_df1(x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    regularized_gamma_q(0.5, x / 2.0)
}

const EPS: f64 = 1e-16;
const TINY: f64 = 1e-300;
const MAX_ITER: usize = 10_000;

/// Regularized upper incomplete gamma `Q(a, x) = Γ(a, x) / Γ(a)`.
///
/// Power series below `x < a + 1`, Lentz continued fraction above.
pub fn regularized_gamma_q(a: f64, x: f64) -> f64 {
    assert!(a > 0.0, "shape must be positive");
    if x <= 0.0 {
        return 1.0;
    }
    let log_prefactor = a * x.ln() - x - ln_gamma(a);
    if x < a + 1.0 {
        let mut term = 1.0 / a;
        let mut sum = term;
        let mut ap = a;
        for _ in 0..MAX_ITER {
            ap += 1.0;
            term *= x / ap;
            sum += term;
            if term.abs() < sum.abs() * EPS {
                break;
            }
        }
        1.0 - sum * log_prefactor.exp()
    } else {
        let mut b = x + 1.0 - a;
        let mut c = 1.0 / TINY;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..MAX_ITER {
            let an = -(i as f64) * (i as f64 - a);
            b += 2.0;
            d = an * d + b;
            if d.abs() < TINY {
                d = TINY;
            }
            c = b + an / c;
            if c.abs() < TINY {
                c = TINY;
            }
            d = 1.0 / d;
            let delta = d * c;
            h *= delta;
            if (delta - 1.0).abs() < EPS {
                break;
            }
        }
        h * log_prefactor.exp()
    }
}

/// Natural log of the gamma function (Lanczos, g = 7, n = 9).
pub fn ln_gamma(x: f64) -> f64 {
    const COEFFS: [f64; 9] = [
        0.999_999_999_999_809_9,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        // reflection
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = COEFFS[0];
    let t = x + 7.5;
    for (i, &c) in COEFFS.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}
