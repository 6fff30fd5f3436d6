//! Elementary symmetric polynomials of nonnegative vectors.

use crate::error::{Error, Result};

/// `S_0, ..., S_k` of `values` via the one-pass recurrence
/// `e_j <- e_j + x * e_{j-1}`, which only adds nonnegative terms.
pub fn elementary_symmetric_upto(values: &[f64], k: usize) -> Vec<f64> {
    let mut e = vec![0.0; k + 1];
    e[0] = 1.0;
    for (n, &x) in values.iter().enumerate() {
        for j in (1..=k.min(n + 1)).rev() {
            e[j] += x * e[j - 1];
        }
    }
    e
}

/// `S_k(values) = sum_{i_1 < ... < i_k} values_{i_1} ... values_{i_k}`.
pub fn elementary_symmetric(values: &[f64], k: usize) -> Result<f64> {
    if k == 0 || k > values.len() {
        return Err(Error::Parameter(format!(
            "order k = {k} outside 1..={}",
            values.len()
        )));
    }
    Ok(elementary_symmetric_upto(values, k)[k].max(0.0))
}

/// Binomial coefficient as a float (exact for the small arguments used here).
pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}
