//! Scalar statistics helpers for classical correlations.

use crate::{Error, Result};

/// Pearson product-moment correlation Corr(X,Y) = Cov(X,Y)/√(Var X · Var Y).
pub fn pearson(samples_x: &[f64], samples_y: &[f64]) -> Result<f64> {
    if samples_x.len() != samples_y.len() || samples_x.len() < 2 {
        return Err(Error::DimensionMismatch(
            "pearson needs two equal-length samples of size ≥ 2".into(),
        ));
    }
    let n = samples_x.len() as f64;
    let mean_x: f64 = samples_x.iter().sum::<f64>() / n;
    let mean_y: f64 = samples_y.iter().sum::<f64>() / n;
    let mut cov = 0.0;
    let mut var_x = 0.0;
    let mut var_y = 0.0;
    for (&x, &y) in samples_x.iter().zip(samples_y) {
        cov += (x - mean_x) * (y - mean_y);
        var_x += (x - mean_x) * (x - mean_x);
        var_y += (y - mean_y) * (y - mean_y);
    }
    if var_x == 0.0 || var_y == 0.0 {
        return Err(Error::ZeroVariance);
    }
    Ok(cov / (var_x * var_y).sqrt())
}
