use super::{singular_values, CMatrix, LinalgError};

/// Schatten p-norm `(Σ s_k^p)^{1/p}` over singular values; `p = ∞` gives the
/// largest singular value and `p = 1` the trace norm.
pub fn schatten_norm(a: &CMatrix, p: f64) -> Result<f64, LinalgError> {
    if p.is_nan() || p < 1.0 {
        return Err(LinalgError::InvalidP(p));
    }
    let s = singular_values(a);
    Ok(power_mean_norm(&s, p))
}

/// ℓ_p norm of a non-negative vector, with the usual rescaling by the largest
/// entry to avoid overflow for large p.
pub(crate) fn power_mean_norm(values: &[f64], p: f64) -> f64 {
    let max = values.iter().fold(0.0f64, |m, &x| m.max(x.abs()));
    if p.is_infinite() || max == 0.0 {
        return max;
    }
    let sum: f64 = values.iter().map(|&x| (x.abs() / max).powf(p)).sum();
    max * sum.powf(1.0 / p)
}
