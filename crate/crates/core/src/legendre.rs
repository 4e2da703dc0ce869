//! Legendre polynomials and polynomials stored as Legendre coefficient vectors.
//!
//! A coefficient vector `c` represents `sum_k c[k] L_k(x)` on `[-1, 1]`, with the
//! classical normalization `L_k(1) = 1`.

/// Values `L_0(x), ..., L_kmax(x)` by the three-term recurrence
/// `(k+1) L_{k+1} = (2k+1) x L_k - k L_{k-1}`.
pub fn legendre_eval_all(kmax: usize, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(kmax + 1);
    out.push(1.0);
    if kmax == 0 {
        return out;
    }
    out.push(x);
    for k in 1..kmax {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0) * x * out[k] - kf * out[k - 1]) / (kf + 1.0);
        out.push(next);
    }
    out
}

/// Evaluates a Legendre series at `x`.
pub fn eval_series(coeffs: &[f64], x: f64) -> f64 {
    if coeffs.is_empty() {
        return 0.0;
    }
    let values = legendre_eval_all(coeffs.len() - 1, x);
    coeffs.iter().zip(&values).map(|(c, v)| c * v).sum()
}

/// Value of a Legendre series at `x = +1` or `x = -1`, using `L_k(±1) = (±1)^k` exactly.
pub fn eval_series_at_endpoint(coeffs: &[f64], plus: bool) -> f64 {
    coeffs.iter().enumerate().map(|(k, c)| if plus || k % 2 == 0 { *c } else { -*c }).sum()
}

/// Legendre coefficients of the derivative of a Legendre series.
///
/// Uses `L_n' = sum_{k < n, n - k odd} (2k + 1) L_k`.
pub fn derivative_coeffs(coeffs: &[f64]) -> Vec<f64> {
    let n = coeffs.len();
    if n <= 1 {
        return vec![0.0];
    }
    let mut out = vec![0.0; n - 1];
    // Running sums over the two parities of j, swept from the top down.
    let mut tail = [0.0_f64; 2];
    for k in (0..n - 1).rev() {
        tail[(k + 1) % 2] += coeffs[k + 1];
        out[k] = (2 * k + 1) as f64 * tail[(k + 1) % 2];
    }
    out
}

/// Degree of a Legendre series, ignoring exact-zero trailing coefficients.
pub fn degree(coeffs: &[f64]) -> usize {
    coeffs.iter().rposition(|c| *c != 0.0).unwrap_or(0)
}

/// Exact integral of a Legendre series over `[-1, 1]` (only `L_0` contributes).
pub fn integral(coeffs: &[f64]) -> f64 {
    coeffs.first().map_or(0.0, |c| 2.0 * c)
}
