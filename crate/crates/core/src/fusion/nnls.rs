//! Active-set non-negative least squares (Lawson–Hanson), run on the normal
//! equations. Intended for the handful of spectral bands in a weight fit, where
//! the Gram matrix is tiny even when the pixel count is large.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct NnlsSolution {
    pub x: Vec<f64>,
    /// `‖A x − b‖₂`
    pub residual_norm: f64,
    /// Largest violation of the optimality conditions on the gradient `Aᵀ(b − A x)`.
    pub kkt_residual: f64,
    pub iterations: usize,
}

/// Solves `min ‖A x − b‖₂` subject to `x ≥ 0`.
pub fn nnls(a: &DMatrix<f64>, b: &DVector<f64>) -> Result<NnlsSolution> {
    if a.nrows() != b.len() {
        return Err(Error::DimensionMismatch(format!("{} rows vs {} targets", a.nrows(), b.len())));
    }
    if a.ncols() == 0 || a.nrows() == 0 {
        return Err(Error::InvalidParameter("empty least-squares problem".into()));
    }
    let gram = a.transpose() * a;
    let atb = a.transpose() * b;
    let mut sol = nnls_gram(&gram, &atb, b.norm_squared())?;
    sol.residual_norm = (a * DVector::from_column_slice(&sol.x) - b).norm();
    Ok(sol)
}

/// Same problem given `G = AᵀA`, `c = Aᵀb` and `bᵀb`. The residual is recovered
/// from the quadratic form, so it loses precision when the fit is near exact.
pub fn nnls_gram(gram: &DMatrix<f64>, atb: &DVector<f64>, btb: f64) -> Result<NnlsSolution> {
    let n = atb.len();
    if gram.nrows() != n || gram.ncols() != n {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} Gram matrix for {n} unknowns",
            gram.nrows(),
            gram.ncols()
        )));
    }
    let scale = gram.amax().max(atb.amax()).max(1.0);
    let tol = 10.0 * f64::EPSILON * scale * n as f64;

    let mut x = DVector::<f64>::zeros(n);
    let mut passive = vec![false; n];
    let gradient = |x: &DVector<f64>| atb - gram * x;
    let mut w = gradient(&x);
    let max_iter = 30 * n.max(1);
    let mut iterations = 0;

    loop {
        let candidate = (0..n).filter(|&j| !passive[j] && w[j] > tol).max_by(|&i, &j| w[i].total_cmp(&w[j]));
        let Some(j) = candidate else { break };
        if iterations >= max_iter {
            break;
        }
        passive[j] = true;

        loop {
            iterations += 1;
            let idx: Vec<usize> = (0..n).filter(|&k| passive[k]).collect();
            let z = solve_subset(gram, atb, &idx);
            if z.iter().all(|&v| v > 0.0) {
                for (&k, &v) in idx.iter().zip(&z) {
                    x[k] = v;
                }
                break;
            }
            // step back toward the feasible region
            let mut alpha = f64::INFINITY;
            for (&k, &v) in idx.iter().zip(&z) {
                if v <= 0.0 {
                    alpha = alpha.min(x[k] / (x[k] - v));
                }
            }
            for (&k, &v) in idx.iter().zip(&z) {
                x[k] += alpha * (v - x[k]);
                if x[k] <= tol * 1e-3 {
                    x[k] = 0.0;
                    passive[k] = false;
                }
            }
            if iterations >= max_iter || !passive.iter().any(|&p| p) {
                break;
            }
        }
        w = gradient(&x);
    }

    let kkt_residual = (0..n).map(|j| if x[j] > 0.0 { w[j].abs() } else { w[j].max(0.0) }).fold(0.0, f64::max);
    let obj = (x.dot(&(gram * &x)) - 2.0 * x.dot(atb) + btb).max(0.0);
    Ok(NnlsSolution { x: x.iter().copied().collect(), residual_norm: obj.sqrt(), kkt_residual, iterations })
}

/// Unconstrained solve of the normal equations restricted to `idx`.
fn solve_subset(gram: &DMatrix<f64>, atb: &DVector<f64>, idx: &[usize]) -> Vec<f64> {
    let m = idx.len();
    let g = DMatrix::from_fn(m, m, |r, c| gram[(idx[r], idx[c])]);
    let c = DVector::from_fn(m, |r, _| atb[idx[r]]);
    if let Some(chol) = g.clone().cholesky() {
        return chol.solve(&c).iter().copied().collect();
    }
    // rank-deficient subset (collinear bands): minimum-norm solution
    let svd = g.svd(true, true);
    let eps = svd.singular_values.max() * 1e-12;
    svd.solve(&c, eps).map(|z| z.iter().copied().collect()).unwrap_or_else(|_| vec![0.0; m])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_two_band_fit() {
        let a = DMatrix::from_row_slice(3, 2, &[1.0, 0.0, 0.0, 1.0, 1.0, 1.0]);
        let b = DVector::from_vec(vec![1.0, 1.0, 2.0]);
        let s = nnls(&a, &b).unwrap();
        assert!((s.x[0] - 1.0).abs() < 1e-12 && (s.x[1] - 1.0).abs() < 1e-12);
        assert!(s.residual_norm < 1e-12);
        assert!(s.kkt_residual < 1e-12);
    }

    #[test]
    fn clamps_negative_direction() {
        let a = DMatrix::from_column_slice(3, 1, &[1.0, 2.0, 3.0]);
        let b = -&a.column(0).into_owned();
        let s = nnls(&a, &b).unwrap();
        assert_eq!(s.x, vec![0.0]);
        assert!((s.residual_norm - b.norm()).abs() < 1e-12);
    }

    #[test]
    fn collinear_columns_still_solve() {
        let a = DMatrix::from_row_slice(3, 2, &[1.0, 2.0, 2.0, 4.0, 3.0, 6.0]);
        let b = DVector::from_vec(vec![2.0, 4.0, 6.0]);
        let s = nnls(&a, &b).unwrap();
        assert!(s.residual_norm < 1e-9);
        assert!(s.x.iter().all(|&v| v >= 0.0));
    }

    #[test]
    fn shape_errors() {
        let a = DMatrix::<f64>::zeros(3, 2);
        assert!(nnls(&a, &DVector::zeros(2)).is_err());
    }
}
