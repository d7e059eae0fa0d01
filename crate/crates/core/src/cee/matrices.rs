use nalgebra::{DMatrix, DVector};

use super::e1;
use crate::error::{Error, Result};

/// Upward shift: ones on the superdiagonal.
pub fn shift(n: usize) -> DMatrix<f64> {
    DMatrix::from_fn(n, n, |i, j| if j == i + 1 { 1.0 } else { 0.0 })
}

/// `J - v h'` with `h = e_1`; for `v = sigma` this is `Gamma`.
fn minus_first_column(v: &DVector<f64>) -> DMatrix<f64> {
    let mut m = shift(v.len());
    for i in 0..v.len() {
        m[(i, 0)] -= v[i];
    }
    m
}

pub fn gamma(sigma: &DVector<f64>) -> DMatrix<f64> {
    minus_first_column(sigma)
}

/// `F = J - a h'`, whose characteristic polynomial is `a`.
pub fn companion(a: &DVector<f64>) -> DMatrix<f64> {
    minus_first_column(a)
}

/// Solves `P = F P F' + Q` through the Kronecker form. Requires `F` Schur.
pub fn lyapunov(f: &DMatrix<f64>, q: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = f.nrows();
    if n == 0 {
        return Ok(DMatrix::zeros(0, 0));
    }
    let big = DMatrix::identity(n * n, n * n) - f.kronecker(f);
    let rhs = DVector::from_column_slice(q.as_slice());
    let sol = big
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::solver("singular Lyapunov operator", f64::INFINITY))?;
    Ok(DMatrix::from_column_slice(n, n, sol.as_slice()))
}

/// `Gamma (P - P h h' P) Gamma' + g g'`.
pub fn cee_rhs(p: &DMatrix<f64>, gamma: &DMatrix<f64>, g: &DVector<f64>) -> DMatrix<f64> {
    let ph = p * e1(p.nrows());
    let inner = p - &ph * ph.transpose();
    gamma * inner * gamma.transpose() + g * g.transpose()
}

/// `F P F' + (g - FPh)(1 - h'Ph)^{-1}(g - FPh)'`.
pub fn are_rhs(p: &DMatrix<f64>, f: &DMatrix<f64>, g: &DVector<f64>) -> Result<DMatrix<f64>> {
    let n = p.nrows();
    if n == 0 {
        return Ok(DMatrix::zeros(0, 0));
    }
    let denom = 1.0 - p[(0, 0)];
    if denom <= 0.0 {
        return Err(Error::InvalidSolution(format!(
            "h'Ph = {} is not below 1",
            p[(0, 0)]
        )));
    }
    let fp = f * p;
    let gain = g - &fp * e1(n);
    Ok(&fp * f.transpose() + &gain * gain.transpose() / denom)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn companion_has_expected_charpoly() {
        let a = DVector::from_vec(vec![-0.3, 0.02]);
        let f = companion(&a);
        // eigenvalues of z^2 - 0.3 z + 0.02 are 0.1 and 0.2
        let mut ev: Vec<f64> = f.complex_eigenvalues().iter().map(|c| c.re).collect();
        ev.sort_by(|x, y| x.partial_cmp(y).unwrap());
        assert!((ev[0] - 0.1).abs() < 1e-12 && (ev[1] - 0.2).abs() < 1e-12);
    }

    #[test]
    fn lyapunov_scalar() {
        let f = DMatrix::from_element(1, 1, 0.5);
        let q = DMatrix::from_element(1, 1, 3.0);
        let p = lyapunov(&f, &q).unwrap();
        assert!((p[(0, 0)] - 4.0).abs() < 1e-14);
    }

    #[test]
    fn lyapunov_matrix_residual() {
        let f = DMatrix::from_row_slice(3, 3, &[0.2, 1.0, 0.0, -0.1, 0.0, 1.0, 0.05, 0.0, 0.0]);
        let k = DVector::from_vec(vec![1.0, -0.5, 0.25]);
        let q = &k * k.transpose();
        let p = lyapunov(&f, &q).unwrap();
        let r = &f * &p * f.transpose() + &q - &p;
        assert!(r.norm() < 1e-13);
        assert!((&p - p.transpose()).norm() < 1e-13);
    }
}
