//! Degree-bounded Carathéodory interpolation through the covariance
//! extension equation.
//!
//! A solution for a Schur polynomial `sigma` is a pair of monic Schur
//! polynomials `a, b` of degree `n` and `rho > 0` with
//! `a(z)b(1/z) + b(z)a(1/z) = 2 rho^2 sigma(z) sigma(1/z)`, such that
//! `f(z) = rev_b(z) / (2 rev_a(z))` meets the interpolation data. The matrix
//! `P` ties the pair to the Riccati-type equation
//! `P = Gamma (P - P h h' P) Gamma' + g g'`.

mod general;
mod matrices;
mod origin;
mod spectral;
mod verify;

pub use general::{solve_general, HomotopyOptions, HomotopyStats};
pub use matrices::{are_rhs, cee_rhs, companion, gamma, lyapunov, shift};
pub use origin::{build_uu_origin, cee_solve_origin, origin_problem, OriginOptions};
pub use spectral::{pseudo_poly_coeffs, recover_sigma};
pub use verify::{assemble_f, verify_solution, Diagnostics};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::poly::{is_schur, RealPoly};

/// Monic Schur polynomial selecting one interpolant from the degree-bounded
/// family.
#[derive(Debug, Clone, PartialEq)]
pub struct SigmaChoice {
    poly: RealPoly,
}

impl SigmaChoice {
    pub fn new(poly: RealPoly) -> Result<Self> {
        if poly.is_zero() || !poly.is_monic() {
            return Err(Error::Domain(format!("sigma must be monic, got {poly}")));
        }
        if poly.degree() > 0 && !is_schur(&poly)? {
            return Err(Error::Domain(format!("sigma {poly} is not Schur stable")));
        }
        Ok(SigmaChoice { poly })
    }

    /// `prod (z - z_i)`; complex zeros must come in conjugate pairs.
    pub fn from_zeros(zeros: &[Complex64]) -> Result<Self> {
        let p = RealPoly::from_roots(zeros, 1.0);
        if p.degree() != zeros.len() {
            return Err(Error::Domain("sigma zeros are not conjugate closed".into()));
        }
        SigmaChoice::new(p)
    }

    /// `sigma(z) = z^n`.
    pub fn monomial(n: usize) -> Self {
        let mut c = vec![0.0; n + 1];
        c[0] = 1.0;
        SigmaChoice { poly: RealPoly::new(c) }
    }

    /// `sigma = [sigma_1 .. sigma_n]'` for `sigma(z) = z^n + sigma_1 z^(n-1) + ... + sigma_n`.
    pub fn from_vector(v: &[f64]) -> Result<Self> {
        let mut c = Vec::with_capacity(v.len() + 1);
        c.push(1.0);
        c.extend_from_slice(v);
        SigmaChoice::new(RealPoly::new(c))
    }

    pub fn poly(&self) -> &RealPoly {
        &self.poly
    }

    pub fn degree(&self) -> usize {
        self.poly.degree()
    }

    pub fn vector(&self) -> DVector<f64> {
        tail_vector(&self.poly)
    }
}

/// Trailing coefficients `[p_1 .. p_n]` of a monic polynomial.
pub(crate) fn tail_vector(p: &RealPoly) -> DVector<f64> {
    DVector::from_column_slice(&p.coeffs()[1..])
}

/// Monic polynomial from its trailing coefficients.
pub(crate) fn monic_from_tail(v: &[f64]) -> RealPoly {
    let mut c = Vec::with_capacity(v.len() + 1);
    c.push(1.0);
    c.extend_from_slice(v);
    RealPoly::new(c)
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Residuals {
    /// Max coefficient error of the spectral identity.
    pub spectral: f64,
    /// Max error over all interpolation conditions.
    pub interpolation: f64,
    /// `||Gamma (P - Phh'P) Gamma' + gg' - P||`.
    pub cee: f64,
    /// Riccati residual with gain `(g - FPh)/(1 - h'Ph)`.
    pub are: f64,
    /// `||Gamma P h + sigma - a - g||`.
    pub gk: f64,
    /// `|rho^2 + h'Ph - 1|`.
    pub rho_identity: f64,
}

#[derive(Debug, Clone)]
pub struct CeeSolution {
    pub p: DMatrix<f64>,
    pub a: RealPoly,
    pub b: RealPoly,
    pub rho: f64,
    pub sigma: SigmaChoice,
    pub residuals: Residuals,
    pub rank_p: usize,
}

impl CeeSolution {
    pub fn n(&self) -> usize {
        self.a.degree()
    }

    /// `g = (b - a)/2`.
    pub fn g(&self) -> DVector<f64> {
        (tail_vector(&self.b) - tail_vector(&self.a)) * 0.5
    }
}

/// Numerical rank: singular values above `rel * ||P||_2`.
pub fn numerical_rank(p: &DMatrix<f64>, rel: f64) -> usize {
    if p.nrows() == 0 {
        return 0;
    }
    let sv = p.clone().singular_values();
    let top = sv.iter().cloned().fold(0.0, f64::max);
    if top == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > rel * top).count()
}

pub const RANK_TOL: f64 = 1e-8;

/// Completes `(a, b, rho)` into a solution and fills the matrix residuals.
/// Without a given `P` it is recovered from the Lyapunov equation
/// `P = FPF' + kk'`.
pub(crate) fn complete_solution(
    a: RealPoly,
    b: RealPoly,
    rho: f64,
    sigma: SigmaChoice,
    p: Option<DMatrix<f64>>,
) -> Result<CeeSolution> {
    let n = a.degree();
    let av = tail_vector(&a);
    let bv = tail_vector(&b);
    let sv = sigma.vector();
    let f = companion(&av);
    let k = (&sv - &av) * rho;
    let p = match p {
        Some(p) => p,
        None => lyapunov(&f, &(&k * k.transpose()))?,
    };
    let p = (&p + p.transpose()) * 0.5;
    let g = (&bv - &av) * 0.5;
    let gm = gamma(&sv);
    let h = e1(n);
    let pscale = 1.0 + p.norm();

    let cee = (cee_rhs(&p, &gm, &g) - &p).norm() / pscale;
    let are = (are_rhs(&p, &f, &g)? - &p).norm() / pscale;
    let gk = (&gm * &p * &h + &sv - &av - &g).norm();
    let hph = if n == 0 { 0.0 } else { p[(0, 0)] };
    let rho_identity = (rho * rho + hph - 1.0).abs();
    let rank_p = numerical_rank(&p, RANK_TOL);
    Ok(CeeSolution {
        p,
        a,
        b,
        rho,
        sigma,
        residuals: Residuals {
            spectral: 0.0,
            interpolation: 0.0,
            cee,
            are,
            gk,
            rho_identity,
        },
        rank_p,
    })
}

pub(crate) fn e1(n: usize) -> DVector<f64> {
    let mut h = DVector::zeros(n);
    if n > 0 {
        h[0] = 1.0;
    }
    h
}

#[cfg(test)]
mod tests;
