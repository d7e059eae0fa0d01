use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::verify::verify_solution;
use super::{cee_rhs, complete_solution, e1, gamma, monic_from_tail, CeeSolution, SigmaChoice};
use crate::error::{Error, Result};
use crate::interp::{pick_test, InterpNode, InterpProblem, NormalizationTranscript};
use crate::poly::{is_schur, Jet};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OriginOptions {
    /// Damping of the fixed-point iteration.
    pub theta: f64,
    /// Residual below which Newton takes over.
    pub switch_tol: f64,
    pub max_fixed_point: usize,
    pub max_newton: usize,
}

impl Default for OriginOptions {
    fn default() -> Self {
        OriginOptions {
            theta: 0.5,
            switch_tol: 1e-4,
            max_fixed_point: 20_000,
            max_newton: 50,
        }
    }
}

/// Single node at the origin: `f(z) = 1/2 + c_1 z + ... + c_n z^n + O(z^(n+1))`.
pub fn origin_problem(c: &[f64]) -> Result<InterpProblem> {
    let mut w = Vec::with_capacity(c.len() + 1);
    w.push(0.5);
    w.extend_from_slice(c);
    InterpProblem::new(
        vec![InterpNode {
            z: Complex64::new(0.0, 0.0),
            jet: Jet::from_real(0.0, &w)?,
        }],
        NormalizationTranscript::identity(),
    )
}

/// `u = (I + C)^{-1} c` and `U = (I + C)^{-1} C`, with `C` strictly lower
/// triangular Toeplitz carrying `c_k` on its k-th subdiagonal.
pub fn build_uu_origin(c: &[f64]) -> (DVector<f64>, DMatrix<f64>) {
    let n = c.len();
    let cm = DMatrix::from_fn(n, n, |i, j| if i > j { c[i - j - 1] } else { 0.0 });
    let ipc = DMatrix::identity(n, n) + &cm;
    let cv = DVector::from_column_slice(c);
    // unit lower triangular, so forward substitution cannot fail
    let u = ipc
        .solve_lower_triangular(&cv)
        .expect("unit triangular system");
    let um = ipc
        .solve_lower_triangular(&cm)
        .expect("unit triangular system");
    (u, um)
}

struct OriginMaps {
    gamma: DMatrix<f64>,
    sigma: DVector<f64>,
    u: DVector<f64>,
    um: DMatrix<f64>,
}

impl OriginMaps {
    fn g(&self, p: &DMatrix<f64>) -> DVector<f64> {
        let h = e1(p.nrows());
        &self.u + &self.um * (&self.sigma + &self.gamma * p * h)
    }

    fn rhs(&self, p: &DMatrix<f64>) -> DMatrix<f64> {
        cee_rhs(p, &self.gamma, &self.g(p))
    }

    /// Derivative of `rhs(P) - P` in direction `X`.
    fn d_residual(&self, p: &DMatrix<f64>, x: &DMatrix<f64>) -> DMatrix<f64> {
        let h = e1(p.nrows());
        let ph = p * &h;
        let xh = x * &h;
        let g = self.g(p);
        let dg = &self.um * &self.gamma * &xh;
        let inner = x - &xh * ph.transpose() - &ph * xh.transpose();
        &self.gamma * inner * self.gamma.transpose() + &dg * g.transpose() + &g * dg.transpose()
            - x
    }
}

fn symmetrize(p: DMatrix<f64>) -> DMatrix<f64> {
    (&p + p.transpose()) * 0.5
}

/// Solves `P = Gamma (P - Phh'P) Gamma' + g(P) g(P)'` with
/// `g(P) = u + U sigma + U Gamma P h` for origin data `c`, then assembles
/// `a = (I - U)(Gamma P h + sigma) - u`, `b = (I + U)(Gamma P h + sigma) + u`
/// and `rho = sqrt(1 - h'Ph)`.
pub fn cee_solve_origin(
    c: &[f64],
    sigma: &SigmaChoice,
    opts: &OriginOptions,
) -> Result<CeeSolution> {
    let n = c.len();
    if sigma.degree() != n {
        return Err(Error::Data(format!(
            "sigma has degree {}, origin data has {n} coefficients",
            sigma.degree()
        )));
    }
    let ip = origin_problem(c)?;
    let verdict = pick_test(&ip)?;
    if !verdict.is_solvable() {
        return Err(Error::Infeasible(format!(
            "Pick matrix is not positive definite (min eigenvalue {:.3e})",
            verdict.min_eigenvalue()
        )));
    }
    let sv = sigma.vector();
    let (u, um) = build_uu_origin(c);
    let maps = OriginMaps {
        gamma: gamma(&sv),
        sigma: sv.clone(),
        u,
        um,
    };

    let mut p = DMatrix::zeros(n, n);
    let mut trace = Vec::new();
    let mut res = (maps.rhs(&p) - &p).norm();
    let mut it = 0;
    while res >= opts.switch_tol {
        if it >= opts.max_fixed_point || !res.is_finite() {
            return Err(Error::solver(
                format!("CEE fixed-point iteration did not settle; residual trace {trace:?}"),
                res,
            ));
        }
        p = symmetrize(&p * (1.0 - opts.theta) + maps.rhs(&p) * opts.theta);
        res = (maps.rhs(&p) - &p).norm();
        if it % 1000 == 0 {
            trace.push(res);
        }
        it += 1;
    }

    let target = |p: &DMatrix<f64>| 1e-14 * p.norm().max(1e-2);
    let mut converged = res <= target(&p);
    for _ in 0..opts.max_newton {
        if converged {
            break;
        }
        let r = maps.rhs(&p) - &p;
        let mut jac = DMatrix::zeros(n * n, n * n);
        for col in 0..n * n {
            let mut e = DMatrix::zeros(n, n);
            e[(col % n, col / n)] = 1.0;
            jac.set_column(col, &DVector::from_column_slice(maps.d_residual(&p, &e).as_slice()));
        }
        let step = jac
            .lu()
            .solve(&DVector::from_column_slice(r.as_slice()))
            .ok_or_else(|| Error::solver("singular CEE Newton system", r.norm()))?;
        let dp = DMatrix::from_column_slice(n, n, step.as_slice());
        p = symmetrize(&p - &dp);
        let new_res = (maps.rhs(&p) - &p).norm();
        trace.push(new_res);
        converged = new_res <= target(&p) || dp.norm() <= 1e-16 * (1.0 + p.norm());
        res = new_res;
    }
    let rel = if p.norm() > 0.0 { res / p.norm() } else { res };
    if !(rel < 1e-10 || res < 1e-12) {
        return Err(Error::solver(
            format!("CEE Newton iteration stalled; residual trace {trace:?}"),
            res,
        ));
    }

    let hph = if n == 0 { 0.0 } else { p[(0, 0)] };
    if !(hph < 1.0) {
        return Err(Error::InvalidSolution(format!("h'Ph = {hph} is not below 1")));
    }
    let x = &maps.gamma * &p * e1(n) + &sv;
    let eye = DMatrix::identity(n, n);
    let av = (&eye - &maps.um) * &x - &maps.u;
    let bv = (&eye + &maps.um) * &x + &maps.u;
    let a = monic_from_tail(av.as_slice());
    let b = monic_from_tail(bv.as_slice());
    for (name, q) in [("a", &a), ("b", &b)] {
        if n > 0 && !is_schur(q)? {
            return Err(Error::InvalidSolution(format!("{name} = {q} is not Schur")));
        }
    }
    let mut sol = complete_solution(a, b, (1.0 - hph).sqrt(), sigma.clone(), Some(p))?;
    let diag = verify_solution(&sol, &ip)?;
    sol.residuals.spectral = diag.spectral_residual;
    sol.residuals.interpolation = diag.max_interpolation_residual();
    Ok(sol)
}
