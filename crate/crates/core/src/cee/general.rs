use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::verify::verify_solution;
use super::{complete_solution, monic_from_tail, CeeSolution, SigmaChoice};
use crate::error::{Error, Result};
use crate::interp::InterpProblem;
use crate::poly::is_schur;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HomotopyOptions {
    pub initial_step: f64,
    pub min_step: f64,
    pub newton_tol: f64,
    pub max_newton: usize,
    /// Tolerance on the verified spectral and interpolation residuals.
    pub final_tol: f64,
    /// Randomizes the path (bent data path and step sizes); the end point is
    /// unchanged.
    pub path_seed: Option<u64>,
}

impl Default for HomotopyOptions {
    fn default() -> Self {
        HomotopyOptions {
            initial_step: 0.25,
            min_step: 1e-6,
            newton_tol: 1e-12,
            max_newton: 50,
            final_tol: 1e-8,
            path_seed: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct HomotopyStats {
    pub accepted_steps: usize,
    pub rejected_steps: usize,
    pub newton_iterations: usize,
}

struct Condition {
    /// `taylor[k][m]` = coefficient of `t^k` in `(z + t)^m`.
    taylor: Vec<Vec<Complex64>>,
    start: Vec<Complex64>,
    target: Vec<Complex64>,
    bend: Vec<Complex64>,
    complex: bool,
    /// The value condition at the normalized node holds by construction.
    skip_value: bool,
}

impl Condition {
    fn data(&self, tau: f64) -> Vec<Complex64> {
        let bend = tau * (1.0 - tau);
        (0..self.target.len())
            .map(|k| (1.0 - tau) * self.start[k] + tau * self.target[k] + bend * self.bend[k])
            .collect()
    }
}

struct System {
    n: usize,
    /// `sum_i S_i S_{i+k}` for the ascending-index coefficients of sigma.
    sigma_corr: Vec<f64>,
    conds: Vec<Condition>,
}

enum StepFailure {
    Newton(f64),
    NotSchur,
}

impl System {
    fn new(ip: &InterpProblem, sigma: &SigmaChoice, rng: Option<&mut ChaCha8Rng>) -> Result<Self> {
        let n = ip.degree_bound();
        let s = sigma.poly().coeffs();
        let sigma_corr = (0..=n)
            .map(|k| (0..=n - k).map(|i| s[i] * s[i + k]).sum())
            .collect();
        let mut rng = rng;
        let mut conds = Vec::new();
        for (j, node) in ip.nodes.iter().enumerate() {
            if node.z.im < 0.0 {
                continue;
            }
            let m = node.order();
            let mut taylor = vec![vec![Complex64::new(0.0, 0.0); n + 1]; m];
            for (k, row) in taylor.iter_mut().enumerate() {
                for (p, entry) in row.iter_mut().enumerate().skip(k) {
                    *entry = binomial(p, k) * node.z.powu((p - k) as u32);
                }
            }
            let mut start = vec![Complex64::new(0.0, 0.0); m];
            start[0] = Complex64::new(0.5, 0.0);
            let target = node.jet.coeffs.clone();
            let complex = node.z.im > 0.0;
            let bend = match rng.as_deref_mut() {
                Some(r) => (0..m)
                    .map(|k| {
                        let amp = 0.25 * (target[k] - start[k]).norm();
                        let re = r.gen_range(-1.0..1.0);
                        let im = if complex { r.gen_range(-1.0..1.0) } else { 0.0 };
                        amp * Complex64::new(re, im)
                    })
                    .collect(),
                None => vec![Complex64::new(0.0, 0.0); m],
            };
            conds.push(Condition {
                taylor,
                start,
                target,
                bend,
                complex,
                skip_value: j == 0,
            });
        }
        let rows: usize = conds
            .iter()
            .map(|c| (c.target.len() - c.skip_value as usize) * if c.complex { 2 } else { 1 })
            .sum();
        if rows != n {
            return Err(Error::Data(format!(
                "{rows} interpolation equations for degree bound {n}"
            )));
        }
        Ok(System { n, sigma_corr, conds })
    }

    fn dim(&self) -> usize {
        2 * self.n + 1
    }

    /// Residual and Jacobian at `x = [a_1..a_n, b_1..b_n, rho^2]`.
    fn eval(&self, x: &DVector<f64>, tau: f64) -> (DVector<f64>, DMatrix<f64>) {
        let n = self.n;
        let dim = self.dim();
        let mut av = vec![1.0; n + 1];
        let mut bv = vec![1.0; n + 1];
        av[1..].copy_from_slice(&x.as_slice()[..n]);
        bv[1..].copy_from_slice(&x.as_slice()[n..2 * n]);
        let r2 = x[2 * n];
        let mut res = DVector::zeros(dim);
        let mut jac = DMatrix::zeros(dim, dim);

        for k in 0..=n {
            let mut v = -2.0 * r2 * self.sigma_corr[k];
            for i in 0..=n - k {
                v += av[i] * bv[i + k] + bv[i] * av[i + k];
            }
            res[k] = v;
            for m in 1..=n {
                let mut da = 0.0;
                let mut db = 0.0;
                if m + k <= n {
                    da += bv[m + k];
                    db += av[m + k];
                }
                if m >= k {
                    da += bv[m - k];
                    db += av[m - k];
                }
                jac[(k, m - 1)] = da;
                jac[(k, n + m - 1)] = db;
            }
            jac[(k, 2 * n)] = -2.0 * self.sigma_corr[k];
        }

        let mut row = n + 1;
        for c in &self.conds {
            let w = c.data(tau);
            let first = c.skip_value as usize;
            for k in first..w.len() {
                let mut val = Complex64::new(0.0, 0.0);
                let mut dargs = vec![Complex64::new(0.0, 0.0); 2 * n];
                for m in 0..=n {
                    let tb = c.taylor[k][m];
                    val += bv[m] * tb;
                    if m > 0 {
                        dargs[n + m - 1] += tb;
                    }
                    for (j, wj) in w.iter().enumerate().take(k + 1) {
                        let ta = c.taylor[k - j][m];
                        val -= 2.0 * wj * av[m] * ta;
                        if m > 0 {
                            dargs[m - 1] -= 2.0 * wj * ta;
                        }
                    }
                }
                res[row] = val.re;
                for (col, d) in dargs.iter().enumerate() {
                    jac[(row, col)] = d.re;
                }
                row += 1;
                if c.complex {
                    res[row] = val.im;
                    for (col, d) in dargs.iter().enumerate() {
                        jac[(row, col)] = d.im;
                    }
                    row += 1;
                }
            }
        }
        (res, jac)
    }

    fn scale(&self) -> f64 {
        1.0 + self
            .conds
            .iter()
            .flat_map(|c| c.target.iter())
            .map(|w| w.norm())
            .fold(0.0, f64::max)
    }

    fn newton(
        &self,
        x0: &DVector<f64>,
        tau: f64,
        opts: &HomotopyOptions,
        stats: &mut HomotopyStats,
    ) -> std::result::Result<DVector<f64>, StepFailure> {
        let tol = opts.newton_tol * self.scale();
        let mut x = x0.clone();
        let mut last = f64::INFINITY;
        for _ in 0..opts.max_newton {
            stats.newton_iterations += 1;
            let (r, j) = self.eval(&x, tau);
            last = r.amax();
            if !last.is_finite() {
                return Err(StepFailure::Newton(last));
            }
            if last <= tol {
                return self.admissible(x).ok_or(StepFailure::NotSchur);
            }
            let dx = match j.lu().solve(&r) {
                Some(d) => d,
                None => return Err(StepFailure::Newton(last)),
            };
            x -= dx;
        }
        Err(StepFailure::Newton(last))
    }

    fn admissible(&self, x: DVector<f64>) -> Option<DVector<f64>> {
        let n = self.n;
        if x[2 * n] <= 0.0 {
            return None;
        }
        let a = monic_from_tail(&x.as_slice()[..n]);
        let b = monic_from_tail(&x.as_slice()[n..2 * n]);
        match (is_schur(&a), is_schur(&b)) {
            (Ok(true), Ok(true)) => Some(x),
            _ => None,
        }
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Solves the normalized problem for `sigma` by Newton continuation from the
/// trivial data (every jet equal to the constant 1/2, solved by
/// `a = b = sigma`, `rho = 1`).
pub fn solve_general(
    ip: &InterpProblem,
    sigma: &SigmaChoice,
    opts: &HomotopyOptions,
) -> Result<(CeeSolution, HomotopyStats)> {
    if !ip.is_normalized() {
        return Err(Error::Data(
            "general solver needs a normalized problem (node 0 at the origin with value 1/2)".into(),
        ));
    }
    let n = ip.degree_bound();
    if sigma.degree() != n {
        return Err(Error::Domain(format!(
            "sigma has degree {}, the degree bound is {n}",
            sigma.degree()
        )));
    }
    let mut rng = opts.path_seed.map(ChaCha8Rng::seed_from_u64);
    let sys = System::new(ip, sigma, rng.as_mut())?;
    let mut stats = HomotopyStats::default();

    let s = sigma.poly().coeffs();
    let mut x = DVector::zeros(2 * n + 1);
    for i in 0..n {
        x[i] = s[i + 1];
        x[n + i] = s[i + 1];
    }
    x[2 * n] = 1.0;

    let mut tau = 0.0;
    let mut step = opts.initial_step;
    while tau < 1.0 {
        let mut h = step;
        if let Some(r) = rng.as_mut() {
            h *= r.gen_range(0.5..1.0);
        }
        let t = (tau + h).min(1.0);
        match sys.newton(&x, t, opts, &mut stats) {
            Ok(xn) => {
                x = xn;
                tau = t;
                stats.accepted_steps += 1;
                step = (step * 2.0).min(opts.initial_step);
            }
            Err(f) => {
                stats.rejected_steps += 1;
                step /= 2.0;
                if step < opts.min_step {
                    return Err(match f {
                        StepFailure::NotSchur => Error::InvalidSolution(format!(
                            "continuation leaves the Schur region near tau = {tau:.6}"
                        )),
                        StepFailure::Newton(res) => Error::solver(
                            format!("homotopy step underflow at tau = {tau:.6}; last good point {:?}", x.as_slice()),
                            res,
                        ),
                    });
                }
            }
        }
    }

    let a = monic_from_tail(&x.as_slice()[..n]);
    let b = monic_from_tail(&x.as_slice()[n..2 * n]);
    let rho = x[2 * n].sqrt();
    let mut sol = complete_solution(a, b, rho, sigma.clone(), None)?;
    let diag = verify_solution(&sol, ip)?;
    sol.residuals.spectral = diag.spectral_residual;
    sol.residuals.interpolation = diag.max_interpolation_residual();
    let worst = sol.residuals.spectral.max(sol.residuals.interpolation);
    if !(worst <= opts.final_tol * sys.scale()) {
        return Err(Error::solver("final residual above tolerance", worst));
    }
    Ok((sol, stats))
}
