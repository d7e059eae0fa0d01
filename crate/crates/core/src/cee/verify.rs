use num_complex::Complex64;

use super::{pseudo_poly_coeffs, CeeSolution};
use crate::error::Result;
use crate::interp::InterpProblem;
use crate::poly::{series_div, RatFun, RealPoly};

const CIRCLE_POINTS: usize = 512;
const CIRCLE_RADIUS: f64 = 0.999;

/// `f(z) = rev_b(z) / (2 rev_a(z))` with `rev_p(z) = z^n p(1/z)`.
pub fn assemble_f(sol: &CeeSolution) -> RatFun {
    let n = sol.n();
    let rev = |p: &RealPoly| RealPoly::from_ascending(p.coeffs()[..=n].to_vec());
    RatFun::new(rev(&sol.b), rev(&sol.a).scale(2.0)).expect("rev_a has constant term 1")
}

#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostics {
    /// Max coefficient error of `ab* + ba* - 2 rho^2 sigma sigma*`.
    pub spectral_residual: f64,
    /// `|f^(k)(z_j)/k! - w_jk|` per node and order.
    pub interpolation_residuals: Vec<Vec<f64>>,
    /// Minimum of `Re f` on the circle of radius 0.999.
    pub positivity_margin: f64,
    /// Max of `|v(z)v(1/z) - (phi(z) + phi(1/z))|` on the unit circle, `v = rho sigma / a`.
    pub spectral_factor_error: f64,
    pub rank_p: usize,
    pub deg_f: usize,
    pub cee_residual: f64,
    pub are_residual: f64,
}

impl Diagnostics {
    pub fn max_interpolation_residual(&self) -> f64 {
        self.interpolation_residuals
            .iter()
            .flatten()
            .cloned()
            .fold(0.0, f64::max)
    }
}

/// Taylor coefficients of `f` at `z`.
pub(crate) fn f_jet(sol: &CeeSolution, z: Complex64, order: usize) -> Result<Vec<Complex64>> {
    let n = sol.n();
    let rev = |p: &RealPoly| RealPoly::from_ascending(p.coeffs()[..=n].to_vec());
    let num = rev(&sol.b).taylor(z, order);
    let den: Vec<Complex64> = rev(&sol.a)
        .taylor(z, order)
        .into_iter()
        .map(|c| 2.0 * c)
        .collect();
    series_div(&num, &den, order)
}

/// McMillan degree of `b/a`.
pub(crate) fn degree_of_f(sol: &CeeSolution) -> usize {
    let g = sol.a.approx_gcd(&sol.b, 1e-8);
    sol.n() - g.degree()
}

pub fn verify_solution(sol: &CeeSolution, ip: &InterpProblem) -> Result<Diagnostics> {
    let lhs = pseudo_poly_coeffs(&sol.a, &sol.b);
    let ss = pseudo_poly_coeffs(sol.sigma.poly(), sol.sigma.poly());
    let r2 = sol.rho * sol.rho;
    let spectral_residual = lhs
        .iter()
        .zip(&ss)
        .map(|(l, s)| (l - r2 * s).abs())
        .fold(0.0, f64::max);

    let mut interpolation_residuals = Vec::with_capacity(ip.nodes.len());
    for node in &ip.nodes {
        let fj = f_jet(sol, node.z, node.order())?;
        interpolation_residuals.push(
            fj.iter()
                .zip(&node.jet.coeffs)
                .map(|(x, y)| (x - y).norm())
                .collect(),
        );
    }

    let f = assemble_f(sol);
    let mut positivity_margin = f64::INFINITY;
    let mut spectral_factor_error: f64 = 0.0;
    let (a, sigma) = (&sol.a, sol.sigma.poly());
    for j in 0..CIRCLE_POINTS {
        let th = 2.0 * std::f64::consts::PI * j as f64 / CIRCLE_POINTS as f64;
        let z = Complex64::from_polar(CIRCLE_RADIUS, th);
        positivity_margin = positivity_margin.min(f.eval(z)?.re);

        let u = Complex64::from_polar(1.0, th);
        let ui = u.conj();
        let v = |x: Complex64| sol.rho * sigma.eval_complex(x) / a.eval_complex(x);
        let phi = |x: Complex64| 0.5 * sol.b.eval_complex(x) / a.eval_complex(x);
        let err = (v(u) * v(ui) - (phi(u) + phi(ui))).norm();
        spectral_factor_error = spectral_factor_error.max(err);
    }

    Ok(Diagnostics {
        spectral_residual,
        interpolation_residuals,
        positivity_margin,
        spectral_factor_error,
        rank_p: sol.rank_p,
        deg_f: degree_of_f(sol),
        cee_residual: sol.residuals.cee,
        are_residual: sol.residuals.are,
    })
}
