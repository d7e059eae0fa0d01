//! From the disc interpolant back to `R = Delta1/Delta0`, the compensator
//! and its closed loops over the plant family.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::cee::{assemble_f, CeeSolution};
use crate::error::{Error, Result};
use crate::interp::NormalizationTranscript;
use crate::poly::{
    expand_roots, on_nonpositive_axis, poly_roots, real_factor, MobiusMap, RatFun, RealPoly,
};
use crate::problem::{EtaZero, PlantPair, RConstraint};

pub const TRANSPORT_TOL: f64 = 1e-7;
pub const CANCELLATION_TOL: f64 = 1e-6;
pub const PROPERNESS_TOL: f64 = 1e-6;
pub const STABILITY_MARGIN: f64 = 1e-9;
/// Leading coefficients below this (relative) are roots at infinity.
pub const LEADING_TRIM: f64 = 1e-10;

/// `0, 0.1, ..., 1`.
pub fn default_lambda_grid() -> Vec<f64> {
    (0..=10).map(|i| i as f64 / 10.0).collect()
}

/// The interpolant carried back to the right half plane.
#[derive(Debug, Clone)]
pub struct Lift {
    /// Un-normalized disc function `f(z)`.
    pub f_disc: RatFun,
    /// `F(s) = f((1 - s)/(1 + s))`.
    pub f: RatFun,
    /// `R = F^2`.
    pub r: RatFun,
    /// Worst jet mismatch of `R` per constraint node.
    pub transport_residuals: Vec<f64>,
}

/// Undoes the normalization and maps `f` to `F(s)`, `R = F^2`; checks the
/// jets of `R` at every constraint node and that `F` keeps the right half
/// plane on sampled points.
pub fn denormalize_and_lift(
    sol: &CeeSolution,
    transcript: &NormalizationTranscript,
    constraints: &[RConstraint],
) -> Result<Lift> {
    let f_norm = assemble_f(sol);
    let f_disc = f_norm
        .mobius_substitute(&transcript.automorphism())?
        .scale(1.0 / transcript.gamma);
    let f = f_disc
        .mobius_substitute(&transcript.s_to_z)?
        .trim_numerator(1e-13)
        .reduce(1e-9)?;
    let r = f.mul(&f);

    let mut transport_residuals = Vec::with_capacity(constraints.len());
    let mut worst: Option<(Complex64, f64)> = None;
    for c in constraints {
        let jet = r.jet(c.node, c.order)?;
        let scale = c.target.coeffs.iter().map(|x| x.norm()).fold(1.0, f64::max);
        let res = jet.max_diff(&c.target) / scale;
        transport_residuals.push(res);
        if worst.is_none_or(|(_, w)| res > w) {
            worst = Some((c.node, res));
        }
    }
    if let Some((node, residual)) = worst {
        if !(residual <= TRANSPORT_TOL) {
            return Err(Error::SynthesisResidual { node, residual });
        }
    }
    for &re in &[1e-3, 0.1, 1.0, 10.0, 1e3] {
        for &im in &[0.0, 0.3, 3.0, 30.0, 3e3] {
            for sgn in [1.0, -1.0] {
                let s = Complex64::new(re, sgn * im);
                let v = f.eval(s)?;
                if !(v.re > 0.0) {
                    return Err(Error::InvalidSolution(format!(
                        "F({s}) = {v} leaves the right half plane"
                    )));
                }
            }
        }
    }
    Ok(Lift {
        f_disc,
        f,
        r,
        transport_residuals,
    })
}

#[derive(Debug, Clone)]
pub struct Compensator {
    pub r: RatFun,
    pub k: RatFun,
    /// Worst relative residual of the forced cancellations at the eta zeros.
    pub cancellation_residual: f64,
}

impl Compensator {
    pub fn is_proper(&self) -> bool {
        self.k.is_proper()
    }
}

/// Max over the jet of `p` at `s`, relative to the size of `p` there.
fn relative_jet_norm(p: &RealPoly, s: Complex64, order: usize) -> f64 {
    let scale = p.eval_scale(s).max(p.max_abs_coeff()).max(f64::MIN_POSITIVE);
    p.taylor(s, order)
        .iter()
        .map(|c| c.norm())
        .fold(0.0, f64::max)
        / scale
}

/// `k = (y1 - R y0) / (R x0 - x1)`. Numerator and denominator are divided
/// by the factors of the right-half-plane zeros of `eta`, which both must
/// share.
pub fn make_compensator(p: &PlantPair, r: &RatFun, eta_zeros: &[EtaZero]) -> Result<Compensator> {
    let (rn, rd) = (r.num(), r.den());
    let nn = &(&(p.y1.num() * p.y0.den()) * rd) - &(&(rn * p.y0.num()) * p.y1.den());
    let dn = &(&(rn * p.x0.num()) * p.x1.den()) - &(&(p.x1.num() * p.x0.den()) * rd);
    let scale = (rn.max_abs_coeff() + rd.max_abs_coeff()).max(f64::MIN_POSITIVE);
    if dn.is_zero() || dn.max_abs_coeff() <= 1e-13 * scale {
        return Err(Error::Degenerate(
            "R x0 - x1 vanishes identically: R equals x1/x0".into(),
        ));
    }

    let mut cancellation_residual: f64 = 0.0;
    let mut deflator = RealPoly::one();
    for z in eta_zeros.iter().filter(|z| z.s.im >= 0.0) {
        for q in [&nn, &dn] {
            let res = relative_jet_norm(q, z.s, z.multiplicity);
            cancellation_residual = cancellation_residual.max(res);
            if !(res <= CANCELLATION_TOL) {
                return Err(Error::SynthesisResidual {
                    node: z.s,
                    residual: res,
                });
            }
        }
        deflator = &deflator * &real_factor(z.s).pow(z.multiplicity);
    }
    let nn = nn.div_rem(&deflator)?.0.trim_relative(LEADING_TRIM).0;
    let dn = dn.div_rem(&deflator)?.0.trim_relative(LEADING_TRIM).0;
    let k = RatFun::new(
        &(&nn * p.x0.den()) * p.x1.den(),
        &(&dn * p.y1.den()) * p.y0.den(),
    )?
    .reduce(1e-7)?;
    Ok(Compensator {
        r: r.clone(),
        k,
        cancellation_residual,
    })
}

#[derive(Debug, Clone)]
pub struct ConditionIiiReport {
    /// Minimum distance of sampled values of `R` to `(-inf, 0]`.
    pub margin: f64,
    pub worst_point: Complex64,
    pub worst_value: Complex64,
    /// Largest `|arg R(i w)|` in degrees, and where.
    pub max_arg_deg: f64,
    pub max_arg_omega: f64,
    /// Sample points moved off poles of `R`.
    pub shifted_points: Vec<Complex64>,
}

impl ConditionIiiReport {
    pub fn passed(&self) -> bool {
        self.margin > 0.0
    }
}

fn distance_to_cut(w: Complex64) -> f64 {
    if w.re >= 0.0 {
        w.norm()
    } else {
        w.im.abs()
    }
}

fn log_space(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    let (a, b) = (lo.log10(), hi.log10());
    (0..n).map(move |i| 10f64.powf(a + (b - a) * i as f64 / (n - 1) as f64))
}

/// Samples `R` on the imaginary axis, a large semicircle and an interior grid
/// of the right half plane.
pub fn condition_iii_check(r: &RatFun) -> Result<ConditionIiiReport> {
    let mut pts: Vec<Complex64> = Vec::new();
    for w in log_space(1e-4, 1e4, 2001) {
        pts.push(Complex64::new(0.0, w));
        pts.push(Complex64::new(0.0, -w));
    }
    for i in 0..=180 {
        let th = -std::f64::consts::FRAC_PI_2 + std::f64::consts::PI * i as f64 / 180.0;
        pts.push(Complex64::from_polar(1e6, th));
    }
    let ims: Vec<f64> = std::iter::once(0.0)
        .chain(log_space(1e-2, 1e3, 21).flat_map(|x| [x, -x]))
        .collect();
    for re in log_space(1e-3, 1e3, 25) {
        for &im in &ims {
            pts.push(Complex64::new(re, im));
        }
    }

    let mut report = ConditionIiiReport {
        margin: f64::INFINITY,
        worst_point: Complex64::new(0.0, 0.0),
        worst_value: Complex64::new(0.0, 0.0),
        max_arg_deg: 0.0,
        max_arg_omega: 0.0,
        shifted_points: Vec::new(),
    };
    for s in pts {
        let mut s = s;
        let mut v = r.eval(s);
        let mut tries = 0;
        while !matches!(v, Ok(x) if x.is_finite()) && tries < 5 {
            report.shifted_points.push(s);
            s += Complex64::new(1e-7, 1e-7) * (1.0 + s.norm());
            v = r.eval(s);
            tries += 1;
        }
        let w = v?;
        let d = distance_to_cut(w);
        if d < report.margin {
            report.margin = d;
            report.worst_point = s;
            report.worst_value = w;
        }
        if s.re == 0.0 {
            let arg = w.arg().abs().to_degrees();
            if arg > report.max_arg_deg {
                report.max_arg_deg = arg;
                report.max_arg_omega = s.im.abs();
            }
        }
        if on_nonpositive_axis(w) {
            report.margin = 0.0;
        }
    }
    Ok(report)
}

#[derive(Debug, Clone)]
pub struct LambdaResult {
    pub lambda: f64,
    /// `D_lambda D_k + N_lambda N_k` with negligible leading terms removed.
    pub char_poly: RealPoly,
    pub s_poles: Vec<Complex64>,
    /// Images under `z = (1 + s)/(1 - s)`.
    pub z_poles: Vec<Complex64>,
    /// Degree lost to negligible leading coefficients.
    pub roots_at_infinity: usize,
    pub stable: bool,
    /// `1 + k(inf) p(inf)`; `None` when either factor is improper.
    pub properness_value: Option<f64>,
    pub proper: bool,
}

#[derive(Debug, Clone)]
pub struct ClosedLoopReport {
    pub results: Vec<LambdaResult>,
    pub all_stable: bool,
    pub all_proper: bool,
    pub warnings: Vec<String>,
}

fn closed_loop_at(p: &PlantPair, k: &RatFun, lambda: f64) -> Result<LambdaResult> {
    let pl = p.plant(lambda, 1e-9)?;
    let raw = &(pl.den() * k.den()) + &(pl.num() * k.num());
    if raw.is_zero() {
        return Err(Error::Degenerate(format!(
            "closed-loop characteristic polynomial vanishes at lambda = {lambda}"
        )));
    }
    let (char_poly, roots_at_infinity) = raw.trim_relative(LEADING_TRIM);
    if char_poly.is_zero() {
        return Err(Error::Degenerate(format!(
            "closed-loop characteristic polynomial vanishes at lambda = {lambda}"
        )));
    }
    let s_poles = if char_poly.degree() == 0 {
        Vec::new()
    } else {
        expand_roots(&poly_roots(&char_poly, 1e-12)?)
    };
    let disp = MobiusMap::pole_display();
    let z_poles: Vec<Complex64> = s_poles
        .iter()
        .map(|&s| {
            disp.apply_extended(s)
                .unwrap_or(Complex64::new(f64::INFINITY, 0.0))
        })
        .collect();
    let stable = s_poles
        .iter()
        .zip(&z_poles)
        .all(|(s, z)| s.re < 0.0 && z.norm() < 1.0 - STABILITY_MARGIN);
    let properness_value = match (k.value_at_infinity(), pl.value_at_infinity()) {
        (Some(kv), Some(pv)) => Some(1.0 + kv * pv),
        _ => None,
    };
    let proper = matches!(properness_value, Some(v) if v.abs() > PROPERNESS_TOL);
    Ok(LambdaResult {
        lambda,
        char_poly,
        s_poles,
        z_poles,
        roots_at_infinity,
        stable,
        properness_value,
        proper,
    })
}

/// Closed loops of `k` with every `p_lambda` on the grid. Stability covers
/// the finite roots; a vanishing `1 + k(inf) p(inf)` is reported as a
/// warning.
pub fn closed_loop(p: &PlantPair, k: &RatFun, lambda_grid: &[f64]) -> Result<ClosedLoopReport> {
    if let Some(l) = lambda_grid.iter().find(|l| !(0.0..=1.0).contains(*l)) {
        return Err(Error::Input(format!("lambda {l} outside [0, 1]")));
    }
    let mut grid = lambda_grid.to_vec();
    grid.sort_by(|a, b| a.partial_cmp(b).expect("finite lambda"));
    grid.dedup();
    let results: Vec<LambdaResult> = grid
        .par_iter()
        .map(|&l| closed_loop_at(p, k, l))
        .collect::<Result<_>>()?;
    let all_stable = results.iter().all(|r| r.stable);
    let all_proper = results.iter().all(|r| r.proper);
    let mut warnings = Vec::new();
    if !k.is_proper() {
        warnings.push(format!(
            "compensator is improper (relative degree {})",
            k.relative_degree()
        ));
    }
    let bad: Vec<String> = results
        .iter()
        .filter(|r| !r.proper)
        .map(|r| format!("{}", r.lambda))
        .collect();
    if !bad.is_empty() {
        warnings.push(format!(
            "closed loop is not well posed at infinity (|1 + k(inf) p(inf)| <= {PROPERNESS_TOL:e}) for lambda in [{}]",
            bad.join(", ")
        ));
    }
    for r in results.iter().filter(|r| r.roots_at_infinity > 0) {
        warnings.push(format!(
            "lambda = {}: {} characteristic root(s) at infinity",
            r.lambda, r.roots_at_infinity
        ));
    }
    Ok(ClosedLoopReport {
        results,
        all_stable,
        all_proper,
        warnings,
    })
}

/// Characteristic polynomial over the common denominator of the plant
/// factors; exactly affine in `lambda`.
pub fn delta_numerator(p: &PlantPair, k: &RatFun, lambda: f64) -> RealPoly {
    let xl = &(p.x1.num() * p.x0.den()).scale(lambda) + &(p.x0.num() * p.x1.den()).scale(1.0 - lambda);
    let yl = &(p.y1.num() * p.y0.den()).scale(lambda) + &(p.y0.num() * p.y1.den()).scale(1.0 - lambda);
    let xden = p.x0.den() * p.x1.den();
    let yden = p.y0.den() * p.y1.den();
    &(&(&xl * &yden) * k.num()) + &(&(&yl * &xden) * k.den())
}
