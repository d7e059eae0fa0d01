use std::fmt;

use num_complex::Complex64;

use super::jet::series_div;
use super::roots::{poly_roots, Root};
use super::{Jet, MobiusMap, RealPoly};
use crate::error::{Error, Result};

/// Default tolerance for declaring a numerator and a denominator root common.
pub const DEFAULT_COPRIME_TOL: f64 = 1e-9;

/// Real rational function `num / den` with a monic denominator.
///
/// Construction via [`RatFun::new`] only normalizes; call [`RatFun::reduce`]
/// to cancel common factors.
#[derive(Clone, PartialEq)]
pub struct RatFun {
    num: RealPoly,
    den: RealPoly,
}

/// A factor removed from both numerator and denominator by [`RatFun::reduce_with_report`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cancellation {
    pub root: Complex64,
    pub multiplicity: usize,
    /// Distance between the matched numerator and denominator roots.
    pub distance: f64,
}

impl RatFun {
    pub fn new(num: RealPoly, den: RealPoly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::Domain("rational function with zero denominator".into()));
        }
        let lead = den.leading();
        Ok(RatFun {
            num: num.scale(1.0 / lead),
            den: den.scale(1.0 / lead),
        })
    }

    pub fn from_poly(p: RealPoly) -> Self {
        RatFun {
            num: p,
            den: RealPoly::one(),
        }
    }

    pub fn constant(c: f64) -> Self {
        RatFun::from_poly(RealPoly::constant(c))
    }

    /// `gain * prod(s - z) / prod(s - p)`.
    pub fn from_zpk(zeros: &[Complex64], poles: &[Complex64], gain: f64) -> Result<Self> {
        RatFun::new(
            RealPoly::from_roots(zeros, gain),
            RealPoly::from_roots(poles, 1.0),
        )
    }

    pub fn num(&self) -> &RealPoly {
        &self.num
    }

    pub fn den(&self) -> &RealPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// `deg den - deg num` (negative when improper).
    pub fn relative_degree(&self) -> i64 {
        if self.num.is_zero() {
            return i64::MAX;
        }
        self.den.degree() as i64 - self.num.degree() as i64
    }

    pub fn is_proper(&self) -> bool {
        self.relative_degree() >= 0
    }

    /// Limit as `s -> infinity`; `None` when it is infinite.
    pub fn value_at_infinity(&self) -> Option<f64> {
        match self.relative_degree() {
            d if d > 0 => Some(0.0),
            0 => Some(self.num.leading() / self.den.leading()),
            _ => None,
        }
    }

    pub fn eval(&self, s: Complex64) -> Result<Complex64> {
        let d = self.den.eval_complex(s);
        if d.norm() == 0.0 {
            return Err(Error::Domain(format!("evaluation at pole {s}")));
        }
        Ok(self.num.eval_complex(s) / d)
    }

    pub fn eval_real(&self, s: f64) -> Result<f64> {
        Ok(self.eval(Complex64::new(s, 0.0))?.re)
    }

    pub fn scale(&self, k: f64) -> RatFun {
        RatFun {
            num: self.num.scale(k),
            den: self.den.clone(),
        }
    }

    pub fn neg(&self) -> RatFun {
        self.scale(-1.0)
    }

    /// Sum over the product of denominators (not reduced).
    pub fn add(&self, other: &RatFun) -> RatFun {
        if self.den == other.den {
            return RatFun {
                num: &self.num + &other.num,
                den: self.den.clone(),
            };
        }
        RatFun {
            num: &(&self.num * &other.den) + &(&other.num * &self.den),
            den: &self.den * &other.den,
        }
    }

    pub fn sub(&self, other: &RatFun) -> RatFun {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &RatFun) -> RatFun {
        RatFun {
            num: &self.num * &other.num,
            den: &self.den * &other.den,
        }
    }

    pub fn div(&self, other: &RatFun) -> Result<RatFun> {
        if other.is_zero() {
            return Err(Error::Domain("division by the zero rational function".into()));
        }
        RatFun::new(&self.num * &other.den, &self.den * &other.num)
    }

    /// Drops negligible leading coefficients of the numerator produced by
    /// cancellation in sums.
    pub fn trim_numerator(&self, rel_tol: f64) -> RatFun {
        let (num, _) = self.num.trim_relative(rel_tol);
        RatFun {
            num,
            den: self.den.clone(),
        }
    }

    pub fn poles(&self) -> Result<Vec<Root>> {
        poly_roots(&self.den, 1e-12)
    }

    pub fn zeros(&self) -> Result<Vec<Root>> {
        if self.num.is_zero() {
            return Ok(Vec::new());
        }
        poly_roots(&self.num, 1e-12)
    }

    /// Cancels numerator/denominator roots closer than `tol * (1 + |r|)`.
    pub fn reduce(&self, tol: f64) -> Result<RatFun> {
        Ok(self.reduce_with_report(tol)?.0)
    }

    pub fn reduce_with_report(&self, tol: f64) -> Result<(RatFun, Vec<Cancellation>)> {
        if self.num.is_zero() {
            return Ok((RatFun::constant(0.0), Vec::new()));
        }
        if self.num.degree() == 0 || self.den.degree() == 0 {
            return Ok((self.clone(), Vec::new()));
        }
        let nr = poly_roots(&self.num, 1e-12)?;
        let dr = poly_roots(&self.den, 1e-12)?;
        let mut num_used = vec![0usize; nr.len()];
        let mut num = self.num.clone();
        let mut den = self.den.clone();
        let mut cancelled = Vec::new();
        for d in dr.iter().filter(|r| r.value.im >= 0.0) {
            let best = nr
                .iter()
                .enumerate()
                .filter(|(i, r)| r.value.im >= 0.0 && num_used[*i] < r.multiplicity)
                .map(|(i, r)| (i, (r.value - d.value).norm()))
                .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal));
            let Some((i, dist)) = best else { continue };
            if dist > tol * (1.0 + d.value.norm()) {
                continue;
            }
            let k = (nr[i].multiplicity - num_used[i]).min(d.multiplicity);
            num_used[i] += k;
            let root = (nr[i].value + d.value) / 2.0;
            let factor = real_factor(root).pow(k);
            num = num.div_rem(&factor)?.0;
            den = den.div_rem(&factor)?.0;
            cancelled.push(Cancellation {
                root,
                multiplicity: k,
                distance: dist,
            });
        }
        Ok((RatFun::new(num, den)?, cancelled))
    }

    /// Taylor jet of the function at `s0`, by series division.
    pub fn jet(&self, s0: Complex64, order: usize) -> Result<Jet> {
        if order == 0 {
            return Err(Error::Domain("jet order must be at least 1".into()));
        }
        let d = self.den.taylor(s0, order);
        if d[0].norm() <= 1e-14 * self.den.eval_scale(s0) {
            return Err(Error::Domain(format!("jet requested at pole {s0}")));
        }
        let n = self.num.taylor(s0, order);
        Jet::new(s0, series_div(&n, &d, order)?)
    }

    /// `r ∘ m` as a rational function in the variable of `m`.
    pub fn mobius_substitute(&self, m: &MobiusMap) -> Result<RatFun> {
        let (a, b, c, d) = m.params();
        if m.det() == 0.0 {
            return Err(Error::Domain("degenerate Möbius map".into()));
        }
        let deg = self.num.degree().max(self.den.degree());
        let lin_num = RealPoly::new(vec![a, b]);
        let lin_den = RealPoly::new(vec![c, d]);
        let sub = |p: &RealPoly| -> RealPoly {
            let mut acc = RealPoly::zero();
            for i in 0..=p.degree() {
                let ci = p.coeff(i);
                if ci == 0.0 {
                    continue;
                }
                let term = &lin_num.pow(i) * &lin_den.pow(deg - i);
                acc = &acc + &term.scale(ci);
            }
            acc
        };
        let num = sub(&self.num);
        let den = sub(&self.den);
        if den.is_zero() {
            return Err(Error::Domain("substitution yields a zero denominator".into()));
        }
        RatFun::new(num, den)
    }
}

/// Real polynomial with root `r` (and its conjugate when `r` is complex).
pub fn real_factor(r: Complex64) -> RealPoly {
    if r.im == 0.0 {
        RealPoly::new(vec![1.0, -r.re])
    } else {
        RealPoly::new(vec![1.0, -2.0 * r.re, r.norm_sqr()])
    }
}

impl fmt::Debug for RatFun {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RatFun({:?} / {:?})", self.num.coeffs(), self.den.coeffs())
    }
}

impl fmt::Display for RatFun {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) / ({})", self.num, self.den)
    }
}
