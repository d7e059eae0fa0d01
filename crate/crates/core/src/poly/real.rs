use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Real polynomial, coefficients stored highest degree first.
///
/// The zero polynomial has an empty coefficient vector; every other value
/// has a nonzero leading coefficient.
#[derive(Clone, PartialEq, Default)]
pub struct RealPoly {
    coeffs: Vec<f64>,
}

impl RealPoly {
    /// Builds a polynomial from coefficients (highest degree first), dropping
    /// exact leading zeros.
    pub fn new(coeffs: Vec<f64>) -> Self {
        let first = coeffs.iter().position(|&c| c != 0.0);
        match first {
            Some(i) => RealPoly {
                coeffs: coeffs[i..].to_vec(),
            },
            None => RealPoly { coeffs: Vec::new() },
        }
    }

    /// Builds from coefficients in ascending order (constant term first).
    pub fn from_ascending(mut coeffs: Vec<f64>) -> Self {
        coeffs.reverse();
        RealPoly::new(coeffs)
    }

    pub fn zero() -> Self {
        RealPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        RealPoly::constant(1.0)
    }

    pub fn constant(c: f64) -> Self {
        RealPoly::new(vec![c])
    }

    /// The polynomial `s`.
    pub fn x() -> Self {
        RealPoly::new(vec![1.0, 0.0])
    }

    /// `gain * prod (s - r)` over the given real roots.
    pub fn from_real_roots(roots: &[f64], gain: f64) -> Self {
        let mut p = RealPoly::constant(gain);
        for &r in roots {
            p = &p * &RealPoly::new(vec![1.0, -r]);
        }
        p
    }

    /// `gain * prod (s - r)` over complex roots. Roots with nonzero imaginary
    /// part must appear together with their conjugate; the product is rounded
    /// to real coefficients.
    pub fn from_roots(roots: &[Complex64], gain: f64) -> Self {
        let mut acc = vec![Complex64::new(gain, 0.0)];
        for &r in roots {
            let mut next = vec![Complex64::new(0.0, 0.0); acc.len() + 1];
            for (i, &c) in acc.iter().enumerate() {
                next[i] += c;
                next[i + 1] -= c * r;
            }
            acc = next;
        }
        RealPoly::new(acc.into_iter().map(|c| c.re).collect())
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Coefficients with constant term first.
    pub fn ascending(&self) -> Vec<f64> {
        self.coeffs.iter().rev().copied().collect()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports 0 (check [`RealPoly::is_zero`]).
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn leading(&self) -> f64 {
        self.coeffs.first().copied().unwrap_or(0.0)
    }

    /// Coefficient of `s^k`.
    pub fn coeff(&self, k: usize) -> f64 {
        if self.is_zero() || k > self.degree() {
            0.0
        } else {
            self.coeffs[self.degree() - k]
        }
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    pub fn is_monic(&self) -> bool {
        self.leading() == 1.0
    }

    pub fn monic(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::Domain("cannot normalize the zero polynomial".into()));
        }
        Ok(self.scale(1.0 / self.leading()))
    }

    pub fn scale(&self, k: f64) -> Self {
        RealPoly::new(self.coeffs.iter().map(|c| c * k).collect())
    }

    /// Drops leading coefficients whose magnitude is at most `rel_tol` times the
    /// largest coefficient. Returns the trimmed polynomial and the number of
    /// dropped terms.
    pub fn trim_relative(&self, rel_tol: f64) -> (Self, usize) {
        let thresh = rel_tol * self.max_abs_coeff();
        let first = self.coeffs.iter().position(|c| c.abs() > thresh);
        match first {
            Some(i) => (RealPoly::new(self.coeffs[i..].to_vec()), i),
            None => (RealPoly::zero(), self.coeffs.len()),
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    /// `sum |c_k| |z|^k`, the natural scale for backward-error tests at `z`.
    pub fn eval_scale(&self, z: Complex64) -> f64 {
        let r = z.norm();
        self.coeffs.iter().fold(0.0, |acc, &c| acc * r + c.abs())
    }

    pub fn derivative(&self) -> Self {
        let d = self.degree();
        if d == 0 {
            return RealPoly::zero();
        }
        RealPoly::new(
            self.coeffs[..d]
                .iter()
                .enumerate()
                .map(|(i, &c)| c * (d - i) as f64)
                .collect(),
        )
    }

    /// Taylor coefficients of `p(center + t)` in ascending powers of `t`, up to `order` terms.
    pub fn taylor(&self, center: Complex64, order: usize) -> Vec<Complex64> {
        // repeated synthetic division by (s - center)
        let mut work: Vec<Complex64> = self.coeffs.iter().map(|&c| c.into()).collect();
        let mut out = Vec::with_capacity(order);
        for _ in 0..order {
            if work.is_empty() {
                out.push(Complex64::new(0.0, 0.0));
                continue;
            }
            let mut acc = Complex64::new(0.0, 0.0);
            let mut quotient = Vec::with_capacity(work.len().saturating_sub(1));
            for (i, &c) in work.iter().enumerate() {
                acc = acc * center + c;
                if i + 1 < work.len() {
                    quotient.push(acc);
                }
            }
            out.push(acc);
            work = quotient;
        }
        out
    }

    /// `s^deg * p(1/s)`: coefficient order reversed, keeping the nominal degree.
    pub fn reversed(&self) -> Self {
        RealPoly::new(self.coeffs.iter().rev().copied().collect())
    }

    /// Euclidean division; returns (quotient, remainder).
    pub fn div_rem(&self, divisor: &RealPoly) -> Result<(RealPoly, RealPoly)> {
        if divisor.is_zero() {
            return Err(Error::Domain("division by the zero polynomial".into()));
        }
        if self.is_zero() || self.degree() < divisor.degree() {
            return Ok((RealPoly::zero(), self.clone()));
        }
        let mut rem = self.coeffs.clone();
        let dd = divisor.degree();
        let qlen = self.degree() - dd + 1;
        let mut quot = vec![0.0; qlen];
        let lead = divisor.leading();
        for i in 0..qlen {
            let q = rem[i] / lead;
            quot[i] = q;
            for (j, &dc) in divisor.coeffs.iter().enumerate() {
                rem[i + j] -= q * dc;
            }
        }
        let remainder = RealPoly::new(rem[qlen..].to_vec());
        Ok((RealPoly::new(quot), remainder))
    }

    /// `p^k`.
    pub fn pow(&self, k: usize) -> Self {
        let mut acc = RealPoly::one();
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Approximate GCD by the Euclidean algorithm with remainders declared zero
    /// when their coefficients fall below `rel_tol` relative to the dividend.
    /// The result is monic (or the constant 1).
    pub fn approx_gcd(&self, other: &RealPoly, rel_tol: f64) -> RealPoly {
        let (mut a, mut b) = if self.degree() >= other.degree() {
            (self.clone(), other.clone())
        } else {
            (other.clone(), self.clone())
        };
        if b.is_zero() {
            return a.monic().unwrap_or_else(|_| RealPoly::one());
        }
        loop {
            let an = a.scale(1.0 / a.max_abs_coeff());
            let bn = b.scale(1.0 / b.max_abs_coeff());
            let (_, r) = an.div_rem(&bn).expect("nonzero divisor");
            let (r, _) = r.trim_relative(0.0);
            if r.is_zero() || r.max_abs_coeff() <= rel_tol {
                return bn.monic().unwrap_or_else(|_| RealPoly::one());
            }
            if r.degree() == 0 {
                return RealPoly::one();
            }
            a = bn;
            b = r;
        }
    }
}

impl fmt::Debug for RealPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RealPoly{:?}", self.coeffs)
    }
}

impl fmt::Display for RealPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let d = self.degree();
        let mut first = true;
        for (i, &c) in self.coeffs.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            let p = d - i;
            if !first {
                write!(f, " {} ", if c < 0.0 { '-' } else { '+' })?;
            } else if c < 0.0 {
                write!(f, "-")?;
            }
            first = false;
            let a = c.abs();
            match p {
                0 => write!(f, "{a}")?,
                1 => write!(f, "{a}*s")?,
                _ => write!(f, "{a}*s^{p}")?,
            }
        }
        Ok(())
    }
}

fn add_coeffs(a: &[f64], b: &[f64], sign: f64) -> Vec<f64> {
    let n = a.len().max(b.len());
    let mut out = vec![0.0; n];
    for (i, &c) in a.iter().enumerate() {
        out[n - a.len() + i] += c;
    }
    for (i, &c) in b.iter().enumerate() {
        out[n - b.len() + i] += sign * c;
    }
    out
}

impl Add for &RealPoly {
    type Output = RealPoly;
    fn add(self, rhs: &RealPoly) -> RealPoly {
        RealPoly::new(add_coeffs(&self.coeffs, &rhs.coeffs, 1.0))
    }
}

impl Sub for &RealPoly {
    type Output = RealPoly;
    fn sub(self, rhs: &RealPoly) -> RealPoly {
        RealPoly::new(add_coeffs(&self.coeffs, &rhs.coeffs, -1.0))
    }
}

impl Mul for &RealPoly {
    type Output = RealPoly;
    fn mul(self, rhs: &RealPoly) -> RealPoly {
        if self.is_zero() || rhs.is_zero() {
            return RealPoly::zero();
        }
        let mut out = vec![0.0; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        RealPoly::new(out)
    }
}

impl Neg for &RealPoly {
    type Output = RealPoly;
    fn neg(self) -> RealPoly {
        self.scale(-1.0)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for RealPoly {
            type Output = RealPoly;
            fn $m(self, rhs: RealPoly) -> RealPoly {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
