//! Truncated Taylor series at a complex point.
//!
//! A jet of order `m` stores `f(c)`, `f'(c)`, ..., `f^(m-1)(c)/(m-1)!`. All
//! arithmetic truncates at the jet's order, so derivative constraints travel
//! through products, square roots and conformal maps without symbolic
//! differentiation.

use num_complex::Complex64;

use super::MobiusMap;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Jet {
    pub center: Complex64,
    pub coeffs: Vec<Complex64>,
}

const CENTER_TOL: f64 = 1e-10;

impl Jet {
    pub fn new(center: Complex64, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::Domain("jet order must be at least 1".into()));
        }
        Ok(Jet { center, coeffs })
    }

    pub fn from_real(center: f64, coeffs: &[f64]) -> Result<Self> {
        Jet::new(
            Complex64::new(center, 0.0),
            coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect(),
        )
    }

    /// Jet of a constant function.
    pub fn constant(center: Complex64, value: Complex64, order: usize) -> Self {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); order.max(1)];
        coeffs[0] = value;
        Jet { center, coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    pub fn value(&self) -> Complex64 {
        self.coeffs[0]
    }

    /// Evaluates the truncated series at `center + t`.
    pub fn eval_offset(&self, t: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * t + c)
    }

    pub fn scale(&self, k: Complex64) -> Jet {
        Jet {
            center: self.center,
            coeffs: self.coeffs.iter().map(|&c| c * k).collect(),
        }
    }

    pub fn conj(&self) -> Jet {
        Jet {
            center: self.center.conj(),
            coeffs: self.coeffs.iter().map(|c| c.conj()).collect(),
        }
    }

    fn check_compatible(&self, other: &Jet) -> Result<()> {
        if self.order() != other.order()
            || (self.center - other.center).norm() > CENTER_TOL * (1.0 + self.center.norm())
        {
            return Err(Error::Domain(format!(
                "incompatible jets: centers {} / {}, orders {} / {}",
                self.center,
                other.center,
                self.order(),
                other.order()
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Jet) -> Result<Jet> {
        self.check_compatible(other)?;
        Ok(Jet {
            center: self.center,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn sub(&self, other: &Jet) -> Result<Jet> {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    /// Truncated series product.
    pub fn mul(&self, other: &Jet) -> Result<Jet> {
        self.check_compatible(other)?;
        Ok(Jet {
            center: self.center,
            coeffs: series_mul(&self.coeffs, &other.coeffs, self.order()),
        })
    }

    /// Truncated series quotient.
    pub fn div(&self, other: &Jet) -> Result<Jet> {
        self.check_compatible(other)?;
        Ok(Jet {
            center: self.center,
            coeffs: series_div(&self.coeffs, &other.coeffs, self.order())?,
        })
    }

    /// Principal square root (real part of the value positive).
    pub fn sqrt(&self) -> Result<Jet> {
        let c0 = self.coeffs[0];
        if on_nonpositive_axis(c0) {
            return Err(Error::Branch(c0));
        }
        let o0 = c0.sqrt();
        let mut out = vec![o0];
        for k in 1..self.order() {
            let mut acc = self.coeffs[k];
            for i in 1..k {
                acc -= out[i] * out[k - i];
            }
            out.push(acc / (2.0 * o0));
        }
        Ok(Jet {
            center: self.center,
            coeffs: out,
        })
    }

    /// Jet of `t -> g(m(t))` at `new_center`, where `self` is the jet of `g`
    /// at `m(new_center)`.
    pub fn compose_mobius(&self, m: &MobiusMap, new_center: Complex64) -> Result<Jet> {
        let image = m.apply(new_center)?;
        if (image - self.center).norm() > CENTER_TOL * (1.0 + self.center.norm()) {
            return Err(Error::Domain(format!(
                "Möbius image {image} does not match jet center {}",
                self.center
            )));
        }
        let order = self.order();
        let (a, b, c, d) = m.params();
        let num = [a * new_center + b, Complex64::new(a, 0.0)];
        let den = [c * new_center + d, Complex64::new(c, 0.0)];
        let mut inner = series_div(&num, &den, order)?;
        inner[0] = Complex64::new(0.0, 0.0);
        Ok(Jet {
            center: new_center,
            coeffs: series_compose(&self.coeffs, &inner, order),
        })
    }

    /// Largest coefficientwise distance to another jet of the same shape.
    pub fn max_diff(&self, other: &Jet) -> f64 {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

pub(crate) fn on_nonpositive_axis(c: Complex64) -> bool {
    c.re <= 0.0 && c.im.abs() <= 1e-12 * c.norm().max(f64::MIN_POSITIVE)
}

/// Product of two ascending series, truncated to `order` terms.
pub fn series_mul(a: &[Complex64], b: &[Complex64], order: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); order];
    for (i, &x) in a.iter().enumerate().take(order) {
        for (j, &y) in b.iter().enumerate().take(order - i) {
            out[i + j] += x * y;
        }
    }
    out
}

/// Quotient of two ascending series, truncated to `order` terms.
pub fn series_div(num: &[Complex64], den: &[Complex64], order: usize) -> Result<Vec<Complex64>> {
    let d0 = den.first().copied().unwrap_or_default();
    if d0.norm() == 0.0 {
        return Err(Error::Domain("series division by a series vanishing at the center".into()));
    }
    let mut out = Vec::with_capacity(order);
    for k in 0..order {
        let mut acc = num.get(k).copied().unwrap_or_default();
        for i in 1..=k {
            if let Some(&dv) = den.get(i) {
                acc -= dv * out[k - i];
            }
        }
        out.push(acc / d0);
    }
    Ok(out)
}

/// `outer(inner(t))` for an inner series with zero constant term.
pub fn series_compose(outer: &[Complex64], inner: &[Complex64], order: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); order];
    let mut power = vec![Complex64::new(0.0, 0.0); order];
    power[0] = Complex64::new(1.0, 0.0);
    for &c in outer.iter().take(order) {
        for k in 0..order {
            out[k] += c * power[k];
        }
        power = series_mul(&power, inner, order);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cj(v: &[f64]) -> Vec<Complex64> {
        v.iter().map(|&x| Complex64::new(x, 0.0)).collect()
    }

    #[test]
    fn sqrt_of_perfect_square() {
        let j = Jet::from_real(0.0, &[4.0, 4.0, 1.0]).unwrap();
        let r = j.sqrt().unwrap();
        assert!(r.max_diff(&Jet::from_real(0.0, &[2.0, 1.0, 0.0]).unwrap()) < 1e-15);
        let one = Jet::from_real(0.0, &[1.0, 0.0, 0.0]).unwrap();
        assert_eq!(one.sqrt().unwrap(), one);
    }

    #[test]
    fn sqrt_first_order_identity_and_branch() {
        let j = Jet::new(
            Complex64::new(0.3, 0.1),
            vec![Complex64::new(2.0, -1.0), Complex64::new(0.5, 0.25)],
        )
        .unwrap();
        let r = j.sqrt().unwrap();
        assert!(r.coeffs[0].re > 0.0);
        assert!((r.coeffs[1] - j.coeffs[1] / (2.0 * r.coeffs[0])).norm() < 1e-15);
        let bad = Jet::from_real(0.0, &[-1.0, 1.0]).unwrap();
        assert!(matches!(bad.sqrt(), Err(Error::Branch(_))));
        assert!(matches!(
            Jet::from_real(0.0, &[0.0]).unwrap().sqrt(),
            Err(Error::Branch(_))
        ));
    }

    #[test]
    fn geometric_series_by_division() {
        let q = series_div(&cj(&[1.0]), &cj(&[1.0, -1.0]), 3).unwrap();
        assert_eq!(q, cj(&[1.0, 1.0, 1.0]));
    }

    #[test]
    fn constant_jet_is_map_invariant() {
        let m = MobiusMap::rhp_to_disc();
        let z = Complex64::new(0.25, 0.0);
        let j = Jet::constant(m.apply(z).unwrap(), Complex64::new(0.5, 0.0), 2);
        let out = j.compose_mobius(&m, z).unwrap();
        assert_eq!(out.coeffs, cj(&[0.5, 0.0]));
    }

    #[test]
    fn compose_first_order_chain_rule() {
        let m = MobiusMap::disc_automorphism(0.3);
        let t0 = Complex64::new(-0.2, 0.4);
        let c = m.apply(t0).unwrap();
        let j = Jet::new(c, cj(&[1.5, -0.7, 0.2])).unwrap();
        let out = j.compose_mobius(&m, t0).unwrap();
        let dm = m.derivative(t0).unwrap();
        assert!((out.coeffs[1] - j.coeffs[1] * dm).norm() < 1e-14);
        assert!(j.compose_mobius(&m, Complex64::new(0.0, 0.0)).is_err());
    }
}
