use num_complex::Complex64;

use crate::error::{Error, Result};

/// Real fractional linear map `t -> (a t + b) / (c t + d)`, `ad - bc != 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MobiusMap {
    a: f64,
    b: f64,
    c: f64,
    d: f64,
}

impl MobiusMap {
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        let det = a * d - b * c;
        if det == 0.0 || !det.is_finite() {
            return Err(Error::Domain(format!(
                "degenerate Möbius map ({a}, {b}, {c}, {d})"
            )));
        }
        Ok(MobiusMap { a, b, c, d })
    }

    /// `s -> (1 - s) / (1 + s)`: right half plane onto the unit disc. It is an
    /// involution, so the same map also sends `z` back to `s`.
    pub fn rhp_to_disc() -> Self {
        MobiusMap {
            a: -1.0,
            b: 1.0,
            c: 1.0,
            d: 1.0,
        }
    }

    /// `s -> (1 + s) / (1 - s)`: left half plane onto the unit disc. Used only
    /// to display closed-loop poles.
    pub fn pole_display() -> Self {
        MobiusMap {
            a: 1.0,
            b: 1.0,
            c: -1.0,
            d: 1.0,
        }
    }

    /// Disc automorphism `z -> (z - alpha) / (1 - alpha z)` for real `|alpha| < 1`.
    pub fn disc_automorphism(alpha: f64) -> Self {
        MobiusMap {
            a: 1.0,
            b: -alpha,
            c: -alpha,
            d: 1.0,
        }
    }

    pub fn params(&self) -> (f64, f64, f64, f64) {
        (self.a, self.b, self.c, self.d)
    }

    pub fn det(&self) -> f64 {
        self.a * self.d - self.b * self.c
    }

    pub fn apply(&self, t: Complex64) -> Result<Complex64> {
        let den = self.c * t + self.d;
        if den.norm() == 0.0 {
            return Err(Error::Domain(format!("Möbius map has a pole at {t}")));
        }
        Ok((self.a * t + self.b) / den)
    }

    /// Image of `t`, or `None` at the pole (image at infinity).
    pub fn apply_extended(&self, t: Complex64) -> Option<Complex64> {
        self.apply(t).ok()
    }

    pub fn derivative(&self, t: Complex64) -> Result<Complex64> {
        let den = self.c * t + self.d;
        if den.norm() == 0.0 {
            return Err(Error::Domain(format!("Möbius map has a pole at {t}")));
        }
        Ok(self.det() / (den * den))
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &MobiusMap) -> MobiusMap {
        MobiusMap {
            a: self.a * inner.a + self.b * inner.c,
            b: self.a * inner.b + self.b * inner.d,
            c: self.c * inner.a + self.d * inner.c,
            d: self.c * inner.b + self.d * inner.d,
        }
    }

    pub fn inverse(&self) -> MobiusMap {
        MobiusMap {
            a: self.d,
            b: -self.b,
            c: -self.c,
            d: self.a,
        }
    }
}
