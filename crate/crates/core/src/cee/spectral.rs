use num_complex::Complex64;

use super::SigmaChoice;
use crate::error::{Error, Result};
use crate::poly::{poly_roots, RealPoly};

const GRID: usize = 1024;

/// Coefficients `c_0 .. c_n` of the symmetric Laurent polynomial
/// `a(z)b(1/z) + b(z)a(1/z) = c_0 + sum_k c_k (z^k + z^-k)`.
pub fn pseudo_poly_coeffs(a: &RealPoly, b: &RealPoly) -> Vec<f64> {
    let n = a.degree().max(b.degree());
    let pad = |p: &RealPoly| {
        let mut v = vec![0.0; n + 1 - p.coeffs().len()];
        v.extend_from_slice(p.coeffs());
        v
    };
    let (av, bv) = (pad(a), pad(b));
    (0..=n)
        .map(|k| {
            (0..=n - k)
                .map(|i| av[i] * bv[i + k] + bv[i] * av[i + k])
                .sum()
        })
        .collect()
}

/// Spectral factorization `a b* + b a* = 2 rho^2 sigma sigma*` with `sigma`
/// monic Schur and `rho > 0`.
pub fn recover_sigma(a: &RealPoly, b: &RealPoly) -> Result<(SigmaChoice, f64)> {
    let c = pseudo_poly_coeffs(a, b);
    let n = c.len() - 1;
    let min_val = (0..GRID)
        .map(|j| {
            let th = 2.0 * std::f64::consts::PI * j as f64 / GRID as f64;
            c[0] + 2.0 * (1..=n).map(|k| c[k] * (k as f64 * th).cos()).sum::<f64>()
        })
        .fold(f64::INFINITY, f64::min);
    if !(min_val > 0.0) {
        return Err(Error::NotPositive(min_val));
    }
    let scale = c.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    // vanishing top coefficients mean zeros of sigma at the origin
    let d = c[1..]
        .iter()
        .rev()
        .take_while(|x| x.abs() <= 1e-14 * scale)
        .count();
    let m = n - d;
    let mut inside: Vec<Complex64> = vec![Complex64::new(0.0, 0.0); d];
    if m > 0 {
        let mut pal = Vec::with_capacity(2 * m + 1);
        pal.extend(c[..=m].iter().rev());
        pal.extend(c[1..=m].iter());
        let roots = poly_roots(&RealPoly::new(pal), 1e-13)?;
        for r in roots {
            if r.value.norm() < 1.0 {
                inside.extend(std::iter::repeat_n(r.value, r.multiplicity));
            }
        }
        if inside.len() != n {
            return Err(Error::solver(
                format!("spectral factor has {} zeros inside the disc, expected {n}", inside.len()),
                f64::NAN,
            ));
        }
    }
    let sigma = RealPoly::from_roots(&inside, 1.0);
    let ss: f64 = sigma.coeffs().iter().map(|x| x * x).sum();
    let rho = (c[0] / (2.0 * ss)).sqrt();
    Ok((SigmaChoice::new(sigma)?, rho))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equal_pair_returns_itself() {
        let s0 = RealPoly::from_real_roots(&[0.3, -0.5], 1.0);
        let (s, rho) = recover_sigma(&s0, &s0).unwrap();
        assert!((rho - 1.0).abs() < 1e-12);
        for (x, y) in s.poly().coeffs().iter().zip(s0.coeffs()) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn monomial_pair() {
        let z2 = RealPoly::new(vec![1.0, 0.0, 0.0]);
        let (s, rho) = recover_sigma(&z2, &z2).unwrap();
        assert_eq!(s.poly().coeffs(), &[1.0, 0.0, 0.0]);
        assert!((rho - 1.0).abs() < 1e-15);
    }

    #[test]
    fn factorization_residual() {
        let a = RealPoly::new(vec![1.0, -0.4, 0.1]);
        let b = RealPoly::new(vec![1.0, 0.3, -0.2]);
        let (s, rho) = recover_sigma(&a, &b).unwrap();
        let lhs = pseudo_poly_coeffs(&a, &b);
        let rhs = pseudo_poly_coeffs(s.poly(), s.poly());
        for (x, y) in lhs.iter().zip(&rhs) {
            assert!((x - rho * rho * y).abs() < 1e-10);
        }
    }

    #[test]
    fn nonpositive_pseudo_polynomial() {
        // a b* + b a* = 2 + 2.4 cos(theta) changes sign
        let a = RealPoly::new(vec![1.0, 0.0]);
        let b = RealPoly::new(vec![1.0, 1.2]);
        assert!(matches!(recover_sigma(&a, &b), Err(Error::NotPositive(_))));
    }
}
