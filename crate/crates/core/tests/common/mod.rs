#![allow(dead_code)]

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use simstab::cee::{recover_sigma, SigmaChoice};
use simstab::interp::{InterpNode, InterpProblem, NormalizationTranscript};
use simstab::poly::{Jet, RatFun, RealPoly};

pub fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Monic real polynomial with random roots of modulus at most `radius`.
pub fn random_schur(rng: &mut ChaCha8Rng, n: usize, radius: f64) -> RealPoly {
    let mut roots = Vec::with_capacity(n);
    while roots.len() < n {
        let r = radius * rng.gen::<f64>().sqrt();
        if n - roots.len() >= 2 && rng.gen_bool(0.5) {
            let z = Complex64::from_polar(r, rng.gen_range(0.2..std::f64::consts::PI - 0.2));
            roots.push(z);
            roots.push(z.conj());
        } else {
            roots.push(c(if rng.gen_bool(0.5) { r } else { -r }));
        }
    }
    RealPoly::from_roots(&roots, 1.0)
}

/// `f = rev_b / (2 rev_a)`.
pub fn interpolant(a: &RealPoly, b: &RealPoly) -> RatFun {
    let n = a.degree();
    let rev = |p: &RealPoly| RealPoly::from_ascending(p.coeffs()[..=n].to_vec());
    RatFun::new(rev(b), rev(a).scale(2.0)).unwrap()
}

/// Schur pair with a positive pseudo-polynomial, with its `sigma` and `rho`.
pub fn random_positive_pair(
    rng: &mut ChaCha8Rng,
    n: usize,
) -> (RealPoly, RealPoly, SigmaChoice, f64) {
    loop {
        let a = random_schur(rng, n, 0.6);
        let b = random_schur(rng, n, 0.6);
        if a.approx_gcd(&b, 1e-3).degree() > 0 {
            continue;
        }
        if let Ok((sigma, rho)) = recover_sigma(&a, &b) {
            if rho > 0.05 {
                return (a, b, sigma, rho);
            }
        }
    }
}

/// Node positions and orders: the origin first, `n + 1` conditions in total,
/// complex nodes in conjugate pairs.
pub fn random_layout(rng: &mut ChaCha8Rng, n: usize) -> Vec<(Complex64, usize)> {
    let total = n + 1;
    let m0 = if total >= 2 && rng.gen_bool(0.4) { 2 } else { 1 };
    let mut layout = vec![(c(0.0), m0)];
    let mut left = total - m0;
    let far = |layout: &[(Complex64, usize)], z: Complex64| {
        z.norm() < 0.7 && layout.iter().all(|(w, _)| (w - z).norm() > 0.25 && (w - z.conj()).norm() > 0.25)
    };
    while left > 0 {
        let z = Complex64::new(rng.gen_range(-0.7..0.7), rng.gen_range(-0.7..0.7));
        if left >= 2 && rng.gen_bool(0.4) && z.im.abs() > 0.15 {
            if far(&layout, z) {
                layout.push((z, 1));
                layout.push((z.conj(), 1));
                left -= 2;
            }
        } else {
            let zr = c(z.re);
            if far(&layout, zr) {
                let m = if left >= 2 && rng.gen_bool(0.3) { 2 } else { 1 };
                layout.push((zr, m));
                left -= m;
            }
        }
    }
    layout
}

/// Exact interpolation data of `f` on `layout`.
pub fn exact_problem(f: &RatFun, layout: &[(Complex64, usize)]) -> InterpProblem {
    let mut nodes: Vec<InterpNode> = layout
        .iter()
        .map(|&(z, m)| {
            let mut jet = f.jet(z, m).unwrap();
            if z.im == 0.0 {
                for w in &mut jet.coeffs {
                    w.im = 0.0;
                }
            }
            InterpNode { z, jet }
        })
        .collect();
    if nodes[0].z == c(0.0) && (nodes[0].jet.coeffs[0] - c(0.5)).norm() < 1e-14 {
        nodes[0].jet.coeffs[0] = c(0.5);
    }
    InterpProblem::new(nodes, NormalizationTranscript::identity()).unwrap()
}

pub fn max_coeff_diff(p: &RealPoly, q: &RealPoly) -> f64 {
    if p.coeffs().len() != q.coeffs().len() {
        return f64::INFINITY;
    }
    p.coeffs()
        .iter()
        .zip(q.coeffs())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Random jet with a value off the nonpositive real axis.
pub fn random_jet(rng: &mut ChaCha8Rng, center: Complex64, order: usize) -> Jet {
    let mut coeffs: Vec<Complex64> = (0..order)
        .map(|_| Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)))
        .collect();
    coeffs[0].re = rng.gen_range(0.1..3.0);
    Jet::new(center, coeffs).unwrap()
}

/// Routh array test: true iff every root of `p` is in the open left half plane.
pub fn routh_hurwitz(p: &RealPoly) -> bool {
    let c = p.coeffs();
    let n = c.len() - 1;
    let sign = c[0].signum();
    let width = n / 2 + 1;
    let row = |skip: usize| -> Vec<f64> {
        let mut r: Vec<f64> = c.iter().skip(skip).step_by(2).map(|x| x * sign).collect();
        r.resize(width + 1, 0.0);
        r
    };
    let (mut prev, mut cur) = (row(0), row(1));
    if prev[0] <= 0.0 {
        return false;
    }
    for _ in 1..=n {
        if cur[0] <= 0.0 {
            return false;
        }
        let mut next = vec![0.0; width + 1];
        for i in 0..width {
            next[i] = prev[i + 1] - prev[0] * cur[i + 1] / cur[0];
        }
        prev = cur;
        cur = next;
    }
    true
}
