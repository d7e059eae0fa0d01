//! Polynomial roots by Aberth–Ehrlich simultaneous iteration, followed by
//! clustering into multiple roots.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::RealPoly;
use crate::error::{Error, Result};

/// A root together with its multiplicity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub value: Complex64,
    pub multiplicity: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct RootOptions {
    pub max_iter: usize,
    /// Backward-error tolerance: `|p(r)| <= residual_tol * sum |c_k||r|^k`.
    pub residual_tol: f64,
    /// Roots closer than `cluster_radius * (1 + |r|)` are merged.
    pub cluster_radius: f64,
}

impl Default for RootOptions {
    fn default() -> Self {
        RootOptions {
            max_iter: 200,
            residual_tol: 1e-12,
            cluster_radius: 1e-6,
        }
    }
}

/// Roots of `p` with multiplicities, using default options and the given
/// residual tolerance.
pub fn poly_roots(p: &RealPoly, tol: f64) -> Result<Vec<Root>> {
    let opts = RootOptions {
        residual_tol: tol,
        ..RootOptions::default()
    };
    poly_roots_with(p, &opts)
}

pub fn poly_roots_with(p: &RealPoly, opts: &RootOptions) -> Result<Vec<Root>> {
    if p.is_zero() {
        return Err(Error::Domain("roots of the zero polynomial".into()));
    }
    let coeffs = p.coeffs();
    let zeros_at_origin = coeffs.iter().rev().take_while(|&&c| c == 0.0).count();
    let core = RealPoly::new(coeffs[..coeffs.len() - zeros_at_origin].to_vec()).monic()?;

    let mut raw = aberth(&core, opts)?;
    raw.extend(std::iter::repeat_n(Complex64::new(0.0, 0.0), zeros_at_origin));
    let mut roots = cluster(&raw, opts.cluster_radius);
    for r in roots.iter_mut() {
        if r.value != Complex64::new(0.0, 0.0) || zeros_at_origin == 0 {
            r.value = polish(p, r.value, r.multiplicity);
        }
    }
    enforce_conjugate_symmetry(&mut roots, opts.cluster_radius);
    roots.sort_by(|a, b| {
        b.value
            .re
            .partial_cmp(&a.value.re)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(b.value.im.partial_cmp(&a.value.im).unwrap_or(std::cmp::Ordering::Equal))
    });
    Ok(roots)
}

/// Flattened root list (each root repeated by its multiplicity).
pub fn expand_roots(roots: &[Root]) -> Vec<Complex64> {
    roots
        .iter()
        .flat_map(|r| std::iter::repeat_n(r.value, r.multiplicity))
        .collect()
}

/// Cross-checks clustered multiplicities against the degree of the
/// approximate GCD of `p` and `p'`.
pub fn multiplicity_confirmed(p: &RealPoly, roots: &[Root], rel_tol: f64) -> bool {
    let repeated: usize = roots.iter().map(|r| r.multiplicity - 1).sum();
    let g = p.approx_gcd(&p.derivative(), rel_tol);
    g.degree() == repeated
}

fn aberth(p: &RealPoly, opts: &RootOptions) -> Result<Vec<Complex64>> {
    let n = p.degree();
    if n == 0 {
        return Ok(Vec::new());
    }
    let dp = p.derivative();
    let c0 = p.coeff(0).abs();
    let radius = if c0 > 0.0 {
        c0.powf(1.0 / n as f64)
    } else {
        1.0
    };
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(radius, 2.0 * PI * k as f64 / n as f64 + 0.4))
        .collect();
    let mut done = vec![false; n];
    let eps = f64::EPSILON;

    for _ in 0..opts.max_iter {
        for i in 0..n {
            if done[i] {
                continue;
            }
            let pz = p.eval_complex(z[i]);
            if pz.norm() <= 4.0 * eps * p.eval_scale(z[i]) {
                done[i] = true;
                continue;
            }
            let mut dpz = dp.eval_complex(z[i]);
            if dpz.norm() == 0.0 {
                dpz = Complex64::new(eps, eps);
            }
            let ratio = pz / dpz;
            let mut sum = Complex64::new(0.0, 0.0);
            for j in 0..n {
                if j != i {
                    let d = z[i] - z[j];
                    if d.norm() > 0.0 {
                        sum += 1.0 / d;
                    }
                }
            }
            let w = ratio / (Complex64::new(1.0, 0.0) - ratio * sum);
            if !(w.re.is_finite() && w.im.is_finite()) {
                continue;
            }
            z[i] -= w;
            if w.norm() <= eps * (1.0 + z[i].norm()) {
                done[i] = true;
            }
        }
        if done.iter().all(|&d| d) {
            break;
        }
    }

    let worst = z
        .iter()
        .map(|&r| p.eval_complex(r).norm() / p.eval_scale(r).max(f64::MIN_POSITIVE))
        .fold(0.0, f64::max);
    if !(worst <= opts.residual_tol) {
        return Err(Error::solver(
            "Aberth-Ehrlich iteration did not converge",
            worst,
        ));
    }
    Ok(z)
}

fn cluster(z: &[Complex64], radius: f64) -> Vec<Root> {
    let n = z.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while parent[r] != r {
            r = parent[r];
        }
        let mut k = i;
        while parent[k] != r {
            let next = parent[k];
            parent[k] = r;
            k = next;
        }
        r
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let tol = radius * (1.0 + z[i].norm().max(z[j].norm()));
            if (z[i] - z[j]).norm() <= tol {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[b] = a;
                }
            }
        }
    }
    let mut groups: Vec<(usize, Vec<Complex64>)> = Vec::new();
    for i in 0..n {
        let r = find(&mut parent, i);
        match groups.iter_mut().find(|(root, _)| *root == r) {
            Some((_, g)) => g.push(z[i]),
            None => groups.push((r, vec![z[i]])),
        }
    }
    groups
        .into_iter()
        .map(|(_, g)| {
            let m = g.len();
            let mean = g.iter().sum::<Complex64>() / m as f64;
            Root {
                value: mean,
                multiplicity: m,
            }
        })
        .collect()
}

/// Newton on `p^(m-1)`, which has a simple root at an m-fold root of `p`.
fn polish(p: &RealPoly, start: Complex64, m: usize) -> Complex64 {
    let mut d = p.clone();
    for _ in 1..m {
        d = d.derivative();
    }
    let dd = d.derivative();
    if dd.is_zero() {
        return start;
    }
    let mut z = start;
    let mut best = d.eval_complex(z).norm();
    for _ in 0..8 {
        let step = d.eval_complex(z) / dd.eval_complex(z);
        if !(step.re.is_finite() && step.im.is_finite()) {
            break;
        }
        let cand = z - step;
        let r = d.eval_complex(cand).norm();
        if r >= best {
            break;
        }
        z = cand;
        best = r;
        if step.norm() <= f64::EPSILON * (1.0 + z.norm()) {
            break;
        }
    }
    // a polished point must stay inside its cluster
    if (z - start).norm() > 1e-3 * (1.0 + start.norm()) {
        start
    } else {
        z
    }
}

fn enforce_conjugate_symmetry(roots: &mut [Root], radius: f64) {
    for r in roots.iter_mut() {
        if r.value.im.abs() <= radius * (1.0 + r.value.norm()) {
            r.value.im = 0.0;
        }
    }
    let n = roots.len();
    let mut used = vec![false; n];
    for i in 0..n {
        if used[i] || roots[i].value.im <= 0.0 {
            continue;
        }
        let target = roots[i].value.conj();
        let partner = (0..n)
            .filter(|&j| {
                !used[j] && roots[j].value.im < 0.0 && roots[j].multiplicity == roots[i].multiplicity
            })
            .min_by(|&a, &b| {
                (roots[a].value - target)
                    .norm()
                    .partial_cmp(&(roots[b].value - target).norm())
                    .unwrap_or(std::cmp::Ordering::Equal)
            });
        if let Some(j) = partner {
            let avg = (roots[i].value + roots[j].value.conj()) / 2.0;
            roots[i].value = avg;
            roots[j].value = avg.conj();
            used[i] = true;
            used[j] = true;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol * (1.0 + b.norm())
    }

    #[test]
    fn simple_real_roots() {
        let p = RealPoly::from_real_roots(&[15.0, 6.0], 1.0);
        let r = poly_roots(&p, 1e-12).unwrap();
        assert_eq!(r.len(), 2);
        assert!(close(r[0].value, Complex64::new(15.0, 0.0), 1e-13));
        assert!(close(r[1].value, Complex64::new(6.0, 0.0), 1e-13));
        assert!(r.iter().all(|x| x.multiplicity == 1));
    }

    #[test]
    fn double_root_is_merged() {
        let p = RealPoly::from_real_roots(&[0.5, 0.5], 1.0);
        let r = poly_roots(&p, 1e-12).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].multiplicity, 2);
        assert!(close(r[0].value, Complex64::new(0.5, 0.0), 1e-12));
        assert!(multiplicity_confirmed(&p, &r, 1e-9));
    }

    #[test]
    fn triple_complex_pair_and_origin() {
        let a = Complex64::new(-0.3, 0.8);
        let p = &RealPoly::from_roots(&[a, a.conj(), a, a.conj()], 3.0)
            * &RealPoly::new(vec![1.0, 0.0, 0.0]);
        let r = poly_roots(&p, 1e-12).unwrap();
        let total: usize = r.iter().map(|x| x.multiplicity).sum();
        assert_eq!(total, 6);
        let zero = r.iter().find(|x| x.value.norm() == 0.0).unwrap();
        assert_eq!(zero.multiplicity, 2);
        let up = r.iter().find(|x| x.value.im > 0.0).unwrap();
        let down = r.iter().find(|x| x.value.im < 0.0).unwrap();
        assert_eq!(up.multiplicity, 2);
        assert_eq!(up.value, down.value.conj());
        assert!(close(up.value, a, 1e-10));
    }

    #[test]
    fn zero_polynomial_is_rejected() {
        assert!(matches!(
            poly_roots(&RealPoly::zero(), 1e-12),
            Err(Error::Domain(_))
        ));
        assert!(poly_roots(&RealPoly::constant(2.0), 1e-12).unwrap().is_empty());
    }

    #[test]
    fn widely_spread_magnitudes() {
        let p = RealPoly::from_real_roots(&[1e-3, 1.0, 1e3, -20.0, 0.2], 1.0);
        let r = poly_roots(&p, 1e-12).unwrap();
        let mut vals: Vec<f64> = r.iter().map(|x| x.value.re).collect();
        vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (v, e) in vals.iter().zip([-20.0, 1e-3, 0.2, 1.0, 1e3]) {
            assert!((v - e).abs() <= 1e-10 * (1.0 + e.abs()), "{v} vs {e}");
        }
    }
}
