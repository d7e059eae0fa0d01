use num_complex::Complex64;

use super::*;
use crate::benchmarks;
use crate::interp::{normalize, pick_test, to_disc_problem, InterpNode, InterpProblem, NormalizationNode, NormalizationTranscript};
use crate::poly::Jet;
use crate::problem::{analyze, ProblemOptions};

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Exact interpolation data of `f = rev_b / (2 rev_a)`.
fn data_from(a: &RealPoly, b: &RealPoly, sigma: &SigmaChoice, nodes: &[(Complex64, usize)]) -> InterpProblem {
    let sol = complete_solution(a.clone(), b.clone(), 1.0, sigma.clone(), Some(DMatrix::zeros(a.degree(), a.degree()))).unwrap();
    let nodes = nodes
        .iter()
        .map(|&(z, m)| InterpNode {
            z,
            jet: Jet::new(z, verify::f_jet(&sol, z, m).unwrap()).unwrap(),
        })
        .collect();
    InterpProblem::new(nodes, NormalizationTranscript::identity()).unwrap()
}

fn close(p: &RealPoly, q: &RealPoly, tol: f64) -> bool {
    p.coeffs().len() == q.coeffs().len()
        && p.coeffs().iter().zip(q.coeffs()).all(|(x, y)| (x - y).abs() <= tol)
}

#[test]
fn zero_origin_data_is_trivial() {
    let sigma = SigmaChoice::from_vector(&[-0.3, 0.1]).unwrap();
    let sol = cee_solve_origin(&[0.0, 0.0], &sigma, &OriginOptions::default()).unwrap();
    assert_eq!(sol.p.norm(), 0.0);
    assert_eq!(sol.rho, 1.0);
    assert!(close(&sol.a, sigma.poly(), 0.0) && close(&sol.b, sigma.poly(), 0.0));
    let (u, um) = build_uu_origin(&[0.0, 0.0]);
    assert_eq!(u.norm() + um.norm(), 0.0);
}

#[test]
fn scalar_origin_case() {
    let c1 = 0.35;
    let (u, um) = build_uu_origin(&[c1]);
    assert_eq!((u[0], um[(0, 0)]), (c1, 0.0));
    let sol = cee_solve_origin(&[c1], &SigmaChoice::monomial(1), &OriginOptions::default()).unwrap();
    assert!((sol.p[(0, 0)] - c1 * c1).abs() < 1e-15, "{}", sol.p[(0, 0)] - c1 * c1);
    assert!((sol.a.coeff(0) + c1).abs() < 1e-15);
    assert!((sol.b.coeff(0) - c1).abs() < 1e-15);
    assert!((sol.rho * sol.rho - (1.0 - c1 * c1)).abs() < 1e-15);
    let f = assemble_f(&sol);
    let j = f.jet(c(0.0), 2).unwrap();
    assert!((j.coeffs[0] - c(0.5)).norm() < 1e-15);
    assert!((j.coeffs[1] - c(c1)).norm() < 1e-15);
}

#[test]
fn origin_and_general_agree() {
    let cases: [(&[f64], &[f64]); 3] = [
        (&[0.2, -0.1], &[0.0, 0.0]),
        (&[0.3, 0.05], &[-0.5, 0.06]),
        (&[-0.25, 0.1, 0.05], &[0.2, 0.0, -0.1]),
    ];
    for (data, sv) in cases {
        let sigma = SigmaChoice::from_vector(sv).unwrap();
        let o = cee_solve_origin(data, &sigma, &OriginOptions::default()).unwrap();
        let ip = origin_problem(data).unwrap();
        let (g, _) = solve_general(&ip, &sigma, &HomotopyOptions::default()).unwrap();
        assert!(close(&o.a, &g.a, 1e-8), "{:?} vs {:?}", o.a, g.a);
        assert!(close(&o.b, &g.b, 1e-8));
        assert!((o.rho - g.rho).abs() < 1e-8);
        assert!((&o.p - &g.p).norm() < 1e-8);
        for s in [&o, &g] {
            assert!(s.residuals.cee < 1e-10, "{:?}", s.residuals);
            assert!(s.residuals.are < 1e-9);
            assert!(s.residuals.gk < 1e-9);
            assert!(s.residuals.rho_identity < 1e-9);
        }
    }
}

#[test]
fn origin_consistency_identity() {
    // g from the u, U formula equals (b - a)/2 and c + C a
    let data = [0.3, -0.05];
    let sigma = SigmaChoice::from_vector(&[0.1, -0.2]).unwrap();
    let sol = cee_solve_origin(&data, &sigma, &OriginOptions::default()).unwrap();
    let (u, um) = build_uu_origin(&data);
    let gp = &u + &um * (sigma.vector() + gamma(&sigma.vector()) * &sol.p * e1(2));
    assert!((&gp - sol.g()).norm() < 1e-12);
    let av = tail_vector(&sol.a);
    let g2 = DVector::from_vec(vec![data[0], data[1] + data[0] * av[0]]);
    assert!((g2 - sol.g()).norm() < 1e-12);
}

#[test]
fn infeasible_origin_data() {
    let r = cee_solve_origin(&[1.2], &SigmaChoice::monomial(1), &OriginOptions::default());
    assert!(matches!(r, Err(Error::Infeasible(_))));
}

#[test]
fn round_trip_mixed_nodes() {
    let a = RealPoly::from_roots(&[Complex64::new(0.3, 0.4), Complex64::new(0.3, -0.4), c(-0.2)], 1.0);
    let b = RealPoly::from_real_roots(&[0.5, -0.6, 0.1], 1.0);
    let (sigma, rho) = recover_sigma(&a, &b).unwrap();
    let z = Complex64::new(-0.2, 0.5);
    let ip = data_from(&a, &b, &sigma, &[(c(0.0), 1), (z, 1), (z.conj(), 1), (c(0.4), 1)]);
    assert!(pick_test(&ip).unwrap().is_solvable());
    for seed in [None, Some(1), Some(2)] {
        let opts = HomotopyOptions { path_seed: seed, ..Default::default() };
        let (sol, _) = solve_general(&ip, &sigma, &opts).unwrap();
        assert!(close(&sol.a, &a, 1e-8), "{:?}", sol.a);
        assert!(close(&sol.b, &b, 1e-8));
        assert!((sol.rho - rho).abs() < 1e-8);
        let d = verify_solution(&sol, &ip).unwrap();
        assert!(d.positivity_margin > 0.0);
        assert!(d.spectral_factor_error < 1e-8);
        assert_eq!(d.rank_p, 3);
        assert_eq!(d.deg_f, 3);
    }
}

#[test]
fn trivial_solution_diagnostics() {
    let sigma = SigmaChoice::from_vector(&[-0.4]).unwrap();
    let sol = complete_solution(sigma.poly().clone(), sigma.poly().clone(), 1.0, sigma.clone(), None).unwrap();
    let ip = origin_problem(&[0.0]).unwrap();
    let d = verify_solution(&sol, &ip).unwrap();
    assert_eq!(d.spectral_residual, 0.0);
    assert_eq!(d.max_interpolation_residual(), 0.0);
    assert!((d.positivity_margin - 0.5).abs() < 1e-15);
    assert!(d.spectral_factor_error < 1e-15);
    assert_eq!((d.rank_p, d.deg_f), (0, 0));
}

#[test]
fn corrupted_solution_is_flagged() {
    let data = [0.2, 0.1];
    let sigma = SigmaChoice::from_vector(&[-0.3, 0.0]).unwrap();
    let mut sol = cee_solve_origin(&data, &sigma, &OriginOptions::default()).unwrap();
    let mut bc = sol.b.coeffs().to_vec();
    bc[1] += 0.1;
    sol.b = RealPoly::new(bc);
    let d = verify_solution(&sol, &origin_problem(&data).unwrap()).unwrap();
    assert!(d.spectral_residual > 1e-3);
}

#[test]
fn example2_degree_two() {
    let sp = analyze(&benchmarks::example2(), &ProblemOptions::default()).unwrap();
    let ip = normalize(&to_disc_problem(&sp).unwrap(), NormalizationNode::Auto).unwrap();
    assert!(pick_test(&ip).unwrap().is_solvable());
    let (sol, _) = solve_general(&ip, &SigmaChoice::monomial(2), &HomotopyOptions::default()).unwrap();
    let d = verify_solution(&sol, &ip).unwrap();
    assert_eq!(d.deg_f, 2);
    assert_eq!(d.rank_p, 2);
    assert!(d.max_interpolation_residual() < 1e-9);
    assert!(d.positivity_margin > 0.0);
    let (s, rho) = recover_sigma(&sol.a, &sol.b).unwrap();
    assert!(close(s.poly(), sol.sigma.poly(), 1e-8));
    assert!((rho - sol.rho).abs() < 1e-8);
}

#[test]
fn unnormalized_problem_rejected() {
    let ip = InterpProblem::new(
        vec![InterpNode { z: c(0.1), jet: Jet::from_real(0.1, &[1.0, 0.2]).unwrap() }],
        NormalizationTranscript::identity(),
    )
    .unwrap();
    assert!(matches!(
        solve_general(&ip, &SigmaChoice::monomial(1), &HomotopyOptions::default()),
        Err(Error::Data(_))
    ));
}
