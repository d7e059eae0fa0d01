mod common;

use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::*;
use simstab::cee::{solve_general, HomotopyOptions};
use simstab::cli::config::parse_number;
use simstab::cli::report::{num, to_json_string};
use simstab::interp::{pick_test, InterpNode, InterpProblem, NormalizationTranscript};
use simstab::poly::{is_hurwitz, is_schur, poly_roots, Jet, MobiusMap, RatFun, RealPoly};
use simstab::problem::PlantPair;
use simstab::synth::{closed_loop, delta_numerator};

fn cplx(r: f64, i: f64) -> Complex64 {
    Complex64::new(r, i)
}

fn real_poly(max_deg: usize) -> impl Strategy<Value = RealPoly> {
    prop::collection::vec(-3.0..3.0f64, 1..=max_deg).prop_map(|mut v| {
        v.insert(0, 1.0);
        RealPoly::new(v)
    })
}

fn ratfun() -> impl Strategy<Value = RatFun> {
    (real_poly(3), prop::collection::vec(0.2..3.0f64, 1..=3), 0.5..2.0f64).prop_map(|(n, poles, g)| {
        let den = RealPoly::from_real_roots(&poles.iter().map(|p| -p).collect::<Vec<_>>(), 1.0);
        RatFun::new(n.scale(g), den).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn mobius_inverse_round_trip(a in -3.0..3.0f64, b in -3.0..3.0f64, c in -3.0..3.0f64, d in -3.0..3.0f64,
                                 re in -2.0..2.0f64, im in -2.0..2.0f64) {
        prop_assume!((a * d - b * c).abs() > 0.1);
        let m = MobiusMap::new(a, b, c, d).unwrap();
        let t = cplx(re, im);
        prop_assume!((c * t + d).norm() > 0.05);
        let back = m.inverse().apply(m.apply(t).unwrap()).unwrap();
        prop_assert!((back - t).norm() <= 1e-10 * (1.0 + t.norm()));
    }

    #[test]
    fn jet_sqrt_squares_back(v in prop::collection::vec((-2.0..2.0f64, -2.0..2.0f64), 1..5), re0 in 0.05..3.0f64) {
        let mut coeffs: Vec<Complex64> = v.iter().map(|&(r, i)| cplx(r, i)).collect();
        coeffs[0].re = re0;
        let j = Jet::new(cplx(0.1, -0.2), coeffs).unwrap();
        let r = j.sqrt().unwrap();
        prop_assert!(r.coeffs[0].re > 0.0);
        let scale = j.coeffs.iter().map(|w| w.norm()).fold(1.0, f64::max);
        prop_assert!(r.mul(&r).unwrap().max_diff(&j) <= 1e-10 * scale);
    }

    #[test]
    fn roots_rebuild_polynomial(roots in prop::collection::vec(-4.0..4.0f64, 1..6)) {
        let p = RealPoly::from_real_roots(&roots, 1.0);
        let found = poly_roots(&p, 1e-10).unwrap();
        let total: usize = found.iter().map(|r| r.multiplicity).sum();
        prop_assert_eq!(total, roots.len());
        for r in &found {
            prop_assert!(p.eval_complex(r.value).norm() <= 1e-6 * p.eval_scale(r.value));
        }
    }

    #[test]
    fn hurwitz_and_schur_follow_roots(roots in prop::collection::vec(0.05..0.95f64, 1..5), flip in any::<bool>()) {
        let s: Vec<f64> = roots.iter().map(|r| if flip { *r } else { -*r }).collect();
        let p = RealPoly::from_real_roots(&s, 1.0);
        prop_assert_eq!(is_hurwitz(&p).unwrap(), !flip);
        prop_assert!(is_schur(&p).unwrap());
        prop_assert_eq!(routh_hurwitz(&p), !flip);
    }

    #[test]
    fn characteristic_polynomial_is_affine(x0 in ratfun(), y0 in ratfun(), x1 in ratfun(), y1 in ratfun(),
                                           k in ratfun(), l in 0.0..1.0f64) {
        let Ok(p) = PlantPair::new(x0, y0, x1, y1) else { return Ok(()) };
        let (d0, d1) = (delta_numerator(&p, &k, 0.0), delta_numerator(&p, &k, 1.0));
        let mix = &d1.scale(l) + &d0.scale(1.0 - l);
        let scale = d0.max_abs_coeff().max(d1.max_abs_coeff()).max(1.0);
        prop_assert!(max_coeff_diff(&delta_numerator(&p, &k, l), &mix) <= 1e-9 * scale);
    }

    #[test]
    fn json_floats_round_trip(x in any::<f64>()) {
        prop_assume!(x.is_finite());
        let text = to_json_string(&num(x));
        let back: f64 = serde_json::from_str::<serde_json::Value>(&text).unwrap().as_f64().unwrap();
        prop_assert_eq!(back, x);
    }

    #[test]
    fn rationals_parse_to_their_quotient(p in -100_000i64..100_000, q in 1i64..10_000) {
        prop_assert_eq!(parse_number(&format!("{p}/{q}")).unwrap(), p as f64 / q as f64);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn solver_recovers_exact_data(seed in any::<u64>(), n in 1usize..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (a, b, sigma, rho) = random_positive_pair(&mut rng, n);
        let ip = exact_problem(&interpolant(&a, &b), &random_layout(&mut rng, n));
        prop_assert!(pick_test(&ip).unwrap().is_solvable());
        let (sol, _) = solve_general(&ip, &sigma, &HomotopyOptions::default()).unwrap();
        prop_assert!(max_coeff_diff(&sol.a, &a) <= 1e-8);
        prop_assert!(max_coeff_diff(&sol.b, &b) <= 1e-8);
        prop_assert!((sol.rho - rho).abs() <= 1e-8);
        prop_assert!(sol.residuals.cee <= 1e-10 && sol.residuals.are <= 1e-9);
    }

    #[test]
    fn pick_verdict_survives_automorphisms(seed in any::<u64>(), beta in -0.8..0.8f64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = 2;
        let layout = random_layout(&mut rng, n);
        let nodes: Vec<InterpNode> = {
            let mut out: Vec<InterpNode> = Vec::new();
            for &(z, m) in &layout {
                let jet = match out.iter().find(|nd| (nd.z - z.conj()).norm() < 1e-12) {
                    Some(p) => p.jet.conj(),
                    None => {
                        let mut j = random_jet(&mut rng, z, m);
                        if z.im == 0.0 {
                            j.coeffs.iter_mut().for_each(|w| w.im = 0.0);
                        }
                        j
                    }
                };
                out.push(InterpNode { z, jet });
            }
            out
        };
        let ip = InterpProblem::new(nodes, NormalizationTranscript::identity()).unwrap();
        let m = MobiusMap::disc_automorphism(beta);
        let moved: Vec<InterpNode> = ip.nodes.iter().map(|nd| {
            let z = m.apply(nd.z).unwrap();
            InterpNode { z, jet: nd.jet.compose_mobius(&m.inverse(), z).unwrap() }
        }).collect();
        let moved = InterpProblem::new(moved, NormalizationTranscript::identity()).unwrap();
        let (v1, v2) = (pick_test(&ip).unwrap(), pick_test(&moved).unwrap());
        prop_assume!(v1.min_eigenvalue().abs() > 1e-9 && v2.min_eigenvalue().abs() > 1e-9);
        prop_assert_eq!(v1.is_solvable(), v2.is_solvable());
    }

    #[test]
    fn closed_loop_verdict_matches_routh(k in ratfun()) {
        let p = simstab::benchmarks::example2();
        let report = closed_loop(&p, &k, &[0.0, 0.5, 1.0]).unwrap();
        for r in &report.results {
            if r.roots_at_infinity == 0 {
                prop_assert_eq!(r.stable, routh_hurwitz(&r.char_poly));
            }
        }
    }
}
