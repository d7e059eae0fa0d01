//! End-to-end runs shared by the command line tool and the Python bindings.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::cee::{
    solve_general, verify_solution, CeeSolution, Diagnostics, HomotopyOptions, HomotopyStats,
    SigmaChoice,
};
use crate::error::{Error, Result};
use crate::interp::{
    normalize, pick_test, to_disc_problem, InterpProblem, NormalizationNode, PickVerdict,
};
use crate::poly::{RatFun, RealPoly};
use crate::problem::{self, InfinityCondition, PlantPair, ProblemOptions, StabilizationProblem};
use crate::synth::{
    closed_loop, condition_iii_check, default_lambda_grid, denormalize_and_lift,
    make_compensator, ClosedLoopReport, Compensator, ConditionIiiReport, Lift,
};

#[derive(Debug, Clone)]
pub struct PipelineOptions {
    pub problem: ProblemOptions,
    pub normalization: NormalizationNode,
    pub homotopy: HomotopyOptions,
    pub lambda_grid: Vec<f64>,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        PipelineOptions {
            problem: ProblemOptions::default(),
            normalization: NormalizationNode::Auto,
            homotopy: HomotopyOptions::default(),
            lambda_grid: default_lambda_grid(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Analysis {
    pub problem: StabilizationProblem,
    /// Disc data; `None` when eta has no right-half-plane zeros.
    pub disc: Option<InterpProblem>,
    pub normalized: Option<InterpProblem>,
    pub pick: Option<PickVerdict>,
    pub warnings: Vec<String>,
}

impl Analysis {
    pub fn is_solvable(&self) -> bool {
        self.pick.as_ref().is_none_or(|p| p.is_solvable())
    }

    /// Degree bound `n` of the interpolant.
    pub fn degree_bound(&self) -> usize {
        self.disc.as_ref().map_or(0, |d| d.degree_bound())
    }
}

pub fn analyze(p: &PlantPair, opts: &PipelineOptions) -> Result<Analysis> {
    let problem = problem::analyze(p, &opts.problem)?;
    let mut warnings = Vec::new();
    if let InfinityCondition::Required {
        multiplicity,
        target_value,
    } = &problem.infinity_condition
    {
        let target = target_value.map_or("undefined".to_string(), |v| format!("{v}"));
        warnings.push(format!(
            "eta vanishes at infinity with multiplicity {multiplicity}; well-posedness asks R(inf) = (x1/x0)(inf) = {target}, which is not imposed as an interpolation condition"
        ));
    }
    if !problem.analysis.multiplicity_confirmed {
        warnings.push("eta zero multiplicities could not be confirmed by an approximate gcd".into());
    }
    for c in &problem.analysis.near_cancellations {
        warnings.push(format!(
            "near pole-zero cancellation in eta at {} (distance {:.3e})",
            c.root, c.distance
        ));
    }
    if problem.constraints.is_empty() {
        return Ok(Analysis {
            problem,
            disc: None,
            normalized: None,
            pick: None,
            warnings,
        });
    }
    let disc = to_disc_problem(&problem)?;
    let normalized = normalize(&disc, opts.normalization)?;
    let pick = pick_test(&normalized)?;
    Ok(Analysis {
        problem,
        disc: Some(disc),
        normalized: Some(normalized),
        pick: Some(pick),
        warnings,
    })
}

/// How `sigma` is chosen.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum SigmaSpec {
    /// `z^n`.
    #[default]
    Default,
    /// Monic coefficients, highest power first, or `[sigma_1 .. sigma_n]`.
    Coefficients(Vec<f64>),
    Zeros(Vec<Complex64>),
}

impl SigmaSpec {
    pub fn resolve(&self, n: usize) -> Result<SigmaChoice> {
        let sigma = match self {
            SigmaSpec::Default => return Ok(SigmaChoice::monomial(n)),
            SigmaSpec::Coefficients(c) if c.len() == n => SigmaChoice::from_vector(c),
            SigmaSpec::Coefficients(c) if c.len() == n + 1 => {
                if c[0] != 1.0 {
                    return Err(Error::Input(format!(
                        "sigma must be monic; leading coefficient is {}",
                        c[0]
                    )));
                }
                SigmaChoice::new(RealPoly::new(c.clone()))
            }
            SigmaSpec::Coefficients(c) => {
                return Err(Error::Input(format!(
                    "sigma has {} coefficients; degree n = {n} needs {n} or {}",
                    c.len(),
                    n + 1
                )))
            }
            SigmaSpec::Zeros(z) if z.len() == n => SigmaChoice::from_zeros(z),
            SigmaSpec::Zeros(z) => {
                return Err(Error::Input(format!(
                    "sigma has {} zeros; the degree bound is n = {n}",
                    z.len()
                )))
            }
        };
        sigma.map_err(|e| match e {
            Error::Domain(m) => Error::Input(m),
            e => e,
        })
    }
}

#[derive(Debug, Clone)]
pub struct Design {
    pub analysis: Analysis,
    pub sigma: SigmaChoice,
    pub sigma_defaulted: bool,
    /// `None` when there was nothing to interpolate and `R = 1` was used.
    pub solution: Option<CeeSolution>,
    pub stats: HomotopyStats,
    pub diagnostics: Option<Diagnostics>,
    pub lift: Option<Lift>,
    pub compensator: Compensator,
    pub condition_iii: ConditionIiiReport,
    pub closed_loop: ClosedLoopReport,
    pub warnings: Vec<String>,
}

impl Design {
    pub fn r(&self) -> &RatFun {
        &self.compensator.r
    }

    pub fn k(&self) -> &RatFun {
        &self.compensator.k
    }
}

pub fn synthesize(p: &PlantPair, sigma: &SigmaSpec, opts: &PipelineOptions) -> Result<Design> {
    let analysis = analyze(p, opts)?;
    synthesize_from(analysis, sigma, opts)
}

/// Synthesis on a finished analysis.
pub fn synthesize_from(
    analysis: Analysis,
    sigma: &SigmaSpec,
    opts: &PipelineOptions,
) -> Result<Design> {
    if let Some(PickVerdict::Unsolvable { min_eigenvalue, .. }) = &analysis.pick {
        return Err(Error::Infeasible(format!(
            "Pick matrix is not positive definite (min eigenvalue {min_eigenvalue:.6e})"
        )));
    }
    let n = analysis.degree_bound();
    let sigma_choice = sigma.resolve(n)?;
    let mut warnings = analysis.warnings.clone();
    let plants = &analysis.problem.plants;

    let (solution, stats, diagnostics, lift, r) = match &analysis.normalized {
        Some(ip) => {
            let (sol, stats) = solve_general(ip, &sigma_choice, &opts.homotopy)?;
            let diag = verify_solution(&sol, ip)?;
            if diag.rank_p != diag.deg_f {
                warnings.push(format!(
                    "rank P = {} differs from deg f = {}",
                    diag.rank_p, diag.deg_f
                ));
            }
            let lift = denormalize_and_lift(&sol, &ip.transcript, &analysis.problem.constraints)?;
            let r = lift.r.clone();
            (Some(sol), stats, Some(diag), Some(lift), r)
        }
        None => {
            warnings.push("eta has no right-half-plane zeros; using R = 1".into());
            (None, HomotopyStats::default(), None, None, RatFun::constant(1.0))
        }
    };

    if let InfinityCondition::Required {
        target_value: Some(t),
        ..
    } = analysis.problem.infinity_condition
    {
        if let Some(rv) = r.value_at_infinity() {
            if (rv - t).abs() > 1e-6 * (1.0 + t.abs()) {
                warnings.push(format!(
                    "infinity condition not met: R(inf) = {rv} but (x1/x0)(inf) = {t}"
                ));
            }
        }
    }

    let compensator = make_compensator(plants, &r, &analysis.problem.analysis.rhp_zeros)?;
    let condition_iii = condition_iii_check(&r)?;
    if !condition_iii.passed() {
        warnings.push(format!(
            "R reaches the nonpositive real axis near s = {}",
            condition_iii.worst_point
        ));
    }
    let closed_loop = closed_loop(plants, &compensator.k, &opts.lambda_grid)?;
    warnings.extend(closed_loop.warnings.iter().cloned());
    Ok(Design {
        analysis,
        sigma_defaulted: matches!(sigma, SigmaSpec::Default),
        sigma: sigma_choice,
        solution,
        stats,
        diagnostics,
        lift,
        compensator,
        condition_iii,
        closed_loop,
        warnings,
    })
}

#[derive(Debug)]
pub struct SweepEntry {
    pub zero: f64,
    pub outcome: Result<Design>,
}

#[derive(Debug)]
pub struct Sweep {
    pub entries: Vec<SweepEntry>,
    pub skipped: Vec<f64>,
    pub warnings: Vec<String>,
    /// Smallest pairwise distance between converged `(a, b)` pairs.
    pub min_pair_distance: Option<f64>,
}

impl Sweep {
    pub fn pairs_distinct(&self) -> bool {
        self.min_pair_distance.is_none_or(|d| d > 1e-6)
    }
}

/// One design per `sigma = (z - z0)^n`, `z0` from `zeros`; points with
/// `|z0| >= 1` are skipped.
pub fn sweep(p: &PlantPair, zeros: &[f64], opts: &PipelineOptions) -> Result<Sweep> {
    let analysis = analyze(p, opts)?;
    let n = analysis.degree_bound();
    let mut warnings = Vec::new();
    let mut skipped = Vec::new();
    let mut kept = Vec::new();
    for &z0 in zeros {
        if !(z0.abs() < 1.0) {
            warnings.push(format!("sigma zero {z0} is not inside the unit disc; skipped"));
            skipped.push(z0);
        } else {
            kept.push(z0);
        }
    }
    let entries: Vec<SweepEntry> = kept
        .par_iter()
        .map(|&z0| {
            let spec = SigmaSpec::Zeros(vec![Complex64::new(z0, 0.0); n]);
            SweepEntry {
                zero: z0,
                outcome: synthesize_from(analysis.clone(), &spec, opts),
            }
        })
        .collect();

    let coeffs: Vec<Vec<f64>> = entries
        .iter()
        .filter_map(|e| e.outcome.as_ref().ok())
        .filter_map(|d| d.solution.as_ref())
        .map(|s| s.a.coeffs().iter().chain(s.b.coeffs()).cloned().collect())
        .collect();
    let mut min_pair_distance: Option<f64> = None;
    for i in 0..coeffs.len() {
        for j in i + 1..coeffs.len() {
            let d = coeffs[i]
                .iter()
                .zip(&coeffs[j])
                .map(|(x, y)| (x - y).abs())
                .fold(0.0, f64::max);
            min_pair_distance = Some(min_pair_distance.map_or(d, |m: f64| m.min(d)));
        }
    }
    Ok(Sweep {
        entries,
        skipped,
        warnings,
        min_pair_distance,
    })
}

/// Closed-loop check of an externally supplied compensator.
pub fn verify_compensator(
    p: &PlantPair,
    k: &RatFun,
    opts: &PipelineOptions,
) -> Result<ClosedLoopReport> {
    closed_loop(p, k, &opts.lambda_grid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::benchmarks;

    #[test]
    fn example1_design() {
        let opts = PipelineOptions::default();
        let spec = SigmaSpec::Coefficients(vec![1.0, -0.9]);
        let d = synthesize(&benchmarks::example1(), &spec, &opts).unwrap();
        let r = d.r();
        // 19.871 (s + 0.1023)^2 / (s + 9.988)^2
        let expect = [19.871, 2.0 * 19.871 * 0.1023, 19.871 * 0.1023 * 0.1023];
        let den = [1.0, 2.0 * 9.988, 9.988 * 9.988];
        for (x, y) in r.num().coeffs().iter().zip(expect) {
            assert!((x - y).abs() <= 2e-2 * y.abs(), "{:?}", r);
        }
        for (x, y) in r.den().coeffs().iter().zip(den) {
            assert!((x - y).abs() <= 2e-2 * y.abs(), "{:?}", r);
        }
        assert!(d.closed_loop.all_stable, "{:#?}", d.closed_loop.results);
        assert!(!d.closed_loop.all_proper);
        assert!(d.warnings.iter().any(|w| w.contains("infinity condition not met")));
    }

    #[test]
    fn example2_design_default_sigma() {
        let d = synthesize(&benchmarks::example2(), &SigmaSpec::Default, &PipelineOptions::default())
            .unwrap();
        assert!(d.closed_loop.all_stable);
        let diag = d.diagnostics.unwrap();
        assert_eq!((diag.rank_p, diag.deg_f), (2, 2));
    }

    #[test]
    fn sigma_degree_mismatch_names_n() {
        let e = SigmaSpec::Zeros(vec![Complex64::new(0.1, 0.0)]).resolve(2).unwrap_err();
        assert!(matches!(&e, Error::Input(m) if m.contains("n = 2")));
    }

    #[test]
    fn sweep_skips_boundary_zero() {
        let s = sweep(&benchmarks::example1(), &[0.5, 1.0], &PipelineOptions::default()).unwrap();
        assert_eq!(s.skipped, vec![1.0]);
        assert_eq!(s.entries.len(), 1);
        assert!(s.entries[0].outcome.is_ok());
    }
}
