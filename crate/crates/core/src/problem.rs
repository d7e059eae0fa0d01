//! Plant-pair analysis: the zeros of `eta = x0*y1 - x1*y0` in the closed
//! right half plane and the interpolation constraints they impose on the
//! ratio `R = Delta1 / Delta0`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::poly::{
    membership_h, multiplicity_confirmed, on_nonpositive_axis, poly_roots, Cancellation,
    HMembership, Jet, RatFun, RealPoly, DEFAULT_COPRIME_TOL,
};

#[derive(Debug, Clone, Copy)]
pub struct ProblemOptions {
    /// Tolerance for cancelling common numerator/denominator roots.
    pub coprime_tol: f64,
    /// Zeros with `|Re s|` below this are boundary nodes.
    pub boundary_tol: f64,
    /// Relative tolerance for "y0(s_j) = 0" when selecting the target ratio.
    pub zero_tol: f64,
}

impl Default for ProblemOptions {
    fn default() -> Self {
        ProblemOptions {
            coprime_tol: DEFAULT_COPRIME_TOL,
            boundary_tol: 1e-8,
            zero_tol: 1e-9,
        }
    }
}

/// Two vertex plants `p_i = x_i / y_i` with `x_i, y_i` in H.
#[derive(Debug, Clone)]
pub struct PlantPair {
    pub x0: RatFun,
    pub y0: RatFun,
    pub x1: RatFun,
    pub y1: RatFun,
}

impl PlantPair {
    /// Validates membership in H and coprimeness of each factorization.
    pub fn new(x0: RatFun, y0: RatFun, x1: RatFun, y1: RatFun) -> Result<Self> {
        for (name, f) in [("x0", &x0), ("y0", &y0), ("x1", &x1), ("y1", &y1)] {
            if let HMembership::NotInH(reason) = membership_h(f)? {
                return Err(Error::Input(format!("{name} is not in H: {reason:?}")));
            }
        }
        check_coprime("(x0, y0)", &x0, &y0)?;
        check_coprime("(x1, y1)", &x1, &y1)?;
        Ok(PlantPair { x0, y0, x1, y1 })
    }

    /// `x_lambda = lambda x1 + (1 - lambda) x0` over the common denominator.
    pub fn x_lambda(&self, lambda: f64) -> RatFun {
        self.x1.scale(lambda).add(&self.x0.scale(1.0 - lambda))
    }

    pub fn y_lambda(&self, lambda: f64) -> RatFun {
        self.y1.scale(lambda).add(&self.y0.scale(1.0 - lambda))
    }

    /// Reduced plant `p_lambda = x_lambda / y_lambda`.
    pub fn plant(&self, lambda: f64, tol: f64) -> Result<RatFun> {
        let p = self.x_lambda(lambda).div(&self.y_lambda(lambda))?;
        let (num, _) = p.num().trim_relative(1e-13);
        RatFun::new(num, p.den().clone())?.reduce(tol)
    }
}

fn check_coprime(label: &str, x: &RatFun, y: &RatFun) -> Result<()> {
    if x.relative_degree() > 0 && y.relative_degree() > 0 {
        return Err(Error::Input(format!(
            "{label} is not coprime: common zero at infinity"
        )));
    }
    if x.is_zero() || y.is_zero() {
        return Err(Error::Input(format!("{label} has a zero factor")));
    }
    let closed_rhp = |f: &RatFun| -> Result<Vec<Complex64>> {
        Ok(f.zeros()?
            .into_iter()
            .map(|r| r.value)
            .filter(|r| r.re > -1e-8)
            .collect())
    };
    let xz = closed_rhp(x)?;
    let yz = closed_rhp(y)?;
    for a in &xz {
        if yz.iter().any(|b| (a - b).norm() <= 1e-6 * (1.0 + a.norm())) {
            return Err(Error::Input(format!(
                "{label} is not coprime: common closed-RHP zero {a}"
            )));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EtaZero {
    pub s: Complex64,
    pub multiplicity: usize,
}

#[derive(Debug, Clone)]
pub struct EtaAnalysis {
    pub eta: RatFun,
    /// Open-RHP zeros, sorted by decreasing real part.
    pub rhp_zeros: Vec<EtaZero>,
    /// Order of the zero of `eta` at infinity.
    pub m_infinity: usize,
    /// Clustered multiplicities agree with the approximate GCD of `(num, num')`.
    pub multiplicity_confirmed: bool,
    pub near_cancellations: Vec<Cancellation>,
}

/// Unreduced numerator of `eta` over the product of the four denominators,
/// with negligible leading terms removed.
fn eta_unreduced(p: &PlantPair) -> Result<RatFun> {
    let a = p.x0.num() * p.y1.num();
    let a = &a * &(p.x1.den() * p.y0.den());
    let b = p.x1.num() * p.y0.num();
    let b = &b * &(p.x0.den() * p.y1.den());
    let scale = a.max_abs_coeff().max(b.max_abs_coeff());
    let diff = &a - &b;
    let thresh = 1e-12 * scale;
    let start = diff.coeffs().iter().position(|c| c.abs() > thresh);
    let num = match start {
        Some(i) => RealPoly::new(diff.coeffs()[i..].to_vec()),
        None => return Err(Error::IdenticalPlants),
    };
    let den = &(p.x0.den() * p.y1.den()) * &(p.x1.den() * p.y0.den());
    RatFun::new(num, den)
}

pub fn compute_eta(p: &PlantPair, opts: &ProblemOptions) -> Result<EtaAnalysis> {
    let (eta, near_cancellations) = eta_unreduced(p)?.reduce_with_report(opts.coprime_tol)?;
    let roots = if eta.num().degree() == 0 {
        Vec::new()
    } else {
        poly_roots(eta.num(), 1e-12)?
    };
    let boundary: Vec<Complex64> = roots
        .iter()
        .map(|r| r.value)
        .filter(|r| r.re.abs() <= opts.boundary_tol)
        .collect();
    if !boundary.is_empty() {
        return Err(Error::BoundaryNode(boundary));
    }
    let rhp_zeros = roots
        .iter()
        .filter(|r| r.value.re > 0.0)
        .map(|r| EtaZero {
            s: r.value,
            multiplicity: r.multiplicity,
        })
        .collect();
    let multiplicity_confirmed =
        eta.num().degree() == 0 || multiplicity_confirmed(eta.num(), &roots, 1e-9);
    let m_infinity = eta.relative_degree().max(0) as usize;
    Ok(EtaAnalysis {
        eta,
        rhp_zeros,
        m_infinity,
        multiplicity_confirmed,
        near_cancellations: near_cancellations
            .into_iter()
            .filter(|c| c.distance > 0.0)
            .collect(),
    })
}

/// Order of the zero of `eta` at infinity.
pub fn infinity_multiplicity(p: &PlantPair) -> Result<usize> {
    Ok(eta_unreduced(p)?.relative_degree().max(0) as usize)
}

/// Which ratio carries the interpolation target at a node.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RatioSource {
    /// `y1 / y0`
    YRatio,
    /// `x1 / x0`
    XRatio,
}

fn vanishes_at(f: &RatFun, s: Complex64, tol: f64) -> bool {
    f.num().eval_complex(s).norm() <= tol * f.num().eval_scale(s)
}

/// Target-ratio selection: `y1/y0` unless `y0(s) = 0`, then `x1/x0`.
pub fn classify_node(p: &PlantPair, s: Complex64, tol: f64) -> Result<RatioSource> {
    if !vanishes_at(&p.y0, s, tol) {
        Ok(RatioSource::YRatio)
    } else if !vanishes_at(&p.x0, s, tol) {
        Ok(RatioSource::XRatio)
    } else {
        Err(Error::Infeasible(format!(
            "x0 and y0 both vanish at node {s}: factorization is not coprime there"
        )))
    }
}

pub fn ratio(p: &PlantPair, source: RatioSource) -> Result<RatFun> {
    match source {
        RatioSource::YRatio => p.y1.div(&p.y0),
        RatioSource::XRatio => p.x1.div(&p.x0),
    }
}

/// Interpolation constraint `R^(i)(s_j) = target^(i)`, `i < order`.
#[derive(Debug, Clone)]
pub struct RConstraint {
    pub node: Complex64,
    pub order: usize,
    pub target: Jet,
    pub source: RatioSource,
}

#[derive(Debug, Clone, PartialEq)]
pub enum InfinityCondition {
    None,
    /// `eta` vanishes at infinity; properness asks `R(inf) = (x1/x0)(inf)`.
    /// `target_value` is `None` when `x0(inf) = 0`.
    Required {
        multiplicity: usize,
        target_value: Option<f64>,
    },
}

#[derive(Debug, Clone)]
pub struct StabilizationProblem {
    pub plants: PlantPair,
    pub analysis: EtaAnalysis,
    pub constraints: Vec<RConstraint>,
    pub infinity_condition: InfinityCondition,
}

impl StabilizationProblem {
    pub fn total_order(&self) -> usize {
        self.constraints.iter().map(|c| c.order).sum()
    }
}

pub fn build_constraints(
    p: &PlantPair,
    a: &EtaAnalysis,
    opts: &ProblemOptions,
) -> Result<StabilizationProblem> {
    let mut constraints: Vec<RConstraint> = Vec::with_capacity(a.rhp_zeros.len());
    for z in &a.rhp_zeros {
        // conjugate nodes reuse the conjugated jet of their partner
        if z.s.im < 0.0 {
            if let Some(partner) = constraints
                .iter()
                .find(|c| (c.node - z.s.conj()).norm() <= 1e-12 * (1.0 + z.s.norm()))
            {
                let mut target = partner.target.conj();
                target.center = z.s;
                constraints.push(RConstraint {
                    node: z.s,
                    order: z.multiplicity,
                    target,
                    source: partner.source,
                });
                continue;
            }
        }
        let source = classify_node(p, z.s, opts.zero_tol)?;
        let mut target = ratio(p, source)?.jet(z.s, z.multiplicity)?;
        if z.s.im == 0.0 {
            for c in target.coeffs.iter_mut() {
                c.im = 0.0;
            }
        }
        if on_nonpositive_axis(target.value()) {
            return Err(Error::ConditionIiiViolated {
                node: z.s,
                value: target.value(),
            });
        }
        constraints.push(RConstraint {
            node: z.s,
            order: z.multiplicity,
            target,
            source,
        });
    }
    let infinity_condition = if a.m_infinity > 0 {
        let target_value = match p.x0.value_at_infinity() {
            Some(v) if v != 0.0 => p.x1.value_at_infinity().map(|x1| x1 / v),
            _ => None,
        };
        InfinityCondition::Required {
            multiplicity: a.m_infinity,
            target_value,
        }
    } else {
        InfinityCondition::None
    };
    Ok(StabilizationProblem {
        plants: p.clone(),
        analysis: a.clone(),
        constraints,
        infinity_condition,
    })
}

/// `compute_eta` followed by `build_constraints`.
pub fn analyze(p: &PlantPair, opts: &ProblemOptions) -> Result<StabilizationProblem> {
    let a = compute_eta(p, opts)?;
    build_constraints(p, &a, opts)
}
