//! Carathéodory interpolation data on the unit disc.
//!
//! Constraints on `R = Delta1/Delta0` at right-half-plane nodes become
//! constraints on `f(z) = sqrt(R)((1 - z)/(1 + z))`, which must map the disc
//! into the right half plane. A disc automorphism then moves a real node to
//! the origin, and a positive scaling sets its value to `1/2`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::poly::{Jet, MobiusMap};
use crate::problem::StabilizationProblem;

const NODE_TOL: f64 = 1e-12;
const CONJ_TOL: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct InterpNode {
    pub z: Complex64,
    /// Jet of `f` at `z`; its order is the node multiplicity.
    pub jet: Jet,
}

impl InterpNode {
    pub fn order(&self) -> usize {
        self.jet.order()
    }

    pub fn is_real(&self) -> bool {
        self.z.im == 0.0
    }
}

/// Maps applied to reach the normalized problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalizationTranscript {
    /// Automorphism parameter: normalized `z' = (z - alpha)/(1 - alpha z)`.
    pub alpha: f64,
    /// Normalized `f' = gamma f`.
    pub gamma: f64,
    /// Map between the right half plane and the (un-normalized) disc.
    pub s_to_z: MobiusMap,
}

impl NormalizationTranscript {
    pub fn identity() -> Self {
        NormalizationTranscript {
            alpha: 0.0,
            gamma: 1.0,
            s_to_z: MobiusMap::rhp_to_disc(),
        }
    }

    pub fn automorphism(&self) -> MobiusMap {
        MobiusMap::disc_automorphism(self.alpha)
    }
}

#[derive(Debug, Clone)]
pub struct InterpProblem {
    pub nodes: Vec<InterpNode>,
    pub transcript: NormalizationTranscript,
}

impl InterpProblem {
    pub fn new(nodes: Vec<InterpNode>, transcript: NormalizationTranscript) -> Result<Self> {
        let ip = InterpProblem { nodes, transcript };
        ip.validate()?;
        Ok(ip)
    }

    /// Degree bound `n = sum n_j - 1`.
    pub fn degree_bound(&self) -> usize {
        self.nodes.iter().map(|n| n.order()).sum::<usize>().saturating_sub(1)
    }

    pub fn total_conditions(&self) -> usize {
        self.nodes.iter().map(|n| n.order()).sum()
    }

    /// True when the first node sits at the origin with value 1/2.
    pub fn is_normalized(&self) -> bool {
        self.nodes.first().is_some_and(|n| {
            n.z == Complex64::new(0.0, 0.0) && n.jet.value() == Complex64::new(0.5, 0.0)
        })
    }

    /// Checks node placement, distinctness and conjugate closure.
    pub fn validate(&self) -> Result<()> {
        if self.nodes.is_empty() {
            return Err(Error::Data("no interpolation nodes".into()));
        }
        for (i, a) in self.nodes.iter().enumerate() {
            if a.z.norm() >= 1.0 {
                return Err(Error::Data(format!("node {} outside the open disc", a.z)));
            }
            if (a.jet.center - a.z).norm() > NODE_TOL {
                return Err(Error::Data(format!("jet center differs from node {}", a.z)));
            }
            for b in &self.nodes[i + 1..] {
                if (a.z - b.z).norm() <= NODE_TOL {
                    return Err(Error::Data(format!("duplicate node {}", a.z)));
                }
            }
            if a.is_real() {
                let w = a.jet.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
                if a.jet.coeffs.iter().any(|c| c.im.abs() > CONJ_TOL * (1.0 + w)) {
                    return Err(Error::Data(format!("non-real jet at real node {}", a.z)));
                }
            } else {
                let partner = self
                    .nodes
                    .iter()
                    .find(|b| (b.z - a.z.conj()).norm() <= NODE_TOL)
                    .ok_or_else(|| {
                        Error::Data(format!("node {} has no conjugate partner", a.z))
                    })?;
                let conj = a.jet.conj();
                if partner.order() != a.order()
                    || conj.max_diff(&partner.jet)
                        > CONJ_TOL * (1.0 + a.jet.coeffs[0].norm())
                {
                    return Err(Error::Data(format!(
                        "jets at {} and its conjugate are not conjugate",
                        a.z
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Lifts the ratio constraints through the square root and onto the disc.
pub fn to_disc_problem(sp: &StabilizationProblem) -> Result<InterpProblem> {
    let map = MobiusMap::rhp_to_disc();
    let mut nodes = Vec::with_capacity(sp.constraints.len());
    for c in &sp.constraints {
        let z = map.apply(c.node)?;
        if z.norm() >= 1.0 - 1e-8 {
            return Err(Error::BoundaryNode(vec![c.node]));
        }
        // s = (1 - z)/(1 + z) is the same involution
        let mut jet = c.target.sqrt()?.compose_mobius(&map, z)?;
        let mut z = z;
        if c.node.im == 0.0 {
            z.im = 0.0;
            jet.center.im = 0.0;
            for w in jet.coeffs.iter_mut() {
                w.im = 0.0;
            }
        }
        nodes.push(InterpNode { z, jet });
    }
    InterpProblem::new(nodes, NormalizationTranscript::identity())
}

/// Which real node goes to the origin.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NormalizationNode {
    /// The real node with the smallest `z` (the largest real `s`); ties go to the
    /// lower index.
    #[default]
    Auto,
    Index(usize),
}

/// Moves a real node to the origin and scales its value to 1/2. The chosen
/// node becomes the first node of the result.
pub fn normalize(ip: &InterpProblem, choice: NormalizationNode) -> Result<InterpProblem> {
    if ip.transcript.alpha != 0.0 || ip.transcript.gamma != 1.0 {
        return Err(Error::UnsupportedConfiguration(
            "problem is already normalized".into(),
        ));
    }
    let r = match choice {
        NormalizationNode::Index(i) => {
            let node = ip
                .nodes
                .get(i)
                .ok_or_else(|| Error::Data(format!("normalization node {i} does not exist")))?;
            if !node.is_real() {
                return Err(Error::UnsupportedConfiguration(format!(
                    "normalization node {} is not real",
                    node.z
                )));
            }
            i
        }
        NormalizationNode::Auto => ip
            .nodes
            .iter()
            .enumerate()
            .filter(|(_, n)| n.is_real())
            .min_by(|a, b| a.1.z.re.partial_cmp(&b.1.z.re).unwrap_or(std::cmp::Ordering::Equal))
            .map(|(i, _)| i)
            .ok_or_else(|| {
                Error::UnsupportedConfiguration(
                    "no real interpolation node available for normalization".into(),
                )
            })?,
    };
    let alpha = ip.nodes[r].z.re;
    let w0 = ip.nodes[r].jet.value();
    if w0.re <= 0.0 {
        return Err(Error::Branch(w0));
    }
    let gamma = 1.0 / (2.0 * w0.re);
    let phi = MobiusMap::disc_automorphism(alpha);
    let phi_inv = phi.inverse();

    let mut order: Vec<usize> = vec![r];
    order.extend((0..ip.nodes.len()).filter(|&i| i != r));
    let mut nodes = Vec::with_capacity(ip.nodes.len());
    for i in order {
        let n = &ip.nodes[i];
        let mut z = phi.apply(n.z)?;
        let mut jet = n
            .jet
            .compose_mobius(&phi_inv, z)
            .map(|j| j.scale(Complex64::new(gamma, 0.0)))?;
        if n.is_real() {
            z.im = 0.0;
            jet.center.im = 0.0;
            for w in jet.coeffs.iter_mut() {
                w.im = 0.0;
            }
        }
        if i == r {
            z = Complex64::new(0.0, 0.0);
            jet.center = z;
            jet.coeffs[0] = Complex64::new(0.5, 0.0);
        }
        nodes.push(InterpNode { z, jet });
    }
    let transcript = NormalizationTranscript {
        alpha,
        gamma,
        s_to_z: ip.transcript.s_to_z,
    };
    InterpProblem::new(nodes, transcript)
}

/// Maps normalized jets back to the raw disc coordinates of the transcript.
pub fn denormalize_nodes(ip: &InterpProblem) -> Result<Vec<InterpNode>> {
    let phi = ip.transcript.automorphism();
    let phi_inv = phi.inverse();
    let k = Complex64::new(1.0 / ip.transcript.gamma, 0.0);
    ip.nodes
        .iter()
        .map(|n| {
            let z = phi_inv.apply(n.z)?;
            let jet = n.jet.compose_mobius(&phi, z)?.scale(k);
            Ok(InterpNode { z, jet })
        })
        .collect()
}

#[derive(Debug, Clone)]
pub enum PickVerdict {
    Solvable {
        min_eigenvalue: f64,
    },
    Unsolvable {
        min_eigenvalue: f64,
        /// Eigenvector of the smallest eigenvalue.
        certificate: Vec<Complex64>,
    },
}

impl PickVerdict {
    pub fn is_solvable(&self) -> bool {
        matches!(self, PickVerdict::Solvable { .. })
    }

    pub fn min_eigenvalue(&self) -> f64 {
        match self {
            PickVerdict::Solvable { min_eigenvalue } => *min_eigenvalue,
            PickVerdict::Unsolvable { min_eigenvalue, .. } => *min_eigenvalue,
        }
    }
}

/// Hermitian Pick matrix of the Carathéodory kernel
/// `K(z, w) = (f(z) + conj f(w)) / (1 - z conj w)` with derivative blocks.
pub fn pick_matrix(ip: &InterpProblem) -> DMatrix<Complex64> {
    let dim = ip.total_conditions();
    let mut m = DMatrix::from_element(dim, dim, Complex64::new(0.0, 0.0));
    let mut row = 0;
    for a in &ip.nodes {
        let mut col = 0;
        for b in &ip.nodes {
            let block = kernel_block(a, b);
            for k in 0..a.order() {
                for i in 0..b.order() {
                    m[(row + k, col + i)] = block[k][i];
                }
            }
            col += b.order();
        }
        row += a.order();
    }
    m
}

/// `block[k][i]` is the coefficient of `t^k s^i` in
/// `K(z_a + t, z_b + conj(s))`, i.e. `(1/(k! i!)) d_z^k d_{conj w}^i K`.
fn kernel_block(a: &InterpNode, b: &InterpNode) -> Vec<Vec<Complex64>> {
    let (na, nb) = (a.order(), b.order());
    let za = a.z;
    let wb = b.z.conj();
    let q = Complex64::new(1.0, 0.0) - za * wb;
    // H = 1 / (q - wb t - za s - t s)
    let mut h = vec![vec![Complex64::new(0.0, 0.0); nb]; na];
    for k in 0..na {
        for i in 0..nb {
            let mut acc = if k == 0 && i == 0 {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            };
            if k > 0 {
                acc += wb * h[k - 1][i];
            }
            if i > 0 {
                acc += za * h[k][i - 1];
            }
            if k > 0 && i > 0 {
                acc += h[k - 1][i - 1];
            }
            h[k][i] = acc / q;
        }
    }
    let fa = &a.jet.coeffs;
    let gb: Vec<Complex64> = b.jet.coeffs.iter().map(|c| c.conj()).collect();
    let mut out = vec![vec![Complex64::new(0.0, 0.0); nb]; na];
    for k in 0..na {
        for i in 0..nb {
            let mut acc = Complex64::new(0.0, 0.0);
            for kk in 0..=k {
                acc += fa[kk] * h[k - kk][i];
            }
            for ii in 0..=i {
                acc += gb[ii] * h[k][i - ii];
            }
            out[k][i] = acc;
        }
    }
    out
}

/// Solvability test: the Pick matrix must be positive definite, with its
/// smallest eigenvalue above `1e-10 * trace`.
pub fn pick_test(ip: &InterpProblem) -> Result<PickVerdict> {
    ip.validate()?;
    let m = pick_matrix(ip);
    let trace: f64 = (0..m.nrows()).map(|i| m[(i, i)].re).sum();
    let eig = nalgebra::SymmetricEigen::new(m);
    let (imin, &min_eigenvalue) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.partial_cmp(b.1).unwrap_or(std::cmp::Ordering::Equal))
        .expect("nonempty matrix");
    if min_eigenvalue > 1e-10 * trace.abs() {
        Ok(PickVerdict::Solvable { min_eigenvalue })
    } else {
        Ok(PickVerdict::Unsolvable {
            min_eigenvalue,
            certificate: eig.eigenvectors.column(imin).iter().copied().collect(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::benchmarks;
    use crate::problem::{analyze, ProblemOptions};

    fn real_node(z: f64, w: &[f64]) -> InterpNode {
        InterpNode {
            z: Complex64::new(z, 0.0),
            jet: Jet::from_real(z, w).unwrap(),
        }
    }

    #[test]
    fn single_origin_node_pick_matrix() {
        let ip = InterpProblem::new(
            vec![real_node(0.0, &[0.5])],
            NormalizationTranscript::identity(),
        )
        .unwrap();
        let m = pick_matrix(&ip);
        assert_eq!(m.nrows(), 1);
        assert!((m[(0, 0)] - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        assert!(pick_test(&ip).unwrap().is_solvable());
    }

    #[test]
    fn duplicate_nodes_rejected() {
        let r = InterpProblem::new(
            vec![real_node(0.2, &[1.0]), real_node(0.2, &[2.0])],
            NormalizationTranscript::identity(),
        );
        assert!(matches!(r, Err(Error::Data(_))));
    }

    #[test]
    fn missing_conjugate_rejected() {
        let z = Complex64::new(0.1, 0.3);
        let r = InterpProblem::new(
            vec![InterpNode {
                z,
                jet: Jet::new(z, vec![Complex64::new(1.0, 0.1)]).unwrap(),
            }],
            NormalizationTranscript::identity(),
        );
        assert!(matches!(r, Err(Error::Data(_))));
    }

    #[test]
    fn example2_disc_data() {
        let sp = analyze(&benchmarks::example2(), &ProblemOptions::default()).unwrap();
        let ip = to_disc_problem(&sp).unwrap();
        assert_eq!(ip.degree_bound(), 2);
        let n0 = &ip.nodes[0];
        assert!(n0.z.norm() < 1e-12);
        let f0 = 1.929365079365079_f64.sqrt();
        assert!((n0.jet.coeffs[0].re - f0).abs() < 1e-12);
        // f'(0) = F'(1) * ds/dz = (R'(1) / (2 F(1))) * (-2)
        let r1 = sp.constraints[0].target.coeffs[1].re;
        assert!((n0.jet.coeffs[1].re + r1 / f0).abs() < 1e-12);
        let n1 = &ip.nodes[1];
        assert!((n1.z.re - 2.0 / 3.0).abs() < 1e-15);
        assert!((n1.jet.coeffs[0].re - 0.854850414265).abs() < 1e-9);

        let norm = normalize(&ip, NormalizationNode::Auto).unwrap();
        assert!(norm.transcript.alpha.abs() < 1e-12);
        assert!((norm.transcript.gamma - 1.0 / (2.0 * f0)).abs() < 1e-12);
        assert!((norm.transcript.gamma - 0.35997).abs() < 1e-5);
        assert!(norm.is_normalized());
    }

    #[test]
    fn example1_normalization_moves_largest_node() {
        let sp = analyze(&benchmarks::example1(), &ProblemOptions::default()).unwrap();
        let ip = to_disc_problem(&sp).unwrap();
        let norm = normalize(&ip, NormalizationNode::Auto).unwrap();
        assert!((norm.transcript.alpha + 0.90102).abs() < 1e-5);
        let z = |s: f64| (1.0 - s) / (1.0 + s);
        let (z0, z1) = (z(19.206044271102078), z(4.452001823991402));
        let expected = (z1 - z0) / (1.0 - z0 * z1);
        assert!((norm.nodes[1].z.re - expected).abs() < 1e-9);
        assert!((expected - 0.62364).abs() < 1e-5);
        assert!(pick_test(&norm).unwrap().is_solvable());
    }

    #[test]
    fn constant_ratio_gives_constant_disc_data() {
        let j = Jet::from_real(2.0, &[1.0, 0.0]).unwrap();
        let out = j
            .sqrt()
            .unwrap()
            .compose_mobius(&MobiusMap::rhp_to_disc(), Complex64::new(-1.0 / 3.0, 0.0))
            .unwrap();
        assert!((out.coeffs[0] - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        assert!(out.coeffs[1].norm() < 1e-15);
    }

    #[test]
    fn normalizing_a_normalized_problem_is_identity() {
        let ip = InterpProblem::new(
            vec![real_node(0.0, &[0.5, 0.1]), real_node(0.4, &[0.7])],
            NormalizationTranscript::identity(),
        )
        .unwrap();
        let n = normalize(&ip, NormalizationNode::Auto);
        // Auto picks the smallest z, which is the origin
        let n = n.unwrap();
        assert_eq!(n.transcript.alpha, 0.0);
        assert!((n.transcript.gamma * 2.0 * 0.5 - 1.0).abs() < 1e-15);
        assert!(n.nodes[1].jet.max_diff(&ip.nodes[1].jet) < 1e-15);
    }
}
