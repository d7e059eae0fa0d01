//! Error type shared by every stage of the pipeline.

use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    /// An argument outside the domain of an operation (zero polynomial, pole hit, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// An iterative method did not converge.
    #[error("solver error: {message} (best residual {residual:.3e})")]
    Solver { message: String, residual: f64 },

    #[error("identical plants: x0*y1 - x1*y0 vanishes identically")]
    IdenticalPlants,

    /// Interpolation node on the boundary (imaginary axis in s, unit circle in z).
    #[error("unsupported boundary node(s): {0:?}")]
    BoundaryNode(Vec<Complex64>),

    /// Data proves the stabilization problem has no solution.
    #[error("infeasible problem: {0}")]
    Infeasible(String),

    /// Target value of the ratio lies on the nonpositive real axis at a node.
    #[error("condition (iii) violated at node {node}: target value {value} lies on (-inf, 0]")]
    ConditionIiiViolated { node: Complex64, value: Complex64 },

    /// Square root requested on the branch cut.
    #[error("branch error: {0} lies on the nonpositive real axis")]
    Branch(Complex64),

    /// Malformed interpolation data.
    #[error("data error: {0}")]
    Data(String),

    #[error("unsupported configuration: {0}")]
    UnsupportedConfiguration(String),

    #[error("pseudo-polynomial is not positive on the unit circle (min {0:.3e})")]
    NotPositive(f64),

    #[error("invalid solution: {0}")]
    InvalidSolution(String),

    #[error("degenerate: {0}")]
    Degenerate(String),

    #[error("synthesis residual {residual:.3e} at node {node}")]
    SynthesisResidual { node: Complex64, residual: f64 },

    #[error("input error: {0}")]
    Input(String),
}

impl Error {
    pub(crate) fn solver(message: impl Into<String>, residual: f64) -> Self {
        Error::Solver {
            message: message.into(),
            residual,
        }
    }

    /// Process exit code associated with this error: 1 input, 2 infeasible, 3 solver.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Input(_)
            | Error::Domain(_)
            | Error::IdenticalPlants
            | Error::BoundaryNode(_)
            | Error::Data(_)
            | Error::UnsupportedConfiguration(_) => 1,
            Error::Infeasible(_)
            | Error::ConditionIiiViolated { .. }
            | Error::Branch(_)
            | Error::NotPositive(_) => 2,
            Error::Solver { .. }
            | Error::InvalidSolution(_)
            | Error::Degenerate(_)
            | Error::SynthesisResidual { .. } => 3,
        }
    }
}
