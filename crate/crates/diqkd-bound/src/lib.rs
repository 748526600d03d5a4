//! Certified lower bounds on an eavesdropper's uncertainty, and the
//! asymptotic secret key rates they imply, for device-independent QKD
//! with a randomly chosen key basis.
//!
//! The pipeline, bottom to top:
//!
//! 1. [`hermitian`]: dense Hermitian linear algebra on 2x2/4x4 complex
//!    matrices, eigendecompositions, norms and entropies.
//! 2. [`chsh`]: the two-qubit CHSH model (projectors, Bell operator,
//!    angle recovery, perturbation bounds, QBER).
//! 3. [`pinching`]: pinching channels for the key measurements and the
//!    entropy they produce.
//! 4. [`objective`]: the trace-norm and Frobenius disturbance objectives,
//!    the gradient, the Pinsker-type entropy lift, angle sensitivity.
//! 5. [`sdp_export`]: the same minimizations as standard-form SDPs, for
//!    external cross-checking.
//! 6. [`solver`]: first-order minimization over feasible states plus a
//!    derivative-free oracle.
//! 7. [`epsnet`]: certified optimization of both measurement angles over
//!    an epsilon-net with pessimistic error corrections.
//! 8. [`keyrate`]: the final bound on Eve's uncertainty and the
//!    asymptotic key rate, including score sweeps.
//!
//! [`cli`] exposes all of it as a command-line tool and [`verify`] hosts
//! the seeded invariant suites behind its `verify` subcommand.

pub mod chsh;
pub mod cli;
pub mod epsnet;
pub mod hermitian;
pub mod keyrate;
pub mod objective;
pub mod pinching;
pub mod sdp_export;
pub mod solver;
pub mod verify;

use thiserror::Error as ThisError;

/// Top-level error type for the crate.
#[derive(Debug, ThisError)]
pub enum Error {
    #[error(transparent)]
    Matrix(#[from] hermitian::MatrixError),
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}
