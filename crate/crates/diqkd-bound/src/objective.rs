//! Disturbance objectives whose minima certify Eve's uncertainty.
//!
//! For a state `rho` shared by the parties, let `L0` and `L1` be the
//! pinching channels for Alice's two key measurements (angles `0` and
//! `phi_a`). Two objectives measure how much the key measurements disturb
//! the state:
//!
//! * trace-norm form (the certified route):
//!   `lambda ||rho - L0 rho||_1 + (1 - lambda) ||rho - L1 rho||_1`
//! * Frobenius form (smooth, drives the numerical optimization):
//!   `lambda ||rho - L0 rho||_F^2 + (1 - lambda) ||rho - L1 rho||_F^2
//!    + (mu/2) ||rho||_F^2`
//!
//! Minimized over all states compatible with a CHSH score, either value
//! lower-bounds the disturbance any attack must cause; the Pinsker-type
//! lift then converts it into a bound on conditional entropy in bits.

use crate::chsh::projector_q_lifted;
use crate::hermitian::{binary_entropy, DensityMatrix, HermitianMatrix, MatrixError};
use crate::pinching::pinch_herm;
use serde::{Deserialize, Serialize};

/// Which disturbance functional is being minimized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObjectiveKind {
    /// Smooth squared-Frobenius objective with Tikhonov term.
    Frobenius,
    /// Nonsmooth trace-norm objective.
    TraceNorm,
}

impl std::fmt::Display for ObjectiveKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ObjectiveKind::Frobenius => write!(f, "frobenius"),
            ObjectiveKind::TraceNorm => write!(f, "trace_norm"),
        }
    }
}

/// Full description of a disturbance objective.
///
/// `lambda` weights the two key bases (probability that basis 0 is used
/// for the key), `mu` is the strong-convexity regularizer of the
/// Frobenius form (ignored by the trace-norm form), and `phi_a` is the
/// angle of Alice's second key measurement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveSpec {
    pub kind: ObjectiveKind,
    pub lambda: f64,
    pub mu: f64,
    pub phi_a: f64,
}

/// Default Tikhonov regularizer weight.
pub const DEFAULT_MU: f64 = 1e-6;

impl ObjectiveSpec {
    pub fn new(kind: ObjectiveKind, lambda: f64, mu: f64, phi_a: f64) -> Result<Self, MatrixError> {
        if !(0.0..=1.0).contains(&lambda) || !lambda.is_finite() {
            return Err(MatrixError::Domain(format!("lambda = {lambda} outside [0, 1]")));
        }
        if !(mu.is_finite() && mu >= 0.0) {
            return Err(MatrixError::Domain(format!("mu = {mu} must be >= 0")));
        }
        if !(phi_a.is_finite() && (0.0..=std::f64::consts::FRAC_PI_2 + 1e-12).contains(&phi_a)) {
            return Err(MatrixError::Domain(format!("phi_a = {phi_a} outside [0, pi/2]")));
        }
        Ok(Self { kind, lambda, mu, phi_a })
    }

    /// The two lifted key projectors `Q(0) (x) I` and `Q(phi_a) (x) I`.
    pub fn key_projectors(&self) -> (HermitianMatrix, HermitianMatrix) {
        (projector_q_lifted(0.0), projector_q_lifted(self.phi_a))
    }

    /// Evaluates the configured objective on a state.
    pub fn value(&self, rho: &DensityMatrix) -> Result<f64, MatrixError> {
        match self.kind {
            ObjectiveKind::Frobenius => frobenius_objective(self, rho),
            ObjectiveKind::TraceNorm => trace_objective(self, rho),
        }
    }
}

/// `rho - Pinch_P[rho]` for Hermitian input: the coherences killed by the
/// channel. Equals `(P X + X P) - 2 P X P`.
pub fn pinch_residual_herm(
    x: &HermitianMatrix,
    p: &HermitianMatrix,
) -> Result<HermitianMatrix, MatrixError> {
    x.sub(&pinch_herm(x, p)?)
}

/// Trace-norm objective evaluated on any Hermitian matrix (tests probe it
/// off the state manifold).
pub fn trace_objective_herm(spec: &ObjectiveSpec, x: &HermitianMatrix) -> Result<f64, MatrixError> {
    let (p0, p1) = spec.key_projectors();
    let r0 = pinch_residual_herm(x, &p0)?.trace_norm()?;
    let r1 = pinch_residual_herm(x, &p1)?.trace_norm()?;
    Ok(spec.lambda * r0 + (1.0 - spec.lambda) * r1)
}

/// Trace-norm objective
/// `lambda ||rho - L0 rho||_1 + (1 - lambda) ||rho - L1 rho||_1`.
pub fn trace_objective(spec: &ObjectiveSpec, rho: &DensityMatrix) -> Result<f64, MatrixError> {
    trace_objective_herm(spec, rho.matrix())
}

/// Frobenius objective evaluated on any Hermitian matrix.
pub fn frobenius_objective_herm(
    spec: &ObjectiveSpec,
    x: &HermitianMatrix,
) -> Result<f64, MatrixError> {
    let (p0, p1) = spec.key_projectors();
    let r0 = pinch_residual_herm(x, &p0)?.frobenius_norm();
    let r1 = pinch_residual_herm(x, &p1)?.frobenius_norm();
    let reg = x.frobenius_norm();
    Ok(spec.lambda * r0 * r0 + (1.0 - spec.lambda) * r1 * r1 + 0.5 * spec.mu * reg * reg)
}

/// Frobenius objective
/// `lambda ||rho - L0 rho||_F^2 + (1 - lambda) ||rho - L1 rho||_F^2
///  + (mu/2) ||rho||_F^2`.
pub fn frobenius_objective(spec: &ObjectiveSpec, rho: &DensityMatrix) -> Result<f64, MatrixError> {
    frobenius_objective_herm(spec, rho.matrix())
}

/// Gradient of the Frobenius objective with respect to `rho` (in the
/// Hilbert-Schmidt geometry):
///
/// ```text
/// grad = 2 lambda (rho - L0 rho) + 2 (1 - lambda) (rho - L1 rho) + mu rho.
/// ```
///
/// The simple form holds because each pinching is a self-adjoint
/// idempotent map, so `I - L` is an orthogonal projection of Hermitian
/// space and `||(I - L) rho||_F^2` differentiates to `2 (I - L) rho`.
pub fn frobenius_gradient_herm(
    spec: &ObjectiveSpec,
    x: &HermitianMatrix,
) -> Result<HermitianMatrix, MatrixError> {
    let (p0, p1) = spec.key_projectors();
    let r0 = pinch_residual_herm(x, &p0)?;
    let r1 = pinch_residual_herm(x, &p1)?;
    r0.scale(2.0 * spec.lambda)
        .add(&r1.scale(2.0 * (1.0 - spec.lambda)))?
        .add(&x.scale(spec.mu))
}

/// Gradient of the Frobenius objective at a state.
pub fn frobenius_gradient(
    spec: &ObjectiveSpec,
    rho: &DensityMatrix,
) -> Result<HermitianMatrix, MatrixError> {
    frobenius_gradient_herm(spec, rho.matrix())
}

/// Pinsker-type lift: converts a certified trace-norm disturbance `n`
/// into a lower bound on Eve's conditional entropy, in bits:
///
/// ```text
/// lift(n) = 1 - h((1 - n) / 2),
/// ```
///
/// where `h` is the binary entropy. Monotone increasing on `[0, 1]`, with
/// `lift(0) = 0` and `lift(1) = 1`. Inputs are clamped to `[0, 1]`
/// (values above 1 cannot occur for normalized disturbances; tiny
/// negative values from floating point are treated as 0).
pub fn pinsker_lift(n: f64) -> Result<f64, MatrixError> {
    if !n.is_finite() {
        return Err(MatrixError::Domain(format!("pinsker_lift({n})")));
    }
    let n = n.clamp(0.0, 1.0);
    Ok(1.0 - binary_entropy((1.0 - n) / 2.0)?)
}

/// Measured sensitivity of the weighted disturbance to the key angle:
/// `|h(phi_a) - h(phi_a + eps)|` where `h` is the `(1 - lambda)`-weighted
/// term of the configured objective.
///
/// Requires the support condition `supp(rho) <= ran(Q(phi_a) (x) I)`,
/// under which the baseline term vanishes and the drift obeys
/// `delta <= (1 - lambda) (4 eps + 10 eps^2)`; see
/// [`angle_sensitivity_bound`]. Errors if the support condition fails.
pub fn angle_sensitivity(
    spec: &ObjectiveSpec,
    rho: &DensityMatrix,
    eps: f64,
) -> Result<f64, MatrixError> {
    if !(eps.is_finite() && eps >= 0.0) {
        return Err(MatrixError::Domain(format!("eps = {eps} must be >= 0")));
    }
    let p1 = projector_q_lifted(spec.phi_a);
    let complement = HermitianMatrix::identity(4).sub(&p1)?;
    let leak = rho.matrix().inner(&complement)?;
    if leak.abs() > 1e-9 {
        return Err(MatrixError::Domain(format!(
            "support condition violated: Tr((I - P) rho) = {leak:.3e}"
        )));
    }
    let weighted = |phi: f64| -> Result<f64, MatrixError> {
        let p = projector_q_lifted(phi);
        let r = pinch_residual_herm(rho.matrix(), &p)?;
        let v = match spec.kind {
            ObjectiveKind::Frobenius => {
                let f = r.frobenius_norm();
                f * f
            }
            ObjectiveKind::TraceNorm => r.trace_norm()?,
        };
        Ok((1.0 - spec.lambda) * v)
    };
    let base = weighted(spec.phi_a)?;
    let shifted = weighted(spec.phi_a + eps)?;
    Ok((shifted - base).abs())
}

/// Certified drift bound matching [`angle_sensitivity`]:
/// `(1 - lambda) (4 eps + 10 eps^2)`.
pub fn angle_sensitivity_bound(lambda: f64, eps: f64) -> f64 {
    (1.0 - lambda) * (4.0 * eps + 10.0 * eps * eps)
}
