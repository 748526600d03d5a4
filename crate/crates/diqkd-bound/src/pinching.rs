//! Pinching channels and their entropic footprint.
//!
//! For a projector `P`, the pinching channel is
//!
//! ```text
//! Pinch_P[rho] = P rho P + (I - P) rho (I - P).
//! ```
//!
//! It kills the off-diagonal blocks of `rho` with respect to the
//! decomposition `ran(P) (+) ker(P)`, is idempotent, unital, self-adjoint
//! as a map on Hermitian matrices, and can only increase entropy. The
//! entropy it produces equals the relative entropy between input and
//! output, which is the quantity the security bound ultimately certifies.

use crate::chsh::projector_q_lifted;
use crate::hermitian::{
    relative_entropy, von_neumann_entropy, DensityMatrix, HermitianMatrix, MatrixError,
};

/// How close `P^2` must be to `P` for `P` to count as a projector.
pub const PROJECTOR_TOL: f64 = 1e-10;

/// Checks that `p` is a projector (`P^2 = P` within [`PROJECTOR_TOL`]).
pub fn check_projector(p: &HermitianMatrix) -> Result<(), MatrixError> {
    let p2 = p.symmetrized_product(p)?;
    let dev = p2.sub(p)?.frobenius_norm();
    if dev > PROJECTOR_TOL {
        return Err(MatrixError::Domain(format!(
            "not a projector: ||P^2 - P||_F = {dev:.3e}"
        )));
    }
    Ok(())
}

/// Applies the pinching channel for projector `p` to a Hermitian matrix.
///
/// Exposed at the Hermitian level because subgradients of the trace-norm
/// objective need the channel on sign matrices, not just on states.
pub fn pinch_herm(x: &HermitianMatrix, p: &HermitianMatrix) -> Result<HermitianMatrix, MatrixError> {
    if x.dim() != p.dim() {
        return Err(MatrixError::DimensionMismatch(x.dim(), p.dim()));
    }
    check_projector(p)?;
    // P X P + (I-P) X (I-P) = 2 P X P + X - (P X + X P).
    let pxp = x.conjugate_with(p)?;
    let anti = p.symmetrized_product(x)?.scale(2.0); // PX + XP as Hermitian part * 2
    pxp.scale(2.0).add(x)?.sub(&anti)
}

/// Applies the pinching channel to a state. Trace and positivity are
/// preserved, so the output is again a valid state.
pub fn pinch(rho: &DensityMatrix, p: &HermitianMatrix) -> Result<DensityMatrix, MatrixError> {
    DensityMatrix::new(pinch_herm(rho.matrix(), p)?)
}

/// Pinching with Alice's lifted key projector `Q(theta) (x) I`.
pub fn pinch_key(rho: &DensityMatrix, theta: f64) -> Result<DensityMatrix, MatrixError> {
    pinch(rho, &projector_q_lifted(theta))
}

/// Entropy produced by the key pinching at angle `theta`:
///
/// ```text
/// H(Pinch[rho]) - H(rho) = D(rho || Pinch[rho]),
/// ```
///
/// in bits; always nonnegative.
pub fn entropy_production(rho: &DensityMatrix, theta: f64) -> Result<f64, MatrixError> {
    let pinched = pinch_key(rho, theta)?;
    Ok(von_neumann_entropy(&pinched)? - von_neumann_entropy(rho)?)
}

/// Same quantity evaluated through the relative-entropy route; kept as an
/// independent cross-check of [`entropy_production`].
pub fn entropy_production_via_divergence(
    rho: &DensityMatrix,
    theta: f64,
) -> Result<f64, MatrixError> {
    let pinched = pinch_key(rho, theta)?;
    relative_entropy(rho, &pinched)
}
