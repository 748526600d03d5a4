//! The two-qubit CHSH model behind the bound.
//!
//! Both parties measure rank-one projectors in the x-z plane of the Bloch
//! sphere. The angle convention is fixed by the projector
//!
//! ```text
//! Q(theta) = [ cos^2(theta/2)            cos(theta/2) sin(theta/2) ]
//!            [ cos(theta/2) sin(theta/2) sin^2(theta/2)            ]
//! ```
//!
//! Alice's inputs correspond to angles `0` and `phi_a`, Bob's to `0` and
//! `phi_b`. The CHSH Bell operator is assembled in two independent ways:
//! directly from its closed-form 2x2 blocks, and from the tensor-product
//! expansion of the four correlators; the two constructions agree to
//! 1e-12 and the tests keep them honest against each other.

use crate::hermitian::{ComplexScalar, DensityMatrix, HermitianMatrix, MatrixError};

/// Angles are restricted to the first quadrant, which is where the model
/// lives (the maximal violation sits at `phi_a = phi_b = pi/2`).
pub const ANGLE_MIN: f64 = 0.0;
/// Upper end of the admissible angle range.
pub const ANGLE_MAX: f64 = std::f64::consts::FRAC_PI_2;
/// Block form and tensor form of the Bell operator must agree this tightly.
pub const CONSTRUCTION_TOL: f64 = 1e-12;

/// A pair of measurement angles `(phi_a, phi_b)`, both in `[0, pi/2]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnglePair {
    pub phi_a: f64,
    pub phi_b: f64,
}

impl AnglePair {
    pub fn new(phi_a: f64, phi_b: f64) -> Result<Self, MatrixError> {
        for (name, v) in [("phi_a", phi_a), ("phi_b", phi_b)] {
            if !v.is_finite() || !(ANGLE_MIN..=ANGLE_MAX + 1e-12).contains(&v) {
                return Err(MatrixError::Domain(format!(
                    "{name} = {v} outside [0, pi/2]"
                )));
            }
        }
        Ok(Self { phi_a: phi_a.min(ANGLE_MAX), phi_b: phi_b.min(ANGLE_MAX) })
    }
}

/// The rank-one projector `Q(theta)` in the x-z plane.
pub fn projector_q(theta: f64) -> HermitianMatrix {
    let c = (theta / 2.0).cos();
    let s = (theta / 2.0).sin();
    HermitianMatrix::from_real(2, &[c * c, c * s, c * s, s * s]).expect("projector is symmetric")
}

/// `Q(theta) (x) I_2`: the projector lifted to Alice's side of the pair.
pub fn projector_q_lifted(theta: f64) -> HermitianMatrix {
    HermitianMatrix::kron(&projector_q(theta), &HermitianMatrix::identity(2))
}

/// Recovers the angle between two projectors from the spectrum of their
/// sum: if `Q(0) + Q(phi)` has eigenvalues `l1 >= l2`, then
/// `phi = 2 * arccos((l1 - l2) / 2)`, a bijection on `[0, pi]`.
pub fn recover_angle(l1: f64, l2: f64) -> Result<f64, MatrixError> {
    if l1 < l2 {
        return Err(MatrixError::Domain(format!(
            "eigenvalues out of order: {l1} < {l2}"
        )));
    }
    if (l1 + l2 - 2.0).abs() > 1e-9 {
        return Err(MatrixError::Domain(format!(
            "eigenvalues {l1}, {l2} do not sum to 2"
        )));
    }
    let x = (l1 - l2) / 2.0;
    if !(0.0..=1.0 + 1e-12).contains(&x) {
        return Err(MatrixError::Domain(format!("(l1 - l2)/2 = {x} outside [0, 1]")));
    }
    Ok(2.0 * x.min(1.0).acos())
}

/// CHSH Bell operator in closed block form.
///
/// With `ca = cos(phi_a)` etc., the operator is the 4x4 real symmetric
/// matrix `[[A, B], [B, D]]` with
///
/// ```text
/// A = [ ca-1-cb-ca*cb   -sb-ca*sb      ]      B = [ sa-sa*cb   -sa*sb   ]
///     [ -sb-ca*sb       -ca+1+cb+ca*cb ]          [ -sa*sb     sa*cb-sa ]
/// D = -A with the sign of the off-diagonal flipped (see below).
/// ```
pub fn chsh_operator(angles: &AnglePair) -> HermitianMatrix {
    let (ca, sa) = (angles.phi_a.cos(), angles.phi_a.sin());
    let (cb, sb) = (angles.phi_b.cos(), angles.phi_b.sin());
    let a00 = ca - 1.0 - cb - ca * cb;
    let a01 = -sb - ca * sb;
    let b00 = sa - sa * cb;
    let b01 = -sa * sb;
    let b11 = sa * cb - sa;
    #[rustfmt::skip]
    let rows = [
        a00,  a01,  b00,  b01,
        a01, -a00,  b01,  b11,
        b00,  b01, -a00, -a01,
        b01,  b11, -a01,  a00,
    ];
    HermitianMatrix::from_real(4, &rows).expect("block form is symmetric")
}

/// CHSH Bell operator from the correlator expansion.
///
/// Writing `R(t) = 2 Q(t) - I` for the observable with projective outcomes
/// `+1` on `Q(t)` and `-1` on its complement, the operator is
///
/// ```text
/// R(phi_a) (x) R(0) - R(0) (x) R(0) - R(0) (x) R(phi_b) - R(phi_a) (x) R(phi_b).
/// ```
///
/// Kept as an independent construction route; it must match
/// [`chsh_operator`] entrywise within [`CONSTRUCTION_TOL`].
pub fn chsh_operator_from_projectors(angles: &AnglePair) -> HermitianMatrix {
    let r = |t: f64| {
        projector_q(t)
            .scale(2.0)
            .sub(&HermitianMatrix::identity(2))
            .expect("same dim")
    };
    let (ra, r0, rb) = (r(angles.phi_a), r(0.0), r(angles.phi_b));
    let t1 = HermitianMatrix::kron(&ra, &r0);
    let t2 = HermitianMatrix::kron(&r0, &r0);
    let t3 = HermitianMatrix::kron(&r0, &rb);
    let t4 = HermitianMatrix::kron(&ra, &rb);
    t1.sub(&t2).unwrap().sub(&t3).unwrap().sub(&t4).unwrap()
}

/// Largest achievable CHSH score for the given angles: the top eigenvalue
/// of the Bell operator.
pub fn max_violation(angles: &AnglePair) -> Result<f64, MatrixError> {
    Ok(chsh_operator(angles).eig()?.eigenvalues[0])
}

/// Worst-case per-knob spectral-norm deviation of the Bell operator under
/// an angle perturbation of `+eps` (clipped to `[0, pi/2]`):
///
/// ```text
/// delta_p = max( ||C(a+e, b) - C(a, b)||,        first order in phi_a,
///                ||C(a, b+e) - C(a, b)||,        first order in phi_b,
///                ||C(a+e, b+e) - C(a+e, b)
///                  - C(a, b+e) + C(a, b)|| ).    mixed second order
/// ```
///
/// The first two terms equal `4 sin(e/2) sin(b/2)` and
/// `4 sin(e/2) cos(a/2)`; the mixed difference is `4 sin^2(e/2)`. The
/// joint deviation is bounded by the sum of the three, and each knob is
/// corrected separately downstream, so the reported value satisfies
/// `delta_p <= 2*eps + 5*eps^2` over the whole angle range.
pub fn chsh_deviation(angles: &AnglePair, eps: f64) -> Result<f64, MatrixError> {
    if !(eps.is_finite() && eps >= 0.0) {
        return Err(MatrixError::Domain(format!("eps = {eps} must be >= 0")));
    }
    let clip = |t: f64| t.clamp(ANGLE_MIN, ANGLE_MAX);
    let (a, b) = (angles.phi_a, angles.phi_b);
    let (ae, be) = (clip(a + eps), clip(b + eps));
    let c00 = chsh_operator(&AnglePair { phi_a: a, phi_b: b });
    let c10 = chsh_operator(&AnglePair { phi_a: ae, phi_b: b });
    let c01 = chsh_operator(&AnglePair { phi_a: a, phi_b: be });
    let c11 = chsh_operator(&AnglePair { phi_a: ae, phi_b: be });
    let da = c10.sub(&c00)?.spectral_norm()?;
    let db = c01.sub(&c00)?.spectral_norm()?;
    let mixed = c11.sub(&c10)?.sub(&c01)?.add(&c00)?.spectral_norm()?;
    Ok(da.max(db).max(mixed))
}

/// Quantum bit error rate when the parties measure `Q(theta_a)` and
/// `Q(theta_b)`: the probability their outcomes disagree.
pub fn qber(rho: &DensityMatrix, theta_a: f64, theta_b: f64) -> Result<f64, MatrixError> {
    if rho.dim() != 4 {
        return Err(MatrixError::DimensionMismatch(rho.dim(), 4));
    }
    let i2 = HermitianMatrix::identity(2);
    let qa = projector_q(theta_a);
    let qb = projector_q(theta_b);
    let qa_c = i2.sub(&qa)?;
    let qb_c = i2.sub(&qb)?;
    let disagree = HermitianMatrix::kron(&qa, &qb_c).add(&HermitianMatrix::kron(&qa_c, &qb))?;
    Ok(rho.matrix().inner(&disagree)?.clamp(0.0, 1.0))
}

/// The maximally entangled state `(|00> + |11>)/sqrt(2)` used as a
/// reference point in tests and examples.
pub fn phi_plus() -> DensityMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let v = [
        ComplexScalar::new(s, 0.0),
        ComplexScalar::new(0.0, 0.0),
        ComplexScalar::new(0.0, 0.0),
        ComplexScalar::new(s, 0.0),
    ];
    DensityMatrix::pure(&v).expect("unit vector")
}

/// Werner state `v * phi_plus + (1 - v) * I/4`.
pub fn werner(v: f64) -> Result<DensityMatrix, MatrixError> {
    if !(0.0..=1.0).contains(&v) {
        return Err(MatrixError::Domain(format!("visibility {v} outside [0, 1]")));
    }
    let m = phi_plus()
        .matrix()
        .scale(v)
        .add(&HermitianMatrix::identity(4).scale((1.0 - v) / 4.0))?;
    DensityMatrix::new(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI, SQRT_2};

    #[test]
    fn projector_is_rank_one_projector() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            let t = rng.gen_range(0.0..PI);
            let q = projector_q(t);
            let q2 = q.symmetrized_product(&q).unwrap();
            assert!(q.sub(&q2).unwrap().frobenius_norm() < 1e-14);
            assert!((q.trace() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn projector_at_right_angle_is_uniform() {
        let q = projector_q(FRAC_PI_2);
        for i in 0..2 {
            for j in 0..2 {
                assert!((q.get(i, j).re - 0.5).abs() < 1e-15);
            }
        }
        let lifted = projector_q_lifted(FRAC_PI_2);
        // 2x2 blocks of I/2 in all four block positions.
        for i in 0..4 {
            for j in 0..4 {
                let want = if i % 2 == j % 2 { 0.5 } else { 0.0 };
                assert!((lifted.get(i, j).re - want).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn block_and_projector_constructions_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..200 {
            let angles = AnglePair::new(
                rng.gen_range(0.0..FRAC_PI_2),
                rng.gen_range(0.0..FRAC_PI_2),
            )
            .unwrap();
            let d = chsh_operator(&angles)
                .sub(&chsh_operator_from_projectors(&angles))
                .unwrap()
                .frobenius_norm();
            assert!(d < CONSTRUCTION_TOL, "disagreement {d} at {angles:?}");
        }
    }

    #[test]
    fn degenerate_angles_give_classical_operator() {
        // At phi_a = phi_b = 0 the operator is -2 sigma_z (x) sigma_z.
        let c = chsh_operator(&AnglePair::new(0.0, 0.0).unwrap());
        let want = [-2.0, 2.0, 2.0, -2.0];
        for i in 0..4 {
            for j in 0..4 {
                let w = if i == j { want[i] } else { 0.0 };
                assert!((c.get(i, j).re - w).abs() < 1e-14);
            }
        }
        assert!((max_violation(&AnglePair::new(0.0, 0.0).unwrap()).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn tsirelson_point_reaches_two_sqrt_two() {
        let m = max_violation(&AnglePair::new(FRAC_PI_2, FRAC_PI_2).unwrap()).unwrap();
        assert!((m - 2.0 * SQRT_2).abs() < 1e-12, "max violation {m}");
    }

    #[test]
    fn known_state_saturates_tsirelson() {
        // For this operator convention the saturating state at
        // phi_a = phi_b = pi/2 is
        // sin(pi/8)(|00> + |11>)/sqrt(2) + cos(pi/8)(|10> - |01>)/sqrt(2).
        let angles = AnglePair::new(FRAC_PI_2, FRAC_PI_2).unwrap();
        let (s8, c8) = ((PI / 8.0).sin(), (PI / 8.0).cos());
        let r = FRAC_1_SQRT_2;
        let v = [
            ComplexScalar::new(s8 * r, 0.0),
            ComplexScalar::new(-c8 * r, 0.0),
            ComplexScalar::new(c8 * r, 0.0),
            ComplexScalar::new(s8 * r, 0.0),
        ];
        let rho = DensityMatrix::pure(&v).unwrap();
        let s = rho.matrix().inner(&chsh_operator(&angles)).unwrap();
        assert!((s - 2.0 * SQRT_2).abs() < 1e-12, "score {s}");
        // phi_plus itself is *not* extremal here; its score is -2.
        let s_pp = phi_plus().matrix().inner(&chsh_operator(&angles)).unwrap();
        assert!((s_pp + 2.0).abs() < 1e-12);
    }

    #[test]
    fn angle_recovery_round_trips() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..500 {
            let phi = rng.gen_range(0.0..PI);
            let sum = projector_q(0.0).add(&projector_q(phi)).unwrap();
            let d = sum.eig().unwrap();
            let rec = recover_angle(d.eigenvalues[0], d.eigenvalues[1]).unwrap();
            assert!((rec - phi).abs() < 1e-9, "phi {phi} recovered {rec}");
        }
        // Frozen spot value: eigenvalues (1.5, 0.5) -> 2*pi/3.
        let rec = recover_angle(1.5, 0.5).unwrap();
        assert!((rec - 2.0 * PI / 3.0).abs() < 1e-14);
    }

    #[test]
    fn angle_recovery_rejects_bad_spectra() {
        assert!(recover_angle(0.5, 1.5).is_err());
        assert!(recover_angle(1.5, 0.4).is_err());
        assert!(recover_angle(2.5, -0.5).is_err());
    }

    #[test]
    fn deviation_respects_quadratic_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for &eps in &[1e-3, 1e-2, 1e-1] {
            for _ in 0..100 {
                let angles = AnglePair::new(
                    rng.gen_range(0.0..FRAC_PI_2),
                    rng.gen_range(0.0..FRAC_PI_2),
                )
                .unwrap();
                let d = chsh_deviation(&angles, eps).unwrap();
                assert!(
                    d <= 2.0 * eps + 5.0 * eps * eps,
                    "deviation {d} exceeds bound at {angles:?}, eps {eps}"
                );
            }
        }
    }

    #[test]
    fn single_angle_deviations_match_closed_forms() {
        // Perturbing only phi_b changes the operator by
        // -(R(0) + R(phi_a)) (x) (R(phi_b + eps) - R(phi_b)), whose spectral
        // norm is exactly 4 sin(eps/2) cos(phi_a/2): maximal at phi_a = 0.
        // Perturbing only phi_a gives 4 sin(eps/2) sin(phi_b/2).
        let eps = 1e-2;
        for &(pa, pb) in &[(0.0, 0.4), (0.3, 0.9), (1.2, 0.1), (FRAC_PI_2, FRAC_PI_2 - eps)] {
            let base = chsh_operator(&AnglePair::new(pa, pb).unwrap());
            let db = chsh_operator(&AnglePair::new(pa, pb + eps).unwrap())
                .sub(&base)
                .unwrap()
                .spectral_norm()
                .unwrap();
            let want_b = 4.0 * (eps / 2.0).sin() * (pa / 2.0).cos();
            assert!((db - want_b).abs() < 1e-10, "{db} vs {want_b}");
            let da = chsh_operator(&AnglePair::new(pa + eps.min(FRAC_PI_2 - pa), pb).unwrap())
                .sub(&base)
                .unwrap()
                .spectral_norm()
                .unwrap();
            let ea = eps.min(FRAC_PI_2 - pa);
            let want_a = 4.0 * (ea / 2.0).sin() * (pb / 2.0).sin();
            assert!((da - want_a).abs() < 1e-10, "{da} vs {want_a}");
        }
    }

    #[test]
    fn qber_of_reference_states() {
        // Perfectly correlated state measured along matching angles.
        let rho = phi_plus();
        assert!(qber(&rho, 0.7, 0.7).unwrap() < 1e-12);
        // Orthogonal measurement directions give QBER 1/2.
        assert!((qber(&rho, 0.0, FRAC_PI_2).unwrap() - 0.5).abs() < 1e-12);
        // Werner state: QBER = (1 - v)/2 at matching angles.
        for &v in &[0.0, 0.3, 0.8, 1.0] {
            let w = werner(v).unwrap();
            assert!((qber(&w, 0.3, 0.3).unwrap() - (1.0 - v) / 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn angle_pair_validation() {
        assert!(AnglePair::new(-0.1, 0.0).is_err());
        assert!(AnglePair::new(0.0, 1.8).is_err());
        assert!(AnglePair::new(f64::NAN, 0.0).is_err());
        assert!(AnglePair::new(FRAC_PI_2, FRAC_PI_2).is_ok());
    }
}
