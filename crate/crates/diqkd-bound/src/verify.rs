//! Built-in invariant suites behind the `verify` subcommand.
//!
//! Each suite re-checks one module's core guarantees on seeded random
//! inputs. With the same seed the summary is byte-identical across
//! runs, so it doubles as a determinism check.

use crate::chsh::{self, AnglePair, ANGLE_MAX, ANGLE_MIN};
use crate::hermitian::{DensityMatrix, HermitianMatrix};
use crate::keyrate::verify_convexity;
use crate::objective::{
    frobenius_gradient_herm, frobenius_objective_herm, pinsker_lift, ObjectiveKind, ObjectiveSpec,
};
use crate::pinching::{entropy_production, pinch_key};
use crate::sdp_export::{export_sdp_standard_form, SdpProblem};
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::fmt::Write as _;

/// Outcome of one invariant suite.
pub struct CheckResult {
    pub name: &'static str,
    /// `None` means pass; `Some` carries the first failure found.
    pub failure: Option<String>,
}

/// Results of all suites plus the failure count.
pub struct Summary {
    pub seed: u64,
    pub results: Vec<CheckResult>,
    pub failed: usize,
}

impl Summary {
    /// One line per suite plus a totals line; stable for a fixed seed.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for r in &self.results {
            match &r.failure {
                None => writeln!(out, "{}: pass", r.name).unwrap(),
                Some(msg) => writeln!(out, "{}: FAIL ({msg})", r.name).unwrap(),
            }
        }
        writeln!(
            out,
            "verify: {} passed, {} failed (seed {})",
            self.results.len() - self.failed,
            self.failed,
            self.seed
        )
        .unwrap();
        out
    }
}

/// Runs every suite with RNG streams derived from `seed`.
pub fn run_all(seed: u64) -> Summary {
    let checks: [(&'static str, fn(u64) -> Result<(), String>); 8] = [
        ("angle-recovery", check_angle_recovery),
        ("chsh-construction", check_chsh_construction),
        ("score-deviation", check_score_deviation),
        ("pinching-channel", check_pinching),
        ("objective-gradient", check_gradient),
        ("entropy-lift", check_entropy_lift),
        ("convexity-checker", check_convexity),
        ("sdp-roundtrip", check_sdp_roundtrip),
    ];
    let results: Vec<CheckResult> = checks
        .iter()
        .enumerate()
        .map(|(i, (name, f))| CheckResult {
            name,
            failure: f(seed.wrapping_add(i as u64)).err(),
        })
        .collect();
    let failed = results.iter().filter(|r| r.failure.is_some()).count();
    Summary { seed, results, failed }
}

fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random full-rank density matrix from a complex Gram construction.
fn random_density(rng: &mut ChaCha8Rng, dim: usize) -> DensityMatrix {
    let g: Vec<Complex64> = (0..dim * dim)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    let mut entries = vec![Complex64::new(0.0, 0.0); dim * dim];
    for i in 0..dim {
        for j in 0..dim {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..dim {
                acc += g[i * dim + k] * g[j * dim + k].conj();
            }
            entries[i * dim + j] = acc;
        }
        // A touch of identity keeps the spectrum away from zero.
        entries[i * dim + i] += 1e-3;
    }
    let m = HermitianMatrix::new(dim, entries).expect("Gram matrix is Hermitian");
    let m = m.scale(1.0 / m.trace());
    DensityMatrix::new(m).expect("normalized Gram matrix is a state")
}

/// Random Hermitian direction with unit Frobenius norm.
fn random_direction(rng: &mut ChaCha8Rng, dim: usize) -> HermitianMatrix {
    let mut entries = vec![Complex64::new(0.0, 0.0); dim * dim];
    for i in 0..dim {
        entries[i * dim + i] = Complex64::new(rng.gen_range(-1.0..1.0), 0.0);
        for j in (i + 1)..dim {
            let z = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            entries[i * dim + j] = z;
            entries[j * dim + i] = z.conj();
        }
    }
    let d = HermitianMatrix::new(dim, entries).expect("constructed Hermitian");
    let n = d.frobenius_norm();
    d.scale(1.0 / n.max(1e-12))
}

fn check_angle_recovery(seed: u64) -> Result<(), String> {
    let mut rng = rng_for(seed);
    for _ in 0..200 {
        let phi = rng.gen_range(ANGLE_MIN..=ANGLE_MAX);
        let sum = chsh::projector_q(0.0)
            .add(&chsh::projector_q(phi))
            .map_err(|e| e.to_string())?;
        let eig = sum.eig().map_err(|e| e.to_string())?;
        let back = chsh::recover_angle(eig.eigenvalues[0], eig.eigenvalues[1])
            .map_err(|e| e.to_string())?;
        if (back - phi).abs() > 1e-9 {
            return Err(format!("phi = {phi} recovered as {back}"));
        }
    }
    Ok(())
}

fn check_chsh_construction(seed: u64) -> Result<(), String> {
    let mut rng = rng_for(seed);
    for _ in 0..100 {
        let angles = AnglePair::new(
            rng.gen_range(ANGLE_MIN..=ANGLE_MAX),
            rng.gen_range(ANGLE_MIN..=ANGLE_MAX),
        )
        .map_err(|e| e.to_string())?;
        let block = chsh::chsh_operator(&angles);
        let tensor = chsh::chsh_operator_from_projectors(&angles);
        let diff = block.sub(&tensor).map_err(|e| e.to_string())?.frobenius_norm();
        if diff > 1e-12 {
            return Err(format!(
                "constructions differ by {diff} at ({}, {})",
                angles.phi_a, angles.phi_b
            ));
        }
    }
    let top = AnglePair::new(ANGLE_MAX, ANGLE_MAX).map_err(|e| e.to_string())?;
    let s = chsh::max_violation(&top).map_err(|e| e.to_string())?;
    let cap = 2.0 * std::f64::consts::SQRT_2;
    if (s - cap).abs() > 1e-9 {
        return Err(format!("maximum at (pi/2, pi/2) is {s}, expected {cap}"));
    }
    Ok(())
}

fn check_score_deviation(seed: u64) -> Result<(), String> {
    let mut rng = rng_for(seed);
    for _ in 0..100 {
        let angles = AnglePair::new(
            rng.gen_range(ANGLE_MIN..=ANGLE_MAX),
            rng.gen_range(ANGLE_MIN..=ANGLE_MAX),
        )
        .map_err(|e| e.to_string())?;
        for eps in [1e-3, 1e-2, 1e-1] {
            let dev = chsh::chsh_deviation(&angles, eps).map_err(|e| e.to_string())?;
            let cap = 2.0 * eps + 5.0 * eps * eps;
            if dev > cap + 1e-12 {
                return Err(format!("deviation {dev} exceeds {cap} at eps = {eps}"));
            }
        }
    }
    Ok(())
}

fn check_pinching(seed: u64) -> Result<(), String> {
    let mut rng = rng_for(seed);
    for _ in 0..100 {
        let rho = random_density(&mut rng, 4);
        let theta = rng.gen_range(ANGLE_MIN..=ANGLE_MAX);
        let once = pinch_key(&rho, theta).map_err(|e| e.to_string())?;
        let twice = pinch_key(&once, theta).map_err(|e| e.to_string())?;
        let idem = once.matrix().sub(twice.matrix()).map_err(|e| e.to_string())?.frobenius_norm();
        if idem > 1e-10 {
            return Err(format!("idempotence residual {idem}"));
        }
        if (once.matrix().trace() - 1.0).abs() > 1e-10 {
            return Err(format!("trace drifted to {}", once.matrix().trace()));
        }
        let prod = entropy_production(&rho, theta).map_err(|e| e.to_string())?;
        if prod < -1e-10 {
            return Err(format!("entropy production {prod} is negative"));
        }
        // Data processing: pinching contracts the trace distance to any
        // other state.
        let sigma = random_density(&mut rng, 4);
        let sigma_p = pinch_key(&sigma, theta).map_err(|e| e.to_string())?;
        let before = rho
            .matrix()
            .sub(sigma.matrix())
            .and_then(|d| d.trace_norm())
            .map_err(|e| e.to_string())?;
        let after = once
            .matrix()
            .sub(sigma_p.matrix())
            .and_then(|d| d.trace_norm())
            .map_err(|e| e.to_string())?;
        if after > before + 1e-10 {
            return Err(format!("trace distance grew from {before} to {after}"));
        }
    }
    Ok(())
}

fn check_gradient(seed: u64) -> Result<(), String> {
    let mut rng = rng_for(seed);
    let spec = ObjectiveSpec::new(ObjectiveKind::Frobenius, 0.5, 1e-6, 1.0)
        .map_err(|e| e.to_string())?;
    for _ in 0..50 {
        let x = random_density(&mut rng, 4).matrix().clone();
        let dir = random_direction(&mut rng, 4);
        let grad = frobenius_gradient_herm(&spec, &x).map_err(|e| e.to_string())?;
        let analytic = grad.inner(&dir).map_err(|e| e.to_string())?;
        let t = 1e-6;
        let plus = frobenius_objective_herm(&spec, &x.add(&dir.scale(t)).unwrap())
            .map_err(|e| e.to_string())?;
        let minus = frobenius_objective_herm(&spec, &x.add(&dir.scale(-t)).unwrap())
            .map_err(|e| e.to_string())?;
        let numeric = (plus - minus) / (2.0 * t);
        if (analytic - numeric).abs() > 1e-5 {
            return Err(format!("gradient {analytic} vs finite difference {numeric}"));
        }
    }
    Ok(())
}

fn check_entropy_lift(_seed: u64) -> Result<(), String> {
    let a = pinsker_lift(0.0).map_err(|e| e.to_string())?;
    let b = pinsker_lift(1.0).map_err(|e| e.to_string())?;
    if a.abs() > 1e-12 || (b - 1.0).abs() > 1e-12 {
        return Err(format!("endpoints lift(0) = {a}, lift(1) = {b}"));
    }
    let mut prev = a;
    for k in 1..=1000 {
        let v = pinsker_lift(k as f64 / 1000.0).map_err(|e| e.to_string())?;
        if v + 1e-12 < prev {
            return Err(format!("lift decreased to {v} at n = {}", k as f64 / 1000.0));
        }
        prev = v;
    }
    Ok(())
}

fn check_convexity(_seed: u64) -> Result<(), String> {
    let quad: Vec<(f64, f64)> = (0..20).map(|k| { let x = k as f64 / 10.0; (x, x * x) }).collect();
    verify_convexity(&quad, 1e-9).map_err(|e| format!("rejected a convex curve: {e}"))?;
    let mut bumped = quad;
    bumped[10].1 += 0.5;
    if verify_convexity(&bumped, 1e-9).is_ok() {
        return Err("accepted a non-convex curve".into());
    }
    Ok(())
}

fn check_sdp_roundtrip(_seed: u64) -> Result<(), String> {
    let spec = ObjectiveSpec::new(ObjectiveKind::Frobenius, 0.5, 1e-6, ANGLE_MAX)
        .map_err(|e| e.to_string())?;
    let angles = AnglePair::new(ANGLE_MAX, ANGLE_MAX).map_err(|e| e.to_string())?;
    let problem = export_sdp_standard_form(&spec, &angles, 2.5).map_err(|e| e.to_string())?;
    let text = problem.to_text();
    let back = SdpProblem::from_text(&text).map_err(|e| e.to_string())?;
    if back.to_text() != text {
        return Err("text form did not survive a parse round trip".into());
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_suites_pass() {
        let summary = run_all(0);
        for r in &summary.results {
            assert!(r.failure.is_none(), "{}: {:?}", r.name, r.failure);
        }
        assert_eq!(summary.failed, 0);
    }

    #[test]
    fn summary_is_deterministic_per_seed() {
        assert_eq!(run_all(7).render(), run_all(7).render());
    }
}
