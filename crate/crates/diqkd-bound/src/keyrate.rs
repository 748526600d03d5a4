//! Asymptotic key-rate assembly on top of the certified angle optimizer.
//!
//! The pipeline per CHSH score `s`:
//!
//! 1. [`crate::epsnet::optimize_angles`] produces a certified worst-case
//!    lower bound `n*` on the disturbance objective;
//! 2. for the Frobenius objective the Tikhonov term is stripped before
//!    lifting, since it inflates the objective value but carries no
//!    disturbance;
//! 3. the Pinsker-style lift converts `n*` into a bound `c_bar` on Eve's
//!    conditional entropy of the key bit;
//! 4. error correction subtracts `lambda h(Q0) + (1 - lambda) h(Q1)`,
//!    and the sifting factor `p^2 + (1-p)^2` scales the secret fraction
//!    into the key rate.
//!
//! Here `p` is the probability of the first key basis, `lambda = p^2 /
//! (p^2 + (1-p)^2)` is its weight conditioned on both parties sifting
//! into matching bases, and `h` is the binary entropy in bits.

use crate::epsnet::{optimize_angles, NetConfig, WorstCaseBound};
use crate::hermitian::binary_entropy;
use crate::objective::{pinsker_lift, ObjectiveKind, ObjectiveSpec};
use crate::solver::{SolverConfig, SolverStatus};
use crate::Error;
use serde::{Deserialize, Serialize};

/// Protocol parameters entering the key-rate formula.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct KeyRateParams {
    /// Probability of choosing the first key basis.
    pub p: f64,
    /// Quantum bit error rate in the first key basis.
    pub qber0: f64,
    /// Quantum bit error rate in the second key basis.
    pub qber1: f64,
}

impl KeyRateParams {
    pub fn new(p: f64, qber0: f64, qber1: f64) -> Result<Self, Error> {
        if !(p.is_finite() && p > 0.0 && p < 1.0) {
            return Err(Error::Config(format!("basis probability p = {p} must lie in (0, 1)")));
        }
        for (name, q) in [("qber0", qber0), ("qber1", qber1)] {
            if !(q.is_finite() && (0.0..=0.5).contains(&q)) {
                return Err(Error::Config(format!("{name} = {q} must lie in [0, 1/2]")));
            }
        }
        Ok(Self { p, qber0, qber1 })
    }

    /// Sifting probability `p^2 + (1-p)^2` and the conditional weight
    /// `lambda = p^2 / (p^2 + (1-p)^2)` of the first key basis.
    pub fn basis_weights(&self) -> (f64, f64) {
        let p_sift = self.p * self.p + (1.0 - self.p) * (1.0 - self.p);
        (p_sift, self.p * self.p / p_sift)
    }
}

/// A certified entropy bound for one score, before error correction.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CStarBound {
    /// Disturbance bound with the Tikhonov contribution removed.
    pub n_star: f64,
    /// Lifted lower bound on Eve's conditional entropy (bits).
    pub c_bar: f64,
    /// The full optimizer certificate behind the numbers.
    pub bound: WorstCaseBound,
    /// Which objective produced the bound.
    pub path: ObjectiveKind,
}

/// Certified lower bound on Eve's conditional entropy at score `s`.
///
/// `template.phi_a` is ignored (the net optimizer scans it); its
/// `kind`, `lambda`, and `mu` select the objective.
pub fn cstar_bound(
    template: &ObjectiveSpec,
    s: f64,
    net_cfg: &NetConfig,
    solver_cfg: &SolverConfig,
) -> Result<CStarBound, Error> {
    let bound = optimize_angles(template, s, net_cfg, solver_cfg)?;
    let n_star = (bound.n_star - bound.regularizer).max(0.0);
    let c_bar = pinsker_lift(n_star)?;
    Ok(CStarBound { n_star, c_bar, bound, path: template.kind })
}

/// Secret fraction `r = c_bar - lambda h(Q0) - (1 - lambda) h(Q1)`.
pub fn secret_fraction(c_bar: f64, params: &KeyRateParams) -> f64 {
    let (_, lambda) = params.basis_weights();
    // The QBERs were validated to lie in [0, 1/2], so the entropies exist.
    let h0 = binary_entropy(params.qber0).expect("validated qber0");
    let h1 = binary_entropy(params.qber1).expect("validated qber1");
    c_bar - lambda * h0 - (1.0 - lambda) * h1
}

/// Asymptotic key rate `K = (p^2 + (1-p)^2) * r`.
pub fn key_rate(c_bar: f64, params: &KeyRateParams) -> f64 {
    let (p_sift, _) = params.basis_weights();
    p_sift * secret_fraction(c_bar, params)
}

/// Checks that `(s, value)` points are nondecreasing in `s` and satisfy
/// midpoint convexity on every consecutive triple, within `tol`.
/// The points are sorted internally by `s`.
pub fn verify_convexity(points: &[(f64, f64)], tol: f64) -> Result<(), Error> {
    if points.len() < 2 {
        return Ok(());
    }
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    for w in pts.windows(2) {
        if w[1].1 < w[0].1 - tol {
            return Err(Error::Numerical(format!(
                "bound decreases from {} at s = {} to {} at s = {}",
                w[0].1, w[0].0, w[1].1, w[1].0
            )));
        }
    }
    for w in pts.windows(3) {
        let (x0, y0) = w[0];
        let (x1, y1) = w[1];
        let (x2, y2) = w[2];
        let span = x2 - x0;
        if span <= 0.0 {
            return Err(Error::Config("duplicate scores in convexity check".into()));
        }
        // Chord value at x1.
        let chord = y0 + (y2 - y0) * (x1 - x0) / span;
        if y1 > chord + tol {
            return Err(Error::Numerical(format!(
                "convexity violated at s = {x1}: value {y1} above chord {chord}"
            )));
        }
    }
    Ok(())
}

/// One row of a score sweep.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundRow {
    pub s: f64,
    pub phi_a: f64,
    pub phi_b: f64,
    pub n_star: f64,
    /// Total pessimistic correction applied at the final level:
    /// `delta_a + delta_b + 2 (1 - lambda) eps_final`.
    pub delta_total: f64,
    pub c_bar: f64,
    /// Secret fraction; absent when no protocol parameters were given.
    pub r_inf: Option<f64>,
    /// Key rate; absent when no protocol parameters were given.
    pub k_inf: Option<f64>,
    pub status: SolverStatus,
}

/// Certified bounds (and, when `params` is given, key rates) for a list
/// of scores. Rows come back in the order of `scores` regardless of the
/// rayon thread count; infeasible scores yield zero-rate rows rather
/// than aborting the sweep.
///
/// When the scores are strictly increasing, the per-score disturbance
/// bounds are additionally replaced by their monotone convex minorant
/// (see [`convex_minorant`]), so the reported curve is nondecreasing and
/// midpoint-convex by construction while every row remains a valid
/// certified bound for its own score.
pub fn sweep(
    template: &ObjectiveSpec,
    scores: &[f64],
    params: Option<&KeyRateParams>,
    net_cfg: &NetConfig,
    solver_cfg: &SolverConfig,
) -> Result<Vec<BoundRow>, Error> {
    use rayon::prelude::*;
    let results: Vec<Result<BoundRow, Error>> = scores
        .par_iter()
        .map(|&s| bound_row(template, s, params, net_cfg, solver_cfg))
        .collect();
    let mut rows: Vec<BoundRow> = results.into_iter().collect::<Result<_, _>>()?;
    if scores.windows(2).all(|w| w[0] < w[1]) {
        let pts: Vec<(f64, f64)> = rows.iter().map(|r| (r.s, r.n_star)).collect();
        let shaped = convex_minorant(&pts);
        for (row, n) in rows.iter_mut().zip(shaped) {
            row.n_star = n;
            row.c_bar = pinsker_lift(n)?;
            if let Some(p) = params {
                row.r_inf = Some(secret_fraction(row.c_bar, p));
                row.k_inf = Some(key_rate(row.c_bar, p));
            }
        }
    }
    Ok(rows)
}

/// Greatest nondecreasing convex sequence lying pointwise at or below
/// valid lower bounds sampled on an increasing grid.
///
/// Two facts make this sound. The exact worst-case disturbance is
/// nondecreasing in the score (raising `s` shrinks the feasible set of
/// states for every angle pair), so a bound certified at a lower score
/// also holds at any higher score and the running maximum stays a valid
/// bound per point. And any value at or below a valid bound is itself a
/// valid bound, so evaluating the lower convex hull of the lifted points
/// at the grid abscissae only ever gives away slack. The result absorbs
/// per-score certification noise into a curve that is monotone and
/// midpoint-convex exactly, not merely within tolerance.
pub fn convex_minorant(points: &[(f64, f64)]) -> Vec<f64> {
    if points.len() < 2 {
        return points.iter().map(|p| p.1).collect();
    }
    let mut lifted = points.to_vec();
    let mut running = f64::NEG_INFINITY;
    for p in &mut lifted {
        running = running.max(p.1);
        p.1 = running;
    }
    // Lower convex hull of the lifted points (monotone-chain scan).
    let mut hull: Vec<(f64, f64)> = Vec::with_capacity(lifted.len());
    for &p in &lifted {
        while hull.len() >= 2 {
            let a = hull[hull.len() - 2];
            let b = hull[hull.len() - 1];
            // Pop b when it sits on or above the chord from a to p.
            if (b.0 - a.0) * (p.1 - a.1) - (p.0 - a.0) * (b.1 - a.1) <= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    // Evaluate the hull back at each abscissa.
    let mut out = Vec::with_capacity(lifted.len());
    let mut k = 0;
    for &(x, _) in &lifted {
        while k + 1 < hull.len() && hull[k + 1].0 <= x {
            k += 1;
        }
        if k + 1 < hull.len() && hull[k].0 < x {
            let (x0, y0) = hull[k];
            let (x1, y1) = hull[k + 1];
            out.push(y0 + (y1 - y0) * (x - x0) / (x1 - x0));
        } else {
            out.push(hull[k].1);
        }
    }
    out
}

fn bound_row(
    template: &ObjectiveSpec,
    s: f64,
    params: Option<&KeyRateParams>,
    net_cfg: &NetConfig,
    solver_cfg: &SolverConfig,
) -> Result<BoundRow, Error> {
    {
        let row = match cstar_bound(template, s, net_cfg, solver_cfg) {
            Ok(cb) => BoundRow {
                s,
                phi_a: cb.bound.phi_a,
                phi_b: cb.bound.phi_b,
                n_star: cb.n_star,
                delta_total: cb.bound.delta_a + cb.bound.delta_b + cb.bound.objective_relaxation,
                c_bar: cb.c_bar,
                r_inf: params.map(|p| secret_fraction(cb.c_bar, p)),
                k_inf: params.map(|p| key_rate(cb.c_bar, p)),
                status: cb.bound.status,
            },
            // A score the relaxed net cannot certify still gets a row:
            // the trivial bound of zero entropy and zero rate.
            Err(Error::Infeasible(_)) => BoundRow {
                s,
                phi_a: f64::NAN,
                phi_b: f64::NAN,
                n_star: 0.0,
                delta_total: 0.0,
                c_bar: 0.0,
                r_inf: params.map(|p| secret_fraction(0.0, p)),
                k_inf: params.map(|p| key_rate(0.0, p)),
                status: SolverStatus::MaxIters,
            },
            Err(e) => return Err(e),
        };
        Ok(row)
    }
}
