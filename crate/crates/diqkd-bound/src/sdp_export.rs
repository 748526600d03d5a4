//! Export of the bound's minimization as a standard-form semidefinite
//! program, for cross-checking against external SDP solvers.
//!
//! Both objectives are SDP-representable once the feasible set
//! `{rho >= 0, Tr(rho) = 1, Tr(rho C) = s}` is written in a real
//! parametrization of Hermitian matrices:
//!
//! * Frobenius form: each squared residual `||rho - L_k rho||_F^2` is
//!   epigraphed by a scalar `t_k` through the Schur complement
//!   `[[t_k, vec(r_k)^dagger], [vec(r_k), I]] >= 0`, and the objective
//!   becomes `lambda t_0 + (1 - lambda) t_1 + (mu/2) t_2`.
//! * Trace-norm form: `||M||_1 = inf { (Tr P + Tr Q)/2 :
//!   [[P, M], [M^dagger, Q]] >= 0 }`, applied to the two residuals.
//!
//! The textual serialization is line-oriented, self-describing, and
//! round-trips exactly (floats are written in Rust's shortest form that
//! parses back to the identical bits).

use crate::chsh::{chsh_operator, AnglePair};
use crate::hermitian::{HermitianMatrix, MatrixError};
use crate::objective::{pinch_residual_herm, ObjectiveKind, ObjectiveSpec};
use num_complex::Complex64;

/// Real parametrization of a `dim x dim` Hermitian matrix:
/// first the `dim` diagonal entries, then for each pair `i < j` in
/// lexicographic order the real and imaginary part of the `(i, j)` entry.
pub fn hermitian_basis(dim: usize) -> Vec<HermitianMatrix> {
    let mut basis = Vec::with_capacity(dim * dim);
    let z = Complex64::new(0.0, 0.0);
    for i in 0..dim {
        let mut data = vec![z; dim * dim];
        data[i * dim + i] = Complex64::new(1.0, 0.0);
        basis.push(HermitianMatrix::new(dim, data).unwrap());
    }
    for i in 0..dim {
        for j in (i + 1)..dim {
            let mut re = vec![z; dim * dim];
            re[i * dim + j] = Complex64::new(1.0, 0.0);
            re[j * dim + i] = Complex64::new(1.0, 0.0);
            basis.push(HermitianMatrix::new(dim, re).unwrap());
            let mut im = vec![z; dim * dim];
            im[i * dim + j] = Complex64::new(0.0, 1.0);
            im[j * dim + i] = Complex64::new(0.0, -1.0);
            basis.push(HermitianMatrix::new(dim, im).unwrap());
        }
    }
    basis
}

/// Coordinates of a Hermitian matrix in the [`hermitian_basis`] order.
pub fn hermitian_coords(m: &HermitianMatrix) -> Vec<f64> {
    let dim = m.dim();
    let mut x = Vec::with_capacity(dim * dim);
    for i in 0..dim {
        x.push(m.get(i, i).re);
    }
    for i in 0..dim {
        for j in (i + 1)..dim {
            x.push(m.get(i, j).re);
            x.push(m.get(i, j).im);
        }
    }
    x
}

/// Rebuilds a Hermitian matrix from its coordinates.
pub fn hermitian_from_coords(dim: usize, x: &[f64]) -> Result<HermitianMatrix, MatrixError> {
    if x.len() != dim * dim {
        return Err(MatrixError::DimensionMismatch(x.len(), dim * dim));
    }
    let mut m = HermitianMatrix::zeros(dim);
    for (b, &c) in hermitian_basis(dim).iter().zip(x) {
        m = m.add(&b.scale(c))?;
    }
    Ok(m)
}

/// One affine term of an LMI block: `coeff * x_var` (or a constant when
/// `var` is `None`) contributing `re + i*im` at `(row, col)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SdpTerm {
    pub var: Option<usize>,
    pub row: usize,
    pub col: usize,
    pub re: f64,
    pub im: f64,
}

/// An LMI block `F_0 + sum_v x_v F_v >= 0` given by its nonzero terms.
#[derive(Debug, Clone, PartialEq)]
pub struct SdpBlock {
    pub name: String,
    pub dim: usize,
    pub terms: Vec<SdpTerm>,
}

impl SdpBlock {
    /// Evaluates the block at a variable assignment (for tests and
    /// downstream verification).
    pub fn evaluate(&self, x: &[f64]) -> Result<HermitianMatrix, MatrixError> {
        let mut data = vec![Complex64::new(0.0, 0.0); self.dim * self.dim];
        for t in &self.terms {
            let w = match t.var {
                None => 1.0,
                Some(v) => x[v],
            };
            data[t.row * self.dim + t.col] += Complex64::new(t.re * w, t.im * w);
        }
        HermitianMatrix::new(self.dim, data)
    }
}

/// A linear equality `sum_v coeff_v x_v = rhs`.
#[derive(Debug, Clone, PartialEq)]
pub struct SdpEquality {
    pub name: String,
    pub rhs: f64,
    pub coeffs: Vec<(usize, f64)>,
}

impl SdpEquality {
    pub fn evaluate(&self, x: &[f64]) -> f64 {
        self.coeffs.iter().map(|&(v, c)| c * x[v]).sum()
    }
}

/// A standard-form SDP: minimize `objective . x` subject to every block
/// being positive semidefinite and every equality holding.
#[derive(Debug, Clone, PartialEq)]
pub struct SdpProblem {
    pub kind: ObjectiveKind,
    pub dim: usize,
    pub lambda: f64,
    pub mu: f64,
    pub phi_a: f64,
    pub phi_b: f64,
    pub s: f64,
    pub num_vars: usize,
    /// Sparse objective: `(variable, coefficient)` pairs.
    pub objective: Vec<(usize, f64)>,
    pub blocks: Vec<SdpBlock>,
    pub equalities: Vec<SdpEquality>,
}

const DIM: usize = 4;
const RHO_VARS: usize = DIM * DIM; // 16 real parameters

/// Builds the standard-form SDP for minimizing the configured objective
/// over states with CHSH score exactly `s` at the given angles.
pub fn export_sdp_standard_form(
    spec: &ObjectiveSpec,
    angles: &AnglePair,
    s: f64,
) -> Result<SdpProblem, MatrixError> {
    if !s.is_finite() {
        return Err(MatrixError::Domain(format!("s = {s} is not finite")));
    }
    if (spec.phi_a - angles.phi_a).abs() > 1e-12 {
        return Err(MatrixError::Domain(format!(
            "objective key angle {} disagrees with constraint angle {}",
            spec.phi_a, angles.phi_a
        )));
    }
    let basis = hermitian_basis(DIM);
    let (p0, p1) = spec.key_projectors();
    // Residual maps applied to each basis matrix: the residual is linear
    // in rho, so these columns define every LMI entry below.
    let resid0: Vec<HermitianMatrix> = basis
        .iter()
        .map(|b| pinch_residual_herm(b, &p0))
        .collect::<Result<_, _>>()?;
    let resid1: Vec<HermitianMatrix> = basis
        .iter()
        .map(|b| pinch_residual_herm(b, &p1))
        .collect::<Result<_, _>>()?;

    let mut blocks = Vec::new();
    let mut objective = Vec::new();
    let num_vars;

    match spec.kind {
        ObjectiveKind::Frobenius => {
            // Variables: rho (16), then t_0, t_1, t_2.
            num_vars = RHO_VARS + 3;
            let t_var = |k: usize| RHO_VARS + k;
            objective.push((t_var(0), spec.lambda));
            objective.push((t_var(1), 1.0 - spec.lambda));
            objective.push((t_var(2), 0.5 * spec.mu));
            let ident: Vec<HermitianMatrix> = basis.clone();
            for (k, resid) in [&resid0, &resid1, &ident].into_iter().enumerate() {
                blocks.push(schur_vec_block(&format!("schur_{k}"), resid, t_var(k)));
            }
        }
        ObjectiveKind::TraceNorm => {
            // Variables: rho (16), then P0, Q0, P1, Q1 (16 each).
            num_vars = RHO_VARS * 5;
            for (k, resid) in [&resid0, &resid1].into_iter().enumerate() {
                let p_off = RHO_VARS * (1 + 2 * k);
                let q_off = RHO_VARS * (2 + 2 * k);
                let w = if k == 0 { spec.lambda } else { 1.0 - spec.lambda };
                // (Tr P + Tr Q)/2 contributes through the diagonal params.
                for d in 0..DIM {
                    objective.push((p_off + d, 0.5 * w));
                    objective.push((q_off + d, 0.5 * w));
                }
                blocks.push(trace_norm_block(
                    &format!("schur_{k}"),
                    resid,
                    &basis,
                    p_off,
                    q_off,
                ));
            }
        }
    }

    // PSD block for rho itself.
    let mut rho_terms = Vec::new();
    for (v, b) in basis.iter().enumerate() {
        push_matrix_terms(&mut rho_terms, Some(v), b, 0, 0);
    }
    blocks.push(SdpBlock { name: "rho_psd".into(), dim: DIM, terms: rho_terms });

    // Equalities: unit trace and CHSH score.
    let trace_eq = SdpEquality {
        name: "trace".into(),
        rhs: 1.0,
        coeffs: (0..DIM).map(|d| (d, 1.0)).collect(),
    };
    let c = chsh_operator(angles);
    let chsh_eq = SdpEquality {
        name: "chsh".into(),
        rhs: s,
        coeffs: basis
            .iter()
            .enumerate()
            .filter_map(|(v, b)| {
                let coef = b.inner(&c).expect("same dim");
                (coef.abs() > 0.0).then_some((v, coef))
            })
            .collect(),
    };

    Ok(SdpProblem {
        kind: spec.kind,
        dim: DIM,
        lambda: spec.lambda,
        mu: spec.mu,
        phi_a: angles.phi_a,
        phi_b: angles.phi_b,
        s,
        num_vars,
        objective,
        blocks,
        equalities: vec![trace_eq, chsh_eq],
    })
}

/// Schur block `[[t, vec(R x)^dagger], [vec(R x), I]]` of size
/// `1 + dim^2`, where `R` is the linear residual map given columnwise.
fn schur_vec_block(name: &str, resid: &[HermitianMatrix], t_var: usize) -> SdpBlock {
    let n = 1 + DIM * DIM;
    let mut terms = vec![SdpTerm { var: Some(t_var), row: 0, col: 0, re: 1.0, im: 0.0 }];
    for m in 1..n {
        terms.push(SdpTerm { var: None, row: m, col: m, re: 1.0, im: 0.0 });
    }
    for (v, r) in resid.iter().enumerate() {
        for i in 0..DIM {
            for j in 0..DIM {
                let z = r.get(i, j);
                if z.norm_sqr() == 0.0 {
                    continue;
                }
                let m = 1 + i * DIM + j; // row-major vectorization
                terms.push(SdpTerm { var: Some(v), row: m, col: 0, re: z.re, im: z.im });
                terms.push(SdpTerm { var: Some(v), row: 0, col: m, re: z.re, im: -z.im });
            }
        }
    }
    SdpBlock { name: name.into(), dim: n, terms }
}

/// Trace-norm block `[[P, M], [M, Q]]` of size `2 dim`, with `M` the
/// (Hermitian) residual of `rho` and `P`, `Q` free Hermitian variables.
fn trace_norm_block(
    name: &str,
    resid: &[HermitianMatrix],
    basis: &[HermitianMatrix],
    p_off: usize,
    q_off: usize,
) -> SdpBlock {
    let mut terms = Vec::new();
    for (v, b) in basis.iter().enumerate() {
        push_matrix_terms(&mut terms, Some(p_off + v), b, 0, 0);
        push_matrix_terms(&mut terms, Some(q_off + v), b, DIM, DIM);
    }
    for (v, r) in resid.iter().enumerate() {
        push_matrix_terms(&mut terms, Some(v), r, 0, DIM);
        push_matrix_terms(&mut terms, Some(v), r, DIM, 0);
    }
    SdpBlock { name: name.into(), dim: 2 * DIM, terms }
}

fn push_matrix_terms(
    terms: &mut Vec<SdpTerm>,
    var: Option<usize>,
    m: &HermitianMatrix,
    row_off: usize,
    col_off: usize,
) {
    for i in 0..m.dim() {
        for j in 0..m.dim() {
            let z = m.get(i, j);
            if z.norm_sqr() == 0.0 {
                continue;
            }
            terms.push(SdpTerm {
                var,
                row: row_off + i,
                col: col_off + j,
                re: z.re,
                im: z.im,
            });
        }
    }
}

impl SdpProblem {
    /// Serializes to the line-oriented text format. The output round-trips
    /// exactly through [`SdpProblem::from_text`].
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        use std::fmt::Write;
        writeln!(out, "sdpx 1").unwrap();
        writeln!(out, "kind {}", self.kind).unwrap();
        writeln!(out, "dim {}", self.dim).unwrap();
        writeln!(out, "lambda {}", self.lambda).unwrap();
        writeln!(out, "mu {}", self.mu).unwrap();
        writeln!(out, "phi_a {}", self.phi_a).unwrap();
        writeln!(out, "phi_b {}", self.phi_b).unwrap();
        writeln!(out, "s {}", self.s).unwrap();
        writeln!(out, "vars {}", self.num_vars).unwrap();
        writeln!(out, "objective {}", self.objective.len()).unwrap();
        for (v, c) in &self.objective {
            writeln!(out, "coef {v} {c}").unwrap();
        }
        writeln!(out, "blocks {}", self.blocks.len()).unwrap();
        for b in &self.blocks {
            writeln!(out, "block {} {} {}", b.name, b.dim, b.terms.len()).unwrap();
            for t in &b.terms {
                let v = t.var.map_or("c".to_string(), |v| v.to_string());
                writeln!(out, "term {} {} {} {} {}", v, t.row, t.col, t.re, t.im).unwrap();
            }
        }
        writeln!(out, "eqs {}", self.equalities.len()).unwrap();
        for e in &self.equalities {
            writeln!(out, "eq {} {} {}", e.name, e.rhs, e.coeffs.len()).unwrap();
            for (v, c) in &e.coeffs {
                writeln!(out, "coef {v} {c}").unwrap();
            }
        }
        writeln!(out, "end").unwrap();
        out
    }

    /// Parses the text format produced by [`SdpProblem::to_text`].
    pub fn from_text(text: &str) -> Result<Self, MatrixError> {
        let bad = |msg: &str| MatrixError::Domain(format!("sdp parse error: {msg}"));
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let mut expect = |key: &str| -> Result<Vec<String>, MatrixError> {
            let line = lines.next().ok_or_else(|| bad(&format!("missing '{key}'")))?;
            let mut parts = line.split_whitespace();
            if parts.next() != Some(key) {
                return Err(bad(&format!("expected '{key}', got '{line}'")));
            }
            Ok(parts.map(str::to_string).collect())
        };
        let parse_f = |s: &str| s.parse::<f64>().map_err(|_| bad(&format!("bad float '{s}'")));
        let parse_u = |s: &str| s.parse::<usize>().map_err(|_| bad(&format!("bad int '{s}'")));

        let header = expect("sdpx")?;
        if header.first().map(String::as_str) != Some("1") {
            return Err(bad("unsupported version"));
        }
        let kind = match expect("kind")?.first().map(String::as_str) {
            Some("frobenius") => ObjectiveKind::Frobenius,
            Some("trace_norm") => ObjectiveKind::TraceNorm,
            other => return Err(bad(&format!("unknown kind {other:?}"))),
        };
        let dim = parse_u(expect("dim")?.first().ok_or_else(|| bad("dim"))?)?;
        let lambda = parse_f(expect("lambda")?.first().ok_or_else(|| bad("lambda"))?)?;
        let mu = parse_f(expect("mu")?.first().ok_or_else(|| bad("mu"))?)?;
        let phi_a = parse_f(expect("phi_a")?.first().ok_or_else(|| bad("phi_a"))?)?;
        let phi_b = parse_f(expect("phi_b")?.first().ok_or_else(|| bad("phi_b"))?)?;
        let s = parse_f(expect("s")?.first().ok_or_else(|| bad("s"))?)?;
        let num_vars = parse_u(expect("vars")?.first().ok_or_else(|| bad("vars"))?)?;

        let n_obj = parse_u(expect("objective")?.first().ok_or_else(|| bad("objective"))?)?;
        let mut objective = Vec::with_capacity(n_obj);
        for _ in 0..n_obj {
            let c = expect("coef")?;
            if c.len() != 2 {
                return Err(bad("coef arity"));
            }
            objective.push((parse_u(&c[0])?, parse_f(&c[1])?));
        }

        let n_blocks = parse_u(expect("blocks")?.first().ok_or_else(|| bad("blocks"))?)?;
        let mut blocks = Vec::with_capacity(n_blocks);
        for _ in 0..n_blocks {
            let h = expect("block")?;
            if h.len() != 3 {
                return Err(bad("block arity"));
            }
            let (name, bdim, nterms) = (h[0].clone(), parse_u(&h[1])?, parse_u(&h[2])?);
            let mut terms = Vec::with_capacity(nterms);
            for _ in 0..nterms {
                let t = expect("term")?;
                if t.len() != 5 {
                    return Err(bad("term arity"));
                }
                let var = if t[0] == "c" { None } else { Some(parse_u(&t[0])?) };
                terms.push(SdpTerm {
                    var,
                    row: parse_u(&t[1])?,
                    col: parse_u(&t[2])?,
                    re: parse_f(&t[3])?,
                    im: parse_f(&t[4])?,
                });
            }
            blocks.push(SdpBlock { name, dim: bdim, terms });
        }

        let n_eqs = parse_u(expect("eqs")?.first().ok_or_else(|| bad("eqs"))?)?;
        let mut equalities = Vec::with_capacity(n_eqs);
        for _ in 0..n_eqs {
            let h = expect("eq")?;
            if h.len() != 3 {
                return Err(bad("eq arity"));
            }
            let (name, rhs, ncoefs) = (h[0].clone(), parse_f(&h[1])?, parse_u(&h[2])?);
            let mut coeffs = Vec::with_capacity(ncoefs);
            for _ in 0..ncoefs {
                let c = expect("coef")?;
                if c.len() != 2 {
                    return Err(bad("coef arity"));
                }
                coeffs.push((parse_u(&c[0])?, parse_f(&c[1])?));
            }
            equalities.push(SdpEquality { name, rhs, coeffs });
        }
        expect("end")?;
        Ok(Self {
            kind,
            dim,
            lambda,
            mu,
            phi_a,
            phi_b,
            s,
            num_vars,
            objective,
            blocks,
            equalities,
        })
    }

    /// Objective value at a variable assignment.
    pub fn objective_value(&self, x: &[f64]) -> f64 {
        self.objective.iter().map(|&(v, c)| c * x[v]).sum()
    }
}
