//! Dense Hermitian linear algebra on small complex matrices.
//!
//! Everything downstream works with 2x2 single-qubit operators and 4x4
//! two-qubit operators, so this module keeps the representation simple:
//! row-major `Vec<Complex64>` storage, closed-form eigendecomposition for
//! 2x2 and a cyclic complex Jacobi sweep for larger dimensions.
//!
//! All entropies are in bits (base-2 logarithms).

use num_complex::Complex64;
use thiserror::Error;

/// Complex scalar used throughout the crate.
pub type ComplexScalar = Complex64;

/// Tolerance for accepting a matrix as Hermitian at construction.
pub const HERMITICITY_TOL: f64 = 1e-12;
/// Off-diagonal Frobenius norm at which the Jacobi iteration stops.
pub const EIG_OFFDIAG_TOL: f64 = 1e-12;
/// Hard cap on Jacobi sweeps; hit only on pathological input.
pub const EIG_MAX_SWEEPS: usize = 100;
/// Eigenvalues below this floor are treated as zero inside logarithms.
pub const ENTROPY_EIGENVALUE_FLOOR: f64 = 1e-14;
/// Tolerance for density-matrix invariants (unit trace, positivity).
pub const DENSITY_TOL: f64 = 1e-9;

/// Errors surfaced by the numerical core.
#[derive(Debug, Error)]
pub enum MatrixError {
    #[error("matrix is not Hermitian: max |A - A^dagger| = {0:.3e}")]
    NotHermitian(f64),
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("invalid dimension {0}: expected a square matrix of dim >= 1")]
    InvalidDimension(usize),
    #[error("matrix entries must be finite")]
    NonFinite,
    #[error("eigensolver did not reach off-diagonal tolerance after {0} sweeps")]
    EigNotConverged(usize),
    #[error("not a density matrix: {0}")]
    NotDensity(String),
    #[error("domain error: {0}")]
    Domain(String),
}

/// A Hermitian matrix with row-major complex storage.
///
/// Construction symmetrizes the input, `(A + A^dagger)/2`, after checking
/// that the asymmetry is below [`HERMITICITY_TOL`]; diagonal imaginary
/// parts are forced to exactly zero. All arithmetic below preserves
/// Hermiticity exactly up to rounding in the symmetric combination used.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl HermitianMatrix {
    /// Builds a Hermitian matrix from row-major entries.
    pub fn new(dim: usize, entries: Vec<Complex64>) -> Result<Self, MatrixError> {
        if dim == 0 {
            return Err(MatrixError::InvalidDimension(dim));
        }
        if entries.len() != dim * dim {
            return Err(MatrixError::DimensionMismatch(entries.len(), dim * dim));
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(MatrixError::NonFinite);
        }
        let mut asym: f64 = 0.0;
        for i in 0..dim {
            for j in 0..dim {
                let d = entries[i * dim + j] - entries[j * dim + i].conj();
                asym = asym.max(d.norm());
            }
        }
        if asym > HERMITICITY_TOL {
            return Err(MatrixError::NotHermitian(asym));
        }
        let mut data = vec![Complex64::new(0.0, 0.0); dim * dim];
        for i in 0..dim {
            for j in 0..dim {
                let z = 0.5 * (entries[i * dim + j] + entries[j * dim + i].conj());
                data[i * dim + j] = if i == j { Complex64::new(z.re, 0.0) } else { z };
            }
        }
        // Re-assert exact conjugate symmetry after the averaging pass.
        for i in 0..dim {
            for j in (i + 1)..dim {
                data[j * dim + i] = data[i * dim + j].conj();
            }
        }
        Ok(Self { dim, data })
    }

    /// Builds from real row-major entries (must be symmetric).
    pub fn from_real(dim: usize, entries: &[f64]) -> Result<Self, MatrixError> {
        let complex: Vec<Complex64> = entries.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Self::new(dim, complex)
    }

    /// The zero matrix.
    pub fn zeros(dim: usize) -> Self {
        Self { dim, data: vec![Complex64::new(0.0, 0.0); dim * dim] }
    }

    /// The identity matrix.
    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = Complex64::new(1.0, 0.0);
        }
        m
    }

    /// Rank-one projector |v><v| / <v|v>.
    pub fn projector_onto(v: &[Complex64]) -> Result<Self, MatrixError> {
        let dim = v.len();
        let norm2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if norm2 <= 0.0 || !norm2.is_finite() {
            return Err(MatrixError::Domain("projector onto zero vector".into()));
        }
        let mut data = vec![Complex64::new(0.0, 0.0); dim * dim];
        for i in 0..dim {
            for j in 0..dim {
                data[i * dim + j] = v[i] * v[j].conj() / norm2;
            }
        }
        Self::new(dim, data)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Entry (i, j).
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.dim + j]
    }

    /// Row-major view of the entries.
    pub fn entries(&self) -> &[Complex64] {
        &self.data
    }

    pub fn add(&self, other: &Self) -> Result<Self, MatrixError> {
        self.check_dim(other)?;
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        Ok(Self { dim: self.dim, data })
    }

    pub fn sub(&self, other: &Self) -> Result<Self, MatrixError> {
        self.check_dim(other)?;
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        Ok(Self { dim: self.dim, data })
    }

    /// Scales by a real factor (complex factors would break Hermiticity).
    pub fn scale(&self, c: f64) -> Self {
        let data = self.data.iter().map(|a| a * c).collect();
        Self { dim: self.dim, data }
    }

    /// Plain matrix product; the result is generally *not* Hermitian, so the
    /// raw entries are returned.
    pub fn matmul_raw(&self, other: &Self) -> Result<Vec<Complex64>, MatrixError> {
        self.check_dim(other)?;
        let n = self.dim;
        let mut out = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out[i * n + j] += a * other.data[k * n + j];
                }
            }
        }
        Ok(out)
    }

    /// Hermitian part of the product, `(AB + (AB)^dagger)/2`.
    pub fn symmetrized_product(&self, other: &Self) -> Result<Self, MatrixError> {
        let raw = self.matmul_raw(other)?;
        let n = self.dim;
        let mut data = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            for j in 0..n {
                let z = 0.5 * (raw[i * n + j] + raw[j * n + i].conj());
                data[i * n + j] = if i == j { Complex64::new(z.re, 0.0) } else { z };
            }
        }
        Ok(Self { dim: n, data })
    }

    /// Conjugation `B A B` for Hermitian `B` (used for pinching terms).
    /// The result is Hermitian whenever `A` is.
    pub fn conjugate_with(&self, b: &Self) -> Result<Self, MatrixError> {
        let ba = b.matmul_raw(self)?;
        let n = self.dim;
        let mut out = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            for k in 0..n {
                let a = ba[i * n + k];
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out[i * n + j] += a * b.data[k * n + j];
                }
            }
        }
        // Exact in real arithmetic; symmetrize away rounding noise.
        let mut data = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            for j in 0..n {
                let z = 0.5 * (out[i * n + j] + out[j * n + i].conj());
                data[i * n + j] = if i == j { Complex64::new(z.re, 0.0) } else { z };
            }
        }
        Ok(Self { dim: n, data })
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.data[i * self.dim + i].re).sum()
    }

    /// Hilbert-Schmidt inner product Tr(A B), real for Hermitian arguments.
    pub fn inner(&self, other: &Self) -> Result<f64, MatrixError> {
        self.check_dim(other)?;
        let mut acc = 0.0;
        for i in 0..self.dim {
            for j in 0..self.dim {
                // Tr(AB) = sum_ij A_ij B_ji = sum_ij A_ij conj(B_ij).
                acc += (self.data[i * self.dim + j] * other.data[i * self.dim + j].conj()).re;
            }
        }
        Ok(acc)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Trace norm: sum of absolute eigenvalues.
    pub fn trace_norm(&self) -> Result<f64, MatrixError> {
        Ok(self.eig()?.eigenvalues.iter().map(|l| l.abs()).sum())
    }

    /// Spectral norm: largest absolute eigenvalue.
    pub fn spectral_norm(&self) -> Result<f64, MatrixError> {
        Ok(self
            .eig()?
            .eigenvalues
            .iter()
            .fold(0.0_f64, |m, l| m.max(l.abs())))
    }

    /// Kronecker product of two Hermitian matrices (itself Hermitian).
    pub fn kron(a: &Self, b: &Self) -> Self {
        let (na, nb) = (a.dim, b.dim);
        let n = na * nb;
        let mut data = vec![Complex64::new(0.0, 0.0); n * n];
        for ia in 0..na {
            for ja in 0..na {
                let f = a.data[ia * na + ja];
                for ib in 0..nb {
                    for jb in 0..nb {
                        data[(ia * nb + ib) * n + (ja * nb + jb)] = f * b.data[ib * nb + jb];
                    }
                }
            }
        }
        Self { dim: n, data }
    }

    /// Full eigendecomposition with eigenvalues sorted in descending order.
    ///
    /// 2x2 matrices use the closed form; larger dimensions run cyclic
    /// complex Jacobi sweeps until the off-diagonal Frobenius norm drops
    /// below [`EIG_OFFDIAG_TOL`].
    pub fn eig(&self) -> Result<EigenDecomposition, MatrixError> {
        if self.dim == 2 {
            return Ok(self.eig2());
        }
        self.eig_jacobi()
    }

    fn eig2(&self) -> EigenDecomposition {
        let a = self.data[0].re;
        let d = self.data[3].re;
        let b = self.data[1];
        let r = b.norm();
        let half_sum = 0.5 * (a + d);
        let disc = (0.5 * (a - d)).hypot(r);
        let l1 = half_sum + disc;
        let l2 = half_sum - disc;
        // Eigenvector for l1: (b, l1 - a) or (l1 - d, conj(b)), whichever is
        // better conditioned.
        let mk = |l: f64| -> Vec<Complex64> {
            let v1 = [b, Complex64::new(l - a, 0.0)];
            let v2 = [Complex64::new(l - d, 0.0), b.conj()];
            let n1: f64 = v1.iter().map(|z| z.norm_sqr()).sum();
            let n2: f64 = v2.iter().map(|z| z.norm_sqr()).sum();
            let (v, n) = if n1 >= n2 { (v1, n1) } else { (v2, n2) };
            if n <= 0.0 {
                // Diagonal matrix; fall back to basis vectors.
                return if (l - a).abs() <= (l - d).abs() {
                    vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]
                } else {
                    vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)]
                };
            }
            let s = n.sqrt();
            vec![v[0] / s, v[1] / s]
        };
        let mut v1 = mk(l1);
        let v2 = if r == 0.0 && (a - d).abs() == 0.0 {
            // Degenerate scalar matrix: pick the orthogonal complement.
            v1 = vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
            vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)]
        } else {
            // Orthogonal complement of v1 in C^2.
            vec![-v1[1].conj(), v1[0].conj()]
        };
        EigenDecomposition {
            eigenvalues: vec![l1, l2],
            eigenvectors: vec![v1, v2],
        }
    }

    fn eig_jacobi(&self) -> Result<EigenDecomposition, MatrixError> {
        let n = self.dim;
        let mut a = self.data.clone();
        // Accumulated unitary, columns are eigenvectors.
        let mut v = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            v[i * n + i] = Complex64::new(1.0, 0.0);
        }
        let off = |a: &[Complex64]| -> f64 {
            let mut s = 0.0;
            for i in 0..n {
                for j in 0..n {
                    if i != j {
                        s += a[i * n + j].norm_sqr();
                    }
                }
            }
            s.sqrt()
        };
        let mut sweeps = 0;
        while off(&a) > EIG_OFFDIAG_TOL {
            if sweeps >= EIG_MAX_SWEEPS {
                return Err(MatrixError::EigNotConverged(sweeps));
            }
            sweeps += 1;
            for p in 0..n {
                for q in (p + 1)..n {
                    let apq = a[p * n + q];
                    let r = apq.norm();
                    if r <= 1e-300 {
                        continue;
                    }
                    // Phase that makes the pivot real positive, then a real
                    // Jacobi rotation that annihilates it.
                    let u = apq / r;
                    let app = a[p * n + p].re;
                    let aqq = a[q * n + q].re;
                    let tau = (aqq - app) / (2.0 * r);
                    let t = if tau >= 0.0 {
                        1.0 / (tau + (1.0 + tau * tau).sqrt())
                    } else {
                        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                    };
                    let c = 1.0 / (1.0 + t * t).sqrt();
                    let s = t * c;
                    // Combined rotation J: J_pp = c, J_pq = s*u, J_qp = -s*conj(u)... applied as A <- J^dagger A J
                    // with J columns (p): (c, -s*conj(u)), (q): (s*u, c) in the (p,q) plane.
                    for k in 0..n {
                        let akp = a[k * n + p];
                        let akq = a[k * n + q];
                        a[k * n + p] = akp * c - akq * (s * u.conj());
                        a[k * n + q] = akp * (s * u) + akq * c;
                    }
                    for k in 0..n {
                        let apk = a[p * n + k];
                        let aqk = a[q * n + k];
                        a[p * n + k] = apk * c - aqk * (s * u);
                        a[q * n + k] = apk * (s * u.conj()) + aqk * c;
                    }
                    for k in 0..n {
                        let vkp = v[k * n + p];
                        let vkq = v[k * n + q];
                        v[k * n + p] = vkp * c - vkq * (s * u.conj());
                        v[k * n + q] = vkp * (s * u) + vkq * c;
                    }
                    // Clean up rounding on the annihilated pair.
                    a[p * n + q] = 0.5 * (a[p * n + q] + a[q * n + p].conj());
                    a[q * n + p] = a[p * n + q].conj();
                }
            }
        }
        let mut idx: Vec<usize> = (0..n).collect();
        let vals: Vec<f64> = (0..n).map(|i| a[i * n + i].re).collect();
        idx.sort_by(|&i, &j| vals[j].partial_cmp(&vals[i]).unwrap());
        let eigenvalues: Vec<f64> = idx.iter().map(|&i| vals[i]).collect();
        let eigenvectors: Vec<Vec<Complex64>> = idx
            .iter()
            .map(|&col| (0..n).map(|row| v[row * n + col]).collect())
            .collect();
        Ok(EigenDecomposition { eigenvalues, eigenvectors })
    }

    /// Projection onto the positive semidefinite cone: negative eigenvalues
    /// are clipped to zero and the matrix is rebuilt.
    pub fn psd_project(&self) -> Result<Self, MatrixError> {
        let dec = self.eig()?;
        let clipped: Vec<f64> = dec.eigenvalues.iter().map(|l| l.max(0.0)).collect();
        dec.reconstruct_with(&clipped)
    }
}

/// Spectral decomposition of a Hermitian matrix.
///
/// `eigenvalues` are sorted in descending order; `eigenvectors[k]` is the
/// unit eigenvector for `eigenvalues[k]`.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Vec<Vec<Complex64>>,
}

impl EigenDecomposition {
    /// Rebuilds `sum_k w_k |v_k><v_k|` for the given weights.
    pub fn reconstruct_with(&self, weights: &[f64]) -> Result<HermitianMatrix, MatrixError> {
        let n = self.eigenvectors.len();
        if weights.len() != n {
            return Err(MatrixError::DimensionMismatch(weights.len(), n));
        }
        let dim = self.eigenvectors[0].len();
        let mut data = vec![Complex64::new(0.0, 0.0); dim * dim];
        for (w, vec_k) in weights.iter().zip(&self.eigenvectors) {
            if *w == 0.0 {
                continue;
            }
            for i in 0..dim {
                for j in 0..dim {
                    data[i * dim + j] += w * vec_k[i] * vec_k[j].conj();
                }
            }
        }
        HermitianMatrix::new(dim, data)
    }

    /// Rebuilds the original matrix.
    pub fn reconstruct(&self) -> Result<HermitianMatrix, MatrixError> {
        self.reconstruct_with(&self.eigenvalues)
    }

    /// Applies a real scalar function to the spectrum.
    pub fn map_eigenvalues(&self, f: impl Fn(f64) -> f64) -> Result<HermitianMatrix, MatrixError> {
        let w: Vec<f64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        self.reconstruct_with(&w)
    }
}

impl HermitianMatrix {
    fn check_dim(&self, other: &Self) -> Result<(), MatrixError> {
        if self.dim != other.dim {
            return Err(MatrixError::DimensionMismatch(self.dim, other.dim));
        }
        Ok(())
    }
}

/// A quantum state: Hermitian, positive semidefinite, unit trace.
///
/// Construction tolerates violations up to [`DENSITY_TOL`], then repairs
/// them exactly (eigenvalue clipping plus renormalization) so downstream
/// code can rely on the invariants holding to machine precision.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: HermitianMatrix,
}

impl DensityMatrix {
    pub fn new(matrix: HermitianMatrix) -> Result<Self, MatrixError> {
        let tr = matrix.trace();
        if (tr - 1.0).abs() > DENSITY_TOL {
            return Err(MatrixError::NotDensity(format!("trace = {tr:.12}, expected 1")));
        }
        let dec = matrix.eig()?;
        let lmin = dec.eigenvalues.last().copied().unwrap_or(0.0);
        if lmin < -DENSITY_TOL {
            return Err(MatrixError::NotDensity(format!(
                "smallest eigenvalue = {lmin:.3e}"
            )));
        }
        let clipped: Vec<f64> = dec.eigenvalues.iter().map(|l| l.max(0.0)).collect();
        let mass: f64 = clipped.iter().sum();
        if mass <= 0.0 {
            return Err(MatrixError::NotDensity("zero matrix".into()));
        }
        let weights: Vec<f64> = clipped.iter().map(|l| l / mass).collect();
        Ok(Self { matrix: dec.reconstruct_with(&weights)? })
    }

    /// Maximally mixed state I/d.
    pub fn maximally_mixed(dim: usize) -> Self {
        Self { matrix: HermitianMatrix::identity(dim).scale(1.0 / dim as f64) }
    }

    /// Pure state |v><v| (the vector is normalized internally).
    pub fn pure(v: &[Complex64]) -> Result<Self, MatrixError> {
        Ok(Self { matrix: HermitianMatrix::projector_onto(v)? })
    }

    pub fn matrix(&self) -> &HermitianMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }
}

/// Binary entropy h(p) in bits; h(0) = h(1) = 0.
pub fn binary_entropy(p: f64) -> Result<f64, MatrixError> {
    if !(-1e-12..=1.0 + 1e-12).contains(&p) {
        return Err(MatrixError::Domain(format!("binary_entropy({p}) outside [0, 1]")));
    }
    let p = p.clamp(0.0, 1.0);
    let term = |x: f64| if x <= 0.0 { 0.0 } else { -x * x.log2() };
    Ok(term(p) + term(1.0 - p))
}

/// Von Neumann entropy H(rho) in bits. Eigenvalues below
/// [`ENTROPY_EIGENVALUE_FLOOR`] are treated as exact zeros.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> Result<f64, MatrixError> {
    let dec = rho.matrix().eig()?;
    let mut h = 0.0;
    for &l in &dec.eigenvalues {
        if l > ENTROPY_EIGENVALUE_FLOOR {
            h -= l * l.log2();
        }
    }
    Ok(h)
}

/// Quantum relative entropy D(rho || sigma) in bits.
///
/// Errors if the support of `rho` is not contained in the support of
/// `sigma` (the divergence is infinite there).
pub fn relative_entropy(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64, MatrixError> {
    if rho.dim() != sigma.dim() {
        return Err(MatrixError::DimensionMismatch(rho.dim(), sigma.dim()));
    }
    let dec_s = sigma.matrix().eig()?;
    // Support check: weight of rho on the kernel of sigma.
    let kernel_weights: Vec<f64> = dec_s
        .eigenvalues
        .iter()
        .map(|&l| if l <= ENTROPY_EIGENVALUE_FLOOR { 1.0 } else { 0.0 })
        .collect();
    if kernel_weights.iter().any(|&w| w > 0.0) {
        let kernel_proj = dec_s.reconstruct_with(&kernel_weights)?;
        let overlap = rho.matrix().inner(&kernel_proj)?;
        if overlap > 1e-10 {
            return Err(MatrixError::Domain(format!(
                "support of rho escapes support of sigma (overlap {overlap:.3e})"
            )));
        }
    }
    let log_sigma = dec_s.map_eigenvalues(|l| {
        if l > ENTROPY_EIGENVALUE_FLOOR {
            l.log2()
        } else {
            0.0 // rho has no weight here; the value is immaterial.
        }
    })?;
    let cross = rho.matrix().inner(&log_sigma)?;
    Ok(-von_neumann_entropy(rho)? - cross)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    pub(crate) fn random_hermitian(rng: &mut impl Rng, dim: usize) -> HermitianMatrix {
        let mut data = vec![c(0.0, 0.0); dim * dim];
        for i in 0..dim {
            data[i * dim + i] = c(rng.gen_range(-1.0..1.0), 0.0);
            for j in (i + 1)..dim {
                let z = c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                data[i * dim + j] = z;
                data[j * dim + i] = z.conj();
            }
        }
        HermitianMatrix::new(dim, data).unwrap()
    }

    pub(crate) fn random_density(rng: &mut impl Rng, dim: usize) -> DensityMatrix {
        // L L^dagger / Tr(L L^dagger) with a random complex matrix L.
        let mut l = vec![c(0.0, 0.0); dim * dim];
        for z in l.iter_mut() {
            *z = c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        }
        let mut data = vec![c(0.0, 0.0); dim * dim];
        for i in 0..dim {
            for j in 0..dim {
                let mut acc = c(0.0, 0.0);
                for k in 0..dim {
                    acc += l[i * dim + k] * l[j * dim + k].conj();
                }
                data[i * dim + j] = acc;
            }
        }
        let tr: f64 = (0..dim).map(|i| data[i * dim + i].re).sum();
        for z in data.iter_mut() {
            *z /= tr;
        }
        DensityMatrix::new(HermitianMatrix::new(dim, data).unwrap()).unwrap()
    }

    #[test]
    fn rejects_non_hermitian_input() {
        let bad = vec![c(0.0, 0.0), c(1.0, 0.0), c(0.5, 0.0), c(0.0, 0.0)];
        assert!(matches!(HermitianMatrix::new(2, bad), Err(MatrixError::NotHermitian(_))));
    }

    #[test]
    fn construction_zeroes_diagonal_imaginary_parts() {
        let eps = 1e-13;
        let m = HermitianMatrix::new(2, vec![c(1.0, eps), c(0.0, 0.0), c(0.0, 0.0), c(2.0, -eps)])
            .unwrap();
        assert_eq!(m.get(0, 0).im, 0.0);
        assert_eq!(m.get(1, 1).im, 0.0);
    }

    #[test]
    fn eig2_closed_form_matches_hand_values() {
        // sigma_x has eigenvalues +1, -1.
        let sx = HermitianMatrix::from_real(2, &[0.0, 1.0, 1.0, 0.0]).unwrap();
        let d = sx.eig().unwrap();
        assert!((d.eigenvalues[0] - 1.0).abs() < 1e-14);
        assert!((d.eigenvalues[1] + 1.0).abs() < 1e-14);
        // Reconstruction round-trips.
        let r = d.reconstruct().unwrap();
        assert!(sx.sub(&r).unwrap().frobenius_norm() < 1e-13);
    }

    #[test]
    fn jacobi_matches_kron_spectrum() {
        // sigma_x (x) sigma_x has eigenvalues {1, 1, -1, -1}.
        let sx = HermitianMatrix::from_real(2, &[0.0, 1.0, 1.0, 0.0]).unwrap();
        let m = HermitianMatrix::kron(&sx, &sx);
        let d = m.eig().unwrap();
        let expect = [1.0, 1.0, -1.0, -1.0];
        for (got, want) in d.eigenvalues.iter().zip(expect) {
            assert!((got - want).abs() < 1e-12, "{got} vs {want}");
        }
    }

    #[test]
    fn eig_reconstructs_random_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let m = random_hermitian(&mut rng, 4);
            let d = m.eig().unwrap();
            let r = d.reconstruct().unwrap();
            assert!(m.sub(&r).unwrap().frobenius_norm() < 1e-10);
            // Descending order.
            for w in d.eigenvalues.windows(2) {
                assert!(w[0] >= w[1] - 1e-12);
            }
            // Eigenvectors are orthonormal.
            for i in 0..4 {
                for j in 0..4 {
                    let dot: Complex64 = (0..4)
                        .map(|k| d.eigenvectors[i][k] * d.eigenvectors[j][k].conj())
                        .sum();
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert!((dot.norm() - want).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn norm_ordering_holds() {
        // ||A||_inf <= ||A||_F <= ||A||_1 <= sqrt(rank) * ||A||_F.
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let m = random_hermitian(&mut rng, 4);
            let f = m.frobenius_norm();
            let t = m.trace_norm().unwrap();
            let s = m.spectral_norm().unwrap();
            assert!(s <= f + 1e-10);
            assert!(f <= t + 1e-10);
            assert!(t <= 2.0 * f + 1e-10);
        }
    }

    #[test]
    fn psd_project_is_idempotent_and_dominates() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..50 {
            let m = random_hermitian(&mut rng, 4);
            let p = m.psd_project().unwrap();
            let pp = p.psd_project().unwrap();
            assert!(p.sub(&pp).unwrap().frobenius_norm() < 1e-10);
            let lmin = p.eig().unwrap().eigenvalues.last().copied().unwrap();
            assert!(lmin >= -1e-12);
            // The projection is the nearest PSD point in Frobenius norm;
            // in particular it never moves a PSD matrix.
            let q = p.psd_project().unwrap();
            assert!(p.sub(&q).unwrap().frobenius_norm() < 1e-12);
        }
    }

    #[test]
    fn binary_entropy_values() {
        assert_eq!(binary_entropy(0.0).unwrap(), 0.0);
        assert_eq!(binary_entropy(1.0).unwrap(), 0.0);
        assert!((binary_entropy(0.5).unwrap() - 1.0).abs() < 1e-15);
        // Frozen independent evaluation of h(0.11).
        assert!((binary_entropy(0.11).unwrap() - 0.499915958164528).abs() < 1e-12);
        assert!(binary_entropy(-0.1).is_err());
        assert!(binary_entropy(1.1).is_err());
    }

    #[test]
    fn entropy_of_known_states() {
        let mixed = DensityMatrix::maximally_mixed(4);
        assert!((von_neumann_entropy(&mixed).unwrap() - 2.0).abs() < 1e-12);
        let pure = DensityMatrix::pure(&[c(1.0, 0.0), c(0.0, 0.0)]).unwrap();
        assert!(von_neumann_entropy(&pure).unwrap().abs() < 1e-12);
    }

    #[test]
    fn relative_entropy_of_plus_state_vs_mixed() {
        // D(|+><+| (x) I/2 || I/4) = 1 bit.
        let plus = [c(1.0, 0.0), c(1.0, 0.0)];
        let p2 = HermitianMatrix::projector_onto(&plus).unwrap();
        let half = HermitianMatrix::identity(2).scale(0.5);
        let rho = DensityMatrix::new(HermitianMatrix::kron(&p2, &half)).unwrap();
        let sigma = DensityMatrix::maximally_mixed(4);
        let d = relative_entropy(&rho, &sigma).unwrap();
        assert!((d - 1.0).abs() < 1e-10, "D = {d}");
    }

    #[test]
    fn relative_entropy_detects_support_violation() {
        let pure0 = DensityMatrix::pure(&[c(1.0, 0.0), c(0.0, 0.0)]).unwrap();
        let pure1 = DensityMatrix::pure(&[c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
        assert!(relative_entropy(&pure0, &pure1).is_err());
    }

    #[test]
    fn relative_entropy_nonnegative_and_zero_iff_equal() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..50 {
            let rho = random_density(&mut rng, 4);
            let sigma = random_density(&mut rng, 4);
            let d = relative_entropy(&rho, &sigma).unwrap();
            assert!(d >= -1e-9, "D = {d}");
            let dz = relative_entropy(&rho, &rho).unwrap();
            assert!(dz.abs() < 1e-9);
        }
    }

    #[test]
    fn density_construction_repairs_small_violations() {
        // Slightly negative eigenvalue within tolerance gets clipped.
        let m = HermitianMatrix::from_real(
            2,
            &[1.0 + 1e-12, 0.0, 0.0, -1e-12],
        )
        .unwrap();
        let rho = DensityMatrix::new(m).unwrap();
        let dec = rho.matrix().eig().unwrap();
        assert!(dec.eigenvalues.iter().all(|&l| l >= 0.0));
        assert!((rho.matrix().trace() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn density_rejects_large_violations() {
        let m = HermitianMatrix::from_real(2, &[1.5, 0.0, 0.0, -0.5]).unwrap();
        assert!(DensityMatrix::new(m).is_err());
        let m = HermitianMatrix::from_real(2, &[0.3, 0.0, 0.0, 0.3]).unwrap();
        assert!(DensityMatrix::new(m).is_err());
    }
}
