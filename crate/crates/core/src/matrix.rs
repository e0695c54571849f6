//! Dense square complex matrices and the small set of linear-algebra
//! primitives the rest of the crate builds on: Kronecker products, partial
//! traces, a Hermitian eigensolver, and the Hermitian matrix exponential.
//!
//! Everything here is sized for strategy spaces (joint dimensions up to a few
//! hundred), so the implementations favour determinism and clarity over
//! asymptotic tricks. The eigensolver is a cyclic Jacobi iteration: it is
//! bit-for-bit reproducible for identical input, which the solver and
//! reducibility tests rely on.

pub use num_complex::Complex64;

use crate::error::{Error, Result};

/// Default tolerance for Hermiticity and orthonormality checks.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Exponent guard: `exp` overflows f64 near 709, shift spectra before that.
const EXP_GUARD: f64 = 700.0;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Dense square matrix over `Complex64`, row-major storage.
#[derive(Clone, PartialEq)]
pub struct CMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl std::fmt::Debug for CMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "CMatrix {}x{} [", self.dim, self.dim)?;
        for i in 0..self.dim {
            write!(f, "  ")?;
            for j in 0..self.dim {
                let z = self[(i, j)];
                write!(f, "{:+.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl std::ops::Index<(usize, usize)> for CMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.dim + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.dim + j]
    }
}

impl CMatrix {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim > 0, "matrix dimension must be positive");
        CMatrix { dim, data: vec![ZERO; dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = CMatrix::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = CMatrix::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    /// Builds from nested rows. Errors when the rows are ragged, empty, or
    /// contain non-finite entries.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 {
            return Err(Error::DimensionMismatch("matrix must be at least 1x1".into()));
        }
        let mut m = CMatrix::zeros(dim);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != dim {
                return Err(Error::DimensionMismatch(format!(
                    "row {} has {} entries, expected {}",
                    i,
                    row.len(),
                    dim
                )));
            }
            for (j, &z) in row.iter().enumerate() {
                if !z.re.is_finite() || !z.im.is_finite() {
                    return Err(Error::Numerical(format!("non-finite entry at ({}, {})", i, j)));
                }
                m[(i, j)] = z;
            }
        }
        Ok(m)
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let complex: Vec<Vec<Complex64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| Complex64::new(x, 0.0)).collect())
            .collect();
        CMatrix::from_rows(&complex)
    }

    pub fn from_diag(diag: &[Complex64]) -> Self {
        let mut m = CMatrix::zeros(diag.len());
        for (i, &z) in diag.iter().enumerate() {
            m[(i, i)] = z;
        }
        m
    }

    pub fn from_real_diag(diag: &[f64]) -> Self {
        let d: Vec<Complex64> = diag.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        CMatrix::from_diag(&d)
    }

    /// Outer product `v v†` of a column vector.
    pub fn outer(v: &[Complex64]) -> Self {
        CMatrix::from_fn(v.len(), |i, j| v[i] * v[j].conj())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rows(&self) -> Vec<Vec<Complex64>> {
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self[(i, j)]).collect())
            .collect()
    }

    pub fn diag(&self) -> Vec<Complex64> {
        (0..self.dim).map(|i| self[(i, i)]).collect()
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.dim).map(|i| self[(i, j)]).collect()
    }

    pub fn add(&self, other: &CMatrix) -> Result<CMatrix> {
        self.check_same_dim(other)?;
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        Ok(CMatrix { dim: self.dim, data })
    }

    pub fn sub(&self, other: &CMatrix) -> Result<CMatrix> {
        self.check_same_dim(other)?;
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        Ok(CMatrix { dim: self.dim, data })
    }

    pub fn scale(&self, factor: Complex64) -> CMatrix {
        let data = self.data.iter().map(|a| a * factor).collect();
        CMatrix { dim: self.dim, data }
    }

    pub fn scale_re(&self, factor: f64) -> CMatrix {
        self.scale(Complex64::new(factor, 0.0))
    }

    pub fn matmul(&self, other: &CMatrix) -> Result<CMatrix> {
        self.check_same_dim(other)?;
        let n = self.dim;
        let mut out = CMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        Ok(out)
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> CMatrix {
        CMatrix::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_imag_abs(&self) -> f64 {
        self.data.iter().map(|z| z.im.abs()).fold(0.0, f64::max)
    }

    /// Largest off-diagonal magnitude.
    pub fn max_offdiag_abs(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.dim {
            for j in 0..self.dim {
                if i != j {
                    worst = worst.max(self[(i, j)].norm());
                }
            }
        }
        worst
    }

    /// Entrywise real part.
    pub fn real_part(&self) -> CMatrix {
        CMatrix::from_fn(self.dim, |i, j| Complex64::new(self[(i, j)].re, 0.0))
    }

    /// Frobenius distance to the conjugate transpose.
    pub fn hermiticity_residue(&self) -> f64 {
        self.sub(&self.dagger()).expect("same dim").frobenius_norm()
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_residue() <= tol
    }

    /// True when every eigenvalue is at least `-tol`. Requires a Hermitian
    /// input within `tol` as well.
    pub fn is_psd(&self, tol: f64) -> bool {
        if !self.is_hermitian(tol) {
            return false;
        }
        match herm_eigen(self, tol.max(DEFAULT_TOL)) {
            Ok(eig) => eig.eigenvalues.first().is_none_or(|&lo| lo >= -tol),
            Err(_) => false,
        }
    }

    pub fn all_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    fn check_same_dim(&self, other: &CMatrix) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch(format!(
                "expected {}x{}, got {}x{}",
                self.dim, self.dim, other.dim, other.dim
            )));
        }
        Ok(())
    }
}

/// Kronecker product. Index convention: row `i * dim(b) + k` and column
/// `j * dim(b) + l` hold `a[i][j] * b[k][l]`, so the left factor owns the
/// slow-varying index.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (da, db) = (a.dim(), b.dim());
    let mut out = CMatrix::zeros(da * db);
    for i in 0..da {
        for j in 0..da {
            let aij = a[(i, j)];
            if aij == ZERO {
                continue;
            }
            for k in 0..db {
                for l in 0..db {
                    out[(i * db + k, j * db + l)] = aij * b[(k, l)];
                }
            }
        }
    }
    out
}

/// Kronecker product of a sequence of factors, left factor slowest.
pub fn kron_all(factors: &[CMatrix]) -> Result<CMatrix> {
    let mut iter = factors.iter();
    let first = iter
        .next()
        .ok_or_else(|| Error::DimensionMismatch("kron_all needs at least one factor".into()))?;
    let mut acc = first.clone();
    for f in iter {
        acc = kron(&acc, f);
    }
    Ok(acc)
}

/// Row-major strides of a multi-factor index: the first factor varies slowest.
pub fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1usize; dims.len()];
    for i in (0..dims.len().saturating_sub(1)).rev() {
        s[i] = s[i + 1] * dims[i + 1];
    }
    s
}

/// Decodes a flat joint index into per-factor indices.
pub fn decode_index(flat: usize, dims: &[usize]) -> Vec<usize> {
    let s = strides(dims);
    dims.iter().zip(&s).map(|(&d, &st)| (flat / st) % d).collect()
}

/// Encodes per-factor indices into a flat joint index.
pub fn encode_index(parts: &[usize], dims: &[usize]) -> usize {
    let s = strides(dims);
    parts.iter().zip(&s).map(|(&p, &st)| p * st).sum()
}

/// Partial trace over the factors *not* listed in `keep`.
///
/// `dims` are the tensor factor dimensions (product must equal the matrix
/// dimension); `keep` is the set of factor positions to retain, and the
/// result orders the kept factors as in the original tensor product.
pub fn partial_trace(m: &CMatrix, dims: &[usize], keep: &[usize]) -> Result<CMatrix> {
    let total: usize = dims.iter().product();
    if total != m.dim() {
        return Err(Error::DimensionMismatch(format!(
            "factor dims {:?} give {}, matrix is {}x{}",
            dims,
            total,
            m.dim(),
            m.dim()
        )));
    }
    let mut keep: Vec<usize> = keep.to_vec();
    keep.sort_unstable();
    keep.dedup();
    if keep.is_empty() || keep.iter().any(|&k| k >= dims.len()) {
        return Err(Error::DimensionMismatch(format!(
            "keep set {:?} invalid for {} factors",
            keep,
            dims.len()
        )));
    }
    let kept_dims: Vec<usize> = keep.iter().map(|&k| dims[k]).collect();
    let kept_total: usize = kept_dims.iter().product();
    let mut out = CMatrix::zeros(kept_total);
    let traced: Vec<usize> = (0..dims.len()).filter(|p| !keep.contains(p)).collect();
    for row in 0..total {
        let row_parts = decode_index(row, dims);
        let row_kept: Vec<usize> = keep.iter().map(|&k| row_parts[k]).collect();
        let r = encode_index(&row_kept, &kept_dims);
        for col in 0..total {
            let col_parts = decode_index(col, dims);
            // Only entries diagonal in every traced factor contribute.
            if traced.iter().all(|&p| row_parts[p] == col_parts[p]) {
                let col_kept: Vec<usize> = keep.iter().map(|&k| col_parts[k]).collect();
                let c = encode_index(&col_kept, &kept_dims);
                out[(r, c)] += m[(row, col)];
            }
        }
    }
    Ok(out)
}

/// Normalized trace inner product `Tr(a† b) / dim`. The normalization makes
/// the identity a unit vector, so `{I, X, Y, Z}` comes out orthonormal.
pub fn trace_inner(a: &CMatrix, b: &CMatrix) -> Result<Complex64> {
    a.check_same_dim(b)?;
    let mut acc = ZERO;
    for i in 0..a.dim() {
        for j in 0..a.dim() {
            acc += a[(i, j)].conj() * b[(i, j)];
        }
    }
    Ok(acc / a.dim() as f64)
}

/// `[a, b] = ab - ba`.
pub fn commutator(a: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    a.matmul(b)?.sub(&b.matmul(a)?)
}

/// Eigendecomposition of a Hermitian matrix.
pub struct HermEigen {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Column `k` is the eigenvector for `eigenvalues[k]`, phase-fixed so the
    /// largest-magnitude component is real and positive.
    pub eigenvectors: CMatrix,
}

impl HermEigen {
    pub fn eigenvector(&self, k: usize) -> Vec<Complex64> {
        self.eigenvectors.column(k)
    }

    /// Reconstructs `V diag(f(λ)) V†`.
    pub fn rebuild(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let n = self.eigenvectors.dim();
        let v = &self.eigenvectors;
        CMatrix::from_fn(n, |i, j| {
            let mut acc = ZERO;
            for k in 0..n {
                acc += v[(i, k)] * f(self.eigenvalues[k]) * v[(j, k)].conj();
            }
            acc
        })
    }
}

const JACOBI_MAX_SWEEPS: usize = 100;

/// Cyclic Jacobi eigensolver for Hermitian matrices.
///
/// Rejects inputs whose Hermiticity residue exceeds `tol`. The iteration is
/// deterministic: identical input bits give identical output bits, real input
/// produces real eigenvectors, and each eigenvector's global phase is fixed by
/// making its largest-magnitude component real positive (ties break to the
/// lowest index).
pub fn herm_eigen(m: &CMatrix, tol: f64) -> Result<HermEigen> {
    let residue = m.hermiticity_residue();
    if residue > tol {
        return Err(Error::NotHermitian { residue, tol });
    }
    let n = m.dim();
    // Symmetrize so roundoff asymmetry cannot steer the rotations.
    let mut a = m.add(&m.dagger()).expect("same dim").scale_re(0.5);
    let mut v = CMatrix::identity(n);
    if n == 1 {
        return Ok(HermEigen { eigenvalues: vec![a[(0, 0)].re], eigenvectors: v });
    }

    let scale = a.frobenius_norm().max(f64::MIN_POSITIVE);
    let stop = 1e-14 * scale;
    let mut converged = false;
    for _ in 0..JACOBI_MAX_SWEEPS {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in 0..n {
                if p != q {
                    off += a[(p, q)].norm_sqr();
                }
            }
        }
        if off.sqrt() <= stop {
            converged = true;
            break;
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = a[(p, q)];
                let napq = apq.norm();
                if napq <= 1e-300 {
                    continue;
                }
                // Phase that makes the pivot entry real, then a real Jacobi
                // rotation on the remaining symmetric 2x2 block.
                let phase = apq / napq;
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let tau = (aqq - app) / (2.0 * napq);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // Block unitary J: rows/cols p,q of the identity replaced by
                // [[c, s], [-s e^{-iφ}, c e^{-iφ}]], chosen so J† A J zeroes
                // the (p,q) entry.
                let jpp = Complex64::new(c, 0.0);
                let jpq = Complex64::new(s, 0.0);
                let jqp = -s * phase.conj();
                let jqq = c * phase.conj();
                // A <- J† A J: columns first, then rows.
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * jpp + akq * jqp;
                    a[(k, q)] = akp * jpq + akq * jqq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = jpp.conj() * apk + jqp.conj() * aqk;
                    a[(q, k)] = jpq.conj() * apk + jqq.conj() * aqk;
                }
                a[(p, q)] = ZERO;
                a[(q, p)] = ZERO;
                a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
                a[(q, q)] = Complex64::new(a[(q, q)].re, 0.0);
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * jpp + vkq * jqp;
                    v[(k, q)] = vkp * jpq + vkq * jqq;
                }
            }
        }
    }
    if !converged {
        // One final residual check: accept if the last sweeps already landed
        // inside the stop window without re-entering the loop.
        let mut off = 0.0f64;
        for p in 0..n {
            for q in 0..n {
                if p != q {
                    off += a[(p, q)].norm_sqr();
                }
            }
        }
        if off.sqrt() > stop {
            return Err(Error::EigenNoConvergence(JACOBI_MAX_SWEEPS));
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let lambda: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    order.sort_by(|&i, &j| lambda[i].partial_cmp(&lambda[j]).expect("finite eigenvalues"));

    let mut eigenvalues = Vec::with_capacity(n);
    let mut eigenvectors = CMatrix::zeros(n);
    for (dst, &src) in order.iter().enumerate() {
        eigenvalues.push(lambda[src]);
        // Phase fix: largest-magnitude component becomes real positive.
        let col = v.column(src);
        let mut best = 0usize;
        let mut best_norm = -1.0f64;
        for (k, z) in col.iter().enumerate() {
            let nz = z.norm();
            if nz > best_norm + 1e-15 {
                best_norm = nz;
                best = k;
            }
        }
        let pivot = col[best];
        let factor = if pivot.norm() > 0.0 { pivot.conj() / pivot.norm() } else { ONE };
        let mut norm_sqr = 0.0;
        for z in &col {
            norm_sqr += z.norm_sqr();
        }
        let inv_norm = 1.0 / norm_sqr.sqrt();
        for k in 0..n {
            eigenvectors[(k, dst)] = col[k] * factor * inv_norm;
        }
    }
    Ok(HermEigen { eigenvalues, eigenvectors })
}

/// `V diag(exp(scale * λ)) V†` for Hermitian `m`.
///
/// When `max(scale * λ)` exceeds the f64 exponent range the whole spectrum is
/// shifted down by that maximum before exponentiating, so the result is the
/// true exponential times `exp(-max)`. Callers that normalize by the trace
/// (Boltzmann weights) are unaffected.
pub fn matrix_exp_hermitian(m: &CMatrix, scale: f64) -> Result<CMatrix> {
    if !scale.is_finite() {
        return Err(Error::Numerical(format!("non-finite exponent scale {scale}")));
    }
    let eig = herm_eigen(m, DEFAULT_TOL)?;
    let max_exp = eig
        .eigenvalues
        .iter()
        .map(|&l| scale * l)
        .fold(f64::NEG_INFINITY, f64::max);
    let shift = if max_exp > EXP_GUARD { max_exp } else { 0.0 };
    let out = eig.rebuild(|l| (scale * l - shift).exp());
    // Clean roundoff asymmetry; the exact result is Hermitian.
    let out = out.add(&out.dagger()).expect("same dim").scale_re(0.5);
    if !out.all_finite() {
        return Err(Error::Numerical("matrix exponential produced non-finite entries".into()));
    }
    Ok(out)
}
