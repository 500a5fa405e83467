//! Dense complex linear algebra sized for the dimer problem: 2x2, 3x3 and
//! 6x6 operators. Plain row-major storage and a cyclic Jacobi eigensolver
//! for Hermitian matrices; no external linear-algebra backend.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Entrywise gate for treating a matrix as Hermitian.
pub const HERMITICITY_TOL: f64 = 1e-12;
/// Residual gate for spectral identities (V'V = 1, MV = V diag).
pub const SPECTRAL_TOL: f64 = 1e-10;

const MAX_JACOBI_SWEEPS: usize = 64;

/// Dense complex matrix in row-major order.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex64::ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    /// Build from a flat row-major slice of real entries.
    pub fn from_real(rows: usize, cols: usize, entries: &[f64]) -> Self {
        assert_eq!(entries.len(), rows * cols, "entry count mismatch");
        Self {
            rows,
            cols,
            data: entries.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        }
    }

    pub fn from_entries(rows: usize, cols: usize, data: Vec<Complex64>) -> Self {
        assert_eq!(data.len(), rows * cols, "entry count mismatch");
        Self { rows, cols, data }
    }

    /// Outer product |u><v| of two column vectors.
    pub fn outer(u: &[Complex64], v: &[Complex64]) -> Self {
        Self::from_fn(u.len(), v.len(), |i, j| u[i] * v[j].conj())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.data
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * factor).collect(),
        }
    }

    pub fn scaled_complex(&self, factor: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * factor).collect(),
        }
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn trace(&self) -> Complex64 {
        assert!(self.is_square(), "trace of a non-square matrix");
        (0..self.rows).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise deviation from M = M'.
    pub fn hermiticity_deviation(&self) -> f64 {
        assert!(self.is_square(), "hermiticity of a non-square matrix");
        let mut dev: f64 = 0.0;
        for i in 0..self.rows {
            for j in i..self.cols {
                dev = dev.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        dev
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.is_square() && self.hermiticity_deviation() <= tol
    }

    pub fn ensure_hermitian(&self, tol: f64) -> Result<()> {
        let deviation = self.hermiticity_deviation();
        if deviation > tol {
            return Err(Error::NonHermitianInput {
                deviation,
                tolerance: tol,
            });
        }
        Ok(())
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.rows, "matrix product shape mismatch");
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == Complex64::ZERO {
                    continue;
                }
                for j in 0..rhs.cols {
                    out[(i, j)] += a * rhs[(k, j)];
                }
            }
        }
        out
    }

    /// Matrix-vector product.
    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(self.cols, v.len(), "matrix-vector shape mismatch");
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self[(i, j)] * v[j]).sum())
            .collect()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

impl std::ops::Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }
}

impl std::ops::Add<&ComplexMatrix> for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl std::ops::Sub<&ComplexMatrix> for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

/// Tensor product with standard block ordering:
/// `C[(i*p+k), (j*q+l)] = A[i,j] * B[k,l]`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (p, q) = (b.rows(), b.cols());
    ComplexMatrix::from_fn(a.rows() * p, a.cols() * q, |i, j| {
        a[(i / p, j / q)] * b[(i % p, j % q)]
    })
}

/// Eigendecomposition of a Hermitian matrix: real eigenvalues sorted
/// ascending, orthonormal eigenvectors as matrix columns.
#[derive(Clone, Debug)]
pub struct EigenSystem {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl EigenSystem {
    pub fn column(&self, k: usize) -> Vec<Complex64> {
        (0..self.eigenvectors.rows())
            .map(|i| self.eigenvectors[(i, k)])
            .collect()
    }
}

fn offdiag_norm(a: &ComplexMatrix) -> f64 {
    let n = a.rows();
    let mut sum = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                sum += a[(i, j)].norm_sqr();
            }
        }
    }
    sum.sqrt()
}

/// Cyclic Jacobi eigensolver for complex Hermitian matrices.
///
/// Each rotation zeroes one off-diagonal pair: the (p,q) plane is first
/// de-phased so the pivot becomes real, then a standard symmetric Jacobi
/// rotation is applied. Converged when the off-diagonal Frobenius mass
/// drops below 1e-14 relative to the matrix scale.
pub fn hermitian_eig(m: &ComplexMatrix) -> Result<EigenSystem> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "eigendecomposition needs a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    m.ensure_hermitian(HERMITICITY_TOL)?;

    let n = m.rows();
    let mut a = m.clone();
    let mut v = ComplexMatrix::identity(n);
    let target = 1e-14 * m.frobenius_norm().max(1.0);

    let mut converged = false;
    for _sweep in 0..MAX_JACOBI_SWEEPS {
        if offdiag_norm(&a) <= target {
            converged = true;
            break;
        }
        for p in 0..n - 1 {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let r = apq.norm();
                if r == 0.0 {
                    continue;
                }
                let phase = apq / r;
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let tau = (aqq - app) / (2.0 * r);
                let t = if tau == 0.0 {
                    1.0
                } else {
                    tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;

                // G is the identity except in the (p,q) plane:
                //   G[p][p] = c           G[p][q] = s
                //   G[q][p] = -s e^{-ip}  G[q][q] = c e^{-ip}
                let sp = phase.conj() * s;
                let cp = phase.conj() * c;

                // Column update A <- A G, V <- V G.
                for i in 0..n {
                    let aip = a[(i, p)];
                    let aiq = a[(i, q)];
                    a[(i, p)] = c * aip - sp * aiq;
                    a[(i, q)] = s * aip + cp * aiq;

                    let vip = v[(i, p)];
                    let viq = v[(i, q)];
                    v[(i, p)] = c * vip - sp * viq;
                    v[(i, q)] = s * vip + cp * viq;
                }
                // Row update A <- G' A.
                for j in 0..n {
                    let apj = a[(p, j)];
                    let aqj = a[(q, j)];
                    a[(p, j)] = c * apj - sp.conj() * aqj;
                    a[(q, j)] = s * apj + cp.conj() * aqj;
                }
                // Kill rounding residue on the pivot pair.
                a[(p, q)] = Complex64::ZERO;
                a[(q, p)] = Complex64::ZERO;
            }
        }
    }
    if !converged && offdiag_norm(&a) > target {
        return Err(Error::EigenConvergence(MAX_JACOBI_SWEEPS));
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));

    let eigenvalues: Vec<f64> = order.iter().map(|&k| a[(k, k)].re).collect();
    let eigenvectors = ComplexMatrix::from_fn(n, n, |i, j| v[(i, order[j])]);
    Ok(EigenSystem {
        eigenvalues,
        eigenvectors,
    })
}

/// Which subsystem of the qubit (x) qutrit pair gets traced out.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Subsystem {
    Qubit,
    Qutrit,
}

fn ensure_dimer_shape(rho: &ComplexMatrix, what: &str) -> Result<()> {
    if rho.rows() != 6 || rho.cols() != 6 {
        return Err(Error::DimensionMismatch(format!(
            "{what} expects a 6x6 matrix, got {}x{}",
            rho.rows(),
            rho.cols()
        )));
    }
    Ok(())
}

/// Marginal of a 6x6 qubit-qutrit state: 2x2 when tracing out the qutrit,
/// 3x3 when tracing out the qubit. Composite index is 3*a + b with a the
/// qubit index and b the qutrit index.
pub fn partial_trace(rho: &ComplexMatrix, traced: Subsystem) -> Result<ComplexMatrix> {
    ensure_dimer_shape(rho, "partial_trace")?;
    let tr = rho.trace();
    if (tr - Complex64::ONE).norm() > 1e-10 {
        return Err(Error::NotAState(format!(
            "partial_trace expects unit trace, got {:.12e}",
            tr.re
        )));
    }
    Ok(match traced {
        Subsystem::Qutrit => ComplexMatrix::from_fn(2, 2, |a, a2| {
            (0..3).map(|b| rho[(3 * a + b, 3 * a2 + b)]).sum()
        }),
        Subsystem::Qubit => ComplexMatrix::from_fn(3, 3, |b, b2| {
            (0..2).map(|a| rho[(3 * a + b, 3 * a + b2)]).sum()
        }),
    })
}

/// Transpose of the qubit index only: out[(a,b),(a',b')] = rho[(a',b),(a,b')].
pub fn partial_transpose_qubit(rho: &ComplexMatrix) -> Result<ComplexMatrix> {
    ensure_dimer_shape(rho, "partial_transpose_qubit")?;
    Ok(ComplexMatrix::from_fn(6, 6, |i, j| {
        let (a, b) = (i / 3, i % 3);
        let (a2, b2) = (j / 3, j % 3);
        rho[(3 * a2 + b, 3 * a + b2)]
    }))
}

/// Trace norm of a Hermitian matrix: sum of absolute eigenvalues.
pub fn trace_norm(m: &ComplexMatrix) -> Result<f64> {
    let eig = hermitian_eig(m)?;
    Ok(eig.eigenvalues.iter().map(|l| l.abs()).sum())
}

/// Hilbert-Schmidt inner product Tr(A B) of two Hermitian matrices.
pub fn hs_inner(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64> {
    if (a.rows(), a.cols()) != (b.rows(), b.cols()) {
        return Err(Error::DimensionMismatch(format!(
            "hs_inner shapes differ: {}x{} vs {}x{}",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )));
    }
    a.ensure_hermitian(HERMITICITY_TOL)?;
    b.ensure_hermitian(HERMITICITY_TOL)?;
    let mut sum = 0.0;
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            sum += (a[(i, j)] * b[(j, i)]).re;
        }
    }
    Ok(sum)
}
