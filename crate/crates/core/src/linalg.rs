// SPDX-License-Identifier: Apache-2.0

//! Dense complex linear-algebra helpers on top of nalgebra.

use crate::{CMatrix, CVector, C64};

/// Conjugate transpose.
pub fn dagger(m: &CMatrix) -> CMatrix {
    m.adjoint()
}

/// `(m + m†) / 2`.
pub fn hermitize(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}

/// Largest element-wise modulus of `m - m†`.
pub fn hermiticity_defect(m: &CMatrix) -> f64 {
    let mut worst = 0.0_f64;
    for i in 0..m.nrows() {
        for j in i..m.ncols() {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Real trace.
pub fn real_trace(m: &CMatrix) -> f64 {
    m.trace().re
}

/// Eigenvalues of a Hermitian matrix, ascending. Only the Hermitian part of
/// `m` is used.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    let h = hermitize(m);
    let mut ev: Vec<f64> = h.symmetric_eigen().eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| a.total_cmp(b));
    ev
}

/// Minimum eigenvalue of a Hermitian matrix (`+inf` for an empty matrix).
pub fn min_eigenvalue(m: &CMatrix) -> f64 {
    hermitian_eigenvalues(m).first().copied().unwrap_or(f64::INFINITY)
}

/// Trace norm of a Hermitian matrix.
pub fn hermitian_trace_norm(m: &CMatrix) -> f64 {
    hermitian_eigenvalues(m).iter().map(|x| x.abs()).sum()
}

/// Trace distance `½‖a - b‖₁` of two Hermitian matrices.
pub fn trace_distance(a: &CMatrix, b: &CMatrix) -> f64 {
    0.5 * hermitian_trace_norm(&(a - b))
}

/// Kronecker product.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Maximum element-wise modulus.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
}

/// Orthonormal basis (as columns) of the numerical null space of `m`.
///
/// A singular value counts as zero when it is below `tol * max(1, σ_max)`.
pub fn null_space(m: &CMatrix, tol: f64) -> CMatrix {
    let n = m.ncols();
    if n == 0 {
        return CMatrix::zeros(0, 0);
    }
    // Pad to square so that the SVD returns a full set of right vectors.
    let rows = m.nrows().max(n);
    let mut sq = CMatrix::zeros(rows, n);
    sq.view_mut((0, 0), (m.nrows(), n)).copy_from(m);
    let svd = sq.svd(false, true);
    let v_t = svd.v_t.expect("requested right singular vectors");
    let sigma_max = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let cut = tol * sigma_max.max(1.0);
    let kept: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] <= cut)
        .collect();
    let mut out = CMatrix::zeros(n, kept.len());
    for (c, &i) in kept.iter().enumerate() {
        for r in 0..n {
            out[(r, c)] = v_t[(i, r)].conj();
        }
    }
    out
}

/// How a [`MatrixExponential`] evaluates `e^{tA}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExpMethod {
    /// Eigendecomposition `V e^{tΛ} V⁻¹`; `condition` is a Frobenius-norm
    /// estimate of `κ(V)`.
    Eigen { condition: f64 },
    /// Padé approximant with scaling and squaring, evaluated per time.
    ScalingSquaring,
}

/// `κ(V)` above which the eigendecomposition route is rejected.
pub const MAX_EIGEN_CONDITION: f64 = 1e5;

#[derive(Debug, Clone)]
enum ExpKernel {
    Eigen {
        vectors: CMatrix,
        inverse: CMatrix,
        values: CVector,
    },
    Pade { matrix: CMatrix },
}

/// Reusable evaluator of `t ↦ e^{tA}` for a fixed square matrix `A`.
#[derive(Debug, Clone)]
pub struct MatrixExponential {
    kernel: ExpKernel,
    method: ExpMethod,
    dim: usize,
}

impl MatrixExponential {
    /// Prepares `A` for repeated exponentiation. Tries a Schur-based
    /// eigendecomposition first and falls back to scaling-and-squaring when
    /// the eigenvector matrix is ill conditioned.
    pub fn new(a: &CMatrix) -> Self {
        assert!(a.is_square(), "matrix exponential of a non-square matrix");
        let dim = a.nrows();
        if dim == 0 {
            return Self {
                kernel: ExpKernel::Pade { matrix: a.clone() },
                method: ExpMethod::ScalingSquaring,
                dim,
            };
        }
        match eigen_decompose(a) {
            Some((vectors, inverse, values, condition)) => Self {
                kernel: ExpKernel::Eigen {
                    vectors,
                    inverse,
                    values,
                },
                method: ExpMethod::Eigen { condition },
                dim,
            },
            None => Self {
                kernel: ExpKernel::Pade { matrix: a.clone() },
                method: ExpMethod::ScalingSquaring,
                dim,
            },
        }
    }

    /// Forces the scaling-and-squaring route.
    pub fn scaling_squaring(a: &CMatrix) -> Self {
        Self {
            kernel: ExpKernel::Pade { matrix: a.clone() },
            method: ExpMethod::ScalingSquaring,
            dim: a.nrows(),
        }
    }

    pub fn method(&self) -> ExpMethod {
        self.method
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// The full matrix `e^{tA}`.
    pub fn matrix(&self, t: f64) -> CMatrix {
        match &self.kernel {
            ExpKernel::Eigen {
                vectors,
                inverse,
                values,
            } => {
                let mut scaled = vectors.clone();
                for (j, lam) in values.iter().enumerate() {
                    let e = (lam * t).exp();
                    for i in 0..scaled.nrows() {
                        scaled[(i, j)] *= e;
                    }
                }
                scaled * inverse
            }
            ExpKernel::Pade { matrix } => {
                if self.dim == 0 {
                    return matrix.clone();
                }
                (matrix * C64::new(t, 0.0)).exp()
            }
        }
    }

    /// `e^{tA} v`.
    pub fn apply(&self, t: f64, v: &CVector) -> CVector {
        match &self.kernel {
            ExpKernel::Eigen {
                vectors,
                inverse,
                values,
            } => {
                let mut coeff = inverse * v;
                for (c, lam) in coeff.iter_mut().zip(values.iter()) {
                    *c *= (lam * t).exp();
                }
                vectors * coeff
            }
            ExpKernel::Pade { .. } => self.matrix(t) * v,
        }
    }
}

/// Returns `(V, V⁻¹, λ, κ)` with `A = V diag(λ) V⁻¹`, or `None` when `A` is
/// (numerically) defective.
fn eigen_decompose(a: &CMatrix) -> Option<(CMatrix, CMatrix, CVector, f64)> {
    let n = a.nrows();
    let schur = a.clone().try_schur(1e-15, 10_000)?;
    let (q, t) = schur.unpack();
    let scale = max_abs(&t).max(1e-300);
    let small = f64::EPSILON * scale;

    // Eigenvectors of the upper-triangular factor by back substitution.
    let mut w = CMatrix::zeros(n, n);
    for i in 0..n {
        let lam = t[(i, i)];
        w[(i, i)] = C64::new(1.0, 0.0);
        for j in (0..i).rev() {
            let mut num = C64::new(0.0, 0.0);
            for k in (j + 1)..=i {
                num += t[(j, k)] * w[(k, i)];
            }
            if num.norm() <= small {
                continue;
            }
            let mut den = t[(j, j)] - lam;
            if den.norm() < small {
                den = C64::new(small, 0.0);
            }
            w[(j, i)] = -num / den;
        }
        let norm = w.column(i).norm();
        w.column_mut(i).unscale_mut(norm);
    }
    let w_inv = w.clone().solve_upper_triangular(&CMatrix::identity(n, n))?;
    let condition = w.norm() * w_inv.norm() / n as f64;
    if !condition.is_finite() || condition > MAX_EIGEN_CONDITION {
        return None;
    }
    let vectors = &q * &w;
    let inverse = &w_inv * q.adjoint();
    let values = CVector::from_iterator(n, (0..n).map(|i| t[(i, i)]));

    // Residual check against the original matrix.
    let mut lv = a * &vectors;
    for j in 0..n {
        for i in 0..n {
            lv[(i, j)] -= vectors[(i, j)] * values[j];
        }
    }
    if max_abs(&lv) > 1e-10 * max_abs(a).max(1.0) {
        return None;
    }
    Some((vectors, inverse, values, condition))
}
