#pragma once

#include <Eigen/Core>

namespace wssopt {

/// Symmetric positive-definite Toeplitz covariance, stored by its first column.
/// Construction (build_toeplitz) guarantees positive-definiteness.
struct ToeplitzCov {
    Eigen::VectorXd first_column;  // r[k] = R(k * T), k = 0..n-1

    int dim() const { return static_cast<int>(first_column.size()); }
    Eigen::MatrixXd dense() const;
};

/// Symmetric circulant matrix, stored by its first row. Construction
/// (build_circulant_equiv) guarantees c[k] = c[n-k] and positive DFT
/// eigenvalues, so the matrix is symmetric positive-definite.
struct CirculantEquiv {
    Eigen::VectorXd first_row;  // c[0..n-1]

    int dim() const { return static_cast<int>(first_row.size()); }
    Eigen::MatrixXd dense() const;
};

/// Positive diagonal noise covariance, sigma^2 / p_i on the diagonal.
struct DiagNoise {
    Eigen::VectorXd diagonal;  // all entries > 0

    int dim() const { return static_cast<int>(diagonal.size()); }
};

/// Builds the Toeplitz covariance from an autocorrelation sequence and
/// verifies positive-definiteness by Cholesky factorization.
/// Throws PositiveDefinitenessError when the factorization fails.
ToeplitzCov build_toeplitz(const Eigen::VectorXd& acf_seq);

/// Circulant counterpart of the Toeplitz matrix for the same sequence:
///     c[k] = r[k] + (k/n) * (r[n-k] - r[k]),   c[0] = r[0],
/// which wraps the tail correlation around the window. The construction
/// enforces c[k] = c[n-k] exactly and checks, via the DFT of the first row,
/// that every eigenvalue is real and positive.
/// Throws NonPositiveEigenvalueError otherwise (common at small n when the
/// correlation length exceeds the window).
CirculantEquiv build_circulant_equiv(const Eigen::VectorXd& acf_seq);

/// Eigenvalues of the circulant matrix: the DFT of its first row, in DFT
/// index order. Imaginary parts must vanish to 1e-10 relative to the largest
/// |c[k]|; a larger residual signals a broken symmetry invariant and throws
/// NumericalError.
Eigen::VectorXd circulant_eigenvalues(const CirculantEquiv& c);

/// Spectral norm of a symmetric matrix: max |eigenvalue|.
double strong_norm(const Eigen::MatrixXd& a);

/// Normalized Frobenius norm: sqrt(trace(A^T A) / n) for an n x n matrix.
/// Satisfies |A B| <= strong_norm(A) * weak_norm(B) and |trace(A)/n| <= weak_norm(A).
double weak_norm(const Eigen::MatrixXd& a);

/// Cyclic rotation of degree i: out(r, c) = a((r+i) mod n, (c+i) mod n).
/// degree must lie in [0, n). Circulant matrices are invariant under it;
/// a diagonal matrix maps to the diagonal cyclically shifted by i.
Eigen::MatrixXd rotate(const Eigen::MatrixXd& a, int degree);

/// Cyclic rotation of a vector: out[k] = v[(k+i) mod n].
Eigen::VectorXd rotate(const Eigen::VectorXd& v, int degree);

/// Solves A X = B for symmetric positive-definite A via Cholesky.
/// Throws PositiveDefinitenessError when A fails to factor.
Eigen::MatrixXd spd_solve(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

/// Inverse of a symmetric positive-definite matrix via spd_solve.
Eigen::MatrixXd spd_inverse(const Eigen::MatrixXd& a);

}  // namespace wssopt
