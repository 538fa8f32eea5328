#include "wssopt/linalg.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "wssopt/errors.hpp"

namespace wssopt {

namespace {

void check_sequence(const Eigen::VectorXd& seq, const char* who) {
    if (seq.size() == 0) throw std::invalid_argument(std::string(who) + ": empty sequence");
    if (!seq.allFinite()) throw std::invalid_argument(std::string(who) + ": non-finite entry");
    if (!(seq[0] > 0.0)) throw std::invalid_argument(std::string(who) + ": zero-lag value must be positive");
}

// Eigen's LLT reports NumericalIssue on a negative pivot but can let an exactly
// singular matrix slip through with a zero pivot, so check the factor as well.
bool llt_ok(const Eigen::LLT<Eigen::MatrixXd>& llt) {
    if (llt.info() != Eigen::Success) return false;
    const auto& l = llt.matrixLLT();
    for (Eigen::Index i = 0; i < l.rows(); ++i) {
        if (!(l(i, i) > 0.0) || !std::isfinite(l(i, i))) return false;
    }
    return true;
}

}  // namespace

Eigen::MatrixXd ToeplitzCov::dense() const {
    const int n = dim();
    Eigen::MatrixXd m(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) m(i, j) = first_column[std::abs(i - j)];
    }
    return m;
}

Eigen::MatrixXd CirculantEquiv::dense() const {
    const int n = dim();
    Eigen::MatrixXd m(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) m(i, j) = first_row[(j - i + n) % n];
    }
    return m;
}

ToeplitzCov build_toeplitz(const Eigen::VectorXd& acf_seq) {
    check_sequence(acf_seq, "build_toeplitz");
    ToeplitzCov cov{acf_seq};
    Eigen::LLT<Eigen::MatrixXd> llt(cov.dense());
    if (!llt_ok(llt)) {
        throw PositiveDefinitenessError(
            "build_toeplitz: covariance is not positive-definite (Cholesky failed)");
    }
    return cov;
}

CirculantEquiv build_circulant_equiv(const Eigen::VectorXd& acf_seq) {
    check_sequence(acf_seq, "build_circulant_equiv");
    const int n = static_cast<int>(acf_seq.size());
    Eigen::VectorXd c(n);
    c[0] = acf_seq[0];
    // Fill the first half and mirror so c[k] == c[n-k] holds bit-exactly.
    for (int k = 1; k <= n / 2; ++k) {
        const double w = static_cast<double>(k) / n;
        c[k] = acf_seq[k] + w * (acf_seq[n - k] - acf_seq[k]);
        if (k != n - k) c[n - k] = c[k];
    }
    CirculantEquiv circ{c};
    const Eigen::VectorXd eig = circulant_eigenvalues(circ);
    for (int j = 0; j < n; ++j) {
        if (!(eig[j] > 0.0)) throw NonPositiveEigenvalueError(eig[j], j);
    }
    return circ;
}

Eigen::VectorXd circulant_eigenvalues(const CirculantEquiv& c) {
    check_sequence(c.first_row, "circulant_eigenvalues");
    const int n = c.dim();
    const double scale = c.first_row.cwiseAbs().maxCoeff();
    Eigen::VectorXd eig(n);
    double worst_im = 0.0;
    for (int j = 0; j < n; ++j) {
        // Direct DFT with exact phase reduction: j*k stays an exact integer
        // for any n this library handles, so each angle is accurate to eps.
        double re = 0.0, im = 0.0;
        for (int k = 0; k < n; ++k) {
            const long long jk = static_cast<long long>(j) * k % n;
            const double angle = -2.0 * std::numbers::pi * static_cast<double>(jk) / n;
            re += c.first_row[k] * std::cos(angle);
            im += c.first_row[k] * std::sin(angle);
        }
        eig[j] = re;
        worst_im = std::max(worst_im, std::abs(im));
    }
    if (worst_im > 1e-10 * scale) {
        throw NumericalError("circulant_eigenvalues: imaginary residual " +
                             std::to_string(worst_im) + " exceeds 1e-10 relative tolerance");
    }
    return eig;
}

double strong_norm(const Eigen::MatrixXd& a) {
    if (a.rows() != a.cols() || a.rows() == 0) {
        throw std::invalid_argument("strong_norm: matrix must be square and non-empty");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw NumericalError("strong_norm: eigensolver failed");
    return std::max(std::abs(es.eigenvalues().minCoeff()), std::abs(es.eigenvalues().maxCoeff()));
}

double weak_norm(const Eigen::MatrixXd& a) {
    if (a.rows() != a.cols() || a.rows() == 0) {
        throw std::invalid_argument("weak_norm: matrix must be square and non-empty");
    }
    return a.norm() / std::sqrt(static_cast<double>(a.rows()));
}

Eigen::MatrixXd rotate(const Eigen::MatrixXd& a, int degree) {
    if (a.rows() != a.cols() || a.rows() == 0) {
        throw std::invalid_argument("rotate: matrix must be square and non-empty");
    }
    const int n = static_cast<int>(a.rows());
    if (degree < 0 || degree >= n) throw std::invalid_argument("rotate: degree must lie in [0, n)");
    Eigen::MatrixXd out(n, n);
    for (int r = 0; r < n; ++r) {
        for (int col = 0; col < n; ++col) out(r, col) = a((r + degree) % n, (col + degree) % n);
    }
    return out;
}

Eigen::VectorXd rotate(const Eigen::VectorXd& v, int degree) {
    const int n = static_cast<int>(v.size());
    if (n == 0) throw std::invalid_argument("rotate: empty vector");
    if (degree < 0 || degree >= n) throw std::invalid_argument("rotate: degree must lie in [0, n)");
    Eigen::VectorXd out(n);
    for (int k = 0; k < n; ++k) out[k] = v[(k + degree) % n];
    return out;
}

Eigen::MatrixXd spd_solve(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    if (a.rows() != a.cols() || a.rows() == 0) {
        throw std::invalid_argument("spd_solve: matrix must be square and non-empty");
    }
    if (b.rows() != a.rows()) throw std::invalid_argument("spd_solve: dimension mismatch");
    Eigen::LLT<Eigen::MatrixXd> llt(a);
    if (!llt_ok(llt)) {
        throw PositiveDefinitenessError("spd_solve: matrix is not positive-definite");
    }
    return llt.solve(b);
}

Eigen::MatrixXd spd_inverse(const Eigen::MatrixXd& a) {
    return spd_solve(a, Eigen::MatrixXd::Identity(a.rows(), a.cols()));
}

}  // namespace wssopt
