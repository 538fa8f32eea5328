#pragma once

#include <Eigen/Core>

#include "wssopt/acf.hpp"
#include "wssopt/linalg.hpp"

namespace wssopt {

/// How the error covariance / MSE is evaluated.
enum class MseForm {
    direct,          // M = R - R (R + D)^-1 R; no inverse of R needed
    inverse_sum,     // M = (R^-1 + D^-1)^-1; requires R positive-definite
    circulant_equiv  // direct form on the circulant counterpart of R
};

/// Estimation of a WSS process observed through per-sample power scaling and
/// additive noise: sample k is received with power p[k] and noise variance
/// noise_var / p[k]. The linear MMSE (Wiener) estimate of the n process values
/// from the n observations has error covariance M and per-sample MSE diag(M).
struct EstimationProblem {
    AcfModel acf;
    SamplingGrid grid;
    double noise_var = 1.0;     // sigma^2 > 0
    double total_power = 1.0;   // P_T > 0; sum of p must equal P_T
    double peak_power = 10.0;   // P_max > 0; each p[k] <= P_max

    int n() const { return grid.count; }
    double equal_power() const { return total_power / grid.count; }
    /// Strictly positive floor keeping D = diag(noise_var / p) well defined.
    double min_power() const { return 1e-12 * total_power / grid.count; }
};

/// Throws std::invalid_argument on bad parameters and ConstraintViolationError
/// when the constraint set is empty (total_power > n * peak_power).
void validate(const EstimationProblem& problem);

struct PowerAllocation {
    Eigen::VectorXd p;  // length n; min_power <= p[k] <= peak_power; sum = total_power
};

/// p[k] = total_power / n for every k.
/// Throws ConstraintViolationError when that exceeds the peak constraint.
PowerAllocation equal_allocation(const EstimationProblem& problem);

/// Checks length, finiteness, the power floor, the peak bound, and that the
/// total is met to 1e-10 relative. Throws ConstraintViolationError otherwise.
void validate_allocation(const EstimationProblem& problem, const Eigen::VectorXd& p);

struct MseReport {
    double mse = 0.0;                // trace(M) / n
    double normalized_mse = 0.0;     // mse / R(0), dimensionless in (0, 1)
    Eigen::VectorXd per_sample_mse;  // diag(M), each in (0, R(0))
    MseForm which_form = MseForm::direct;
};

/// Wiener error covariance for covariance `cov` (Toeplitz or circulant, dense),
/// allocation p and noise variance sigma2, via the requested form. The two
/// algebraic forms agree to rounding; `direct` also tolerates tiny p where
/// forming D^-1 would overflow. The result is symmetrized before returning.
Eigen::MatrixXd error_covariance(const Eigen::MatrixXd& cov, const Eigen::VectorXd& p,
                                 double sigma2, MseForm form = MseForm::direct);

/// trace(M) / n without materializing M: with B = cov + D and B = L L^T,
/// trace(cov - cov B^-1 cov) = trace(cov) - |L^-1 cov|_F^2.
/// Skips allocation validation (callers probing off the constraint set rely
/// on that); requires p > 0 elementwise only.
double mse_value(const Eigen::MatrixXd& cov, const Eigen::VectorXd& p, double sigma2);

/// Full report for the problem's covariance. Validates the allocation.
/// `direct` and `inverse_sum` evaluate the Toeplitz covariance by the two
/// algebraic routes; `circulant_equiv` evaluates the circulant counterpart.
MseReport mse(const EstimationProblem& problem, const PowerAllocation& alloc,
              MseForm form = MseForm::direct);

/// Shorthand for mse(problem, alloc, MseForm::circulant_equiv). The result is
/// invariant under cyclic rotation of p, which the Toeplitz form is not.
MseReport mse_equiv(const EstimationProblem& problem, const PowerAllocation& alloc);

/// The problem's Toeplitz covariance (validated positive-definite).
ToeplitzCov covariance(const EstimationProblem& problem);

/// The problem's circulant counterpart.
CirculantEquiv covariance_equiv(const EstimationProblem& problem);

}  // namespace wssopt
