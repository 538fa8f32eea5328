#include "wssopt/estimation.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Cholesky>

#include "wssopt/errors.hpp"

namespace wssopt {

namespace {

void check_positive_finite(double x, const char* what) {
    if (!std::isfinite(x) || !(x > 0.0)) {
        throw std::invalid_argument(std::string(what) + " must be positive and finite");
    }
}

void check_eval_inputs(const Eigen::MatrixXd& cov, const Eigen::VectorXd& p, double sigma2) {
    if (cov.rows() != cov.cols() || cov.rows() == 0) {
        throw std::invalid_argument("error_covariance: covariance must be square and non-empty");
    }
    if (p.size() != cov.rows()) {
        throw std::invalid_argument("error_covariance: allocation length mismatch");
    }
    check_positive_finite(sigma2, "noise variance");
    for (Eigen::Index i = 0; i < p.size(); ++i) {
        if (!std::isfinite(p[i]) || !(p[i] > 0.0)) {
            throw std::invalid_argument("error_covariance: power entries must be positive");
        }
    }
}

Eigen::LLT<Eigen::MatrixXd> factor_sum(const Eigen::MatrixXd& cov, const Eigen::VectorXd& p,
                                       double sigma2) {
    Eigen::MatrixXd b = cov;
    b.diagonal() += sigma2 * p.cwiseInverse();
    Eigen::LLT<Eigen::MatrixXd> llt(b);
    if (llt.info() != Eigen::Success) {
        throw PositiveDefinitenessError("error_covariance: cov + D failed to factor");
    }
    return llt;
}

}  // namespace

void validate(const EstimationProblem& problem) {
    validate(problem.acf);
    validate(problem.grid);
    check_positive_finite(problem.noise_var, "noise_var");
    check_positive_finite(problem.total_power, "total_power");
    check_positive_finite(problem.peak_power, "peak_power");
    const double cap = static_cast<double>(problem.n()) * problem.peak_power;
    if (problem.total_power > cap * (1.0 + 1e-12)) {
        throw ConstraintViolationError("infeasible constraints: total_power " +
                                       std::to_string(problem.total_power) + " exceeds n * peak_power " +
                                       std::to_string(cap));
    }
}

PowerAllocation equal_allocation(const EstimationProblem& problem) {
    validate(problem);
    const double p_eq = problem.equal_power();
    if (p_eq > problem.peak_power * (1.0 + 1e-12)) {
        throw ConstraintViolationError("equal allocation exceeds the peak power constraint");
    }
    return PowerAllocation{Eigen::VectorXd::Constant(problem.n(), p_eq)};
}

void validate_allocation(const EstimationProblem& problem, const Eigen::VectorXd& p) {
    validate(problem);
    if (p.size() != problem.n()) {
        throw ConstraintViolationError("allocation length " + std::to_string(p.size()) +
                                       " does not match n = " + std::to_string(problem.n()));
    }
    const double lo = problem.min_power();
    const double hi = problem.peak_power * (1.0 + 1e-12);
    for (Eigen::Index i = 0; i < p.size(); ++i) {
        if (!std::isfinite(p[i])) throw ConstraintViolationError("allocation has a non-finite entry");
        if (p[i] < lo) {
            throw ConstraintViolationError("allocation entry " + std::to_string(p[i]) +
                                           " is below the power floor " + std::to_string(lo));
        }
        if (p[i] > hi) {
            throw ConstraintViolationError("allocation entry " + std::to_string(p[i]) +
                                           " exceeds peak power " + std::to_string(problem.peak_power));
        }
    }
    const double total = p.sum();
    if (std::abs(total - problem.total_power) > 1e-10 * problem.total_power) {
        throw ConstraintViolationError("allocation total " + std::to_string(total) +
                                       " misses total_power " + std::to_string(problem.total_power));
    }
}

Eigen::MatrixXd error_covariance(const Eigen::MatrixXd& cov, const Eigen::VectorXd& p,
                                 double sigma2, MseForm form) {
    check_eval_inputs(cov, p, sigma2);
    Eigen::MatrixXd m;
    if (form == MseForm::inverse_sum) {
        // (cov^-1 + D^-1)^-1 with D^-1 = diag(p / sigma2).
        Eigen::MatrixXd acc = spd_inverse(cov);
        acc.diagonal() += p / sigma2;
        m = spd_inverse(acc);
    } else {
        // cov - cov (cov + D)^-1 cov, which never inverts cov itself.
        // The circulant_equiv label only records which covariance the caller
        // passed; the arithmetic is the same.
        const auto llt = factor_sum(cov, p, sigma2);
        m = cov - cov * llt.solve(cov);
    }
    return 0.5 * (m + m.transpose().eval());
}

double mse_value(const Eigen::MatrixXd& cov, const Eigen::VectorXd& p, double sigma2) {
    check_eval_inputs(cov, p, sigma2);
    const auto llt = factor_sum(cov, p, sigma2);
    // L^-1 cov via a triangular solve; squared Frobenius norm gives
    // trace(cov B^-1 cov) without forming B^-1.
    const Eigen::MatrixXd x =
        llt.matrixL().solve(cov);
    const double n = static_cast<double>(cov.rows());
    return (cov.trace() - x.squaredNorm()) / n;
}

namespace {

MseReport report_from(const Eigen::MatrixXd& cov, const Eigen::VectorXd& p, double sigma2,
                      MseForm form, double r0) {
    const Eigen::MatrixXd m = error_covariance(cov, p, sigma2, form);
    MseReport rep;
    rep.per_sample_mse = m.diagonal();
    rep.mse = rep.per_sample_mse.mean();
    rep.normalized_mse = rep.mse / r0;
    rep.which_form = form;
    return rep;
}

}  // namespace

MseReport mse(const EstimationProblem& problem, const PowerAllocation& alloc, MseForm form) {
    validate_allocation(problem, alloc.p);
    if (form == MseForm::circulant_equiv) {
        const CirculantEquiv circ = covariance_equiv(problem);
        return report_from(circ.dense(), alloc.p, problem.noise_var, form, circ.first_row[0]);
    }
    const ToeplitzCov cov = covariance(problem);
    return report_from(cov.dense(), alloc.p, problem.noise_var, form, cov.first_column[0]);
}

MseReport mse_equiv(const EstimationProblem& problem, const PowerAllocation& alloc) {
    return mse(problem, alloc, MseForm::circulant_equiv);
}

ToeplitzCov covariance(const EstimationProblem& problem) {
    validate(problem);
    return build_toeplitz(acf_sequence(problem.acf, problem.grid));
}

CirculantEquiv covariance_equiv(const EstimationProblem& problem) {
    validate(problem);
    return build_circulant_equiv(acf_sequence(problem.acf, problem.grid));
}

}  // namespace wssopt
