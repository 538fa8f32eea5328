#pragma once

#include <optional>
#include <vector>

#include <Eigen/Core>

#include "wssopt/estimation.hpp"

namespace wssopt {

struct OptimizerConfig {
    enum class StepRule { backtracking, fixed };

    int max_iterations = 5000;
    double gradient_tol = 1e-9;    // on the projected-gradient 2-norm
    double objective_tol = 1e-12;  // on the absolute per-iteration decrease
    StepRule step_rule = StepRule::backtracking;
    double fixed_step = 1e-2;  // used only by StepRule::fixed
    std::optional<Eigen::VectorXd> initial_point;  // projected onto the feasible set
};

/// Throws std::invalid_argument on non-positive tolerances/steps or
/// max_iterations < 1.
void validate(const OptimizerConfig& config);

struct OptimizationResult {
    PowerAllocation allocation;          // feasible by construction
    double mse = 0.0;                    // objective at `allocation`
    int iterations = 0;                  // gradient steps taken
    bool converged = false;              // stopping test met before the cap
    double projected_gradient_norm = 0;  // at the returned point
    double peak_power = 0.0;             // bound that was active in the run
};

/// Gradient of the MSE objective in p. With M the error covariance,
///     d(trace(M)/n)/dp_i = -(1/(n sigma^2)) * |M e_i|^2,
/// so every component is strictly negative: more power always helps.
/// Validates the allocation against the problem.
Eigen::VectorXd mse_gradient(const EstimationProblem& problem, const PowerAllocation& alloc);

/// Same, for a prebuilt dense covariance; requires p > 0 elementwise only.
Eigen::VectorXd mse_gradient_value(const Eigen::MatrixXd& cov, const Eigen::VectorXd& p,
                                   double sigma2);

/// Euclidean projection onto { x : sum(x) = total, lo <= x_i <= hi }.
/// Exact O(n log n) breakpoint search on the scalar dual variable; the result
/// satisfies the box bounds exactly and the total to ~n*eps relative.
/// Throws ConstraintViolationError when n*lo <= total <= n*hi fails.
Eigen::VectorXd project_capped_simplex(const Eigen::VectorXd& x, double total, double lo,
                                       double hi);

/// Euclidean projection of `d` onto the tangent cone of the capped simplex at
/// a feasible point: { v : sum(v) = 0, v_i <= 0 where at_hi, v_i >= 0 where
/// at_lo }. The projection of -gradient vanishes exactly at a KKT point.
Eigen::VectorXd project_tangent_cone(const Eigen::VectorXd& d,
                                     const std::vector<bool>& at_lo,
                                     const std::vector<bool>& at_hi);

/// Minimizes the MSE over the feasible allocations by projected gradient
/// descent (Barzilai-Borwein trial steps safeguarded by Armijo backtracking
/// under StepRule::backtracking). Deterministic: no randomness anywhere.
/// converged is true iff the projected-gradient norm fell to gradient_tol or
/// the objective decrease fell to objective_tol before max_iterations.
OptimizationResult optimize(const EstimationProblem& problem, const OptimizerConfig& config = {});

/// mse(equal allocation) - mse(optimized allocation); >= -objective_tol.
double convergence_gap(const EstimationProblem& problem, const OptimizerConfig& config = {});

}  // namespace wssopt
