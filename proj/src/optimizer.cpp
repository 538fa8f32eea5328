#include "wssopt/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "wssopt/errors.hpp"

namespace wssopt {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// One boundary of a piecewise-linear segment during the dual sweeps below.
struct Breakpoint {
    double value;
    int index;
    bool entering;  // coordinate becomes linear at this value (vs. leaves)
};

void sort_breakpoints(std::vector<Breakpoint>& bp) {
    std::sort(bp.begin(), bp.end(), [](const Breakpoint& a, const Breakpoint& b) {
        if (a.value != b.value) return a.value < b.value;
        if (a.entering != b.entering) return a.entering;  // deterministic tie order
        return a.index < b.index;
    });
}

}  // namespace

void validate(const OptimizerConfig& config) {
    if (config.max_iterations < 1) {
        throw std::invalid_argument("optimizer: max_iterations must be >= 1");
    }
    if (!(config.gradient_tol > 0.0) || !std::isfinite(config.gradient_tol)) {
        throw std::invalid_argument("optimizer: gradient_tol must be positive");
    }
    if (!(config.objective_tol > 0.0) || !std::isfinite(config.objective_tol)) {
        throw std::invalid_argument("optimizer: objective_tol must be positive");
    }
    if (config.step_rule == OptimizerConfig::StepRule::fixed &&
        (!(config.fixed_step > 0.0) || !std::isfinite(config.fixed_step))) {
        throw std::invalid_argument("optimizer: fixed_step must be positive");
    }
    if (config.initial_point && !config.initial_point->allFinite()) {
        throw std::invalid_argument("optimizer: initial_point must be finite");
    }
}

Eigen::VectorXd project_capped_simplex(const Eigen::VectorXd& x, double total, double lo,
                                       double hi) {
    const int n = static_cast<int>(x.size());
    if (n == 0) throw std::invalid_argument("project_capped_simplex: empty input");
    if (!x.allFinite() || !std::isfinite(total) || !std::isfinite(lo) || !std::isfinite(hi)) {
        throw std::invalid_argument("project_capped_simplex: non-finite input");
    }
    if (lo > hi) throw std::invalid_argument("project_capped_simplex: lo > hi");

    const double nn = static_cast<double>(n);
    const double scale = std::max({1.0, std::abs(total), nn * std::abs(lo), nn * std::abs(hi)});
    const double tol = 1e-12 * scale;
    if (nn * lo - total > tol || total - nn * hi > tol) {
        throw ConstraintViolationError("project_capped_simplex: no feasible point with sum " +
                                       std::to_string(total));
    }
    if (nn * hi - total <= tol) return Eigen::VectorXd::Constant(n, hi);
    if (total - nn * lo <= tol) return Eigen::VectorXd::Constant(n, lo);

    // Solve sum_i clamp(x_i - lam, lo, hi) = total for the scalar dual lam.
    // The sum is continuous, piecewise linear and non-increasing in lam:
    // coordinate i sits at hi until lam = x_i - hi, is linear until
    // lam = x_i - lo, then sits at lo.
    std::vector<Breakpoint> bp;
    bp.reserve(2 * n);
    for (int i = 0; i < n; ++i) {
        bp.push_back({x[i] - hi, i, true});
        bp.push_back({x[i] - lo, i, false});
    }
    sort_breakpoints(bp);

    double num_hi = nn, num_lo = 0.0, num_lin = 0.0, sum_lin = 0.0;
    double prev = -kInf;
    double lam = bp.back().value;  // fallback; overwritten when a segment matches
    double best_err = kInf;
    bool found = false;
    for (const Breakpoint& b : bp) {
        // Segment [prev, b.value] with the current membership counts.
        const double base = num_hi * hi + num_lo * lo + sum_lin;
        if (num_lin > 0.0) {
            const double cand = (base - total) / num_lin;
            if (cand >= prev - tol && cand <= b.value + tol) {
                lam = std::clamp(cand, std::min(prev, b.value), b.value);
                found = true;
                break;
            }
            // Track the closest segment end in case rounding skips every test.
            const double err = std::abs(base - num_lin * b.value - total);
            if (err < best_err) {
                best_err = err;
                lam = b.value;
            }
        } else if (std::abs(base - total) <= tol) {
            lam = std::isfinite(prev) ? prev : b.value;
            found = true;
            break;
        }
        if (b.entering) {
            num_hi -= 1.0;
            num_lin += 1.0;
            sum_lin += x[b.index];
        } else {
            num_lin -= 1.0;
            sum_lin -= x[b.index];
            num_lo += 1.0;
        }
        prev = b.value;
    }
    (void)found;

    Eigen::VectorXd p = (x.array() - lam).cwiseMax(lo).cwiseMin(hi);

    // Spread the rounding residual over the strictly interior coordinates so
    // the total is met to machine precision, not just to the sweep's accuracy.
    int free_count = 0;
    for (int i = 0; i < n; ++i) {
        if (p[i] > lo && p[i] < hi) ++free_count;
    }
    if (free_count > 0) {
        const double residual = total - p.sum();
        const double bump = residual / free_count;
        for (int i = 0; i < n; ++i) {
            if (p[i] > lo && p[i] < hi) p[i] = std::clamp(p[i] + bump, lo, hi);
        }
    }
    return p;
}

Eigen::VectorXd project_tangent_cone(const Eigen::VectorXd& d, const std::vector<bool>& at_lo,
                                     const std::vector<bool>& at_hi) {
    const int n = static_cast<int>(d.size());
    if (n == 0) throw std::invalid_argument("project_tangent_cone: empty input");
    if (at_lo.size() != static_cast<std::size_t>(n) || at_hi.size() != static_cast<std::size_t>(n)) {
        throw std::invalid_argument("project_tangent_cone: mask length mismatch");
    }
    if (!d.allFinite()) throw std::invalid_argument("project_tangent_cone: non-finite input");

    // Projection of d onto { v : sum(v) = 0, v_i <= 0 where at_hi,
    // v_i >= 0 where at_lo }. Componentwise, with dual mu:
    //   free:   v_i = d_i - mu
    //   at_hi:  v_i = min(d_i - mu, 0)   (linear once mu > d_i)
    //   at_lo:  v_i = max(d_i - mu, 0)   (linear until mu > d_i)
    // sum(v) is non-increasing in mu; sweep its breakpoints for the root.
    Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
    std::vector<Breakpoint> bp;
    double num_lin = 0.0, sum_lin = 0.0;
    for (int i = 0; i < n; ++i) {
        const bool pinned = at_lo[i] && at_hi[i];  // degenerate box: v_i = 0
        if (pinned) continue;
        if (at_hi[i]) {
            bp.push_back({d[i], i, true});
        } else if (at_lo[i]) {
            bp.push_back({d[i], i, false});
            num_lin += 1.0;
            sum_lin += d[i];
        } else {
            num_lin += 1.0;
            sum_lin += d[i];
        }
    }
    if (num_lin == 0.0 && bp.empty()) return v;  // everything pinned

    sort_breakpoints(bp);
    double prev = -kInf;
    double mu = 0.0;
    bool found = false;
    for (const Breakpoint& b : bp) {
        if (num_lin > 0.0) {
            const double cand = sum_lin / num_lin;
            if (cand >= prev && cand <= b.value) {
                mu = cand;
                found = true;
                break;
            }
        } else if (sum_lin == 0.0) {
            mu = std::isfinite(prev) ? prev : b.value;
            found = true;
            break;
        }
        if (b.entering) {
            num_lin += 1.0;
            sum_lin += b.value;  // an at_hi coordinate enters the linear regime
        } else {
            num_lin -= 1.0;
            sum_lin -= b.value;  // an at_lo coordinate leaves it
        }
        prev = b.value;
    }
    if (!found) {
        // Final segment [prev, +inf): free plus every at_hi coordinate.
        mu = num_lin > 0.0 ? sum_lin / num_lin : prev;
    }

    for (int i = 0; i < n; ++i) {
        if (at_lo[i] && at_hi[i]) continue;
        const double step = d[i] - mu;
        if (at_hi[i]) {
            v[i] = std::min(step, 0.0);
        } else if (at_lo[i]) {
            v[i] = std::max(step, 0.0);
        } else {
            v[i] = step;
        }
    }
    return v;
}

Eigen::VectorXd mse_gradient_value(const Eigen::MatrixXd& cov, const Eigen::VectorXd& p,
                                   double sigma2) {
    const Eigen::MatrixXd m = error_covariance(cov, p, sigma2, MseForm::direct);
    const double n = static_cast<double>(cov.rows());
    Eigen::VectorXd g(cov.rows());
    for (Eigen::Index i = 0; i < cov.rows(); ++i) {
        g[i] = -m.col(i).squaredNorm() / (n * sigma2);
    }
    return g;
}

Eigen::VectorXd mse_gradient(const EstimationProblem& problem, const PowerAllocation& alloc) {
    validate_allocation(problem, alloc.p);
    return mse_gradient_value(covariance(problem).dense(), alloc.p, problem.noise_var);
}

namespace {

std::pair<std::vector<bool>, std::vector<bool>> active_masks(const Eigen::VectorXd& p, double lo,
                                                             double hi) {
    // project_capped_simplex assigns bound values exactly, so exact
    // comparisons identify the active sets without a fudge tolerance.
    const int n = static_cast<int>(p.size());
    std::vector<bool> at_lo(n), at_hi(n);
    for (int i = 0; i < n; ++i) {
        at_lo[i] = p[i] <= lo;
        at_hi[i] = p[i] >= hi;
    }
    return {at_lo, at_hi};
}

}  // namespace

OptimizationResult optimize(const EstimationProblem& problem, const OptimizerConfig& config) {
    validate(config);
    validate(problem);
    const int n = problem.n();
    const double lo = problem.min_power();
    const double hi = problem.peak_power;
    const double total = problem.total_power;
    const double sigma2 = problem.noise_var;

    const Eigen::MatrixXd cov = covariance(problem).dense();
    auto objective = [&](const Eigen::VectorXd& p) { return mse_value(cov, p, sigma2); };
    auto gradient = [&](const Eigen::VectorXd& p) { return mse_gradient_value(cov, p, sigma2); };

    Eigen::VectorXd x;
    if (config.initial_point) {
        if (config.initial_point->size() != n) {
            throw std::invalid_argument("optimize: initial_point length mismatch");
        }
        x = project_capped_simplex(*config.initial_point, total, lo, hi);
    } else {
        x = project_capped_simplex(Eigen::VectorXd::Constant(n, total / n), total, lo, hi);
    }

    double f = objective(x);
    Eigen::VectorXd g = gradient(x);

    const bool fixed = config.step_rule == OptimizerConfig::StepRule::fixed;
    const double c1 = 1e-4;  // Armijo sufficient-decrease constant
    double bb_step = (total / n) / std::max(g.cwiseAbs().maxCoeff(), 1e-300);

    int steps = 0;
    bool converged = false;
    while (true) {
        const auto [at_lo, at_hi] = active_masks(x, lo, hi);
        const double pg_norm = project_tangent_cone(-g, at_lo, at_hi).norm();
        if (pg_norm <= config.gradient_tol) {
            converged = true;
            break;
        }
        if (steps >= config.max_iterations) break;

        Eigen::VectorXd xn;
        double fn = f;
        bool accepted = false;
        if (fixed) {
            xn = project_capped_simplex(x - config.fixed_step * g, total, lo, hi);
            fn = objective(xn);
            accepted = fn < f;
        } else {
            double t = std::clamp(bb_step, 1e-16, 1e16);
            for (int bt = 0; bt < 80; ++bt) {
                xn = project_capped_simplex(x - t * g, total, lo, hi);
                fn = objective(xn);
                if (fn <= f + c1 * g.dot(xn - x)) {
                    accepted = true;
                    break;
                }
                t *= 0.5;
            }
        }
        if (!accepted) {
            converged = true;  // no feasible descent at the step rule's resolution
            break;
        }

        ++steps;
        const Eigen::VectorXd gn = gradient(xn);
        const Eigen::VectorXd s = xn - x;
        const double sy = s.dot(gn - g);
        bb_step = sy > 0.0 ? s.squaredNorm() / sy : bb_step * 2.0;
        if (!std::isfinite(bb_step) || bb_step <= 0.0) bb_step = 1.0;
        const double dec = f - fn;
        x = xn;
        f = fn;
        g = gn;
        if (dec <= config.objective_tol) {
            converged = true;
            break;
        }
    }

    OptimizationResult res;
    res.allocation = PowerAllocation{x};
    res.mse = f;
    res.iterations = steps;
    res.converged = converged;
    const auto [at_lo, at_hi] = active_masks(x, lo, hi);
    res.projected_gradient_norm = project_tangent_cone(-g, at_lo, at_hi).norm();
    res.peak_power = hi;
    return res;
}

double convergence_gap(const EstimationProblem& problem, const OptimizerConfig& config) {
    const PowerAllocation eq = equal_allocation(problem);
    const double mse_eq = mse_value(covariance(problem).dense(), eq.p, problem.noise_var);
    return mse_eq - optimize(problem, config).mse;
}

}  // namespace wssopt
