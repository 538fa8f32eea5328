#include "wssopt/equivalence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "wssopt/errors.hpp"
#include "wssopt/optimizer.hpp"

namespace wssopt {

namespace {

void check_bound(double lhs, double rhs, const char* what) {
    if (lhs > rhs + 1e-9 * std::max(1.0, rhs)) {
        throw DiagnosticError(std::string("equivalence_report: ") + what + " violated: " +
                              std::to_string(lhs) + " > " + std::to_string(rhs));
    }
}

double min_eigenvalue(const Eigen::MatrixXd& a) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw NumericalError("min_eigenvalue: eigensolver failed");
    return es.eigenvalues().minCoeff();
}

}  // namespace

EquivalenceReport equivalence_report(const EstimationProblem& problem,
                                     const PowerAllocation& alloc) {
    validate_allocation(problem, alloc.p);
    const Eigen::MatrixXd r = covariance(problem).dense();
    const Eigen::MatrixXd c = covariance_equiv(problem).dense();
    const Eigen::MatrixXd r_inv = spd_inverse(r);
    const Eigen::MatrixXd c_inv = spd_inverse(c);
    const Eigen::MatrixXd m = error_covariance(r, alloc.p, problem.noise_var);
    const Eigen::MatrixXd l = error_covariance(c, alloc.p, problem.noise_var);

    EquivalenceReport rep;
    rep.n = problem.n();
    rep.strong_r = strong_norm(r);
    rep.strong_c = strong_norm(c);
    rep.strong_r_inv = strong_norm(r_inv);
    rep.strong_c_inv = strong_norm(c_inv);
    rep.strong_m = strong_norm(m);
    rep.strong_l = strong_norm(l);
    rep.weak_gap_cr = weak_norm(c - r);
    rep.weak_gap_inv = weak_norm(c_inv - r_inv);
    rep.weak_gap_lm = weak_norm(l - m);
    rep.trace_gap = std::abs((l - m).trace()) / rep.n;

    check_bound(rep.weak_gap_inv, rep.strong_c_inv * rep.strong_r_inv * rep.weak_gap_cr,
                "inverse weak-gap bound");
    check_bound(rep.weak_gap_lm,
                rep.strong_l * rep.strong_m * rep.strong_c_inv * rep.strong_r_inv * rep.weak_gap_cr,
                "chained error-covariance bound");
    check_bound(rep.trace_gap, rep.weak_gap_lm, "trace bound");
    return rep;
}

NormBoundednessTable norm_boundedness_probe(const AcfModel& acf, double rate_hz,
                                            std::vector<int> n_list) {
    validate(acf);
    if (!(rate_hz > 0.0) || !std::isfinite(rate_hz)) {
        throw std::invalid_argument("norm_boundedness_probe: rate must be positive");
    }
    if (n_list.empty()) throw std::invalid_argument("norm_boundedness_probe: empty n list");
    std::sort(n_list.begin(), n_list.end());
    n_list.erase(std::unique(n_list.begin(), n_list.end()), n_list.end());

    NormBoundednessTable table;
    for (int n : n_list) {
        const SamplingGrid grid{1.0 / rate_hz, n};
        const Eigen::VectorXd seq = acf_sequence(acf, grid);
        const Eigen::MatrixXd r = build_toeplitz(seq).dense();
        const Eigen::MatrixXd c = build_circulant_equiv(seq).dense();
        NormBoundednessRow row;
        row.n = n;
        row.strong_r = strong_norm(r);
        row.strong_c = strong_norm(c);
        row.min_eig_r = min_eigenvalue(r);
        row.min_eig_c = min_eigenvalue(c);
        table.rows.push_back(row);
    }

    const std::size_t k = table.rows.size();
    if (k >= 3) {
        auto growing = [&](auto field) {
            const double a = table.rows[k - 3].*field;
            const double b = table.rows[k - 2].*field;
            const double c2 = table.rows[k - 1].*field;
            return b > 1.01 * a && c2 > 1.01 * b;
        };
        table.growth_flag = growing(&NormBoundednessRow::strong_r) ||
                            growing(&NormBoundednessRow::strong_c);
    }
    return table;
}

Eigen::VectorXd random_allocation(const EstimationProblem& problem, std::uint64_t seed) {
    validate(problem);
    const int n = problem.n();
    const double avg = problem.equal_power();
    const double hi = problem.peak_power;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(0.25 * avg, std::min(2.5 * avg, hi));
    Eigen::VectorXd draw(n);
    for (int i = 0; i < n; ++i) draw[i] = dist(rng);
    // Project with a floor well above the problem's power floor so that
    // finite-difference and line probes can step in any direction without
    // leaving the positive orthant.
    const double lo = std::max(problem.min_power(), 0.1 * avg);
    return project_capped_simplex(draw, problem.total_power, lo, hi);
}

CyclicSymmetryResult cyclic_symmetry_probe(const EstimationProblem& problem,
                                           const PowerAllocation& alloc, int trials,
                                           std::uint64_t seed) {
    if (trials < 1) throw std::invalid_argument("cyclic_symmetry_probe: trials must be >= 1");
    validate_allocation(problem, alloc.p);
    const Eigen::MatrixXd r = covariance(problem).dense();
    const Eigen::MatrixXd c = covariance_equiv(problem).dense();
    const double sigma2 = problem.noise_var;
    const int n = problem.n();

    CyclicSymmetryResult res;
    res.trials = trials;
    for (int t = 0; t < trials; ++t) {
        const Eigen::VectorXd p =
            t == 0 ? alloc.p : random_allocation(problem, seed + static_cast<std::uint64_t>(t));
        const double e_equiv0 = mse_value(c, p, sigma2);
        const double e_direct0 = mse_value(r, p, sigma2);
        for (int i = 1; i < n; ++i) {
            const Eigen::VectorXd q = rotate(p, i);
            res.max_rel_dev_equiv = std::max(
                res.max_rel_dev_equiv, std::abs(mse_value(c, q, sigma2) - e_equiv0) / e_equiv0);
            res.max_rel_dev_direct = std::max(
                res.max_rel_dev_direct, std::abs(mse_value(r, q, sigma2) - e_direct0) / e_direct0);
        }
    }
    res.passed = res.max_rel_dev_equiv <= 1e-12;
    return res;
}

namespace {

// Symmetric matrix with entries drawn uniformly from [-1, 1].
Eigen::MatrixXd random_symmetric(int n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Eigen::MatrixXd a(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
            a(i, j) = dist(rng);
            a(j, i) = a(i, j);
        }
    }
    return a;
}

// Zero-sum direction with unit max-entry, for line restrictions.
Eigen::VectorXd random_direction(int n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v[i] = dist(rng);
    v.array() -= v.mean();
    const double m = v.cwiseAbs().maxCoeff();
    if (m < 1e-12) {
        v.setZero();
        if (n >= 2) {
            v[0] = 1.0;
            v[1] = -1.0;
        }
        return v;
    }
    return v / m;
}

}  // namespace

std::vector<ProbeResult> run_lemma_probes(const LemmaProbeConfig& config) {
    validate(config.problem);
    if (config.trials < 1) throw std::invalid_argument("run_lemma_probes: trials must be >= 1");
    if (!(config.gradient_scale > 0.0) || !std::isfinite(config.gradient_scale)) {
        throw std::invalid_argument("run_lemma_probes: gradient_scale must be positive");
    }
    const EstimationProblem& prob = config.problem;
    const int n = prob.n();
    const int trials = config.trials;
    const Eigen::MatrixXd r = covariance(prob).dense();
    const Eigen::MatrixXd c = covariance_equiv(prob).dense();
    const double sigma2 = prob.noise_var;
    const double avg = prob.equal_power();
    std::vector<ProbeResult> out;

    // Weak-norm submultiplicative inequality |AB| <= ||A|| |B|, random
    // symmetric pairs of assorted sizes. Deviation is the relative excess.
    {
        std::mt19937_64 rng(config.seed ^ 0x9e3779b97f4a7c15ull);
        std::uniform_int_distribution<int> size_dist(2, 24);
        double dev = 0.0;
        for (int t = 0; t < trials; ++t) {
            const int m = size_dist(rng);
            const Eigen::MatrixXd a = random_symmetric(m, rng);
            const Eigen::MatrixXd b = random_symmetric(m, rng);
            const double lhs = weak_norm(a * b);
            const double rhs = strong_norm(a) * weak_norm(b);
            dev = std::max(dev, (lhs - rhs) / std::max(rhs, 1e-300));
        }
        out.push_back({"weak-norm-submultiplicative", trials, dev, 1e-12, dev <= 1e-12});
    }

    // |trace(A - B)| / m <= |A - B| for random symmetric pairs.
    {
        std::mt19937_64 rng(config.seed ^ 0xbf58476d1ce4e5b9ull);
        std::uniform_int_distribution<int> size_dist(2, 24);
        double dev = 0.0;
        for (int t = 0; t < trials; ++t) {
            const int m = size_dist(rng);
            const Eigen::MatrixXd a = random_symmetric(m, rng);
            const Eigen::MatrixXd b = random_symmetric(m, rng);
            const double lhs = std::abs((a - b).trace()) / m;
            const double rhs = weak_norm(a - b);
            dev = std::max(dev, (lhs - rhs) / std::max(rhs, 1e-300));
        }
        out.push_back({"trace-weak-bound", trials, dev, 1e-12, dev <= 1e-12});
    }

    // Midpoint strict convexity of both objectives: E((p+q)/2) < (E(p)+E(q))/2
    // for distinct feasible p, q. Deviation is the worst (signed) margin
    // violation, normalized by the objective scale; negative means strict.
    auto midpoint_probe = [&](const Eigen::MatrixXd& cov, const char* name,
                              std::uint64_t salt) {
        std::mt19937_64 rng(config.seed ^ salt);
        double dev = -1.0;
        const double scale = mse_value(cov, Eigen::VectorXd::Constant(n, avg), sigma2);
        for (int t = 0; t < trials; ++t) {
            const Eigen::VectorXd p = random_allocation(prob, rng());
            Eigen::VectorXd q = random_allocation(prob, rng());
            for (int attempt = 0; attempt < 100 && (p - q).cwiseAbs().maxCoeff() < 1e-6 * avg;
                 ++attempt) {
                q = random_allocation(prob, rng());
            }
            const double mid = mse_value(cov, 0.5 * (p + q), sigma2);
            const double chord = 0.5 * (mse_value(cov, p, sigma2) + mse_value(cov, q, sigma2));
            dev = std::max(dev, (mid - chord) / scale);
        }
        out.push_back({name, trials, dev, 0.0, dev < 0.0});
    };
    midpoint_probe(r, "midpoint-convexity-direct", 0x94d049bb133111ebull);
    midpoint_probe(c, "midpoint-convexity-equiv", 0xd6e8feb86659fd93ull);

    // Positive curvature along random zero-sum lines through random feasible
    // points: E(p+hv) - 2E(p) + E(p-hv) > 0. Deviation is -min(second diff).
    {
        std::mt19937_64 rng(config.seed ^ 0xa0761d6478bd642full);
        double worst = std::numeric_limits<double>::infinity();
        const double h = 1e-3 * avg;
        for (int t = 0; t < trials; ++t) {
            const Eigen::VectorXd p = random_allocation(prob, rng());
            const Eigen::VectorXd v = random_direction(n, rng);
            const double up = mse_value(r, p + h * v, sigma2);
            const double mid = mse_value(r, p, sigma2);
            const double dn = mse_value(r, p - h * v, sigma2);
            worst = std::min(worst, up - 2.0 * mid + dn);
        }
        out.push_back({"line-restriction-curvature", trials, -worst, 0.0, worst > 0.0});
    }

    // Cyclic symmetry of the circulant objective (and only that one).
    {
        const CyclicSymmetryResult sym =
            cyclic_symmetry_probe(prob, equal_allocation(prob), trials, config.seed ^ 0xe7037ed1ull);
        out.push_back(
            {"cyclic-symmetry-equiv", trials, sym.max_rel_dev_equiv, 1e-12, sym.passed});
    }

    // Analytic gradient against central finite differences, componentwise
    // relative to the gradient's largest entry. gradient_scale != 1 is the
    // fault-injection hook and must trip this probe.
    {
        std::mt19937_64 rng(config.seed ^ 0x589965cc75374cc3ull);
        double dev = 0.0;
        for (int t = 0; t < trials; ++t) {
            const Eigen::VectorXd p = random_allocation(prob, rng());
            const Eigen::VectorXd g = config.gradient_scale * mse_gradient_value(r, p, sigma2);
            for (int i = 0; i < n; ++i) {
                const double h = 1e-6 * p[i];
                Eigen::VectorXd up = p, dn = p;
                up[i] += h;
                dn[i] -= h;
                const double fd =
                    (mse_value(r, up, sigma2) - mse_value(r, dn, sigma2)) / (2.0 * h);
                dev = std::max(dev, std::abs(g[i] - fd) / std::max(std::abs(fd), 1e-300));
            }
        }
        out.push_back({"gradient-finite-difference", trials, dev, 1e-5, dev <= 1e-5});
    }

    return out;
}

}  // namespace wssopt
