// Independent reference implementations the tests compare the library
// against. Everything here is deliberately written by a different route than
// the code under test: quadrature instead of special-function calls, finite
// differences instead of the analytic gradient, exhaustive grid search
// instead of descent, moving-average constructions for guaranteed-SPD
// Toeplitz inputs.
#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Core>

namespace oracle {

// 16-point Gauss-Legendre abscissae/weights on [-1, 1] (positive half).
inline constexpr double kGlNodes[8] = {
    0.0950125098376374, 0.2816035507792589, 0.4580167776572274, 0.6178762444026438,
    0.7554044083550030, 0.8656312023878318, 0.9445750230732326, 0.9894009349916499,
};
inline constexpr double kGlWeights[8] = {
    0.1894506104550685, 0.1826034150449236, 0.1691565193950025, 0.1495959888165767,
    0.1246289712555339, 0.0951585116824928, 0.0622535239386479, 0.0271524594117541,
};

/// J0 by its integral representation J0(x) = (1/pi) \int_0^pi cos(x sin t) dt,
/// composite 16-point Gauss-Legendre with panel count scaled to the
/// oscillation. Good to ~1e-15 absolute for |x| up to several thousand.
inline double bessel_j0(double x) {
    x = std::abs(x);
    const int panels = std::max(8, static_cast<int>(std::ceil(x)));
    const double h = std::numbers::pi / panels;
    double total = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double mid = (p + 0.5) * h;
        const double half = 0.5 * h;
        for (int k = 0; k < 8; ++k) {
            total += kGlWeights[k] * half *
                     (std::cos(x * std::sin(mid + half * kGlNodes[k])) +
                      std::cos(x * std::sin(mid - half * kGlNodes[k])));
        }
    }
    return total / std::numbers::pi;
}

/// Composite Simpson on [a, b].
inline double integrate_simpson(const std::function<double(double)>& f, double a, double b,
                                int panels) {
    const double h = (b - a) / (2 * panels);
    double total = f(a) + f(b);
    for (int i = 1; i < 2 * panels; ++i) total += f(a + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
    return total * h / 3.0;
}

/// Central finite difference of a scalar function of a vector, coordinate i.
inline double central_diff(const std::function<double(const Eigen::VectorXd&)>& f,
                           const Eigen::VectorXd& x, int i, double h) {
    Eigen::VectorXd up = x, dn = x;
    up[i] += h;
    dn[i] -= h;
    return (f(up) - f(dn)) / (2.0 * h);
}

/// Autocorrelation sequence of a random moving-average vector plus a ridge:
/// positive-semidefinite by construction, strictly positive-definite after
/// the ridge, and normalized to r[0] = 1.
inline Eigen::VectorXd random_spd_toeplitz_seq(int n, std::mt19937_64& rng, double ridge = 0.05) {
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    const int m = 2 * n + 4;
    std::vector<double> b(m);
    for (double& v : b) v = dist(rng);
    Eigen::VectorXd r = Eigen::VectorXd::Zero(n);
    for (int k = 0; k < n; ++k) {
        for (int j = 0; j + k < m; ++j) r[k] += b[j] * b[j + k];
    }
    r[0] += ridge * std::abs(r[0]) + ridge;
    return r / r[0];
}

inline Eigen::VectorXd random_spd_toeplitz_seq(int n, std::uint64_t seed, double ridge = 0.05) {
    std::mt19937_64 rng(seed);
    return random_spd_toeplitz_seq(n, rng, ridge);
}

inline Eigen::MatrixXd random_symmetric(int n, std::mt19937_64& rng) {
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

inline Eigen::MatrixXd random_symmetric(int n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    return random_symmetric(n, rng);
}

struct GridSearchResult {
    Eigen::Vector3d p;
    double value;
};

/// Exhaustive search over the 3-point simplex {p >= lo, p <= hi, sum = total}
/// at the given resolution. Slow and simple on purpose.
inline GridSearchResult grid_search_3(const std::function<double(const Eigen::Vector3d&)>& f,
                                      double total, double lo, double hi, double resolution) {
    GridSearchResult best{Eigen::Vector3d::Constant(total / 3.0),
                          f(Eigen::Vector3d::Constant(total / 3.0))};
    for (double a = lo; a <= hi; a += resolution) {
        for (double b = lo; b <= hi; b += resolution) {
            const double c = total - a - b;
            if (c < lo || c > hi) continue;
            const Eigen::Vector3d p(a, b, c);
            const double v = f(p);
            if (v < best.value) best = {p, v};
        }
    }
    return best;
}

}  // namespace oracle
