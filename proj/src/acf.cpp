#include "wssopt/acf.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace wssopt {

namespace {

constexpr double kPi = std::numbers::pi;

void require(bool ok, const char* message) {
    if (!ok) throw std::invalid_argument(message);
}

bool finite(double x) { return std::isfinite(x); }

}  // namespace

double bessel_j0(double x) {
    // J0 is even; std::cyl_bessel_j wants a non-negative argument.
    return std::cyl_bessel_j(0.0, std::abs(x));
}

double sinc(double x) {
    if (x == 0.0) return 1.0;
    const double px = kPi * x;
    return std::sin(px) / px;
}

void validate(const AcfModel& model) {
    std::visit(
        [](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, ExponentialAcf>) {
                require(finite(m.decay) && m.decay > 0.0, "exponential acf: decay must be positive");
            } else if constexpr (std::is_same_v<T, JakesAcf>) {
                require(finite(m.doppler_hz) && m.doppler_hz > 0.0,
                        "jakes acf: doppler_hz must be positive");
            } else if constexpr (std::is_same_v<T, BandlimitedSincAcf>) {
                require(finite(m.bandwidth_hz) && m.bandwidth_hz > 0.0,
                        "sinc acf: bandwidth_hz must be positive");
            } else {
                require(finite(m.sample_period) && m.sample_period > 0.0,
                        "tabulated acf: sample_period must be positive");
                require(!m.values.empty(), "tabulated acf: values must be non-empty");
                require(finite(m.values[0]) && m.values[0] > 0.0,
                        "tabulated acf: values[0] must be positive");
                for (double v : m.values) {
                    require(finite(v), "tabulated acf: values must be finite");
                    require(std::abs(v) <= m.values[0],
                            "tabulated acf: |values[k]| must not exceed values[0]");
                }
            }
        },
        model);
}

void validate(const SamplingGrid& grid) {
    require(finite(grid.sample_period) && grid.sample_period > 0.0,
            "sampling grid: sample_period must be positive");
    require(grid.count >= 1, "sampling grid: count must be >= 1");
}

double eval_acf(const AcfModel& model, double tau_seconds) {
    validate(model);
    require(finite(tau_seconds), "eval_acf: tau must be finite");
    const double at = std::abs(tau_seconds);
    return std::visit(
        [at](const auto& m) -> double {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, ExponentialAcf>) {
                return std::exp(-m.decay * at);
            } else if constexpr (std::is_same_v<T, JakesAcf>) {
                return bessel_j0(2.0 * kPi * m.doppler_hz * at);
            } else if constexpr (std::is_same_v<T, BandlimitedSincAcf>) {
                return sinc(2.0 * m.bandwidth_hz * at);
            } else {
                const double pos = at / m.sample_period;
                const auto lo = static_cast<std::size_t>(std::floor(pos));
                const double frac = pos - std::floor(pos);
                const std::size_t size = m.values.size();
                const double a = lo < size ? m.values[lo] : 0.0;
                const double b = lo + 1 < size ? m.values[lo + 1] : 0.0;
                return a + frac * (b - a);
            }
        },
        model);
}

double nyquist_rate(const AcfModel& model, double coverage) {
    validate(model);
    return std::visit(
        [coverage](const auto& m) -> double {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, ExponentialAcf>) {
                // The Lorentzian spectrum 2a/(a^2 + w^2) holds the fraction
                // (2/pi) atan(pi * rate / a) of its mass in |f| <= rate/2;
                // invert that for the requested coverage.
                require(finite(coverage) && coverage > 0.0 && coverage < 1.0,
                        "nyquist_rate: coverage must lie in (0, 1) for a non-band-limited model");
                return m.decay * std::tan(coverage * kPi / 2.0) / kPi;
            } else if constexpr (std::is_same_v<T, JakesAcf>) {
                return 2.0 * m.doppler_hz;
            } else if constexpr (std::is_same_v<T, BandlimitedSincAcf>) {
                return 2.0 * m.bandwidth_hz;
            } else {
                return 1.0 / m.sample_period;
            }
        },
        model);
}

Eigen::VectorXd acf_sequence(const AcfModel& model, const SamplingGrid& grid) {
    validate(model);
    validate(grid);
    Eigen::VectorXd seq(grid.count);
    for (int k = 0; k < grid.count; ++k) {
        seq[k] = eval_acf(model, static_cast<double>(k) * grid.sample_period);
    }
    return seq;
}

}  // namespace wssopt
