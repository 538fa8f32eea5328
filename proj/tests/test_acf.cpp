#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include <doctest.h>

#include "oracles.hpp"
#include "wssopt/acf.hpp"

using namespace wssopt;

namespace {
constexpr double kPi = std::numbers::pi;
// First zero of J0, to full double precision.
constexpr double kJ0FirstZero = 2.404825557695773;
}  // namespace

TEST_CASE("bessel_j0 matches the integral representation") {
    // Fixed probe points, including zeros and sign changes.
    for (double x : {0.0, 0.5, 1.0, kJ0FirstZero, kPi, 5.0, 2.0 * kPi, 10.0, 25.5, 50.0,
                     100.0 * kPi, 1010.0}) {
        CHECK(std::abs(bessel_j0(x) - oracle::bessel_j0(x)) <= 1e-12);
    }
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> dist(0.0, 40.0);
    for (int t = 0; t < 200; ++t) {
        const double x = dist(rng);
        CHECK(std::abs(bessel_j0(x) - oracle::bessel_j0(x)) <= 1e-12);
    }
}

TEST_CASE("bessel_j0 basics") {
    CHECK(bessel_j0(0.0) == 1.0);
    CHECK(bessel_j0(-3.0) == bessel_j0(3.0));  // even function
    CHECK(std::abs(bessel_j0(kJ0FirstZero)) <= 1e-12);
    CHECK(std::abs(bessel_j0(kPi) - (-0.30424217764409386)) <= 1e-12);
}

TEST_CASE("sinc basics") {
    CHECK(sinc(0.0) == 1.0);
    CHECK(std::abs(sinc(1.0)) <= 1e-15);
    CHECK(std::abs(sinc(2.0)) <= 1e-15);
    CHECK(std::abs(sinc(0.5) - 2.0 / kPi) <= 1e-15);
    CHECK(sinc(-0.3) == sinc(0.3));
}

TEST_CASE("eval_acf per model") {
    SUBCASE("exponential") {
        const AcfModel m = ExponentialAcf{2.0};
        CHECK(eval_acf(m, 0.0) == 1.0);
        CHECK(std::abs(eval_acf(m, 0.5) - std::exp(-1.0)) <= 1e-15);
        CHECK(eval_acf(m, -0.5) == eval_acf(m, 0.5));
    }
    SUBCASE("jakes") {
        const AcfModel m = JakesAcf{10.0};
        CHECK(eval_acf(m, 0.0) == 1.0);
        // tau = 1/(2 fD) gives J0(pi).
        CHECK(std::abs(eval_acf(m, 0.05) - (-0.30424217764409386)) <= 1e-12);
        CHECK(eval_acf(m, -0.013) == eval_acf(m, 0.013));
    }
    SUBCASE("sinc") {
        const AcfModel m = BandlimitedSincAcf{5.0};
        CHECK(eval_acf(m, 0.0) == 1.0);
        // Zero at every multiple of 1/(2W).
        CHECK(std::abs(eval_acf(m, 0.1)) <= 1e-15);
        CHECK(std::abs(eval_acf(m, 0.3)) <= 1e-15);
        CHECK(std::abs(eval_acf(m, 0.05) - 2.0 / kPi) <= 1e-15);
    }
    SUBCASE("tabulated with linear interpolation and zero extension") {
        const AcfModel m = TabulatedAcf{0.5, {1.0, 0.5, 0.25}};
        CHECK(eval_acf(m, 0.0) == 1.0);
        CHECK(eval_acf(m, 0.5) == 0.5);
        CHECK(eval_acf(m, 1.0) == 0.25);
        CHECK(eval_acf(m, 0.25) == doctest::Approx(0.75).epsilon(1e-15));
        CHECK(eval_acf(m, 1.25) == doctest::Approx(0.125).epsilon(1e-15));  // toward zero
        CHECK(eval_acf(m, 1.5) == 0.0);
        CHECK(eval_acf(m, 7.0) == 0.0);
        CHECK(eval_acf(m, -0.5) == 0.5);
    }
    SUBCASE("non-finite tau rejected") {
        const AcfModel m = ExponentialAcf{1.0};
        CHECK_THROWS_AS(eval_acf(m, std::nan("")), std::invalid_argument);
        CHECK_THROWS_AS(eval_acf(m, INFINITY), std::invalid_argument);
    }
}

TEST_CASE("acf magnitude never exceeds the zero-lag value") {
    const AcfModel models[] = {
        AcfModel{ExponentialAcf{0.7}},
        AcfModel{JakesAcf{3.0}},
        AcfModel{BandlimitedSincAcf{2.0}},
        AcfModel{TabulatedAcf{0.25, {2.0, -1.5, 1.0, 0.3}}},
    };
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> dist(-20.0, 20.0);
    for (const AcfModel& m : models) {
        const double r0 = eval_acf(m, 0.0);
        for (int t = 0; t < 1000; ++t) {
            CHECK(std::abs(eval_acf(m, dist(rng))) <= r0 * (1.0 + 1e-12));
        }
    }
}

TEST_CASE("model validation") {
    CHECK_THROWS_AS(eval_acf(ExponentialAcf{0.0}, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(eval_acf(ExponentialAcf{-1.0}, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(eval_acf(JakesAcf{0.0}, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(eval_acf(BandlimitedSincAcf{-2.0}, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(eval_acf(TabulatedAcf{1.0, {}}, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(eval_acf(TabulatedAcf{0.0, {1.0}}, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(eval_acf(TabulatedAcf{1.0, {-1.0}}, 1.0), std::invalid_argument);
    // An interior value larger than the zero-lag one is not a correlation.
    CHECK_THROWS_AS(eval_acf(TabulatedAcf{1.0, {1.0, 1.2}}, 1.0), std::invalid_argument);
}

TEST_CASE("nyquist_rate") {
    SUBCASE("band-limited models ignore coverage") {
        CHECK(nyquist_rate(JakesAcf{100.0}) == 200.0);
        CHECK(nyquist_rate(JakesAcf{100.0}, 0.5) == 200.0);
        CHECK(nyquist_rate(BandlimitedSincAcf{7.5}) == 15.0);
        CHECK(nyquist_rate(TabulatedAcf{0.25, {1.0, 0.5}}) == 4.0);
    }
    SUBCASE("exponential coverage rate, frozen value and quadrature cross-check") {
        const double rate = nyquist_rate(ExponentialAcf{1.0}, 0.99);
        CHECK(rate == doctest::Approx(20.262570034384712).epsilon(1e-14));

        // Fraction of Lorentzian spectral mass inside |f| <= rate/2, by
        // direct numerical integration of 2a/(a^2 + w^2) over w.
        const double a = 1.0;
        const double omega = kPi * rate;
        const double mass = 2.0 * oracle::integrate_simpson(
                                      [a](double w) { return 2.0 * a / (a * a + w * w); }, 0.0,
                                      omega, 200000);
        CHECK(mass / (2.0 * kPi) == doctest::Approx(0.99).epsilon(1e-9));
    }
    SUBCASE("coverage monotonicity for the exponential model") {
        const double r50 = nyquist_rate(ExponentialAcf{2.0}, 0.5);
        const double r90 = nyquist_rate(ExponentialAcf{2.0}, 0.9);
        const double r99 = nyquist_rate(ExponentialAcf{2.0}, 0.99);
        CHECK(r50 < r90);
        CHECK(r90 < r99);
        // Rate scales linearly in the decay parameter.
        CHECK(nyquist_rate(ExponentialAcf{4.0}, 0.9) ==
              doctest::Approx(2.0 * r90).epsilon(1e-14));
    }
    SUBCASE("coverage bounds enforced only where used") {
        CHECK_THROWS_AS(nyquist_rate(ExponentialAcf{1.0}, 0.0), std::invalid_argument);
        CHECK_THROWS_AS(nyquist_rate(ExponentialAcf{1.0}, 1.0), std::invalid_argument);
        CHECK_THROWS_AS(nyquist_rate(ExponentialAcf{1.0}, 1.5), std::invalid_argument);
        CHECK_NOTHROW(nyquist_rate(JakesAcf{1.0}, 1.5));
    }
}

TEST_CASE("acf_sequence samples the model on the grid") {
    const AcfModel m = ExponentialAcf{1.0};
    const Eigen::VectorXd seq = acf_sequence(m, SamplingGrid{0.5, 4});
    REQUIRE(seq.size() == 4);
    for (int k = 0; k < 4; ++k) {
        CHECK(seq[k] == doctest::Approx(std::exp(-0.5 * k)).epsilon(1e-15));
    }
    CHECK_THROWS_AS(acf_sequence(m, SamplingGrid{0.0, 4}), std::invalid_argument);
    CHECK_THROWS_AS(acf_sequence(m, SamplingGrid{0.5, 0}), std::invalid_argument);
}

TEST_CASE("jakes sequence increments vanish at Nyquist sampling") {
    // At rate 2 fD the sampled ACF is J0(pi k); by the J0 asymptotics the
    // squared increments behave like 1/(pi^2 k), so they fall below 1e-8
    // for k of order 1e7. A few spot checks on a geometric ladder; no claim
    // about the sum.
    const double e3 = bessel_j0(kPi * 1e3);
    const double e5 = bessel_j0(kPi * 1e5);
    const double e7 = bessel_j0(kPi * 2e7);
    CHECK(e3 * e3 > e5 * e5);
    CHECK(e5 * e5 > e7 * e7);
    CHECK(e7 * e7 < 1e-8);
}
