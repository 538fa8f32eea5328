#pragma once

#include <variant>
#include <vector>

#include <Eigen/Core>

namespace wssopt {

// Autocorrelation models for a real, zero-mean, wide-sense-stationary process.
// All models are normalized so that R(tau) is even in tau and |R(tau)| <= R(0).

/// R(tau) = exp(-decay * |tau|). Not band-limited; its spectrum has Lorentzian tails.
struct ExponentialAcf {
    double decay = 1.0;  // 1/seconds, > 0
};

/// R(tau) = J0(2*pi*doppler_hz*tau). Band-limited to |f| <= doppler_hz.
struct JakesAcf {
    double doppler_hz = 1.0;  // Hz, > 0
};

/// R(tau) = sinc(2*bandwidth_hz*tau) with sinc(x) = sin(pi x)/(pi x).
/// Band-limited to |f| <= bandwidth_hz with a flat spectrum.
struct BandlimitedSincAcf {
    double bandwidth_hz = 1.0;  // Hz, > 0
};

/// Measured correlation values on a uniform lag grid 0, T, 2T, ...
/// Evaluation interpolates linearly between grid points and is zero beyond
/// the last tabulated lag (the table is treated as zero-extended).
struct TabulatedAcf {
    double sample_period = 1.0;  // seconds between tabulated lags, > 0
    std::vector<double> values;  // values[k] = R(k * sample_period); values[0] > 0
};

using AcfModel = std::variant<ExponentialAcf, JakesAcf, BandlimitedSincAcf, TabulatedAcf>;

/// Uniform observation grid t_k = k * sample_period, k = 0..count-1.
struct SamplingGrid {
    double sample_period = 1.0;  // seconds, > 0
    int count = 1;               // number of samples, >= 1
};

/// Bessel function of the first kind, order zero. Even in x.
double bessel_j0(double x);

/// Normalized sinc: sinc(0) = 1, sinc(x) = sin(pi x)/(pi x).
double sinc(double x);

/// Throws std::invalid_argument when a model's parameters are out of range
/// (non-positive decay/doppler/bandwidth/period, empty or non-normalizable table).
void validate(const AcfModel& model);

/// Throws std::invalid_argument on non-positive period or count < 1.
void validate(const SamplingGrid& grid);

/// Evaluates R(tau). tau may be negative (R is even); must be finite.
double eval_acf(const AcfModel& model, double tau_seconds);

/// Sampling rate (Hz) at which the model's spectrum is adequately covered.
///
/// Band-limited models return exactly twice their one-sided bandwidth and
/// ignore `coverage`; a tabulated model returns the reciprocal of its lag
/// spacing. The exponential model is not band-limited, so the rate is chosen
/// to place the requested fraction of spectral mass inside the sampled band:
///     rate = decay * tan(coverage * pi / 2) / pi,  coverage in (0, 1).
double nyquist_rate(const AcfModel& model, double coverage = 0.99);

/// R evaluated at lags 0, T, ..., (count-1)*T for the given grid.
Eigen::VectorXd acf_sequence(const AcfModel& model, const SamplingGrid& grid);

}  // namespace wssopt
