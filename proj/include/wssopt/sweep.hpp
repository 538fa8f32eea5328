#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "wssopt/optimizer.hpp"

namespace wssopt {

/// A family of estimation problems indexed by window size n, with total power
/// scaled as P_T(n) = power_per_sample * n and the sample period taken from
/// nyquist_rate(acf, coverage).
struct SweepConfig {
    AcfModel acf = ExponentialAcf{1.0};
    double coverage = 0.99;
    double noise_var = 1.0;
    double power_per_sample = 1.0;
    double peak_power_mult = 10.0;        // P_max = mult * power_per_sample...
    std::optional<double> peak_power;     // ...unless overridden absolutely
    std::vector<int> schedule;            // strictly increasing window sizes
    OptimizerConfig optimizer;
    std::uint64_t seed = 12345;           // consumed by randomized probes only
    int workers = 1;
    /// Record wall-clock milliseconds per row. Off by default so that equal
    /// configurations produce byte-identical serialized output.
    bool timing = false;
};

void validate(const SweepConfig& config);

/// The problem the sweep solves at window size n.
EstimationProblem problem_for(const SweepConfig& config, int n);

/// One row of a sweep. On failure `status` carries the reason and the
/// numeric fields except n are NaN (serialized as null / skipped).
struct ConvergenceRecord {
    int n = 0;
    double mse_eq = 0.0;        // equal allocation
    double mse_opt = 0.0;       // optimized allocation
    double gap = 0.0;           // mse_eq - mse_opt
    double rel_gap = 0.0;       // gap / mse_eq
    double mse_equiv_eq = 0.0;  // circulant objective at the equal allocation
    double weak_gap = 0.0;      // |C - R| in the weak norm
    int iterations = 0;
    bool converged = false;
    double ms = 0.0;            // wall-clock; 0 unless SweepConfig::timing
    std::string status = "ok";
};

/// Runs the schedule (optionally on `workers` threads; the result order and
/// values do not depend on the worker count). A failing window size records
/// its error in `status` and the sweep continues.
std::vector<ConvergenceRecord> run_sweep(const SweepConfig& config);

/// CSV with the fixed header
///   n,mse_eq,mse_opt,gap,rel_gap,mse_equiv_eq,weak_gap,iters,converged,ms
/// Rows are ascending in n; doubles are serialized with round-trip precision,
/// so equal inputs give byte-identical output. Failed rows are skipped, with
/// one warning line per skip written to `warnings` when provided.
std::string to_csv(const std::vector<ConvergenceRecord>& records,
                   std::ostream* warnings = nullptr);

/// JSON array mirroring the CSV fields plus `status`; failed rows keep their
/// place with null numeric fields.
nlohmann::json to_json(const std::vector<ConvergenceRecord>& records);

/// Smallest scheduled n whose rel_gap, and every later one's, is <= rel_tol.
/// Failed rows are ignored. nullopt when no such n exists.
std::optional<int> first_stable_crossover(const std::vector<ConvergenceRecord>& records,
                                          double rel_tol);

/// {lo, round(lo*factor), ...} clipped to hi, strictly increasing integers.
std::vector<int> geometric_schedule(int lo, int hi, double factor);

/// Parses a SweepConfig from JSON. Schema (all fields optional except acf.kind
/// when acf is present):
///   acf: {kind: exponential|jakes|sinc|tabulated, decay|doppler_hz|
///         bandwidth_hz|sample_period+values},
///   coverage, noise_var, power_per_sample, peak_power_mult, peak_power,
///   schedule: [n, ...] or {lo, hi, factor},
///   optimizer: {max_iterations, gradient_tol, objective_tol, step_rule, fixed_step},
///   seed, workers, timing.
/// Unknown keys are rejected. Throws std::invalid_argument on bad input.
SweepConfig sweep_config_from_json(const nlohmann::json& j);

}  // namespace wssopt
