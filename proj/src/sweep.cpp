#include "wssopt/sweep.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <thread>

#include "wssopt/errors.hpp"

namespace wssopt {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

std::string format_double(double x) {
    // Round-trip precision: the same double always prints the same bytes.
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

}  // namespace

void validate(const SweepConfig& config) {
    validate(config.acf);
    validate(config.optimizer);
    if (!(config.noise_var > 0.0) || !std::isfinite(config.noise_var)) {
        throw std::invalid_argument("sweep: noise_var must be positive");
    }
    if (!(config.power_per_sample > 0.0) || !std::isfinite(config.power_per_sample)) {
        throw std::invalid_argument("sweep: power_per_sample must be positive");
    }
    if (config.peak_power) {
        if (!(*config.peak_power > 0.0) || !std::isfinite(*config.peak_power)) {
            throw std::invalid_argument("sweep: peak_power must be positive");
        }
    } else if (!(config.peak_power_mult > 0.0) || !std::isfinite(config.peak_power_mult)) {
        throw std::invalid_argument("sweep: peak_power_mult must be positive");
    }
    if (config.schedule.empty()) throw std::invalid_argument("sweep: empty schedule");
    for (std::size_t i = 0; i < config.schedule.size(); ++i) {
        if (config.schedule[i] < 1) throw std::invalid_argument("sweep: schedule entries must be >= 1");
        if (i > 0 && config.schedule[i] <= config.schedule[i - 1]) {
            throw std::invalid_argument("sweep: schedule must be strictly increasing");
        }
    }
    if (config.workers < 1) throw std::invalid_argument("sweep: workers must be >= 1");
    // Coverage bounds are enforced by nyquist_rate where they apply.
}

EstimationProblem problem_for(const SweepConfig& config, int n) {
    const double rate = nyquist_rate(config.acf, config.coverage);
    EstimationProblem problem;
    problem.acf = config.acf;
    problem.grid = SamplingGrid{1.0 / rate, n};
    problem.noise_var = config.noise_var;
    problem.total_power = config.power_per_sample * n;
    problem.peak_power =
        config.peak_power ? *config.peak_power : config.peak_power_mult * config.power_per_sample;
    return problem;
}

namespace {

ConvergenceRecord run_one(const SweepConfig& config, int n) {
    ConvergenceRecord rec;
    rec.n = n;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        const EstimationProblem problem = problem_for(config, n);
        const PowerAllocation eq = equal_allocation(problem);
        const Eigen::MatrixXd r = covariance(problem).dense();
        rec.mse_eq = mse_value(r, eq.p, problem.noise_var);
        const OptimizationResult opt = optimize(problem, config.optimizer);
        rec.mse_opt = opt.mse;
        rec.gap = rec.mse_eq - rec.mse_opt;
        rec.rel_gap = rec.gap / rec.mse_eq;
        rec.iterations = opt.iterations;
        rec.converged = opt.converged;
        const Eigen::MatrixXd c = covariance_equiv(problem).dense();
        rec.mse_equiv_eq = mse_value(c, eq.p, problem.noise_var);
        rec.weak_gap = weak_norm(c - r);
    } catch (const std::exception& e) {
        rec.mse_eq = rec.mse_opt = rec.gap = rec.rel_gap = kNan;
        rec.mse_equiv_eq = rec.weak_gap = kNan;
        rec.iterations = 0;
        rec.converged = false;
        rec.status = e.what();
    }
    if (config.timing) {
        rec.ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                     .count();
    }
    return rec;
}

}  // namespace

std::vector<ConvergenceRecord> run_sweep(const SweepConfig& config) {
    validate(config);
    std::vector<ConvergenceRecord> records(config.schedule.size());
    const int workers =
        std::min<int>(config.workers, static_cast<int>(config.schedule.size()));
    if (workers <= 1) {
        for (std::size_t i = 0; i < config.schedule.size(); ++i) {
            records[i] = run_one(config, config.schedule[i]);
        }
        return records;
    }
    std::atomic<std::size_t> next{0};
    auto drain = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= config.schedule.size()) return;
            records[i] = run_one(config, config.schedule[i]);
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers - 1);
    for (int w = 1; w < workers; ++w) pool.emplace_back(drain);
    drain();
    for (auto& t : pool) t.join();
    return records;
}

std::string to_csv(const std::vector<ConvergenceRecord>& records, std::ostream* warnings) {
    std::string out = "n,mse_eq,mse_opt,gap,rel_gap,mse_equiv_eq,weak_gap,iters,converged,ms\n";
    for (const ConvergenceRecord& rec : records) {
        if (rec.status != "ok") {
            if (warnings) {
                *warnings << "warning: skipping n=" << rec.n << ": " << rec.status << "\n";
            }
            continue;
        }
        out += std::to_string(rec.n);
        for (double v : {rec.mse_eq, rec.mse_opt, rec.gap, rec.rel_gap, rec.mse_equiv_eq,
                         rec.weak_gap}) {
            out += ',';
            out += format_double(v);
        }
        out += ',';
        out += std::to_string(rec.iterations);
        out += rec.converged ? ",1," : ",0,";
        out += format_double(rec.ms);
        out += '\n';
    }
    return out;
}

nlohmann::json to_json(const std::vector<ConvergenceRecord>& records) {
    nlohmann::json arr = nlohmann::json::array();
    const auto num = [](double v) {
        return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
    };
    for (const ConvergenceRecord& rec : records) {
        // NaNs from failed rows become real nulls.
        arr.push_back({{"n", rec.n},
                       {"mse_eq", num(rec.mse_eq)},
                       {"mse_opt", num(rec.mse_opt)},
                       {"gap", num(rec.gap)},
                       {"rel_gap", num(rec.rel_gap)},
                       {"mse_equiv_eq", num(rec.mse_equiv_eq)},
                       {"weak_gap", num(rec.weak_gap)},
                       {"iters", rec.iterations},
                       {"converged", rec.converged},
                       {"ms", num(rec.ms)},
                       {"status", rec.status}});
    }
    return arr;
}

std::optional<int> first_stable_crossover(const std::vector<ConvergenceRecord>& records,
                                          double rel_tol) {
    if (!(rel_tol > 0.0) || !std::isfinite(rel_tol)) {
        throw std::invalid_argument("first_stable_crossover: rel_tol must be positive");
    }
    std::optional<int> candidate;
    for (const ConvergenceRecord& rec : records) {
        if (rec.status != "ok") continue;
        if (rec.rel_gap <= rel_tol) {
            if (!candidate) candidate = rec.n;
        } else {
            candidate.reset();
        }
    }
    return candidate;
}

std::vector<int> geometric_schedule(int lo, int hi, double factor) {
    if (lo < 1 || hi < lo) throw std::invalid_argument("geometric_schedule: need 1 <= lo <= hi");
    if (!(factor > 1.0) || !std::isfinite(factor)) {
        throw std::invalid_argument("geometric_schedule: factor must exceed 1");
    }
    std::vector<int> out;
    double x = lo;
    int n = lo;
    while (n <= hi) {
        out.push_back(n);
        x *= factor;
        n = std::max(n + 1, static_cast<int>(std::llround(x)));
    }
    return out;
}

namespace {

[[noreturn]] void bad_config(const std::string& message) {
    throw std::invalid_argument("sweep config: " + message);
}

void check_keys(const nlohmann::json& j, std::initializer_list<const char*> allowed,
                const char* where) {
    for (const auto& item : j.items()) {
        bool ok = false;
        for (const char* key : allowed) {
            if (item.key() == key) {
                ok = true;
                break;
            }
        }
        if (!ok) bad_config(std::string("unknown key \"") + item.key() + "\" in " + where);
    }
}

double number_at(const nlohmann::json& j, const char* key, double fallback) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_number()) bad_config(std::string(key) + " must be a number");
    return j[key].get<double>();
}

AcfModel acf_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("kind")) bad_config("acf requires a \"kind\"");
    const std::string kind = j["kind"].get<std::string>();
    if (kind == "exponential") {
        check_keys(j, {"kind", "decay"}, "acf");
        return ExponentialAcf{number_at(j, "decay", 1.0)};
    }
    if (kind == "jakes") {
        check_keys(j, {"kind", "doppler_hz"}, "acf");
        return JakesAcf{number_at(j, "doppler_hz", 1.0)};
    }
    if (kind == "sinc") {
        check_keys(j, {"kind", "bandwidth_hz"}, "acf");
        return BandlimitedSincAcf{number_at(j, "bandwidth_hz", 1.0)};
    }
    if (kind == "tabulated") {
        check_keys(j, {"kind", "sample_period", "values"}, "acf");
        TabulatedAcf t;
        t.sample_period = number_at(j, "sample_period", 1.0);
        if (!j.contains("values") || !j["values"].is_array()) {
            bad_config("tabulated acf requires a \"values\" array");
        }
        for (const auto& v : j["values"]) {
            if (!v.is_number()) bad_config("tabulated acf values must be numbers");
            t.values.push_back(v.get<double>());
        }
        return t;
    }
    bad_config("unknown acf kind \"" + kind + "\"");
}

std::vector<int> schedule_from_json(const nlohmann::json& j) {
    if (j.is_array()) {
        std::vector<int> out;
        for (const auto& v : j) {
            if (!v.is_number_integer()) bad_config("schedule entries must be integers");
            out.push_back(v.get<int>());
        }
        return out;
    }
    if (j.is_object()) {
        check_keys(j, {"lo", "hi", "factor"}, "schedule");
        if (!j.contains("lo") || !j.contains("hi")) bad_config("schedule range needs lo and hi");
        return geometric_schedule(j["lo"].get<int>(), j["hi"].get<int>(),
                                  number_at(j, "factor", 2.0));
    }
    bad_config("schedule must be an array or a {lo, hi, factor} object");
}

OptimizerConfig optimizer_from_json(const nlohmann::json& j, OptimizerConfig base) {
    check_keys(j, {"max_iterations", "gradient_tol", "objective_tol", "step_rule", "fixed_step"},
               "optimizer");
    if (j.contains("max_iterations")) base.max_iterations = j["max_iterations"].get<int>();
    base.gradient_tol = number_at(j, "gradient_tol", base.gradient_tol);
    base.objective_tol = number_at(j, "objective_tol", base.objective_tol);
    base.fixed_step = number_at(j, "fixed_step", base.fixed_step);
    if (j.contains("step_rule")) {
        const std::string rule = j["step_rule"].get<std::string>();
        if (rule == "backtracking") {
            base.step_rule = OptimizerConfig::StepRule::backtracking;
        } else if (rule == "fixed") {
            base.step_rule = OptimizerConfig::StepRule::fixed;
        } else {
            bad_config("unknown step_rule \"" + rule + "\"");
        }
    }
    return base;
}

}  // namespace

SweepConfig sweep_config_from_json(const nlohmann::json& j) {
    if (!j.is_object()) bad_config("top level must be an object");
    check_keys(j,
               {"acf", "coverage", "noise_var", "power_per_sample", "peak_power_mult",
                "peak_power", "schedule", "optimizer", "seed", "workers", "timing"},
               "top level");
    SweepConfig config;
    if (j.contains("acf")) config.acf = acf_from_json(j["acf"]);
    config.coverage = number_at(j, "coverage", config.coverage);
    config.noise_var = number_at(j, "noise_var", config.noise_var);
    config.power_per_sample = number_at(j, "power_per_sample", config.power_per_sample);
    config.peak_power_mult = number_at(j, "peak_power_mult", config.peak_power_mult);
    if (j.contains("peak_power")) config.peak_power = number_at(j, "peak_power", 0.0);
    if (j.contains("schedule")) config.schedule = schedule_from_json(j["schedule"]);
    if (j.contains("optimizer")) {
        config.optimizer = optimizer_from_json(j["optimizer"], config.optimizer);
    }
    if (j.contains("seed")) config.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("workers")) config.workers = j["workers"].get<int>();
    if (j.contains("timing")) {
        if (!j["timing"].is_boolean()) bad_config("timing must be a boolean");
        config.timing = j["timing"].get<bool>();
    }
    return config;
}

}  // namespace wssopt
