// Command-line front end: evaluate, optimize, sweep, and probe the
// power-allocation MSE machinery. Exit codes: 0 success, 1 usage/config/IO,
// 2 numerical failure, 3 probe failure.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "wssopt/equivalence.hpp"
#include "wssopt/errors.hpp"
#include "wssopt/sweep.hpp"

namespace {

using nlohmann::json;

std::string format_double(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

struct CommonFlags {
    std::string config_path;
    std::string acf_kind = "exponential";
    double decay = 1.0;
    double doppler = 1.0;
    double bandwidth = 1.0;
    std::string table_path;
    double coverage = 0.99;
    double sigma2 = 1.0;
    double rho = 1.0;
    double pmax_mult = 10.0;
    double pmax = 0.0;
    double gtol = 1e-9;
    double ftol = 1e-12;
    int max_iters = 5000;
    std::string step_rule = "backtracking";
    double fixed_step = 1e-2;
    std::uint64_t seed = 12345;
    int workers = 1;
    bool timing = false;
    std::string out;
    std::string format = "csv";
};

void add_common(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--config", f.config_path, "JSON config file; explicit flags take precedence");
    cmd->add_option("--acf", f.acf_kind, "ACF model")
        ->check(CLI::IsMember({"exponential", "jakes", "sinc", "tabulated"}));
    cmd->add_option("--decay", f.decay, "exponential ACF decay rate (1/s)");
    cmd->add_option("--doppler", f.doppler, "Jakes ACF Doppler frequency (Hz)");
    cmd->add_option("--bandwidth", f.bandwidth, "sinc ACF one-sided bandwidth (Hz)");
    cmd->add_option("--table", f.table_path,
                    "tabulated ACF file: sample period followed by lag values");
    cmd->add_option("--coverage", f.coverage, "spectral coverage for non-band-limited models");
    cmd->add_option("--sigma2", f.sigma2, "noise variance");
    cmd->add_option("--rho", f.rho, "power budget per sample; total power = rho * n");
    cmd->add_option("--pmax-mult", f.pmax_mult, "peak power as a multiple of rho");
    cmd->add_option("--pmax", f.pmax, "absolute peak power (overrides --pmax-mult)");
    cmd->add_option("--gtol", f.gtol, "optimizer projected-gradient tolerance");
    cmd->add_option("--tol", f.ftol, "optimizer objective-decrease tolerance");
    cmd->add_option("--max-iters", f.max_iters, "optimizer iteration cap");
    cmd->add_option("--step-rule", f.step_rule, "optimizer step rule")
        ->check(CLI::IsMember({"backtracking", "fixed"}));
    cmd->add_option("--fixed-step", f.fixed_step, "step size for --step-rule fixed");
    cmd->add_option("--seed", f.seed, "seed for randomized probes");
    cmd->add_option("--workers", f.workers, "sweep worker threads");
    cmd->add_flag("--timing", f.timing, "record wall-clock ms (breaks byte-stable output)");
    cmd->add_option("--out", f.out, "write results to this file instead of stdout");
    cmd->add_option("--format", f.format, "serialization format for sweep output")
        ->check(CLI::IsMember({"csv", "json"}));
}

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw std::invalid_argument("config file " + path + ": " + e.what());
    }
    return j;
}

wssopt::TabulatedAcf load_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open ACF table file: " + path);
    wssopt::TabulatedAcf t;
    if (!(in >> t.sample_period)) {
        throw std::invalid_argument("ACF table file must start with the sample period");
    }
    double v = 0.0;
    while (in >> v) t.values.push_back(v);
    if (!in.eof()) throw std::invalid_argument("ACF table file has non-numeric content");
    return t;
}

// Config-file values first, then any flag the user actually passed on top.
wssopt::SweepConfig build_config(const CLI::App* cmd, const CommonFlags& f) {
    wssopt::SweepConfig cfg;
    if (!f.config_path.empty()) cfg = wssopt::sweep_config_from_json(load_json_file(f.config_path));

    const bool acf_flag = cmd->count("--acf") > 0;
    if (acf_flag || f.config_path.empty()) {
        if (f.acf_kind == "exponential") {
            cfg.acf = wssopt::ExponentialAcf{f.decay};
        } else if (f.acf_kind == "jakes") {
            cfg.acf = wssopt::JakesAcf{f.doppler};
        } else if (f.acf_kind == "sinc") {
            cfg.acf = wssopt::BandlimitedSincAcf{f.bandwidth};
        } else {
            if (f.table_path.empty()) throw std::invalid_argument("tabulated ACF needs --table");
            cfg.acf = load_table(f.table_path);
        }
    } else {
        // Parameter-only overrides apply to the variant the config selected.
        if (cmd->count("--decay")) {
            std::get<wssopt::ExponentialAcf>(cfg.acf).decay = f.decay;
        }
        if (cmd->count("--doppler")) std::get<wssopt::JakesAcf>(cfg.acf).doppler_hz = f.doppler;
        if (cmd->count("--bandwidth")) {
            std::get<wssopt::BandlimitedSincAcf>(cfg.acf).bandwidth_hz = f.bandwidth;
        }
        if (cmd->count("--table")) cfg.acf = load_table(f.table_path);
    }

    if (cmd->count("--coverage")) cfg.coverage = f.coverage;
    if (cmd->count("--sigma2")) cfg.noise_var = f.sigma2;
    if (cmd->count("--rho")) cfg.power_per_sample = f.rho;
    if (cmd->count("--pmax")) {
        cfg.peak_power = f.pmax;
    } else if (cmd->count("--pmax-mult")) {
        cfg.peak_power_mult = f.pmax_mult;
        cfg.peak_power.reset();
    }
    if (cmd->count("--gtol")) cfg.optimizer.gradient_tol = f.gtol;
    if (cmd->count("--tol")) cfg.optimizer.objective_tol = f.ftol;
    if (cmd->count("--max-iters")) cfg.optimizer.max_iterations = f.max_iters;
    if (cmd->count("--step-rule")) {
        cfg.optimizer.step_rule = f.step_rule == "fixed"
                                      ? wssopt::OptimizerConfig::StepRule::fixed
                                      : wssopt::OptimizerConfig::StepRule::backtracking;
    }
    if (cmd->count("--fixed-step")) cfg.optimizer.fixed_step = f.fixed_step;
    if (cmd->count("--seed")) cfg.seed = f.seed;
    if (cmd->count("--workers")) cfg.workers = f.workers;
    if (cmd->count("--timing")) cfg.timing = f.timing;
    return cfg;
}

void write_output(const std::string& path, const std::string& content) {
    if (path.empty()) {
        std::cout << content;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    out << content;
    if (!out) throw std::runtime_error("failed writing output file: " + path);
}

Eigen::VectorXd load_allocation(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open allocation file: " + path);
    std::vector<double> vals;
    double v = 0.0;
    while (in >> v) vals.push_back(v);
    if (!in.eof()) throw std::invalid_argument("allocation file has non-numeric content");
    Eigen::VectorXd p(static_cast<Eigen::Index>(vals.size()));
    for (std::size_t i = 0; i < vals.size(); ++i) p[static_cast<Eigen::Index>(i)] = vals[i];
    return p;
}

std::vector<int> parse_n_list(const std::string& text) {
    std::vector<int> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        const int n = std::stoi(item, &used);
        if (used != item.size()) throw std::invalid_argument("bad --n-list entry: " + item);
        out.push_back(n);
    }
    if (out.empty()) throw std::invalid_argument("--n-list is empty");
    return out;
}

std::vector<int> parse_n_range(const std::string& text) {
    int lo = 0, hi = 0;
    double factor = 2.0;
    if (std::sscanf(text.c_str(), "%d:%d:%lf", &lo, &hi, &factor) != 3) {
        throw std::invalid_argument("--n-range must look like lo:hi:factor");
    }
    return wssopt::geometric_schedule(lo, hi, factor);
}

json allocation_to_json(const Eigen::VectorXd& p) {
    json arr = json::array();
    for (Eigen::Index i = 0; i < p.size(); ++i) arr.push_back(p[i]);
    return arr;
}

const char* form_name(wssopt::MseForm form) {
    switch (form) {
        case wssopt::MseForm::direct: return "direct";
        case wssopt::MseForm::inverse_sum: return "inverse_sum";
        case wssopt::MseForm::circulant_equiv: return "circulant_equiv";
    }
    return "direct";
}

int cmd_mse(const CLI::App* cmd, const CommonFlags& f, int n, const std::string& alloc_path,
            const std::string& form_flag) {
    const wssopt::SweepConfig cfg = build_config(cmd, f);
    const wssopt::EstimationProblem problem = wssopt::problem_for(cfg, n);
    wssopt::PowerAllocation alloc;
    if (alloc_path.empty()) {
        alloc = wssopt::equal_allocation(problem);
    } else {
        alloc.p = load_allocation(alloc_path);
    }
    wssopt::MseForm form = wssopt::MseForm::direct;
    if (form_flag == "inverse-sum") form = wssopt::MseForm::inverse_sum;
    if (form_flag == "equiv") form = wssopt::MseForm::circulant_equiv;

    const wssopt::MseReport rep = wssopt::mse(problem, alloc, form);
    std::cout << "n = " << n << "\n"
              << "form = " << form_name(rep.which_form) << "\n"
              << "mse = " << format_double(rep.mse) << "\n"
              << "normalized_mse = " << format_double(rep.normalized_mse) << "\n"
              << "per_sample_mse =";
    for (Eigen::Index i = 0; i < rep.per_sample_mse.size(); ++i) {
        std::cout << ' ' << format_double(rep.per_sample_mse[i]);
    }
    std::cout << "\n";
    if (!f.out.empty()) {
        const json j = {{"n", n},
                        {"form", form_name(rep.which_form)},
                        {"mse", rep.mse},
                        {"normalized_mse", rep.normalized_mse},
                        {"per_sample_mse", allocation_to_json(rep.per_sample_mse)},
                        {"allocation", allocation_to_json(alloc.p)}};
        write_output(f.out, j.dump(2) + "\n");
    }
    return 0;
}

int cmd_optimize(const CLI::App* cmd, const CommonFlags& f, int n, const std::string& alloc_path) {
    const wssopt::SweepConfig cfg = build_config(cmd, f);
    const wssopt::EstimationProblem problem = wssopt::problem_for(cfg, n);
    wssopt::OptimizerConfig opt_cfg = cfg.optimizer;
    if (!alloc_path.empty()) opt_cfg.initial_point = load_allocation(alloc_path);

    const double mse_eq = wssopt::mse(problem, wssopt::equal_allocation(problem)).mse;
    const wssopt::OptimizationResult res = wssopt::optimize(problem, opt_cfg);
    const double gap = mse_eq - res.mse;
    std::cout << "n = " << n << "\n"
              << "mse_eq = " << format_double(mse_eq) << "\n"
              << "mse_opt = " << format_double(res.mse) << "\n"
              << "gap = " << format_double(gap) << "\n"
              << "rel_gap = " << format_double(gap / mse_eq) << "\n"
              << "iterations = " << res.iterations << "\n"
              << "converged = " << (res.converged ? "1" : "0") << "\n"
              << "projected_gradient_norm = " << format_double(res.projected_gradient_norm) << "\n"
              << "peak_power = " << format_double(res.peak_power) << "\n"
              << "allocation =";
    for (Eigen::Index i = 0; i < res.allocation.p.size(); ++i) {
        std::cout << ' ' << format_double(res.allocation.p[i]);
    }
    std::cout << "\n";
    if (!f.out.empty()) {
        const json j = {{"n", n},
                        {"mse_eq", mse_eq},
                        {"mse_opt", res.mse},
                        {"gap", gap},
                        {"rel_gap", gap / mse_eq},
                        {"iterations", res.iterations},
                        {"converged", res.converged},
                        {"projected_gradient_norm", res.projected_gradient_norm},
                        {"peak_power", res.peak_power},
                        {"allocation", allocation_to_json(res.allocation.p)}};
        write_output(f.out, j.dump(2) + "\n");
    }
    return 0;
}

int cmd_sweep(const CLI::App* cmd, const CommonFlags& f, const std::string& n_list,
              const std::string& n_range, double crossover_tol) {
    wssopt::SweepConfig cfg = build_config(cmd, f);
    if (!n_list.empty() && !n_range.empty()) {
        throw std::invalid_argument("pass only one of --n-list and --n-range");
    }
    if (!n_list.empty()) cfg.schedule = parse_n_list(n_list);
    if (!n_range.empty()) cfg.schedule = parse_n_range(n_range);
    if (cfg.schedule.empty()) {
        throw std::invalid_argument("sweep needs a schedule (--n-list, --n-range, or config)");
    }

    const std::vector<wssopt::ConvergenceRecord> records = wssopt::run_sweep(cfg);
    if (f.format == "json") {
        write_output(f.out, wssopt::to_json(records).dump(2) + "\n");
    } else {
        write_output(f.out, wssopt::to_csv(records, &std::cerr));
    }
    if (cmd->count("--crossover")) {
        const auto n = wssopt::first_stable_crossover(records, crossover_tol);
        if (n) {
            std::cerr << "crossover: rel_gap <= " << format_double(crossover_tol)
                      << " from n = " << *n << " onward\n";
        } else {
            std::cerr << "crossover: not reached at rel_gap <= " << format_double(crossover_tol)
                      << "\n";
        }
    }
    for (const auto& rec : records) {
        if (rec.status == "ok") return 0;
    }
    return 2;  // every window size failed
}

int cmd_lemmas(const CLI::App* cmd, const CommonFlags& f, int n, int trials, double grad_scale) {
    const wssopt::SweepConfig cfg = build_config(cmd, f);
    wssopt::LemmaProbeConfig probe_cfg;
    probe_cfg.problem = wssopt::problem_for(cfg, n);
    probe_cfg.trials = trials;
    probe_cfg.seed = cfg.seed;
    probe_cfg.gradient_scale = grad_scale;

    const std::vector<wssopt::ProbeResult> probes = wssopt::run_lemma_probes(probe_cfg);
    bool all_passed = true;
    std::printf("%-32s %8s %14s %12s %s\n", "probe", "trials", "deviation", "threshold", "status");
    for (const auto& p : probes) {
        std::printf("%-32s %8d %14.6g %12g %s\n", p.name.c_str(), p.trials, p.deviation,
                    p.threshold, p.passed ? "PASS" : "FAIL");
        all_passed = all_passed && p.passed;
    }
    if (!f.out.empty()) {
        json arr = json::array();
        for (const auto& p : probes) {
            arr.push_back({{"name", p.name},
                           {"trials", p.trials},
                           {"deviation", p.deviation},
                           {"threshold", p.threshold},
                           {"passed", p.passed}});
        }
        write_output(f.out, arr.dump(2) + "\n");
    }
    return all_passed ? 0 : 3;
}

template <typename Fn>
int guarded(Fn&& fn) {
    try {
        return fn();
    } catch (const wssopt::NumericalError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Wiener-filter MSE and power allocation for sampled WSS processes"};
    app.require_subcommand(1);

    CommonFlags f;
    int n = 8;
    int trials = 100;
    double grad_scale = 1.0;
    double crossover_tol = 1e-6;
    std::string alloc_path, form_flag = "direct", n_list, n_range;

    CLI::App* c_mse = app.add_subcommand("mse", "Evaluate the estimation MSE of an allocation");
    add_common(c_mse, f);
    c_mse->add_option("--n", n, "window size");
    c_mse->add_option("--alloc", alloc_path, "allocation file (whitespace-separated powers)");
    c_mse->add_option("--form", form_flag, "evaluation route")
        ->check(CLI::IsMember({"direct", "inverse-sum", "equiv"}));

    CLI::App* c_opt = app.add_subcommand("optimize", "Optimize the power allocation");
    add_common(c_opt, f);
    c_opt->add_option("--n", n, "window size");
    c_opt->add_option("--alloc", alloc_path, "starting allocation file (defaults to equal)");

    CLI::App* c_sweep = app.add_subcommand("sweep", "Optimality gap across window sizes");
    add_common(c_sweep, f);
    c_sweep->add_option("--n-list", n_list, "comma-separated window sizes");
    c_sweep->add_option("--n-range", n_range, "geometric schedule lo:hi:factor");
    c_sweep->add_option("--crossover", crossover_tol,
                        "report the first stable rel_gap crossover at this tolerance");

    CLI::App* c_lem = app.add_subcommand("lemmas", "Randomized structural probes");
    add_common(c_lem, f);
    c_lem->add_option("--n", n, "window size for the probe problems");
    c_lem->add_option("--trials", trials, "trials per probe");
    c_lem->add_option("--grad-scale", grad_scale,
                      "fault-injection: scale the analytic gradient before checking");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    if (c_mse->parsed()) return guarded([&] { return cmd_mse(c_mse, f, n, alloc_path, form_flag); });
    if (c_opt->parsed()) return guarded([&] { return cmd_optimize(c_opt, f, n, alloc_path); });
    if (c_sweep->parsed()) {
        return guarded([&] { return cmd_sweep(c_sweep, f, n_list, n_range, crossover_tol); });
    }
    return guarded([&] { return cmd_lemmas(c_lem, f, n, trials, grad_scale); });
}
