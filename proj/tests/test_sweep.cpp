#include <cmath>
#include <sstream>
#include <vector>

#include <doctest.h>
#include <json.hpp>

#include "wssopt/sweep.hpp"

using namespace wssopt;
using nlohmann::json;

namespace {

ConvergenceRecord ok_record(int n, double rel_gap) {
    ConvergenceRecord rec;
    rec.n = n;
    rec.mse_eq = 1.0;
    rec.mse_opt = 1.0 - rel_gap;
    rec.gap = rel_gap;
    rec.rel_gap = rel_gap;
    rec.mse_equiv_eq = 1.0;
    rec.weak_gap = 0.1;
    rec.iterations = 3;
    rec.converged = true;
    return rec;
}

ConvergenceRecord failed_record(int n) {
    ConvergenceRecord rec;
    rec.n = n;
    rec.mse_eq = rec.mse_opt = rec.gap = rec.rel_gap = std::nan("");
    rec.mse_equiv_eq = rec.weak_gap = std::nan("");
    rec.status = "boom";
    return rec;
}

}  // namespace

TEST_CASE("geometric_schedule") {
    CHECK(geometric_schedule(16, 1024, 2.0) ==
          std::vector<int>{16, 32, 64, 128, 256, 512, 1024});
    // Small factors still advance by at least one.
    CHECK(geometric_schedule(1, 5, 1.5) == std::vector<int>{1, 2, 3, 4, 5});
    CHECK(geometric_schedule(7, 7, 3.0) == std::vector<int>{7});
    CHECK_THROWS_AS(geometric_schedule(0, 8, 2.0), std::invalid_argument);
    CHECK_THROWS_AS(geometric_schedule(8, 4, 2.0), std::invalid_argument);
    CHECK_THROWS_AS(geometric_schedule(1, 8, 1.0), std::invalid_argument);
}

TEST_CASE("problem_for wires the config through") {
    SweepConfig config;  // exponential, coverage 0.99
    const EstimationProblem prob = problem_for(config, 12);
    CHECK(prob.n() == 12);
    CHECK(prob.grid.sample_period == doctest::Approx(0.04935208111819196).epsilon(1e-14));
    CHECK(prob.total_power == 12.0);
    CHECK(prob.peak_power == 10.0);
    CHECK(prob.noise_var == 1.0);

    config.peak_power = 3.3;  // absolute override wins over the multiplier
    CHECK(problem_for(config, 12).peak_power == 3.3);

    config.peak_power.reset();
    config.power_per_sample = 2.0;
    config.peak_power_mult = 4.0;
    const EstimationProblem scaled = problem_for(config, 5);
    CHECK(scaled.total_power == 10.0);
    CHECK(scaled.peak_power == 8.0);
}

TEST_CASE("run_sweep: healthy schedule") {
    SweepConfig config;
    config.schedule = {1, 2, 4};
    const std::vector<ConvergenceRecord> records = run_sweep(config);
    REQUIRE(records.size() == 3);
    for (std::size_t i = 0; i < records.size(); ++i) {
        const ConvergenceRecord& rec = records[i];
        CHECK(rec.n == config.schedule[i]);
        CHECK(rec.status == "ok");
        CHECK(rec.converged);
        CHECK(rec.mse_eq > 0.0);
        CHECK(rec.gap >= -1e-12);
        CHECK(rec.rel_gap == doctest::Approx(rec.gap / rec.mse_eq).epsilon(1e-15));
        CHECK(rec.mse_equiv_eq > 0.0);
        CHECK(rec.weak_gap >= 0.0);
        CHECK(rec.ms == 0.0);  // timing off by default
        if (i > 0) CHECK(rec.mse_eq < records[i - 1].mse_eq);
    }
    CHECK(records[0].mse_eq == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("run_sweep: worker count changes nothing") {
    SweepConfig config;
    config.schedule = {2, 3, 5, 8, 13};
    const std::vector<ConvergenceRecord> serial = run_sweep(config);
    config.workers = 3;
    const std::vector<ConvergenceRecord> parallel = run_sweep(config);
    REQUIRE(serial.size() == parallel.size());
    for (std::size_t i = 0; i < serial.size(); ++i) {
        CHECK(serial[i].n == parallel[i].n);
        CHECK(serial[i].mse_eq == parallel[i].mse_eq);  // bitwise
        CHECK(serial[i].mse_opt == parallel[i].mse_opt);
        CHECK(serial[i].gap == parallel[i].gap);
        CHECK(serial[i].mse_equiv_eq == parallel[i].mse_equiv_eq);
        CHECK(serial[i].weak_gap == parallel[i].weak_gap);
        CHECK(serial[i].iterations == parallel[i].iterations);
        CHECK(serial[i].status == parallel[i].status);
    }
}

TEST_CASE("run_sweep: timing opt-in") {
    SweepConfig config;
    config.schedule = {4};
    config.timing = true;
    const std::vector<ConvergenceRecord> records = run_sweep(config);
    CHECK(records[0].ms > 0.0);
}

TEST_CASE("run_sweep: a failing window size does not sink the schedule") {
    SweepConfig config;
    // Valid correlation table whose length-3 Toeplitz window is indefinite;
    // the length-2 window is fine.
    config.acf = TabulatedAcf{1.0, {1.0, -0.72, -0.1}};
    config.schedule = {2, 3};
    const std::vector<ConvergenceRecord> records = run_sweep(config);
    REQUIRE(records.size() == 2);
    CHECK(records[0].status == "ok");
    CHECK(records[0].mse_eq > 0.0);
    CHECK(records[1].status != "ok");
    CHECK(std::isnan(records[1].mse_eq));
    CHECK(std::isnan(records[1].rel_gap));

    std::ostringstream warnings;
    const std::string csv = to_csv(records, &warnings);
    CHECK(csv.find("\n2,") != std::string::npos);
    CHECK(csv.find("\n3,") == std::string::npos);  // failed row skipped
    CHECK(warnings.str().find("warning: skipping n=3") != std::string::npos);

    const json arr = to_json(records);
    REQUIRE(arr.size() == 2);
    CHECK(arr[0]["status"] == "ok");
    CHECK(arr[1]["mse_eq"].is_null());  // NaN serializes as null
    CHECK(arr[1]["status"] != "ok");
    CHECK(arr[1]["n"] == 3);
}

TEST_CASE("to_csv: golden row") {
    ConvergenceRecord rec;
    rec.n = 4;
    rec.mse_eq = 0.5;
    rec.mse_opt = 0.25;
    rec.gap = 0.25;
    rec.rel_gap = 0.5;
    rec.mse_equiv_eq = 0.4375;
    rec.weak_gap = 0.125;
    rec.iterations = 7;
    rec.converged = true;
    CHECK(to_csv({rec}) ==
          "n,mse_eq,mse_opt,gap,rel_gap,mse_equiv_eq,weak_gap,iters,converged,ms\n"
          "4,0.5,0.25,0.25,0.5,0.4375,0.125,7,1,0\n");
    rec.converged = false;
    CHECK(to_csv({rec}).find(",7,0,0\n") != std::string::npos);
}

TEST_CASE("to_csv: byte-identical across repeated runs") {
    SweepConfig config;
    config.schedule = {2, 5, 9};
    const std::string a = to_csv(run_sweep(config));
    const std::string b = to_csv(run_sweep(config));
    CHECK(a == b);
    CHECK(a.rfind("n,mse_eq,", 0) == 0);
}

TEST_CASE("first_stable_crossover") {
    SUBCASE("last violation resets the candidate") {
        const std::vector<ConvergenceRecord> recs = {
            ok_record(1, 0.5), ok_record(2, 1e-7), ok_record(3, 2e-3), ok_record(4, 1e-7),
            ok_record(5, 1e-8)};
        CHECK(first_stable_crossover(recs, 1e-6) == 4);
    }
    SUBCASE("no crossover") {
        const std::vector<ConvergenceRecord> recs = {ok_record(1, 0.5), ok_record(2, 0.1)};
        CHECK_FALSE(first_stable_crossover(recs, 1e-6).has_value());
    }
    SUBCASE("failed rows are ignored, not treated as violations") {
        const std::vector<ConvergenceRecord> recs = {ok_record(2, 1e-7), failed_record(3),
                                                     ok_record(4, 1e-7)};
        CHECK(first_stable_crossover(recs, 1e-6) == 2);
    }
    SUBCASE("empty input") {
        CHECK_FALSE(first_stable_crossover({}, 1e-6).has_value());
    }
    SUBCASE("bad tolerance") {
        CHECK_THROWS_AS(first_stable_crossover({}, 0.0), std::invalid_argument);
    }
}

TEST_CASE("sweep_config_from_json") {
    SUBCASE("full round trip") {
        const json j = json::parse(R"({
            "acf": {"kind": "jakes", "doppler_hz": 30.0},
            "coverage": 0.9,
            "noise_var": 2.0,
            "power_per_sample": 1.5,
            "peak_power": 4.5,
            "schedule": [2, 4, 8],
            "optimizer": {"max_iterations": 700, "gradient_tol": 1e-8,
                          "step_rule": "fixed", "fixed_step": 0.05},
            "seed": 99,
            "workers": 2,
            "timing": true
        })");
        const SweepConfig config = sweep_config_from_json(j);
        CHECK(std::get<JakesAcf>(config.acf).doppler_hz == 30.0);
        CHECK(config.coverage == 0.9);
        CHECK(config.noise_var == 2.0);
        CHECK(config.power_per_sample == 1.5);
        REQUIRE(config.peak_power.has_value());
        CHECK(*config.peak_power == 4.5);
        CHECK(config.schedule == std::vector<int>{2, 4, 8});
        CHECK(config.optimizer.max_iterations == 700);
        CHECK(config.optimizer.gradient_tol == 1e-8);
        CHECK(config.optimizer.step_rule == OptimizerConfig::StepRule::fixed);
        CHECK(config.optimizer.fixed_step == 0.05);
        CHECK(config.seed == 99);
        CHECK(config.workers == 2);
        CHECK(config.timing);
        CHECK_NOTHROW(validate(config));
    }
    SUBCASE("defaults survive an empty object") {
        const SweepConfig config = sweep_config_from_json(json::object());
        CHECK(config.coverage == 0.99);
        CHECK(config.workers == 1);
        CHECK_FALSE(config.peak_power.has_value());
        CHECK(config.schedule.empty());
    }
    SUBCASE("schedule as a geometric range") {
        const json j = json::parse(R"({"schedule": {"lo": 1, "hi": 5, "factor": 1.5}})");
        CHECK(sweep_config_from_json(j).schedule == std::vector<int>{1, 2, 3, 4, 5});
    }
    SUBCASE("tabulated acf") {
        const json j = json::parse(
            R"({"acf": {"kind": "tabulated", "sample_period": 0.5, "values": [1.0, 0.4]}})");
        const auto t = std::get<TabulatedAcf>(sweep_config_from_json(j).acf);
        CHECK(t.sample_period == 0.5);
        CHECK(t.values == std::vector<double>{1.0, 0.4});
    }
    SUBCASE("rejections") {
        CHECK_THROWS_AS(sweep_config_from_json(json::parse(R"({"typo_key": 1})")),
                        std::invalid_argument);
        CHECK_THROWS_AS(sweep_config_from_json(json::parse(R"({"acf": {"kind": "weird"}})")),
                        std::invalid_argument);
        CHECK_THROWS_AS(
            sweep_config_from_json(json::parse(R"({"acf": {"kind": "jakes", "decay": 1}})")),
            std::invalid_argument);
        CHECK_THROWS_AS(sweep_config_from_json(json::parse(R"({"schedule": [2.5]})")),
                        std::invalid_argument);
        CHECK_THROWS_AS(sweep_config_from_json(json::parse(R"({"schedule": 7})")),
                        std::invalid_argument);
        CHECK_THROWS_AS(sweep_config_from_json(json::parse(R"({"timing": "yes"})")),
                        std::invalid_argument);
        CHECK_THROWS_AS(sweep_config_from_json(json::parse("[1, 2]")),
                        std::invalid_argument);
    }
}

TEST_CASE("sweep config validation") {
    SweepConfig config;
    config.schedule = {4, 8};
    CHECK_NOTHROW(validate(config));

    SweepConfig bad = config;
    bad.schedule = {};
    CHECK_THROWS_AS(validate(bad), std::invalid_argument);
    bad = config;
    bad.schedule = {8, 8};
    CHECK_THROWS_AS(validate(bad), std::invalid_argument);
    bad = config;
    bad.schedule = {8, 4};
    CHECK_THROWS_AS(validate(bad), std::invalid_argument);
    bad = config;
    bad.workers = 0;
    CHECK_THROWS_AS(validate(bad), std::invalid_argument);
    bad = config;
    bad.power_per_sample = 0.0;
    CHECK_THROWS_AS(validate(bad), std::invalid_argument);
    bad = config;
    bad.peak_power = -1.0;
    CHECK_THROWS_AS(validate(bad), std::invalid_argument);
    bad = config;
    bad.optimizer.max_iterations = 0;
    CHECK_THROWS_AS(validate(bad), std::invalid_argument);
}
