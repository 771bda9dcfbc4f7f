#include "doctest.h"

#include <cmath>

#include "hullwalk/errors.hpp"
#include "hullwalk/experiment.hpp"
#include "hullwalk/lemma_checks.hpp"

using namespace hullwalk;

namespace {

ExperimentConfig small_hull_cfg() {
    ExperimentConfig cfg;
    cfg.experiment = "hull-test";
    cfg.n = 2;
    cfg.horizon_exp = 2.0;
    cfg.depth = 3;
    cfg.trials = 200;
    cfg.seed = 7;
    return cfg;
}

}  // namespace

TEST_CASE("config validation") {
    ExperimentConfig cfg = small_hull_cfg();
    cfg.trials = 0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = small_hull_cfg();
    cfg.n = 1;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = small_hull_cfg();
    cfg.horizon_exp = 0.0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = small_hull_cfg();
    cfg.overrides["bogus"] = 1.0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = small_hull_cfg();
    cfg.preset = "weird";
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("wilson interval contains the estimate and stays in [0,1]") {
    for (long s : {0L, 1L, 5L, 50L, 99L, 100L}) {
        const auto [lo, hi] = wilson_interval(s, 100);
        const double p = s / 100.0;
        CHECK(lo >= 0.0);
        CHECK(hi <= 1.0);
        CHECK(lo <= p);
        CHECK(p <= hi);
    }
}

TEST_CASE("hull-test: determinism, coherence, thread invariance") {
    const ExperimentConfig cfg = small_hull_cfg();
    const SweepRow row1 = run_hull_test(cfg);
    const SweepRow row2 = run_hull_test(cfg);
    CHECK(rows_to_csv({row1}) == rows_to_csv({row2}));

    ExperimentConfig threaded = cfg;
    threaded.threads = 4;
    const SweepRow row4 = run_hull_test(threaded);
    CHECK(rows_to_csv({row1}) == rows_to_csv({row4}));

    // Estimator coherence: p_hat is the mean of the per-trial indicators.
    long contains = 0;
    for (const auto& r : row1.reports) {
        if (r.outcome == Outcome::ContainsOrigin) ++contains;
    }
    CHECK(row1.p_hat == static_cast<double>(contains) / cfg.trials);
    CHECK(row1.ci_hi - row1.ci_lo < 0.2);
    CHECK(row1.p_hat >= row1.ci_lo);
    CHECK(row1.p_hat <= row1.ci_hi);
}

TEST_CASE("hull-test at n=2 actually mixes outcomes") {
    ExperimentConfig cfg = small_hull_cfg();
    cfg.trials = 400;
    cfg.depth = 5;
    const SweepRow row = run_hull_test(cfg);
    CHECK(row.p_hat > 0.0);
    CHECK(row.p_hat < 1.0);
}

TEST_CASE("common random numbers make containment monotone in the horizon") {
    ExperimentConfig cfg = small_hull_cfg();
    cfg.trials = 300;
    std::vector<SweepRow> rows;
    for (double h : {1.0, 2.0, 3.0}) {
        cfg.horizon_exp = h;
        rows.push_back(run_hull_test(cfg));
    }
    for (int trial = 0; trial < cfg.trials; ++trial) {
        int prev = 0;
        for (const auto& row : rows) {
            const int ind =
                row.reports[trial].outcome == Outcome::ContainsOrigin ? 1 : 0;
            CHECK(ind >= prev);
            prev = ind;
        }
    }
    CHECK(rows[0].p_hat <= rows[1].p_hat);
    CHECK(rows[1].p_hat <= rows[2].p_hat);
}

TEST_CASE("csv and json encodings are value equivalent") {
    const SweepRow row = run_hull_test(small_hull_cfg());
    const std::string csv = rows_to_csv({row});
    const auto json = rows_to_json({row});

    // Parse the CSV data line.
    const auto nl = csv.find('\n');
    std::string line = csv.substr(nl + 1);
    if (!line.empty() && line.back() == '\n') line.pop_back();
    std::vector<std::string> cells;
    std::size_t pos = 0;
    while (pos <= line.size()) {
        const auto comma = line.find(',', pos);
        if (comma == std::string::npos) {
            cells.push_back(line.substr(pos));
            break;
        }
        cells.push_back(line.substr(pos, comma - pos));
        pos = comma + 1;
    }
    REQUIRE(cells.size() == 11);
    const auto& obj = json[0];
    CHECK(cells[0] == obj["experiment"]);
    CHECK(std::stoi(cells[1]) == obj["n"].get<int>());
    CHECK(std::stod(cells[2]) == obj["horizon_exp"].get<double>());
    CHECK(std::stoi(cells[3]) == obj["depth"].get<int>());
    CHECK(std::stod(cells[4]) == obj["alpha"].get<double>());
    CHECK(std::stol(cells[5]) == obj["trials"].get<long>());
    CHECK(std::stoull(cells[6]) == obj["seed"].get<std::uint64_t>());
    CHECK(std::stod(cells[7]) == obj["p_hat"].get<double>());
    CHECK(std::stod(cells[8]) == obj["ci_lo"].get<double>());
    CHECK(std::stod(cells[9]) == obj["ci_hi"].get<double>());
    CHECK(std::stod(cells[10]) == obj["mean_margin"].get<double>());
}

TEST_CASE("poisson experiment") {
    ExperimentConfig cfg;
    cfg.experiment = "poisson";
    cfg.n = 2;
    cfg.alpha = 50.0;
    cfg.trials = 300;
    cfg.seed = 11;

    const SweepRow row = run_poisson(cfg);
    const double mean_count = row.diagnostics["mean_point_count"].get<double>();
    CHECK(std::abs(mean_count - cfg.alpha) <= 3.0 * std::sqrt(cfg.alpha / cfg.trials));
    CHECK(row.p_hat >= 0.0);
    CHECK(row.p_hat <= 1.0);

    SUBCASE("vanishing intensity leaves every trial empty and avoiding") {
        cfg.alpha = 1e-6;
        const SweepRow empty_row = run_poisson(cfg);
        CHECK(empty_row.p_hat == 0.0);
        for (const auto& r : empty_row.reports) {
            CHECK(r.outcome == Outcome::AvoidsOrigin);
        }
    }

    SUBCASE("containment rises with intensity (within CI slack)") {
        ExperimentConfig lo = cfg, hi = cfg;
        lo.alpha = 10.0;
        hi.alpha = 1000.0;
        const SweepRow row_lo = run_poisson(lo);
        const SweepRow row_hi = run_poisson(hi);
        CHECK(row_hi.p_hat >= row_lo.p_hat - (row_lo.ci_hi - row_lo.ci_lo));
    }
}

TEST_CASE("separator run produces coherent rows and zero cross-check failures") {
    ExperimentConfig cfg;
    cfg.experiment = "separator-run";
    cfg.n = 64;
    cfg.depth = 2;
    cfg.trials = 20;
    cfg.seed = 3;
    cfg.overrides["N"] = 3;
    cfg.overrides["Mprime"] = 1;
    cfg.overrides["C_h"] = 0.001;
    cfg.overrides["c_J"] = 0.3;

    // Any separator/hull disagreement throws InternalError, so completing
    // normally is the zero-disagreement assertion.
    const SweepRow row = run_separator(cfg);
    long successes = 0;
    for (const auto& r : row.reports) {
        if (r.outcome == Outcome::SeparatorSuccess) {
            ++successes;
            CHECK(r.margin > 0.0);
        }
    }
    CHECK(row.p_hat == static_cast<double>(successes) / cfg.trials);
    CHECK(certificate_violation_count() == 0);

    const SweepRow replay = run_separator(cfg);
    CHECK(rows_to_csv({row}) == rows_to_csv({replay}));
}

TEST_CASE("lemma checks: all pass at 1e4 trials, schema is fixed") {
    const auto rows = run_lemma_checks(10000, 2026);
    CHECK(rows.size() >= 8);
    for (const auto& r : rows) {
        CAPTURE(r.check);
        CHECK(r.pass);
        CHECK(r.trials >= 1);
    }
    const std::string csv = lemma_rows_to_csv(rows);
    CHECK(csv.rfind("check,trials,statistic,bound,pass\n", 0) == 0);
    const auto json = lemma_rows_to_json(rows);
    CHECK(json.size() == rows.size());
    for (const auto& obj : json) {
        CHECK(obj.contains("check"));
        CHECK(obj.contains("trials"));
        CHECK(obj.contains("statistic"));
        CHECK(obj.contains("bound"));
        CHECK(obj.contains("pass"));
    }
}

TEST_CASE("corrupting the bridge variance makes the bridge check fail") {
    LemmaCheckOptions options;
    options.bridge_variance_scale = 2.0;
    const auto rows = run_lemma_checks(5000, 2026, options);
    bool bridge_failed = false;
    for (const auto& r : rows) {
        if (r.check == "bridge_variance") bridge_failed = !r.pass;
    }
    CHECK(bridge_failed);
}
