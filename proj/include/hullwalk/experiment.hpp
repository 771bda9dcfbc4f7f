#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hullwalk/hull.hpp"
#include "hullwalk/schedule.hpp"
#include "hullwalk/separator.hpp"

#include "json.hpp"

namespace hullwalk {

enum class Outcome { ContainsOrigin, AvoidsOrigin, Ambiguous, SeparatorSuccess, SeparatorFail };

const char* outcome_name(Outcome o);

struct TrialReport {
    std::uint64_t stream_id = 0;
    Outcome outcome = Outcome::AvoidsOrigin;
    double margin = 0.0;
    double wall_ms = 0.0;  // diagnostic only; never part of canonical output

    nlohmann::ordered_json to_json() const;
};

struct ExperimentConfig {
    std::string experiment = "hull-test";  // hull-test | poisson | separator-run
    int n = 2;
    double horizon_exp = 2.0;  // T = 2^horizon_exp; grid spans ceil(horizon_exp) blocks
    int depth = 4;             // grid refinement level (separator-run: the step count M)
    double alpha = 100.0;      // Poisson intensity
    int trials = 1000;
    std::uint64_t seed = 1;
    std::string preset = "desk";
    std::map<std::string, double> overrides;  // --set KEY=VAL
    int threads = 1;

    void validate() const;  // throws ConfigError
    int grid_blocks() const { return std::max(1, static_cast<int>(std::ceil(horizon_exp))); }
    ScheduleConfig schedule_config() const;
};

/// One aggregated parameter point. The canonical serialized fields are the
/// fixed CSV schema; everything else is diagnostics.
struct SweepRow {
    std::string experiment;
    int n = 0;
    double horizon_exp = 0.0;
    int depth = 0;
    double alpha = 0.0;
    int trials = 0;
    std::uint64_t seed = 0;
    double p_hat = 0.0;
    double ci_lo = 0.0;
    double ci_hi = 0.0;
    double mean_margin = 0.0;

    std::vector<TrialReport> reports;    // per-trial records, index = stream_id
    nlohmann::ordered_json diagnostics;  // experiment-specific extras (stderr only)
};

/// 95% Wilson score interval for successes/trials.
std::pair<double, double> wilson_interval(long successes, long trials);

/// Containment frequency of the origin in the hull of the path sampled on
/// block_grid(ceil(horizon_exp), depth). Trial i always uses stream_id i, so
/// runs with the same seed share paths across horizon values (common random
/// numbers); larger horizons see supersets of the same grid points.
SweepRow run_hull_test(const ExperimentConfig& cfg);

/// Containment frequency for points BM(t_i) at Poisson(alpha) arrival times
/// in (0, 1]; an empty arrival set counts as AvoidsOrigin.
SweepRow run_poisson(const ExperimentConfig& cfg);

/// Success rate of the separating-vector construction. A trial is a success
/// only when the deterministic grid verification and the continuum
/// certificate both pass; every success is cross-checked against the hull
/// oracle (verdict must be Outside) and any disagreement aborts the run.
SweepRow run_separator(const ExperimentConfig& cfg);

std::string rows_to_csv(const std::vector<SweepRow>& rows);
nlohmann::ordered_json rows_to_json(const std::vector<SweepRow>& rows);

/// Canonical number formatting shared by the CSV and JSON writers.
std::string canonical_number(double v);

}  // namespace hullwalk
