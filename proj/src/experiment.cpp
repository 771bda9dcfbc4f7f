#include "hullwalk/experiment.hpp"

#include <atomic>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <mutex>
#include <sstream>
#include <thread>

#include "hullwalk/errors.hpp"

namespace hullwalk {

namespace {

constexpr std::uint64_t kPathLane = 1;
constexpr std::uint64_t kClockLane = 2;

double elapsed_ms(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
        .count();
}

/// Runs f(trial) for every trial index on the requested number of threads.
/// Each trial writes only its own slot, so scheduling order cannot matter.
template <typename F>
void for_each_trial(int trials, int threads, F&& f) {
    if (threads <= 1) {
        for (int i = 0; i < trials; ++i) f(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (;;) {
            const int i = next.fetch_add(1);
            if (i >= trials) return;
            try {
                f(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

SweepRow make_row(const ExperimentConfig& cfg) {
    SweepRow row;
    row.experiment = cfg.experiment;
    row.n = cfg.n;
    row.horizon_exp = cfg.horizon_exp;
    row.depth = cfg.depth;
    row.alpha = cfg.experiment == "poisson" ? cfg.alpha : 0.0;
    row.trials = cfg.trials;
    row.seed = cfg.seed;
    row.reports.resize(static_cast<std::size_t>(cfg.trials));
    return row;
}

void aggregate_membership(SweepRow& row) {
    long contains = 0, avoids = 0, ambiguous = 0;
    double margin_sum = 0.0;
    for (const auto& r : row.reports) {
        switch (r.outcome) {
            case Outcome::ContainsOrigin:
                ++contains;
                break;
            case Outcome::AvoidsOrigin:
                ++avoids;
                margin_sum += r.margin;
                break;
            case Outcome::Ambiguous:
                ++ambiguous;
                break;
            default:
                break;
        }
    }
    row.p_hat = static_cast<double>(contains) / static_cast<double>(row.trials);
    std::tie(row.ci_lo, row.ci_hi) = wilson_interval(contains, row.trials);
    row.mean_margin = margin_sum / static_cast<double>(row.trials);
    row.diagnostics["contains"] = contains;
    row.diagnostics["avoids"] = avoids;
    row.diagnostics["ambiguous"] = ambiguous;
}

double override_or(const ExperimentConfig& cfg, const std::string& key, double fallback) {
    auto it = cfg.overrides.find(key);
    return it == cfg.overrides.end() ? fallback : it->second;
}

}  // namespace

const char* outcome_name(Outcome o) {
    switch (o) {
        case Outcome::ContainsOrigin:
            return "ContainsOrigin";
        case Outcome::AvoidsOrigin:
            return "AvoidsOrigin";
        case Outcome::Ambiguous:
            return "Ambiguous";
        case Outcome::SeparatorSuccess:
            return "SeparatorSuccess";
        case Outcome::SeparatorFail:
            return "SeparatorFail";
    }
    return "?";
}

nlohmann::ordered_json TrialReport::to_json() const {
    return nlohmann::ordered_json{
        {"stream_id", stream_id}, {"outcome", outcome_name(outcome)}, {"margin", margin}};
}

void ExperimentConfig::validate() const {
    if (trials < 1) throw ConfigError("config: trials must be >= 1");
    if (n < 2) throw ConfigError("config: n must be >= 2");
    if (depth < 0) throw ConfigError("config: depth must be >= 0");
    if (!(horizon_exp > 0.0)) throw ConfigError("config: horizon-exp must be > 0");
    if (experiment == "poisson" && !(alpha > 0.0)) throw ConfigError("config: alpha must be > 0");
    if (threads < 1) throw ConfigError("config: threads must be >= 1");
    if (preset != "desk" && preset != "paper") {
        throw ConfigError("config: preset must be 'desk' or 'paper'");
    }
    static const std::vector<std::string> known = {"c",  "C_h", "c_J",       "c_L",
                                                   "N",  "M",   "Mprime",    "tol",
                                                   "eps", "max_depth"};
    for (const auto& [key, _] : overrides) {
        if (std::find(known.begin(), known.end(), key) == known.end()) {
            throw ConfigError("config: unknown --set key '" + key + "'");
        }
    }
}

ScheduleConfig ExperimentConfig::schedule_config() const {
    ScheduleConfig sc;
    sc.n = n;
    sc.preset = preset;
    sc.c = override_or(*this, "c", sc.c);
    sc.C_h = override_or(*this, "C_h", sc.C_h);
    sc.c_J = override_or(*this, "c_J", sc.c_J);
    sc.c_L = override_or(*this, "c_L", sc.c_L);
    if (overrides.count("N")) sc.N = static_cast<int>(overrides.at("N"));
    if (overrides.count("M")) sc.M = static_cast<int>(overrides.at("M"));
    if (overrides.count("Mprime")) sc.Mprime = static_cast<int>(overrides.at("Mprime"));
    return sc;
}

std::pair<double, double> wilson_interval(long successes, long trials) {
    const double z = 1.959963984540054;  // 97.5% normal quantile
    const double nt = static_cast<double>(trials);
    const double p = static_cast<double>(successes) / nt;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / nt;
    const double center = (p + z2 / (2.0 * nt)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / nt + z2 / (4.0 * nt * nt)) / denom;
    // The score interval brackets p mathematically; keep it that way under
    // floating point at the 0 and 1 boundaries.
    return {std::clamp(center - half, 0.0, p), std::clamp(center + half, p, 1.0)};
}

SweepRow run_hull_test(const ExperimentConfig& cfg) {
    cfg.validate();
    SweepRow row = make_row(cfg);
    const std::vector<TimeKey> grid = block_grid(cfg.grid_blocks(), cfg.depth);

    for_each_trial(cfg.trials, cfg.threads, [&](int trial) {
        const auto start = std::chrono::steady_clock::now();
        RngStream stream(cfg.seed, static_cast<std::uint64_t>(trial));
        RngStream path_rng = stream.substream(kPathLane);
        DyadicPath path = DyadicPath::init(cfg.n, grid, path_rng);
        std::vector<Eigen::VectorXd> points;
        points.reserve(grid.size());
        for (const auto& key : grid) points.push_back(path.value(key));
        const double tol = override_or(cfg, "tol", default_hull_tol(points));
        const Membership membership = origin_membership(points, tol);
        TrialReport& report = row.reports[static_cast<std::size_t>(trial)];
        report.stream_id = static_cast<std::uint64_t>(trial);
        switch (membership.kind) {
            case Membership::Kind::Inside:
                report.outcome = Outcome::ContainsOrigin;
                break;
            case Membership::Kind::Outside:
                report.outcome = Outcome::AvoidsOrigin;
                report.margin = membership.certificate->margin;
                break;
            case Membership::Kind::Ambiguous:
                report.outcome = Outcome::Ambiguous;
                break;
        }
        report.wall_ms = elapsed_ms(start);
    });

    aggregate_membership(row);
    return row;
}

SweepRow run_poisson(const ExperimentConfig& cfg) {
    cfg.validate();
    SweepRow row = make_row(cfg);
    std::atomic<long> total_points{0};

    for_each_trial(cfg.trials, cfg.threads, [&](int trial) {
        const auto start = std::chrono::steady_clock::now();
        RngStream stream(cfg.seed, static_cast<std::uint64_t>(trial));
        RngStream clock_rng = stream.substream(kClockLane);
        const std::vector<TimeKey> times = poisson_times(cfg.alpha, clock_rng);
        total_points.fetch_add(static_cast<long>(times.size()));

        TrialReport& report = row.reports[static_cast<std::size_t>(trial)];
        report.stream_id = static_cast<std::uint64_t>(trial);
        if (times.empty()) {
            report.outcome = Outcome::AvoidsOrigin;
            report.wall_ms = elapsed_ms(start);
            return;
        }
        RngStream path_rng = stream.substream(kPathLane);
        DyadicPath path = DyadicPath::init(cfg.n, times, path_rng);
        std::vector<Eigen::VectorXd> points;
        points.reserve(times.size());
        for (const auto& key : times) points.push_back(path.value(key));
        const double tol = override_or(cfg, "tol", default_hull_tol(points));
        const Membership membership = origin_membership(points, tol);
        switch (membership.kind) {
            case Membership::Kind::Inside:
                report.outcome = Outcome::ContainsOrigin;
                break;
            case Membership::Kind::Outside:
                report.outcome = Outcome::AvoidsOrigin;
                report.margin = membership.certificate->margin;
                break;
            case Membership::Kind::Ambiguous:
                report.outcome = Outcome::Ambiguous;
                break;
        }
        report.wall_ms = elapsed_ms(start);
    });

    aggregate_membership(row);
    row.diagnostics["mean_point_count"] =
        static_cast<double>(total_points.load()) / static_cast<double>(cfg.trials);
    return row;
}

SweepRow run_separator(const ExperimentConfig& cfg) {
    cfg.validate();
    ScheduleConfig sc = cfg.schedule_config();
    if (!sc.M) sc.M = cfg.depth;  // --depth sets the step count unless overridden
    const Schedule schedule = Schedule::make(sc);
    SweepRow row = make_row(cfg);
    row.horizon_exp = static_cast<double>(schedule.N);
    row.depth = schedule.M;

    const std::vector<TimeKey> grid = block_grid(schedule.N, schedule.M);
    const double eps = override_or(cfg, "eps", 1.0 / cfg.n);
    const int max_depth = static_cast<int>(override_or(cfg, "max_depth", 40));
    std::atomic<long> fallbacks{0};
    std::atomic<long> cont_refinements{0};

    for_each_trial(cfg.trials, cfg.threads, [&](int trial) {
        const auto start = std::chrono::steady_clock::now();
        RngStream stream(cfg.seed, static_cast<std::uint64_t>(trial));
        DyadicPath path = DyadicPath::init(cfg.n, grid, stream.substream(kPathLane));
        const SeparatorResult result = run_construction(path, schedule);
        fallbacks.fetch_add(result.fallback_count);

        bool success = result.success;
        if (success) {
            const ContinuumOutcome cont =
                certify_continuum(path, result.u_final, result.grid, eps, max_depth);
            cont_refinements.fetch_add(cont.refinements);
            success = cont.certified;
        }
        if (success) {
            // Independent oracle: a verified separating direction means the
            // origin must lie outside the hull of the grid values.
            std::vector<Eigen::VectorXd> points;
            points.reserve(result.grid.size());
            for (const auto& key : result.grid) points.push_back(path.value(key));
            const Membership membership =
                origin_membership(points, default_hull_tol(points));
            if (membership.kind != Membership::Kind::Outside) {
                throw InternalError(
                    "separator/hull cross-check disagreement: verified certificate but hull "
                    "verdict is not Outside (trial " +
                    std::to_string(trial) + ")");
            }
        }

        TrialReport& report = row.reports[static_cast<std::size_t>(trial)];
        report.stream_id = static_cast<std::uint64_t>(trial);
        report.outcome = success ? Outcome::SeparatorSuccess : Outcome::SeparatorFail;
        report.margin = result.margin;
        report.wall_ms = elapsed_ms(start);
    });

    long successes = 0;
    double margin_sum = 0.0;
    for (const auto& r : row.reports) {
        if (r.outcome == Outcome::SeparatorSuccess) {
            ++successes;
            margin_sum += r.margin;
        }
    }
    row.p_hat = static_cast<double>(successes) / static_cast<double>(row.trials);
    std::tie(row.ci_lo, row.ci_hi) = wilson_interval(successes, row.trials);
    row.mean_margin = successes > 0 ? margin_sum / static_cast<double>(successes) : 0.0;
    row.diagnostics["successes"] = successes;
    row.diagnostics["fallback_substeps"] = fallbacks.load();
    row.diagnostics["continuum_refinements"] = cont_refinements.load();
    row.diagnostics["constants"] = schedule.constants_json();
    return row;
}

std::string canonical_number(double v) { return nlohmann::json(v).dump(); }

std::string rows_to_csv(const std::vector<SweepRow>& rows) {
    std::ostringstream os;
    os << "experiment,n,horizon_exp,depth,alpha,trials,seed,p_hat,ci_lo,ci_hi,mean_margin\n";
    for (const auto& r : rows) {
        os << r.experiment << ',' << r.n << ',' << canonical_number(r.horizon_exp) << ','
           << r.depth << ',' << canonical_number(r.alpha) << ',' << r.trials << ',' << r.seed
           << ',' << canonical_number(r.p_hat) << ',' << canonical_number(r.ci_lo) << ','
           << canonical_number(r.ci_hi) << ',' << canonical_number(r.mean_margin) << '\n';
    }
    return os.str();
}

nlohmann::ordered_json rows_to_json(const std::vector<SweepRow>& rows) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& r : rows) {
        arr.push_back(nlohmann::ordered_json{{"experiment", r.experiment},
                                             {"n", r.n},
                                             {"horizon_exp", r.horizon_exp},
                                             {"depth", r.depth},
                                             {"alpha", r.alpha},
                                             {"trials", r.trials},
                                             {"seed", r.seed},
                                             {"p_hat", r.p_hat},
                                             {"ci_lo", r.ci_lo},
                                             {"ci_hi", r.ci_hi},
                                             {"mean_margin", r.mean_margin}});
    }
    return arr;
}

}  // namespace hullwalk
