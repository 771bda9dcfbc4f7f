// hullwalk: Monte Carlo experiments on the convex hull of high-dimensional
// Brownian motion, with an exact membership oracle and a constructive
// separating-direction algorithm.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "hullwalk/errors.hpp"
#include "hullwalk/experiment.hpp"
#include "hullwalk/lemma_checks.hpp"

namespace {

using hullwalk::ExperimentConfig;
using hullwalk::SweepRow;

struct CliOptions {
    ExperimentConfig cfg;
    std::string output = "csv";  // csv | json
    std::string out_path;        // empty -> stdout
    std::string dump_path_file;
    std::string dump_certificate_file;
    std::string sweep_param = "horizon-exp";
    std::vector<double> sweep_values;
    std::string sweep_experiment = "hull-test";
};

int threads_from_env() {
    if (const char* env = std::getenv("HULLWALK_THREADS")) {
        const int v = std::atoi(env);
        if (v >= 1) return v;
    }
    return 1;
}

void add_common_flags(CLI::App* cmd, CliOptions& opts, std::vector<std::string>& sets) {
    cmd->add_option("--n", opts.cfg.n, "Ambient dimension");
    cmd->add_option("--horizon-exp", opts.cfg.horizon_exp, "Time horizon T = 2^x");
    cmd->add_option("--depth", opts.cfg.depth, "Grid refinement level");
    cmd->add_option("--alpha", opts.cfg.alpha, "Poisson intensity");
    cmd->add_option("--trials", opts.cfg.trials, "Monte Carlo trials");
    cmd->add_option("--seed", opts.cfg.seed, "Master seed");
    cmd->add_option("--preset", opts.cfg.preset, "Constant preset: desk or paper");
    cmd->add_option("--set", sets, "Constant override KEY=VAL (repeatable)");
    cmd->add_option("--output", opts.output, "Output format: csv or json");
    cmd->add_option("--out", opts.out_path, "Output file (default stdout)");
    cmd->add_option("--threads", opts.cfg.threads, "Worker threads (env HULLWALK_THREADS)");
    cmd->add_option("--dump-path", opts.dump_path_file, "Write trial 0's path snapshot JSON");
    cmd->add_option("--dump-certificate", opts.dump_certificate_file,
                    "Write trial 0's certificate JSON");
}

void parse_sets(const std::vector<std::string>& sets, ExperimentConfig& cfg) {
    for (const auto& kv : sets) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos || eq == 0) {
            throw hullwalk::ConfigError("--set expects KEY=VAL, got '" + kv + "'");
        }
        try {
            cfg.overrides[kv.substr(0, eq)] = std::stod(kv.substr(eq + 1));
        } catch (const std::exception&) {
            throw hullwalk::ConfigError("--set value is not a number in '" + kv + "'");
        }
    }
}

void write_output(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream file(out_path, std::ios::binary);
    if (!file) throw hullwalk::ConfigError("cannot open output file '" + out_path + "'");
    file << text;
}

std::string render_rows(const std::vector<SweepRow>& rows, const std::string& format) {
    if (format == "csv") return hullwalk::rows_to_csv(rows);
    if (format == "json") return hullwalk::rows_to_json(rows).dump(2) + "\n";
    throw hullwalk::ConfigError("unknown output format '" + format + "'");
}

void dump_trial_zero(const CliOptions& opts) {
    if (opts.dump_path_file.empty() && opts.dump_certificate_file.empty()) return;
    const ExperimentConfig& cfg = opts.cfg;
    hullwalk::RngStream stream(cfg.seed, 0);

    std::vector<hullwalk::TimeKey> times;
    if (cfg.experiment == "poisson") {
        hullwalk::RngStream clock_rng = stream.substream(2);
        times = hullwalk::poisson_times(cfg.alpha, clock_rng);
    } else if (cfg.experiment == "separator-run") {
        auto sc = cfg.schedule_config();
        if (!sc.M) sc.M = cfg.depth;
        const auto schedule = hullwalk::Schedule::make(sc);
        times = hullwalk::block_grid(schedule.N, schedule.M);
    } else {
        times = hullwalk::block_grid(cfg.grid_blocks(), cfg.depth);
    }
    if (times.empty()) {
        std::cerr << "hullwalk: trial 0 has no sampling times; nothing to dump\n";
        return;
    }
    hullwalk::DyadicPath path = hullwalk::DyadicPath::init(cfg.n, times, stream.substream(1));

    if (!opts.dump_path_file.empty()) {
        write_output(path.snapshot().dump(2) + "\n", opts.dump_path_file);
    }
    if (opts.dump_certificate_file.empty()) return;

    nlohmann::ordered_json cert;
    if (cfg.experiment == "separator-run") {
        auto sc = cfg.schedule_config();
        if (!sc.M) sc.M = cfg.depth;
        const auto schedule = hullwalk::Schedule::make(sc);
        const auto result = hullwalk::run_construction(path, schedule);
        cert = result.to_json(schedule);
        cert["u"] = std::vector<double>(result.u_final.data(),
                                        result.u_final.data() + result.u_final.size());
    } else {
        std::vector<Eigen::VectorXd> points;
        for (const auto& key : times) points.push_back(path.value(key));
        const auto membership =
            hullwalk::origin_membership(points, hullwalk::default_hull_tol(points));
        if (membership.certificate) {
            cert = membership.certificate->to_json();
        } else {
            cert = nlohmann::ordered_json{{"verdict", "ambiguous"},
                                          {"min_norm", membership.min_norm}};
        }
    }
    write_output(cert.dump(2) + "\n", opts.dump_certificate_file);
}

int run(int argc, char** argv) {
    CLI::App app{"Brownian-motion convex hull experiments"};
    app.require_subcommand(1);

    CliOptions opts;
    opts.cfg.threads = threads_from_env();
    std::vector<std::string> sets;

    CLI::App* hull_test = app.add_subcommand("hull-test", "Origin-in-hull frequency on the dyadic grid");
    CLI::App* poisson = app.add_subcommand("poisson", "Origin-in-hull frequency at Poisson sample times");
    CLI::App* separator = app.add_subcommand("separator-run", "Separating-direction construction success rate");
    CLI::App* sweep = app.add_subcommand("sweep", "Run one experiment over a list of parameter values");
    CLI::App* lemma = app.add_subcommand("lemma-checks", "Statistical self-checks of the probabilistic bounds");

    for (CLI::App* cmd : {hull_test, poisson, separator, sweep, lemma}) {
        add_common_flags(cmd, opts, sets);
    }
    sweep->add_option("--sweep-param", opts.sweep_param,
                      "Parameter to sweep: horizon-exp, depth, alpha or n");
    sweep->add_option("--values", opts.sweep_values, "Sweep values")->delimiter(',');
    sweep->add_option("--experiment", opts.sweep_experiment,
                      "Base experiment: hull-test or poisson");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        app.exit(e);
        return 0;
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        parse_sets(sets, opts.cfg);

        if (lemma->parsed()) {
            const auto rows = hullwalk::run_lemma_checks(opts.cfg.trials, opts.cfg.seed);
            const std::string text = opts.output == "json"
                                         ? hullwalk::lemma_rows_to_json(rows).dump(2) + "\n"
                                         : hullwalk::lemma_rows_to_csv(rows);
            write_output(text, opts.out_path);
            for (const auto& r : rows) {
                if (!r.pass) return 1;
            }
            return 0;
        }

        std::vector<SweepRow> rows;
        if (sweep->parsed()) {
            if (opts.sweep_values.empty()) {
                throw hullwalk::ConfigError("sweep: --values must not be empty");
            }
            opts.cfg.experiment = opts.sweep_experiment;
            for (double value : opts.sweep_values) {
                ExperimentConfig cfg = opts.cfg;
                if (opts.sweep_param == "horizon-exp") {
                    cfg.horizon_exp = value;
                } else if (opts.sweep_param == "depth") {
                    cfg.depth = static_cast<int>(value);
                } else if (opts.sweep_param == "alpha") {
                    cfg.alpha = value;
                } else if (opts.sweep_param == "n") {
                    cfg.n = static_cast<int>(value);
                } else {
                    throw hullwalk::ConfigError("sweep: unknown parameter '" + opts.sweep_param +
                                                "'");
                }
                rows.push_back(cfg.experiment == "poisson" ? hullwalk::run_poisson(cfg)
                                                           : hullwalk::run_hull_test(cfg));
            }
        } else if (hull_test->parsed()) {
            opts.cfg.experiment = "hull-test";
            rows.push_back(hullwalk::run_hull_test(opts.cfg));
        } else if (poisson->parsed()) {
            opts.cfg.experiment = "poisson";
            rows.push_back(hullwalk::run_poisson(opts.cfg));
        } else if (separator->parsed()) {
            opts.cfg.experiment = "separator-run";
            rows.push_back(hullwalk::run_separator(opts.cfg));
        }

        write_output(render_rows(rows, opts.output), opts.out_path);
        for (const auto& r : rows) {
            std::cerr << "hullwalk: " << r.experiment << " diagnostics " << r.diagnostics.dump()
                      << "\n";
        }
        dump_trial_zero(opts);
        return 0;
    } catch (const hullwalk::InternalError& e) {
        std::cerr << "hullwalk: internal assertion failure: " << e.what() << "\n";
        return 3;
    } catch (const hullwalk::ConfigError& e) {
        std::cerr << "hullwalk: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "hullwalk: error: " << e.what() << "\n";
        return 3;
    }
}

}  // namespace

int main(int argc, char** argv) { return run(argc, argv); }
