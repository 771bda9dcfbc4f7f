#include "hullwalk/separator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>

#include "hullwalk/affine_min_norm.hpp"
#include "hullwalk/errors.hpp"

namespace hullwalk {

namespace {

constexpr double kZeroTargetEps = 1e-12;   // stand-in for b_i = 0 targets
constexpr double kActiveStatTol = 1e-14;   // statistic counts as nonzero above this

TimeKey block_endpoint(int i) { return TimeKey::exp2(i - 1, 0); }  // a_i = 2^(i-1)

// t_{i,p} = 2^(i-1+p/2^k), p = 0..2^k; p = 0 and p = 2^k are the endpoints.
TimeKey grid_time(int i, std::int64_t p, int level) {
    const std::int64_t steps = std::int64_t{1} << level;
    return TimeKey::exp2((static_cast<std::int64_t>(i) - 1) * steps + p, level);
}

double block_statistic_at(const DyadicPath& path, const Eigen::VectorXd& u, int grid_level,
                          double f_val, double h_val, int i) {
    if (i == 0) {
        const double head = u.dot(path.value(block_endpoint(1)));
        return std::max(0.0, -head + f_val);
    }
    const double ai = std::exp2(i - 1);
    const double ai1 = std::exp2(i);
    const Eigen::VectorXd& at_ai = path.value(block_endpoint(i));
    double worst = 0.0;
    const std::int64_t steps = std::int64_t{1} << grid_level;
    for (std::int64_t p = 1; p < steps; ++p) {
        const Eigen::VectorXd& at_t = path.value(grid_time(i, p, grid_level));
        const double dip = u.dot(at_ai - at_t) / std::sqrt(ai) - h_val;
        worst = std::max(worst, dip);
    }
    const double increment =
        u.dot(at_ai - path.value(block_endpoint(i + 1))) / std::sqrt(ai1) + f_val;
    return std::max(worst, std::max(0.0, increment));
}

Eigen::VectorXd block_statistics_at(const DyadicPath& path, const Eigen::VectorXd& u,
                                    int grid_level, double f_val, double h_val, int num_blocks) {
    Eigen::VectorXd stats(num_blocks + 1);
    for (int i = 0; i <= num_blocks; ++i) {
        stats[i] = block_statistic_at(path, u, grid_level, f_val, h_val, i);
    }
    return stats;
}

std::vector<int> active_set(const Eigen::VectorXd& stats) {
    std::vector<int> active;
    for (int i = 0; i < stats.size(); ++i) {
        if (stats[i] > kActiveStatTol) active.push_back(i);
    }
    return active;
}

}  // namespace

MinNormAffineUnit min_norm_affine_unit(const Eigen::MatrixXd& x, const Eigen::VectorXd& b) {
    const Eigen::Index m = x.cols();
    const Eigen::Index d = x.rows();
    if (m < 1) throw std::invalid_argument("min_norm_affine_unit: need at least one vector");
    if (b.size() != m) throw std::invalid_argument("min_norm_affine_unit: |b| != number of vectors");

    Eigen::MatrixXd y(d, m);
    for (Eigen::Index i = 0; i < m; ++i) {
        const double bi = std::max(std::abs(b[i]), kZeroTargetEps);
        y.col(i) = x.col(i) / bi;
    }

    Eigen::VectorXd coeffs;
    if (!try_affine_min_norm(y, coeffs)) {
        throw RankDeficientError("min_norm_affine_unit: Gram system numerically singular");
    }
    const Eigen::VectorXd point = y * coeffs;
    const double dist = point.norm();
    if (!(dist > 0.0) || !std::isfinite(dist)) {
        throw RankDeficientError("min_norm_affine_unit: affine hull passes through the origin");
    }
    MinNormAffineUnit out;
    out.u = point / dist;
    out.dist = dist;
    out.dim_hypothesis_ok = (2 * m <= d);
    return out;
}

double block_statistic(const DyadicPath& path, const Eigen::VectorXd& u, int k, int ell,
                       int block, const Schedule& schedule) {
    if (block < 0 || block > schedule.N) {
        throw std::invalid_argument("block_statistic: block index out of range");
    }
    return block_statistic_at(path, u, k, schedule.f(k, ell), schedule.h(k, ell), block);
}

Eigen::VectorXd block_statistics(const DyadicPath& path, const Eigen::VectorXd& u, int k,
                                 int ell, const Schedule& schedule) {
    return block_statistics_at(path, u, k, schedule.f(k, ell), schedule.h(k, ell), schedule.N);
}

Eigen::VectorXd initial_vector(const DyadicPath& path, const Schedule& schedule) {
    const CoordinateBlock& home = schedule.block(0, 1);
    const int m = schedule.N + 1;
    if (static_cast<int>(home.size()) < 2 * m) {
        throw ConfigError("initial_vector: block J_1^0 smaller than 2*(N+1)");
    }
    Eigen::MatrixXd x(path.dim(), m);
    Eigen::VectorXd prev = Eigen::VectorXd::Zero(path.dim());
    double prev_t = 0.0;
    for (int i = 0; i < m; ++i) {
        const Eigen::VectorXd& cur = path.value(block_endpoint(i + 1));
        const double t = std::exp2(i);  // a_{i+1}
        x.col(i) = project(cur - prev, home) / std::sqrt(t - prev_t);
        prev = cur;
        prev_t = t;
    }
    const Eigen::VectorXd b =
        Eigen::VectorXd::Constant(m, 2.0 * schedule.f(1, 0) / schedule.c_L);
    return min_norm_affine_unit(x, b).u;
}

SeparatorState substep(const SeparatorState& state, const DyadicPath& path,
                       const Schedule& schedule) {
    int k = state.k;
    int ell = state.ell;
    if (k == 0 || ell >= schedule.Mprime) {
        k += 1;
        ell = 1;
    } else {
        ell += 1;
    }
    if (k > schedule.M) throw std::invalid_argument("substep: construction already complete");

    SeparatorState next = state;
    next.k = k;
    next.ell = ell;
    next.stats = block_statistics(path, state.u, k, ell, schedule);
    next.active = active_set(next.stats);

    const CoordinateBlock& block = schedule.block(k, ell);
    const bool has_zero_block =
        std::find(next.active.begin(), next.active.end(), 0) != next.active.end();
    const std::size_t pairs = (next.active.size() - (has_zero_block ? 1 : 0))
                                  << static_cast<unsigned>(k);
    const std::size_t num_increments = pairs + (has_zero_block ? 1 : 0);
    const double active_cap =
        schedule.N * std::exp(-schedule.C_h * schedule.C_h * std::exp2((k + ell) / 2.0) / 32.0);

    Eigen::VectorXd delta;
    const bool fallback = next.active.empty() ||
                          static_cast<double>(next.active.size()) > active_cap ||
                          2 * num_increments > block.size();
    if (fallback) {
        delta = Eigen::VectorXd::Zero(path.dim());
        delta[block.indices.front()] = 1.0;
        next.fallback_count += 1;
    } else {
        Eigen::MatrixXd x(path.dim(), static_cast<Eigen::Index>(num_increments));
        Eigen::VectorXd b(static_cast<Eigen::Index>(num_increments));
        const double stat_norm = next.stats.norm();
        const double scale = std::exp2(-0.5 * k);
        Eigen::Index col = 0;
        const std::int64_t steps = std::int64_t{1} << k;
        for (int i : next.active) {
            if (i == 0) {
                x.col(col) = project(path.value(block_endpoint(1)), block);
                b[col] = scale * next.stats[0] / stat_norm;
                ++col;
                continue;
            }
            for (std::int64_t p = 0; p < steps; ++p) {
                const Eigen::VectorXd& lo = path.value(grid_time(i, p, k));
                const Eigen::VectorXd& hi = path.value(grid_time(i, p + 1, k));
                const double dt = grid_time(i, p + 1, k).value() - grid_time(i, p, k).value();
                x.col(col) = project(hi - lo, block) / std::sqrt(dt);
                b[col] = scale * next.stats[i] / stat_norm;
                ++col;
            }
        }
        delta = min_norm_affine_unit(x, b).u;
    }

    const double alpha = schedule.alpha(k, ell);
    Eigen::VectorXd u = (state.u + alpha * delta) / std::sqrt(1.0 + alpha * alpha);
    u /= u.norm();
    next.u = std::move(u);
    next.trace.push_back(
        {k, ell, static_cast<int>(next.active.size()), next.stats.norm()});
    return next;
}

SeparatorResult run_construction(const DyadicPath& path, const Schedule& schedule) {
    SeparatorState state;
    state.k = 0;
    state.ell = schedule.Mprime;  // step 0 complete; first substep is (1, 1)
    state.u = initial_vector(path, schedule);

    // Initial trace entry: deficits of the block increments against the
    // f(1,0)*sqrt(a_{i+1}) margins the initial vector aims for.
    const int m = schedule.N + 1;
    state.stats = Eigen::VectorXd(m);
    Eigen::VectorXd prev = Eigen::VectorXd::Zero(path.dim());
    for (int i = 0; i < m; ++i) {
        const Eigen::VectorXd& cur = path.value(block_endpoint(i + 1));
        const double margin = state.u.dot(cur - prev) / std::exp2(0.5 * i);
        state.stats[i] = std::max(0.0, schedule.f(1, 0) - margin);
        prev = cur;
    }
    state.active = active_set(state.stats);
    state.trace.push_back({0, 0, static_cast<int>(state.active.size()), state.stats.norm()});

    SeparatorResult result;
    for (int k = 1; k <= schedule.M; ++k) {
        for (int ell = 1; ell <= schedule.Mprime; ++ell) {
            state = substep(state, path, schedule);
        }
        StepReport report;
        report.k = k;
        const Eigen::VectorXd strict = block_statistics_at(
            path, state.u, k, schedule.f(k, schedule.Mprime + 1),
            schedule.h(k, schedule.Mprime + 1), schedule.N);
        const Eigen::VectorXd handoff = block_statistics_at(
            path, state.u, k, schedule.f(k + 1, 0), schedule.h(k + 1, 0), schedule.N);
        report.strict_norm = strict.norm();
        report.handoff_norm = handoff.norm();
        report.strict_holds = active_set(strict).empty();
        report.handoff_holds = active_set(handoff).empty();
        result.steps.push_back(report);
    }

    result.u_final = state.u;
    result.trace = state.trace;
    result.fallback_count = state.fallback_count;
    result.grid = block_grid(schedule.N, schedule.M);
    const VerifyOutcome verify = verify_certificate(path, result.u_final, result.grid);
    result.success = verify.ok;
    result.margin = verify.min_margin;
    return result;
}

VerifyOutcome verify_certificate(const DyadicPath& path, const Eigen::VectorXd& u,
                                 const std::vector<TimeKey>& grid) {
    if (grid.empty()) throw std::invalid_argument("verify_certificate: empty grid");
    VerifyOutcome out;
    out.ok = true;
    out.min_margin = std::numeric_limits<double>::infinity();
    for (const auto& key : grid) {
        const double ip = u.dot(path.value(key));
        if (!(ip > 0.0)) out.ok = false;
        out.min_margin = std::min(out.min_margin, ip / std::sqrt(key.value()));
    }
    return out;
}

ContinuumOutcome certify_continuum(DyadicPath& path, const Eigen::VectorXd& u,
                                   const std::vector<TimeKey>& grid, double eps,
                                   int max_depth) {
    if (grid.size() < 2) throw std::invalid_argument("certify_continuum: need >= 2 grid times");
    struct Node {
        TimeKey lo, hi;
        double v_lo, v_hi;
        double residual;
        int depth;
    };
    auto dip_bound = [&](double v_lo, double v_hi, double gap) {
        return std::exp(-2.0 * v_lo * v_hi / gap);
    };
    auto worse = [](const Node& a, const Node& b) { return a.residual < b.residual; };
    std::priority_queue<Node, std::vector<Node>, decltype(worse)> queue(worse);

    ContinuumOutcome out;
    double total = 0.0;
    std::vector<TimeKey> sorted = grid;
    std::sort(sorted.begin(), sorted.end(), TimeKeyLess{});
    for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
        Node node{sorted[i], sorted[i + 1], u.dot(path.value(sorted[i])),
                  u.dot(path.value(sorted[i + 1])), 0.0, 0};
        if (!(node.v_lo > 0.0) || !(node.v_hi > 0.0)) return out;  // certificate broken
        node.residual = dip_bound(node.v_lo, node.v_hi, node.hi.value() - node.lo.value());
        total += node.residual;
        queue.push(node);
    }

    while (std::min(total, 1.0) > eps) {
        Node node = queue.top();
        if (node.depth >= max_depth) return out;  // refinement budget exhausted
        queue.pop();
        const TimeKey mid = TimeKey::midpoint(node.lo, node.hi);
        const double v_mid = u.dot(path.contains(mid) ? path.value(mid) : path.bridge_refine(mid));
        if (!(v_mid > 0.0)) {
            out.dip_found = true;  // the path actually dips: genuinely broken
            return out;
        }
        out.refinements += 1;
        total -= node.residual;
        Node left{node.lo, mid, node.v_lo, v_mid, 0.0, node.depth + 1};
        left.residual = dip_bound(left.v_lo, left.v_hi, left.hi.value() - left.lo.value());
        Node right{mid, node.hi, v_mid, node.v_hi, 0.0, node.depth + 1};
        right.residual = dip_bound(right.v_lo, right.v_hi, right.hi.value() - right.lo.value());
        total += left.residual + right.residual;
        queue.push(left);
        queue.push(right);
    }
    out.certified = true;
    out.residual = std::min(total, 1.0);
    return out;
}

nlohmann::ordered_json SeparatorResult::to_json(const Schedule& schedule) const {
    nlohmann::ordered_json trace_json = nlohmann::ordered_json::array();
    for (const auto& entry : trace) {
        trace_json.push_back(nlohmann::ordered_json{{"k", entry.k},
                                                    {"ell", entry.ell},
                                                    {"active_count", entry.active_count},
                                                    {"stat_norm", entry.stat_norm}});
    }
    return nlohmann::ordered_json{{"success", success},
                                  {"margin", margin},
                                  {"trace", std::move(trace_json)},
                                  {"constants", schedule.constants_json()}};
}

}  // namespace hullwalk
