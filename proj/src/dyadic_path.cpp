#include "hullwalk/dyadic_path.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hullwalk/errors.hpp"
#include "hullwalk/gaussian_stats.hpp"

namespace hullwalk {

DyadicPath::DyadicPath(int dim, RngStream rng) : dim_(dim), rng_(rng) {
    if (dim < 1) throw std::invalid_argument("DyadicPath: dim must be >= 1");
}

DyadicPath DyadicPath::init(int dim, const std::vector<TimeKey>& times, RngStream rng) {
    DyadicPath path(dim, rng);
    for (std::size_t i = 0; i + 1 < times.size(); ++i) {
        if (!TimeKey::less(times[i], times[i + 1])) {
            throw std::invalid_argument("DyadicPath::init: times must be strictly increasing");
        }
    }
    double prev_t = 0.0;
    Eigen::VectorXd prev = Eigen::VectorXd::Zero(dim);
    for (const auto& key : times) {
        if (key.is_zero()) {
            path.samples_.emplace(key, Eigen::VectorXd::Zero(dim));
            continue;
        }
        const double t = key.value();
        const double dt = t - prev_t;
        Eigen::VectorXd v = prev + std::sqrt(dt) * sample_gaussian_vector(dim, path.rng_);
        prev = v;
        prev_t = t;
        path.samples_.emplace(key, std::move(v));
    }
    return path;
}

bool DyadicPath::contains(const TimeKey& t) const { return samples_.count(t) > 0; }

std::vector<TimeKey> DyadicPath::times() const {
    std::vector<TimeKey> out;
    out.reserve(samples_.size());
    for (const auto& [key, _] : samples_) out.push_back(key);
    return out;
}

const Eigen::VectorXd& DyadicPath::value(const TimeKey& t) const {
    auto it = samples_.find(t);
    if (it == samples_.end()) {
        throw MissingGridTimeError("DyadicPath::value: time " + t.str() + " not stored");
    }
    if (log_enabled_) access_log_.push_back(t);
    return it->second;
}

const Eigen::VectorXd& DyadicPath::bridge_refine(const TimeKey& s) {
    if (s.is_zero()) throw std::invalid_argument("bridge_refine: cannot insert t = 0");
    if (contains(s)) throw std::invalid_argument("bridge_refine: time already stored");

    auto right = samples_.lower_bound(s);
    if (right == samples_.end()) {
        throw std::invalid_argument("bridge_refine: no right neighbour; refusing to extrapolate");
    }
    double ta = 0.0;
    Eigen::VectorXd va = Eigen::VectorXd::Zero(dim_);
    if (right != samples_.begin()) {
        auto left = std::prev(right);
        ta = left->first.value();
        va = left->second;
    }
    const double tb = right->first.value();
    const Eigen::VectorXd& vb = right->second;
    const double ts = s.value();
    const double span = tb - ta;
    if (!(span > 0.0) || !(ts > ta) || !(ts < tb)) {
        throw std::invalid_argument("bridge_refine: degenerate interval around " + s.str());
    }

    const double wa = (tb - ts) / span;
    const double wb = (ts - ta) / span;
    const double var = bridge_scale_ * (tb - ts) * (ts - ta) / span;
    Eigen::VectorXd v =
        wa * va + wb * vb + std::sqrt(var) * sample_gaussian_vector(dim_, rng_);
    auto [it, inserted] = samples_.emplace(s, std::move(v));
    return it->second;
}

nlohmann::ordered_json DyadicPath::snapshot() const {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& [key, v] : samples_) {
        nlohmann::ordered_json entry;
        entry["time"] = key.to_json();
        entry["x"] = std::vector<double>(v.data(), v.data() + v.size());
        arr.push_back(std::move(entry));
    }
    return arr;
}

void DyadicPath::enable_access_log(bool on) const {
    log_enabled_ = on;
    if (!on) access_log_.clear();
}

std::vector<TimeKey> block_grid(int num_blocks, int level) {
    if (num_blocks < 1) throw std::invalid_argument("block_grid: need at least one block");
    if (level < 0) throw std::invalid_argument("block_grid: level must be >= 0");
    std::vector<TimeKey> grid;
    const std::int64_t steps = std::int64_t{1} << level;
    grid.reserve(static_cast<std::size_t>(num_blocks + 1) +
                 static_cast<std::size_t>(num_blocks) * static_cast<std::size_t>(steps - 1));
    for (int i = 1; i <= num_blocks + 1; ++i) {
        grid.push_back(TimeKey::exp2(i - 1, 0));
    }
    for (int i = 1; i <= num_blocks; ++i) {
        for (std::int64_t p = 1; p < steps; ++p) {
            // exponent (i-1) + p/2^level
            grid.push_back(TimeKey::exp2((static_cast<std::int64_t>(i) - 1) * steps + p, level));
        }
    }
    std::sort(grid.begin(), grid.end(), TimeKeyLess{});
    return grid;
}

std::vector<TimeKey> poisson_times(double alpha, RngStream& rng) {
    if (!(alpha > 0.0)) throw std::invalid_argument("poisson_times: alpha must be > 0");
    if (alpha > 1e9) throw std::invalid_argument("poisson_times: alpha too large for desk scale");
    std::vector<TimeKey> out;
    double t = 0.0;
    for (;;) {
        t += -std::log(rng.next_uniform()) / alpha;
        if (t > 1.0) break;
        out.push_back(TimeKey::raw(t));
    }
    return out;
}

Eigen::VectorXd project(const Eigen::VectorXd& v, const CoordinateBlock& block) {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(v.size());
    for (int idx : block.indices) {
        if (idx < 0 || idx >= v.size()) {
            throw std::invalid_argument("project: block index out of range");
        }
        out[idx] = v[idx];
    }
    return out;
}

double bridge_exceedance_prob(double tau) {
    if (!(tau > 0.0)) throw std::invalid_argument("bridge_exceedance_prob: tau must be > 0");
    return std::exp(-2.0 * tau * tau);
}

IntervalCheck certify_sign_on_interval(const DyadicPath& path, const Eigen::VectorXd& u,
                                       const TimeKey& t1, const TimeKey& t2, double eps) {
    if (!path.contains(t1) || !path.contains(t2)) {
        throw MissingGridTimeError("certify_sign_on_interval: endpoints must be stored");
    }
    if (!TimeKey::less(t1, t2)) {
        throw std::invalid_argument("certify_sign_on_interval: need t1 < t2");
    }
    // Adjacency: no stored key strictly between t1 and t2.
    for (const auto& key : path.times()) {
        if (TimeKey::less(t1, key) && TimeKey::less(key, t2)) {
            throw std::invalid_argument("certify_sign_on_interval: keys are not adjacent");
        }
    }
    const double v1 = u.dot(path.value(t1));
    const double v2 = u.dot(path.value(t2));
    IntervalCheck check;
    if (!(v1 > 0.0) || !(v2 > 0.0)) {
        check.status = IntervalCheck::Status::Failed;
        check.residual = 1.0;
        return check;
    }
    const double gap = t2.value() - t1.value();
    // Conditional on the endpoint values the dip probability of the bridge
    // below zero is exactly exp(-2*v1*v2/gap).
    check.residual = std::exp(-2.0 * v1 * v2 / gap);
    if (check.residual <= eps) {
        check.status = IntervalCheck::Status::Certified;
    } else {
        check.status = IntervalCheck::Status::Refine;
        check.refine_key = TimeKey::midpoint(t1, t2);
    }
    return check;
}

}  // namespace hullwalk
