#pragma once

#include <Eigen/Dense>
#include <map>
#include <optional>
#include <vector>

#include "hullwalk/rng.hpp"
#include "hullwalk/time_key.hpp"

#include "json.hpp"

namespace hullwalk {

/// A set of coordinates of R^n owned by substep (k, ell).
struct CoordinateBlock {
    int k = 0;
    int ell = 0;
    std::vector<int> indices;  // sorted, zero-based

    std::size_t size() const { return indices.size(); }
};

/// A Brownian path in R^n realized lazily on a set of exact time keys.
///
/// New interior times are filled in by bridge conditioning, so refining a
/// path never changes values already stored. BM(0) = 0 is implicit whether
/// or not the Zero key is stored.
class DyadicPath {
public:
    DyadicPath(int dim, RngStream rng);

    /// Samples the path at the given strictly increasing times by
    /// independent increments from t = 0.
    static DyadicPath init(int dim, const std::vector<TimeKey>& times, RngStream rng);

    int dim() const { return dim_; }
    std::size_t size() const { return samples_.size(); }
    bool contains(const TimeKey& t) const;
    std::vector<TimeKey> times() const;

    /// Stored value at t; throws MissingGridTimeError if absent.
    const Eigen::VectorXd& value(const TimeKey& t) const;

    /// Inserts BM(s) between its stored neighbours a < s < b by Brownian
    /// bridge conditioning: BM(s) = w(s) + u(s) with w the linear
    /// interpolation and u fresh Gaussian noise of per-coordinate variance
    /// (b-s)(s-a)/(b-a). When s precedes every stored time, a = 0 with
    /// BM(0) = 0. Times past the last stored one are rejected.
    const Eigen::VectorXd& bridge_refine(const TimeKey& s);

    /// Snapshot as a JSON array of {time key, vector}.
    nlohmann::ordered_json snapshot() const;

    // --- test instrumentation ---

    /// Records every key handed out by value(); used to assert which grid
    /// times an algorithm actually reads.
    void enable_access_log(bool on) const;
    const std::vector<TimeKey>& access_log() const { return access_log_; }
    void clear_access_log() const { access_log_.clear(); }

    /// Fault injection for the statistical self-checks: scales the bridge
    /// noise variance in later refinements. Leave at 1 everywhere else.
    void set_bridge_variance_scale(double s) { bridge_scale_ = s; }

private:
    int dim_;
    RngStream rng_;
    std::map<TimeKey, Eigen::VectorXd, TimeKeyLess> samples_;
    double bridge_scale_ = 1.0;
    mutable bool log_enabled_ = false;
    mutable std::vector<TimeKey> access_log_;
};

/// The construction grid at refinement level `level`: block endpoints
/// a_i = 2^(i-1) for i = 1..N+1 together with the interior sets
/// {2^(i-1+p/2^level) : p = 1..2^level-1} of every block. Sorted, exact,
/// of size (N+1) + N*(2^level - 1).
std::vector<TimeKey> block_grid(int num_blocks, int level);

/// Arrival times of a homogeneous Poisson process on (0, 1], sorted.
std::vector<TimeKey> poisson_times(double alpha, RngStream& rng);

/// Orthogonal projection onto the block's coordinates.
Eigen::VectorXd project(const Eigen::VectorXd& v, const CoordinateBlock& block);

/// P{sup of a standard Brownian bridge >= tau} = exp(-2*tau^2), tau > 0.
double bridge_exceedance_prob(double tau);

/// Outcome of certifying that <u, BM(t)> stays positive on one grid interval.
struct IntervalCheck {
    enum class Status { Certified, Refine, Failed };
    Status status = Status::Failed;
    /// Upper bound on the probability that the path dips below zero inside
    /// the interval given its endpoint values (exact for the bridge law).
    double residual = 1.0;
    std::optional<TimeKey> refine_key;
};

/// Checks one adjacent pair t1 < t2 of stored times. Failed if either
/// endpoint inner product is <= 0. Certified when the conditional dip
/// probability exp(-2*v1*v2/(t2-t1)) is <= eps; otherwise proposes the
/// midpoint key for refinement.
IntervalCheck certify_sign_on_interval(const DyadicPath& path, const Eigen::VectorXd& u,
                                       const TimeKey& t1, const TimeKey& t2, double eps);

}  // namespace hullwalk
