#pragma once

#include <Eigen/Dense>
#include <utility>

#include "hullwalk/rng.hpp"

#include "json.hpp"

namespace hullwalk {

/// Result of a Monte Carlo check of a probabilistic bound.
struct BoundCheckReport {
    long trials = 0;
    long violations = 0;
    double bound = 0.0;           // claimed failure probability (may exceed 1 when vacuous)
    double empirical_rate = 0.0;  // violations / trials

    nlohmann::ordered_json to_json() const;
};

/// Thresholds from the truncated-Gaussian norm concentration bound.
struct TruncatedNormBound {
    double threshold = 0.0;     // 4*sqrt(q)*exp(-r^2/8)
    double failure_prob = 0.0;  // exp(-2*sqrt(q))
    bool hypothesis_ok = true;  // e <= r <= sqrt(ln q)
};

/// i.i.d. standard normal vector. dim must be >= 1.
Eigen::VectorXd sample_gaussian_vector(int dim, RngStream& rng);

/// Upper bound on P{gamma >= tau}: exp(-tau^2/2) / (sqrt(2*pi)*tau), tau > 0.
double gaussian_tail_bound(double tau);

/// Exact normal upper tail P{gamma >= tau} (comparison oracle for the bound).
double gaussian_tail_exact(double tau);

/// Extreme singular values of a dense matrix, by full SVD.
std::pair<double, double> singular_value_range(const Eigen::MatrixXd& a);

/// Samples standard n x m Gaussian matrices and counts how often the
/// singular value interval [sqrt(n)-sqrt(m)-t, sqrt(n)+sqrt(m)+t] is
/// violated. The reported bound is 2*exp(-t^2/2). Requires n >= m >= 1.
BoundCheckReport check_singular_value_interval(int n, int m, double t, long trials,
                                               RngStream rng);

/// Norm threshold and failure probability for the vector b_i = max(0, g_i - r),
/// i <= q. Values are computed for any r; hypothesis_ok records whether the
/// regime e <= r <= sqrt(ln q) the bound was stated for actually holds.
TruncatedNormBound truncated_norm_bound(long q, double r);

/// One sample of ||(max(0, g_i - r))_{i<=q}||.
double sample_truncated_norm(long q, double r, RngStream& rng);

}  // namespace hullwalk
