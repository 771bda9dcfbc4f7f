#include "hullwalk/gaussian_stats.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <stdexcept>

#include "hullwalk/errors.hpp"

namespace hullwalk {

nlohmann::ordered_json BoundCheckReport::to_json() const {
    return nlohmann::ordered_json{{"trials", trials},
                                  {"violations", violations},
                                  {"bound", bound},
                                  {"empirical_rate", empirical_rate}};
}

Eigen::VectorXd sample_gaussian_vector(int dim, RngStream& rng) {
    if (dim < 1) throw std::invalid_argument("sample_gaussian_vector: dim must be >= 1");
    Eigen::VectorXd v(dim);
    for (int i = 0; i < dim; ++i) v[i] = rng.next_gaussian();
    return v;
}

double gaussian_tail_bound(double tau) {
    if (!(tau > 0.0)) throw std::invalid_argument("gaussian_tail_bound: tau must be > 0");
    return std::exp(-0.5 * tau * tau) / (std::sqrt(2.0 * RngStream::pi()) * tau);
}

double gaussian_tail_exact(double tau) {
    return 0.5 * std::erfc(tau / std::sqrt(2.0));
}

std::pair<double, double> singular_value_range(const Eigen::MatrixXd& a) {
    // Singular values only; BDC falls back to Jacobi for small matrices.
    Eigen::BDCSVD<Eigen::MatrixXd> svd(a);
    const auto& sv = svd.singularValues();
    return {sv[sv.size() - 1], sv[0]};
}

BoundCheckReport check_singular_value_interval(int n, int m, double t, long trials,
                                               RngStream rng) {
    if (m < 1 || n < m) {
        throw std::invalid_argument("check_singular_value_interval: need n >= m >= 1");
    }
    if (t < 0.0) throw std::invalid_argument("check_singular_value_interval: t must be >= 0");
    if (trials < 1) throw std::invalid_argument("check_singular_value_interval: trials must be >= 1");

    const double lo = std::sqrt(static_cast<double>(n)) - std::sqrt(static_cast<double>(m)) - t;
    const double hi = std::sqrt(static_cast<double>(n)) + std::sqrt(static_cast<double>(m)) + t;

    BoundCheckReport report;
    report.trials = trials;
    report.bound = 2.0 * std::exp(-0.5 * t * t);
    Eigen::MatrixXd g(n, m);
    for (long trial = 0; trial < trials; ++trial) {
        for (int j = 0; j < m; ++j)
            for (int i = 0; i < n; ++i) g(i, j) = rng.next_gaussian();
        const auto [smin, smax] = singular_value_range(g);
        if (smin < lo || smax > hi) ++report.violations;
    }
    report.empirical_rate =
        static_cast<double>(report.violations) / static_cast<double>(report.trials);
    return report;
}

TruncatedNormBound truncated_norm_bound(long q, double r) {
    if (q < 1) throw std::invalid_argument("truncated_norm_bound: q must be >= 1");
    const double sq = std::sqrt(static_cast<double>(q));
    TruncatedNormBound out;
    out.threshold = 4.0 * sq * std::exp(-r * r / 8.0);
    out.failure_prob = std::exp(-2.0 * sq);
    const double e = std::exp(1.0);
    const double upper = std::sqrt(std::log(static_cast<double>(q)));
    out.hypothesis_ok = (r >= e && r <= upper);
    return out;
}

double sample_truncated_norm(long q, double r, RngStream& rng) {
    if (q < 1) throw std::invalid_argument("sample_truncated_norm: q must be >= 1");
    double sumsq = 0.0;
    for (long i = 0; i < q; ++i) {
        const double b = std::max(0.0, rng.next_gaussian() - r);
        sumsq += b * b;
    }
    return std::sqrt(sumsq);
}

}  // namespace hullwalk
