#include "hullwalk/hull.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "hullwalk/affine_min_norm.hpp"
#include "hullwalk/errors.hpp"

namespace hullwalk {

namespace {

std::atomic<std::uint64_t> g_certificate_violations{0};

void validate_points(const std::vector<Eigen::VectorXd>& points) {
    if (points.empty()) throw std::invalid_argument("min_norm_point: no points");
    const Eigen::Index dim = points.front().size();
    for (const auto& p : points) {
        if (p.size() != dim) throw std::invalid_argument("min_norm_point: mixed dimensions");
        if (!p.allFinite()) throw std::invalid_argument("min_norm_point: non-finite coordinate");
    }
}

}  // namespace

MinNormPoint min_norm_point(const std::vector<Eigen::VectorXd>& points, double tol) {
    validate_points(points);
    if (!(tol > 0.0)) throw std::invalid_argument("min_norm_point: tol must be > 0");
    const int count = static_cast<int>(points.size());
    const Eigen::Index dim = points.front().size();
    const int max_iterations = 50 * (static_cast<int>(dim) + count);
    constexpr double kDropTol = 1e-12;

    // Corral: indices into points, kept affinely independent.
    std::vector<int> corral;
    std::vector<double> lambda;
    int start = 0;
    for (int j = 1; j < count; ++j) {
        if (points[j].squaredNorm() < points[start].squaredNorm()) start = j;
    }
    corral.push_back(start);
    lambda.push_back(1.0);
    Eigen::VectorXd x = points[start];

    MinNormPoint result;
    result.optimal = false;
    int iterations = 0;

    while (iterations++ < max_iterations) {
        // At ||x|| <= tol the relative optimality test below loses meaning
        // (both sides are noise); the iterate already witnesses Inside.
        if (x.norm() <= tol) {
            result.optimal = true;
            break;
        }
        // Major cycle: most violating point.
        int best = 0;
        double best_ip = x.dot(points[0]);
        for (int j = 1; j < count; ++j) {
            const double ip = x.dot(points[j]);
            if (ip < best_ip) {
                best_ip = ip;
                best = j;
            }
        }
        if (best_ip >= x.squaredNorm() - tol * x.norm()) {
            result.optimal = true;
            break;
        }
        if (std::find(corral.begin(), corral.end(), best) != corral.end()) {
            // The best improving point is already in the corral: numerically
            // stalled, return the current iterate flagged as-is.
            break;
        }
        corral.push_back(best);
        lambda.push_back(0.0);

        // Minor cycles: pull x to the affine minimizer of the corral,
        // shrinking the corral while the minimizer leaves the simplex.
        for (;;) {
            Eigen::MatrixXd y(dim, static_cast<Eigen::Index>(corral.size()));
            for (std::size_t i = 0; i < corral.size(); ++i) y.col(i) = points[corral[i]];
            Eigen::VectorXd beta;
            if (!try_affine_min_norm_centered(y, beta)) {
                // Affinely dependent corral; evict the lightest older member
                // so the newly added point can still make progress.
                if (corral.size() <= 1) break;
                std::size_t victim = 0;
                for (std::size_t i = 1; i + 1 < corral.size(); ++i) {
                    if (lambda[i] < lambda[victim]) victim = i;
                }
                corral.erase(corral.begin() + static_cast<std::ptrdiff_t>(victim));
                lambda.erase(lambda.begin() + static_cast<std::ptrdiff_t>(victim));
                double mass = 0.0;
                for (double w : lambda) mass += w;
                if (mass <= 0.0) {
                    lambda.assign(corral.size(), 1.0 / static_cast<double>(corral.size()));
                } else {
                    for (double& w : lambda) w /= mass;
                }
                continue;
            }
            if (beta.minCoeff() > kDropTol) {
                x = y * beta;
                for (std::size_t i = 0; i < corral.size(); ++i) lambda[i] = beta[i];
                break;
            }
            // Step as far toward beta as the simplex allows.
            double theta = 1.0;
            for (std::size_t i = 0; i < corral.size(); ++i) {
                if (beta[i] <= kDropTol) {
                    const double denom = lambda[i] - beta[i];
                    if (denom > 0.0) theta = std::min(theta, lambda[i] / denom);
                }
            }
            std::vector<int> kept;
            std::vector<double> kept_lambda;
            double mass = 0.0;
            for (std::size_t i = 0; i < corral.size(); ++i) {
                const double w = (1.0 - theta) * lambda[i] + theta * beta[i];
                if (w > kDropTol) {
                    kept.push_back(corral[i]);
                    kept_lambda.push_back(w);
                    mass += w;
                }
            }
            if (kept.empty()) {
                // Degenerate collapse; keep the heaviest original member.
                kept.push_back(corral.front());
                kept_lambda.push_back(1.0);
                mass = 1.0;
            }
            corral = std::move(kept);
            lambda = std::move(kept_lambda);
            for (double& w : lambda) w /= mass;
            x.setZero();
            for (std::size_t i = 0; i < corral.size(); ++i) x += lambda[i] * points[corral[i]];
        }
    }

    result.point = x;
    result.iterations = iterations;
    result.weights.assign(count, 0.0);
    double mass = 0.0;
    for (std::size_t i = 0; i < corral.size(); ++i) {
        const double w = std::max(lambda[i], 0.0);
        result.weights[corral[i]] = w;
        mass += w;
    }
    for (double& w : result.weights) w /= mass;
    return result;
}

double default_hull_tol(const std::vector<Eigen::VectorXd>& points) {
    double max_norm = 0.0;
    for (const auto& p : points) max_norm = std::max(max_norm, p.norm());
    return 1e-9 * (1.0 + max_norm);
}

bool check_certificate(const HullCertificate& cert,
                       const std::vector<Eigen::VectorXd>& points, double tol) {
    if (points.empty()) return false;
    if (cert.verdict == HullCertificate::Verdict::Inside) {
        if (cert.weights.size() != points.size()) return false;
        double sum = 0.0;
        Eigen::VectorXd combo = Eigen::VectorXd::Zero(points.front().size());
        for (std::size_t j = 0; j < points.size(); ++j) {
            if (cert.weights[j] < 0.0) return false;
            sum += cert.weights[j];
            combo += cert.weights[j] * points[j];
        }
        return std::abs(sum - 1.0) <= 1e-10 && combo.norm() <= tol;
    }
    if (!(cert.margin > 0.0)) return false;
    if (std::abs(cert.direction.norm() - 1.0) > 1e-9) return false;
    for (const auto& p : points) {
        if (cert.direction.dot(p) < cert.margin - 1e-12) return false;
    }
    return true;
}

Membership origin_membership(const std::vector<Eigen::VectorXd>& points, double tol) {
    MinNormPoint mnp = min_norm_point(points, tol);
    Membership out;
    out.min_norm = mnp.point.norm();

    if (out.min_norm <= tol) {
        HullCertificate cert;
        cert.verdict = HullCertificate::Verdict::Inside;
        cert.weights = mnp.weights;
        if (!check_certificate(cert, points, tol)) {
            ++g_certificate_violations;
            throw InternalError("origin_membership: Inside certificate failed its re-check");
        }
        out.kind = Membership::Kind::Inside;
        out.certificate = std::move(cert);
        return out;
    }
    if (out.min_norm <= 2.0 * tol || !mnp.optimal) {
        out.kind = Membership::Kind::Ambiguous;
        return out;
    }
    HullCertificate cert;
    cert.verdict = HullCertificate::Verdict::Outside;
    cert.direction = mnp.point / out.min_norm;
    double margin = std::numeric_limits<double>::infinity();
    for (const auto& p : points) margin = std::min(margin, cert.direction.dot(p));
    cert.margin = margin;
    if (!check_certificate(cert, points, tol)) {
        ++g_certificate_violations;
        throw InternalError("origin_membership: Outside certificate failed its re-check");
    }
    out.kind = Membership::Kind::Outside;
    out.certificate = std::move(cert);
    return out;
}

bool oracle_2d(const std::vector<Eigen::VectorXd>& points) {
    if (points.empty()) return false;
    std::vector<double> angles;
    angles.reserve(points.size());
    for (const auto& p : points) {
        if (p.size() != 2) throw std::invalid_argument("oracle_2d: points must be 2-D");
        if (p.norm() <= 1e-12) throw ZeroPointError("oracle_2d: zero point");
        angles.push_back(std::atan2(p[1], p[0]));
    }
    std::sort(angles.begin(), angles.end());
    const double pi = 3.14159265358979323846;
    double max_gap = angles.front() + 2.0 * pi - angles.back();
    for (std::size_t i = 1; i < angles.size(); ++i) {
        max_gap = std::max(max_gap, angles[i] - angles[i - 1]);
    }
    // Gap of exactly pi: the origin sits on a segment between antipodal
    // points, which counts as contained (closed hull).
    return max_gap <= pi + 1e-12;
}

std::uint64_t certificate_violation_count() { return g_certificate_violations.load(); }

std::vector<Eigen::VectorXd> points_from_json(const nlohmann::json& doc) {
    if (!doc.is_array() || doc.empty()) {
        throw std::invalid_argument("points: expected a nonempty JSON array of arrays");
    }
    std::vector<Eigen::VectorXd> points;
    points.reserve(doc.size());
    for (const auto& row : doc) {
        if (!row.is_array() || row.empty()) {
            throw std::invalid_argument("points: every entry must be a coordinate array");
        }
        Eigen::VectorXd p(row.size());
        for (std::size_t i = 0; i < row.size(); ++i) p[static_cast<Eigen::Index>(i)] = row[i].get<double>();
        if (!p.allFinite()) throw std::invalid_argument("points: non-finite coordinate");
        if (!points.empty() && p.size() != points.front().size()) {
            throw std::invalid_argument("points: mixed dimensions");
        }
        points.push_back(std::move(p));
    }
    return points;
}

nlohmann::ordered_json membership_to_json(const Membership& membership) {
    if (membership.certificate) {
        nlohmann::ordered_json out = membership.certificate->to_json();
        out["min_norm"] = membership.min_norm;
        return out;
    }
    return nlohmann::ordered_json{{"verdict", "ambiguous"}, {"min_norm", membership.min_norm}};
}

nlohmann::ordered_json HullCertificate::to_json() const {
    if (verdict == Verdict::Inside) {
        return nlohmann::ordered_json{{"verdict", "inside"}, {"weights", weights}};
    }
    return nlohmann::ordered_json{
        {"verdict", "outside"},
        {"direction", std::vector<double>(direction.data(), direction.data() + direction.size())},
        {"margin", margin}};
}

}  // namespace hullwalk
