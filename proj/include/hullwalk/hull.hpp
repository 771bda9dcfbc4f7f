#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

#include "json.hpp"

namespace hullwalk {

/// Output of the minimum-norm-point solver over a convex hull.
struct MinNormPoint {
    Eigen::VectorXd point;        // p* = argmin_{x in conv} ||x|| (within tol)
    std::vector<double> weights;  // convex combination over the input points
    bool optimal = true;          // false when the iteration cap was hit
    int iterations = 0;
};

/// Wolfe's minimum-norm-point method (major/minor cycles over a corral of
/// affinely independent points). Optimality criterion:
/// <p*, p_j> >= ||p*||^2 - tol*||p*|| for every input point.
MinNormPoint min_norm_point(const std::vector<Eigen::VectorXd>& points, double tol);

/// Membership certificate: convex weights hitting the origin, or a unit
/// direction with positive margin separating it.
struct HullCertificate {
    enum class Verdict { Inside, Outside };
    Verdict verdict = Verdict::Outside;
    std::vector<double> weights;  // Inside: >= 0, sums to 1, ||sum w_j p_j|| <= tol
    Eigen::VectorXd direction;    // Outside: unit vector
    double margin = 0.0;          // Outside: min_j <direction, p_j> > 0

    nlohmann::ordered_json to_json() const;
};

struct Membership {
    enum class Kind { Inside, Outside, Ambiguous };
    Kind kind = Kind::Ambiguous;
    std::optional<HullCertificate> certificate;  // absent iff Ambiguous
    double min_norm = 0.0;                       // ||p*||
};

/// Default tolerance: 1e-9 * (1 + max point norm).
double default_hull_tol(const std::vector<Eigen::VectorXd>& points);

/// Decides whether the origin lies in conv(points). ||p*|| <= tol gives
/// Inside, ||p*|| > 2*tol gives Outside; the band in between is surfaced as
/// Ambiguous rather than silently resolved. Every certificate is re-checked
/// against the raw points before being returned; a failed re-check raises
/// InternalError (and counts toward certificate_violation_count()).
Membership origin_membership(const std::vector<Eigen::VectorXd>& points, double tol);

/// Recomputes a certificate's invariants from scratch against the points.
bool check_certificate(const HullCertificate& cert,
                       const std::vector<Eigen::VectorXd>& points, double tol);

/// Brute-force planar membership oracle: sorts point angles and checks the
/// maximal circular gap against pi. Requires nonzero 2-D points.
bool oracle_2d(const std::vector<Eigen::VectorXd>& points);

/// Number of certificate re-checks that ever failed in this process.
std::uint64_t certificate_violation_count();

/// Parses the CLI point-set format: a JSON array of coordinate arrays,
/// all of the same dimension >= 1.
std::vector<Eigen::VectorXd> points_from_json(const nlohmann::json& doc);

/// Certificate (or the surfaced Ambiguous band) as JSON.
nlohmann::ordered_json membership_to_json(const Membership& membership);

}  // namespace hullwalk
