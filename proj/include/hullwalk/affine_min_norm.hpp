#pragma once

#include <Eigen/Dense>

namespace hullwalk {

/// Coefficients of the minimum-norm point of the affine hull of the columns
/// of Y: argmin ||Y*lambda|| subject to sum(lambda) = 1, via the bordered
/// Gram system. Returns false (leaving coeffs unspecified) when the Gram
/// matrix condition number exceeds cond_cap. Requires linearly independent
/// columns; use the centered variant when only affine independence holds.
bool try_affine_min_norm(const Eigen::MatrixXd& y, Eigen::VectorXd& coeffs,
                         double cond_cap = 1e12);

/// Same minimizer through the centered (difference) system, which tolerates
/// linearly dependent columns as long as the points are affinely
/// independent (e.g. a corral containing the origin or points collinear
/// with it). Returns false on affine dependence.
bool try_affine_min_norm_centered(const Eigen::MatrixXd& y, Eigen::VectorXd& coeffs,
                                  double cond_cap = 1e12);

}  // namespace hullwalk
