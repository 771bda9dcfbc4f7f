#include "hullwalk/affine_min_norm.hpp"

#include <Eigen/Eigenvalues>

namespace hullwalk {

bool try_affine_min_norm(const Eigen::MatrixXd& y, Eigen::VectorXd& coeffs, double cond_cap) {
    const Eigen::Index m = y.cols();
    if (m == 0) return false;
    if (m == 1) {
        coeffs = Eigen::VectorXd::Ones(1);
        return true;
    }
    const Eigen::MatrixXd gram = y.transpose() * y;

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram, Eigen::EigenvaluesOnly);
    const double emax = eig.eigenvalues().maxCoeff();
    const double emin = eig.eigenvalues().minCoeff();
    if (!(emax > 0.0) || emin < emax / cond_cap) return false;

    // Stationarity of ||Y*lambda||^2 under sum(lambda) = 1:
    //   [G  1] [lambda]   [0]
    //   [1' 0] [  mu  ] = [1]
    // The coefficients are invariant under scaling G, so normalize by the
    // top eigenvalue to keep the bordered pivots comparable.
    Eigen::MatrixXd bordered = Eigen::MatrixXd::Zero(m + 1, m + 1);
    bordered.topLeftCorner(m, m) = gram / emax;
    bordered.topRightCorner(m, 1).setOnes();
    bordered.bottomLeftCorner(1, m).setOnes();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m + 1);
    rhs[m] = 1.0;

    Eigen::FullPivLU<Eigen::MatrixXd> lu(bordered);
    if (!lu.isInvertible()) return false;
    const Eigen::VectorXd sol = lu.solve(rhs);
    if (!sol.allFinite()) return false;
    coeffs = sol.head(m);
    return true;
}

bool try_affine_min_norm_centered(const Eigen::MatrixXd& y, Eigen::VectorXd& coeffs,
                                  double cond_cap) {
    const Eigen::Index m = y.cols();
    if (m == 0) return false;
    coeffs.resize(m);
    if (m == 1) {
        coeffs[0] = 1.0;
        return true;
    }
    // Parametrize the affine hull as base + V*mu with V the differences;
    // the normal equations V'V mu = -V'base give the projection of the
    // origin. V'V is singular exactly on affine dependence.
    const Eigen::VectorXd base = y.col(m - 1);
    Eigen::MatrixXd v(y.rows(), m - 1);
    for (Eigen::Index i = 0; i + 1 < m; ++i) v.col(i) = y.col(i) - base;
    const Eigen::MatrixXd gram = v.transpose() * v;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram, Eigen::EigenvaluesOnly);
    const double emax = eig.eigenvalues().maxCoeff();
    const double emin = eig.eigenvalues().minCoeff();
    if (!(emax > 0.0) || emin < emax / cond_cap) return false;
    const Eigen::VectorXd mu = (gram / emax).ldlt().solve(-v.transpose() * base / emax);
    if (!mu.allFinite()) return false;
    coeffs.head(m - 1) = mu;
    coeffs[m - 1] = 1.0 - mu.sum();
    return true;
}

}  // namespace hullwalk
