#include "doctest.h"

#include <cmath>

#include "hullwalk/errors.hpp"
#include "hullwalk/gaussian_stats.hpp"
#include "hullwalk/separator.hpp"

using namespace hullwalk;

TEST_CASE("single vector: direction is X/||X||, dist = ||X||/|b|") {
    Eigen::MatrixXd x(3, 1);
    x.col(0) << 3.0, 0.0, 4.0;
    Eigen::VectorXd b(1);
    b << 2.0;
    const auto res = min_norm_affine_unit(x, b);
    CHECK((res.u - x.col(0) / 5.0).norm() < 1e-14);
    CHECK(res.dist == doctest::Approx(2.5).epsilon(1e-14));
}

TEST_CASE("two orthonormal vectors with equal targets give the bisector") {
    // Hand-solved: E = aff{sqrt(2) e1, sqrt(2) e2}, closest point to the
    // origin is (sqrt(2)/2, sqrt(2)/2), distance 1, direction the bisector.
    Eigen::MatrixXd x(2, 2);
    x << 1.0, 0.0, 0.0, 1.0;
    Eigen::VectorXd b(2);
    b << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
    const auto res = min_norm_affine_unit(x, b);
    CHECK(res.u[0] == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
    CHECK(res.u[1] == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
    CHECK(res.dist == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("random instances satisfy the equal-margin residuals") {
    RngStream rng(31, 0);
    for (int rep = 0; rep < 50; ++rep) {
        const int d = 64, m = 16;
        Eigen::MatrixXd x(d, m);
        for (int j = 0; j < m; ++j) x.col(j) = sample_gaussian_vector(d, rng);
        Eigen::VectorXd b = sample_gaussian_vector(m, rng);
        b /= b.norm();
        const auto res = min_norm_affine_unit(x, b);
        CHECK(res.dim_hypothesis_ok);
        CHECK(std::abs(res.u.norm() - 1.0) < 1e-12);
        double sumsq = 0.0;
        for (int j = 0; j < m; ++j) {
            CHECK(std::abs(res.u.dot(x.col(j)) - res.dist * std::abs(b[j])) < 1e-9);
            sumsq += std::pow(res.u.dot(x.col(j)), 2);
        }
        // For unit b the squared margins sum to dist^2.
        CHECK(sumsq == doctest::Approx(res.dist * res.dist).epsilon(1e-9));
    }
}

TEST_CASE("u lies in span{X}") {
    RngStream rng(32, 0);
    const int d = 16, m = 4;
    Eigen::MatrixXd x(d, m);
    for (int j = 0; j < m; ++j) x.col(j) = sample_gaussian_vector(d, rng);
    Eigen::VectorXd b(m);
    b << 0.5, 0.5, 0.5, 0.5;
    const auto res = min_norm_affine_unit(x, b);
    // Residual after projecting u onto the column space of X.
    const Eigen::VectorXd proj =
        x * (x.transpose() * x).ldlt().solve(x.transpose() * res.u);
    CHECK((res.u - proj).norm() < 1e-10);
}

TEST_CASE("zero targets are kept via the epsilon floor") {
    Eigen::MatrixXd x(4, 2);
    x.col(0) << 1.0, 0.0, 0.0, 0.0;
    x.col(1) << 0.0, 1.0, 0.0, 0.0;
    Eigen::VectorXd b(2);
    b << 0.0, 0.0;
    const auto res = min_norm_affine_unit(x, b);
    // Both constraints identical targets: the bisector again.
    CHECK(res.u[0] == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-9));
    CHECK(res.u[1] == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-9));
}

TEST_CASE("duplicated directions are rank deficient") {
    Eigen::MatrixXd x(3, 2);
    x.col(0) << 1.0, 2.0, 3.0;
    x.col(1) << 1.0, 2.0, 3.0;
    Eigen::VectorXd b(2);
    b << 1.0, 1.0;
    CHECK_THROWS_AS(min_norm_affine_unit(x, b), RankDeficientError);
}

TEST_CASE("dimension hypothesis flag m <= d/2") {
    RngStream rng(33, 0);
    Eigen::MatrixXd x(4, 3);
    for (int j = 0; j < 3; ++j) x.col(j) = sample_gaussian_vector(4, rng);
    Eigen::VectorXd b = Eigen::VectorXd::Constant(3, 1.0);
    CHECK_FALSE(min_norm_affine_unit(x, b).dim_hypothesis_ok);
}
