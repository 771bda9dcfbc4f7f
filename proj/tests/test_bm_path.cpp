#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "hullwalk/dyadic_path.hpp"
#include "hullwalk/errors.hpp"

using namespace hullwalk;

namespace {

const TimeKey kOne = TimeKey::exp2(0, 0);
const TimeKey kTwo = TimeKey::exp2(1, 0);

}  // namespace

TEST_CASE("path_init validates its time list") {
    RngStream rng(1, 0);
    CHECK_THROWS_AS(DyadicPath::init(1, {kTwo, kOne}, rng), std::invalid_argument);
    CHECK_THROWS_AS(DyadicPath::init(1, {kOne, kOne}, rng), std::invalid_argument);
    const DyadicPath empty = DyadicPath::init(2, {}, rng);
    CHECK(empty.size() == 0);  // only the implicit BM(0) = 0
    CHECK_THROWS_AS(empty.value(kOne), MissingGridTimeError);
}

TEST_CASE("BM(1) has unit variance per coordinate") {
    const long trials = 100000;
    double sumsq = 0.0;
    for (long i = 0; i < trials; ++i) {
        DyadicPath path = DyadicPath::init(1, {kOne}, RngStream(100, i));
        const double v = path.value(kOne)[0];
        sumsq += v * v;
    }
    CHECK(sumsq / trials == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("BM covariance is min(s, t)") {
    const long trials = 100000;
    double acc = 0.0;
    for (long i = 0; i < trials; ++i) {
        DyadicPath path = DyadicPath::init(2, {kOne, kTwo}, RngStream(101, i));
        acc += path.value(kOne)[0] * path.value(kTwo)[0];
    }
    CHECK(acc / trials == doctest::Approx(1.0).epsilon(0.03));
}

TEST_CASE("bridge refinement: variance, immutability, no extrapolation") {
    RngStream rng(7, 0);
    DyadicPath path = DyadicPath::init(3, {kOne, kTwo}, rng);
    const auto before = path.snapshot();

    const TimeKey mid = TimeKey::raw(1.5);
    CHECK_THROWS_AS(path.value(mid), MissingGridTimeError);
    path.bridge_refine(mid);
    CHECK(path.contains(mid));

    // Previously stored values unchanged; snapshot differs only by the key.
    const auto after = path.snapshot();
    REQUIRE(after.size() == before.size() + 1);
    CHECK(after[0] == before[0]);
    CHECK(after[2] == before[1]);

    CHECK_THROWS_AS(path.bridge_refine(mid), std::invalid_argument);       // already stored
    CHECK_THROWS_AS(path.bridge_refine(TimeKey::raw(5.0)), std::invalid_argument);  // beyond end
}

TEST_CASE("bridge noise variance matches (b-s)(s-a)/(b-a)") {
    const long trials = 100000;
    const TimeKey mid = TimeKey::raw(1.5);
    double sumsq = 0.0;
    for (long i = 0; i < trials; ++i) {
        DyadicPath path = DyadicPath::init(1, {kOne, kTwo}, RngStream(102, i));
        const double w = 0.5 * (path.value(kOne)[0] + path.value(kTwo)[0]);
        const double u = path.bridge_refine(mid)[0] - w;
        sumsq += u * u;
    }
    CHECK(sumsq / trials == doctest::Approx(0.25).epsilon(0.02));
}

TEST_CASE("degenerate bridge: s near an endpoint pins the value") {
    const TimeKey s = TimeKey::raw(1.0 + 1e-12);
    DyadicPath path = DyadicPath::init(2, {kOne, kTwo}, RngStream(9, 0));
    const Eigen::VectorXd at_one = path.value(kOne);
    const Eigen::VectorXd at_s = path.bridge_refine(s);
    CHECK((at_s - at_one).norm() < 1e-4);
}

TEST_CASE("refinement order does not change the law (KS on BM(1.5))") {
    const long trials = 20000;
    std::vector<double> direct, refined;
    direct.reserve(trials);
    refined.reserve(trials);
    const TimeKey mid = TimeKey::raw(1.5);
    for (long i = 0; i < trials; ++i) {
        DyadicPath a = DyadicPath::init(1, {kOne, mid, kTwo}, RngStream(103, i));
        direct.push_back(a.value(mid)[0]);
        DyadicPath b = DyadicPath::init(1, {kOne, kTwo}, RngStream(104, i));
        b.bridge_refine(mid);
        refined.push_back(b.value(mid)[0]);
    }
    std::sort(direct.begin(), direct.end());
    std::sort(refined.begin(), refined.end());
    // Two-sample Kolmogorov-Smirnov distance.
    double d = 0.0;
    std::size_t i = 0, j = 0;
    while (i < direct.size() && j < refined.size()) {
        if (direct[i] <= refined[j]) ++i; else ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / direct.size() -
                                 static_cast<double>(j) / refined.size()));
    }
    // Critical value at level 1e-3.
    const double crit = std::sqrt(-0.5 * std::log(0.5e-3)) *
                        std::sqrt(2.0 / static_cast<double>(trials));
    CHECK(d < crit);
}

TEST_CASE("poisson_times: range, order and count moments") {
    RngStream rng(11, 0);
    long total = 0;
    const int trials = 10000;
    const double alpha = 100.0;
    for (int trial = 0; trial < trials; ++trial) {
        RngStream sub = rng.substream(trial);
        const auto times = poisson_times(alpha, sub);
        total += static_cast<long>(times.size());
        for (std::size_t i = 0; i < times.size(); ++i) {
            CHECK(times[i].value() > 0.0);
            CHECK(times[i].value() <= 1.0);
            if (i > 0) CHECK(TimeKey::less(times[i - 1], times[i]));
        }
    }
    const double mean = static_cast<double>(total) / trials;
    CHECK(mean == doctest::Approx(alpha).epsilon(0.03));

    RngStream tiny(11, 1);
    int nonempty = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        RngStream sub = tiny.substream(trial);
        if (!poisson_times(1e-6, sub).empty()) ++nonempty;
    }
    CHECK(nonempty == 0);

    CHECK_THROWS_AS(poisson_times(0.0, rng), std::invalid_argument);
    CHECK_THROWS_AS(poisson_times(2e9, rng), std::invalid_argument);
}

TEST_CASE("project: identity, empty block, Pythagoras") {
    RngStream rng(13, 0);
    Eigen::VectorXd v(4);
    v << 1.0, -2.0, 3.0, -4.0;
    CoordinateBlock all{0, 1, {0, 1, 2, 3}};
    CHECK(project(v, all) == v);
    CoordinateBlock none{0, 1, {}};
    CHECK(project(v, none).norm() == 0.0);
    CoordinateBlock half{0, 1, {0, 2}};
    CoordinateBlock other{0, 1, {1, 3}};
    const Eigen::VectorXd a = project(v, half);
    const Eigen::VectorXd b = project(v, other);
    CHECK(a.squaredNorm() + b.squaredNorm() == doctest::Approx(v.squaredNorm()));
    CHECK(project(a, half) == a);  // idempotent
    CoordinateBlock bad{0, 1, {7}};
    CHECK_THROWS_AS(project(v, bad), std::invalid_argument);
}

TEST_CASE("bridge_exceedance_prob closed form") {
    CHECK(bridge_exceedance_prob(0.5) == doctest::Approx(std::exp(-0.5)).epsilon(1e-15));
    // tau = 2*sqrt(ln n) at n = 16 gives 16^-8.
    const double tau = 2.0 * std::sqrt(std::log(16.0));
    CHECK(bridge_exceedance_prob(tau) == doctest::Approx(std::pow(16.0, -8.0)).epsilon(1e-10));
    CHECK_THROWS_AS(bridge_exceedance_prob(0.0), std::invalid_argument);
}

TEST_CASE("simulated bridge maximum frequency brackets exp(-2 tau^2)") {
    // Standard bridge on a 1000-point grid, tau = 1; the discrete max
    // undercounts slightly, so the window is asymmetric.
    const int grid = 1000;
    const long trials = 100000;
    long hits = 0;
    const double dt = 1.0 / grid;
    for (long trial = 0; trial < trials; ++trial) {
        RngStream rng(105, trial);
        double w = 0.0;
        double maxw = 0.0;
        std::vector<double> walk(grid + 1);
        walk[0] = 0.0;
        for (int i = 1; i <= grid; ++i) {
            w += std::sqrt(dt) * rng.next_gaussian();
            walk[i] = w;
        }
        for (int i = 1; i <= grid; ++i) {
            const double bridge = walk[i] - (static_cast<double>(i) / grid) * w;
            maxw = std::max(maxw, bridge);
        }
        if (maxw >= 1.0) ++hits;
    }
    const double freq = static_cast<double>(hits) / trials;
    const double p = bridge_exceedance_prob(1.0);
    CHECK(freq <= p + 0.01);
    CHECK(freq >= p - 0.02);
}

TEST_CASE("certify_sign_on_interval") {
    DyadicPath path = DyadicPath::init(2, {kOne, kTwo}, RngStream(15, 0));
    Eigen::VectorXd u(2);

    SUBCASE("huge margins certify immediately") {
        const Eigen::VectorXd v1 = path.value(kOne);
        u = v1 / v1.norm();
        // Force both endpoint products positive by aligning with BM(1); if
        // BM(2) is misaligned, take the bisector instead.
        if (u.dot(path.value(kTwo)) <= 0.0) {
            Eigen::VectorXd v2 = path.value(kTwo);
            u = (v1 / v1.norm() + v2 / v2.norm()).normalized();
        }
        REQUIRE(u.dot(path.value(kOne)) > 0.0);
        REQUIRE(u.dot(path.value(kTwo)) > 0.0);
        const Eigen::VectorXd scaled = u * 1.0;  // margins are O(1), eps generous
        const auto check = certify_sign_on_interval(path, scaled, kOne, kTwo, 0.999999);
        CHECK(check.status != IntervalCheck::Status::Failed);
    }

    SUBCASE("nonpositive endpoint fails") {
        u << 1.0, 0.0;
        const Eigen::VectorXd flipped = -path.value(kOne).normalized();
        const auto check = certify_sign_on_interval(path, flipped, kOne, kTwo, 0.5);
        CHECK(check.status == IntervalCheck::Status::Failed);
    }

    SUBCASE("refine key is the geometric mean") {
        DyadicPath fresh = DyadicPath::init(1, {kOne, kTwo}, RngStream(16, 3));
        Eigen::VectorXd dir(1);
        dir << (fresh.value(kOne)[0] > 0 ? 1.0 : -1.0);
        if (dir[0] * fresh.value(kTwo)[0] <= 0.0) return;  // skip sign-mixed draw
        const auto check = certify_sign_on_interval(fresh, dir, kOne, kTwo, 0.0);
        REQUIRE(check.status == IntervalCheck::Status::Refine);
        CHECK(*check.refine_key == TimeKey::exp2(1, 1));
    }

    SUBCASE("non-adjacent keys rejected") {
        DyadicPath three = DyadicPath::init(1, block_grid(2, 0), RngStream(17, 0));
        Eigen::VectorXd dir(1);
        dir << 1.0;
        CHECK_THROWS_AS(
            certify_sign_on_interval(three, dir, kOne, TimeKey::exp2(2, 0), 0.5),
            std::invalid_argument);
    }
}

TEST_CASE("residual matches the exact bridge dip law (Monte Carlo)") {
    // Endpoints v1 = 0.8, v2 = 1.2 over a unit gap: dip probability is
    // exp(-2*v1*v2). Simulate conditioned bridges and compare.
    const double v1 = 0.8, v2 = 1.2;
    const int grid = 800;
    const long trials = 200000;
    long dips = 0;
    for (long trial = 0; trial < trials; ++trial) {
        RngStream rng(106, trial);
        double w = 0.0;
        std::vector<double> walk(grid + 1);
        walk[0] = 0.0;
        for (int i = 1; i <= grid; ++i) {
            w += std::sqrt(1.0 / grid) * rng.next_gaussian();
            walk[i] = w;
        }
        bool dipped = false;
        for (int i = 0; i <= grid; ++i) {
            const double s = static_cast<double>(i) / grid;
            const double bridge = walk[i] - s * w;          // standard bridge
            const double value = v1 * (1.0 - s) + v2 * s + bridge;
            if (value <= 0.0) {
                dipped = true;
                break;
            }
        }
        if (dipped) ++dips;
    }
    const double freq = static_cast<double>(dips) / trials;
    const double exact = std::exp(-2.0 * v1 * v2);
    // Discretization undercounts; allow a one-sided window.
    CHECK(freq <= exact + 0.005);
    CHECK(freq >= exact - 0.02);
}
