#include "hullwalk/lemma_checks.hpp"

#include <cmath>
#include <sstream>

#include "hullwalk/dyadic_path.hpp"
#include "hullwalk/experiment.hpp"
#include "hullwalk/gaussian_stats.hpp"
#include "hullwalk/rng.hpp"
#include "hullwalk/separator.hpp"

namespace hullwalk {

namespace {

LemmaCheckRow row(const std::string& check, long trials, double statistic, double bound) {
    return {check, trials, statistic, bound, statistic <= bound};
}

}  // namespace

std::vector<LemmaCheckRow> run_lemma_checks(long trials, std::uint64_t seed,
                                            const LemmaCheckOptions& options) {
    std::vector<LemmaCheckRow> rows;
    const double t = static_cast<double>(trials);

    {  // Moments of the Gaussian sampler.
        RngStream rng(seed, 0);
        double sum = 0.0, sumsq = 0.0;
        for (long i = 0; i < trials; ++i) {
            const double g = rng.next_gaussian();
            sum += g;
            sumsq += g * g;
        }
        const double mean = sum / t;
        const double var = sumsq / t - mean * mean;
        rows.push_back(row("gaussian_mean", trials, std::abs(mean), 3.3 / std::sqrt(t)));
        rows.push_back(
            row("gaussian_variance", trials, std::abs(var - 1.0), 3.3 * std::sqrt(2.0 / t)));
    }

    for (double tau : {1.0, 2.0, 3.0}) {  // Tail bound dominates the empirical tail.
        RngStream rng(seed, 10 + static_cast<std::uint64_t>(tau));
        long hits = 0;
        for (long i = 0; i < trials; ++i) {
            if (rng.next_gaussian() >= tau) ++hits;
        }
        const double p = gaussian_tail_exact(tau);
        const double slack = 3.0 * std::sqrt(p * (1.0 - p) / t);
        std::ostringstream name;
        name << "gaussian_tail_tau" << static_cast<int>(tau);
        rows.push_back(row(name.str(), trials, static_cast<double>(hits) / t,
                           gaussian_tail_bound(tau) + slack));
    }

    {  // Singular value interval at (n, m, t) = (200, 50, 3).
        const BoundCheckReport report =
            check_singular_value_interval(200, 50, 3.0, trials, RngStream(seed, 20));
        rows.push_back(row("singular_value_interval", trials, report.empirical_rate,
                           report.bound + 3.0 * std::sqrt(report.bound / t)));
    }

    {  // Truncated-norm concentration at (q, r) = (1e4, 3).
        const long q = 10000;
        const double r = 3.0;
        const TruncatedNormBound bound = truncated_norm_bound(q, r);
        RngStream rng(seed, 30);
        const long reps = std::min<long>(trials, 1000);
        double worst = 0.0;
        for (long i = 0; i < reps; ++i) {
            worst = std::max(worst, sample_truncated_norm(q, r, rng));
        }
        rows.push_back(row("truncated_norm", reps, worst / bound.threshold, 1.0));
    }

    {  // Bridge noise variance at s = 1.5 between stored times 1 and 2.
        double sumsq = 0.0;
        const TimeKey one = TimeKey::exp2(0, 0);
        const TimeKey two = TimeKey::exp2(1, 0);
        for (long i = 0; i < trials; ++i) {
            DyadicPath path = DyadicPath::init(
                1, {one, two}, RngStream(seed, 40).substream(static_cast<std::uint64_t>(i)));
            path.set_bridge_variance_scale(options.bridge_variance_scale);
            const Eigen::VectorXd w =
                0.5 * (path.value(one) + path.value(two));
            const Eigen::VectorXd at = path.bridge_refine(TimeKey::raw(1.5));
            const double u = at[0] - w[0];
            sumsq += u * u;
        }
        const double var = sumsq / t;
        rows.push_back(row("bridge_variance", trials, std::abs(var - 0.25),
                           4.5 * 0.25 * std::sqrt(2.0 / t)));
    }

    {  // BM covariance: cov(BM(1), BM(2)) = min(1, 2) = 1.
        const TimeKey one = TimeKey::exp2(0, 0);
        const TimeKey two = TimeKey::exp2(1, 0);
        double sum = 0.0;
        for (long i = 0; i < trials; ++i) {
            DyadicPath path = DyadicPath::init(
                1, {one, two}, RngStream(seed, 50).substream(static_cast<std::uint64_t>(i)));
            sum += path.value(one)[0] * path.value(two)[0];
        }
        rows.push_back(
            row("bm_covariance", trials, std::abs(sum / t - 1.0), 4.0 * std::sqrt(3.0 / t)));
    }

    {  // Poisson arrival count has mean alpha.
        const double alpha = 100.0;
        RngStream rng(seed, 60);
        long total = 0;
        for (long i = 0; i < trials; ++i) {
            RngStream trial_rng = rng.substream(static_cast<std::uint64_t>(i));
            total += static_cast<long>(poisson_times(alpha, trial_rng).size());
        }
        const double mean = static_cast<double>(total) / t;
        rows.push_back(
            row("poisson_count", trials, std::abs(mean - alpha), 3.0 * std::sqrt(alpha / t)));
    }

    {  // Equal-margin direction residuals at (d, m) = (64, 16).
        const int d = 64, m = 16;
        RngStream rng(seed, 70);
        const long reps = std::min<long>(trials, 1000);
        double worst = 0.0;
        for (long i = 0; i < reps; ++i) {
            Eigen::MatrixXd x(d, m);
            for (int jcol = 0; jcol < m; ++jcol) x.col(jcol) = sample_gaussian_vector(d, rng);
            Eigen::VectorXd b = sample_gaussian_vector(m, rng);
            b /= b.norm();
            const MinNormAffineUnit res = min_norm_affine_unit(x, b);
            for (int jcol = 0; jcol < m; ++jcol) {
                worst = std::max(worst,
                                 std::abs(res.u.dot(x.col(jcol)) - res.dist * std::abs(b[jcol])));
            }
            worst = std::max(worst, std::abs(res.u.norm() - 1.0));
        }
        rows.push_back(row("minnorm_residual", reps, worst, 1e-9));
    }

    return rows;
}

std::string lemma_rows_to_csv(const std::vector<LemmaCheckRow>& rows) {
    std::ostringstream os;
    os << "check,trials,statistic,bound,pass\n";
    for (const auto& r : rows) {
        os << r.check << ',' << r.trials << ',' << canonical_number(r.statistic) << ','
           << canonical_number(r.bound) << ',' << (r.pass ? "true" : "false") << '\n';
    }
    return os.str();
}

nlohmann::ordered_json lemma_rows_to_json(const std::vector<LemmaCheckRow>& rows) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& r : rows) {
        arr.push_back(nlohmann::ordered_json{{"check", r.check},
                                             {"trials", r.trials},
                                             {"statistic", r.statistic},
                                             {"bound", r.bound},
                                             {"pass", r.pass}});
    }
    return arr;
}

}  // namespace hullwalk
