#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

namespace hullwalk {

/// One row of the statistical self-check table. A check passes iff
/// statistic <= bound.
struct LemmaCheckRow {
    std::string check;
    long trials = 0;
    double statistic = 0.0;
    double bound = 0.0;
    bool pass = false;
};

struct LemmaCheckOptions {
    /// Fault injection: scales the bridge noise variance inside the bridge
    /// checks. Anything but 1.0 must make them fail.
    double bridge_variance_scale = 1.0;
};

/// Runs the Gaussian-bound, Brownian-bridge and min-norm-direction
/// invariant suites at the given trial count.
std::vector<LemmaCheckRow> run_lemma_checks(long trials, std::uint64_t seed,
                                            const LemmaCheckOptions& options = {});

std::string lemma_rows_to_csv(const std::vector<LemmaCheckRow>& rows);
nlohmann::ordered_json lemma_rows_to_json(const std::vector<LemmaCheckRow>& rows);

}  // namespace hullwalk
