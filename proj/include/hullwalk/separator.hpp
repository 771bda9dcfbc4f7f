#pragma once

#include <Eigen/Dense>
#include <vector>

#include "hullwalk/dyadic_path.hpp"
#include "hullwalk/schedule.hpp"

#include "json.hpp"

namespace hullwalk {

/// Equal-margin unit direction against a family of vectors.
struct MinNormAffineUnit {
    Eigen::VectorXd u;  // unit vector in span{X_i}
    double dist = 0.0;  // distance from the origin to aff{X_i/|b_i|}
    bool dim_hypothesis_ok = true;  // m <= d/2
};

/// The unit vector orthogonal to the affine hull of {X_i/|b_i|} pointing at
/// its minimum-norm point, so that <u, X_i> = dist * |b_i| for every i.
/// Columns of X are the vectors; zero targets b_i are replaced by 1e-12.
/// Throws RankDeficientError when the Gram system is numerically singular.
MinNormAffineUnit min_norm_affine_unit(const Eigen::MatrixXd& x, const Eigen::VectorXd& b);

struct TraceEntry {
    int k = 0;
    int ell = 0;
    int active_count = 0;
    double stat_norm = 0.0;
};

/// State after substep (k, ell): the current unit vector, the block
/// statistics that produced it and the active set they induce.
struct SeparatorState {
    int k = 0;
    int ell = 0;
    Eigen::VectorXd u;
    Eigen::VectorXd stats;    // B(k, ell), length N+1
    std::vector<int> active;  // I(k, ell)
    std::vector<TraceEntry> trace;
    int fallback_count = 0;  // substeps that used the fixed fallback direction
};

/// Per-step record of whether all block statistics vanished after the last
/// substep, read at the two natural threshold choices.
struct StepReport {
    int k = 0;
    bool strict_holds = false;   // thresholds f(k, M'+1), h(k, M'+1)
    bool handoff_holds = false;  // thresholds f(k+1, 0), h(k+1, 0)
    double strict_norm = 0.0;
    double handoff_norm = 0.0;
};

struct SeparatorResult {
    Eigen::VectorXd u_final;
    bool success = false;  // deterministic grid verification, never the theorem
    double margin = 0.0;   // min over grid of <u, BM(t)/sqrt(t)>
    std::vector<TraceEntry> trace;
    std::vector<TimeKey> grid;
    std::vector<StepReport> steps;
    int fallback_count = 0;

    nlohmann::ordered_json to_json(const Schedule& schedule) const;
};

struct VerifyOutcome {
    bool ok = false;
    double min_margin = 0.0;  // min over grid of <u, BM(t)/sqrt(t)>
};

struct ContinuumOutcome {
    bool certified = false;
    double residual = 1.0;  // bound on P{some dip between grid points}
    int refinements = 0;
    bool dip_found = false;  // a refined point had a nonpositive inner product
};

/// The i-th block statistic B_i(k, ell) of direction u: the clamped worst
/// deficit of the path's inner products on block [a_i, a_{i+1}] against the
/// thresholds h(k, ell) (interior dips) and f(k, ell) (block increment).
double block_statistic(const DyadicPath& path, const Eigen::VectorXd& u, int k, int ell,
                       int block, const Schedule& schedule);

/// All N+1 block statistics as a vector.
Eigen::VectorXd block_statistics(const DyadicPath& path, const Eigen::VectorXd& u, int k,
                                 int ell, const Schedule& schedule);

/// The initial direction: equal-margin unit vector (supported on J_1^0)
/// against the normalized block increments, with the constant target
/// b_i = 2*f(1,0)/c_L.
Eigen::VectorXd initial_vector(const DyadicPath& path, const Schedule& schedule);

/// One substep: starting from state (k, ell-1) (or (k-1, M') at a step
/// boundary) computes the block statistics, builds the perturbation on
/// block J_ell^k -- the equal-margin direction against the refined-grid
/// increments of active blocks, or the fixed fallback vector when the
/// active set is empty or too large -- and mixes it in with weight
/// alpha(k, ell).
SeparatorState substep(const SeparatorState& state, const DyadicPath& path,
                       const Schedule& schedule);

/// Runs the initial vector plus all M*M' substeps; success is decided by
/// re-running verify_certificate on the level-M grid.
SeparatorResult run_construction(const DyadicPath& path, const Schedule& schedule);

/// True iff <u, BM(t)> > 0 for every grid time; also the minimum of
/// <u, BM(t)/sqrt(t)>.
VerifyOutcome verify_certificate(const DyadicPath& path, const Eigen::VectorXd& u,
                                 const std::vector<TimeKey>& grid);

/// Extends a grid certificate to the continuum: bounds the probability of a
/// sign dip inside every adjacent interval by the bridge law and refines the
/// path (bridge conditioning) until the total is <= eps or depth runs out.
/// Fails hard if a refined point has a nonpositive inner product.
ContinuumOutcome certify_continuum(DyadicPath& path, const Eigen::VectorXd& u,
                                   const std::vector<TimeKey>& grid, double eps,
                                   int max_depth);

}  // namespace hullwalk
