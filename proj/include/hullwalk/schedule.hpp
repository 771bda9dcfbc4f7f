#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hullwalk/dyadic_path.hpp"

#include "json.hpp"

namespace hullwalk {

/// Inputs for building a Schedule.
///
/// Two presets:
///  - "paper": N = ceil(c*n), M = max(1, ceil(log2 ln n)),
///    M' = max(1, ceil(log2(ln n)/4)), and C_f is derived from the coupling
///    8*c*f(1,0)^2 = c_J*c_L^2 so the constants satisfy the construction's
///    consistency relation exactly.
///  - "desk": N, M, M' and C_h are free knobs for experiments at small n;
///    the relation is not enforced.
/// In both, C_f = 2*(1-2^(-1/4))^(-2) * C_h.
struct ScheduleConfig {
    int n = 256;
    std::string preset = "desk";
    double c = 1.0 / 32;  // horizon constant (paper preset input; derived as N/n otherwise)
    double C_h = 0.5;     // desk preset input
    double c_J = 0.15;
    double c_L = 0.1;  // constant of the min-norm direction bound
    std::optional<int> N;
    std::optional<int> Mprime;
    std::optional<int> M;
};

/// All constants and derived tables of the separating-vector construction.
class Schedule {
public:
    static Schedule make(const ScheduleConfig& cfg);

    /// Decreasing threshold table; closed form of the recursion
    /// f(k,l-1) - f(k,l) = C_f*2^(-(k+l)/4) with handoff
    /// f(k,0) = lim_l f(k-1,l) and f(0,0) = C_f + (1-2^(-1/4))^(-2)*C_f.
    double f(int k, int ell) const;
    /// Increasing companion with increments C_h*2^(-(k+l)/4) from h(0,0) = 0.
    double h(int k, int ell) const;
    /// Mixing weight alpha(k,l) = 16^(-k-l).
    double alpha(int k, int ell) const;

    /// The coordinate block J_l^k, k in [0, M], l in [1, M'].
    const CoordinateBlock& block(int k, int ell) const;
    std::vector<const CoordinateBlock*> all_blocks() const;

    /// Numeric check of 8*c*f(1,0)^2 = c_J*c_L^2 (relative error).
    double relation_residual() const;

    nlohmann::ordered_json constants_json() const;

    int n = 0;
    int N = 0;       // number of blocks [a_i, a_{i+1}]
    int M = 0;       // steps
    int Mprime = 0;  // substeps per step
    double c = 0.0;
    double C_h = 0.0;
    double C_f = 0.0;
    double c_J = 0.0;
    double c_L = 0.0;
    bool paper_constants = false;

private:
    int block_index(int k, int ell) const;
    std::vector<CoordinateBlock> blocks_;
};

/// 2*(1-2^(-1/4))^(-2), the fixed C_f/C_h ratio.
double cf_over_ch();

}  // namespace hullwalk
