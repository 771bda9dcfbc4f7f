#include "hullwalk/schedule.hpp"

#include <cmath>
#include <stdexcept>

#include "hullwalk/errors.hpp"

namespace hullwalk {

namespace {

// Powers of x = 2^(-1/4), the decay ratio of the threshold increments.
double x_pow(int p) { return std::exp2(-0.25 * static_cast<double>(p)); }

// sum_{q=1}^{ell} 2^(-q/4)
double geo_tail(int ell) {
    const double x = x_pow(1);
    return x * (1.0 - x_pow(ell)) / (1.0 - x);
}

// sum_{p=0}^{k-1} 2^(-p/4)
double geo_head(int k) {
    const double x = x_pow(1);
    return (1.0 - x_pow(k)) / (1.0 - x);
}

// Shared inner bracket: S*head(k) + 2^(-k/4)*tail(ell), S = x/(1-x).
double ramp(int k, int ell) {
    const double x = x_pow(1);
    const double s = x / (1.0 - x);
    return s * geo_head(k) + x_pow(k) * geo_tail(ell);
}

// f(1,0)/C_f: 1 + (1-x)^(-2) - S.
double f10_over_cf() {
    const double x = x_pow(1);
    const double inv = 1.0 / (1.0 - x);
    return 1.0 + inv * inv - x * inv;
}

}  // namespace

double cf_over_ch() {
    const double x = x_pow(1);
    const double inv = 1.0 / (1.0 - x);
    return 2.0 * inv * inv;
}

Schedule Schedule::make(const ScheduleConfig& cfg) {
    if (cfg.n < 4) throw ConfigError("schedule: n must be >= 4");
    if (!(cfg.c_J > 0.0) || !(cfg.c_L > 0.0)) {
        throw NonPositiveConstantError("schedule: c_J and c_L must be positive");
    }

    Schedule s;
    s.n = cfg.n;
    s.c_J = cfg.c_J;
    s.c_L = cfg.c_L;
    const double lnn = std::log(static_cast<double>(cfg.n));

    if (cfg.preset == "paper") {
        if (!(cfg.c > 0.0)) throw NonPositiveConstantError("schedule: c must be positive");
        s.paper_constants = true;
        s.c = cfg.c;
        s.N = cfg.N.value_or(static_cast<int>(std::ceil(cfg.c * cfg.n)));
        s.M = cfg.M.value_or(std::max(1, static_cast<int>(std::ceil(std::log2(lnn)))));
        s.Mprime =
            cfg.Mprime.value_or(std::max(1, static_cast<int>(std::ceil(0.25 * std::log2(lnn)))));
        // 8*c*f(1,0)^2 = c_J*c_L^2 determines C_f (and with it C_h).
        s.C_f = cfg.c_L * std::sqrt(cfg.c_J / (8.0 * cfg.c)) / f10_over_cf();
        s.C_h = s.C_f / cf_over_ch();
    } else if (cfg.preset == "desk") {
        if (!(cfg.C_h > 0.0)) throw NonPositiveConstantError("schedule: C_h must be positive");
        s.paper_constants = false;
        s.N = cfg.N.value_or(8);
        s.M = cfg.M.value_or(3);
        s.Mprime = cfg.Mprime.value_or(2);
        s.c = static_cast<double>(s.N) / static_cast<double>(s.n);
        s.C_h = cfg.C_h;
        s.C_f = cf_over_ch() * cfg.C_h;
    } else {
        throw ConfigError("schedule: unknown preset '" + cfg.preset + "'");
    }
    if (s.N < 1 || s.M < 1 || s.Mprime < 1) {
        throw ConfigError("schedule: N, M, M' must all be >= 1");
    }

    // Greedy disjoint block assignment in (k, ell) lexicographic order.
    int next = 0;
    for (int k = 0; k <= s.M; ++k) {
        for (int ell = 1; ell <= s.Mprime; ++ell) {
            const double raw = s.c_J * s.n * std::exp2(-(k + ell) / 8.0);
            const int size = static_cast<int>(std::floor(raw));
            if (size < 2) {
                throw ConfigError("schedule: block J_" + std::to_string(ell) + "^" +
                                  std::to_string(k) + " has size < 2; increase c_J");
            }
            if (next + size > s.n) {
                throw BlockBudgetExceededError(
                    "schedule: coordinate blocks do not fit in n = " + std::to_string(s.n));
            }
            CoordinateBlock block;
            block.k = k;
            block.ell = ell;
            block.indices.resize(size);
            for (int i = 0; i < size; ++i) block.indices[i] = next + i;
            next += size;
            s.blocks_.push_back(std::move(block));
        }
    }
    return s;
}

double Schedule::f(int k, int ell) const {
    if (k < 0 || ell < 0) throw std::invalid_argument("Schedule::f: negative index");
    const double f00 = C_f * (1.0 + 1.0 / ((1.0 - x_pow(1)) * (1.0 - x_pow(1))));
    return f00 - C_f * ramp(k, ell);
}

double Schedule::h(int k, int ell) const {
    if (k < 0 || ell < 0) throw std::invalid_argument("Schedule::h: negative index");
    return C_h * ramp(k, ell);
}

double Schedule::alpha(int k, int ell) const {
    return std::pow(16.0, -static_cast<double>(k + ell));
}

int Schedule::block_index(int k, int ell) const {
    if (k < 0 || k > M || ell < 1 || ell > Mprime) {
        throw std::invalid_argument("Schedule::block: (k, ell) out of range");
    }
    return k * Mprime + (ell - 1);
}

const CoordinateBlock& Schedule::block(int k, int ell) const {
    return blocks_[static_cast<std::size_t>(block_index(k, ell))];
}

std::vector<const CoordinateBlock*> Schedule::all_blocks() const {
    std::vector<const CoordinateBlock*> out;
    out.reserve(blocks_.size());
    for (const auto& b : blocks_) out.push_back(&b);
    return out;
}

double Schedule::relation_residual() const {
    const double lhs = 8.0 * c * f(1, 0) * f(1, 0);
    const double rhs = c_J * c_L * c_L;
    return std::abs(lhs - rhs) / std::max(std::abs(rhs), 1e-300);
}

nlohmann::ordered_json Schedule::constants_json() const {
    return nlohmann::ordered_json{{"n", n},           {"N", N},
                                  {"M", M},           {"Mprime", Mprime},
                                  {"c", c},           {"C_h", C_h},
                                  {"C_f", C_f},       {"c_J", c_J},
                                  {"c_L", c_L},       {"paper_constants", paper_constants}};
}

}  // namespace hullwalk
