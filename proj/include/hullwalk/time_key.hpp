#pragma once

#include <cstdint>
#include <string>

#include "json.hpp"

namespace hullwalk {

/// A sampling time for a Brownian path.
///
/// The construction grid consists of times 2^(j/2^level); those are kept as
/// exact dyadic exponents so that keys deep in the refinement never collide
/// the way rounded doubles would. Arbitrary positive times (Poisson arrivals)
/// are Raw keys. Zero is its own kind.
class TimeKey {
public:
    enum class Kind : std::uint8_t { Zero, Exp, Raw };

    static TimeKey zero();
    /// Time 2^(num / 2^level); the exponent is normalized to lowest terms.
    static TimeKey exp2(std::int64_t num, int level);
    /// Arbitrary positive time.
    static TimeKey raw(double t);

    Kind kind() const { return kind_; }
    bool is_zero() const { return kind_ == Kind::Zero; }
    bool is_exp() const { return kind_ == Kind::Exp; }
    bool is_raw() const { return kind_ == Kind::Raw; }

    /// Exponent numerator/level; valid only for Exp keys.
    std::int64_t exp_num() const { return num_; }
    int exp_level() const { return level_; }

    /// The time value as a double (recomputed from the exact exponent).
    double value() const;

    /// Total order: by time value, exact for Exp-vs-Exp comparisons.
    static bool less(const TimeKey& a, const TimeKey& b);
    bool operator==(const TimeKey& o) const;
    bool operator!=(const TimeKey& o) const { return !(*this == o); }

    /// Refinement midpoint: arithmetic mean of exponents for two Exp keys
    /// (the geometric mean time), arithmetic mean of times otherwise.
    static TimeKey midpoint(const TimeKey& a, const TimeKey& b);

    nlohmann::ordered_json to_json() const;
    std::string str() const;

private:
    TimeKey() = default;
    Kind kind_ = Kind::Zero;
    std::int64_t num_ = 0;
    std::int32_t level_ = 0;
    double raw_ = 0.0;
};

struct TimeKeyLess {
    bool operator()(const TimeKey& a, const TimeKey& b) const { return TimeKey::less(a, b); }
};

}  // namespace hullwalk
