#include "hullwalk/time_key.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace hullwalk {

namespace {

constexpr int kMaxLevel = 62;

__int128 scaled_num(const TimeKey& k, int common_level) {
    return static_cast<__int128>(k.exp_num()) << (common_level - k.exp_level());
}

}  // namespace

TimeKey TimeKey::zero() {
    TimeKey k;
    k.kind_ = Kind::Zero;
    return k;
}

TimeKey TimeKey::exp2(std::int64_t num, int level) {
    if (level < 0 || level > kMaxLevel) throw std::invalid_argument("TimeKey: bad exponent level");
    while (level > 0 && num % 2 == 0) {
        num /= 2;
        --level;
    }
    TimeKey k;
    k.kind_ = Kind::Exp;
    k.num_ = num;
    k.level_ = level;
    return k;
}

TimeKey TimeKey::raw(double t) {
    if (!(t > 0.0) || !std::isfinite(t)) throw std::invalid_argument("TimeKey: raw time must be positive and finite");
    TimeKey k;
    k.kind_ = Kind::Raw;
    k.raw_ = t;
    return k;
}

double TimeKey::value() const {
    switch (kind_) {
        case Kind::Zero:
            return 0.0;
        case Kind::Exp:
            return std::exp2(static_cast<double>(num_) * std::exp2(static_cast<double>(-level_)));
        case Kind::Raw:
            return raw_;
    }
    return 0.0;
}

bool TimeKey::less(const TimeKey& a, const TimeKey& b) {
    if (a.kind_ == Kind::Zero || b.kind_ == Kind::Zero) {
        return a.kind_ == Kind::Zero && b.kind_ != Kind::Zero;
    }
    if (a.kind_ == Kind::Exp && b.kind_ == Kind::Exp) {
        const int common = std::max(a.level_, b.level_);
        return scaled_num(a, common) < scaled_num(b, common);
    }
    const double va = a.value();
    const double vb = b.value();
    if (va != vb) return va < vb;
    // Same numeric time from different families: keep a stable order.
    // Paths should not mix Exp and Raw keys at equal times.
    return a.kind_ < b.kind_;
}

bool TimeKey::operator==(const TimeKey& o) const {
    return !less(*this, o) && !less(o, *this);
}

TimeKey TimeKey::midpoint(const TimeKey& a, const TimeKey& b) {
    if (a.is_zero() || b.is_zero()) throw std::invalid_argument("TimeKey::midpoint: zero endpoint");
    if (a == b) throw std::invalid_argument("TimeKey::midpoint: equal keys");
    if (a.is_exp() && b.is_exp()) {
        const int common = std::max(a.level_, b.level_);
        if (common + 1 > kMaxLevel) throw std::invalid_argument("TimeKey::midpoint: refinement too deep");
        const __int128 sum = scaled_num(a, common) + scaled_num(b, common);
        return exp2(static_cast<std::int64_t>(sum), common + 1);
    }
    return raw(0.5 * (a.value() + b.value()));
}

nlohmann::ordered_json TimeKey::to_json() const {
    switch (kind_) {
        case Kind::Zero:
            return nlohmann::ordered_json{{"kind", "zero"}, {"t", 0.0}};
        case Kind::Exp:
            return nlohmann::ordered_json{
                {"kind", "exp"}, {"num", num_}, {"level", level_}, {"t", value()}};
        case Kind::Raw:
            return nlohmann::ordered_json{{"kind", "raw"}, {"t", raw_}};
    }
    return {};
}

std::string TimeKey::str() const {
    std::ostringstream os;
    switch (kind_) {
        case Kind::Zero:
            os << "0";
            break;
        case Kind::Exp:
            os << "2^(" << num_ << "/2^" << level_ << ")";
            break;
        case Kind::Raw:
            os << raw_;
            break;
    }
    return os.str();
}

}  // namespace hullwalk
