#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace hullwalk {

/// Counter-based splittable random stream.
///
/// Every output is a pure hash of (master_seed, stream_id, lane, counter),
/// so trials indexed by stream_id can run on any thread in any order and
/// still reproduce bit-identical sequences. Copies are independent values:
/// copying a stream and advancing the copy does not disturb the original.
class RngStream {
public:
    RngStream(std::uint64_t master_seed, std::uint64_t stream_id)
        : master_seed_(master_seed), stream_id_(stream_id) {
        key_ = mix(master_seed + 0x9e3779b97f4a7c15ull);
        key_ = mix(key_ ^ mix(stream_id + 0xd1b54a32d192ed03ull));
    }

    std::uint64_t master_seed() const { return master_seed_; }
    std::uint64_t stream_id() const { return stream_id_; }

    /// A statistically independent stream derived from this one.
    /// Lanes separate independent uses inside one trial (path sampling,
    /// Poisson clock, ...) without coordinating draw counts.
    RngStream substream(std::uint64_t lane) const {
        RngStream s(*this);
        s.key_ = mix(key_ ^ mix(lane + 0x2545f4914f6cdd1dull));
        s.counter_ = 0;
        s.has_cached_gaussian_ = false;
        return s;
    }

    std::uint64_t next_u64() {
        // SplitMix64 output function on a per-stream key.
        return mix(key_ + 0x9e3779b97f4a7c15ull * ++counter_);
    }

    /// Uniform double in (0, 1]; never returns 0 so log() is safe.
    double next_uniform() {
        return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    }

    /// Standard normal via Box-Muller; pairs are cached so each normal
    /// costs one uniform on average.
    double next_gaussian() {
        if (has_cached_gaussian_) {
            has_cached_gaussian_ = false;
            return cached_gaussian_;
        }
        const double u1 = next_uniform();
        const double u2 = next_uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * pi() * u2;
        cached_gaussian_ = r * std::sin(a);
        has_cached_gaussian_ = true;
        return r * std::cos(a);
    }

    static constexpr double pi() { return 3.14159265358979323846; }

private:
    static std::uint64_t mix(std::uint64_t x) {
        x ^= x >> 30;
        x *= 0xbf58476d1ce4e5b9ull;
        x ^= x >> 27;
        x *= 0x94d049bb133111ebull;
        x ^= x >> 31;
        return x;
    }

    std::uint64_t master_seed_;
    std::uint64_t stream_id_;
    std::uint64_t key_ = 0;
    std::uint64_t counter_ = 0;
    double cached_gaussian_ = 0.0;
    bool has_cached_gaussian_ = false;
};

}  // namespace hullwalk
