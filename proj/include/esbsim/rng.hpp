#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace esbsim {

/// Counter-based pseudo-random stream (SplitMix64 applied to a running
/// counter, keyed by seed and stream id). Draw i depends only on
/// (seed, stream id, i), so adding or removing other streams never
/// perturbs this one, and sequences are identical across platforms.
///
/// Streams are split by name: child("ptx") derives an independent stream
/// whose key mixes the parent key with the label hash.
class RngStream {
public:
    RngStream() : RngStream(0, "root") {}
    RngStream(std::uint64_t seed, std::string_view stream_id)
        : key_(mix64(seed ^ fnv1a(stream_id))), counter_(0) {}

    /// Derive an independent stream from this one's key and a label.
    RngStream child(std::string_view label) const {
        RngStream r;
        r.key_ = mix64(key_ ^ fnv1a(label));
        r.counter_ = 0;
        return r;
    }

    std::uint64_t next_u64() {
        std::uint64_t z = key_ + (++counter_) * 0x9E3779B97F4A7C15ULL;
        return mix64(z);
    }

    /// Uniform double in [0, 1).
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform integer in [0, n).
    std::uint64_t uniform_below(std::uint64_t n) {
        return n == 0 ? 0 : next_u64() % n;
    }

    bool bernoulli(double p) {
        if (p <= 0.0) return false;
        if (p >= 1.0) return true;
        return uniform() < p;
    }

    static std::uint64_t fnv1a(std::string_view s) {
        std::uint64_t h = 0xCBF29CE484222325ULL;
        for (unsigned char c : s) {
            h ^= c;
            h *= 0x100000001B3ULL;
        }
        return h;
    }

private:
    static std::uint64_t mix64(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xBF58476D1CE4E5B9ULL;
        z ^= z >> 27;
        z *= 0x94D049BB133111EBULL;
        z ^= z >> 31;
        return z;
    }

    std::uint64_t key_;
    std::uint64_t counter_;
};

} // namespace esbsim
