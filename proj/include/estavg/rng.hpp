#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>

namespace estavg {

/// SplitMix64 finalizer, used to derive stream keys and to seed engine state.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// A deterministic random stream identified by a 64-bit key.
///
/// Streams form a tree: `child(i)` derives an independent stream from the
/// parent key and an index, without consuming any draws from the parent. A
/// replicate that needs randomness gets `master.child(replicate_index)`, so
/// results never depend on which worker evaluated which replicate, and
/// growing a replicate count only appends new streams.
///
/// The engine is xoshiro256++ and satisfies UniformRandomBitGenerator.
class RngStream {
public:
    using result_type = std::uint64_t;

    explicit RngStream(std::uint64_t seed, std::uint64_t index = 0) noexcept
        : key_(derive(splitmix64(seed), index)) {
        reseed();
    }

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    [[nodiscard]] RngStream child(std::uint64_t index) const noexcept {
        RngStream out;
        out.key_ = derive(key_, index);
        out.reseed();
        return out;
    }

    [[nodiscard]] std::uint64_t key() const noexcept { return key_; }

    result_type operator()() noexcept {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    /// Uniform on the open interval (0, 1).
    double uniform() noexcept {
        return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, bound). Lemire's multiply-shift with rejection.
    std::uint64_t below(std::uint64_t bound) noexcept {
        __uint128_t m = static_cast<__uint128_t>((*this)()) * bound;
        auto low = static_cast<std::uint64_t>(m);
        if (low < bound) {
            const std::uint64_t threshold = (0 - bound) % bound;
            while (low < threshold) {
                m = static_cast<__uint128_t>((*this)()) * bound;
                low = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

    /// Standard normal draw (Marsaglia polar method, second variate discarded).
    double normal() noexcept {
        double u = 0.0;
        double v = 0.0;
        double s = 0.0;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        return u * std::sqrt(-2.0 * std::log(s) / s);
    }

    double exponential() noexcept { return -std::log(uniform()); }

private:
    RngStream() noexcept = default;

    static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
        return (x << k) | (x >> (64 - k));
    }

    static constexpr std::uint64_t derive(std::uint64_t key, std::uint64_t index) noexcept {
        return splitmix64(key ^ splitmix64(index + 0x632BE59BD9B4E019ULL));
    }

    void reseed() noexcept {
        std::uint64_t x = key_;
        for (auto& word : s_) {
            x = splitmix64(x);
            word = x;
        }
        if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) {
            s_[0] = 1;
        }
    }

    std::uint64_t key_ = 0;
    std::array<std::uint64_t, 4> s_{};
};

}  // namespace estavg
