#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace contrast {

/// Counter-based random stream.
///
/// Every draw is a pure function of (seed, stream, counter), so a value for
/// row i can be produced by any worker without sharing generator state.
/// Purposes (x draws, branch picks, noise) get distinct stream ids.
class CounterRng {
public:
    constexpr CounterRng(std::uint64_t seed, std::uint64_t stream) noexcept
        : key_(mix(seed ^ mix(stream + 0x632be59bd9b4e019ULL))) {}

    static constexpr std::uint64_t mix(std::uint64_t x) noexcept {
        x += 0x9e3779b97f4a7c15ULL;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    }

    constexpr std::uint64_t bits(std::uint64_t counter) const noexcept {
        return mix(key_ ^ mix(counter));
    }

    // Uniform on the open interval (0, 1).
    double uniform(std::uint64_t counter) const noexcept {
        return (static_cast<double>(bits(counter) >> 11) + 0.5) * 0x1.0p-53;
    }

    double normal(std::uint64_t counter) const noexcept {
        const double u1 = uniform(2 * counter);
        const double u2 = uniform(2 * counter + 1);
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    double logistic(std::uint64_t counter) const noexcept {
        const double u = uniform(counter);
        return std::log(u / (1.0 - u));
    }

    // Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t counter, std::uint64_t n) const noexcept {
        return static_cast<std::uint64_t>(uniform(counter) * static_cast<double>(n)) % n;
    }

    CounterRng substream(std::uint64_t id) const noexcept { return CounterRng(key_, id); }

private:
    std::uint64_t key_;
};

/// Sequential convenience wrapper: a CounterRng plus a running counter.
class Rng {
public:
    Rng(std::uint64_t seed, std::uint64_t stream) noexcept : gen_(seed, stream) {}

    double uniform() noexcept { return gen_.uniform(next_++); }
    double normal() noexcept { return gen_.normal(next_++); }
    double logistic() noexcept { return gen_.logistic(next_++); }
    std::uint64_t below(std::uint64_t n) noexcept { return gen_.below(next_++, n); }

    template <typename It>
    void shuffle(It first, It last) {
        const auto n = static_cast<std::uint64_t>(last - first);
        for (std::uint64_t i = n; i > 1; --i) {
            const auto j = below(i);
            std::swap(first[i - 1], first[j]);
        }
    }

private:
    CounterRng gen_;
    std::uint64_t next_ = 0;
};

}  // namespace contrast
