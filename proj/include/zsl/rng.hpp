#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string_view>

namespace zsl {

/// Counter-based generator: draw i of stream `key` is a pure function of
/// (key, i). Streams are derived with split(), so the values a component sees
/// do not depend on how many draws other components made.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t key) : key_(mix(key ^ 0x6a09e667f3bcc909ULL)) {}

    CounterRng split(std::string_view tag) const {
        std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
        for (unsigned char c : tag) {
            h ^= c;
            h *= 0x100000001b3ULL;
        }
        return CounterRng(mix(key_ ^ h), 0);
    }

    CounterRng split(std::uint64_t index) const {
        return CounterRng(mix(key_ + 0x9e3779b97f4a7c15ULL * (index + 1)), 0);
    }

    std::uint64_t next_u64() { return mix(key_ ^ mix(counter_++ * 0xbf58476d1ce4e5b9ULL + 1)); }

    /// Uniform in (0, 1).
    double uniform() { return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53; }

    /// Standard normal via Box-Muller; consumes two draws per call.
    double normal() {
        const double u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    std::uint64_t counter() const { return counter_; }

private:
    CounterRng(std::uint64_t raw_key, int) : key_(raw_key) {}

    static std::uint64_t mix(std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace zsl
