#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

namespace cq::nk {

/// Counter-based generator: the n-th output is splitmix64(key + n * golden).
/// Streams are cheap to derive, and a stream's output depends only on its
/// key and how many values were drawn, never on the platform.
class Rng {
public:
    explicit Rng(std::uint64_t key) noexcept : key_(key) {}

    /// Stream for one purpose within a seeded command, e.g. derive(seed, "dropout").
    static Rng derive(std::uint64_t seed, std::string_view label) noexcept;
    Rng fork(std::string_view label) const noexcept { return derive(key_, label); }

    std::uint64_t key() const noexcept { return key_; }
    std::uint64_t counter() const noexcept { return counter_; }

    std::uint64_t next_u64() noexcept;
    /// Uniform in [0, 1) with 53 random bits.
    double uniform() noexcept;
    double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }
    /// Uniform integer in [0, n); n must be positive.
    std::size_t below(std::size_t n) noexcept;
    /// Standard normal via Box-Muller; the second variate of each pair is cached.
    double normal() noexcept;

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

std::uint64_t fnv1a64(std::string_view s) noexcept;
std::uint64_t mix64(std::uint64_t z) noexcept;

template <typename T>
void shuffle(std::vector<T>& v, Rng& rng)
{
    for (std::size_t i = v.size(); i > 1; --i) {
        std::size_t j = rng.below(i);
        std::swap(v[i - 1], v[j]);
    }
}

}  // namespace cq::nk
