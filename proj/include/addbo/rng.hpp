#ifndef ADDBO_RNG_HPP
#define ADDBO_RNG_HPP
#pragma once

#include <cstdint>
#include <random>

namespace addbo {

/// Mixes a 64-bit value with the SplitMix64 finalizer.
[[nodiscard]] std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Seed of the `index`-th child stream of `base`. Children of one parent are
/// statistically independent and depend only on (base, index).
[[nodiscard]] std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) noexcept;

/// Seeded random stream. Streams are split by seed arithmetic, never by
/// drawing from the parent, so `split(k)` is the same no matter how much the
/// parent has been consumed.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : seed_(seed), engine_(splitmix64(seed)) {}

    [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }
    [[nodiscard]] RngStream split(std::uint64_t index) const { return RngStream(derive_seed(seed_, index)); }

    double uniform() { return uniform_(engine_); }
    double normal() { return normal_(engine_); }
    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n);

    std::mt19937_64& engine() noexcept { return engine_; }

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
    std::uniform_real_distribution<double> uniform_{0.0, 1.0};
    std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace addbo

#endif  // ADDBO_RNG_HPP
