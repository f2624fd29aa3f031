#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace stsolve {

// Philox4x32-10 counter-based generator. A (seed, stream) pair names an
// independent sequence, so sub-streams can be handed to parallel workers
// without sharing state.
class Philox {
public:
    using result_type = std::uint64_t;

    explicit Philox(std::uint64_t seed = 0, std::uint64_t stream = 0) noexcept;

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept;

    // Derive an independent generator; does not advance this one.
    Philox split(std::uint64_t stream) const noexcept;

    double uniform() noexcept;                      // [0, 1)
    std::uint64_t below(std::uint64_t n) noexcept;  // uniform in [0, n)
    double normal() noexcept;
    double rademacher() noexcept;

    std::uint64_t seed() const noexcept { return seed_; }

private:
    void refill() noexcept;

    std::uint64_t seed_;
    std::uint64_t stream_;
    std::array<std::uint32_t, 2> key_{};
    std::uint64_t counter_ = 0;
    std::array<std::uint32_t, 4> block_{};
    int used_ = 4;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

using Rng = Philox;

}  // namespace stsolve
