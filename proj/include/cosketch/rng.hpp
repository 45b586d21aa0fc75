#pragma once

#include <cstdint>

namespace cosketch {

// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t hash_combine(std::uint64_t a, std::uint64_t b) noexcept {
    return mix64(a ^ (mix64(b) + 0x632BE59BD9B4E019ULL + (a << 6) + (a >> 2)));
}

// Counter-based generator: the i-th draw is a pure function of (seed, i), so
// streams are reproducible across platforms and cheap to fork.
class Rng {
public:
    explicit Rng(std::uint64_t seed = 0) noexcept : seed_(seed), key_(mix64(seed)) {}

    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t counter() const noexcept { return counter_; }

    std::uint64_t next_u64() noexcept { return mix64(key_ + 0x9E3779B97F4A7C15ULL * ++counter_); }
    // Uniform on the open interval (0, 1).
    double uniform() noexcept {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }
    // Standard normal via the Marsaglia polar method.
    double normal() noexcept;

    // Independent generator for sub-stream `id`.
    Rng fork(std::uint64_t id) const noexcept { return Rng(hash_combine(seed_, id)); }

private:
    std::uint64_t seed_;
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace cosketch
