// Deterministic random number generation.
//
// All stochastic code in the library draws through Rng, which wraps the fully
// specified std::mt19937_64 engine and implements its own uniform-to-variate
// transforms. std::normal_distribution and friends are implementation-defined,
// so they would break the bit-for-bit reproducibility contract; these
// transforms do not.
#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace scorebench {

// SplitMix64 step, used for hashing and seed derivation.
std::uint64_t splitmix64(std::uint64_t& state);

// Order-sensitive combination of seed material. Streams for distinct
// (panel, date, model, purpose) tuples are derived from the root seed with
// these, so execution order and thread count cannot change any draw.
std::uint64_t seed_combine(std::uint64_t seed, std::uint64_t value);
std::uint64_t seed_combine(std::uint64_t seed, std::string_view tag);

class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform on the open interval (0,1); never returns an endpoint, so the
    // result is always a valid argument to norm_inv_cdf.
    double uniform() {
        return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
    }

    // Uniform index in [0, n).
    std::size_t index(std::size_t n) {
        std::size_t i = static_cast<std::size_t>(uniform() * static_cast<double>(n));
        return i < n ? i : n - 1;
    }

    // Standard normal via inverse-CDF transform.
    double normal();

    // Gamma(shape, 1) for shape >= 1 (Marsaglia-Tsang squeeze).
    double gamma(double shape);

    // Student-t with nu > 2 degrees of freedom, raw scale.
    double student_t(double nu);

    // Student-t standardized to unit variance.
    double student_t_std(double nu);

  private:
    std::mt19937_64 engine_;
};

}  // namespace scorebench
