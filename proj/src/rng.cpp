#include "scorebench/rng.hpp"

#include <cmath>

#include "scorebench/errors.hpp"
#include "scorebench/stats.hpp"

namespace scorebench {

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t seed_combine(std::uint64_t seed, std::uint64_t value) {
    std::uint64_t s = seed ^ (0x9e3779b97f4a7c15ULL + value);
    return splitmix64(s);
}

std::uint64_t seed_combine(std::uint64_t seed, std::string_view tag) {
    // FNV-1a over the tag, then mixed into the seed.
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : tag) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return seed_combine(seed, h);
}

double Rng::normal() { return norm_inv_cdf(uniform()); }

double Rng::gamma(double shape) {
    if (shape < 1.0) fail(Err::NonFiniteValue, "Rng::gamma requires shape >= 1");
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x = normal();
        double v = 1.0 + c * x;
        if (v <= 0.0) continue;
        v = v * v * v;
        double u = uniform();
        double x2 = x * x;
        if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
        if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
    }
}

double Rng::student_t(double nu) {
    if (nu <= 2.0) fail(Err::NonFiniteValue, "Rng::student_t requires nu > 2");
    double z = normal();
    double chi2 = 2.0 * gamma(0.5 * nu);
    return z / std::sqrt(chi2 / nu);
}

double Rng::student_t_std(double nu) { return student_t(nu) * std::sqrt((nu - 2.0) / nu); }

}  // namespace scorebench
