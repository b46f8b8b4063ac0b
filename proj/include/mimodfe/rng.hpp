#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace mimodfe {

/// splitmix64 finalizer, used to derive well-separated seeds.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Deterministic random stream. Gaussian variates are produced by an
/// explicit Box-Muller transform on raw mt19937_64 output so that a given
/// (seed, path) always yields the same sequence, independent of the
/// standard library's distribution implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    /// Derives an independent stream from a master seed and a path of
    /// identifiers (stream tag, realization index, user index, ...).
    static Rng derive(std::uint64_t master, std::initializer_list<std::uint64_t> path) {
        std::uint64_t s = mix64(master);
        for (std::uint64_t p : path) s = mix64(s ^ mix64(p));
        return Rng(s);
    }

    std::uint64_t bits() { return gen_(); }

    /// Uniform in the open interval (0, 1).
    double uniform01() {
        return (static_cast<double>(gen_() >> 11) + 0.5) * 0x1.0p-53;
    }

    bool bit() { return (gen_() >> 63) != 0; }

    /// Standard normal variate, N(0, 1).
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = uniform01();
        const double u2 = uniform01();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * pi_ * u2;
        spare_ = radius * std::sin(angle);
        have_spare_ = true;
        return radius * std::cos(angle);
    }

    /// Circularly-symmetric complex Gaussian with E|z|^2 = variance.
    std::complex<double> complex_normal(double variance) {
        const double u1 = uniform01();
        const double u2 = uniform01();
        const double radius = std::sqrt(-variance * std::log(u1));
        const double angle = 2.0 * pi_ * u2;
        return {radius * std::cos(angle), radius * std::sin(angle)};
    }

private:
    static constexpr double pi_ = 3.14159265358979323846;
    std::mt19937_64 gen_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace mimodfe
