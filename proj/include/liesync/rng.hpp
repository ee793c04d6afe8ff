#pragma once

#include <cmath>
#include <cstdint>

#include <Eigen/Dense>

namespace liesync {

// Counter-based generator: every draw is a pure function of (seed, counter),
// so streams are bit-reproducible across platforms and safe to evaluate in
// parallel. The mixer is SplitMix64.
class CounterRng {
  public:
    explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

    /// 64 uniform bits for the given counter value.
    static std::uint64_t mix(std::uint64_t seed, std::uint64_t counter) {
        std::uint64_t z = seed + (counter + 1) * 0x9E3779B97F4A7C15ULL;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1).
    double uniform() { return to_unit(mix(seed_, counter_++)); }

    /// Standard normal via Box-Muller (consumes two counter values).
    double normal() {
        double u1 = uniform();
        double u2 = uniform();
        if (u1 <= 0.0) u1 = 0x1p-53;
        return std::sqrt(-2.0 * std::log(u1)) *
               std::cos(2.0 * M_PI * u2);
    }

    /// Isotropic direction times a radius with the uniform-ball radial law
    /// r = R * u^(1/dim).
    Eigen::VectorXd uniform_ball(int dim, double radius) {
        Eigen::VectorXd v(dim);
        for (int i = 0; i < dim; ++i) v(i) = normal();
        double n = v.norm();
        if (n == 0.0) return Eigen::VectorXd::Zero(dim);
        double r = radius * std::pow(uniform(), 1.0 / dim);
        return v * (r / n);
    }

  private:
    static double to_unit(std::uint64_t bits) {
        return static_cast<double>(bits >> 11) * 0x1p-53;
    }

    std::uint64_t seed_;
    std::uint64_t counter_ = 0;
};

}  // namespace liesync
