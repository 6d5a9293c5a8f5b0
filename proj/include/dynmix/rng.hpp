#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "dynmix/errors.hpp"
#include "dynmix/mathfn.hpp"

namespace dynmix {

// Deterministic random stream with cheap named substreams.
//
// All distributions are generated from raw 64-bit engine output through
// fixed arithmetic (inverse-CDF normals, Marsaglia-Tsang gamma), so a given
// (seed, call sequence) pair yields bit-identical draws on any conforming
// platform. Substreams are derived from the stored seed, not the engine
// state, so the order in which they are created does not matter.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : seed_(seed) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu),
                      static_cast<std::uint32_t>(seed >> 32)};
    gen_.seed(seq);
  }

  std::uint64_t seed() const { return seed_; }

  // Independent stream keyed by (this stream's seed, tag).
  RngStream substream(std::uint64_t tag) const {
    return RngStream(mix(seed_, tag));
  }

  // Uniform on the open interval (0, 1).
  double uniform() {
    return (static_cast<double>(gen_() >> 11) + 0.5) * 0x1.0p-53;
  }

  bool bernoulli(double p) { return uniform() < p; }

  int binomial(int trials, double p) {
    int s = 0;
    for (int i = 0; i < trials; ++i) s += bernoulli(p) ? 1 : 0;
    return s;
  }

  // Standard normal via the quantile transform: one uniform per draw.
  double normal() { return normal_quantile(uniform()); }

  double normal(double mean, double sd) { return mean + sd * normal(); }

  double exponential(double rate) { return -std::log(uniform()) / rate; }

  // Gamma(shape, rate) in the shape-rate convention: mean shape/rate.
  // Marsaglia-Tsang squeeze for shape >= 1, with the standard power-of-
  // uniform boost for shape < 1.
  double gamma(double shape, double rate) {
    if (!(shape > 0.0) || !(rate > 0.0)) {
      throw Error("gamma: shape and rate must be positive");
    }
    if (shape < 1.0) {
      const double u = uniform();
      return gamma(shape + 1.0, rate) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x;
      double v;
      do {
        x = normal();
        v = 1.0 + c * x;
      } while (v <= 0.0);
      v = v * v * v;
      const double u = uniform();
      const double x2 = x * x;
      if (u < 1.0 - 0.0331 * x2 * x2) return d * v / rate;
      if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) {
        return d * v / rate;
      }
    }
  }

  // N(mean, sd^2) conditioned on X > lower.
  //
  // With a = (lower - mean)/sd: inverse-CDF through the upper tail for
  // a <= 5 (stable because the tail probability is computed directly, never
  // as 1 - p), and Robert's translated-exponential rejection beyond.
  double truncated_normal_lower(double mean, double sd, double lower) {
    const double a = (lower - mean) / sd;
    double z;
    if (a <= 5.0) {
      const double tail = normal_cdf(-a);  // P(Z > a)
      z = -normal_quantile(tail * uniform());
      if (z < a) z = a;
    } else {
      const double lambda = 0.5 * (a + std::sqrt(a * a + 4.0));
      for (;;) {
        z = a + exponential(lambda);
        const double d = z - lambda;
        if (uniform() <= std::exp(-0.5 * d * d)) break;
      }
    }
    return mean + sd * z;
  }

  // N(mean, sd^2) conditioned on X < upper.
  double truncated_normal_upper(double mean, double sd, double upper) {
    return -truncated_normal_lower(-mean, sd, -upper);
  }

 private:
  static std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
    std::uint64_t z = a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2));
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t seed_;
  std::mt19937_64 gen_;
};

}  // namespace dynmix
