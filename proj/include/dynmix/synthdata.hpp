#pragma once

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "dynmix/errors.hpp"
#include "dynmix/mathfn.hpp"
#include "dynmix/rng.hpp"

namespace dynmix {

enum class WeightCurveKind { linear, parabolic, sinusoidal, steps };

inline WeightCurveKind parse_weight_curve(const std::string& name) {
  if (name == "linear") return WeightCurveKind::linear;
  if (name == "parabolic") return WeightCurveKind::parabolic;
  if (name == "sinusoidal") return WeightCurveKind::sinusoidal;
  if (name == "steps") return WeightCurveKind::steps;
  throw ConfigError("unknown weight curve: " + name);
}

inline std::string weight_curve_name(WeightCurveKind kind) {
  switch (kind) {
    case WeightCurveKind::linear:
      return "linear";
    case WeightCurveKind::parabolic:
      return "parabolic";
    case WeightCurveKind::sinusoidal:
      return "sinusoidal";
    case WeightCurveKind::steps:
      return "steps";
  }
  return "?";
}

// Benchmark weight curves on [0, 1). The sinusoidal curve keeps the phase
// offset of pi inside the cosine; evaluated on a unit grid the offset does
// not cancel, so the curve starts near 0.752 rather than 0.9.
inline double weight_value(WeightCurveKind kind, double t) {
  if (!(t >= 0.0 && t < 1.0)) {
    throw Error("weight_value: t outside [0,1)");
  }
  switch (kind) {
    case WeightCurveKind::linear:
      return 0.1 + 0.8 * t;
    case WeightCurveKind::parabolic:
      return 3.0 * (t - 0.5) * (t - 0.5) + 0.125;
    case WeightCurveKind::sinusoidal:
      return std::cos(2.0 * kPi * (t + kPi)) / 2.5 + 0.5;
    case WeightCurveKind::steps:
      if (t < 0.3) return 0.2;
      if (t < 0.7) return 0.8;
      return 0.3;
  }
  throw Error("weight_value: unknown curve");
}

// Evaluation grid t_i = (i-1)/T for i = 1..T.
inline std::vector<double> weight_grid(WeightCurveKind kind, int T) {
  if (T <= 0) throw DimensionError("weight_grid: T must be positive");
  std::vector<double> alpha(T);
  for (int i = 0; i < T; ++i) {
    alpha[i] = weight_value(kind, static_cast<double>(i) / T);
  }
  return alpha;
}

struct SyntheticData {
  std::vector<double> alpha;  // true weight at each grid point
  std::vector<int> z;         // true allocations (mixture design)
  std::vector<double> y;      // real observations (gaussian/mixture)
  std::vector<int> counts;    // success counts (binomial design)
  int trials = 1;
};

// counts_t ~ Binomial(trials, alpha_t).
inline SyntheticData simulate_binomial(RngStream& rng,
                                       std::span<const double> alpha,
                                       int trials) {
  if (trials < 1) throw ConfigError("simulate_binomial: trials must be >= 1");
  SyntheticData d;
  d.alpha.assign(alpha.begin(), alpha.end());
  d.trials = trials;
  d.counts.resize(alpha.size());
  for (std::size_t t = 0; t < alpha.size(); ++t) {
    d.counts[t] = rng.binomial(trials, alpha[t]);
  }
  return d;
}

inline SyntheticData simulate_binomial(RngStream& rng, WeightCurveKind kind,
                                       int T, int trials) {
  return simulate_binomial(rng, weight_grid(kind, T), trials);
}

// y_t ~ N(alpha_t, 0.1^2): the weight observed directly through noise.
inline SyntheticData simulate_gaussian(RngStream& rng,
                                       std::span<const double> alpha) {
  SyntheticData d;
  d.alpha.assign(alpha.begin(), alpha.end());
  d.y.resize(alpha.size());
  for (std::size_t t = 0; t < alpha.size(); ++t) {
    d.y[t] = rng.normal(alpha[t], 0.1);
  }
  return d;
}

inline SyntheticData simulate_gaussian(RngStream& rng, WeightCurveKind kind,
                                       int T) {
  return simulate_gaussian(rng, weight_grid(kind, T));
}

// Two-component benchmark: component 0 is N(0, 0.25), component 1 is
// N(2, 0.25) (variances), membership Bernoulli(alpha_t).
inline SyntheticData simulate_mixture(RngStream& rng,
                                      std::span<const double> alpha) {
  SyntheticData d;
  d.alpha.assign(alpha.begin(), alpha.end());
  d.z.resize(alpha.size());
  d.y.resize(alpha.size());
  const double sd = 0.5;
  for (std::size_t t = 0; t < alpha.size(); ++t) {
    d.z[t] = rng.bernoulli(alpha[t]) ? 1 : 0;
    d.y[t] = rng.normal(d.z[t] == 1 ? 2.0 : 0.0, sd);
  }
  return d;
}

inline SyntheticData simulate_mixture(RngStream& rng, WeightCurveKind kind,
                                      int T) {
  return simulate_mixture(rng, weight_grid(kind, T));
}

}  // namespace dynmix
