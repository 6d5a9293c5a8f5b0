#pragma once

#include <array>
#include <cmath>
#include <span>
#include <vector>

#include "dynmix/errors.hpp"
#include "dynmix/mathfn.hpp"
#include "dynmix/rng.hpp"

namespace dynmix {

// Two normal components: means mu[k] and precisions phi[k], k in {0, 1}.
// Allocation z_t = 1 assigns observation t to component 1 (the upper one
// once ordering is enforced).
struct MixtureParams {
  std::array<double, 2> mu{0.0, 0.0};
  std::array<double, 2> phi{1.0, 1.0};
};

struct MixturePriors {
  std::array<double, 2> mu_mean{0.0, 0.0};
  std::array<double, 2> mu_var{1.0, 1.0};
  std::array<double, 2> phi_shape{0.01, 0.01};
  std::array<double, 2> phi_rate{0.01, 0.01};

  // Quartile-anchored means with a variance of ten times the sample
  // variance: weakly informative but scaled to the data.
  static MixturePriors from_data(std::span<const double> y) {
    MixturePriors p;
    p.mu_mean = {quantile(y, 0.25), quantile(y, 0.75)};
    const double v = 10.0 * sample_variance(y);
    p.mu_var = {v, v};
    return p;
  }

  void validate() const {
    for (int k = 0; k < 2; ++k) {
      if (!(mu_var[k] > 0.0) || !(phi_shape[k] > 0.0) || !(phi_rate[k] > 0.0)) {
        throw ConfigError("MixturePriors: variances/shapes/rates must be positive");
      }
    }
  }
};

// Conjugate conditional of mu[k] given allocations and phi[k]. With no
// assigned observations the posterior reduces to the prior.
inline ScalarConditional component_mean_conditional(
    const MixtureParams& params, const MixturePriors& priors,
    std::span<const double> y, std::span<const int> z, int k) {
  long count = 0;
  double sum = 0.0;
  for (std::size_t t = 0; t < y.size(); ++t) {
    if (z[t] == k) {
      count += 1;
      sum += y[t];
    }
  }
  const double var =
      1.0 / (static_cast<double>(count) * params.phi[k] + 1.0 / priors.mu_var[k]);
  const double mean =
      var * (sum * params.phi[k] + priors.mu_mean[k] / priors.mu_var[k]);
  return {mean, var};
}

// Conditional of phi[k] given allocations and the freshly drawn mu[k]:
// prior shape plus half the count, prior rate plus half the squared
// deviations.
inline GammaConditional component_precision_conditional(
    const MixtureParams& params, const MixturePriors& priors,
    std::span<const double> y, std::span<const int> z, int k) {
  long count = 0;
  double ss = 0.0;
  for (std::size_t t = 0; t < y.size(); ++t) {
    if (z[t] == k) {
      count += 1;
      const double d = y[t] - params.mu[k];
      ss += d * d;
    }
  }
  return {priors.phi_shape[k] + 0.5 * static_cast<double>(count),
          priors.phi_rate[k] + 0.5 * ss};
}

// Draw (mu[k], phi[k]) for both components: mean first, then precision
// around the new mean.
inline void sample_components(RngStream& rng, MixtureParams& params,
                              const MixturePriors& priors,
                              std::span<const double> y,
                              std::span<const int> z) {
  for (int k = 0; k < 2; ++k) {
    const ScalarConditional mc =
        component_mean_conditional(params, priors, y, z, k);
    params.mu[k] = rng.normal(mc.mean, std::sqrt(mc.var));
    const GammaConditional pc =
        component_precision_conditional(params, priors, y, z, k);
    params.phi[k] = rng.gamma(pc.shape, pc.rate);
  }
}

// Identification constraint mu[0] <= mu[1]: swap the component pairs and
// flip every allocation when violated. Returns whether a swap happened.
inline bool enforce_order(MixtureParams& params, std::span<int> z) {
  if (params.mu[0] <= params.mu[1]) return false;
  std::swap(params.mu[0], params.mu[1]);
  std::swap(params.phi[0], params.phi[1]);
  for (int& zt : z) zt = 1 - zt;
  return true;
}

// Posterior probability that observation y belongs to component 1 given
// mixture weight alpha, evaluated in log space so extreme weights and
// far-out observations cannot underflow.
inline double allocation_prob(const MixtureParams& params, double alpha,
                              double y) {
  if (alpha <= 0.0) return 0.0;
  if (alpha >= 1.0) return 1.0;
  const double la =
      std::log(alpha) + log_normal_pdf(y, params.mu[1], 1.0 / params.phi[1]);
  const double lb = std::log1p(-alpha) +
                    log_normal_pdf(y, params.mu[0], 1.0 / params.phi[0]);
  return std::exp(la - log_sum_exp(la, lb));
}

inline void sample_allocations(RngStream& rng, const MixtureParams& params,
                               std::span<const double> alpha,
                               std::span<const double> y, std::span<int> z) {
  if (alpha.size() != y.size() || z.size() != y.size()) {
    throw DimensionError("sample_allocations: length mismatch");
  }
  for (std::size_t t = 0; t < y.size(); ++t) {
    z[t] = rng.bernoulli(allocation_prob(params, alpha[t], y[t])) ? 1 : 0;
  }
}

// Starting allocations: observations above the sample median start in the
// upper component.
inline std::vector<int> initial_allocations(std::span<const double> y) {
  const double m = median(y);
  std::vector<int> z(y.size());
  for (std::size_t t = 0; t < y.size(); ++t) z[t] = (y[t] > m) ? 1 : 0;
  return z;
}

// Complete-data log-likelihood of the component part; invariant under the
// ordering swap.
inline double mixture_loglik(const MixtureParams& params,
                             std::span<const double> y,
                             std::span<const int> z) {
  double ll = 0.0;
  for (std::size_t t = 0; t < y.size(); ++t) {
    const int k = z[t];
    ll += log_normal_pdf(y[t], params.mu[k], 1.0 / params.phi[k]);
  }
  return ll;
}

}  // namespace dynmix
