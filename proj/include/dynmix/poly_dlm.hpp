#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "dynmix/banded.hpp"
#include "dynmix/errors.hpp"
#include "dynmix/mathfn.hpp"
#include "dynmix/rng.hpp"

namespace dynmix {

// Priors for a polynomial trend of a given order: one normal prior per
// pre-sample initial value, one gamma prior per innovation precision, and
// a gamma prior for the observation precision. Gamma is shape-rate.
struct DlmPriors {
  std::vector<double> initial_mean;
  std::vector<double> initial_var;
  std::vector<double> w_shape;
  std::vector<double> w_rate;
  double v_shape = 0.01;
  double v_rate = 0.01;

  static DlmPriors defaults(int order) {
    DlmPriors p;
    p.initial_mean.assign(order, 0.0);
    p.initial_var.assign(order, 1.0);
    p.w_shape.assign(order, 0.01);
    p.w_rate.assign(order, 0.01);
    return p;
  }

  void validate(int order) const {
    const auto sz = static_cast<std::size_t>(order);
    if (initial_mean.size() != sz || initial_var.size() != sz ||
        w_shape.size() != sz || w_rate.size() != sz) {
      throw ConfigError("DlmPriors: vectors must have one entry per block");
    }
    for (int j = 0; j < order; ++j) {
      if (!(initial_var[j] > 0.0) || !(w_shape[j] > 0.0) ||
          !(w_rate[j] > 0.0)) {
        throw ConfigError("DlmPriors: variances/shapes/rates must be positive");
      }
    }
    if (!(v_shape > 0.0) || !(v_rate > 0.0)) {
      throw ConfigError("DlmPriors: observation prior must be positive");
    }
  }
};

// State of a polynomial trend model of order p over T time points, stored
// block-wise: block 0 is the level path, block j the j-th difference path.
// Each block j has a scalar pre-sample initial value and an innovation
// variance w(j); v() is the observation variance used in gaussian mode.
class PolyDlmState {
 public:
  PolyDlmState(int T, int order)
      : T_(T), p_(order),
        blocks_(static_cast<std::size_t>(T) * order, 0.0),
        initial_(order, 0.0), w_(order, 1.0) {
    if (T <= 0) throw DimensionError("PolyDlmState: T must be positive");
    if (order < 1) throw DimensionError("PolyDlmState: order must be >= 1");
  }

  int length() const { return T_; }
  int order() const { return p_; }

  std::span<double> block(int j) {
    return {blocks_.data() + static_cast<std::size_t>(j) * T_,
            static_cast<std::size_t>(T_)};
  }
  std::span<const double> block(int j) const {
    return {blocks_.data() + static_cast<std::size_t>(j) * T_,
            static_cast<std::size_t>(T_)};
  }
  std::span<double> level() { return block(0); }
  std::span<const double> level() const { return block(0); }

  double& initial(int j) { return initial_[j]; }
  double initial(int j) const { return initial_[j]; }
  double& w(int j) { return w_[j]; }
  double w(int j) const { return w_[j]; }
  double& v() { return v_; }
  double v() const { return v_; }

 private:
  int T_;
  int p_;
  std::vector<double> blocks_;
  std::vector<double> initial_;
  std::vector<double> w_;
  double v_ = 1.0;
};

// Prior mean of block j given the block above it. The top block's mean is
// its initial value everywhere; lower blocks add the running sum of the
// block above (exclusive prefix sum) to the sum of the two initial values.
inline std::vector<double> block_prior_mean(const PolyDlmState& s, int j) {
  const int T = s.length();
  std::vector<double> mu(T);
  if (j == s.order() - 1) {
    for (int t = 0; t < T; ++t) mu[t] = s.initial(j);
    return mu;
  }
  const auto upper = s.block(j + 1);
  const double c = s.initial(j) + s.initial(j + 1);
  double acc = 0.0;
  for (int t = 0; t < T; ++t) {
    mu[t] = c + acc;
    acc += upper[t];
  }
  return mu;
}

struct BlockConditional {
  BandedSpd precision;
  std::vector<double> info;
};

// Full conditional of a non-level block j >= 1: the block enters its own
// prior (difference operator, variance w(j)) and the transition of the
// block below it (shift operator, variance w(j-1)).
inline BlockConditional block_conditional(const PolyDlmState& s, int j) {
  const int T = s.length();
  const int p = s.order();
  if (j < 1 || j >= p) throw DimensionError("block_conditional: bad block");
  BandedSpd prec = diff_gram(T, 1.0 / s.w(j));
  prec.add_scaled(shift_gram(T), 1.0 / s.w(j - 1));

  std::vector<double> info = apply_shift_diff(s.block(j - 1));
  for (double& x : info) x /= s.w(j - 1);

  const double c = (j < p - 1) ? (s.initial(j) + s.initial(j + 1)) / s.w(j)
                               : s.initial(j) / s.w(j);
  info[0] += c;
  if (j < p - 1) {
    const std::vector<double> up = apply_diff_shift(s.block(j + 1));
    for (int t = 0; t < T; ++t) info[t] += up[t] / s.w(j);
  }
  return {std::move(prec), std::move(info)};
}

// Full conditional of the level path given per-point observations `data`
// with common precision `data_precision` (1/V in gaussian mode, 1 for
// probit latents).
inline BlockConditional level_conditional(const PolyDlmState& s,
                                          std::span<const double> data,
                                          double data_precision) {
  const int T = s.length();
  if (static_cast<int>(data.size()) != T) {
    throw DimensionError("level_conditional: data length mismatch");
  }
  BandedSpd prec = diff_gram(T, 1.0 / s.w(0));
  prec.add_to_diagonal(data_precision);

  std::vector<double> info(T);
  for (int t = 0; t < T; ++t) info[t] = data_precision * data[t];
  const double c = (s.order() >= 2) ? (s.initial(0) + s.initial(1)) / s.w(0)
                                    : s.initial(0) / s.w(0);
  info[0] += c;
  if (s.order() >= 2) {
    const std::vector<double> up = apply_diff_shift(s.block(1));
    for (int t = 0; t < T; ++t) info[t] += up[t] / s.w(0);
  }
  return {std::move(prec), std::move(info)};
}

inline void sample_state_block(RngStream& rng, PolyDlmState& s, int j) {
  const BlockConditional c = block_conditional(s, j);
  const BandedCholesky chol = cholesky(c.precision);
  const std::vector<double> draw = sample_from_precision(rng, chol, c.info);
  auto dst = s.block(j);
  for (int t = 0; t < s.length(); ++t) dst[t] = draw[t];
}

inline void sample_level_gaussian(RngStream& rng, PolyDlmState& s,
                                  std::span<const double> y) {
  const BlockConditional c = level_conditional(s, y, 1.0 / s.v());
  const BandedCholesky chol = cholesky(c.precision);
  const std::vector<double> draw = sample_from_precision(rng, chol, c.info);
  auto dst = s.level();
  for (int t = 0; t < s.length(); ++t) dst[t] = draw[t];
}

// Full conditional of the initial value of block j. It appears in its own
// prior, in the first step of block j, and (for j >= 1) in the first step
// of the block below.
inline ScalarConditional initial_conditional(const PolyDlmState& s,
                                             const DlmPriors& priors, int j) {
  const int p = s.order();
  double prec = 1.0 / priors.initial_var[j] + 1.0 / s.w(j);
  double num = priors.initial_mean[j] / priors.initial_var[j];
  const double own = (j < p - 1) ? s.block(j)[0] - s.initial(j + 1)
                                 : s.block(j)[0];
  num += own / s.w(j);
  if (j >= 1) {
    prec += 1.0 / s.w(j - 1);
    num += (s.block(j - 1)[0] - s.initial(j - 1)) / s.w(j - 1);
  }
  const double var = 1.0 / prec;
  return {var * num, var};
}

inline void sample_initial(RngStream& rng, PolyDlmState& s,
                           const DlmPriors& priors, int j) {
  const ScalarConditional c = initial_conditional(s, priors, j);
  s.initial(j) = rng.normal(c.mean, std::sqrt(c.var));
}

// Posterior of the innovation precision of block j: the prior updated with
// half the squared difference-operator residual of the block around its
// prior mean.
inline GammaConditional innovation_conditional(const PolyDlmState& s,
                                               const DlmPriors& priors,
                                               int j) {
  const int T = s.length();
  const std::vector<double> mu = block_prior_mean(s, j);
  const auto b = s.block(j);
  double q = 0.0;
  double prev = 0.0;
  for (int t = 0; t < T; ++t) {
    const double d = b[t] - mu[t];
    const double r = (t == 0) ? d : d - prev;
    q += r * r;
    prev = d;
  }
  return {priors.w_shape[j] + 0.5 * T, priors.w_rate[j] + 0.5 * q};
}

inline void sample_innovation_var(RngStream& rng, PolyDlmState& s,
                                  const DlmPriors& priors, int j) {
  const GammaConditional c = innovation_conditional(s, priors, j);
  s.w(j) = 1.0 / rng.gamma(c.shape, c.rate);
}

// Posterior of the observation precision in gaussian mode.
inline GammaConditional obs_var_conditional(const PolyDlmState& s,
                                            const DlmPriors& priors,
                                            std::span<const double> y) {
  const int T = s.length();
  if (static_cast<int>(y.size()) != T) {
    throw DimensionError("obs_var_conditional: data length mismatch");
  }
  const auto level = s.level();
  double q = 0.0;
  for (int t = 0; t < T; ++t) {
    const double r = y[t] - level[t];
    q += r * r;
  }
  return {priors.v_shape + 0.5 * T, priors.v_rate + 0.5 * q};
}

inline void sample_obs_var(RngStream& rng, PolyDlmState& s,
                           const DlmPriors& priors,
                           std::span<const double> y) {
  const GammaConditional c = obs_var_conditional(s, priors, y);
  s.v() = 1.0 / rng.gamma(c.shape, c.rate);
}

// Fill the blocks by running the transition recursion forward from the
// current initial values and innovation variances, top block first.
inline void simulate_blocks(RngStream& rng, PolyDlmState& s) {
  const int T = s.length();
  const int p = s.order();
  for (int j = p - 1; j >= 0; --j) {
    auto b = s.block(j);
    const double sd = std::sqrt(s.w(j));
    double prev_own = s.initial(j);
    for (int t = 0; t < T; ++t) {
      const double carry = (j < p - 1)
                               ? ((t == 0) ? s.initial(j + 1)
                                           : s.block(j + 1)[t - 1])
                               : 0.0;
      b[t] = prev_own + carry + rng.normal(0.0, sd);
      prev_own = b[t];
    }
  }
}

// Forward draw of every model unknown from its prior: initial values and
// variances first, then the blocks through the transition recursion. Used
// by prior-predictive checks and simulation.
inline void draw_from_prior(RngStream& rng, PolyDlmState& s,
                            const DlmPriors& priors) {
  const int p = s.order();
  for (int j = 0; j < p; ++j) {
    s.initial(j) = rng.normal(priors.initial_mean[j],
                              std::sqrt(priors.initial_var[j]));
    s.w(j) = 1.0 / rng.gamma(priors.w_shape[j], priors.w_rate[j]);
  }
  s.v() = 1.0 / rng.gamma(priors.v_shape, priors.v_rate);
  simulate_blocks(rng, s);
}

}  // namespace dynmix
