#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "dynmix/errors.hpp"
#include "dynmix/link.hpp"
#include "dynmix/poly_dlm.hpp"
#include "dynmix/rng.hpp"

namespace dynmix {

// Per-site proposal scales for the component-wise random-walk sampler,
// adapted in fixed-length batches toward a target acceptance rate.
// Acceptance is also tallied over a post-adaptation window (batches past
// kPostAdaptBatch) so long-run rates can be reported separately from the
// transient.
class AdaptiveScales {
 public:
  static constexpr int kBatchLen = 50;
  static constexpr double kTargetRate = 0.44;
  static constexpr long kPostAdaptBatch = 400;

  explicit AdaptiveScales(int T)
      : log_sd_(T, 0.0), batch_accepts_(T, 0), batch_trials_(T, 0),
        post_accepts_(T, 0), post_trials_(T, 0), lifetime_accepts_(T, 0),
        lifetime_trials_(T, 0) {}

  int size() const { return static_cast<int>(log_sd_.size()); }
  double sd(int t) const { return std::exp(log_sd_[t]); }
  double log_sd(int t) const { return log_sd_[t]; }
  void set_log_sd(int t, double v) { log_sd_[t] = v; }

  // Adaptation step for the n-th batch (n starts at 1).
  static double step_size(long n) {
    return std::min(0.01, 1.0 / std::sqrt(static_cast<double>(n)));
  }

  void record(int t, bool accepted) {
    batch_trials_[t] += 1;
    lifetime_trials_[t] += 1;
    if (accepted) {
      batch_accepts_[t] += 1;
      lifetime_accepts_[t] += 1;
    }
    if (batches_done_ >= kPostAdaptBatch) {
      post_trials_[t] += 1;
      if (accepted) post_accepts_[t] += 1;
    }
  }

  void record_nonfinite() { nonfinite_ += 1; }

  // Call once per completed sweep; triggers adapt() every kBatchLen sweeps.
  void end_iteration() {
    if (++iter_in_batch_ >= kBatchLen) adapt();
  }

  // Nudge each site's log scale by +/- step_size(n) depending on whether
  // its batch acceptance fraction exceeded the target, then reset the
  // batch counters and advance n.
  void adapt() {
    const double step = step_size(batch_index_);
    for (int t = 0; t < size(); ++t) {
      if (batch_trials_[t] == 0) continue;
      const double frac =
          static_cast<double>(batch_accepts_[t]) / batch_trials_[t];
      log_sd_[t] += (frac > kTargetRate) ? step : -step;
      batch_accepts_[t] = 0;
      batch_trials_[t] = 0;
    }
    iter_in_batch_ = 0;
    batch_index_ += 1;
    batches_done_ += 1;
  }

  long batch_index() const { return batch_index_; }
  long batches_completed() const { return batches_done_; }
  long nonfinite_count() const { return nonfinite_; }

  double lifetime_rate(int t) const {
    return lifetime_trials_[t] == 0
               ? 0.0
               : static_cast<double>(lifetime_accepts_[t]) /
                     lifetime_trials_[t];
  }
  long post_window_trials(int t) const { return post_trials_[t]; }
  double post_window_rate(int t) const {
    return post_trials_[t] == 0 ? 0.0
                                : static_cast<double>(post_accepts_[t]) /
                                      post_trials_[t];
  }

 private:
  std::vector<double> log_sd_;
  std::vector<int> batch_accepts_;
  std::vector<int> batch_trials_;
  std::vector<long> post_accepts_;
  std::vector<long> post_trials_;
  std::vector<long> lifetime_accepts_;
  std::vector<long> lifetime_trials_;
  long iter_in_batch_ = 0;
  long batch_index_ = 1;
  long batches_done_ = 0;
  long nonfinite_ = 0;
};

// Conditional of a single level value given every other state quantity,
// for a trend of order >= 2. Interior sites average the backward and
// forward transition predictions (half the innovation variance); the last
// site has only the backward one (full innovation variance).
inline ScalarConditional level_site_conditional(const PolyDlmState& s,
                                                int t) {
  if (s.order() < 2) {
    throw ConfigError("level_site_conditional: requires order >= 2");
  }
  const int T = s.length();
  const auto level = s.level();
  const auto slope = s.block(1);
  const double prev_level = (t >= 1) ? level[t - 1] : s.initial(0);
  const double prev_slope = (t >= 1) ? slope[t - 1] : s.initial(1);
  if (t == T - 1) {
    return {prev_level + prev_slope, s.w(0)};
  }
  const double mean =
      0.5 * ((level[t + 1] - slope[t]) + (prev_level + prev_slope));
  return {mean, 0.5 * s.w(0)};
}

// One component-wise Metropolis sweep over the level path. Each site's
// random-walk proposal is judged against its single-site conditional prior
// times the observation likelihood at the link-inverted level;
// `loglik(obs_t, alpha)` must return the per-observation log-likelihood.
// The site conditional is recomputed from the partially updated path, so
// within-sweep updates propagate immediately. A non-finite log-acceptance
// rejects the proposal and bumps the diagnostics counter.
template <class LogLik>
void cwmh_sweep(RngStream& rng, PolyDlmState& s, std::span<const double> obs,
                const Link& link, AdaptiveScales& scales, LogLik&& loglik) {
  const int T = s.length();
  if (static_cast<int>(obs.size()) != T) {
    throw DimensionError("cwmh_sweep: observation length mismatch");
  }
  auto level = s.level();
  for (int t = 0; t < T; ++t) {
    const ScalarConditional c = level_site_conditional(s, t);
    const double cur = level[t];
    const double prop = rng.normal(cur, scales.sd(t));
    const double log_accept = log_normal_pdf(prop, c.mean, c.var) -
                              log_normal_pdf(cur, c.mean, c.var) +
                              loglik(obs[t], link.inverse(prop)) -
                              loglik(obs[t], link.inverse(cur));
    bool accept = false;
    if (!std::isfinite(log_accept)) {
      scales.record_nonfinite();
    } else if (log_accept >= 0.0) {
      accept = true;
    } else {
      accept = std::log(rng.uniform()) < log_accept;
    }
    if (accept) level[t] = prop;
    scales.record(t, accept);
  }
  scales.end_iteration();
}

// Latent utilities for the probit path: each latent is a unit-variance
// normal centred at the level, truncated to the side dictated by the
// binary response.
inline void sample_probit_latents(RngStream& rng, const PolyDlmState& s,
                                  std::span<const double> responses,
                                  std::span<double> latents) {
  const int T = s.length();
  if (static_cast<int>(responses.size()) != T ||
      static_cast<int>(latents.size()) != T) {
    throw DimensionError("sample_probit_latents: length mismatch");
  }
  const auto level = s.level();
  for (int t = 0; t < T; ++t) {
    latents[t] = (responses[t] > 0.5)
                     ? rng.truncated_normal_lower(level[t], 1.0, 0.0)
                     : rng.truncated_normal_upper(level[t], 1.0, 0.0);
  }
}

// Joint level draw in the probit path: the latents act as unit-precision
// observations on the level.
inline void sample_level_probit(RngStream& rng, PolyDlmState& s,
                                std::span<const double> latents) {
  const BlockConditional c = level_conditional(s, latents, 1.0);
  const BandedCholesky chol = cholesky(c.precision);
  const std::vector<double> draw = sample_from_precision(rng, chol, c.info);
  auto dst = s.level();
  for (int t = 0; t < s.length(); ++t) dst[t] = draw[t];
}

}  // namespace dynmix
