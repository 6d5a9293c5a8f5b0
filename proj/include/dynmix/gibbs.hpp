#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "dynmix/errors.hpp"
#include "dynmix/link.hpp"
#include "dynmix/link_samplers.hpp"
#include "dynmix/mixture.hpp"
#include "dynmix/poly_dlm.hpp"
#include "dynmix/rng.hpp"

namespace dynmix {

enum class DataMode { mixture, bernoulli, binomial, gaussian };

inline std::string data_mode_name(DataMode m) {
  switch (m) {
    case DataMode::mixture:
      return "mixture";
    case DataMode::bernoulli:
      return "bernoulli";
    case DataMode::binomial:
      return "binomial";
    case DataMode::gaussian:
      return "gaussian";
  }
  return "?";
}

struct FitConfig {
  long iterations = 220000;
  long burn_in = 20000;
  long thin = 200;
  int order = 2;
  LinkKind link = LinkKind::logit;
  std::uint64_t seed = 1;
  int trials = 1;  // binomial mode only
  DlmPriors dlm_priors = DlmPriors::defaults(2);
  MixturePriors mix_priors;
  bool mix_priors_from_data = true;  // anchor mixture mean priors at quartiles
  bool keep_level = false;           // store raw level draws alongside alpha

  long kept() const { return (iterations - burn_in) / thin; }

  void validate(DataMode mode) const {
    if (iterations < 1) throw ConfigError("iterations must be >= 1");
    if (burn_in < 0 || burn_in >= iterations) {
      throw ConfigError("burn-in must lie in [0, iterations)");
    }
    if (thin < 1) throw ConfigError("thin must be >= 1");
    if (kept() < 1) throw ConfigError("no draws kept: lengthen the run");
    if (order < 1) throw ConfigError("order must be >= 1");
    dlm_priors.validate(order);
    const bool link_mode = (mode != DataMode::gaussian);
    if (link_mode) {
      if (link == LinkKind::identity) {
        throw ConfigError("identity link requires gaussian mode");
      }
      if (order < 2) {
        throw ConfigError("link-mode fits require order >= 2");
      }
    } else if (link != LinkKind::identity) {
      throw ConfigError("gaussian mode uses the identity link");
    }
    if (mode == DataMode::binomial) {
      if (trials < 1) throw ConfigError("trials must be >= 1");
      if (link == LinkKind::probit && trials > 1) {
        throw ConfigError("probit path handles binary responses only");
      }
    }
    if (mode == DataMode::mixture && !mix_priors_from_data) {
      mix_priors.validate();
    }
  }
};

// Kept draws and sampler diagnostics. Matrices are row-major with one row
// per kept draw.
struct ChainStore {
  DataMode mode = DataMode::mixture;
  LinkKind link = LinkKind::logit;
  int T = 0;
  int order = 0;
  long kept = 0;
  std::uint64_t seed = 0;

  std::vector<double> mu1, phi1, mu2, phi2;  // mixture mode
  std::vector<double> theta0;                // kept x order
  std::vector<double> w;                     // kept x order
  std::vector<double> v;                     // gaussian mode
  std::vector<double> alpha;                 // kept x T
  std::vector<double> level;                 // kept x T when keep_level

  std::vector<double> accept_rate;  // per-site CWMH acceptance
  long nonfinite_rejections = 0;
  long adapt_batches = 0;

  std::span<const double> alpha_draw(long i) const {
    return {alpha.data() + static_cast<std::size_t>(i) * T,
            static_cast<std::size_t>(T)};
  }
};

using ProgressFn = std::function<void(long iteration, long total)>;

namespace detail {

// Fixed substream tags: every conditional family draws from its own
// deterministic stream, so reordering one family's internals cannot
// perturb another's sequence.
enum : std::uint64_t {
  kStreamInit = 1,
  kStreamComponents = 2,
  kStreamAllocations = 3,
  kStreamInitials = 4,
  kStreamInnovations = 5,
  kStreamBlocks = 6,
  kStreamLevel = 7,
  kStreamObsVar = 8,
  kStreamLatents = 9,
};

template <class Fn>
void guarded(long iteration, const char* conditional, Fn&& fn) {
  try {
    fn();
  } catch (const NumericError&) {
    throw;
  } catch (const Error& e) {
    throw NumericError(iteration, conditional, e.what());
  }
}

inline void record_common(ChainStore& out, const PolyDlmState& state,
                          const Link& link, bool keep_level) {
  const int T = state.length();
  for (int j = 0; j < state.order(); ++j) {
    out.theta0.push_back(state.initial(j));
    out.w.push_back(state.w(j));
  }
  const auto level = state.level();
  for (int t = 0; t < T; ++t) out.alpha.push_back(link.inverse(level[t]));
  if (keep_level) {
    for (int t = 0; t < T; ++t) out.level.push_back(level[t]);
  }
}

}  // namespace detail

// Gibbs driver shared by every data mode. `y` is real-valued data
// (mixture/gaussian) and `counts` integer responses (bernoulli/binomial);
// exactly one of them is used, depending on mode.
inline ChainStore run_fit(const FitConfig& cfg, DataMode mode,
                          std::span<const double> y,
                          std::span<const int> counts,
                          const ProgressFn& progress = {}) {
  cfg.validate(mode);
  const bool link_mode = (mode != DataMode::gaussian);
  const int T = link_mode && mode != DataMode::mixture
                    ? static_cast<int>(counts.size())
                    : static_cast<int>(y.size());
  if (T < 1) throw DataError("empty data");
  if (mode == DataMode::bernoulli || mode == DataMode::binomial) {
    const int n = (mode == DataMode::bernoulli) ? 1 : cfg.trials;
    for (int t = 0; t < T; ++t) {
      if (counts[t] < 0 || counts[t] > n) {
        throw DataError("count outside [0, trials] at row " +
                        std::to_string(t + 1));
      }
    }
  }

  const int p = cfg.order;
  const Link link{cfg.link};
  const int trials = (mode == DataMode::binomial) ? cfg.trials : 1;

  RngStream root(cfg.seed);
  RngStream init_rng = root.substream(detail::kStreamInit);
  RngStream comp_rng = root.substream(detail::kStreamComponents);
  RngStream alloc_rng = root.substream(detail::kStreamAllocations);
  RngStream initial_rng = root.substream(detail::kStreamInitials);
  RngStream innov_rng = root.substream(detail::kStreamInnovations);
  RngStream block_rng = root.substream(detail::kStreamBlocks);
  RngStream level_rng = root.substream(detail::kStreamLevel);
  RngStream obsvar_rng = root.substream(detail::kStreamObsVar);
  RngStream latent_rng = root.substream(detail::kStreamLatents);

  PolyDlmState state(T, p);
  for (int j = 0; j < p; ++j) {
    state.initial(j) = init_rng.normal(cfg.dlm_priors.initial_mean[j],
                                       std::sqrt(cfg.dlm_priors.initial_var[j]));
  }

  MixturePriors mix_priors = cfg.mix_priors;
  MixtureParams params;
  std::vector<int> z;
  std::vector<double> responses;  // level-step observations
  std::vector<double> latents(T, 0.0);

  if (mode == DataMode::mixture) {
    if (cfg.mix_priors_from_data) mix_priors = MixturePriors::from_data(y);
    mix_priors.validate();
    params.mu = mix_priors.mu_mean;
    params.phi = {1.0, 1.0};
    z = initial_allocations(y);
    responses.assign(z.begin(), z.end());
  } else if (mode == DataMode::gaussian) {
    responses.assign(y.begin(), y.end());
  } else {
    responses.assign(counts.begin(), counts.end());
  }

  AdaptiveScales scales(link_mode ? T : 0);

  const auto binom_loglik = [trials](double yt, double a) {
    return yt * std::log(a) + (trials - yt) * std::log1p(-a);
  };

  ChainStore out;
  out.mode = mode;
  out.link = cfg.link;
  out.T = T;
  out.order = p;
  out.seed = cfg.seed;

  for (long iter = 1; iter <= cfg.iterations; ++iter) {
    if (mode == DataMode::mixture) {
      detail::guarded(iter, "components", [&] {
        sample_components(comp_rng, params, mix_priors, y, z);
        enforce_order(params, z);
      });
      detail::guarded(iter, "allocations", [&] {
        std::vector<double> alpha_now(T);
        const auto level = state.level();
        for (int t = 0; t < T; ++t) alpha_now[t] = link.inverse(level[t]);
        sample_allocations(alloc_rng, params, alpha_now, y, z);
        for (int t = 0; t < T; ++t) responses[t] = z[t];
      });
    }

    for (int j = p - 1; j >= 1; --j) {
      detail::guarded(iter, "initial", [&] {
        sample_initial(initial_rng, state, cfg.dlm_priors, j);
      });
      detail::guarded(iter, "innovation", [&] {
        sample_innovation_var(innov_rng, state, cfg.dlm_priors, j);
      });
      detail::guarded(iter, "block", [&] {
        sample_state_block(block_rng, state, j);
      });
    }
    detail::guarded(iter, "initial", [&] {
      sample_initial(initial_rng, state, cfg.dlm_priors, 0);
    });
    detail::guarded(iter, "innovation", [&] {
      sample_innovation_var(innov_rng, state, cfg.dlm_priors, 0);
    });

    if (!link_mode) {
      detail::guarded(iter, "level", [&] {
        sample_level_gaussian(level_rng, state, responses);
      });
      detail::guarded(iter, "obs-var", [&] {
        sample_obs_var(obsvar_rng, state, cfg.dlm_priors, responses);
      });
    } else if (cfg.link == LinkKind::probit) {
      detail::guarded(iter, "latents", [&] {
        sample_probit_latents(latent_rng, state, responses, latents);
      });
      detail::guarded(iter, "level", [&] {
        sample_level_probit(level_rng, state, latents);
      });
    } else {
      detail::guarded(iter, "level", [&] {
        cwmh_sweep(level_rng, state, responses, link, scales, binom_loglik);
      });
    }

    if (iter > cfg.burn_in && (iter - cfg.burn_in) % cfg.thin == 0) {
      if (mode == DataMode::mixture) {
        out.mu1.push_back(params.mu[0]);
        out.phi1.push_back(params.phi[0]);
        out.mu2.push_back(params.mu[1]);
        out.phi2.push_back(params.phi[1]);
      }
      detail::record_common(out, state, link, cfg.keep_level);
      if (mode == DataMode::gaussian) out.v.push_back(state.v());
      out.kept += 1;
    }
    if (progress && iter % 1000 == 0) progress(iter, cfg.iterations);
  }

  if (link_mode && cfg.link != LinkKind::probit) {
    out.accept_rate.resize(T);
    for (int t = 0; t < T; ++t) {
      out.accept_rate[t] = scales.post_window_trials(t) > 0
                               ? scales.post_window_rate(t)
                               : scales.lifetime_rate(t);
    }
    out.nonfinite_rejections = scales.nonfinite_count();
    out.adapt_batches = scales.batches_completed();
  }
  return out;
}

inline ChainStore run_mixture_fit(const FitConfig& cfg,
                                  std::span<const double> y,
                                  const ProgressFn& progress = {}) {
  return run_fit(cfg, DataMode::mixture, y, {}, progress);
}

inline ChainStore run_binomial_fit(const FitConfig& cfg,
                                   std::span<const int> counts,
                                   const ProgressFn& progress = {}) {
  const DataMode mode =
      (cfg.trials == 1) ? DataMode::bernoulli : DataMode::binomial;
  return run_fit(cfg, mode, {}, counts, progress);
}

inline ChainStore run_gaussian_fit(const FitConfig& cfg,
                                   std::span<const double> y,
                                   const ProgressFn& progress = {}) {
  return run_fit(cfg, DataMode::gaussian, y, {}, progress);
}

}  // namespace dynmix
