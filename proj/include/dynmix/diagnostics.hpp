#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "dynmix/errors.hpp"
#include "dynmix/mathfn.hpp"

namespace dynmix {

struct HpdInterval {
  double lower;
  double upper;
  double width() const { return upper - lower; }
};

// Highest posterior density interval from draws: the shortest window of
// ceil(mass * n) consecutive order statistics. Ties go to the window with
// the smallest lower endpoint.
inline HpdInterval hpd_interval(std::span<const double> draws, double mass) {
  if (draws.empty()) throw DimensionError("hpd_interval: no draws");
  if (!(mass > 0.0 && mass <= 1.0)) {
    throw Error("hpd_interval: mass outside (0,1]");
  }
  std::vector<double> s(draws.begin(), draws.end());
  std::sort(s.begin(), s.end());
  const std::size_t n = s.size();
  std::size_t m = static_cast<std::size_t>(
      std::ceil(mass * static_cast<double>(n)));
  if (m < 1) m = 1;
  if (m > n) m = n;
  std::size_t best = 0;
  double best_width = s[m - 1] - s[0];
  for (std::size_t j = 1; j + m <= n; ++j) {
    const double w = s[j + m - 1] - s[j];
    if (w < best_width) {
      best_width = w;
      best = j;
    }
  }
  return {s[best], s[best + m - 1]};
}

struct ParamSummary {
  double median;
  HpdInterval hpd;
};

inline ParamSummary summarize_draws(std::span<const double> draws,
                                    double mass) {
  return {median(draws), hpd_interval(draws, mass)};
}

struct CurveSummary {
  std::vector<double> median;
  std::vector<double> lower;
  std::vector<double> upper;
};

// Pointwise summary of a kept-draws matrix (row-major, n_draws rows of
// length T).
inline CurveSummary summarize_curve(std::span<const double> draws, int T,
                                    double mass) {
  if (T <= 0) throw DimensionError("summarize_curve: T must be positive");
  if (draws.size() % static_cast<std::size_t>(T) != 0 || draws.empty()) {
    throw DimensionError("summarize_curve: draw matrix shape mismatch");
  }
  const std::size_t n = draws.size() / static_cast<std::size_t>(T);
  CurveSummary cs;
  cs.median.resize(T);
  cs.lower.resize(T);
  cs.upper.resize(T);
  std::vector<double> col(n);
  for (int t = 0; t < T; ++t) {
    for (std::size_t i = 0; i < n; ++i) {
      col[i] = draws[i * static_cast<std::size_t>(T) + t];
    }
    const ParamSummary ps = summarize_draws(col, mass);
    cs.median[t] = ps.median;
    cs.lower[t] = ps.hpd.lower;
    cs.upper[t] = ps.hpd.upper;
  }
  return cs;
}

inline double rmse(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.empty()) {
    throw DimensionError("rmse: length mismatch or empty");
  }
  double ss = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    ss += d * d;
  }
  return std::sqrt(ss / static_cast<double>(a.size()));
}

inline double mean_abs_diff(std::span<const double> a,
                            std::span<const double> b) {
  if (a.size() != b.size() || a.empty()) {
    throw DimensionError("mean_abs_diff: length mismatch or empty");
  }
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::fabs(a[i] - b[i]);
  return s / static_cast<double>(a.size());
}

// Kolmogorov survival function Q(lambda) = 2 sum_j (-1)^{j-1} exp(-2 j^2
// lambda^2).
inline double kolmogorov_q(double lambda) {
  if (lambda < 1e-8) return 1.0;
  double sum = 0.0;
  double sign = 1.0;
  const double a = -2.0 * lambda * lambda;
  for (int j = 1; j <= 100; ++j) {
    const double term = sign * 2.0 * std::exp(a * j * j);
    sum += term;
    if (std::fabs(term) < 1e-12 * std::fabs(sum) || std::fabs(term) < 1e-300) {
      break;
    }
    sign = -sign;
  }
  return std::clamp(sum, 0.0, 1.0);
}

struct KsResult {
  double statistic;
  double p_value;
};

// Two-sample Kolmogorov-Smirnov test with the small-sample-corrected
// asymptotic p-value.
inline KsResult ks_two_sample(std::span<const double> a,
                              std::span<const double> b) {
  if (a.empty() || b.empty()) throw DimensionError("ks_two_sample: empty");
  std::vector<double> x(a.begin(), a.end());
  std::vector<double> y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const std::size_t n1 = x.size();
  const std::size_t n2 = y.size();
  double d = 0.0;
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < n1 && j < n2) {
    const double v = (x[i] <= y[j]) ? x[i] : y[j];
    while (i < n1 && x[i] <= v) ++i;
    while (j < n2 && y[j] <= v) ++j;
    const double f1 = static_cast<double>(i) / static_cast<double>(n1);
    const double f2 = static_cast<double>(j) / static_cast<double>(n2);
    d = std::max(d, std::fabs(f1 - f2));
  }
  const double ne = static_cast<double>(n1) * static_cast<double>(n2) /
                    static_cast<double>(n1 + n2);
  const double s = std::sqrt(ne);
  return {d, kolmogorov_q((s + 0.12 + 0.11 / s) * d)};
}

// One-sample variant against a reference CDF.
template <class Cdf>
KsResult ks_one_sample(std::span<const double> sample, Cdf&& cdf) {
  if (sample.empty()) throw DimensionError("ks_one_sample: empty");
  std::vector<double> x(sample.begin(), sample.end());
  std::sort(x.begin(), x.end());
  const std::size_t n = x.size();
  double d = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double f = cdf(x[i]);
    const double lo = static_cast<double>(i) / static_cast<double>(n);
    const double hi = static_cast<double>(i + 1) / static_cast<double>(n);
    d = std::max(d, std::max(std::fabs(f - lo), std::fabs(hi - f)));
  }
  const double s = std::sqrt(static_cast<double>(n));
  return {d, kolmogorov_q((s + 0.12 + 0.11 / s) * d)};
}

}  // namespace dynmix
