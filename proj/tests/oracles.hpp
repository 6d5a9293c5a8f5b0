// Dense reference implementations used only by the test suite. Everything
// here is built with Eigen and straightforward formulas, independent of the
// banded code paths under test.
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <numeric>
#include <vector>

#include "dynmix/dynmix.hpp"

namespace oracle {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// First-difference operator: unit diagonal, -1 first subdiagonal.
inline Matrix dense_difference(int T) {
  Matrix h = Matrix::Identity(T, T);
  for (int i = 1; i < T; ++i) h(i, i - 1) = -1.0;
  return h;
}

// Shift operator B = I - H: unit first subdiagonal.
inline Matrix dense_shift(int T) {
  Matrix b = Matrix::Zero(T, T);
  for (int i = 1; i < T; ++i) b(i, i - 1) = 1.0;
  return b;
}

inline Matrix from_banded(const dynmix::BandedSpd& a) {
  Matrix m(a.dim(), a.dim());
  for (int i = 0; i < a.dim(); ++i) {
    for (int j = 0; j < a.dim(); ++j) m(i, j) = a.entry(i, j);
  }
  return m;
}

inline Matrix cholesky_dense(const dynmix::BandedCholesky& l) {
  Matrix m = Matrix::Zero(l.dim(), l.dim());
  for (int i = 0; i < l.dim(); ++i) {
    for (int j = 0; j <= i; ++j) m(i, j) = l.factor_entry(i, j);
  }
  return m;
}

// Joint Gaussian built by sequentially appending affine blocks
// new = lin * existing + shift + noise.
struct JointGaussian {
  Vector mean;
  Matrix cov;

  int dim() const { return static_cast<int>(mean.size()); }

  static JointGaussian independent(const Vector& mean, const Vector& var) {
    JointGaussian j;
    j.mean = mean;
    j.cov = var.asDiagonal();
    return j;
  }

  void append(const Matrix& lin, const Vector& shift,
              const Matrix& noise_cov) {
    const int n = dim();
    const int m = static_cast<int>(lin.rows());
    Vector new_mean(n + m);
    new_mean.head(n) = mean;
    new_mean.tail(m) = lin * mean + shift;
    Matrix new_cov(n + m, n + m);
    new_cov.topLeftCorner(n, n) = cov;
    const Matrix cross = lin * cov;  // cov(new, old)
    new_cov.bottomLeftCorner(m, n) = cross;
    new_cov.topRightCorner(n, m) = cross.transpose();
    new_cov.bottomRightCorner(m, m) =
        lin * cov * lin.transpose() + noise_cov;
    mean = std::move(new_mean);
    cov = std::move(new_cov);
  }

  // Reorder so that target index i holds former index perm[i].
  void reorder(const std::vector<int>& perm) {
    const int n = dim();
    Vector new_mean(n);
    Matrix new_cov(n, n);
    for (int i = 0; i < n; ++i) {
      new_mean(i) = mean(perm[i]);
      for (int j = 0; j < n; ++j) new_cov(i, j) = cov(perm[i], perm[j]);
    }
    mean = std::move(new_mean);
    cov = std::move(new_cov);
  }
};

struct ConditionalResult {
  Vector mean;
  Matrix cov;
};

// Gaussian conditioning by Schur complement: distribution of the `keep`
// coordinates given observed values of the `given` coordinates.
inline ConditionalResult condition(const JointGaussian& j,
                                   const std::vector<int>& keep,
                                   const std::vector<int>& given,
                                   const Vector& values) {
  const int a = static_cast<int>(keep.size());
  const int b = static_cast<int>(given.size());
  Vector mu_a(a), mu_b(b);
  Matrix s_aa(a, a), s_ab(a, b), s_bb(b, b);
  for (int i = 0; i < a; ++i) {
    mu_a(i) = j.mean(keep[i]);
    for (int k = 0; k < a; ++k) s_aa(i, k) = j.cov(keep[i], keep[k]);
    for (int k = 0; k < b; ++k) s_ab(i, k) = j.cov(keep[i], given[k]);
  }
  for (int i = 0; i < b; ++i) {
    mu_b(i) = j.mean(given[i]);
    for (int k = 0; k < b; ++k) s_bb(i, k) = j.cov(given[i], given[k]);
  }
  const Eigen::LDLT<Matrix> ldlt(s_bb);
  ConditionalResult r;
  r.mean = mu_a + s_ab * ldlt.solve(values - mu_b);
  r.cov = s_aa - s_ab * ldlt.solve(s_ab.transpose());
  return r;
}

// Canonical variable layout for trend joints: the order-p initial values
// first, then block 0 (level) through block p-1, each of length T.
struct TrendLayout {
  int T;
  int p;
  int idx_initial(int j) const { return j; }
  int idx_block(int j, int t) const { return p + j * T + t; }
  int dim() const { return p + p * T; }

  std::vector<int> block_indices(int j) const {
    std::vector<int> v(T);
    for (int t = 0; t < T; ++t) v[t] = idx_block(j, t);
    return v;
  }

  std::vector<int> complement(const std::vector<int>& drop,
                              int total_dim) const {
    std::vector<char> mask(total_dim, 0);
    for (int i : drop) mask[i] = 1;
    std::vector<int> v;
    for (int i = 0; i < total_dim; ++i) {
      if (!mask[i]) v.push_back(i);
    }
    return v;
  }
};

// Trend joint from the original time recursion: the p-vector state evolves
// one step at a time; each step adds one value per block.
inline JointGaussian trend_joint_recursion(int T, int p,
                                           const std::vector<double>& w,
                                           const dynmix::DlmPriors& priors) {
  Vector m0(p), v0(p);
  for (int j = 0; j < p; ++j) {
    m0(j) = priors.initial_mean[j];
    v0(j) = priors.initial_var[j];
  }
  JointGaussian joint = JointGaussian::independent(m0, v0);

  Matrix step = Matrix::Identity(p, p);
  for (int j = 0; j + 1 < p; ++j) step(j, j + 1) = 1.0;
  Matrix noise = Matrix::Zero(p, p);
  for (int j = 0; j < p; ++j) noise(j, j) = w[j];

  for (int t = 0; t < T; ++t) {
    // lin maps the full existing vector; only the previous time slice
    // (or the initials at t = 0) feeds the new one.
    Matrix lin = Matrix::Zero(p, joint.dim());
    const int prev = (t == 0) ? 0 : p + (t - 1) * p;
    lin.middleCols(prev, p) = step;
    joint.append(lin, Vector::Zero(p), noise);
  }

  // Time layout [initials, slice 1, ..., slice T] -> canonical layout.
  TrendLayout lay{T, p};
  std::vector<int> perm(lay.dim());
  for (int j = 0; j < p; ++j) perm[lay.idx_initial(j)] = j;
  for (int j = 0; j < p; ++j) {
    for (int t = 0; t < T; ++t) perm[lay.idx_block(j, t)] = p + t * p + j;
  }
  joint.reorder(perm);
  return joint;
}

// Trend joint from the block-wise factorization: top block first, each
// block conditionally normal around its running-sum mean with covariance
// w * (H^T H)^{-1}.
inline JointGaussian trend_joint_blockwise(int T, int p,
                                           const std::vector<double>& w,
                                           const dynmix::DlmPriors& priors) {
  Vector m0(p), v0(p);
  for (int j = 0; j < p; ++j) {
    m0(j) = priors.initial_mean[j];
    v0(j) = priors.initial_var[j];
  }
  JointGaussian joint = JointGaussian::independent(m0, v0);

  const Matrix hth = dense_difference(T).transpose() * dense_difference(T);
  const Matrix hth_inv = hth.inverse();
  Matrix lower_ones = Matrix::Zero(T, T);  // strictly lower all-ones
  for (int i = 1; i < T; ++i) {
    for (int j = 0; j < i; ++j) lower_ones(i, j) = 1.0;
  }

  // Append order: block p-1 (top) down to block 0; position of block j in
  // the append layout is p + (p-1-j)*T.
  for (int j = p - 1; j >= 0; --j) {
    Matrix lin = Matrix::Zero(T, joint.dim());
    for (int t = 0; t < T; ++t) lin(t, j) = 1.0;  // its own initial
    if (j < p - 1) {
      for (int t = 0; t < T; ++t) lin(t, j + 1) = 1.0;
      const int above = p + (p - 2 - j) * T;
      lin.middleCols(above, T) += lower_ones;
    }
    joint.append(lin, Vector::Zero(T), w[j] * hth_inv);
  }

  TrendLayout lay{T, p};
  std::vector<int> perm(lay.dim());
  for (int j = 0; j < p; ++j) perm[lay.idx_initial(j)] = j;
  for (int j = 0; j < p; ++j) {
    for (int t = 0; t < T; ++t) {
      perm[lay.idx_block(j, t)] = p + (p - 1 - j) * T + t;
    }
  }
  joint.reorder(perm);
  return joint;
}

// Append observations y = level + noise with common variance v; they take
// indices lay.dim() .. lay.dim() + T - 1.
inline void append_level_observations(JointGaussian& joint,
                                      const TrendLayout& lay, double v) {
  Matrix lin = Matrix::Zero(lay.T, joint.dim());
  for (int t = 0; t < lay.T; ++t) lin(t, lay.idx_block(0, t)) = 1.0;
  joint.append(lin, Vector::Zero(lay.T),
               v * Matrix::Identity(lay.T, lay.T));
}

// Exact (grid-quadrature) posterior for a three-point level path with
// binomial responses: slope block pinned at zero, so the prior of the path
// is the difference-operator Gaussian around a constant. Used to validate
// the component-wise sampler against brute-force integration.
struct GridPosterior3 {
  std::vector<double> grid;
  std::vector<double> marginal_cdf[3];
  double mean[3];

  // Draw from a marginal by inverse CDF.
  double sample_site(int t, double u) const {
    const auto& cdf = marginal_cdf[t];
    const auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
    std::size_t i = static_cast<std::size_t>(it - cdf.begin());
    if (i >= grid.size()) i = grid.size() - 1;
    if (i == 0) return grid[0];
    const double c0 = cdf[i - 1];
    const double c1 = cdf[i];
    const double frac = (c1 > c0) ? (u - c0) / (c1 - c0) : 0.5;
    return grid[i - 1] + frac * (grid[i] - grid[i - 1]);
  }
};

inline GridPosterior3 grid_posterior_t3(double level_const, double w,
                                        const std::vector<int>& counts,
                                        int trials, const dynmix::Link& link,
                                        double lo, double hi, int n) {
  GridPosterior3 out;
  out.grid.resize(n);
  const double step = (hi - lo) / (n - 1);
  for (int i = 0; i < n; ++i) out.grid[i] = lo + step * i;

  std::vector<std::vector<double>> loglik(3, std::vector<double>(n));
  for (int t = 0; t < 3; ++t) {
    for (int i = 0; i < n; ++i) {
      const double a = link.inverse(out.grid[i]);
      loglik[t][i] = counts[t] * std::log(a) +
                     (trials - counts[t]) * std::log1p(-a);
    }
  }

  std::vector<std::vector<double>> marg(3, std::vector<double>(n, 0.0));
  double max_logpost = -1e300;
  std::vector<double> logpost;
  logpost.reserve(static_cast<std::size_t>(n) * n * n);
  for (int i = 0; i < n; ++i) {
    const double t1 = out.grid[i];
    const double q1 = (t1 - level_const) * (t1 - level_const);
    for (int j = 0; j < n; ++j) {
      const double t2 = out.grid[j];
      const double q2 = (t2 - t1) * (t2 - t1);
      for (int k = 0; k < n; ++k) {
        const double t3 = out.grid[k];
        const double q3 = (t3 - t2) * (t3 - t2);
        const double lp = -(q1 + q2 + q3) / (2.0 * w) + loglik[0][i] +
                          loglik[1][j] + loglik[2][k];
        logpost.push_back(lp);
        if (lp > max_logpost) max_logpost = lp;
      }
    }
  }
  double total = 0.0;
  std::size_t idx = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) {
        const double p = std::exp(logpost[idx++] - max_logpost);
        marg[0][i] += p;
        marg[1][j] += p;
        marg[2][k] += p;
        total += p;
      }
    }
  }
  for (int t = 0; t < 3; ++t) {
    out.marginal_cdf[t].resize(n);
    double acc = 0.0;
    double mean = 0.0;
    for (int i = 0; i < n; ++i) {
      acc += marg[t][i] / total;
      out.marginal_cdf[t][i] = acc;
      mean += out.grid[i] * marg[t][i] / total;
    }
    out.marginal_cdf[t][n - 1] = 1.0;
    out.mean[t] = mean;
  }
  return out;
}

// Regularized lower incomplete gamma P(a, x) (series + continued fraction).
inline double gamma_p(double a, double x) {
  if (x <= 0.0) return 0.0;
  if (x < a + 1.0) {
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int n = 0; n < 1000; ++n) {
      ap += 1.0;
      del *= x / ap;
      sum += del;
      if (std::fabs(del) < std::fabs(sum) * 1e-15) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
  }
  const double fpmin = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / fpmin;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 1000; ++i) {
    const double an = -static_cast<double>(i) * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < fpmin) d = fpmin;
    c = b + an / c;
    if (std::fabs(c) < fpmin) c = fpmin;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < 1e-15) break;
  }
  return 1.0 - std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

// CDF of a Gamma(shape, rate) variate.
inline double gamma_cdf(double x, double shape, double rate) {
  return gamma_p(shape, rate * x);
}

}  // namespace oracle
