#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "dynmix/errors.hpp"
#include "dynmix/rng.hpp"

namespace dynmix {

// Symmetric positive (semi)definite matrix with lower bandwidth b, storing
// only the lower band. Layout is column-major: column j holds rows
// j .. j+b contiguously, so entry (i, j) with 0 <= i - j <= b lives at
// bands[j*(b+1) + (i-j)]. Rows past the matrix edge are padding zeros.
class BandedSpd {
 public:
  BandedSpd(int dim, int bandwidth)
      : dim_(dim), bandwidth_(bandwidth),
        bands_(static_cast<std::size_t>(dim) * (bandwidth + 1), 0.0) {
    if (dim <= 0) throw DimensionError("BandedSpd: dim must be positive");
    if (bandwidth < 0 || bandwidth >= dim) {
      throw DimensionError("BandedSpd: bandwidth out of range");
    }
  }

  int dim() const { return dim_; }
  int bandwidth() const { return bandwidth_; }

  // Mutable access to a stored (lower-triangle, in-band) entry.
  double& at(int i, int j) {
    return bands_[static_cast<std::size_t>(j) * (bandwidth_ + 1) + (i - j)];
  }

  // Symmetric read; zero outside the band.
  double entry(int i, int j) const {
    if (i < j) std::swap(i, j);
    if (i - j > bandwidth_) return 0.0;
    return bands_[static_cast<std::size_t>(j) * (bandwidth_ + 1) + (i - j)];
  }

  void add_to_diagonal(double c) {
    for (int j = 0; j < dim_; ++j) at(j, j) += c;
  }

  // this += c * other; other must fit inside this matrix's band.
  void add_scaled(const BandedSpd& other, double c) {
    if (other.dim_ != dim_) throw DimensionError("add_scaled: dim mismatch");
    if (other.bandwidth_ > bandwidth_) {
      throw DimensionError("add_scaled: bandwidth exceeds target");
    }
    for (int j = 0; j < dim_; ++j) {
      const int top = std::min(other.bandwidth_, dim_ - 1 - j);
      for (int d = 0; d <= top; ++d) {
        at(j + d, j) += c * other.entry(j + d, j);
      }
    }
  }

  // y = A x using the symmetric completion of the stored band.
  std::vector<double> matvec(std::span<const double> x) const {
    if (static_cast<int>(x.size()) != dim_) {
      throw DimensionError("matvec: vector length mismatch");
    }
    std::vector<double> y(dim_, 0.0);
    for (int i = 0; i < dim_; ++i) {
      double s = entry(i, i) * x[i];
      for (int d = 1; d <= bandwidth_; ++d) {
        if (i - d >= 0) s += entry(i, i - d) * x[i - d];
        if (i + d < dim_) s += entry(i + d, i) * x[i + d];
      }
      y[i] = s;
    }
    return y;
  }

 private:
  int dim_;
  int bandwidth_;
  std::vector<double> bands_;
};

// Lower Cholesky factor of a BandedSpd, same band storage.
class BandedCholesky {
 public:
  BandedCholesky(int dim, int bandwidth)
      : dim_(dim), bandwidth_(bandwidth),
        bands_(static_cast<std::size_t>(dim) * (bandwidth + 1), 0.0) {}

  int dim() const { return dim_; }
  int bandwidth() const { return bandwidth_; }

  double& at(int i, int j) {
    return bands_[static_cast<std::size_t>(j) * (bandwidth_ + 1) + (i - j)];
  }

  double factor_entry(int i, int j) const {
    if (i < j || i - j > bandwidth_) return 0.0;
    return bands_[static_cast<std::size_t>(j) * (bandwidth_ + 1) + (i - j)];
  }

  // Solve L y = b in place.
  void solve_lower(std::span<double> b) const {
    check(b.size());
    for (int i = 0; i < dim_; ++i) {
      double s = b[i];
      const int lo = std::max(0, i - bandwidth_);
      for (int k = lo; k < i; ++k) s -= factor_entry(i, k) * b[k];
      b[i] = s / factor_entry(i, i);
    }
  }

  // Solve L^T x = b in place.
  void solve_upper(std::span<double> b) const {
    check(b.size());
    for (int i = dim_ - 1; i >= 0; --i) {
      double s = b[i];
      const int hi = std::min(dim_ - 1, i + bandwidth_);
      for (int k = i + 1; k <= hi; ++k) s -= factor_entry(k, i) * b[k];
      b[i] = s / factor_entry(i, i);
    }
  }

  // Solve (L L^T) x = b in place.
  void solve(std::span<double> b) const {
    solve_lower(b);
    solve_upper(b);
  }

 private:
  void check(std::size_t n) const {
    if (static_cast<int>(n) != dim_) {
      throw DimensionError("solve: vector length mismatch");
    }
  }

  int dim_;
  int bandwidth_;
  std::vector<double> bands_;
};

// Banded Cholesky factorization, O(dim * bandwidth^2), no pivoting.
// `jitter` is added to the diagonal before factoring; a non-positive pivot
// raises NotPositiveDefiniteError carrying the 1-based pivot index.
inline BandedCholesky cholesky(const BandedSpd& a, double jitter = 0.0) {
  const int n = a.dim();
  const int b = a.bandwidth();
  BandedCholesky l(n, b);
  for (int j = 0; j < n; ++j) {
    double d = a.entry(j, j) + jitter;
    const int lo = std::max(0, j - b);
    for (int k = lo; k < j; ++k) {
      const double ljk = l.factor_entry(j, k);
      d -= ljk * ljk;
    }
    if (!(d > 0.0)) throw NotPositiveDefiniteError(j + 1);
    const double ljj = std::sqrt(d);
    l.at(j, j) = ljj;
    const int hi = std::min(n - 1, j + b);
    for (int i = j + 1; i <= hi; ++i) {
      double s = a.entry(i, j);
      const int klo = std::max(0, i - b);
      for (int k = klo; k < j; ++k) {
        s -= l.factor_entry(i, k) * l.factor_entry(j, k);
      }
      l.at(i, j) = s / ljj;
    }
  }
  return l;
}

// Mean of N(P^{-1} h, P^{-1}) given the factor of P and the information
// vector h: two triangular solves.
inline std::vector<double> solve_mean(const BandedCholesky& chol,
                                      std::span<const double> info) {
  std::vector<double> x(info.begin(), info.end());
  chol.solve(x);
  return x;
}

// Deterministic core of the precision-form sampler: mean + L^{-T} noise.
// With noise identically zero this returns exactly the conditional mean.
inline std::vector<double> sample_from_precision_with_noise(
    const BandedCholesky& chol, std::span<const double> info,
    std::span<const double> noise) {
  std::vector<double> x = solve_mean(chol, info);
  std::vector<double> u(noise.begin(), noise.end());
  chol.solve_upper(u);
  for (int i = 0; i < chol.dim(); ++i) x[i] += u[i];
  return x;
}

// Draw from N(P^{-1} h, P^{-1}).
inline std::vector<double> sample_from_precision(RngStream& rng,
                                                 const BandedCholesky& chol,
                                                 std::span<const double> info) {
  std::vector<double> z(chol.dim());
  for (double& v : z) v = rng.normal();
  return sample_from_precision_with_noise(chol, info, z);
}

// scale * H^T H where H is the T x T first-difference operator
// (unit diagonal, -1 first subdiagonal). Tridiagonal: diagonal entries
// 2*scale except scale in the last position, subdiagonal -scale.
inline BandedSpd diff_gram(int T, double scale = 1.0) {
  if (T <= 0) throw DimensionError("diff_gram: T must be positive");
  BandedSpd a(T, T > 1 ? 1 : 0);
  for (int j = 0; j < T; ++j) {
    a.at(j, j) = (j < T - 1) ? 2.0 * scale : scale;
    if (j < T - 1) a.at(j + 1, j) = -scale;
  }
  return a;
}

// scale * B^T B where B = I - H (unit first subdiagonal, zero elsewhere).
// Diagonal: scale everywhere except zero in the last position.
inline BandedSpd shift_gram(int T, double scale = 1.0) {
  if (T <= 0) throw DimensionError("shift_gram: T must be positive");
  BandedSpd a(T, 0);
  for (int j = 0; j < T - 1; ++j) a.at(j, j) = scale;
  return a;
}

// y = H^T B x without forming either operator:
// y_i = x_{i-1} (present unless i is the first row) minus x_i (present
// unless i is the last row), zero-based.
inline std::vector<double> apply_diff_shift(std::span<const double> x) {
  const int T = static_cast<int>(x.size());
  if (T <= 0) throw DimensionError("apply_diff_shift: empty input");
  std::vector<double> y(T, 0.0);
  for (int i = 0; i < T; ++i) {
    double s = 0.0;
    if (i > 0) s += x[i - 1];
    if (i < T - 1) s -= x[i];
    y[i] = s;
  }
  return y;
}

// y = B^T H x: forward difference with a zero last entry.
inline std::vector<double> apply_shift_diff(std::span<const double> x) {
  const int T = static_cast<int>(x.size());
  if (T <= 0) throw DimensionError("apply_shift_diff: empty input");
  std::vector<double> y(T, 0.0);
  for (int i = 0; i < T - 1; ++i) y[i] = x[i + 1] - x[i];
  return y;
}

}  // namespace dynmix
