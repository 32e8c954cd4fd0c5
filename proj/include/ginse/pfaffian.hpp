/*
 * Copyright 2026 The ginse-overlaps Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "ginse/common.hpp"
#include "ginse/errors.hpp"
#include "ginse/log_complex.hpp"

namespace ginse {

// Skew-symmetric matrix with entries (i, j), 0 < j - i <= bandwidth, stored in log form.
class BandedSkew {
 public:
  BandedSkew() = default;
  BandedSkew(int dim, int bandwidth) : dim_(dim), bw_(std::max(1, bandwidth)) {
    if (dim < 0 || dim % 2 != 0) throw InvalidParams("skew matrix dimension must be even");
    entries_.assign(static_cast<std::size_t>(dim_) * bw_, LogComplex::zero());
  }

  int dim() const { return dim_; }
  int bandwidth() const { return bw_; }

  void set(int i, int j, const LogComplex& v) {
    if (i > j) return set(j, i, -v);
    if (!(j - i >= 1 && j - i <= bw_ && j < dim_)) throw InvalidParams("entry outside the band");
    entries_[static_cast<std::size_t>(i) * bw_ + (j - i - 1)] = v;
  }

  LogComplex get(int i, int j) const {
    if (i == j) return LogComplex::zero();
    if (i > j) return -get(j, i);
    if (j - i > bw_) return LogComplex::zero();
    return entries_[static_cast<std::size_t>(i) * bw_ + (j - i - 1)];
  }

  // Plain complex form; may underflow for extreme entries.
  Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic> to_dense() const {
    Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic> m =
        Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic>::Zero(dim_, dim_);
    for (int i = 0; i < dim_; ++i)
      for (int j = i + 1; j <= std::min(dim_ - 1, i + bw_); ++j) {
        m(i, j) = get(i, j).to_complex();
        m(j, i) = -m(i, j);
      }
    return m;
  }

  static BandedSkew from_dense(const Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic>& a) {
    const int n = static_cast<int>(a.rows());
    BandedSkew s(n, std::max(1, n - 1));
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) s.set(i, j, LogComplex::from(a(i, j)));
    return s;
  }

 private:
  int dim_ = 0;
  int bw_ = 1;
  std::vector<LogComplex> entries_;
};

namespace detail {

// Symmetric log-space equilibration: returns l with max_j |a_ij| e^{l_i + l_j} close to 1.
inline std::vector<double> equilibrate(const BandedSkew& m) {
  const int n = m.dim();
  const double ninf = -std::numeric_limits<double>::infinity();
  std::vector<double> l(n, 0.0), r(n);
  for (int sweep = 0; sweep < 60; ++sweep) {
    std::fill(r.begin(), r.end(), ninf);
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j <= std::min(n - 1, i + m.bandwidth()); ++j) {
        const LogComplex v = m.get(i, j);
        if (v.is_zero()) continue;
        const double s = v.log_magnitude() + l[i] + l[j];
        r[i] = std::max(r[i], s);
        r[j] = std::max(r[j], s);
      }
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
      if (r[i] == ninf) throw SingularMatrix("skew matrix has a zero row");
      worst = std::max(worst, std::abs(r[i]));
    }
    if (worst < 1e-2) break;
    for (int i = 0; i < n; ++i) l[i] -= 0.5 * r[i];
  }
  return l;
}

}  // namespace detail

// Parlett-Reid skew elimination with pivoting inside the (growing) band.
inline LogComplex pfaffian(const BandedSkew& m) {
  const int n = m.dim();
  if (n % 2 != 0) throw InvalidParams("Pfaffian needs an even dimension");
  if (n == 0) return LogComplex::one();

  const std::vector<double> l = detail::equilibrate(m);
  Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic> a =
      Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic>::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j <= std::min(n - 1, i + m.bandwidth()); ++j) {
      const LogComplex v = m.get(i, j);
      if (v.is_zero()) continue;
      const double lm = v.log_magnitude() + l[i] + l[j];
      a(i, j) = std::exp(lm) * v.phase();
      a(j, i) = -a(i, j);
    }

  int bw = m.bandwidth();
  double log_mag = 0.0;
  cplx phase = 1.0;
  for (int k = 0; k + 1 < n; k += 2) {
    const int hi = std::min(n - 1, k + bw);
    int p = k + 1;
    double best = std::abs(a(k + 1, k));
    for (int i = k + 2; i <= hi; ++i)
      if (std::abs(a(i, k)) > best) best = std::abs(a(i, k)), p = i;
    if (p != k + 1) {
      a.row(k + 1).swap(a.row(p));
      a.col(k + 1).swap(a.col(p));
      phase = -phase;
      bw += p - (k + 1);
    }
    const cplx piv = a(k, k + 1);
    if (!(std::abs(piv) >= 1e-300)) throw SingularMatrix("Pfaffian pivot underflow");
    log_mag += std::log(std::abs(piv));
    phase *= piv / std::abs(piv);
    if (k + 2 >= n) break;
    const int hi2 = std::min(n - 1, k + 1 + bw);
    for (int i = k + 2; i <= hi2; ++i) {
      const cplx ti = a(k, i) / piv;
      const cplx ci = a(i, k + 1);
      if (ti == cplx{} && ci == cplx{}) continue;
      for (int j = k + 2; j <= hi2; ++j) a(i, j) += ti * a(j, k + 1) - ci * (a(k, j) / piv);
    }
  }
  for (int i = 0; i < n; ++i) log_mag -= l[i];
  return {log_mag, phase / std::abs(phase)};
}

inline LogComplex pfaffian_dense(const Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic>& a) {
  return pfaffian(BandedSkew::from_dense(a));
}

}  // namespace ginse
