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

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "ginse/common.hpp"
#include "ginse/ensemble.hpp"
#include "ginse/errors.hpp"
#include "ginse/log_complex.hpp"
#include "ginse/pfaffian.hpp"
#include "ginse/zpolynomial.hpp"

namespace ginse {

struct NormalizationConstants {
  double log_c_n = 0.0;
  double alpha = 0.0;
  double sigma_sq = 1.0;

  // log h_j, h_j = 2 pi Gamma(j + alpha + 1) (sigma^2/2)^{j + alpha + 2}
  double log_h(int j) const {
    return std::log(2.0 * kPi) + std::lgamma(j + alpha + 1.0) + (j + alpha + 2.0) * std::log(sigma_sq / 2.0);
  }

  static NormalizationConstants compute(const EnsembleParams& p) {
    p.validate();
    const int n = p.n;
    double log_inv = std::lgamma(n + 1.0) + n * std::log(2.0 * kPi) + n * (n + p.alpha + 1.0) * std::log(p.sigma_sq / 2.0);
    for (int j = 1; j <= n; ++j) log_inv += std::lgamma(p.alpha + 2.0 * j);
    return {-log_inv, p.alpha, p.sigma_sq};
  }
};

// ---- integrands of the skew matrices ------------------------------------

inline ZPolynomial density_weight(cplx x) {
  return ZPolynomial::abs_sq_minus_z(x) * ZPolynomial::abs_sq_minus_zbar(x);
}

inline ZPolynomial d_matrix_weight(cplx x, double sigma_sq) {
  return density_weight(x) + sigma_sq * ZPolynomial::abs_sq_minus_z(x);
}

inline ZPolynomial h_matrix_weight(cplx x1, cplx x2, double sigma_sq) {
  using P = ZPolynomial;
  const P cross = (P::constant(std::conj(x1)) - P::zbar()) * (P::constant(x2) - P::z());
  const P head = P::abs_sq_minus_z(x1) * P::abs_sq_minus_z(x2) + sigma_sq * cross;
  return head * P::abs_sq_minus_zbar(x1) * P::abs_sq_minus_zbar(x2);
}

// Integral of (z^i zbar^j - z^j zbar^i)(z - zbar) w(z) against the radial Gaussian weight
// (0-based matrix indices).
inline LogComplex moment_entry(const ZPolynomial& w, int i, int j, double alpha, double sigma_sq) {
  LogComplex s = LogComplex::zero();
  for (const auto& [k, c] : w.terms()) {
    if (c == cplx{}) continue;
    const int m = k.first, n = k.second;
    const auto mom = [&](int a, int b) { return gaussian_moment(a, b, alpha, sigma_sq); };
    const LogComplex lc = LogComplex::from(c);
    s += lc * (mom(i + m + 1, j + n) - mom(i + m, j + n + 1) - mom(j + m + 1, i + n) + mom(j + m, i + n + 1));
  }
  return s;
}

inline BandedSkew moment_matrix(const ZPolynomial& w, int dim, int bandwidth, double alpha, double sigma_sq) {
  BandedSkew m(dim, bandwidth);
  for (int i = 0; i < dim; ++i)
    for (int j = i + 1; j <= std::min(dim - 1, i + bandwidth); ++j) m.set(i, j, moment_entry(w, i, j, alpha, sigma_sq));
  return m;
}

// ---- closed-form banded matrices ----------------------------------------

namespace detail {

inline double log_band_prefactor(int j, double alpha, double sigma_sq) {
  return std::log(2.0 * kPi) + std::lgamma(j + alpha) + (j + alpha) * std::log(sigma_sq / 2.0);
}

// Entry (j - k, j), 1-based, divided by 2 pi Gamma(j + alpha) (sigma^2/2)^{j + alpha}.
inline cplx d_band(cplx x, int j, int k, double alpha, double sigma_sq) {
  const cplx xb = std::conj(x);
  const double ax = std::norm(x), h = sigma_sq / 2.0, jj = j + alpha;
  switch (k) {
    case 1: return ax * ax + sigma_sq * ax + jj * h * (ax + x * x + xb * xb + (jj + 3.0) * h);
    case 2: return -(x + xb) * (ax + (jj + 1.0) * h);
    case 3: return ax;
    default: return 0.0;
  }
}

inline cplx h_band(cplx x1, cplx x2, int j, int k, double alpha, double sigma_sq) {
  const cplx X1 = x1, X2 = x2, b1 = std::conj(x1), b2 = std::conj(x2);
  const double a1 = std::norm(x1), a2 = std::norm(x2), s12 = std::norm(x1 + x2);
  const double J = j + alpha, h = sigma_sq / 2.0;
  const double J1 = J * (J + 1.0), J2 = J1 * (J + 2.0), J3 = J2 * (J + 3.0);
  switch (k) {
    case 1: {
      cplx t = a1 * a1 * a2 * a2;
      t += J * h * (2.0 * a1 * a2 * s12 + a1 * a1 * (X2 * X2 + b2 * b2 - a2) + a2 * a2 * (X1 * X1 + b1 * b1 - a1) +
                    (X1 * X2 + b1 * b2 - X1 * b2 - b1 * X2) * a1 * a2);
      t += J1 * h * h *
           (s12 * s12 + a1 * (2.0 * X2 * X2 + 2.0 * b2 * b2 - a2) + a2 * (2.0 * X1 * X1 + 2.0 * b1 * b1 - a1) +
            (X1 * X2 + b1 * b2) * (2.0 * a1 + 2.0 * a2 - s12) - (X1 * b2 + b1 * X2) * (a1 + a2) + X1 * X1 * X2 * X2 +
            b1 * b1 * b2 * b2);
      t += J2 * h * h * h * (s12 + X2 * X2 + b2 * b2 + X1 * X1 + b1 * b1 + X1 * X2 + b1 * b2);
      t += J3 * h * h * h * h;
      cplx u = 2.0 * b1 * X2 * a1 * a2;
      u += J * h * (2.0 * b1 * X2 * s12 + a1 * (2.0 * b1 * b2 + X2 * X2 - b1 * X2) + a2 * (2.0 * X1 * X2 + b1 * b1 - b1 * X2));
      u += J1 * h * h * (2.0 * s12 + b1 * (2.0 * b1 + b2) + X2 * (2.0 * X2 + X1) - a1 - a2);
      u += 2.0 * J2 * h * h * h;
      return t + h * u;
    }
    case 2: {
      const cplx A = (X2 + b2) * a1 + (X1 + b1) * a2;
      cplx t = a1 * a2 * A;
      t += J * h * (s12 * A + a1 * (X1 * X2 * X2 + b1 * b2 * b2) + a2 * (X1 * X1 * X2 + b1 * b1 * b2));
      t += J1 * h * h * (s12 * (X2 + b2 + X1 + b1) + X1 * X2 * X2 + b1 * b2 * b2 + X1 * X1 * X2 + b1 * b1 * b2);
      t += J2 * h * h * h * (X2 + b2 + X1 + b1);
      cplx u = b1 * X2 * A + (b1 + X2) * a1 * a2;
      u += J * h * (b1 * X2 * (X2 + b2 + X1 + b1) + (b1 + X2) * s12 + X1 * X2 * (X2 + b2) + b1 * b2 * (X1 + b1));
      u += J1 * h * h * (2.0 * (X2 + b1) + X1 + b2);
      return -(t + h * u);
    }
    case 3: {
      cplx t = (a1 * a2 + J1 * h * h) * (b1 * b2 + X1 * X2 + s12);
      t += J * h * (s12 * (b1 * b2 + X1 * X2) + 3.0 * a1 * a2 + (b1 * X2 + b2 * X1) * (a1 + a2));
      const cplx u = 2.0 * a1 * a2 + (a1 * X2 + a2 * b1) * (b1 + X2) + J * h * (X1 * X2 + b1 * b2 + 2.0 * b1 * X2 + a1 + a2);
      return t + h * u;
    }
    case 4:
      return -(a1 * a2 * (X1 + b1 + X2 + b2) + J * h * ((X1 + b1) * a2 + (X2 + b2) * a1) + h * b1 * X2 * (X1 + b2));
    case 5: return a1 * a2;
    default: return 0.0;
  }
}

template <class Band>
BandedSkew closed_band_matrix(int dim, int bandwidth, double alpha, double sigma_sq, Band band) {
  BandedSkew m(dim, bandwidth);
  for (int j = 2; j <= dim; ++j)
    for (int k = 1; k <= bandwidth && j - k >= 1; ++k)
      m.set(j - k - 1, j - 1,
            LogComplex::from_log_real(log_band_prefactor(j, alpha, sigma_sq)) * LogComplex::from(band(j, k)));
  return m;
}

inline void require_exact(const EnsembleParams& p, int min_n, const char* what) {
  p.validate();
  p.require_induced(what);
  if (p.n < min_n) throw InvalidParams(std::string(what) + " needs N >= " + std::to_string(min_n));
}

inline double finish_real(const LogComplex& v) {
  if (v.is_zero()) return 0.0;
  if (v.log_magnitude() > 709.0) throw NumericOverflow("result exceeds double range");
  return v.to_complex().real();
}

inline cplx finish_complex(const LogComplex& v) {
  if (v.is_zero()) return {};
  if (v.log_magnitude() > 709.0) throw NumericOverflow("result exceeds double range");
  return v.to_complex();
}

// log of C_N (N-1)! |x|^{2 alpha} |x - conj x|^2 exp(-2|x|^2/sigma^2)
inline double log_one_point_prefactor(cplx x, const EnsembleParams& p) {
  const NormalizationConstants c = NormalizationConstants::compute(p);
  return c.log_c_n + std::lgamma(static_cast<double>(p.n)) + p.alpha * std::log(std::norm(x)) +
         std::log(4.0 * x.imag() * x.imag()) - 2.0 * std::norm(x) / p.sigma_sq;
}

}  // namespace detail

enum class HKind { Plain12, Barred12 };

inline BandedSkew build_d_matrix(cplx x, const EnsembleParams& p) {
  detail::require_exact(p, 2, "D matrix");
  return detail::closed_band_matrix(2 * p.n - 2, 3, p.alpha, p.sigma_sq,
                                    [&](int j, int k) { return detail::d_band(x, j, k, p.alpha, p.sigma_sq); });
}

inline BandedSkew build_h_matrix(cplx x1, cplx x2, const EnsembleParams& p, HKind kind) {
  detail::require_exact(p, 3, "H matrix");
  const cplx y2 = kind == HKind::Plain12 ? x2 : std::conj(x2);
  return detail::closed_band_matrix(2 * p.n - 4, 5, p.alpha, p.sigma_sq,
                                    [&](int j, int k) { return detail::h_band(x1, y2, j, k, p.alpha, p.sigma_sq); });
}

// Pf of the D matrix; an empty Pfaffian (N = 1) equals one.
inline LogComplex log_diag_overlap_exact(cplx x, const EnsembleParams& p) {
  detail::require_exact(p, 1, "diagonal overlap");
  if (x.imag() == 0.0) return LogComplex::zero();
  const LogComplex pf = p.n >= 2 ? pfaffian(build_d_matrix(x, p)) : LogComplex::one();
  return LogComplex::from_log_real(detail::log_one_point_prefactor(x, p)) * pf;
}

inline double diag_overlap_exact(cplx x, const EnsembleParams& p) {
  return detail::finish_real(log_diag_overlap_exact(x, p));
}

inline LogComplex log_density_exact(cplx x, const EnsembleParams& p) {
  detail::require_exact(p, 1, "density");
  if (x.imag() == 0.0) return LogComplex::zero();
  const LogComplex pf =
      p.n >= 2 ? pfaffian(moment_matrix(density_weight(x), 2 * p.n - 2, 3, p.alpha, p.sigma_sq)) : LogComplex::one();
  return LogComplex::from_log_real(detail::log_one_point_prefactor(x, p)) * pf;
}

inline double density_exact(cplx x, const EnsembleParams& p) {
  return detail::finish_real(log_density_exact(x, p));
}

inline LogComplex log_offdiag_overlap_exact(cplx x1, cplx x2, const EnsembleParams& p, HKind kind) {
  detail::require_exact(p, 3, "off-diagonal overlap");
  const cplx y2 = kind == HKind::Plain12 ? x2 : std::conj(x2);
  const double scale = std::max({1.0, std::abs(x1), std::abs(x2)});
  if (std::abs(x1 - y2) < 1e-12 * scale) throw InvalidParams("coincident arguments in the off-diagonal overlap");
  if (x1.imag() == 0.0 || x2.imag() == 0.0) return LogComplex::zero();
  const NormalizationConstants c = NormalizationConstants::compute(p);
  const double lp = c.log_c_n + std::lgamma(static_cast<double>(p.n)) + std::log(p.sigma_sq / (2.0 * p.n)) +
                    std::log(4.0 * x1.imag() * x1.imag()) + std::log(4.0 * x2.imag() * x2.imag()) +
                    p.alpha * (std::log(std::norm(x1)) + std::log(std::norm(x2))) + std::log(std::norm(x1 - std::conj(y2))) -
                    2.0 * (std::norm(x1) + std::norm(x2)) / p.sigma_sq;
  return LogComplex::from_log_real(lp, -1.0) * pfaffian(build_h_matrix(x1, x2, p, kind));
}

// Plain12: O_N(x1, x2); Barred12: O_N(x1, conj x2).
inline cplx offdiag_overlap_exact(cplx x1, cplx x2, const EnsembleParams& p, HKind kind) {
  return detail::finish_complex(log_offdiag_overlap_exact(x1, x2, p, kind));
}

// ---- origin limit ---------------------------------------------------------

inline double origin_limit_ratio(const EnsembleParams& p) {
  p.validate();
  return (2.0 * p.n + p.alpha + 1.0) / (kPi * (3.0 + p.alpha));
}

// O_N(it) / rho(it); the common prefactors cancel.
inline double origin_ratio_at(double t, const EnsembleParams& p) {
  detail::require_exact(p, 1, "origin ratio");
  if (p.n == 1) return 1.0;
  const cplx x(0.0, t);
  const LogComplex num = pfaffian(build_d_matrix(x, p));
  const LogComplex den = pfaffian(moment_matrix(density_weight(x), 2 * p.n - 2, 3, p.alpha, p.sigma_sq));
  return (num / den).to_complex().real();
}

// Richardson extrapolation in t^2 over t = 1e-2, 1e-3, 1e-4.
inline double origin_extrapolated_ratio(const EnsembleParams& p) {
  const double r1 = origin_ratio_at(1e-2, p), r2 = origin_ratio_at(1e-3, p), r3 = origin_ratio_at(1e-4, p);
  const double a12 = (100.0 * r2 - r1) / 99.0;
  const double a23 = (100.0 * r3 - r2) / 99.0;
  return (1e4 * a23 - a12) / (1e4 - 1.0);
}

}  // namespace ginse
