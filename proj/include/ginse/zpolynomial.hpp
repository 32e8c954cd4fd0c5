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

#include <cmath>
#include <complex>
#include <map>
#include <utility>

#include "ginse/common.hpp"
#include "ginse/errors.hpp"
#include "ginse/log_complex.hpp"

namespace ginse {

// Polynomial sum c_{m,n} z^m conj(z)^n.
class ZPolynomial {
 public:
  using cplx = std::complex<double>;
  using Key = std::pair<int, int>;

  ZPolynomial() = default;
  static ZPolynomial constant(cplx c) { return monomial(0, 0, c); }
  static ZPolynomial monomial(int m, int n, cplx c = 1.0) {
    ZPolynomial p;
    p.add_term(m, n, c);
    return p;
  }
  static ZPolynomial z() { return monomial(1, 0); }
  static ZPolynomial zbar() { return monomial(0, 1); }
  // |x - z|^2
  static ZPolynomial abs_sq_minus_z(cplx x) { return (constant(x) - z()) * (constant(std::conj(x)) - zbar()); }
  // |x - conj z|^2
  static ZPolynomial abs_sq_minus_zbar(cplx x) { return (constant(x) - zbar()) * (constant(std::conj(x)) - z()); }

  void add_term(int m, int n, cplx c) {
    if (m < 0 || n < 0) throw InvalidParams("ZPolynomial powers must be nonnegative");
    terms_[{m, n}] += c;
  }

  const std::map<Key, cplx>& terms() const { return terms_; }
  cplx coefficient(int m, int n) const {
    auto it = terms_.find({m, n});
    return it == terms_.end() ? cplx{} : it->second;
  }

  cplx evaluate(cplx w) const {
    cplx s{};
    for (const auto& [k, c] : terms_) s += c * std::pow(w, k.first) * std::pow(std::conj(w), k.second);
    return s;
  }

  friend ZPolynomial operator+(ZPolynomial a, const ZPolynomial& b) {
    for (const auto& [k, c] : b.terms_) a.terms_[k] += c;
    return a;
  }
  friend ZPolynomial operator-(ZPolynomial a, const ZPolynomial& b) {
    for (const auto& [k, c] : b.terms_) a.terms_[k] -= c;
    return a;
  }
  friend ZPolynomial operator*(const ZPolynomial& a, const ZPolynomial& b) {
    ZPolynomial r;
    for (const auto& [ka, ca] : a.terms_)
      for (const auto& [kb, cb] : b.terms_) r.terms_[{ka.first + kb.first, ka.second + kb.second}] += ca * cb;
    return r;
  }
  friend ZPolynomial operator*(cplx s, ZPolynomial a) {
    for (auto& [k, c] : a.terms_) c *= s;
    return a;
  }

 private:
  std::map<Key, cplx> terms_;
};

// Integral of z^m conj(z)^n |z|^{2 alpha} exp(-2|z|^2 / sigma^2) over the plane.
inline LogComplex gaussian_moment(int m, int n, double alpha, double sigma_sq) {
  if (!(alpha > -1.0)) throw InvalidParams("alpha must be > -1");
  if (m != n) return LogComplex::zero();
  const double b = m + alpha + 1.0;
  return LogComplex::from_log_real(std::log(kPi) + std::lgamma(b) + b * std::log(sigma_sq / 2.0));
}

inline LogComplex integrate_poly(const ZPolynomial& p, double alpha, double sigma_sq) {
  LogComplex s = LogComplex::zero();
  for (const auto& [k, c] : p.terms())
    if (k.first == k.second && c != std::complex<double>{}) s += LogComplex::from(c) * gaussian_moment(k.first, k.second, alpha, sigma_sq);
  return s;
}

}  // namespace ginse
