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
#include <limits>

namespace ginse {

// Complex number stored as log-magnitude and unit phase; log_magnitude = -inf encodes zero.
class LogComplex {
 public:
  using cplx = std::complex<double>;

  LogComplex() = default;
  LogComplex(double log_magnitude, cplx phase) : log_mag_(log_magnitude), phase_(phase) {
    if (!std::isfinite(log_mag_) && log_mag_ < 0.0) phase_ = 1.0;
  }

  static LogComplex zero() { return {}; }
  static LogComplex one() { return {0.0, 1.0}; }

  static LogComplex from(cplx z) {
    const double m = std::abs(z);
    if (m == 0.0) return zero();
    return {std::log(m), z / m};
  }
  static LogComplex from_log_real(double log_magnitude, double sign = 1.0) { return {log_magnitude, cplx(sign, 0.0)}; }

  double log_magnitude() const { return log_mag_; }
  cplx phase() const { return phase_; }
  bool is_zero() const { return log_mag_ == -std::numeric_limits<double>::infinity(); }

  cplx to_complex() const { return is_zero() ? cplx{} : std::exp(log_mag_) * phase_; }

  LogComplex operator-() const { return {log_mag_, -phase_}; }
  LogComplex conj() const { return {log_mag_, std::conj(phase_)}; }

  friend LogComplex operator*(const LogComplex& x, const LogComplex& y) {
    if (x.is_zero() || y.is_zero()) return zero();
    cplx p = x.phase_ * y.phase_;
    return {x.log_mag_ + y.log_mag_, p / std::abs(p)};
  }
  friend LogComplex operator/(const LogComplex& x, const LogComplex& y) {
    if (x.is_zero()) return zero();
    cplx p = x.phase_ / y.phase_;
    return {x.log_mag_ - y.log_mag_, p / std::abs(p)};
  }
  friend LogComplex operator+(const LogComplex& x, const LogComplex& y) {
    if (x.is_zero()) return y;
    if (y.is_zero()) return x;
    const LogComplex& big = x.log_mag_ >= y.log_mag_ ? x : y;
    const LogComplex& small = x.log_mag_ >= y.log_mag_ ? y : x;
    const cplx s = big.phase_ + small.phase_ * std::exp(small.log_mag_ - big.log_mag_);
    const double m = std::abs(s);
    if (m == 0.0) return zero();
    return {big.log_mag_ + std::log(m), s / m};
  }
  friend LogComplex operator-(const LogComplex& x, const LogComplex& y) { return x + (-y); }

  LogComplex& operator*=(const LogComplex& y) { return *this = *this * y; }
  LogComplex& operator+=(const LogComplex& y) { return *this = *this + y; }

 private:
  double log_mag_ = -std::numeric_limits<double>::infinity();
  cplx phase_ = 1.0;
};

}  // namespace ginse
