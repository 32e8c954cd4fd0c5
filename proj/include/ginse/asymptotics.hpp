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

#include "ginse/common.hpp"
#include "ginse/ensemble.hpp"
#include "ginse/errors.hpp"

// Large-N limits under the scaling sigma^2 = 1/N.
namespace ginse {

inline EnsembleParams bulk_scaled(EnsembleParams p) {
  p.sigma_sq = 1.0 / p.n;
  p.validate();
  return p;
}

struct BulkPoint {
  cplx x;
  double margin = 0.0;  // min(1 - |x|, |Im x|) * sqrt(N)

  bool reliable() const { return margin >= 3.0; }
};

inline BulkPoint make_bulk_point(cplx x, int n) {
  if (n < 1) throw InvalidParams("n must be >= 1");
  return {x, std::min(1.0 - std::abs(x), std::abs(x.imag())) * std::sqrt(static_cast<double>(n))};
}

inline double circular_law(cplx x) { return std::abs(x) < 1.0 ? 1.0 / kPi : 0.0; }

inline double bulk_diag(cplx x, int n) {
  if (n < 1) throw InvalidParams("n must be >= 1");
  const double r2 = std::norm(x);
  return r2 < 1.0 ? n * (1.0 - r2) / kPi : 0.0;
}

inline cplx bulk_offdiag(cplx x1, cplx x2) {
  if (x1 == x2) throw InvalidParams("bulk off-diagonal overlap needs x1 != x2");
  if (std::abs(x1) >= 1.0 || std::abs(x2) >= 1.0) return {};
  const double d = std::norm(x1 - x2);
  return -(1.0 - x1 * std::conj(x2)) / (kPi * kPi * d * d);
}

// Limit of the overlap between x1 and the partner of x2 (x2 and conj x2 exchanged).
inline cplx bulk_offdiag_barred(cplx x1, cplx x2) {
  if (x1 == std::conj(x2)) throw InvalidParams("barred bulk overlap needs x1 != conj x2");
  if (std::abs(x1) >= 1.0 || std::abs(x2) >= 1.0) return {};
  const double d = std::norm(x1 - std::conj(x2));
  return -(1.0 - x1 * x2) / (kPi * kPi * d * d);
}

inline double factorized_density2(cplx x1, cplx x2) {
  if (x1 == x2) return 0.0;
  return circular_law(x1) * circular_law(x2);
}

}  // namespace ginse
