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

#include <cmath>
#include <numeric>
#include <optional>
#include <vector>

#include "ginse/ensemble.hpp"
#include "ginse/spectrum.hpp"

namespace ginse {

// G = U (Z + T) U^dagger with U unitary symplectic and Z = diag(z_1, conj z_1, ...).
struct SchurForm {
  EigenvalueConfig eigen_config;
  UpperTriangularT t;
  CMatrix u;
  std::vector<int> order;  // order[k] = index into the source SpectrumPairing

  int n() const { return eigen_config.size(); }

  CMatrix upper() const {
    CMatrix m = t.embedding();
    for (int i = 0; i < n(); ++i) {
      m(unbarred(i), unbarred(i)) = eigen_config.points[i];
      m(barred(i), barred(i)) = std::conj(eigen_config.points[i]);
    }
    return m;
  }

  CMatrix reconstruct() const { return u * upper() * u.adjoint(); }
};

// Builds U by quaternion Gram-Schmidt over the chain of invariant subspaces
// spanned by the eigenvectors taken in `order`.
inline SchurForm schur_from_pairing(const QuaternionMatrix& g, const SpectrumPairing& s, std::vector<int> order) {
  const int n = g.dim_pairs();
  if (static_cast<int>(order.size()) != n) throw InvalidParams("Schur order must list every eigenvalue once");
  std::vector<int> check = order;
  std::sort(check.begin(), check.end());
  for (int i = 0; i < n; ++i)
    if (check[i] != i) throw InvalidParams("Schur order must be a permutation");

  const cplx i_unit(0.0, 1.0);
  SchurForm f;
  f.order = order;
  f.u = CMatrix::Zero(2 * n, 2 * n);
  f.eigen_config.points.resize(n);
  for (int k = 0; k < n; ++k) {
    CVector v = s.right.col(unbarred(order[k]));
    for (int pass = 0; pass < 2; ++pass) {
      if (k > 0) {
        const auto basis = f.u.leftCols(2 * k);
        v -= basis * (basis.adjoint() * v);
      }
    }
    v /= v.norm();
    const cplx pivot = v(unbarred(k));
    if (std::abs(pivot) > 0.0) v *= std::conj(pivot) / std::abs(pivot);
    f.u.col(unbarred(k)) = v;
    f.u.col(barred(k)) = -i_unit * kramers_partner(v);
    f.eigen_config.points[k] = s.values[order[k]];
  }

  const CMatrix gt = f.u.adjoint() * g.embedding() * f.u;
  f.t = UpperTriangularT(n);
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) f.t.set_block(a, b, {gt(unbarred(a), unbarred(b)), gt(unbarred(a), barred(b))});
  return f;
}

inline SchurForm schur_decompose(const QuaternionMatrix& g, std::vector<int> order = {}) {
  const SpectrumPairing s = standard_eigenpairs(g);
  if (order.empty()) {
    order.resize(s.n());
    std::iota(order.begin(), order.end(), 0);
  }
  return schur_from_pairing(g, s, std::move(order));
}

// Schur data with U = identity, as used for averages over T at fixed eigenvalues.
inline SchurForm schur_form_from(EigenvalueConfig z, UpperTriangularT t) {
  const int n = z.size();
  if (t.dim_pairs() != n) throw InvalidParams("T and eigenvalue dimensions differ");
  SchurForm f;
  f.eigen_config = std::move(z);
  f.t = std::move(t);
  f.u = CMatrix::Identity(2 * n, 2 * n);
  f.order.resize(n);
  std::iota(f.order.begin(), f.order.end(), 0);
  return f;
}

// Left-eigenvector coefficients in the Schur basis, interleaved (p, pbar).
struct CoefficientTable {
  std::vector<cplx> b;
  std::vector<cplx> d;
};

namespace detail {

inline double collision_scale(const std::vector<cplx>& z) {
  double s = 0.0;
  for (const cplx& w : z) s = std::max(s, std::abs(w));
  return s > 0.0 ? s : 1.0;
}

inline cplx checked_inverse(cplx denom, double scale) {
  if (std::abs(denom) < 1e-12 * scale) throw NearCollision("eigenvalues too close for the Schur recursion");
  return 1.0 / denom;
}

// Forward recursion for the left eigenvector of eigenvalue `head` (row vector in Schur basis).
inline std::vector<cplx> left_recursion(const SchurForm& f, int head) {
  const int n = f.n();
  const auto& z = f.eigen_config.points;
  const double scale = collision_scale(z);
  std::vector<cplx> c(2 * n, cplx{});
  c[unbarred(head)] = 1.0;
  for (int p = head + 1; p < n; ++p) {
    cplx s_plain{}, s_bar{};
    for (int k = head; k < p; ++k) {
      const cplx ck = c[unbarred(k)], ckb = c[barred(k)];
      s_plain += ck * f.t.entry(k, false, p, false) + ckb * f.t.entry(k, true, p, false);
      s_bar += ck * f.t.entry(k, false, p, true) + ckb * f.t.entry(k, true, p, true);
    }
    c[unbarred(p)] = s_plain * checked_inverse(z[head] - z[p], scale);
    c[barred(p)] = s_bar * checked_inverse(z[head] - std::conj(z[p]), scale);
  }
  return c;
}

}  // namespace detail

inline CoefficientTable coefficients(const SchurForm& f) {
  CoefficientTable c;
  c.b = detail::left_recursion(f, 0);
  c.d = f.n() >= 2 ? detail::left_recursion(f, 1) : std::vector<cplx>(2 * f.n(), cplx{});
  return c;
}

struct SchurOverlaps {
  double o11 = 1.0;
  std::optional<cplx> o12;
  std::optional<cplx> o1bar2;
};

inline SchurOverlaps overlaps_from_schur(const SchurForm& f) {
  const CoefficientTable c = coefficients(f);
  SchurOverlaps r;
  r.o11 = 0.0;
  for (const cplx& v : c.b) r.o11 += std::norm(v);
  if (f.n() < 2) return r;
  cplx s12{}, s1b2{};
  for (int k = 1; k < f.n(); ++k) {
    const cplx bk = c.b[unbarred(k)], bkb = c.b[barred(k)];
    const cplx dk = c.d[unbarred(k)], dkb = c.d[barred(k)];
    s12 += bk * std::conj(dk) + bkb * std::conj(dkb);
    s1b2 += bk * dkb - bkb * dk;
  }
  r.o12 = -std::conj(c.b[unbarred(1)]) * s12;
  r.o1bar2 = std::conj(c.b[barred(1)]) * s1b2;
  return r;
}

// ---- averages over T at fixed eigenvalues (0-based indices) ----------------

enum class OffdiagKind { Plain, Barred };

namespace detail {

inline double checked_norm(cplx d, double scale) {
  const double m = std::norm(d);
  if (!(m >= 1e-24 * scale * scale)) throw NearCollision("eigenvalue collision in T-average");
  return m;
}

inline void check_index(const EigenvalueConfig& z, int i) {
  if (i < 0 || i >= z.size()) throw InvalidParams("eigenvalue index out of range");
}

}  // namespace detail

inline double t_avg_diag(const EigenvalueConfig& z, int target, double sigma_sq) {
  detail::check_index(z, target);
  const auto& p = z.points;
  const double scale = detail::collision_scale(p);
  const cplx zt = p[target];
  double prod = 1.0;
  for (int l = 0; l < z.size(); ++l) {
    if (l == target) continue;
    prod *= 1.0 + sigma_sq / (2.0 * detail::checked_norm(zt - p[l], scale)) +
            sigma_sq / (2.0 * detail::checked_norm(zt - std::conj(p[l]), scale));
  }
  return prod;
}

// <O_ij>_T (Plain) or <O_{i jbar}>_T (Barred).
inline cplx t_avg_offdiag(const EigenvalueConfig& z, int i, int j, OffdiagKind kind, double sigma_sq) {
  detail::check_index(z, i);
  detail::check_index(z, j);
  if (i == j) throw InvalidParams("off-diagonal T-average needs i != j");
  const auto& p = z.points;
  const double scale = detail::collision_scale(p);
  const cplx z1 = p[i];
  const cplx z2 = kind == OffdiagKind::Plain ? p[j] : std::conj(p[j]);
  cplx prod = -sigma_sq / (2.0 * detail::checked_norm(z1 - z2, scale));
  for (int l = 0; l < z.size(); ++l) {
    if (l == i || l == j) continue;
    const cplx zl = p[l];
    const cplx t1 = (z1 - zl) * std::conj(z2 - zl);
    const cplx t2 = (z1 - std::conj(zl)) * std::conj(z2 - std::conj(zl));
    detail::checked_norm(t1, scale * scale);
    detail::checked_norm(t2, scale * scale);
    prod *= 1.0 + sigma_sq / (2.0 * t1) + sigma_sq / (2.0 * t2);
  }
  return prod;
}

// <O_{ibar jbar}>_T = conj <O_ij>_T
inline cplx t_avg_offdiag_bar_bar(const EigenvalueConfig& z, int i, int j, double sigma_sq) {
  return std::conj(t_avg_offdiag(z, i, j, OffdiagKind::Plain, sigma_sq));
}

// <O_{ibar j}>_T = conj <O_{i jbar}>_T
inline cplx t_avg_offdiag_bar_plain(const EigenvalueConfig& z, int i, int j, double sigma_sq) {
  return std::conj(t_avg_offdiag(z, i, j, OffdiagKind::Barred, sigma_sq));
}

}  // namespace ginse
