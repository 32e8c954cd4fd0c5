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
#include <numeric>
#include <vector>

#include "ginse/ensemble.hpp"
#include "ginse/errors.hpp"

namespace ginse {

// Index helpers for the interleaved (1, 1bar, 2, 2bar, ...) ordering.
inline constexpr int unbarred(int i) { return 2 * i; }
inline constexpr int barred(int i) { return 2 * i + 1; }
inline constexpr int partner_index(int k) { return k ^ 1; }

// Standard eigenvalues with biorthogonal eigenvectors. Column k of `right`/`left`
// is R_k / L_k in interleaved order, so that L_k^dagger R_l = delta_kl.
struct SpectrumPairing {
  std::vector<cplx> values;  // upper half-plane representatives
  CMatrix right;
  CMatrix left;

  int n() const { return static_cast<int>(values.size()); }
  cplx eigenvalue(int k) const { return (k & 1) ? std::conj(values[k / 2]) : values[k / 2]; }
  double spectral_radius() const {
    double r = 0.0;
    for (const cplx& z : values) r = std::max(r, std::abs(z));
    return r;
  }
};

struct SpectrumTolerances {
  double degenerate = 1e-10;
  double pairing = 1e-8;
};

namespace detail {

// Matches upper half-plane eigenvalues to their conjugates; returns indices of the
// upper half-plane members sorted by (real, imag).
inline std::vector<int> pair_spectrum(const Eigen::Matrix<cplx, Eigen::Dynamic, 1>& ev, const SpectrumTolerances& tol) {
  const int m = static_cast<int>(ev.size());
  double radius = 0.0;
  for (int k = 0; k < m; ++k) radius = std::max(radius, std::abs(ev(k)));
  const double scale = radius > 0.0 ? radius : 1.0;
  for (int k = 0; k < m; ++k)
    if (std::abs(ev(k).imag()) < tol.degenerate * scale) throw RealEigenvalue("eigenvalue on the real axis");
  for (int k = 0; k < m; ++k)
    for (int l = k + 1; l < m; ++l)
      if (std::abs(ev(k) - ev(l)) < tol.degenerate * scale) throw DegenerateSpectrum("degenerate eigenvalues");

  std::vector<int> upper, lower;
  for (int k = 0; k < m; ++k) (ev(k).imag() > 0.0 ? upper : lower).push_back(k);
  if (upper.size() != lower.size()) throw PairingFailure("unbalanced conjugate pairs");
  auto by_value = [&](int a, int b) {
    return ev(a).real() != ev(b).real() ? ev(a).real() < ev(b).real() : ev(a).imag() < ev(b).imag();
  };
  std::sort(upper.begin(), upper.end(), by_value);
  std::vector<bool> used(lower.size(), false);
  for (int u : upper) {
    int best = -1;
    double dist = 0.0;
    for (std::size_t l = 0; l < lower.size(); ++l) {
      if (used[l]) continue;
      const double d = std::abs(ev(u) - std::conj(ev(lower[l])));
      if (best < 0 || d < dist) best = static_cast<int>(l), dist = d;
    }
    if (dist > tol.pairing * scale) throw PairingFailure("no conjugate partner within tolerance");
    used[best] = true;
  }
  return upper;
}

}  // namespace detail

inline SpectrumPairing standard_eigenpairs(const QuaternionMatrix& g, const SpectrumTolerances& tol = {}) {
  const int n = g.dim_pairs();
  Eigen::ComplexEigenSolver<CMatrix> solver(g.embedding(), true);
  if (solver.info() != Eigen::Success) throw DegenerateSpectrum("eigensolver did not converge");
  const auto& ev = solver.eigenvalues();
  const std::vector<int> upper = detail::pair_spectrum(ev, tol);

  SpectrumPairing s;
  s.values.resize(n);
  s.right.resize(2 * n, 2 * n);
  for (int i = 0; i < n; ++i) {
    s.values[i] = ev(upper[i]);
    CVector r = solver.eigenvectors().col(upper[i]);
    r /= r.norm();
    s.right.col(unbarred(i)) = r;
    s.right.col(barred(i)) = kramers_partner(r);
  }
  Eigen::PartialPivLU<CMatrix> lu(s.right);
  const CMatrix inv = lu.inverse();
  s.left.resize(2 * n, 2 * n);
  for (int i = 0; i < n; ++i) {
    const CVector l = inv.row(unbarred(i)).adjoint();
    s.left.col(unbarred(i)) = l;
    s.left.col(barred(i)) = kramers_partner(l);
  }
  return s;
}

// Hermitian 2N x 2N matrix O_kl = (L_k^dagger L_l)(R_l^dagger R_k).
struct OverlapMatrix {
  CMatrix entries;

  int n() const { return static_cast<int>(entries.rows() / 2); }
  cplx operator()(int k, int l) const { return entries(k, l); }
  double diag(int i) const { return entries(unbarred(i), unbarred(i)).real(); }
};

inline OverlapMatrix overlap_matrix(const SpectrumPairing& s) {
  const CMatrix ll = s.left.adjoint() * s.left;
  const CMatrix rr = s.right.adjoint() * s.right;
  OverlapMatrix o;
  o.entries = ll.cwiseProduct(rr.transpose());
  return o;
}

struct Rect {
  double re_min = 0.0, re_max = 0.0, im_min = 0.0, im_max = 0.0;

  double area() const { return (re_max - re_min) * (im_max - im_min); }
  bool contains(cplx z) const {
    return z.real() >= re_min && z.real() < re_max && z.imag() >= im_min && z.imag() < im_max;
  }
};

// One-sample contribution to the binned D(x1, x2), counting all 2N eigenvalues
// with weight 1/(2N) so that the x2-integral reproduces the density samplewise.
inline cplx d_density_sample(const SpectrumPairing& s, const OverlapMatrix& o, const Rect& x1_bin, const Rect& x2_bin) {
  const int m = 2 * s.n();
  cplx acc{};
  for (int l = 0; l < m; ++l) {
    if (!x1_bin.contains(s.eigenvalue(l))) continue;
    for (int k = 0; k < m; ++k)
      if (x2_bin.contains(s.eigenvalue(k))) acc += o(k, l);
  }
  return acc / (static_cast<double>(m) * x1_bin.area() * x2_bin.area());
}

}  // namespace ginse
