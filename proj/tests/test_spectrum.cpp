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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "ginse/spectrum.hpp"
#include "ginse/estimators.hpp"

namespace ginse {
namespace {

SpectrumPairing random_pairing(int n, std::uint64_t seed, QuaternionMatrix* out = nullptr) {
  RngStream rng(seed);
  QuaternionMatrix g = sample_ginse(EnsembleParams::induced(n), rng);
  if (out) *out = g;
  return standard_eigenpairs(g);
}

TEST(StandardEigenpairs, BiorthogonalEigenvectors) {
  QuaternionMatrix g;
  const SpectrumPairing s = random_pairing(6, 17, &g);
  ASSERT_EQ(s.n(), 6);
  const CMatrix id = CMatrix::Identity(12, 12);
  EXPECT_LT((s.left.adjoint() * s.right - id).norm(), 1e-10);
  for (int k = 0; k < 12; ++k) {
    const cplx lam = s.eigenvalue(k);
    EXPECT_LT((g.embedding() * s.right.col(k) - lam * s.right.col(k)).norm(), 1e-10);
    EXPECT_LT((s.left.col(k).adjoint() * g.embedding() - lam * s.left.col(k).adjoint()).norm(), 1e-10);
  }
  for (cplx z : s.values) EXPECT_GT(z.imag(), 0.0);
  EXPECT_GT(s.spectral_radius(), 0.0);
}

TEST(StandardEigenpairs, PartnerVectorsFollowKramersMap) {
  const SpectrumPairing s = random_pairing(4, 3);
  for (int i = 0; i < 4; ++i) {
    EXPECT_LT((s.right.col(barred(i)) - kramers_partner(s.right.col(unbarred(i)))).norm(), 1e-14);
    EXPECT_LT((s.left.col(barred(i)) - kramers_partner(s.left.col(unbarred(i)))).norm(), 1e-14);
  }
}

TEST(StandardEigenpairs, RejectsRealAndDegenerateSpectra) {
  QuaternionMatrix real_ev(2);
  real_ev.set_block(0, 0, {cplx(1.0, 0.0), cplx{}});
  real_ev.set_block(1, 1, {cplx(2.0, 0.5), cplx{}});
  EXPECT_THROW(standard_eigenpairs(real_ev), RealEigenvalue);

  QuaternionMatrix degenerate(2);
  degenerate.set_block(0, 0, {cplx(1.0, 0.5), cplx{}});
  degenerate.set_block(1, 1, {cplx(1.0, 0.5), cplx{}});
  EXPECT_THROW(standard_eigenpairs(degenerate), DegenerateSpectrum);
  EXPECT_THROW(standard_eigenpairs(degenerate), SpectrumError);
}

// Triangular N = 2 example with a closed-form left eigenvector.
TEST(OverlapMatrix, TriangularHandExample) {
  const cplx z1(0.3, 0.9), z2(-0.5, 0.4), a(0.7, -0.2), b(-0.1, 0.6);
  QuaternionMatrix g(2);
  g.set_block(0, 0, {z1, cplx{}});
  g.set_block(1, 1, {z2, cplx{}});
  g.set_block(0, 1, {a, b});
  const SpectrumPairing s = standard_eigenpairs(g);
  const OverlapMatrix o = overlap_matrix(s);
  const int i1 = std::abs(s.values[0] - z1) < 1e-12 ? 0 : 1;
  const double expected = 1.0 + std::norm(a) / std::norm(z1 - z2) + std::norm(b) / std::norm(z1 - std::conj(z2));
  EXPECT_NEAR(o.diag(i1), expected, 1e-12);
  EXPECT_NEAR(o.diag(1 - i1), expected, 1e-12);  // O_11 = O_22 for N = 2
}

TEST(OverlapMatrix, SamplewiseIdentities) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const SpectrumPairing s = random_pairing(5, seed);
    const OverlapMatrix o = overlap_matrix(s);
    const IdentityViolations v = check_identities(o);
    EXPECT_LT(v.hermiticity, 1e-10);
    EXPECT_LT(v.partner_zero, 1e-10);
    EXPECT_LT(v.row_sum, 1e-8);
    EXPECT_LT(v.diag_partner, 1e-10);
    EXPECT_LT(v.pair_symmetry, 1e-10);
    for (int i = 0; i < 5; ++i) EXPECT_GE(o.diag(i), 1.0 - 1e-12);
  }
}

// Summing only the unbarred columns does not give 1 in general.
TEST(OverlapMatrix, HalfRowSumIsNotAnIdentity) {
  double worst = 0.0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) worst = std::max(worst, check_identities(overlap_matrix(random_pairing(4, seed))).half_row_sum);
  EXPECT_GT(worst, 1e-3);
}

TEST(DDensitySample, FullPlaneIntegralCountsEigenvalues) {
  const SpectrumPairing s = random_pairing(4, 9);
  const OverlapMatrix o = overlap_matrix(s);
  const Rect all{-100.0, 100.0, -100.0, 100.0};
  const Rect upper_left{-100.0, 0.0, 0.0, 100.0};
  int count = 0;
  for (int k = 0; k < 8; ++k) count += upper_left.contains(s.eigenvalue(k)) ? 1 : 0;
  const cplx d = d_density_sample(s, o, upper_left, all);
  EXPECT_NEAR(d.real() * all.area(), count / (8.0 * upper_left.area()), 1e-10);
  EXPECT_NEAR(d.imag(), 0.0, 1e-14);
}

TEST(IndexHelpers, PartnerIndexFlipsBar) {
  EXPECT_EQ(unbarred(3), 6);
  EXPECT_EQ(barred(3), 7);
  EXPECT_EQ(partner_index(6), 7);
  EXPECT_EQ(partner_index(7), 6);
}


TEST(StandardEigenpairs, SinglePairEigenvalue) {
  const cplx a(0.4, -0.3), b(0.2, 0.7);
  QuaternionMatrix g(1);
  g.set_block(0, 0, {a, b});
  const SpectrumPairing s = standard_eigenpairs(g);
  EXPECT_LT(std::abs(s.values[0] - cplx(a.real(), std::sqrt(a.imag() * a.imag() + std::norm(b)))), 1e-14);
}

TEST(StandardEigenpairs, DiagonalInputHasUnitVectors) {
  const std::vector<cplx> z{{0.5, 0.2}, {-1.0, 0.7}, {0.1, 1.5}};
  QuaternionMatrix g(3);
  for (int i = 0; i < 3; ++i) g.set_block(i, i, {z[i], cplx{}});
  const SpectrumPairing s = standard_eigenpairs(g);
  for (int i = 0; i < 3; ++i) {
    int src = 0;
    while (std::abs(z[src] - s.values[i]) > 1e-12) ++src;
    EXPECT_NEAR(std::abs(s.right(unbarred(src), unbarred(i))), 1.0, 1e-14);
    EXPECT_NEAR(s.right.col(unbarred(i)).norm(), 1.0, 1e-14);
  }
  // Normal matrix: unit overlaps, no cross terms.
  const OverlapMatrix o = overlap_matrix(s);
  EXPECT_LT((o.entries - CMatrix::Identity(6, 6)).norm(), 1e-13);
  const IdentityViolations v = check_identities(o);
  EXPECT_LT(std::max({v.hermiticity, v.partner_zero, v.row_sum, v.diag_partner, v.pair_symmetry}), 1e-13);
}

TEST(StandardEigenpairs, ConjugateClosedSpectrum) {
  RngStream rng(4);
  const QuaternionMatrix g = sample_ginse(EnsembleParams::induced(3), rng);
  Eigen::ComplexEigenSolver<CMatrix> solver(g.embedding(), false);
  const auto& ev = solver.eigenvalues();
  for (int k = 0; k < ev.size(); ++k) {
    double best = 1e300;
    for (int l = 0; l < ev.size(); ++l) best = std::min(best, std::abs(ev(l) - std::conj(ev(k))));
    EXPECT_LT(best, 1e-10);
  }
}

// (R_i, L_i) -> (c R_i, L_i / conj(c)) leaves every overlap unchanged.
TEST(OverlapMatrix, RescalingInvariance) {
  SpectrumPairing s = random_pairing(4, 23);
  const OverlapMatrix before = overlap_matrix(s);
  RngStream rng(2);
  for (int i = 0; i < 4; ++i) {
    const cplx c = rng.complex_normal(1.0) + cplx(0.1, 0.0);
    s.right.col(unbarred(i)) *= c;
    s.left.col(unbarred(i)) /= std::conj(c);
    s.right.col(barred(i)) = kramers_partner(s.right.col(unbarred(i)));
    s.left.col(barred(i)) = kramers_partner(s.left.col(unbarred(i)));
  }
  const OverlapMatrix after = overlap_matrix(s);
  EXPECT_LT((after.entries - before.entries).cwiseAbs().maxCoeff(), 1e-12 * before.entries.cwiseAbs().maxCoeff());
}

TEST(DDensitySample, EmptyAndSingleEigenvalueBins) {
  const SpectrumPairing s = random_pairing(3, 31);
  const OverlapMatrix o = overlap_matrix(s);
  const Rect far{50.0, 51.0, 50.0, 51.0};
  EXPECT_EQ(d_density_sample(s, o, far, far), cplx{});
  const cplx z = s.values[1];
  const Rect tiny{z.real() - 1e-6, z.real() + 1e-6, z.imag() - 1e-6, z.imag() + 1e-6};
  const cplx v = d_density_sample(s, o, tiny, tiny);
  EXPECT_NEAR(v.real(), o.diag(1) / (6.0 * tiny.area() * tiny.area()), 1e-9 * v.real());
}

}  // namespace
}  // namespace ginse
