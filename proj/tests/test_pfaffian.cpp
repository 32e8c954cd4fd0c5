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

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/trapezoidal.hpp>

#include <cmath>

#include "ginse/ensemble.hpp"
#include "ginse/exact.hpp"
#include "ginse/pfaffian.hpp"

namespace ginse {
namespace {

CMatrix random_skew(int n, std::uint64_t seed) {
  RngStream rng(seed);
  CMatrix a = CMatrix::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      a(i, j) = rng.complex_normal(1.0);
      a(j, i) = -a(i, j);
    }
  return a;
}

TEST(Pfaffian, FourByFourExpansion) {
  const CMatrix a = random_skew(4, 1);
  const cplx expected = a(0, 1) * a(2, 3) - a(0, 2) * a(1, 3) + a(0, 3) * a(1, 2);
  EXPECT_LT(std::abs(pfaffian_dense(a).to_complex() - expected), 1e-13 * std::abs(expected));
}

TEST(Pfaffian, SquareEqualsDeterminant) {
  for (int n : {2, 6, 10, 16}) {
    const CMatrix a = random_skew(n, 100 + n);
    const cplx pf = pfaffian_dense(a).to_complex();
    const cplx det = a.determinant();
    EXPECT_LT(std::abs(pf * pf - det), 1e-10 * std::abs(det)) << "n = " << n;
  }
}

TEST(Pfaffian, SignFollowsRowSwap) {
  CMatrix a = random_skew(6, 7);
  const cplx pf = pfaffian_dense(a).to_complex();
  CMatrix b = a;
  b.row(1).swap(b.row(4));
  b.col(1).swap(b.col(4));
  EXPECT_LT(std::abs(pfaffian_dense(b).to_complex() + pf), 1e-12 * std::abs(pf));
}

TEST(Pfaffian, BandedMatchesDense) {
  RngStream rng(3);
  const int n = 20, bw = 3;
  BandedSkew m(n, bw);
  CMatrix d = CMatrix::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j <= std::min(n - 1, i + bw); ++j) {
      const cplx v = rng.complex_normal(1.0);
      m.set(i, j, LogComplex::from(v));
      d(i, j) = v;
      d(j, i) = -v;
    }
  EXPECT_LT((m.to_dense() - d).norm(), 1e-14 * d.norm());
  const LogComplex pb = pfaffian(m), pd = pfaffian_dense(d);
  EXPECT_NEAR(pb.log_magnitude(), pd.log_magnitude(), 1e-11);
  EXPECT_LT(std::abs(pb.phase() - pd.phase()), 1e-11);
}

// Congruence by D = diag(e^{s_i}) with |s_i| in the hundreds: Pf(D A D) = det(D) Pf(A).
TEST(Pfaffian, SurvivesExtremeScaling) {
  const int n = 12, bw = 3;
  RngStream rng(9);
  BandedSkew base(n, bw), scaled(n, bw);
  std::vector<double> s(n);
  for (int i = 0; i < n; ++i) s[i] = 150.0 * (i % 3) - 400.0 * (i % 2);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j <= std::min(n - 1, i + bw); ++j) {
      const LogComplex v = LogComplex::from(rng.complex_normal(1.0));
      base.set(i, j, v);
      scaled.set(i, j, LogComplex(v.log_magnitude() + s[i] + s[j], v.phase()));
    }
  double shift = 0.0;
  for (double v : s) shift += v;
  const LogComplex a = pfaffian(base), b = pfaffian(scaled);
  EXPECT_NEAR(b.log_magnitude() - a.log_magnitude(), shift, 1e-9);
  EXPECT_LT(std::abs(b.phase() - a.phase()), 1e-10);
}

TEST(Pfaffian, TridiagonalProduct) {
  const int n = 10;
  BandedSkew m(n, 1);
  cplx expected = 1.0;
  for (int k = 0; k + 1 < n; ++k) {
    const cplx v(1.0 + k, 0.5 - k);
    m.set(k, k + 1, LogComplex::from(v));
    if (k % 2 == 0) expected *= v;
  }
  EXPECT_LT(std::abs(pfaffian(m).to_complex() - expected), 1e-13 * std::abs(expected));
}

TEST(Pfaffian, ErrorsAndEmptyMatrix) {
  EXPECT_THROW(BandedSkew(3, 1), InvalidParams);
  BandedSkew m(4, 1);
  EXPECT_THROW(m.set(0, 3, LogComplex::one()), InvalidParams);
  EXPECT_THROW(pfaffian(m), SingularMatrix);  // zero rows
  CMatrix a = CMatrix::Zero(4, 4);
  for (int j = 1; j < 4; ++j) {
    a(0, j) = 1.0;
    a(j, 0) = -1.0;
  }
  EXPECT_THROW(pfaffian_dense(a), SingularMatrix);  // rank 2
  EXPECT_EQ(pfaffian(BandedSkew(0, 1)).to_complex(), cplx(1.0));
}

// Radial Gaussian moments against one-dimensional quadrature.
TEST(GaussianMoment, MatchesRadialQuadrature) {
  boost::math::quadrature::exp_sinh<double> integrator;
  for (double alpha : {0.0, 0.5, 2.0})
    for (double s2 : {0.3, 1.0, 2.5})
      for (int m : {0, 1, 4}) {
        const double expected = 2.0 * kPi * integrator.integrate([&](double r) {
          return r > 0.0 ? std::exp((2.0 * m + 2.0 * alpha + 1.0) * std::log(r) - 2.0 * r * r / s2) : 0.0;
        });
        const double got = gaussian_moment(m, m, alpha, s2).to_complex().real();
        EXPECT_NEAR(got / expected, 1.0, 1e-10) << alpha << " " << s2 << " " << m;
      }
  EXPECT_TRUE(gaussian_moment(2, 1, 0.0, 1.0).is_zero());
  EXPECT_THROW(gaussian_moment(1, 1, -1.0, 1.0), InvalidParams);
}

// Skew moment entries against polar quadrature (trapezoid in angle, exp-sinh in radius).
TEST(MomentEntry, MatchesPlaneQuadrature) {
  const double alpha = 0.7, s2 = 0.9;
  const cplx x(0.2, 0.45);
  const ZPolynomial w = density_weight(x);
  boost::math::quadrature::exp_sinh<double> radial;
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 5; ++j) {
      auto angular = [&](double r) {
        if (r > 30.0) return cplx{};
        const int k = 64;
        cplx s{};
        for (int t = 0; t < k; ++t) {
          const cplx z = std::polar(r, 2.0 * kPi * t / k);
          const cplx zb = std::conj(z);
          s += (std::pow(z, i) * std::pow(zb, j) - std::pow(z, j) * std::pow(zb, i)) * (z - zb) * w.evaluate(z);
        }
        return s * (2.0 * kPi / k) * std::pow(r, 2.0 * alpha + 1.0) * std::exp(-2.0 * r * r / s2);
      };
      const double re = radial.integrate([&](double r) { return angular(r).real(); });
      const double im = radial.integrate([&](double r) { return angular(r).imag(); });
      const cplx got = moment_entry(w, i, j, alpha, s2).to_complex();
      EXPECT_LT(std::abs(got - cplx(re, im)), 1e-9 * std::max(1.0, std::abs(got))) << i << "," << j;
    }
}

TEST(ZPolynomial, ArithmeticAndEvaluation) {
  const cplx x(0.4, -0.3), w(1.1, 0.6);
  const ZPolynomial p = ZPolynomial::abs_sq_minus_z(x);
  EXPECT_LT(std::abs(p.evaluate(w) - std::norm(x - w)), 1e-14);
  const ZPolynomial q = ZPolynomial::abs_sq_minus_zbar(x);
  EXPECT_LT(std::abs(q.evaluate(w) - std::norm(x - std::conj(w))), 1e-14);
  EXPECT_LT(std::abs((p * q - cplx(2.0) * p).evaluate(w) - (p.evaluate(w) * q.evaluate(w) - 2.0 * p.evaluate(w))), 1e-13);
}

TEST(LogComplex, SumsAcrossScales) {
  const LogComplex a(800.0, cplx(0.0, 1.0)), b(799.0, cplx(0.0, 1.0));
  const LogComplex s = a + b;
  EXPECT_NEAR(s.log_magnitude(), 800.0 + std::log1p(std::exp(-1.0)), 1e-12);
  EXPECT_LT(std::abs(s.phase() - cplx(0.0, 1.0)), 1e-14);
  EXPECT_TRUE((a - a).is_zero() || (a - a).log_magnitude() < 790.0);
  EXPECT_TRUE((LogComplex::zero() * a).is_zero());
}


TEST(Pfaffian, SmallCases) {
  BandedSkew two(2, 1);
  two.set(0, 1, LogComplex::from(cplx(2.5, -1.0)));
  EXPECT_LT(std::abs(pfaffian(two).to_complex() - cplx(2.5, -1.0)), 1e-15);
  BandedSkew four(4, 1);
  four.set(0, 1, LogComplex::from(2.0));
  four.set(1, 2, LogComplex::from(3.0));
  four.set(2, 3, LogComplex::from(5.0));
  EXPECT_NEAR(pfaffian(four).to_complex().real(), 10.0, 1e-13);
}

TEST(GaussianMoment, HandValues) {
  EXPECT_NEAR(gaussian_moment(0, 0, 0.0, 1.0).to_complex().real(), kPi / 2.0, 1e-15);
  EXPECT_TRUE(gaussian_moment(1, 0, 0.3, 2.0).is_zero());
  EXPECT_NEAR(gaussian_moment(2, 2, 1.0, 2.0).to_complex().real(), 6.0 * kPi, 1e-13);
}

TEST(IntegratePoly, HandValues) {
  EXPECT_NEAR(integrate_poly(ZPolynomial::constant(1.0), 0.5, 1.5).to_complex().real(),
              gaussian_moment(0, 0, 0.5, 1.5).to_complex().real(), 1e-15);
  const ZPolynomial p = ZPolynomial::z() * ZPolynomial::zbar() - ZPolynomial::constant(1.0);
  EXPECT_NEAR(integrate_poly(p, 0.0, 1.0).to_complex().real(), -kPi / 4.0, 1e-15);
  const ZPolynomial q = (ZPolynomial::z() - ZPolynomial::zbar()) * (ZPolynomial::zbar() - ZPolynomial::z());
  EXPECT_NEAR(integrate_poly(q, 0.0, 1.0).to_complex().real(), 2.0 * gaussian_moment(1, 1, 0.0, 1.0).to_complex().real(), 1e-14);
}

}  // namespace
}  // namespace ginse
