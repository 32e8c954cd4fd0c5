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
#include <random>
#include <sstream>

#include "ginse/exact.hpp"
#include "ginse/io.hpp"

namespace ginse {
namespace {

const EnsembleParams kSmall = EnsembleParams::induced(3, 0.0, 0.5);

McOptions options(std::uint64_t samples, std::uint64_t seed = 9, unsigned threads = 1) {
  McOptions o;
  o.samples = samples;
  o.seed = seed;
  o.threads = threads;
  o.shards = 8;
  return o;
}

void expect_same(const Accumulators& a, const Accumulators& b) {
  ASSERT_EQ(a.size(), b.size());
  EXPECT_EQ(a.samples(), b.samples());
  for (std::size_t k = 0; k < a.size(); ++k) {
    EXPECT_EQ(a.cell(k).sum_re, b.cell(k).sum_re);
    EXPECT_EQ(a.cell(k).sum_im, b.cell(k).sum_im);
    EXPECT_EQ(a.cell(k).count, b.cell(k).count);
  }
}

TEST(Accumulators, CommitSumsRepeatedCellsBeforeSquaring) {
  Accumulators acc(3);
  std::vector<std::pair<std::size_t, cplx>> hits{{1, 2.0}, {1, 3.0}, {2, cplx(0.0, 1.0)}};
  acc.commit(hits);
  EXPECT_TRUE(hits.empty());
  std::vector<std::pair<std::size_t, cplx>> none;
  acc.commit(none);
  EXPECT_EQ(acc.samples(), 2u);
  EXPECT_DOUBLE_EQ(acc.cell(1).sum_re, 5.0);
  EXPECT_DOUBLE_EQ(acc.cell(1).sum_sq_re, 25.0);
  EXPECT_EQ(acc.cell(1).count, 2u);
  const BinEstimate e = acc.estimate(1);
  EXPECT_DOUBLE_EQ(e.mean.real(), 2.5);
  EXPECT_NEAR(e.std_error, 2.5, 1e-12);  // sample values {5, 0}
  EXPECT_THROW(acc.merge(Accumulators(4)), InvalidParams);
}

TEST(Sharding, ResultIndependentOfThreadCount) {
  const BinGrid grid = BinGrid::standard(kSmall, 6, 6);
  const Accumulators one = accumulate_diag_mc(kSmall, grid, Route::DirectEigen, options(400, 9, 1));
  const Accumulators three = accumulate_diag_mc(kSmall, grid, Route::DirectEigen, options(400, 9, 3));
  expect_same(one, three);
}

TEST(Sharding, MergeOrderIsCanonical) {
  std::vector<std::pair<unsigned, Accumulators>> parts;
  for (unsigned s = 0; s < 5; ++s) {
    Accumulators a(2);
    std::vector<std::pair<std::size_t, cplx>> h{{s % 2, cplx(0.1 * (s + 1), 1.0 / (s + 3))}};
    a.commit(h);
    parts.emplace_back(s, a);
  }
  const Accumulators ordered = merge_shards(parts);
  std::mt19937 g(4);
  std::shuffle(parts.begin(), parts.end(), g);
  expect_same(ordered, merge_shards(parts));
  EXPECT_EQ(ordered.samples(), 5u);
}

TEST(Routes, SchurAndDirectAgreeOnSharedDraws) {
  const BinGrid grid = BinGrid::standard(kSmall, 5, 5);
  const Accumulators d = accumulate_diag_mc(kSmall, grid, Route::DirectEigen, options(300));
  const Accumulators s = accumulate_diag_mc(kSmall, grid, Route::SchurRecursion, options(300));
  ASSERT_EQ(s.rejected(), d.rejected());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    EXPECT_EQ(d.cell(k).count, s.cell(k).count);
    EXPECT_NEAR(d.cell(k).sum_re, s.cell(k).sum_re, 1e-8 * std::max(1.0, std::abs(d.cell(k).sum_re)));
  }
}

TEST(Routes, FullMatrixRoutesNeedZeroAlpha) {
  const auto p = EnsembleParams::induced(3, 1.0, 1.0);
  const BinGrid grid = BinGrid::standard(p, 4, 4);
  EXPECT_THROW(accumulate_diag_mc(p, grid, Route::DirectEigen, options(10)), UnsupportedRoute);
  EXPECT_THROW(accumulate_diag_mc(p, grid, Route::SchurRecursion, options(10)), UnsupportedRoute);
  McOptions o = options(64);
  o.chain.burn_in_sweeps = 200;
  const Accumulators acc = accumulate_diag_mc(p, grid, Route::JpdfTimesTavg, o);
  double total = 0.0;
  for (std::size_t k = 0; k < grid.size(); ++k) total += acc.estimate(k).mean.real();
  EXPECT_GT(total, 0.0);
}

TEST(StandardError, ShrinksWithSamples) {
  const BinGrid grid({-1.0, 1.0, 0.0, 1.0}, 1, 1);
  const double se1 = accumulate_diag_mc(kSmall, grid, Route::DirectEigen, options(1000, 1)).estimate(0).std_error;
  const double se4 = accumulate_diag_mc(kSmall, grid, Route::DirectEigen, options(4000, 2)).estimate(0).std_error;
  EXPECT_GT(se1 / se4, 1.5);
  EXPECT_LT(se1 / se4, 2.7);
}

TEST(Estimates, EmptyRegionGivesZeros) {
  const BinGrid far({40.0, 41.0, 40.0, 41.0}, 3, 3);
  const EstimateTable t = estimate_diag_mc(kSmall, far, Route::DirectEigen, options(50));
  ASSERT_EQ(t.rows.size(), 9u);
  for (const auto& r : t.rows) {
    EXPECT_EQ(r.value, cplx{});
    EXPECT_EQ(r.count, 0u);
  }
}

// A coarse diagonal estimate against bin-averaged exact values.
TEST(Estimates, DiagonalMatchesExactOnCoarseGrid) {
  const auto p = EnsembleParams::induced(2, 0.0, 1.0);
  const BinGrid grid({-1.5, 1.5, 0.0, 1.5}, 3, 2);
  const Accumulators acc = accumulate_diag_mc(p, grid, Route::DirectEigen, options(20000, 5));
  int within = 0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const BinEstimate e = acc.estimate(k);
    const double exact = bin_average([&](cplx x) { return diag_overlap_exact(x, p); }, grid.bin_rect(k));
    if (std::abs(e.mean.real() - exact) <= 3.0 * e.std_error) ++within;
  }
  EXPECT_GE(within, 5);
}

TEST(Offdiag, PlainAndBarredShareDraws) {
  const auto p = EnsembleParams::induced(3, 0.0, 0.5);
  const BinGrid side({-1.2, 1.2, 0.0, 1.2}, 2, 2);
  const PairBinGrid pg{side, side};
  const Accumulators both = accumulate_offdiag_mc_both(p, pg, options(200));
  expect_same(both.slice(0, pg.size()), accumulate_offdiag_mc(p, pg, OffdiagKind::Plain, options(200)));
  expect_same(both.slice(pg.size(), pg.size()), accumulate_offdiag_mc(p, pg, OffdiagKind::Barred, options(200)));
  // Swapping the bins conjugates the plain estimate samplewise (O is Hermitian).
  for (std::size_t a = 0; a < side.size(); ++a)
    for (std::size_t b = 0; b < side.size(); ++b) {
      const cplx ab = both.estimate(pg.cell(a, b)).mean, ba = both.estimate(pg.cell(b, a)).mean;
      EXPECT_LT(std::abs(ab - std::conj(ba)), 1e-12 * std::max(1.0, std::abs(ab)));
    }
  // Same-bin pairs near coincidence are negative on average.
  EXPECT_LT(both.estimate(pg.cell(0, 0)).mean.real(), 0.0);
}

TEST(Identities, SuitePassesAtSixPairs) {
  RngStream rng(6);
  const IdentityReport rep = identity_suite(EnsembleParams::induced(6), 100, rng);
  EXPECT_EQ(rep.samples, 100u);
  EXPECT_TRUE(rep.all_passed());
  EXPECT_GT(rep.worst_half_row_sum, 1e-3);
}

TEST(Identities, IntegratedDEqualsDensitySamplewise) {
  const auto p = EnsembleParams::induced(3, 0.0, 1.0);
  const BinGrid grid = BinGrid::standard(p, 4, 4);
  const Accumulators acc = accumulate_density_identity(p, grid, options(200));
  for (std::size_t k = 0; k < grid.size(); ++k)
    EXPECT_LT(std::abs(acc.estimate(2 * k).mean - acc.estimate(2 * k + 1).mean), 1e-9);
}

TEST(BinAverage, ExactForLowDegreePolynomials) {
  const Rect r{0.0, 2.0, 1.0, 3.0};
  const double v = bin_average([](cplx z) { return z.real() * z.real() * z.imag(); }, r);
  EXPECT_NEAR(v, (8.0 / 3.0) / 2.0 * 2.0, 1e-13);
}

TEST(Io, CsvSchema) {
  const BinGrid grid = BinGrid::standard(kSmall, 2, 2);
  const EstimateTable t = estimate_diag_mc(kSmall, grid, Route::DirectEigen, options(20));
  std::ostringstream os;
  t.write_csv(os);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  EXPECT_EQ(line, "# ginse-overlaps v1");
  std::getline(is, line);
  EXPECT_EQ(line, EstimateTable::kCsvColumns);
  int rows = 0;
  while (std::getline(is, line)) {
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 8);
    ++rows;
  }
  EXPECT_EQ(rows, 4);
  const auto j = t.to_json();
  EXPECT_EQ(j["schema"], "ginse-overlaps v1");
  EXPECT_EQ(j["metadata"]["route"], "direct");
  EXPECT_EQ(j["metadata"]["samples"], 20);
  EXPECT_EQ(j["rows"].size(), 4u);
}

}  // namespace
}  // namespace ginse
