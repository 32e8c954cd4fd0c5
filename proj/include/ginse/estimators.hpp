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
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "ginse/ensemble.hpp"
#include "ginse/schur.hpp"
#include "ginse/spectrum.hpp"

namespace ginse {

struct BinAccumulator {
  double sum_re = 0.0, sum_im = 0.0;
  double sum_sq_re = 0.0, sum_sq_im = 0.0;
  std::uint64_t count = 0;

  void merge(const BinAccumulator& o) {
    sum_re += o.sum_re;
    sum_im += o.sum_im;
    sum_sq_re += o.sum_sq_re;
    sum_sq_im += o.sum_sq_im;
    count += o.count;
  }
};

struct BinEstimate {
  cplx mean;
  double std_error = 0.0;
  std::uint64_t count = 0;
};

// Per-cell sums of per-sample totals; the sample count is shared by all cells.
class Accumulators {
 public:
  Accumulators() = default;
  explicit Accumulators(std::size_t cells) : cells_(cells) {}

  std::size_t size() const { return cells_.size(); }
  std::uint64_t samples() const { return samples_; }
  std::uint64_t rejected() const { return rejected_; }
  const BinAccumulator& cell(std::size_t k) const { return cells_[k]; }

  void note_rejection() { ++rejected_; }

  // Adds one sample; hits may repeat cells and are summed before squaring.
  void commit(std::vector<std::pair<std::size_t, cplx>>& hits) {
    std::sort(hits.begin(), hits.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    for (std::size_t i = 0; i < hits.size();) {
      const std::size_t c = hits[i].first;
      cplx total{};
      std::uint64_t n = 0;
      for (; i < hits.size() && hits[i].first == c; ++i, ++n) total += hits[i].second;
      BinAccumulator& a = cells_[c];
      a.sum_re += total.real();
      a.sum_im += total.imag();
      a.sum_sq_re += total.real() * total.real();
      a.sum_sq_im += total.imag() * total.imag();
      a.count += n;
    }
    hits.clear();
    ++samples_;
  }

  void merge(const Accumulators& o) {
    if (o.cells_.size() != cells_.size()) throw InvalidParams("accumulator geometries differ");
    for (std::size_t k = 0; k < cells_.size(); ++k) cells_[k].merge(o.cells_[k]);
    samples_ += o.samples_;
    rejected_ += o.rejected_;
  }

  Accumulators slice(std::size_t first, std::size_t count) const {
    Accumulators r(count);
    std::copy(cells_.begin() + first, cells_.begin() + first + count, r.cells_.begin());
    r.samples_ = samples_;
    r.rejected_ = rejected_;
    return r;
  }

  BinEstimate estimate(std::size_t k) const {
    const BinAccumulator& a = cells_[k];
    BinEstimate e;
    e.count = a.count;
    if (samples_ == 0) return e;
    const double m = static_cast<double>(samples_);
    e.mean = {a.sum_re / m, a.sum_im / m};
    if (samples_ > 1) {
      const double vr = std::max(0.0, a.sum_sq_re / m - e.mean.real() * e.mean.real());
      const double vi = std::max(0.0, a.sum_sq_im / m - e.mean.imag() * e.mean.imag());
      e.std_error = std::sqrt((vr + vi) / (m - 1.0));
    }
    return e;
  }

 private:
  std::vector<BinAccumulator> cells_;
  std::uint64_t samples_ = 0;
  std::uint64_t rejected_ = 0;
};

// Rectangular nx x ny grid over a region of the plane.
struct BinGrid {
  Rect region;
  int nx = 1, ny = 1;

  BinGrid() = default;
  BinGrid(Rect r, int nx_, int ny_) : region(r), nx(nx_), ny(ny_) {
    if (nx < 1 || ny < 1 || !(r.area() > 0.0)) throw InvalidParams("bin grid needs positive area and counts");
  }

  // Default grid: 24 x 24 over [-1.2, 1.2] x (0, 1.2] in units of sigma sqrt(N).
  static BinGrid standard(const EnsembleParams& p, int nx = 24, int ny = 24) {
    const double u = std::sqrt(p.sigma_sq * p.n);
    return BinGrid({-1.2 * u, 1.2 * u, 0.0, 1.2 * u}, nx, ny);
  }

  std::size_t size() const { return static_cast<std::size_t>(nx) * ny; }
  double bin_area() const { return region.area() / size(); }

  std::optional<std::size_t> locate(cplx z) const {
    if (!region.contains(z)) return std::nullopt;
    const int ix = std::min(nx - 1, static_cast<int>((z.real() - region.re_min) / (region.re_max - region.re_min) * nx));
    const int iy = std::min(ny - 1, static_cast<int>((z.imag() - region.im_min) / (region.im_max - region.im_min) * ny));
    return static_cast<std::size_t>(iy) * nx + ix;
  }

  Rect bin_rect(std::size_t k) const {
    const int ix = static_cast<int>(k % nx), iy = static_cast<int>(k / nx);
    const double dx = (region.re_max - region.re_min) / nx, dy = (region.im_max - region.im_min) / ny;
    return {region.re_min + ix * dx, region.re_min + (ix + 1) * dx, region.im_min + iy * dy, region.im_min + (iy + 1) * dy};
  }

  cplx center(std::size_t k) const {
    const Rect r = bin_rect(k);
    return {(r.re_min + r.re_max) / 2.0, (r.im_min + r.im_max) / 2.0};
  }
};

struct PairBinGrid {
  BinGrid first, second;
  std::size_t size() const { return first.size() * second.size(); }
  std::size_t cell(std::size_t a, std::size_t b) const { return a * second.size() + b; }
};

// Average of f over a rectangle by tensor Gauss-Legendre quadrature (8 points per side).
template <class F>
auto bin_average(F&& f, const Rect& r) -> decltype(f(cplx{})) {
  static constexpr double x[8] = {-0.9602898564975363, -0.7966664774136267, -0.5255324099163290, -0.1834346424956498,
                                  0.1834346424956498,  0.5255324099163290,  0.7966664774136267,  0.9602898564975363};
  static constexpr double w[8] = {0.1012285362903763, 0.2223810344533745, 0.3137066458778873, 0.3626837833783620,
                                  0.3626837833783620, 0.3137066458778873, 0.2223810344533745, 0.1012285362903763};
  using R = decltype(f(cplx{}));
  R acc{};
  const double cx = (r.re_min + r.re_max) / 2, hx = (r.re_max - r.re_min) / 2;
  const double cy = (r.im_min + r.im_max) / 2, hy = (r.im_max - r.im_min) / 2;
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j) acc += w[i] * w[j] * f(cplx(cx + hx * x[i], cy + hy * x[j]));
  return acc / 4.0;
}

// ---- sharded execution ----------------------------------------------------

enum class Route { DirectEigen, SchurRecursion, JpdfTimesTavg };

struct McOptions {
  std::uint64_t samples = 1000;
  std::uint64_t seed = 1;
  unsigned threads = 1;
  unsigned shards = 64;  // fixed work decomposition, independent of threads
  MetropolisConfig chain;
};

// Runs work(shard, samples_in_shard, acc) for every shard and merges in shard order,
// so the result does not depend on the thread count or scheduling.
template <class Work>
Accumulators run_sharded(std::size_t cells, const McOptions& opt, Work&& work) {
  const unsigned shards = std::max(1u, opt.shards);
  std::vector<Accumulators> parts(shards, Accumulators(cells));
  std::atomic<unsigned> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (unsigned s; (s = next.fetch_add(1)) < shards;) {
      const std::uint64_t n = opt.samples / shards + (s < opt.samples % shards ? 1 : 0);
      try {
        work(s, n, parts[s]);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const unsigned threads = std::max(1u, std::min(opt.threads, shards));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  Accumulators total(cells);
  for (const auto& p : parts) total.merge(p);
  return total;
}

// Merges (shard id, accumulators) in ascending shard order regardless of input order.
inline Accumulators merge_shards(std::vector<std::pair<unsigned, Accumulators>> shards) {
  std::sort(shards.begin(), shards.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  if (shards.empty()) return {};
  Accumulators total(shards.front().second.size());
  for (const auto& [id, acc] : shards) total.merge(acc);
  return total;
}

// ---- per-sample overlap evaluation ---------------------------------------

inline std::vector<double> diag_overlaps_direct(const SpectrumPairing& s) {
  const OverlapMatrix o = overlap_matrix(s);
  std::vector<double> v(s.n());
  for (int i = 0; i < s.n(); ++i) v[i] = o.diag(i);
  return v;
}

inline std::vector<int> order_with_head(int n, int head, int second = -1) {
  std::vector<int> order{head};
  if (second >= 0) order.push_back(second);
  for (int i = 0; i < n; ++i)
    if (i != head && i != second) order.push_back(i);
  return order;
}

inline std::vector<double> diag_overlaps_schur(const QuaternionMatrix& g, const SpectrumPairing& s) {
  std::vector<double> v(s.n());
  for (int l = 0; l < s.n(); ++l) v[l] = overlaps_from_schur(schur_from_pairing(g, s, order_with_head(s.n(), l))).o11;
  return v;
}

namespace detail {

inline void require_full_matrix_route(const EnsembleParams& p) {
  p.validate();
  if (p.is_induced() && p.alpha != 0.0)
    throw UnsupportedRoute("full-matrix routes need alpha = 0; use JpdfTimesTavg");
}

// Draws until the spectrum passes the checks; returns the draw and its pairing.
inline std::pair<QuaternionMatrix, SpectrumPairing> draw_spectrum(const EnsembleParams& p, RngStream& rng,
                                                                  Accumulators& acc) {
  for (int attempt = 0; attempt < 1000; ++attempt) {
    QuaternionMatrix g = sample_ginse(p, rng);
    try {
      SpectrumPairing s = standard_eigenpairs(g);
      return {std::move(g), std::move(s)};
    } catch (const SpectrumError&) {
      acc.note_rejection();
    }
  }
  throw DegenerateSpectrum("too many rejected draws");
}

}  // namespace detail

// Binned O_N(x): every eigenvalue (both members of each pair) contributes O/(2N area).
inline Accumulators accumulate_diag_mc(const EnsembleParams& p, const BinGrid& grid, Route route, const McOptions& opt) {
  p.validate();
  if (route != Route::JpdfTimesTavg) detail::require_full_matrix_route(p);
  const double w = 1.0 / (2.0 * p.n * grid.bin_area());
  return run_sharded(grid.size(), opt, [&](unsigned shard, std::uint64_t n, Accumulators& acc) {
    RngStream rng(opt.seed, shard);
    std::vector<std::pair<std::size_t, cplx>> hits;
    if (route == Route::JpdfTimesTavg) {
      // One batch per shard: the chain is autocorrelated, so each independent chain
      // contributes a single batch mean and the standard error comes from the spread
      // across chains.
      if (n == 0) return;
      MetropolisConfig cfg = opt.chain;
      cfg.samples = n;
      const double batch = 1.0 / static_cast<double>(n);
      run_metropolis(p, cfg, rng, [&](const std::vector<cplx>& z) {
        EigenvalueConfig cfgz;
        cfgz.points = z;
        const std::size_t mark = hits.size();
        try {
          for (int l = 0; l < p.n; ++l)
            if (auto c = grid.locate(z[l])) hits.emplace_back(*c, batch * w * t_avg_diag(cfgz, l, p.sigma_sq));
        } catch (const NearCollision&) {
          hits.resize(mark);
          acc.note_rejection();
        }
      });
      acc.commit(hits);
      return;
    }
    for (std::uint64_t k = 0; k < n;) {
      auto [g, s] = detail::draw_spectrum(p, rng, acc);
      std::vector<double> o;
      if (route == Route::DirectEigen) {
        o = diag_overlaps_direct(s);
      } else {
        try {
          o = diag_overlaps_schur(g, s);
        } catch (const NearCollision&) {
          acc.note_rejection();
          continue;
        }
      }
      for (int l = 0; l < p.n; ++l) {
        if (auto c = grid.locate(s.values[l])) hits.emplace_back(*c, w * o[l]);
        if (auto c = grid.locate(std::conj(s.values[l]))) hits.emplace_back(*c, w * o[l]);
      }
      acc.commit(hits);
      ++k;
    }
  });
}

// Binned two-point overlaps on shared draws. Cells [0, size) hold Plain: O_{kl} at (z_k, z_l);
// cells [size, 2 size) hold Barred: O_{k lbar} at (z_k, z_l), an estimate of O_N(x1, conj x2).
// Pairs within one Kramers doublet are excluded.
inline Accumulators accumulate_offdiag_mc_both(const EnsembleParams& p, const PairBinGrid& grid, const McOptions& opt) {
  detail::require_full_matrix_route(p);
  const double w = 1.0 / (4.0 * p.n * p.n * grid.first.bin_area() * grid.second.bin_area());
  const int m = 2 * p.n;
  const std::size_t half = grid.size();
  return run_sharded(2 * half, opt, [&](unsigned shard, std::uint64_t n, Accumulators& acc) {
    RngStream rng(opt.seed, shard);
    std::vector<std::pair<std::size_t, cplx>> hits;
    std::vector<std::optional<std::size_t>> loc1(m), loc2(m);
    for (std::uint64_t k = 0; k < n; ++k) {
      auto [g, s] = detail::draw_spectrum(p, rng, acc);
      const OverlapMatrix o = overlap_matrix(s);
      for (int a = 0; a < m; ++a) {
        loc1[a] = grid.first.locate(s.eigenvalue(a));
        loc2[a] = grid.second.locate(s.eigenvalue(a));
      }
      for (int a = 0; a < m; ++a) {
        if (!loc1[a]) continue;
        for (int b = 0; b < m; ++b) {
          if (a / 2 == b / 2 || !loc2[b]) continue;
          const std::size_t c = grid.cell(*loc1[a], *loc2[b]);
          hits.emplace_back(c, w * o(a, b));
          hits.emplace_back(half + c, w * o(a, partner_index(b)));
        }
      }
      acc.commit(hits);
    }
  });
}

inline Accumulators accumulate_offdiag_mc(const EnsembleParams& p, const PairBinGrid& grid, OffdiagKind kind,
                                          const McOptions& opt) {
  const Accumulators both = accumulate_offdiag_mc_both(p, grid, opt);
  return both.slice(kind == OffdiagKind::Plain ? 0 : grid.size(), grid.size());
}

// ---- identity suite -------------------------------------------------------

struct IdentityViolations {
  double hermiticity = 0.0;     // max |O_lk - conj O_kl| / max |O|
  double partner_zero = 0.0;    // max |O_{i ibar}| / O_ii
  double row_sum = 0.0;         // max |sum over all 2N columns - 1|
  double diag_partner = 0.0;    // max |O_ii - O_{ibar ibar}| / O_ii
  double pair_symmetry = 0.0;   // O_{i jbar} = conj O_{ibar j}, O_{ibar jbar} = conj O_ij
  double half_row_sum = 0.0;    // max |sum over unbarred columns - 1|, informational
};

inline IdentityViolations check_identities(const OverlapMatrix& o) {
  IdentityViolations v;
  const int n = o.n(), m = 2 * n;
  const double big = o.entries.cwiseAbs().maxCoeff();
  for (int k = 0; k < m; ++k) {
    cplx row{}, half{};
    for (int l = 0; l < m; ++l) {
      v.hermiticity = std::max(v.hermiticity, std::abs(o(l, k) - std::conj(o(k, l))) / big);
      row += o(k, l);
      if (l % 2 == 0) half += o(k, l);
    }
    v.row_sum = std::max(v.row_sum, std::abs(row - 1.0));
    v.half_row_sum = std::max(v.half_row_sum, std::abs(half - 1.0));
  }
  for (int i = 0; i < n; ++i) {
    const double oii = o.diag(i);
    v.partner_zero = std::max(v.partner_zero, std::abs(o(unbarred(i), barred(i))) / oii);
    v.diag_partner = std::max(v.diag_partner, std::abs(o(unbarred(i), unbarred(i)) - o(barred(i), barred(i))) / oii);
    for (int j = 0; j < n; ++j) {
      const double norm = std::sqrt(oii * o.diag(j));
      v.pair_symmetry = std::max(v.pair_symmetry, std::abs(o(unbarred(i), barred(j)) - std::conj(o(barred(i), unbarred(j)))) / norm);
      v.pair_symmetry = std::max(v.pair_symmetry, std::abs(o(barred(i), barred(j)) - std::conj(o(unbarred(i), unbarred(j)))) / norm);
    }
  }
  return v;
}

struct IdentityTolerances {
  double hermiticity = 1e-10;
  double partner_zero = 1e-10;
  double row_sum = 1e-6;
  double diag_partner = 1e-10;
  double pair_symmetry = 1e-10;
};

struct IdentityCheck {
  std::string name;
  double tolerance = 0.0;
  std::uint64_t passed = 0, failed = 0;
  double worst = 0.0;
};

struct IdentityReport {
  std::uint64_t samples = 0;
  std::uint64_t rejected = 0;
  std::vector<IdentityCheck> checks;
  double worst_half_row_sum = 0.0;  // informational only

  bool all_passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const IdentityCheck& c) { return c.failed == 0; });
  }
};

inline IdentityReport identity_suite(const EnsembleParams& p, std::uint64_t samples, RngStream& rng,
                                     const IdentityTolerances& tol = {}) {
  detail::require_full_matrix_route(p);
  IdentityReport r;
  r.checks = {{"hermiticity", tol.hermiticity},
              {"partner_zero", tol.partner_zero},
              {"row_sum", tol.row_sum},
              {"diag_partner", tol.diag_partner},
              {"pair_symmetry", tol.pair_symmetry}};
  Accumulators rejections(0);
  for (std::uint64_t k = 0; k < samples; ++k) {
    auto [g, s] = detail::draw_spectrum(p, rng, rejections);
    const IdentityViolations v = check_identities(overlap_matrix(s));
    const double vals[] = {v.hermiticity, v.partner_zero, v.row_sum, v.diag_partner, v.pair_symmetry};
    for (std::size_t c = 0; c < r.checks.size(); ++c) {
      auto& chk = r.checks[c];
      chk.worst = std::max(chk.worst, vals[c]);
      (vals[c] <= chk.tolerance ? chk.passed : chk.failed) += 1;
    }
    r.worst_half_row_sum = std::max(r.worst_half_row_sum, v.half_row_sum);
    ++r.samples;
  }
  r.rejected = rejections.rejected();
  return r;
}

// Density identity: per x1 bin, the x2-integral of D (all eigenvalues) next to the plain
// binned density, both weighted 1/(2N area). Cells: [2k] integral, [2k + 1] density.
inline Accumulators accumulate_density_identity(const EnsembleParams& p, const BinGrid& grid, const McOptions& opt) {
  detail::require_full_matrix_route(p);
  const int m = 2 * p.n;
  const double w = 1.0 / (m * grid.bin_area());
  return run_sharded(2 * grid.size(), opt, [&](unsigned shard, std::uint64_t n, Accumulators& acc) {
    RngStream rng(opt.seed, shard);
    std::vector<std::pair<std::size_t, cplx>> hits;
    for (std::uint64_t k = 0; k < n; ++k) {
      auto [g, s] = detail::draw_spectrum(p, rng, acc);
      const OverlapMatrix o = overlap_matrix(s);
      for (int l = 0; l < m; ++l) {
        const auto c = grid.locate(s.eigenvalue(l));
        if (!c) continue;
        cplx col{};
        for (int j = 0; j < m; ++j) col += o(j, l);
        hits.emplace_back(2 * *c, w * col);
        hits.emplace_back(2 * *c + 1, cplx(w, 0.0));
      }
      acc.commit(hits);
    }
  });
}

}  // namespace ginse
