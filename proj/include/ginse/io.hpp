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

#include <chrono>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ginse/estimators.hpp"

namespace ginse {

struct EstimateRow {
  std::string quantity;
  cplx x1;
  std::optional<cplx> x2;
  cplx value;
  double std_error = 0.0;
  std::uint64_t count = 0;
};

struct EstimateTable {
  std::vector<EstimateRow> rows;
  nlohmann::json metadata = nlohmann::json::object();

  static constexpr const char* kCsvHeader = "# ginse-overlaps v1";
  static constexpr const char* kCsvColumns = "quantity,re_x1,im_x1,re_x2,im_x2,value_re,value_im,stderr,count";

  void append(const EstimateTable& o) { rows.insert(rows.end(), o.rows.begin(), o.rows.end()); }

  void write_csv(std::ostream& os) const {
    os << kCsvHeader << '\n' << kCsvColumns << '\n';
    os << std::setprecision(17);
    for (const auto& r : rows) {
      os << r.quantity << ',' << r.x1.real() << ',' << r.x1.imag() << ',';
      if (r.x2)
        os << r.x2->real() << ',' << r.x2->imag() << ',';
      else
        os << ",,";
      os << r.value.real() << ',' << r.value.imag() << ',' << r.std_error << ',' << r.count << '\n';
    }
  }

  nlohmann::json to_json() const {
    nlohmann::json rs = nlohmann::json::array();
    for (const auto& r : rows) {
      nlohmann::json j{{"quantity", r.quantity},
                       {"x1", {r.x1.real(), r.x1.imag()}},
                       {"value", {r.value.real(), r.value.imag()}},
                       {"stderr", r.std_error},
                       {"count", r.count}};
      j["x2"] = r.x2 ? nlohmann::json{r.x2->real(), r.x2->imag()} : nlohmann::json(nullptr);
      rs.push_back(std::move(j));
    }
    return {{"schema", "ginse-overlaps v1"}, {"metadata", metadata}, {"rows", rs}};
  }
};

inline nlohmann::json params_json(const EnsembleParams& p) {
  nlohmann::json j{{"n", p.n}, {"alpha", p.alpha}, {"sigma_sq", p.sigma_sq}};
  if (const auto* e = std::get_if<EllipticGinibre>(&p.potential))
    j["potential"] = {{"kind", "elliptic"}, {"tau", e->tau}};
  else
    j["potential"] = {{"kind", "induced"}};
  return j;
}

inline const char* route_name(Route r) {
  switch (r) {
    case Route::DirectEigen: return "direct";
    case Route::SchurRecursion: return "schur";
    case Route::JpdfTimesTavg: return "jpdf";
  }
  return "?";
}

inline EstimateTable table_from(const Accumulators& acc, const BinGrid& grid, const std::string& quantity) {
  EstimateTable t;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const BinEstimate e = acc.estimate(k);
    t.rows.push_back({quantity, grid.center(k), std::nullopt, e.mean, e.std_error, e.count});
  }
  return t;
}

inline EstimateTable table_from(const Accumulators& acc, const PairBinGrid& grid, const std::string& quantity) {
  EstimateTable t;
  for (std::size_t a = 0; a < grid.first.size(); ++a)
    for (std::size_t b = 0; b < grid.second.size(); ++b) {
      const BinEstimate e = acc.estimate(grid.cell(a, b));
      t.rows.push_back({quantity, grid.first.center(a), grid.second.center(b), e.mean, e.std_error, e.count});
    }
  return t;
}

namespace detail {

inline nlohmann::json run_metadata(const EnsembleParams& p, const McOptions& opt, const Accumulators& acc, double seconds) {
  return {{"params", params_json(p)},        {"seed", opt.seed},          {"samples", acc.samples()},
          {"rejected_draws", acc.rejected()}, {"shards", opt.shards},      {"threads", opt.threads},
          {"wall_time_s", seconds}};
}

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace detail

inline EstimateTable estimate_diag_mc(const EnsembleParams& p, const BinGrid& grid, Route route, const McOptions& opt) {
  const auto t0 = std::chrono::steady_clock::now();
  const Accumulators acc = accumulate_diag_mc(p, grid, route, opt);
  EstimateTable t = table_from(acc, grid, "mc_diag");
  t.metadata = detail::run_metadata(p, opt, acc, detail::seconds_since(t0));
  t.metadata["route"] = route_name(route);
  return t;
}

inline EstimateTable estimate_offdiag_mc(const EnsembleParams& p, const PairBinGrid& grid, OffdiagKind kind,
                                         const McOptions& opt) {
  const auto t0 = std::chrono::steady_clock::now();
  const Accumulators acc = accumulate_offdiag_mc(p, grid, kind, opt);
  EstimateTable t = table_from(acc, grid, kind == OffdiagKind::Plain ? "mc_offdiag_plain" : "mc_offdiag_barred");
  t.metadata = detail::run_metadata(p, opt, acc, detail::seconds_since(t0));
  t.metadata["route"] = "direct";
  return t;
}

}  // namespace ginse
