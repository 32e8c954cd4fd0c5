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

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "ginse/ginse.hpp"

namespace {

using ginse::cplx;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

struct Settings {
  int n = 4;
  double alpha = 0.0;
  double sigma_sq = 1.0;
  bool bulk_scaling = false;
  std::uint64_t samples = 10000;
  std::uint64_t seed = 1;
  bool seed_set = false;
  unsigned threads = 1;
  std::string out;
  std::string format = "csv";
  std::string route = "direct";
  std::string kind = "plain";
  std::string grid;
  std::vector<std::string> x, x1, x2;
  std::vector<std::string> suites;
  std::vector<int> criteria;
};

// Applies the JSON config keys that mirror the command-line flags.
void apply_config(Settings& s, const json& j) {
  if (!j.is_object()) throw ginse::ConfigError("config root must be a JSON object");
  static const std::vector<std::string> known{"n",     "alpha", "sigma_sq", "bulk_scaling", "samples", "seed",
                                              "threads", "out",  "format",   "route",        "kind",    "grid",
                                              "x",     "x1",    "x2",       "suites",       "criteria"};
  for (const auto& [key, _] : j.items())
    if (std::find(known.begin(), known.end(), key) == known.end()) throw ginse::ConfigError("unknown config key '" + key + "'");
  try {
    if (j.contains("n")) s.n = j["n"].get<int>();
    if (j.contains("alpha")) s.alpha = j["alpha"].get<double>();
    if (j.contains("sigma_sq")) s.sigma_sq = j["sigma_sq"].get<double>();
    if (j.contains("bulk_scaling")) s.bulk_scaling = j["bulk_scaling"].get<bool>();
    if (j.contains("samples")) s.samples = j["samples"].get<std::uint64_t>();
    if (j.contains("seed")) {
      s.seed = j["seed"].get<std::uint64_t>();
      s.seed_set = true;
    }
    if (j.contains("threads")) s.threads = j["threads"].get<unsigned>();
    if (j.contains("out")) s.out = j["out"].get<std::string>();
    if (j.contains("format")) s.format = j["format"].get<std::string>();
    if (j.contains("route")) s.route = j["route"].get<std::string>();
    if (j.contains("kind")) s.kind = j["kind"].get<std::string>();
    if (j.contains("grid")) s.grid = j["grid"].get<std::string>();
    if (j.contains("x")) s.x = j["x"].get<std::vector<std::string>>();
    if (j.contains("x1")) s.x1 = j["x1"].get<std::vector<std::string>>();
    if (j.contains("x2")) s.x2 = j["x2"].get<std::vector<std::string>>();
    if (j.contains("suites")) s.suites = j["suites"].get<std::vector<std::string>>();
    if (j.contains("criteria")) s.criteria = j["criteria"].get<std::vector<int>>();
  } catch (const json::exception& e) {
    throw ginse::ConfigError(std::string("bad config value: ") + e.what());
  }
}

std::vector<double> split_numbers(const std::string& text, std::size_t expected, const char* what) {
  std::vector<double> v;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ginse::ConfigError(std::string("cannot parse ") + what + " '" + text + "'");
    }
  }
  if (v.size() != expected) throw ginse::ConfigError(std::string("cannot parse ") + what + " '" + text + "'");
  return v;
}

cplx parse_point(const std::string& text) {
  const auto v = split_numbers(text, 2, "point (expected re,im)");
  return {v[0], v[1]};
}

std::vector<cplx> parse_points(const std::vector<std::string>& texts) {
  std::vector<cplx> pts;
  for (const auto& t : texts) pts.push_back(parse_point(t));
  return pts;
}

ginse::BinGrid parse_grid(const std::string& text, const ginse::BinGrid& fallback) {
  if (text.empty()) return fallback;
  const auto v = split_numbers(text, 6, "grid (expected re_min,re_max,im_min,im_max,nx,ny)");
  return ginse::BinGrid({v[0], v[1], v[2], v[3]}, static_cast<int>(v[4]), static_cast<int>(v[5]));
}

ginse::EnsembleParams params_of(const Settings& s) {
  ginse::EnsembleParams p{s.n, s.alpha, s.sigma_sq, ginse::InducedGinibre{}};
  if (s.bulk_scaling) p.sigma_sq = 1.0 / s.n;
  try {
    p.validate();
  } catch (const ginse::InvalidParams& e) {
    throw ginse::ConfigError(e.what());
  }
  return p;
}

ginse::McOptions mc_options(const Settings& s) {
  ginse::McOptions o;
  o.samples = s.samples;
  o.seed = s.seed;
  o.threads = std::max(1u, s.threads);
  return o;
}

ginse::HKind kind_of(const Settings& s) {
  if (s.kind == "plain") return ginse::HKind::Plain12;
  if (s.kind == "barred") return ginse::HKind::Barred12;
  throw ginse::ConfigError("kind must be plain or barred");
}

ginse::Route route_of(const Settings& s) {
  if (s.route == "direct") return ginse::Route::DirectEigen;
  if (s.route == "schur") return ginse::Route::SchurRecursion;
  if (s.route == "jpdf") return ginse::Route::JpdfTimesTavg;
  throw ginse::ConfigError("route must be direct, schur or jpdf");
}

void emit_text(const Settings& s, const std::string& text) {
  if (s.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(s.out);
  if (!f) throw ginse::ConfigError("cannot open output file '" + s.out + "'");
  f << text;
}

void emit(const Settings& s, const ginse::EstimateTable& t) {
  std::ostringstream os;
  if (s.format == "json")
    os << t.to_json().dump(2) << '\n';
  else
    t.write_csv(os);
  emit_text(s, os.str());
}

// Points for one-point evaluations: explicit --x values, otherwise the bin centers of --grid.
std::vector<cplx> one_point_targets(const Settings& s, const ginse::EnsembleParams& p) {
  if (!s.x.empty()) return parse_points(s.x);
  const ginse::BinGrid g = parse_grid(s.grid, ginse::BinGrid::standard(p));
  std::vector<cplx> pts;
  for (std::size_t k = 0; k < g.size(); ++k) pts.push_back(g.center(k));
  return pts;
}

ginse::EstimateTable base_table(const ginse::EnsembleParams& p) {
  ginse::EstimateTable t;
  t.metadata = {{"params", ginse::params_json(p)}};
  return t;
}

int cmd_exact_diag(const Settings& s, bool density) {
  const auto p = params_of(s);
  ginse::EstimateTable t = base_table(p);
  for (cplx x : one_point_targets(s, p)) {
    const double v = density ? ginse::density_exact(x, p) : ginse::diag_overlap_exact(x, p);
    t.rows.push_back({density ? "exact_density" : "exact_diag", x, std::nullopt, v, 0.0, 0});
  }
  emit(s, t);
  return kExitOk;
}

int cmd_exact_offdiag(const Settings& s) {
  const auto p = params_of(s);
  const auto x1 = parse_points(s.x1), x2 = parse_points(s.x2);
  if (x1.empty() || x1.size() != x2.size()) throw ginse::ConfigError("exact-offdiag needs matching --x1 and --x2 lists");
  const ginse::HKind kind = kind_of(s);
  ginse::EstimateTable t = base_table(p);
  for (std::size_t k = 0; k < x1.size(); ++k)
    t.rows.push_back({kind == ginse::HKind::Plain12 ? "exact_offdiag_plain" : "exact_offdiag_barred", x1[k], x2[k],
                      ginse::offdiag_overlap_exact(x1[k], x2[k], p, kind), 0.0, 0});
  emit(s, t);
  return kExitOk;
}

int cmd_mc_diag(const Settings& s) {
  const auto p = params_of(s);
  const ginse::BinGrid g = parse_grid(s.grid, ginse::BinGrid::standard(p));
  emit(s, ginse::estimate_diag_mc(p, g, route_of(s), mc_options(s)));
  return kExitOk;
}

int cmd_mc_offdiag(const Settings& s) {
  const auto p = params_of(s);
  const double u = std::sqrt(p.sigma_sq * p.n);
  const ginse::BinGrid side = parse_grid(s.grid, ginse::BinGrid({-u, u, 0.0, u}, 8, 4));
  const ginse::OffdiagKind kind = kind_of(s) == ginse::HKind::Plain12 ? ginse::OffdiagKind::Plain : ginse::OffdiagKind::Barred;
  emit(s, ginse::estimate_offdiag_mc(p, {side, side}, kind, mc_options(s)));
  return kExitOk;
}

int cmd_asym(const Settings& s) {
  const auto p = params_of(s);
  ginse::EstimateTable t = base_table(p);
  for (cplx x : parse_points(s.x)) {
    const ginse::BulkPoint bp = ginse::make_bulk_point(x, p.n);
    t.rows.push_back({"circular_law", x, std::nullopt, ginse::circular_law(x), 0.0, 0});
    t.rows.push_back({"bulk_diag", x, std::nullopt, ginse::bulk_diag(x, p.n), 0.0, 0});
    t.rows.push_back({"bulk_margin", x, std::nullopt, bp.margin, 0.0, 0});
  }
  const auto x1 = parse_points(s.x1), x2 = parse_points(s.x2);
  if (x1.size() != x2.size()) throw ginse::ConfigError("asym needs matching --x1 and --x2 lists");
  for (std::size_t k = 0; k < x1.size(); ++k) {
    t.rows.push_back({"bulk_offdiag_plain", x1[k], x2[k], ginse::bulk_offdiag(x1[k], x2[k]), 0.0, 0});
    t.rows.push_back({"bulk_offdiag_barred", x1[k], x2[k], ginse::bulk_offdiag_barred(x1[k], x2[k]), 0.0, 0});
    t.rows.push_back({"factorized_density2", x1[k], x2[k], ginse::factorized_density2(x1[k], x2[k]), 0.0, 0});
  }
  if (t.rows.empty()) throw ginse::ConfigError("asym needs --x or --x1/--x2 points");
  emit(s, t);
  return kExitOk;
}

int cmd_origin(const Settings& s) {
  const auto p = params_of(s);
  ginse::EstimateTable t = base_table(p);
  t.rows.push_back({"origin_limit", 0.0, std::nullopt, ginse::origin_limit_ratio(p), 0.0, 0});
  t.rows.push_back({"origin_extrapolated", 0.0, std::nullopt, ginse::origin_extrapolated_ratio(p) / ginse::kPi, 0.0, 0});
  emit(s, t);
  return kExitOk;
}

int cmd_sample_check(const Settings& s) {
  const auto p = params_of(s);
  ginse::RngStream rng(s.seed, 0);
  const ginse::IdentityReport rep = ginse::identity_suite(p, s.samples, rng);
  ginse::EstimateTable t = base_table(p);
  t.metadata["samples"] = rep.samples;
  t.metadata["rejected_draws"] = rep.rejected;
  for (const auto& c : rep.checks) {
    t.rows.push_back({"identity_" + c.name, 0.0, std::nullopt, c.worst, c.tolerance, c.failed});
    std::cerr << (c.failed ? "[FAIL] " : "[PASS] ") << c.name << " worst " << c.worst << " tol " << c.tolerance << '\n';
  }
  t.rows.push_back({"identity_half_row_sum_info", 0.0, std::nullopt, rep.worst_half_row_sum, 0.0, 0});
  emit(s, t);
  return rep.all_passed() ? kExitOk : kExitFailure;
}

int cmd_validate(const Settings& s) {
  ginse::validate::Config cfg;
  if (s.seed_set) cfg.seed = s.seed;
  cfg.threads = std::max(1u, s.threads);
  std::vector<int> ids = s.criteria;
  for (const auto& name : s.suites) {
    const auto& all = ginse::validate::suites();
    auto it = all.find(name);
    if (it == all.end()) throw ginse::ConfigError("unknown suite '" + name + "'");
    ids.insert(ids.end(), it->second.begin(), it->second.end());
  }
  if (!ids.empty()) {
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    cfg.criteria = ids;
  }
  for (int id : cfg.criteria)
    if (id < 1 || id > 10) throw ginse::ConfigError("criteria are numbered 1-10");
  json report{{"results", json::array()}};
  bool ok = true;
  for (int id : cfg.criteria) {
    const auto r = ginse::validate::run_criterion(id, cfg);
    std::cerr << ginse::validate::summary_line(r) << '\n';
    ok = ok && r.passed;
    report["results"].push_back(r.to_json());
  }
  report["passed"] = ok;
  emit_text(s, report.dump(2) + "\n");
  return ok ? kExitOk : kExitFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Eigenvector overlap statistics for the quaternionic Ginibre ensemble"};
  app.require_subcommand(1);

  Settings cli;
  std::string config_path;
  struct Bound {
    CLI::Option* opt;
    std::function<void(Settings&)> apply;
  };
  std::vector<Bound> bound;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON config file; flags override its keys");
    auto bind = [&](CLI::Option* o, std::function<void(Settings&)> f) { bound.push_back({o, std::move(f)}); };
    bind(sub->add_option("--n", cli.n, "number of eigenvalue pairs N"), [&](Settings& s) { s.n = cli.n; });
    bind(sub->add_option("--alpha", cli.alpha, "zero-mode parameter"), [&](Settings& s) { s.alpha = cli.alpha; });
    bind(sub->add_option("--sigma-sq", cli.sigma_sq, "variance scale"), [&](Settings& s) { s.sigma_sq = cli.sigma_sq; });
    bind(sub->add_flag("--bulk-scaling", cli.bulk_scaling, "set sigma^2 = 1/N"), [&](Settings& s) { s.bulk_scaling = cli.bulk_scaling; });
    bind(sub->add_option("--samples", cli.samples, "Monte Carlo samples"), [&](Settings& s) { s.samples = cli.samples; });
    bind(sub->add_option("--seed", cli.seed, "random seed"), [&](Settings& s) {
      s.seed = cli.seed;
      s.seed_set = true;
    });
    bind(sub->add_option("--threads", cli.threads, "worker threads"), [&](Settings& s) { s.threads = cli.threads; });
    bind(sub->add_option("--out", cli.out, "output path (default stdout)"), [&](Settings& s) { s.out = cli.out; });
    bind(sub->add_option("--format", cli.format, "csv or json")->check(CLI::IsMember({"csv", "json"})),
         [&](Settings& s) { s.format = cli.format; });
    bind(sub->add_option("--grid", cli.grid, "re_min,re_max,im_min,im_max,nx,ny"), [&](Settings& s) { s.grid = cli.grid; });
    bind(sub->add_option("--x", cli.x, "evaluation point re,im (repeatable)"), [&](Settings& s) { s.x = cli.x; });
    bind(sub->add_option("--x1", cli.x1, "first point re,im (repeatable)"), [&](Settings& s) { s.x1 = cli.x1; });
    bind(sub->add_option("--x2", cli.x2, "second point re,im (repeatable)"), [&](Settings& s) { s.x2 = cli.x2; });
    bind(sub->add_option("--kind", cli.kind, "plain or barred"), [&](Settings& s) { s.kind = cli.kind; });
    bind(sub->add_option("--route", cli.route, "direct, schur or jpdf"), [&](Settings& s) { s.route = cli.route; });
    bind(sub->add_option("--suite", cli.suites, "validation suite filter (repeatable)"), [&](Settings& s) { s.suites = cli.suites; });
    bind(sub->add_option("--criterion", cli.criteria, "acceptance criterion id (repeatable)"),
         [&](Settings& s) { s.criteria = cli.criteria; });
  };

  using Handler = std::function<int(const Settings&)>;
  const std::vector<std::tuple<std::string, std::string, Handler>> commands{
      {"sample-check", "per-sample overlap identities on random draws", cmd_sample_check},
      {"exact-diag", "exact diagonal overlap O_N(x)", [](const Settings& s) { return cmd_exact_diag(s, false); }},
      {"exact-offdiag", "exact off-diagonal overlap O_N(x1, x2)", cmd_exact_offdiag},
      {"density", "exact one-point density", [](const Settings& s) { return cmd_exact_diag(s, true); }},
      {"mc-diag", "binned Monte Carlo diagonal overlap", cmd_mc_diag},
      {"mc-offdiag", "binned Monte Carlo off-diagonal overlap", cmd_mc_offdiag},
      {"asym", "large-N bulk formulas", cmd_asym},
      {"origin", "origin limit of the diagonal overlap", cmd_origin},
      {"validate", "run acceptance criteria", cmd_validate},
  };
  std::vector<std::pair<CLI::App*, Handler>> subs;
  for (const auto& [name, help, handler] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    add_common(sub);
    subs.emplace_back(sub, handler);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    Settings eff;
    if (!config_path.empty()) {
      std::ifstream f(config_path);
      if (!f) throw ginse::ConfigError("cannot read config '" + config_path + "'");
      json j;
      try {
        j = json::parse(f);
      } catch (const json::parse_error& e) {
        throw ginse::ConfigError(std::string("malformed config: ") + e.what());
      }
      apply_config(eff, j);
    }
    for (const auto& b : bound)
      if (b.opt->count() > 0) b.apply(eff);
    if (eff.format != "csv" && eff.format != "json") throw ginse::ConfigError("format must be csv or json");
    for (const auto& [sub, handler] : subs)
      if (sub->parsed()) return handler(eff);
  } catch (const ginse::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ginse::InvalidParams& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ginse::UnsupportedRoute& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}
