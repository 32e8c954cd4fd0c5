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
#include <complex>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "ginse/common.hpp"
#include "ginse/errors.hpp"

namespace ginse {

using CMatrix = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic>;
using CVector = Eigen::Matrix<cplx, Eigen::Dynamic, 1>;

struct InducedGinibre {};

struct EllipticGinibre {
  double tau = 0.0;
};

using Potential = std::variant<InducedGinibre, EllipticGinibre>;

struct EnsembleParams {
  int n = 1;
  double alpha = 0.0;
  double sigma_sq = 1.0;
  Potential potential = InducedGinibre{};

  bool is_induced() const { return std::holds_alternative<InducedGinibre>(potential); }

  void validate() const {
    if (n < 1) throw InvalidParams("n must be >= 1");
    if (!(alpha > -1.0)) throw InvalidParams("alpha must be > -1");
    if (!(sigma_sq > 0.0) || !std::isfinite(sigma_sq)) throw InvalidParams("sigma_sq must be > 0");
    if (auto* e = std::get_if<EllipticGinibre>(&potential)) {
      if (!(e->tau >= 0.0 && e->tau < 1.0)) throw InvalidParams("tau must lie in [0, 1)");
    }
  }

  void require_induced(const char* what) const {
    if (!is_induced()) throw InvalidParams(std::string(what) + " requires the induced Ginibre potential");
  }

  static EnsembleParams induced(int n, double alpha = 0.0, double sigma_sq = 1.0) {
    EnsembleParams p{n, alpha, sigma_sq, InducedGinibre{}};
    p.validate();
    return p;
  }

  static EnsembleParams elliptic(int n, double tau, double sigma_sq = 1.0) {
    EnsembleParams p{n, 0.0, sigma_sq, EllipticGinibre{tau}};
    p.validate();
    return p;
  }
};

// One quaternion q = a + b j, embedded as [[a, b], [-conj(b), conj(a)]].
struct Quaternion {
  cplx a{};
  cplx b{};
};

// Block-diagonal second Pauli matrix acting on the interleaved embedding.
inline CMatrix pauli_block(int n) {
  CMatrix t = CMatrix::Zero(2 * n, 2 * n);
  const cplx i(0.0, 1.0);
  for (int k = 0; k < n; ++k) {
    t(2 * k, 2 * k + 1) = -i;
    t(2 * k + 1, 2 * k) = i;
  }
  return t;
}

// Antiunitary partner map v -> tau2 conj(v); commutes with every quaternion matrix.
inline CVector kramers_partner(const CVector& v) {
  const cplx i(0.0, 1.0);
  CVector w(v.size());
  for (Eigen::Index k = 0; k + 1 < v.size(); k += 2) {
    w(k) = -i * std::conj(v(k + 1));
    w(k + 1) = i * std::conj(v(k));
  }
  return w;
}

class QuaternionMatrix {
 public:
  QuaternionMatrix() = default;

  explicit QuaternionMatrix(int n) : n_(n), m_(CMatrix::Zero(2 * n, 2 * n)) {}

  // Validates the block structure to the given absolute tolerance.
  explicit QuaternionMatrix(CMatrix m, double tol = 1e-12) : m_(std::move(m)) {
    if (m_.rows() != m_.cols() || m_.rows() % 2 != 0 || m_.rows() == 0)
      throw InvalidParams("quaternion embedding must be a nonempty 2N x 2N matrix");
    n_ = static_cast<int>(m_.rows() / 2);
    if (!is_quaternion_real(m_, tol)) throw InvalidParams("matrix violates the quaternion block structure");
  }

  int dim_pairs() const { return n_; }
  const CMatrix& embedding() const { return m_; }

  Quaternion block(int i, int j) const { return {m_(2 * i, 2 * j), m_(2 * i, 2 * j + 1)}; }

  void set_block(int i, int j, Quaternion q) {
    m_(2 * i, 2 * j) = q.a;
    m_(2 * i, 2 * j + 1) = q.b;
    m_(2 * i + 1, 2 * j) = -std::conj(q.b);
    m_(2 * i + 1, 2 * j + 1) = std::conj(q.a);
  }

  static bool is_quaternion_real(const CMatrix& m, double tol = 1e-12) {
    const auto n = m.rows() / 2;
    const CMatrix t = pauli_block(static_cast<int>(n));
    const CMatrix s = t * m.conjugate() * t;
    return (s - m).cwiseAbs().maxCoeff() <= tol * std::max(1.0, m.cwiseAbs().maxCoeff());
  }

 private:
  int n_ = 0;
  CMatrix m_;
};

// Strictly upper triangular quaternion matrix, stored by pair blocks (i < j).
class UpperTriangularT {
 public:
  UpperTriangularT() = default;
  explicit UpperTriangularT(int n) : n_(n), blocks_(static_cast<std::size_t>(n) * n) {}

  int dim_pairs() const { return n_; }
  std::size_t block_count() const { return n_ < 2 ? 0 : static_cast<std::size_t>(n_) * (n_ - 1) / 2; }

  const Quaternion& block(int i, int j) const { return blocks_[static_cast<std::size_t>(i) * n_ + j]; }
  void set_block(int i, int j, Quaternion q) {
    if (!(0 <= i && i < j && j < n_)) throw InvalidParams("T blocks are strictly upper triangular");
    blocks_[static_cast<std::size_t>(i) * n_ + j] = q;
  }

  // Entries in the interleaved 2N index space; p_bar / q_bar select the barred row / column.
  cplx entry(int p, bool p_bar, int q, bool q_bar) const {
    if (p >= q) return {};
    const Quaternion& t = block(p, q);
    if (!p_bar) return q_bar ? t.b : t.a;
    return q_bar ? std::conj(t.a) : -std::conj(t.b);
  }

  CMatrix embedding() const {
    CMatrix m = CMatrix::Zero(2 * n_, 2 * n_);
    for (int i = 0; i < n_; ++i)
      for (int j = i + 1; j < n_; ++j) {
        const Quaternion& q = block(i, j);
        m(2 * i, 2 * j) = q.a;
        m(2 * i, 2 * j + 1) = q.b;
        m(2 * i + 1, 2 * j) = -std::conj(q.b);
        m(2 * i + 1, 2 * j + 1) = std::conj(q.a);
      }
    return m;
  }

 private:
  int n_ = 0;
  std::vector<Quaternion> blocks_;
};

struct EigenvalueConfig {
  std::vector<cplx> points;

  EigenvalueConfig() = default;
  explicit EigenvalueConfig(std::vector<cplx> z) : points(std::move(z)) { validate(); }

  int size() const { return static_cast<int>(points.size()); }

  void validate(double tol = 1e-12) const {
    double scale = 0.0;
    for (const cplx& z : points) scale = std::max(scale, std::abs(z));
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (!(points[i].imag() > 0.0)) throw InvalidParams("eigenvalue representatives must lie in the upper half-plane");
      for (std::size_t j = i + 1; j < points.size(); ++j)
        if (std::abs(points[i] - points[j]) <= tol * scale) throw InvalidParams("eigenvalue representatives must be distinct");
    }
  }
};

// Reproducible random stream keyed by (seed, stream_id).
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id = 0) : seed_(seed), stream_id_(stream_id) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream_id), static_cast<std::uint32_t>(stream_id >> 32),
                      0x9e3779b9u};
    engine_.seed(seq);
  }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }
  std::mt19937_64& engine() { return engine_; }

  double normal() { return normal_(engine_); }
  double uniform() { return uniform_(engine_); }

  // Centered complex Gaussian with E|w|^2 = variance.
  cplx complex_normal(double variance) {
    const double s = std::sqrt(variance / 2.0);
    const double re = normal();
    const double im = normal();
    return {s * re, s * im};
  }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

namespace detail {

inline QuaternionMatrix sample_plain_ginse(int n, double sigma_sq, RngStream& rng) {
  QuaternionMatrix g(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const cplx a = rng.complex_normal(sigma_sq / 2.0);
      const cplx b = rng.complex_normal(sigma_sq / 2.0);
      g.set_block(i, j, {a, b});
    }
  return g;
}

}  // namespace detail

// Full quaternionic Ginibre draw; E|a|^2 = E|b|^2 = sigma^2/2 per independent complex entry.
inline QuaternionMatrix sample_ginse(const EnsembleParams& params, RngStream& rng) {
  params.validate();
  if (params.is_induced()) {
    if (params.alpha != 0.0)
      throw InvalidParams("full-matrix sampling supports alpha = 0 only; use the jpdf sampler for alpha != 0");
    return detail::sample_plain_ginse(params.n, params.sigma_sq, rng);
  }
  // Elliptic: G = sqrt((1+tau)/2) H + sqrt((1-tau)/2) A with H, A quaternion Hermitian / anti-Hermitian.
  const double tau = std::get<EllipticGinibre>(params.potential).tau;
  const CMatrix x = detail::sample_plain_ginse(params.n, params.sigma_sq, rng).embedding();
  const CMatrix y = detail::sample_plain_ginse(params.n, params.sigma_sq, rng).embedding();
  const CMatrix h = (x + x.adjoint()) / std::sqrt(2.0);
  const CMatrix a = (y - y.adjoint()) / std::sqrt(2.0);
  CMatrix g = std::sqrt((1.0 + tau) / 2.0) * h + std::sqrt((1.0 - tau) / 2.0) * a;
  return QuaternionMatrix(std::move(g), 1e-10);
}

inline UpperTriangularT sample_t(const EnsembleParams& params, RngStream& rng) {
  params.validate();
  UpperTriangularT t(params.n);
  for (int i = 0; i < params.n; ++i)
    for (int j = i + 1; j < params.n; ++j) {
      const cplx a = rng.complex_normal(params.sigma_sq / 2.0);
      const cplx b = rng.complex_normal(params.sigma_sq / 2.0);
      t.set_block(i, j, {a, b});
    }
  return t;
}

// ---- jpdf Metropolis sampler --------------------------------------------

struct MetropolisConfig {
  std::optional<double> step;        // default 0.3 sigma / sqrt(N)
  long burn_in_sweeps = 10000;
  std::optional<long> thin_sweeps;   // default N
  std::size_t samples = 1000;
};

struct MetropolisRun {
  std::vector<EigenvalueConfig> samples;
  double acceptance_rate = 0.0;
  bool acceptance_ok = true;
  std::string warning;
};

// Unnormalized log jpdf on the upper half-plane.
inline double log_jpdf(const std::vector<cplx>& z, double alpha, double sigma_sq) {
  double s = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    for (std::size_t j = i + 1; j < z.size(); ++j)
      s += std::log(std::norm(z[i] - z[j])) + std::log(std::norm(z[i] - std::conj(z[j])));
    s += std::log(4.0 * z[i].imag() * z[i].imag()) + alpha * std::log(std::norm(z[i])) -
         2.0 * std::norm(z[i]) / sigma_sq;
  }
  return s;
}

namespace detail {

inline double site_log_weight(const std::vector<cplx>& z, std::size_t i, cplx w, double alpha, double sigma_sq) {
  double s = std::log(4.0 * w.imag() * w.imag()) + alpha * std::log(std::norm(w)) - 2.0 * std::norm(w) / sigma_sq;
  for (std::size_t j = 0; j < z.size(); ++j) {
    if (j == i) continue;
    s += std::log(std::norm(w - z[j])) + std::log(std::norm(w - std::conj(z[j])));
  }
  return s;
}

}  // namespace detail

class MetropolisChain {
 public:
  MetropolisChain(const EnsembleParams& params, const MetropolisConfig& cfg, RngStream& rng)
      : p_(params), rng_(rng) {
    p_.validate();
    p_.require_induced("jpdf sampling");
    const double sigma = std::sqrt(p_.sigma_sq);
    step_ = cfg.step.value_or(0.3 * sigma / std::sqrt(static_cast<double>(p_.n)));
    if (!(step_ > 0.0)) throw InvalidParams("Metropolis step must be > 0");
    z_.resize(p_.n);
    for (auto& w : z_) {
      const cplx g = rng_.complex_normal(p_.sigma_sq * p_.n / 2.0);
      w = {g.real(), std::abs(g.imag()) + 1e-3 * sigma};
    }
  }

  void sweep() {
    for (std::size_t i = 0; i < z_.size(); ++i) {
      const cplx d = rng_.complex_normal(2.0 * step_ * step_);
      cplx w = z_[i] + d;
      w = {w.real(), std::abs(w.imag())};
      ++proposed_;
      if (w.imag() <= 0.0) continue;
      const double delta = detail::site_log_weight(z_, i, w, p_.alpha, p_.sigma_sq) -
                           detail::site_log_weight(z_, i, z_[i], p_.alpha, p_.sigma_sq);
      if (delta >= 0.0 || rng_.uniform() < std::exp(delta)) {
        z_[i] = w;
        ++accepted_;
      }
    }
  }

  const std::vector<cplx>& state() const { return z_; }
  double acceptance_rate() const { return proposed_ ? static_cast<double>(accepted_) / proposed_ : 0.0; }
  void reset_counters() { accepted_ = proposed_ = 0; }

 private:
  EnsembleParams p_;
  RngStream& rng_;
  double step_;
  std::vector<cplx> z_;
  std::uint64_t accepted_ = 0;
  std::uint64_t proposed_ = 0;
};

// Calls sink(z) for every thinned sample; returns the post burn-in acceptance rate.
template <class Sink>
double run_metropolis(const EnsembleParams& params, const MetropolisConfig& cfg, RngStream& rng, Sink&& sink) {
  MetropolisChain chain(params, cfg, rng);
  for (long s = 0; s < cfg.burn_in_sweeps; ++s) chain.sweep();
  chain.reset_counters();
  const long thin = cfg.thin_sweeps.value_or(params.n);
  if (thin < 1) throw InvalidParams("thinning stride must be >= 1");
  for (std::size_t k = 0; k < cfg.samples; ++k) {
    for (long s = 0; s < thin; ++s) chain.sweep();
    sink(chain.state());
  }
  return chain.acceptance_rate();
}

inline MetropolisRun sample_jpdf_metropolis(const EnsembleParams& params, const MetropolisConfig& cfg, RngStream& rng) {
  MetropolisRun run;
  run.samples.reserve(cfg.samples);
  run.acceptance_rate = run_metropolis(params, cfg, rng, [&](const std::vector<cplx>& z) {
    EigenvalueConfig c;
    c.points = z;
    run.samples.push_back(std::move(c));
  });
  run.acceptance_ok = run.acceptance_rate >= 0.1 && run.acceptance_rate <= 0.9;
  if (!run.acceptance_ok) run.warning = "acceptance rate " + std::to_string(run.acceptance_rate) + " outside [0.1, 0.9]";
  return run;
}

}  // namespace ginse
