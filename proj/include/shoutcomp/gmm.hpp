#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include "shoutcomp/types.hpp"

namespace shoutcomp {

struct GaussianComponent {
  double weight = 1.0;
  Vec mean;
  Vec variance;
};

struct DiagonalGmm {
  std::vector<GaussianComponent> components;
  std::size_t dim = 0;

  std::size_t size() const { return components.size(); }
};

namespace detail {

inline void check_gmm_input(const DiagonalGmm& gmm, const Vec& z) {
  if (gmm.components.empty()) throw ValidationError("gmm has no components");
  if (z.size() != gmm.dim)
    throw ValidationError("gmm dimension mismatch: vector has " +
                          std::to_string(z.size()) + " values, model expects " +
                          std::to_string(gmm.dim));
}

// log w + log N(z | mean, diag(variance)) for one component.
inline double component_log_joint(const GaussianComponent& c, const Vec& z) {
  constexpr double log_2pi = 1.8378770664093453;
  double acc = std::log(c.weight);
  for (std::size_t d = 0; d < z.size(); ++d) {
    const double diff = z[d] - c.mean[d];
    acc -= 0.5 * (log_2pi + std::log(c.variance[d]) + diff * diff / c.variance[d]);
  }
  return acc;
}

inline double log_sum_exp(const std::vector<double>& xs) {
  double m = -std::numeric_limits<double>::infinity();
  for (double x : xs) m = std::max(m, x);
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double x : xs) s += std::exp(x - m);
  return m + std::log(s);
}

}  // namespace detail

inline double log_density(const DiagonalGmm& gmm, const Vec& z) {
  detail::check_gmm_input(gmm, z);
  std::vector<double> joints(gmm.size());
  for (std::size_t k = 0; k < gmm.size(); ++k)
    joints[k] = detail::component_log_joint(gmm.components[k], z);
  return detail::log_sum_exp(joints);
}

/// p(s|z) for every component s, normalized to sum to 1.
inline std::vector<double> posteriors(const DiagonalGmm& gmm, const Vec& z) {
  detail::check_gmm_input(gmm, z);
  std::vector<double> joints(gmm.size());
  for (std::size_t k = 0; k < gmm.size(); ++k)
    joints[k] = detail::component_log_joint(gmm.components[k], z);
  const double lse = detail::log_sum_exp(joints);
  std::vector<double> post(gmm.size());
  for (std::size_t k = 0; k < gmm.size(); ++k) post[k] = std::exp(joints[k] - lse);
  return post;
}

struct EmConfig {
  std::size_t max_iterations = 200;
  double relative_tolerance = 1e-6;
  double variance_floor_scale = 1e-6;   // times global per-dimension variance
  double variance_floor_abs = 1e-10;
  double reseed_mass = 1e-8;            // fraction of N below which a component is re-seeded
};

struct EmTrace {
  /// Total log-likelihood at the start of each iteration.
  std::vector<double> log_likelihood;
  /// Iterations (indices into log_likelihood) whose M-step was replaced by a
  /// re-seed; the likelihood may drop across the following step.
  std::vector<std::size_t> reseeded_iterations;
};

struct EmResult {
  DiagonalGmm gmm;
  EmTrace trace;
};

/// Diagonal-covariance EM with farthest-point seeding. Deterministic for a
/// fixed (data, k, config, seed) tuple.
inline EmResult fit_em(const std::vector<Vec>& data, std::size_t k,
                       const EmConfig& config = {}, std::uint64_t seed = 0) {
  if (data.empty()) throw ValidationError("fit_em: no training vectors");
  if (k == 0) throw ValidationError("fit_em: k must be at least 1");
  if (k > data.size())
    throw ValidationError("fit_em: k=" + std::to_string(k) + " exceeds " +
                          std::to_string(data.size()) + " training vectors");
  const std::size_t n = data.size();
  const std::size_t dim = data.front().size();
  if (dim == 0) throw ValidationError("fit_em: zero-dimensional vectors");
  for (const auto& v : data)
    if (v.size() != dim) throw ValidationError("fit_em: mixed vector dimensions");

  // Global per-dimension statistics drive the initial variances and the floor.
  Vec global_mean(dim, 0.0), global_var(dim, 0.0);
  for (const auto& v : data)
    for (std::size_t d = 0; d < dim; ++d) global_mean[d] += v[d];
  for (std::size_t d = 0; d < dim; ++d) global_mean[d] /= double(n);
  for (const auto& v : data)
    for (std::size_t d = 0; d < dim; ++d) {
      const double diff = v[d] - global_mean[d];
      global_var[d] += diff * diff;
    }
  Vec floor(dim);
  for (std::size_t d = 0; d < dim; ++d) {
    global_var[d] /= double(n);
    floor[d] = std::max(config.variance_floor_scale * global_var[d],
                        config.variance_floor_abs);
    global_var[d] = std::max(global_var[d], floor[d]);
  }

  // Farthest-point seeding: random first center, then repeatedly the point
  // farthest from everything chosen so far.
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> centers;
  centers.push_back(std::size_t(rng() % n));
  std::vector<double> min_dist(n, std::numeric_limits<double>::infinity());
  while (centers.size() < k) {
    const Vec& c = data[centers.back()];
    for (std::size_t i = 0; i < n; ++i) {
      double d2 = 0.0;
      for (std::size_t d = 0; d < dim; ++d) {
        const double diff = data[i][d] - c[d];
        d2 += diff * diff;
      }
      min_dist[i] = std::min(min_dist[i], d2);
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i < n; ++i)
      if (min_dist[i] > min_dist[best]) best = i;
    centers.push_back(best);
  }

  DiagonalGmm gmm;
  gmm.dim = dim;
  gmm.components.resize(k);
  for (std::size_t c = 0; c < k; ++c) {
    gmm.components[c].weight = 1.0 / double(k);
    gmm.components[c].mean = data[centers[c]];
    gmm.components[c].variance = global_var;
  }

  EmTrace trace;
  std::vector<std::vector<double>> resp(k, std::vector<double>(n));
  std::vector<double> joints(k);
  std::vector<double> point_ll(n);
  std::vector<double> log_const(k);
  std::vector<Vec> half_inv_var(k, Vec(dim));

  for (std::size_t iter = 0; iter < config.max_iterations; ++iter) {
    // E-step, with per-component constants hoisted out of the point loop.
    constexpr double log_2pi = 1.8378770664093453;
    for (std::size_t c = 0; c < k; ++c) {
      const auto& comp = gmm.components[c];
      double acc = std::log(comp.weight);
      for (std::size_t d = 0; d < dim; ++d) {
        acc -= 0.5 * (log_2pi + std::log(comp.variance[d]));
        half_inv_var[c][d] = 0.5 / comp.variance[d];
      }
      log_const[c] = acc;
    }
    double total_ll = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t c = 0; c < k; ++c) {
        const auto& comp = gmm.components[c];
        double quad = 0.0;
        for (std::size_t d = 0; d < dim; ++d) {
          const double diff = data[i][d] - comp.mean[d];
          quad += half_inv_var[c][d] * diff * diff;
        }
        joints[c] = log_const[c] - quad;
      }
      const double lse = detail::log_sum_exp(joints);
      point_ll[i] = lse;
      total_ll += lse;
      for (std::size_t c = 0; c < k; ++c) resp[c][i] = std::exp(joints[c] - lse);
    }
    trace.log_likelihood.push_back(total_ll);

    std::vector<double> mass(k, 0.0);
    for (std::size_t c = 0; c < k; ++c)
      for (std::size_t i = 0; i < n; ++i) mass[c] += resp[c][i];

    // A starved component gets re-seeded at the worst-covered point and the
    // M-step is skipped so the next E-step works from fresh responsibilities.
    std::size_t starved = k;
    for (std::size_t c = 0; c < k; ++c)
      if (mass[c] < config.reseed_mass * double(n)) {
        starved = c;
        break;
      }
    if (starved < k) {
      std::size_t worst = 0;
      for (std::size_t i = 1; i < n; ++i)
        if (point_ll[i] < point_ll[worst]) worst = i;
      gmm.components[starved].mean = data[worst];
      gmm.components[starved].variance = global_var;
      gmm.components[starved].weight = 1.0 / double(k);
      double wsum = 0.0;
      for (const auto& c : gmm.components) wsum += c.weight;
      for (auto& c : gmm.components) c.weight /= wsum;
      trace.reseeded_iterations.push_back(trace.log_likelihood.size() - 1);
      continue;
    }

    // M-step.
    for (std::size_t c = 0; c < k; ++c) {
      auto& comp = gmm.components[c];
      comp.weight = mass[c] / double(n);
      for (std::size_t d = 0; d < dim; ++d) comp.mean[d] = 0.0;
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t d = 0; d < dim; ++d) comp.mean[d] += resp[c][i] * data[i][d];
      for (std::size_t d = 0; d < dim; ++d) comp.mean[d] /= mass[c];
      for (std::size_t d = 0; d < dim; ++d) comp.variance[d] = 0.0;
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t d = 0; d < dim; ++d) {
          const double diff = data[i][d] - comp.mean[d];
          comp.variance[d] += resp[c][i] * diff * diff;
        }
      for (std::size_t d = 0; d < dim; ++d)
        comp.variance[d] = std::max(comp.variance[d] / mass[c], floor[d]);
    }

    const std::size_t t = trace.log_likelihood.size();
    if (t >= 2) {
      const bool after_reseed =
          !trace.reseeded_iterations.empty() &&
          trace.reseeded_iterations.back() + 1 >= t - 1;
      const double gain =
          trace.log_likelihood[t - 1] - trace.log_likelihood[t - 2];
      if (!after_reseed &&
          gain < config.relative_tolerance * (1.0 + std::abs(trace.log_likelihood[t - 1])))
        break;
    }
  }

  return {std::move(gmm), std::move(trace)};
}

}  // namespace shoutcomp
