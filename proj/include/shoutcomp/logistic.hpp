#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "shoutcomp/types.hpp"

namespace shoutcomp {

struct LogisticModel {
  double intercept = 0.0;
  Vec weights;
};

inline double predict_logit(const LogisticModel& model, const Vec& z) {
  if (z.size() != model.weights.size())
    throw ValidationError("detector dimension mismatch: vector has " +
                          std::to_string(z.size()) + " values, model expects " +
                          std::to_string(model.weights.size()));
  double t = model.intercept;
  for (std::size_t d = 0; d < z.size(); ++d) t += model.weights[d] * z[d];
  return t;
}

inline double sigmoid(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

/// P(shouted | z) under the logistic model.
inline double predict_shouted_prob(const LogisticModel& model, const Vec& z) {
  return sigmoid(predict_logit(model, z));
}

/// Shouted only when P(shouted|z) strictly exceeds 0.5; a tie leaves the
/// embedding alone, so it maps to Normal.
inline Domain classify(const LogisticModel& model, const Vec& z) {
  return predict_logit(model, z) > 0.0 ? Domain::Shouted : Domain::Normal;
}

struct DetectorConfig {
  double l2 = 1e-4;  // on weights only, relative to the per-datum log-likelihood
  std::size_t max_iterations = 100;
  double gradient_tolerance = 1e-6;
};

namespace detail {

// Mean log-likelihood minus the ridge penalty, evaluated without forming
// probabilities (log(1+e^t) computed stably).
inline double logistic_objective(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                 const Eigen::VectorXd& beta, double l2) {
  const Eigen::VectorXd t = x * beta;
  double ll = 0.0;
  for (Eigen::Index i = 0; i < t.size(); ++i) {
    const double ti = t[i];
    const double log1pe = ti > 0.0 ? ti + std::log1p(std::exp(-ti))
                                   : std::log1p(std::exp(ti));
    ll += y[i] * ti - log1pe;
  }
  ll /= double(t.size());
  double pen = 0.0;
  for (Eigen::Index j = 1; j < beta.size(); ++j) pen += beta[j] * beta[j];
  return ll - 0.5 * l2 * pen;
}

}  // namespace detail

/// L2-penalized logistic regression (shouted = positive class) trained by
/// full-batch Newton ascent with backtracking. Deterministic.
inline LogisticModel train_detector(const std::vector<Vec>& shouted,
                                    const std::vector<Vec>& normal,
                                    const DetectorConfig& config = {}) {
  if (shouted.empty()) throw ValidationError("train_detector: no shouted vectors");
  if (normal.empty()) throw ValidationError("train_detector: no normal vectors");
  const std::size_t dim = shouted.front().size();
  for (const auto& v : shouted)
    if (v.size() != dim) throw ValidationError("train_detector: mixed dimensions");
  for (const auto& v : normal)
    if (v.size() != dim) throw ValidationError("train_detector: mixed dimensions");

  const std::size_t n = shouted.size() + normal.size();
  Eigen::MatrixXd x(n, dim + 1);
  Eigen::VectorXd y(n);
  std::size_t row = 0;
  for (const auto& v : shouted) {
    x(row, 0) = 1.0;
    for (std::size_t d = 0; d < dim; ++d) x(row, d + 1) = v[d];
    y[row++] = 1.0;
  }
  for (const auto& v : normal) {
    x(row, 0) = 1.0;
    for (std::size_t d = 0; d < dim; ++d) x(row, d + 1) = v[d];
    y[row++] = 0.0;
  }

  Eigen::VectorXd beta = Eigen::VectorXd::Zero(dim + 1);
  Eigen::VectorXd pen_mask = Eigen::VectorXd::Ones(dim + 1);
  pen_mask[0] = 0.0;  // the intercept is not penalized

  double objective = detail::logistic_objective(x, y, beta, config.l2);
  for (std::size_t iter = 0; iter < config.max_iterations; ++iter) {
    const Eigen::VectorXd t = x * beta;
    Eigen::VectorXd p(n), s(n);
    for (std::size_t i = 0; i < n; ++i) {
      p[i] = sigmoid(t[i]);
      s[i] = p[i] * (1.0 - p[i]);
    }
    Eigen::VectorXd grad =
        (x.transpose() * (y - p)) / double(n) -
        config.l2 * pen_mask.cwiseProduct(beta);
    if (grad.lpNorm<Eigen::Infinity>() < config.gradient_tolerance) break;

    // Negative Hessian; the tiny extra ridge keeps it solvable when the
    // classes are fully separated and all curvatures vanish.
    Eigen::MatrixXd h = (x.transpose() * s.asDiagonal() * x) / double(n);
    for (std::size_t j = 0; j <= dim; ++j)
      h(j, j) += config.l2 * pen_mask[j] + 1e-12;
    Eigen::VectorXd step = h.ldlt().solve(grad);
    if (!step.allFinite()) throw NumericError("train_detector: Newton step failed");

    double scale = 1.0;
    bool accepted = false;
    for (int halvings = 0; halvings < 50; ++halvings) {
      const Eigen::VectorXd candidate = beta + scale * step;
      const double cand_obj = detail::logistic_objective(x, y, candidate, config.l2);
      if (cand_obj > objective) {
        beta = candidate;
        objective = cand_obj;
        accepted = true;
        break;
      }
      scale *= 0.5;
    }
    if (!accepted) break;  // at numerical optimum
  }

  LogisticModel model;
  model.intercept = beta[0];
  model.weights.assign(beta.data() + 1, beta.data() + 1 + dim);
  for (double w : model.weights)
    if (!std::isfinite(w)) throw NumericError("train_detector: non-finite weights");
  if (!std::isfinite(model.intercept))
    throw NumericError("train_detector: non-finite intercept");
  return model;
}

}  // namespace shoutcomp
