#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "shoutcomp/scoring.hpp"
#include "shoutcomp/types.hpp"

namespace shoutcomp {

struct EerResult {
  double eer = 0.0;
  double threshold = 0.0;
};

struct DetPoint {
  double threshold = 0.0;
  double far = 0.0;  // false-acceptance rate
  double frr = 0.0;  // false-rejection rate
};

namespace detail {

// Operating points of the rule "accept iff score >= threshold", swept over
// every distinct score ascending, plus the accept-nothing endpoint. FAR
// starts at 1 and never increases; FRR starts at 0 and never decreases.
struct RocSweep {
  std::vector<double> thresholds;  // size m (distinct scores, ascending)
  std::vector<double> far;         // size m+1, last entry is the endpoint
  std::vector<double> frr;
};

inline RocSweep roc_sweep(const ScoredTrials& scored) {
  if (scored.scores.size() != scored.same.size())
    throw ValidationError("scored trials have mismatched score/label arrays");
  long n_same = 0, n_diff = 0;
  for (std::size_t i = 0; i < scored.size(); ++i) {
    if (!std::isfinite(scored.scores[i]))
      throw NumericError("non-finite trial score");
    (scored.same[i] ? n_same : n_diff)++;
  }
  if (n_same == 0) throw ValidationError("no same-speaker trials");
  if (n_diff == 0) throw ValidationError("no different-speaker trials");

  std::vector<std::size_t> order(scored.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scored.scores[a] < scored.scores[b];
  });

  RocSweep sweep;
  long rejected_same = 0, rejected_diff = 0;
  std::size_t i = 0;
  while (i < order.size()) {
    const double threshold = scored.scores[order[i]];
    sweep.thresholds.push_back(threshold);
    sweep.far.push_back(double(n_diff - rejected_diff) / double(n_diff));
    sweep.frr.push_back(double(rejected_same) / double(n_same));
    while (i < order.size() && scored.scores[order[i]] == threshold) {
      (scored.same[order[i]] ? rejected_same : rejected_diff)++;
      ++i;
    }
  }
  sweep.far.push_back(0.0);
  sweep.frr.push_back(1.0);
  return sweep;
}

}  // namespace detail

/// Equal error rate with linear interpolation between the two sweep points
/// bracketing the FAR/FRR crossing.
inline EerResult compute_eer(const ScoredTrials& scored) {
  const auto sweep = detail::roc_sweep(scored);
  const std::size_t m = sweep.thresholds.size();
  for (std::size_t j = 0; j <= m; ++j) {
    const double d = sweep.far[j] - sweep.frr[j];
    if (d > 0.0) continue;
    if (d == 0.0) return {sweep.far[j], sweep.thresholds[j]};
    // j >= 1 here: the sweep always starts at FAR 1, FRR 0.
    const double d_prev = sweep.far[j - 1] - sweep.frr[j - 1];
    const double t = d_prev / (d_prev - d);
    const double eer = sweep.far[j - 1] + t * (sweep.far[j] - sweep.far[j - 1]);
    const double threshold =
        j < m ? sweep.thresholds[j - 1] +
                    t * (sweep.thresholds[j] - sweep.thresholds[j - 1])
              : sweep.thresholds[m - 1];
    return {eer, threshold};
  }
  throw NumericError("eer crossing not found");  // unreachable: endpoint has d = -1
}

/// The full (FAR, FRR) staircase; the final point is the accept-nothing
/// endpoint at threshold +inf.
inline std::vector<DetPoint> det_points(const ScoredTrials& scored) {
  const auto sweep = detail::roc_sweep(scored);
  std::vector<DetPoint> points;
  points.reserve(sweep.far.size());
  for (std::size_t j = 0; j < sweep.thresholds.size(); ++j)
    points.push_back({sweep.thresholds[j], sweep.far[j], sweep.frr[j]});
  points.push_back({std::numeric_limits<double>::infinity(), 0.0, 1.0});
  return points;
}

/// Evenly thins a DET staircase to at most max_points rows, always keeping
/// the first and last points. Export-size control for large trial sets.
inline std::vector<DetPoint> thin_det(const std::vector<DetPoint>& points,
                                      std::size_t max_points) {
  if (max_points < 2) throw ValidationError("thin_det needs at least 2 points");
  if (points.size() <= max_points) return points;
  std::vector<DetPoint> out;
  out.reserve(max_points);
  const std::size_t n = points.size();
  std::size_t last = n;  // sentinel: nothing emitted yet
  for (std::size_t j = 0; j < max_points; ++j) {
    const std::size_t idx = j * (n - 1) / (max_points - 1);
    if (idx != last) out.push_back(points[idx]);
    last = idx;
  }
  return out;
}

struct DetectorMetrics {
  double accuracy = 0.0;
  double shouted_miss_rate = 0.0;
  double normal_miss_rate = 0.0;
  std::size_t n_shouted = 0;
  std::size_t n_normal = 0;
};

inline DetectorMetrics detector_metrics(const std::vector<Domain>& predicted,
                                        const std::vector<Domain>& actual) {
  if (predicted.empty()) throw ValidationError("detector_metrics: empty input");
  if (predicted.size() != actual.size())
    throw ValidationError("detector_metrics: size mismatch");
  std::size_t correct = 0, shouted = 0, normal = 0, shouted_miss = 0, normal_miss = 0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    if (actual[i] == Domain::Unknown || predicted[i] == Domain::Unknown)
      throw ValidationError("detector_metrics: unknown domain label");
    if (predicted[i] == actual[i]) ++correct;
    if (actual[i] == Domain::Shouted) {
      ++shouted;
      if (predicted[i] == Domain::Normal) ++shouted_miss;
    } else {
      ++normal;
      if (predicted[i] == Domain::Shouted) ++normal_miss;
    }
  }
  DetectorMetrics m;
  m.accuracy = double(correct) / double(predicted.size());
  m.shouted_miss_rate = shouted == 0 ? 0.0 : double(shouted_miss) / double(shouted);
  m.normal_miss_rate = normal == 0 ? 0.0 : double(normal_miss) / double(normal);
  m.n_shouted = shouted;
  m.n_normal = normal;
  return m;
}

}  // namespace shoutcomp
