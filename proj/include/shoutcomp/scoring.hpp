#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "shoutcomp/trials.hpp"
#include "shoutcomp/types.hpp"

namespace shoutcomp {

struct ScoringConfig {
  /// Global mean subtracted before length-normalization; empty disables
  /// centering.
  std::optional<Vec> center_mean;
};

struct ScoredTrials {
  std::vector<double> scores;
  std::vector<std::uint8_t> same;  // 1 = same speaker

  std::size_t size() const { return scores.size(); }
};

/// Mean of all record vectors; the usual centering estimate.
inline Vec mean_vector(const Dataset& dataset) {
  Vec mean(dataset.dim, 0.0);
  for (const auto& r : dataset.records)
    for (std::size_t d = 0; d < dataset.dim; ++d) mean[d] += r.vector[d];
  for (double& v : mean) v /= double(dataset.size());
  return mean;
}

/// Centering followed by length-normalization. A vector that lands on the
/// origin stays there (its cosine against anything is taken as 0).
inline Vec normalize_vector(const Vec& v, const std::optional<Vec>& center_mean) {
  Vec out = v;
  if (center_mean) {
    if (center_mean->size() != v.size())
      throw ValidationError("centering mean dimension mismatch");
    for (std::size_t d = 0; d < out.size(); ++d) out[d] -= (*center_mean)[d];
  }
  double norm2 = 0.0;
  for (double x : out) norm2 += x * x;
  if (norm2 > 0.0) {
    const double inv = 1.0 / std::sqrt(norm2);
    for (double& x : out) x *= inv;
  }
  return out;
}

inline double cosine_similarity(const Vec& a, const Vec& b) {
  if (a.size() != b.size())
    throw ValidationError("cosine of vectors with different dimensions");
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t d = 0; d < a.size(); ++d) {
    dot += a[d] * b[d];
    na += a[d] * a[d];
    nb += b[d] * b[d];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

/// Cosine scores over preprocessed (centered, length-normalized) vectors.
inline ScoredTrials score_trials(const TrialSet& trials, const Dataset& dataset,
                                 const ScoringConfig& config = {}) {
  std::vector<Vec> prepared(dataset.size());
  for (std::size_t i = 0; i < dataset.size(); ++i)
    prepared[i] = normalize_vector(dataset.records[i].vector, config.center_mean);

  ScoredTrials out;
  out.scores.reserve(trials.size());
  out.same.reserve(trials.size());
  for (const auto& t : trials.trials) {
    if (t.enroll >= dataset.size() || t.test >= dataset.size())
      throw ValidationError("trial references a record outside the dataset");
    const Vec& a = prepared[t.enroll];
    const Vec& b = prepared[t.test];
    double dot = 0.0;
    for (std::size_t d = 0; d < a.size(); ++d) dot += a[d] * b[d];
    out.scores.push_back(dot);
    out.same.push_back(t.same_speaker ? 1 : 0);
  }
  return out;
}

}  // namespace shoutcomp
