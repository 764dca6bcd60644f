#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "shoutcomp/compensation.hpp"
#include "shoutcomp/logistic.hpp"
#include "shoutcomp/metrics.hpp"
#include "shoutcomp/scoring.hpp"
#include "shoutcomp/trials.hpp"
#include "shoutcomp/types.hpp"

namespace shoutcomp {

struct ConditionEval {
  double eer = 0.0;
  double threshold = 0.0;
  std::vector<DetPoint> det;
};

struct ConditionResult {
  Condition condition = Condition::AA;
  /// Pooled evaluation; in gender-dependent mode eer is the across-gender
  /// average and det stays empty (the per-gender curves carry the detail).
  ConditionEval overall;
  std::vector<std::pair<Gender, ConditionEval>> per_gender;
};

struct EvalReport {
  std::vector<ConditionResult> conditions;
  bool gender_averaged = false;
};

namespace detail {

inline ConditionEval eval_condition(const Dataset& dataset, Condition condition) {
  const auto trials = make_trials(dataset, condition);
  const auto scored = score_trials(trials, dataset, {});
  const auto eer = compute_eer(scored);
  ConditionEval eval;
  eval.eer = eer.eer;
  eval.threshold = eer.threshold;
  eval.det = det_points(scored);
  return eval;
}

inline ConditionResult eval_condition_report(const Dataset& prepared,
                                             Condition condition,
                                             bool gender_dependent) {
  ConditionResult result;
  result.condition = condition;
  if (!gender_dependent) {
    result.overall = eval_condition(prepared, condition);
    return result;
  }
  double sum = 0.0;
  for (Gender g : {Gender::Male, Gender::Female}) {
    Dataset part;
    part.dim = prepared.dim;
    for (const auto& r : prepared.records)
      if (r.gender == g) part.records.push_back(r);
    if (part.records.empty()) continue;
    result.per_gender.emplace_back(g, eval_condition(part, condition));
    sum += result.per_gender.back().second.eer;
  }
  if (result.per_gender.empty())
    throw ValidationError("gender-dependent evaluation needs gender labels");
  result.overall.eer = sum / double(result.per_gender.size());
  result.overall.threshold = std::numeric_limits<double>::quiet_NaN();
  return result;
}

}  // namespace detail

/// Direct evaluation of a dataset as it stands: center on the dataset's own
/// mean, length-normalize, cosine-score the requested conditions.
inline EvalReport evaluate_dataset(const Dataset& dataset,
                                   const std::vector<Condition>& conditions,
                                   bool gender_dependent = false) {
  if (conditions.empty()) throw ValidationError("no conditions requested");
  Dataset prepared = dataset;
  const Vec mean = mean_vector(dataset);
  for (auto& r : prepared.records) r.vector = normalize_vector(r.vector, mean);

  EvalReport report;
  report.gender_averaged = gender_dependent;
  for (Condition c : conditions)
    report.conditions.push_back(
        detail::eval_condition_report(prepared, c, gender_dependent));
  return report;
}

struct LosoConfig {
  /// Empty = uncompensated baseline (no models are trained).
  std::optional<Technique> technique;
  GatingMode gating = GatingMode::Detected;
  std::size_t k = 8;
  EmConfig em;
  DetectorConfig detector;
  std::uint64_t seed = 0;
  char delimiter = '_';
  bool gender_dependent = false;
  std::vector<Condition> conditions = {Condition::AA, Condition::NN, Condition::SS,
                                       Condition::NS};
};

struct LosoResult {
  EvalReport report;
  /// Held-out detector performance pooled over folds; present under
  /// detected gating when the data carries oracle labels.
  std::optional<DetectorMetrics> detector;
  /// The pooled per-fold-processed dataset the EERs were computed on.
  Dataset processed;
};

/// Leave-one-speaker-out evaluation. Each fold trains GMMs, detector, and
/// bias tables on the other speakers, compensates the held-out speaker's
/// utterances under the chosen gating, and centers them with the training
/// fold's (uncompensated) mean. Fold outputs are pooled in dataset order
/// before trials are built. Without a technique (or with gating none) this
/// reduces to evaluate_dataset on the raw vectors.
inline LosoResult loso_evaluate(const Dataset& dataset, const LosoConfig& config) {
  const auto speakers = dataset.speakers();
  if (speakers.size() < 2)
    throw ValidationError("loso needs at least 2 speakers");
  const bool compensating =
      config.technique.has_value() && config.gating != GatingMode::None;
  const bool detecting = config.gating == GatingMode::Detected;

  LosoResult result;
  std::vector<Domain> predicted, actual;
  bool labels_complete = true;

  Dataset processed = dataset;
  if (compensating || detecting) {
    for (const auto& speaker : speakers) {
      Dataset train, held;
      train.dim = held.dim = dataset.dim;
      std::vector<std::size_t> held_idx;
      for (std::size_t i = 0; i < dataset.size(); ++i) {
        if (dataset.records[i].speaker == speaker) {
          held.records.push_back(dataset.records[i]);
          held_idx.push_back(i);
        } else {
          train.records.push_back(dataset.records[i]);
        }
      }
      if (train.records.empty())
        throw ValidationError("loso fold for '" + speaker + "' has no training data");

      std::optional<LogisticModel> detector;
      if (detecting) {
        auto shouted = detail::domain_vectors(train, Domain::Shouted);
        auto normal = detail::domain_vectors(train, Domain::Normal);
        detector = train_detector(shouted, normal, config.detector);
        for (const auto& r : held.records) {
          predicted.push_back(classify(*detector, r.vector));
          if (r.domain == Domain::Unknown) labels_complete = false;
          actual.push_back(r.domain);
        }
      }

      if (!compensating) continue;

      CompensationTrainConfig tc;
      tc.technique = *config.technique;
      tc.k = config.k;
      tc.em = config.em;
      tc.seed = config.seed;
      tc.delimiter = config.delimiter;
      tc.gender_dependent = config.gender_dependent;
      const auto model = train_compensation_model(train, tc);
      const Vec fold_mean = mean_vector(train);

      const Dataset compensated =
          compensate_dataset(model, detector, held, config.gating);
      for (std::size_t j = 0; j < held_idx.size(); ++j)
        processed.records[held_idx[j]].vector =
            normalize_vector(compensated.records[j].vector, fold_mean);
    }
  }

  if (detecting && labels_complete && !predicted.empty())
    result.detector = detector_metrics(predicted, actual);

  if (!compensating) {
    result.report =
        evaluate_dataset(dataset, config.conditions, config.gender_dependent);
    result.processed = std::move(processed);
    return result;
  }

  result.report.gender_averaged = config.gender_dependent;
  for (Condition c : config.conditions)
    result.report.conditions.push_back(
        detail::eval_condition_report(processed, c, config.gender_dependent));
  result.processed = std::move(processed);
  return result;
}

}  // namespace shoutcomp
