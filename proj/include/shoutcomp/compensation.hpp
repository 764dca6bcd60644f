#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "shoutcomp/gmm.hpp"
#include "shoutcomp/logistic.hpp"
#include "shoutcomp/types.hpp"

namespace shoutcomp {

enum class Technique { Memlin, Ratz, Splice };

inline const char* to_string(Technique t) {
  switch (t) {
    case Technique::Memlin: return "memlin";
    case Technique::Ratz: return "ratz";
    case Technique::Splice: return "splice";
  }
  return "?";
}

inline Technique technique_from_string(const std::string& s) {
  if (s == "memlin") return Technique::Memlin;
  if (s == "ratz") return Technique::Ratz;
  if (s == "splice") return Technique::Splice;
  throw ValidationError("unknown technique '" + s + "'");
}

enum class GatingMode { Oracle, Detected, None };

inline const char* to_string(GatingMode g) {
  switch (g) {
    case GatingMode::Oracle: return "oracle";
    case GatingMode::Detected: return "detected";
    case GatingMode::None: return "none";
  }
  return "?";
}

inline GatingMode gating_from_string(const std::string& s) {
  if (s == "oracle") return GatingMode::Oracle;
  if (s == "detected") return GatingMode::Detected;
  if (s == "none") return GatingMode::None;
  throw ValidationError("unknown gating mode '" + s + "'");
}

/// One bias vector per normal-domain Gaussian.
struct RatzBiasTable {
  std::vector<Vec> biases;
};

/// One bias vector per shouted-domain Gaussian.
struct SpliceBiasTable {
  std::vector<Vec> biases;
};

/// biases[sx][sy] is the bias for the (normal sx, shouted sy) Gaussian pair;
/// cross_probs[sy][sx] estimates p(sx | sy) from the stereo training set.
struct MemlinBiasTable {
  std::vector<std::vector<Vec>> biases;
  std::vector<std::vector<double>> cross_probs;
};

namespace detail {

inline Vec mean_shift(const StereoPairs& pairs) {
  Vec g(pairs.dim, 0.0);
  for (const auto& p : pairs.pairs)
    for (std::size_t d = 0; d < pairs.dim; ++d) g[d] += p.shouted[d] - p.normal[d];
  for (double& v : g) v /= double(pairs.size());
  return g;
}

inline void check_pairs(const StereoPairs& pairs, const DiagonalGmm& gmm) {
  if (pairs.pairs.empty()) throw ValidationError("no stereo pairs to train on");
  if (pairs.dim != gmm.dim)
    throw ValidationError("stereo pairs have dim " + std::to_string(pairs.dim) +
                          " but the gmm expects " + std::to_string(gmm.dim));
}

constexpr double kMassFloor = 1e-12;

}  // namespace detail

inline RatzBiasTable train_ratz(const StereoPairs& pairs, const DiagonalGmm& normal_gmm) {
  detail::check_pairs(pairs, normal_gmm);
  const std::size_t k = normal_gmm.size();
  const std::size_t dim = pairs.dim;
  std::vector<Vec> num(k, Vec(dim, 0.0));
  std::vector<double> den(k, 0.0);
  for (const auto& p : pairs.pairs) {
    const auto post = posteriors(normal_gmm, p.normal);
    for (std::size_t s = 0; s < k; ++s) {
      den[s] += post[s];
      for (std::size_t d = 0; d < dim; ++d)
        num[s][d] += post[s] * (p.shouted[d] - p.normal[d]);
    }
  }
  RatzBiasTable table;
  table.biases.resize(k);
  Vec global;
  for (std::size_t s = 0; s < k; ++s) {
    if (den[s] < detail::kMassFloor) {
      if (global.empty()) global = detail::mean_shift(pairs);
      table.biases[s] = global;
      warn("ratz component " + std::to_string(s) +
           " has no posterior mass; using the global mean shift");
      continue;
    }
    table.biases[s] = num[s];
    for (double& v : table.biases[s]) v /= den[s];
  }
  return table;
}

inline Vec apply_ratz(const RatzBiasTable& table, const DiagonalGmm& normal_gmm,
                      const Vec& y) {
  if (table.biases.size() != normal_gmm.size())
    throw ValidationError("ratz table size does not match the gmm");
  const auto post = posteriors(normal_gmm, y);
  Vec out = y;
  for (std::size_t s = 0; s < table.biases.size(); ++s)
    for (std::size_t d = 0; d < out.size(); ++d)
      out[d] -= post[s] * table.biases[s][d];
  return out;
}

inline SpliceBiasTable train_splice(const StereoPairs& pairs,
                                    const DiagonalGmm& shouted_gmm) {
  detail::check_pairs(pairs, shouted_gmm);
  const std::size_t k = shouted_gmm.size();
  const std::size_t dim = pairs.dim;
  std::vector<Vec> num(k, Vec(dim, 0.0));
  std::vector<double> den(k, 0.0);
  for (const auto& p : pairs.pairs) {
    const auto post = posteriors(shouted_gmm, p.shouted);
    for (std::size_t s = 0; s < k; ++s) {
      den[s] += post[s];
      for (std::size_t d = 0; d < dim; ++d)
        num[s][d] += post[s] * (p.shouted[d] - p.normal[d]);
    }
  }
  SpliceBiasTable table;
  table.biases.resize(k);
  Vec global;
  for (std::size_t s = 0; s < k; ++s) {
    if (den[s] < detail::kMassFloor) {
      if (global.empty()) global = detail::mean_shift(pairs);
      table.biases[s] = global;
      warn("splice component " + std::to_string(s) +
           " has no posterior mass; using the global mean shift");
      continue;
    }
    table.biases[s] = num[s];
    for (double& v : table.biases[s]) v /= den[s];
  }
  return table;
}

inline Vec apply_splice(const SpliceBiasTable& table, const DiagonalGmm& shouted_gmm,
                        const Vec& y) {
  if (table.biases.size() != shouted_gmm.size())
    throw ValidationError("splice table size does not match the gmm");
  const auto post = posteriors(shouted_gmm, y);
  Vec out = y;
  for (std::size_t s = 0; s < table.biases.size(); ++s)
    for (std::size_t d = 0; d < out.size(); ++d)
      out[d] -= post[s] * table.biases[s][d];
  return out;
}

/// Pair biases are posterior-product weighted mean shifts; pairs that no
/// training datum covers fall back to the normal-side marginal bias so the
/// region still gets compensated.
inline MemlinBiasTable train_memlin(const StereoPairs& pairs,
                                    const DiagonalGmm& normal_gmm,
                                    const DiagonalGmm& shouted_gmm) {
  detail::check_pairs(pairs, normal_gmm);
  detail::check_pairs(pairs, shouted_gmm);
  const std::size_t kx = normal_gmm.size();
  const std::size_t ky = shouted_gmm.size();
  const std::size_t dim = pairs.dim;

  std::vector<std::vector<Vec>> num(kx, std::vector<Vec>(ky, Vec(dim, 0.0)));
  std::vector<std::vector<double>> den(kx, std::vector<double>(ky, 0.0));
  std::vector<double> shouted_mass(ky, 0.0);
  std::vector<double> normal_mass(kx, 0.0);
  for (const auto& p : pairs.pairs) {
    const auto px = posteriors(normal_gmm, p.normal);
    const auto py = posteriors(shouted_gmm, p.shouted);
    for (std::size_t sy = 0; sy < ky; ++sy) shouted_mass[sy] += py[sy];
    for (std::size_t sx = 0; sx < kx; ++sx) normal_mass[sx] += px[sx];
    for (std::size_t sx = 0; sx < kx; ++sx)
      for (std::size_t sy = 0; sy < ky; ++sy) {
        const double w = px[sx] * py[sy];
        den[sx][sy] += w;
        for (std::size_t d = 0; d < dim; ++d)
          num[sx][sy][d] += w * (p.shouted[d] - p.normal[d]);
      }
  }

  std::optional<RatzBiasTable> marginal;
  MemlinBiasTable table;
  table.biases.assign(kx, std::vector<Vec>(ky));
  for (std::size_t sx = 0; sx < kx; ++sx)
    for (std::size_t sy = 0; sy < ky; ++sy) {
      if (den[sx][sy] < detail::kMassFloor) {
        if (!marginal) marginal = train_ratz(pairs, normal_gmm);
        table.biases[sx][sy] = marginal->biases[sx];
        warn("memlin pair (" + std::to_string(sx) + "," + std::to_string(sy) +
             ") has no posterior mass; using the marginal bias");
        continue;
      }
      table.biases[sx][sy] = num[sx][sy];
      for (double& v : table.biases[sx][sy]) v /= den[sx][sy];
    }

  table.cross_probs.assign(ky, std::vector<double>(kx, 0.0));
  for (std::size_t sy = 0; sy < ky; ++sy) {
    auto& row = table.cross_probs[sy];
    if (shouted_mass[sy] < detail::kMassFloor) {
      for (std::size_t sx = 0; sx < kx; ++sx) row[sx] = normal_mass[sx];
      warn("memlin shouted component " + std::to_string(sy) +
           " has no posterior mass; cross row uses the normal marginals");
    } else {
      for (std::size_t sx = 0; sx < kx; ++sx) row[sx] = den[sx][sy];
    }
    double sum = 0.0;
    for (double v : row) sum += v;
    for (double& v : row) v /= sum;
  }
  return table;
}

inline Vec apply_memlin(const MemlinBiasTable& table, const DiagonalGmm& shouted_gmm,
                        const Vec& y) {
  const std::size_t ky = shouted_gmm.size();
  if (table.cross_probs.size() != ky ||
      (ky > 0 && table.biases.empty()) ||
      (!table.biases.empty() && table.biases.front().size() != ky))
    throw ValidationError("memlin table shape does not match the gmm");
  const std::size_t kx = table.biases.size();
  const auto py = posteriors(shouted_gmm, y);
  Vec out = y;
  for (std::size_t sy = 0; sy < ky; ++sy)
    for (std::size_t sx = 0; sx < kx; ++sx) {
      const double w = py[sy] * table.cross_probs[sy][sx];
      const Vec& r = table.biases[sx][sy];
      for (std::size_t d = 0; d < out.size(); ++d) out[d] -= w * r[d];
    }
  return out;
}

/// GMMs and bias table for one training partition.
struct CompensationCore {
  std::optional<DiagonalGmm> normal_gmm;
  std::optional<DiagonalGmm> shouted_gmm;
  std::variant<RatzBiasTable, SpliceBiasTable, MemlinBiasTable> table;
};

struct CompensationModel {
  Technique technique = Technique::Memlin;
  CompensationCore base;
  /// Populated by the gender-dependent variant; records with a gender label
  /// use their partition's core, everything else falls back to base.
  std::map<Gender, CompensationCore> gender_partition;
};

inline Vec apply_core(const CompensationCore& core, const Vec& y) {
  if (std::holds_alternative<RatzBiasTable>(core.table)) {
    if (!core.normal_gmm) throw ValidationError("ratz core lacks the normal gmm");
    return apply_ratz(std::get<RatzBiasTable>(core.table), *core.normal_gmm, y);
  }
  if (std::holds_alternative<SpliceBiasTable>(core.table)) {
    if (!core.shouted_gmm) throw ValidationError("splice core lacks the shouted gmm");
    return apply_splice(std::get<SpliceBiasTable>(core.table), *core.shouted_gmm, y);
  }
  if (!core.shouted_gmm) throw ValidationError("memlin core lacks the shouted gmm");
  return apply_memlin(std::get<MemlinBiasTable>(core.table), *core.shouted_gmm, y);
}

namespace detail {

inline std::vector<Vec> domain_vectors(const Dataset& data, Domain domain) {
  std::vector<Vec> out;
  for (const auto& r : data.records)
    if (r.domain == domain) out.push_back(r.vector);
  return out;
}

inline CompensationCore train_core(const Dataset& train, const StereoPairs& pairs,
                                   Technique technique, std::size_t k,
                                   const EmConfig& em, std::uint64_t seed) {
  CompensationCore core;
  if (technique != Technique::Splice) {
    auto vs = domain_vectors(train, Domain::Normal);
    if (vs.empty()) throw ValidationError("no normal-domain training vectors");
    core.normal_gmm = fit_em(vs, k, em, seed).gmm;
  }
  if (technique != Technique::Ratz) {
    auto vs = domain_vectors(train, Domain::Shouted);
    if (vs.empty()) throw ValidationError("no shouted-domain training vectors");
    core.shouted_gmm = fit_em(vs, k, em, seed).gmm;
  }
  switch (technique) {
    case Technique::Ratz:
      core.table = train_ratz(pairs, *core.normal_gmm);
      break;
    case Technique::Splice:
      core.table = train_splice(pairs, *core.shouted_gmm);
      break;
    case Technique::Memlin:
      core.table = train_memlin(pairs, *core.normal_gmm, *core.shouted_gmm);
      break;
  }
  return core;
}

}  // namespace detail

struct CompensationTrainConfig {
  Technique technique = Technique::Memlin;
  std::size_t k = 8;
  EmConfig em;
  std::uint64_t seed = 0;
  char delimiter = '_';
  bool gender_dependent = false;
};

inline CompensationModel train_compensation_model(const Dataset& train,
                                                  const CompensationTrainConfig& config) {
  CompensationModel model;
  model.technique = config.technique;
  const auto pairs = align_stereo(train, config.delimiter);
  model.base = detail::train_core(train, pairs, config.technique, config.k,
                                  config.em, config.seed);
  if (config.gender_dependent) {
    for (Gender g : {Gender::Male, Gender::Female}) {
      Dataset part;
      part.dim = train.dim;
      for (const auto& r : train.records)
        if (r.gender == g) part.records.push_back(r);
      if (part.records.empty()) continue;
      StereoPairs gpairs;
      gpairs.dim = pairs.dim;
      for (const auto& p : pairs.pairs)
        if (p.gender == g) gpairs.pairs.push_back(p);
      if (gpairs.pairs.empty()) continue;
      model.gender_partition.emplace(
          g, detail::train_core(part, gpairs, config.technique, config.k,
                                config.em, config.seed));
    }
  }
  return model;
}

/// Replaces the vector of every record gated as shouted with its compensated
/// version; everything else passes through untouched.
inline Dataset compensate_dataset(const CompensationModel& model,
                                  const std::optional<LogisticModel>& detector,
                                  const Dataset& data, GatingMode gating) {
  if (gating == GatingMode::None) return data;
  if (gating == GatingMode::Detected && !detector)
    throw ValidationError("detected gating requires a detector model");
  Dataset out = data;
  for (auto& r : out.records) {
    bool shouted = false;
    if (gating == GatingMode::Oracle) {
      if (r.domain == Domain::Unknown)
        throw ValidationError("oracle gating requires a domain label on '" + r.id + "'");
      shouted = r.domain == Domain::Shouted;
    } else {
      shouted = classify(*detector, r.vector) == Domain::Shouted;
    }
    if (!shouted) continue;
    const CompensationCore* core = &model.base;
    if (r.gender) {
      auto it = model.gender_partition.find(*r.gender);
      if (it != model.gender_partition.end()) core = &it->second;
    }
    r.vector = apply_core(*core, r.vector);
  }
  return out;
}

}  // namespace shoutcomp
