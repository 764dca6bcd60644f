#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "shoutcomp/types.hpp"

namespace shoutcomp {

/// Knobs for the synthetic stereo corpus. The defaults mirror a desk-scale
/// version of the target corpus shape: 22 speakers, 24 contents per domain,
/// cleanly detectable domain shift split across a handful of shift clusters.
struct SynthConfig {
  std::size_t n_speakers = 22;
  std::size_t n_contents = 24;
  std::size_t dim = 16;
  double speaker_spread = 1.0;
  double within_speaker_noise = 0.35;
  std::size_t n_shift_clusters = 4;
  double shift_magnitude = 8.0;
  double gender_offset_magnitude = 1.0;
  std::uint64_t seed = 42;
};

namespace detail {

inline void normalize_in_place(Vec& v) {
  double norm2 = 0.0;
  for (double x : v) norm2 += x * x;
  if (norm2 > 0.0) {
    const double inv = 1.0 / std::sqrt(norm2);
    for (double& x : v) x *= inv;
  }
}

inline std::string padded_index(std::size_t i, std::size_t count) {
  std::size_t width = 2;
  for (std::size_t v = count > 0 ? count - 1 : 0; v >= 100; v /= 10) ++width;
  std::string s = std::to_string(i);
  while (s.size() < width) s.insert(s.begin(), '0');
  return s;
}

}  // namespace detail

/// Seeded generator of paired normal/shouted embeddings. Speakers are
/// Gaussian clusters (odd indices female, even male, pushed apart along a
/// gender direction); each shouted twin is its normal vector plus the offset
/// of the nearest shift cluster plus fresh noise. Cluster offsets share a
/// common direction component, which keeps the two domains linearly
/// separable, while their individual components keep the shift from being a
/// single global translation.
inline Dataset generate(const SynthConfig& config) {
  if (config.n_speakers == 0 || config.n_contents == 0 || config.dim == 0 ||
      config.n_shift_clusters == 0)
    throw ValidationError("synth: counts must be at least 1");
  if (config.speaker_spread < 0.0 || config.within_speaker_noise < 0.0 ||
      config.shift_magnitude < 0.0 || config.gender_offset_magnitude < 0.0)
    throw ValidationError("synth: magnitudes must be non-negative");

  std::mt19937_64 rng(config.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  auto draw = [&](double scale) {
    Vec v(config.dim);
    for (double& x : v) x = scale * gauss(rng);
    return v;
  };

  std::vector<Vec> anchors(config.n_shift_clusters);
  for (auto& a : anchors) a = draw(config.speaker_spread);

  Vec shared_dir = draw(1.0);
  detail::normalize_in_place(shared_dir);
  std::vector<Vec> offsets(config.n_shift_clusters);
  for (auto& o : offsets) {
    Vec own = draw(1.0);
    detail::normalize_in_place(own);
    o.resize(config.dim);
    for (std::size_t d = 0; d < config.dim; ++d)
      o[d] = shared_dir[d] + 0.5 * own[d];
    detail::normalize_in_place(o);
    for (double& x : o) x *= config.shift_magnitude;
  }

  Vec gender_dir = draw(1.0);
  detail::normalize_in_place(gender_dir);

  std::vector<Vec> speaker_means(config.n_speakers);
  for (std::size_t i = 0; i < config.n_speakers; ++i) {
    speaker_means[i] = draw(config.speaker_spread);
    const double side = i % 2 == 0 ? 1.0 : -1.0;
    for (std::size_t d = 0; d < config.dim; ++d)
      speaker_means[i][d] += side * config.gender_offset_magnitude * gender_dir[d];
  }

  std::vector<EmbeddingRecord> records;
  records.reserve(config.n_speakers * config.n_contents * 2);
  for (std::size_t i = 0; i < config.n_speakers; ++i) {
    const std::string speaker = "spk" + detail::padded_index(i, config.n_speakers);
    const Gender gender = i % 2 == 0 ? Gender::Male : Gender::Female;
    for (std::size_t jc = 0; jc < config.n_contents; ++jc) {
      const std::string content = "c" + detail::padded_index(jc, config.n_contents);
      Vec x = draw(config.within_speaker_noise);
      for (std::size_t d = 0; d < config.dim; ++d) x[d] += speaker_means[i][d];

      std::size_t cluster = 0;
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < anchors.size(); ++c) {
        double dist2 = 0.0;
        for (std::size_t d = 0; d < config.dim; ++d) {
          const double diff = x[d] - anchors[c][d];
          dist2 += diff * diff;
        }
        if (dist2 < best) {
          best = dist2;
          cluster = c;
        }
      }

      Vec y = draw(config.within_speaker_noise);
      for (std::size_t d = 0; d < config.dim; ++d)
        y[d] += x[d] + offsets[cluster][d];

      records.push_back({speaker + "_" + content + "_normal", speaker,
                         Domain::Normal, gender, std::move(x)});
      records.push_back({speaker + "_" + content + "_shouted", speaker,
                         Domain::Shouted, gender, std::move(y)});
    }
  }
  return make_dataset(std::move(records));
}

}  // namespace shoutcomp
