#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "shoutcomp/types.hpp"

namespace shoutcomp {

/// Trial conditions: all-vs-all, within-normal, within-shouted, and the
/// cross condition pairing every normal utterance with every shouted one.
enum class Condition { AA, NN, SS, NS };

inline const char* to_string(Condition c) {
  switch (c) {
    case Condition::AA: return "aa";
    case Condition::NN: return "nn";
    case Condition::SS: return "ss";
    case Condition::NS: return "ns";
  }
  return "?";
}

/// Hyphenated display form, e.g. "A-A".
inline std::string condition_label(Condition c) {
  switch (c) {
    case Condition::AA: return "A-A";
    case Condition::NN: return "N-N";
    case Condition::SS: return "S-S";
    case Condition::NS: return "N-S";
  }
  return "?";
}

inline Condition condition_from_string(std::string s) {
  std::erase(s, '-');
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return char(std::tolower(c)); });
  if (s == "aa") return Condition::AA;
  if (s == "nn") return Condition::NN;
  if (s == "ss") return Condition::SS;
  if (s == "ns") return Condition::NS;
  throw ValidationError("unknown condition '" + s + "' (expected aa, nn, ss or ns)");
}

struct Trial {
  std::uint32_t enroll = 0;  // record indices into the source dataset
  std::uint32_t test = 0;
  bool same_speaker = false;
};

struct TrialSet {
  Condition condition = Condition::AA;
  std::vector<Trial> trials;

  std::size_t size() const { return trials.size(); }
};

/// Enumerates verification trials. AA/NN/SS are unordered pairs within the
/// respective subset (n(n-1)/2 of them); NS pairs every normal with every
/// shouted utterance.
inline TrialSet make_trials(const Dataset& dataset, Condition condition) {
  std::vector<std::uint32_t> enroll_pool, test_pool;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const Domain d = dataset.records[i].domain;
    switch (condition) {
      case Condition::AA:
        enroll_pool.push_back(std::uint32_t(i));
        break;
      case Condition::NN:
        if (d == Domain::Normal) enroll_pool.push_back(std::uint32_t(i));
        break;
      case Condition::SS:
        if (d == Domain::Shouted) enroll_pool.push_back(std::uint32_t(i));
        break;
      case Condition::NS:
        if (d == Domain::Normal) enroll_pool.push_back(std::uint32_t(i));
        if (d == Domain::Shouted) test_pool.push_back(std::uint32_t(i));
        break;
    }
  }

  TrialSet set;
  set.condition = condition;
  if (condition == Condition::NS) {
    if (enroll_pool.empty())
      throw ValidationError("condition N-S needs normal-domain utterances");
    if (test_pool.empty())
      throw ValidationError("condition N-S needs shouted-domain utterances");
    set.trials.reserve(enroll_pool.size() * test_pool.size());
    for (auto e : enroll_pool)
      for (auto t : test_pool)
        set.trials.push_back(
            {e, t, dataset.records[e].speaker == dataset.records[t].speaker});
    return set;
  }

  if (enroll_pool.empty())
    throw ValidationError("condition " + condition_label(condition) +
                          " has no matching utterances");
  set.trials.reserve(enroll_pool.size() * (enroll_pool.size() - 1) / 2);
  for (std::size_t a = 0; a < enroll_pool.size(); ++a)
    for (std::size_t b = a + 1; b < enroll_pool.size(); ++b) {
      const auto e = enroll_pool[a];
      const auto t = enroll_pool[b];
      set.trials.push_back(
          {e, t, dataset.records[e].speaker == dataset.records[t].speaker});
    }
  return set;
}

}  // namespace shoutcomp
