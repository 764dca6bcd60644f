#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "shoutcomp/error.hpp"

namespace shoutcomp {

using Vec = std::vector<double>;

/// Acoustic domain an utterance embedding was produced under.
enum class Domain { Normal, Shouted, Unknown };

enum class Gender { Male, Female };

inline const char* to_string(Domain d) {
  switch (d) {
    case Domain::Normal: return "normal";
    case Domain::Shouted: return "shouted";
    case Domain::Unknown: return "unknown";
  }
  return "unknown";
}

inline const char* to_string(Gender g) {
  return g == Gender::Male ? "male" : "female";
}

inline Domain domain_from_string(const std::string& s) {
  if (s == "normal") return Domain::Normal;
  if (s == "shouted") return Domain::Shouted;
  if (s.empty() || s == "unknown") return Domain::Unknown;
  throw ValidationError("unknown domain label '" + s + "'");
}

inline std::optional<Gender> gender_from_string(const std::string& s) {
  if (s == "male") return Gender::Male;
  if (s == "female") return Gender::Female;
  if (s.empty()) return std::nullopt;
  throw ValidationError("unknown gender label '" + s + "'");
}

/// One labeled utterance embedding.
struct EmbeddingRecord {
  std::string id;
  std::string speaker;
  Domain domain = Domain::Unknown;
  std::optional<Gender> gender;
  Vec vector;
};

/// An ordered collection of embedding records with a common dimensionality.
/// Immutable after construction through make_dataset; treat the fields as
/// read-only.
struct Dataset {
  std::vector<EmbeddingRecord> records;
  std::size_t dim = 0;

  std::size_t size() const { return records.size(); }

  /// Speaker labels in order of first appearance.
  std::vector<std::string> speakers() const {
    std::vector<std::string> out;
    std::unordered_set<std::string> seen;
    for (const auto& r : records)
      if (seen.insert(r.speaker).second) out.push_back(r.speaker);
    return out;
  }

  std::unordered_map<std::string, std::size_t> index_by_id() const {
    std::unordered_map<std::string, std::size_t> out;
    out.reserve(records.size());
    for (std::size_t i = 0; i < records.size(); ++i) out.emplace(records[i].id, i);
    return out;
  }
};

/// Validates record invariants (uniform finite vectors, unique ids) and
/// assembles a Dataset. Row order is preserved.
inline Dataset make_dataset(std::vector<EmbeddingRecord> records) {
  if (records.empty()) throw ValidationError("dataset is empty");
  const std::size_t dim = records.front().vector.size();
  if (dim == 0)
    throw ValidationError("record '" + records.front().id + "' has an empty vector");
  std::unordered_set<std::string> ids;
  ids.reserve(records.size());
  for (const auto& r : records) {
    if (r.vector.size() != dim)
      throw ValidationError("dimension mismatch: record '" + r.id + "' has " +
                            std::to_string(r.vector.size()) + " values, expected " +
                            std::to_string(dim));
    for (double v : r.vector)
      if (!std::isfinite(v))
        throw ValidationError("non-finite value in record '" + r.id + "'");
    if (!ids.insert(r.id).second)
      throw ValidationError("duplicate record id '" + r.id + "'");
  }
  Dataset ds;
  ds.records = std::move(records);
  ds.dim = dim;
  return ds;
}

/// One normal/shouted embedding pair from the same speaker and content.
struct StereoPair {
  std::string speaker;
  std::string content;
  std::optional<Gender> gender;
  Vec normal;
  Vec shouted;
};

struct StereoPairs {
  std::vector<StereoPair> pairs;
  std::size_t dim = 0;
  /// (speaker, content) keys that had only one of the two domains.
  std::vector<std::string> skipped_keys;
  /// Records whose domain was Unknown or whose id did not parse.
  std::size_t ignored_records = 0;

  std::size_t size() const { return pairs.size(); }
};

/// Content token of a record id of the form <speaker><delim><content><delim><domain>.
/// Returns nullopt when the id has fewer than three tokens.
inline std::optional<std::string> content_key(const std::string& id, char delimiter) {
  std::size_t last = id.rfind(delimiter);
  if (last == std::string::npos || last == 0) return std::nullopt;
  std::size_t prev = id.rfind(delimiter, last - 1);
  if (prev == std::string::npos) return std::nullopt;
  return id.substr(prev + 1, last - prev - 1);
}

/// Pairs each speaker's normal and shouted takes of the same content.
/// Keys present in only one domain are skipped and reported in the result.
inline StereoPairs align_stereo(const Dataset& dataset, char delimiter = '_') {
  struct Slot {
    const EmbeddingRecord* normal = nullptr;
    const EmbeddingRecord* shouted = nullptr;
    std::string speaker, content;
  };
  std::unordered_map<std::string, Slot> slots;
  std::vector<std::string> key_order;
  StereoPairs out;
  out.dim = dataset.dim;

  for (const auto& r : dataset.records) {
    if (r.domain == Domain::Unknown) {
      ++out.ignored_records;
      continue;
    }
    auto content = content_key(r.id, delimiter);
    if (!content) {
      ++out.ignored_records;
      continue;
    }
    std::string key = r.speaker + '\x1f' + *content;
    auto [it, inserted] = slots.try_emplace(key);
    if (inserted) {
      key_order.push_back(key);
      it->second.speaker = r.speaker;
      it->second.content = *content;
    }
    const EmbeddingRecord*& side =
        r.domain == Domain::Normal ? it->second.normal : it->second.shouted;
    if (side != nullptr)
      throw ValidationError("duplicate " + std::string(to_string(r.domain)) +
                            " record for speaker '" + r.speaker + "', content '" +
                            *content + "'");
    side = &r;
  }

  for (const auto& key : key_order) {
    const Slot& slot = slots.at(key);
    if (slot.normal && slot.shouted) {
      if (slot.normal->gender != slot.shouted->gender)
        throw ValidationError("gender mismatch within stereo pair (speaker '" +
                              slot.speaker + "', content '" + slot.content + "')");
      out.pairs.push_back({slot.speaker, slot.content, slot.normal->gender,
                           slot.normal->vector, slot.shouted->vector});
    } else {
      out.skipped_keys.push_back(slot.speaker + "/" + slot.content);
    }
  }

  if (out.pairs.empty())
    throw ValidationError("no aligned stereo pairs found in dataset");
  return out;
}

}  // namespace shoutcomp
