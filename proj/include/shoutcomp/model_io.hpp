#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "shoutcomp/compensation.hpp"
#include "shoutcomp/dataset_io.hpp"
#include "shoutcomp/gmm.hpp"
#include "shoutcomp/logistic.hpp"

namespace shoutcomp {

inline constexpr int kModelFormatVersion = 1;

namespace detail {

inline nlohmann::ordered_json model_envelope(const char* kind, std::size_t dim) {
  nlohmann::ordered_json j;
  j["format_version"] = kModelFormatVersion;
  j["kind"] = kind;
  j["dim"] = dim;
  return j;
}

inline void write_model_json(const nlohmann::ordered_json& j, const std::string& path) {
  auto out = open_output(path);
  out << j.dump(2) << '\n';
  if (!out) throw IoError("write failed for '" + path + "'");
}

inline nlohmann::json read_model_json(const std::string& path,
                                      const std::string& expected_kind) {
  auto in = open_input(path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw IoError(path + ": " + e.what());
  }
  if (!j.contains("format_version") || !j["format_version"].is_number_integer())
    throw IoError(path + ": missing format_version");
  const int version = j["format_version"].get<int>();
  if (version != kModelFormatVersion)
    throw IoError(path + ": format_version " + std::to_string(version) +
                  " is not supported (expected " +
                  std::to_string(kModelFormatVersion) + ")");
  const std::string kind = j.value("kind", "");
  if (kind != expected_kind)
    throw IoError(path + ": model kind '" + kind + "' where '" + expected_kind +
                  "' was expected");
  return j;
}

}  // namespace detail

/// Model kind tag stored in a file, without loading the parameters.
inline std::string peek_model_kind(const std::string& path) {
  auto in = detail::open_input(path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw IoError(path + ": " + e.what());
  }
  return j.value("kind", "");
}

inline void save_model(const DiagonalGmm& gmm, const std::string& path) {
  auto j = detail::model_envelope("diagonal_gmm", gmm.dim);
  // build the arrays before inserting: ordered_json reallocates its backing
  // store on insertion, so references into j do not stay valid
  auto weights = nlohmann::ordered_json::array();
  auto means = nlohmann::ordered_json::array();
  auto variances = nlohmann::ordered_json::array();
  for (const auto& c : gmm.components) {
    weights.push_back(c.weight);
    means.push_back(c.mean);
    variances.push_back(c.variance);
  }
  j["weights"] = std::move(weights);
  j["means"] = std::move(means);
  j["variances"] = std::move(variances);
  detail::write_model_json(j, path);
}

inline DiagonalGmm load_gmm(const std::string& path) {
  const auto j = detail::read_model_json(path, "diagonal_gmm");
  DiagonalGmm gmm;
  try {
    gmm.dim = j.at("dim").get<std::size_t>();
    const auto weights = j.at("weights").get<std::vector<double>>();
    const auto means = j.at("means").get<std::vector<Vec>>();
    const auto variances = j.at("variances").get<std::vector<Vec>>();
    if (means.size() != weights.size() || variances.size() != weights.size())
      throw IoError(path + ": component count mismatch");
    gmm.components.resize(weights.size());
    for (std::size_t c = 0; c < weights.size(); ++c) {
      gmm.components[c].weight = weights[c];
      gmm.components[c].mean = means[c];
      gmm.components[c].variance = variances[c];
      if (means[c].size() != gmm.dim || variances[c].size() != gmm.dim)
        throw IoError(path + ": component dimension mismatch");
    }
  } catch (const nlohmann::json::exception& e) {
    throw IoError(path + ": " + e.what());
  }
  if (gmm.components.empty()) throw IoError(path + ": gmm has no components");
  return gmm;
}

inline void save_model(const LogisticModel& model, const std::string& path) {
  auto j = detail::model_envelope("logistic_detector", model.weights.size());
  j["intercept"] = model.intercept;
  j["weights"] = model.weights;
  detail::write_model_json(j, path);
}

inline LogisticModel load_detector(const std::string& path) {
  const auto j = detail::read_model_json(path, "logistic_detector");
  LogisticModel model;
  try {
    model.intercept = j.at("intercept").get<double>();
    model.weights = j.at("weights").get<Vec>();
    if (model.weights.size() != j.at("dim").get<std::size_t>())
      throw IoError(path + ": weight count does not match dim");
  } catch (const nlohmann::json::exception& e) {
    throw IoError(path + ": " + e.what());
  }
  return model;
}

inline void save_model(const RatzBiasTable& table, const std::string& path) {
  const std::size_t dim = table.biases.empty() ? 0 : table.biases.front().size();
  auto j = detail::model_envelope("ratz_bias", dim);
  j["biases"] = table.biases;
  detail::write_model_json(j, path);
}

inline RatzBiasTable load_ratz(const std::string& path) {
  const auto j = detail::read_model_json(path, "ratz_bias");
  RatzBiasTable table;
  try {
    table.biases = j.at("biases").get<std::vector<Vec>>();
  } catch (const nlohmann::json::exception& e) {
    throw IoError(path + ": " + e.what());
  }
  return table;
}

inline void save_model(const SpliceBiasTable& table, const std::string& path) {
  const std::size_t dim = table.biases.empty() ? 0 : table.biases.front().size();
  auto j = detail::model_envelope("splice_bias", dim);
  j["biases"] = table.biases;
  detail::write_model_json(j, path);
}

inline SpliceBiasTable load_splice(const std::string& path) {
  const auto j = detail::read_model_json(path, "splice_bias");
  SpliceBiasTable table;
  try {
    table.biases = j.at("biases").get<std::vector<Vec>>();
  } catch (const nlohmann::json::exception& e) {
    throw IoError(path + ": " + e.what());
  }
  return table;
}

inline void save_model(const MemlinBiasTable& table, const std::string& path) {
  std::size_t dim = 0;
  if (!table.biases.empty() && !table.biases.front().empty())
    dim = table.biases.front().front().size();
  auto j = detail::model_envelope("memlin_bias", dim);
  j["biases"] = table.biases;
  j["cross_probs"] = table.cross_probs;
  detail::write_model_json(j, path);
}

inline MemlinBiasTable load_memlin(const std::string& path) {
  const auto j = detail::read_model_json(path, "memlin_bias");
  MemlinBiasTable table;
  try {
    table.biases = j.at("biases").get<std::vector<std::vector<Vec>>>();
    table.cross_probs = j.at("cross_probs").get<std::vector<std::vector<double>>>();
  } catch (const nlohmann::json::exception& e) {
    throw IoError(path + ": " + e.what());
  }
  const std::size_t kx = table.biases.size();
  const std::size_t ky = kx == 0 ? 0 : table.biases.front().size();
  if (table.cross_probs.size() != ky)
    throw IoError(path + ": cross_probs row count does not match biases");
  for (const auto& row : table.cross_probs)
    if (row.size() != kx)
      throw IoError(path + ": cross_probs column count does not match biases");
  return table;
}

}  // namespace shoutcomp
