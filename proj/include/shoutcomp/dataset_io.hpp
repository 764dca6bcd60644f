#pragma once

#include <charconv>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "shoutcomp/types.hpp"

namespace shoutcomp {

enum class FileFormat { Jsonl, Csv };

inline FileFormat format_from_string(const std::string& s) {
  if (s == "jsonl") return FileFormat::Jsonl;
  if (s == "csv") return FileFormat::Csv;
  throw ValidationError("unknown file format '" + s + "' (expected jsonl or csv)");
}

/// Picks the format from a path extension; defaults to jsonl.
inline FileFormat format_from_path(const std::string& path) {
  auto dot = path.rfind('.');
  if (dot != std::string::npos && path.substr(dot) == ".csv") return FileFormat::Csv;
  return FileFormat::Jsonl;
}

namespace detail {

inline std::vector<std::string> split_line(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = line.find(sep, start);
    if (pos == std::string::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

inline double parse_double(const std::string& token, const std::string& where) {
  double value = 0.0;
  const char* first = token.data();
  const char* last = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last)
    throw IoError("bad numeric value '" + token + "' " + where);
  return value;
}

inline std::string format_double(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  (void)ec;
  return std::string(buf, ptr);
}

inline std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  return in;
}

inline std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  return out;
}

inline void strip_cr(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

}  // namespace detail

inline Dataset load_dataset_jsonl(const std::string& path) {
  auto in = detail::open_input(path);
  std::vector<EmbeddingRecord> records;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    detail::strip_cr(line);
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw IoError(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
    EmbeddingRecord rec;
    try {
      rec.id = j.at("id").get<std::string>();
      rec.speaker = j.at("speaker").get<std::string>();
      if (j.contains("domain") && !j["domain"].is_null())
        rec.domain = domain_from_string(j["domain"].get<std::string>());
      if (j.contains("gender") && !j["gender"].is_null())
        rec.gender = gender_from_string(j["gender"].get<std::string>());
      rec.vector = j.at("vector").get<Vec>();
    } catch (const nlohmann::json::exception& e) {
      throw IoError(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
    records.push_back(std::move(rec));
  }
  if (records.empty()) throw IoError("no records in '" + path + "'");
  return make_dataset(std::move(records));
}

inline Dataset load_dataset_csv(const std::string& path) {
  auto in = detail::open_input(path);
  std::string line;
  if (!std::getline(in, line)) throw IoError("empty file '" + path + "'");
  detail::strip_cr(line);
  auto header = detail::split_line(line, ',');
  if (header.size() < 5 || header[0] != "id" || header[1] != "speaker" ||
      header[2] != "domain" || header[3] != "gender")
    throw IoError(path + ": expected header 'id,speaker,domain,gender,<coords...>'");
  const std::size_t dim = header.size() - 4;

  std::vector<EmbeddingRecord> records;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    detail::strip_cr(line);
    if (line.empty()) continue;
    auto fields = detail::split_line(line, ',');
    if (fields.size() != dim + 4)
      throw IoError(path + ":" + std::to_string(lineno) + ": expected " +
                    std::to_string(dim + 4) + " fields, got " +
                    std::to_string(fields.size()));
    EmbeddingRecord rec;
    rec.id = fields[0];
    rec.speaker = fields[1];
    rec.domain = domain_from_string(fields[2]);
    rec.gender = gender_from_string(fields[3]);
    rec.vector.reserve(dim);
    for (std::size_t d = 0; d < dim; ++d)
      rec.vector.push_back(detail::parse_double(
          fields[4 + d], "at " + path + ":" + std::to_string(lineno)));
    records.push_back(std::move(rec));
  }
  if (records.empty()) throw IoError("no records in '" + path + "'");
  return make_dataset(std::move(records));
}

inline Dataset load_dataset(const std::string& path, FileFormat format) {
  return format == FileFormat::Jsonl ? load_dataset_jsonl(path)
                                     : load_dataset_csv(path);
}

inline void save_dataset_jsonl(const Dataset& dataset, const std::string& path) {
  auto out = detail::open_output(path);
  for (const auto& r : dataset.records) {
    nlohmann::ordered_json j;
    j["id"] = r.id;
    j["speaker"] = r.speaker;
    j["domain"] = to_string(r.domain);
    if (r.gender) j["gender"] = to_string(*r.gender);
    j["vector"] = r.vector;
    out << j.dump() << '\n';
  }
  if (!out) throw IoError("write failed for '" + path + "'");
}

inline void save_dataset_csv(const Dataset& dataset, const std::string& path) {
  auto out = detail::open_output(path);
  out << "id,speaker,domain,gender";
  for (std::size_t d = 0; d < dataset.dim; ++d) out << ",e" << d;
  out << '\n';
  for (const auto& r : dataset.records) {
    if (r.id.find(',') != std::string::npos ||
        r.speaker.find(',') != std::string::npos)
      throw ValidationError("csv output does not support commas in ids/speakers ('" +
                            r.id + "')");
    out << r.id << ',' << r.speaker << ',' << to_string(r.domain) << ','
        << (r.gender ? to_string(*r.gender) : "");
    for (double v : r.vector) out << ',' << detail::format_double(v);
    out << '\n';
  }
  if (!out) throw IoError("write failed for '" + path + "'");
}

inline void save_dataset(const Dataset& dataset, const std::string& path,
                         FileFormat format) {
  if (format == FileFormat::Jsonl)
    save_dataset_jsonl(dataset, path);
  else
    save_dataset_csv(dataset, path);
}

}  // namespace shoutcomp
