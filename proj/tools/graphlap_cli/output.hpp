#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include <graphlap/record.hpp>

namespace graphlap::cli {

enum class OutputFormat { csv, json };

inline constexpr const char *kCsvHeader =
    "experiment,manifold,function,point,n,h,seed,estimate,target,error,scaled";

/// 17 significant digits: parses back to the identical double.
inline std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// RFC 4180 quoting, only when needed.
inline std::string csv_field(const std::string &s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos)
    return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"')
      out += '"';
    out += c;
  }
  return out + "\"";
}

inline void write_csv(std::ostream &os, std::span<const ExperimentRecord> records) {
  os << kCsvHeader << '\n';
  for (const auto &r : records) {
    os << csv_field(r.experiment) << ',' << csv_field(r.manifold) << ','
       << csv_field(r.function) << ',' << csv_field(r.point) << ',' << r.n << ','
       << format_real(r.h) << ',' << r.seed << ',' << format_real(r.estimate)
       << ',' << format_real(r.target) << ',' << format_real(r.error) << ','
       << (r.has_scaled() ? format_real(r.scaled) : std::string()) << '\n';
  }
}

/// NaN and infinities become null.
inline nlohmann::json json_real(double v) {
  if (!std::isfinite(v))
    return nullptr;
  return v;
}

inline nlohmann::json to_json(const ExperimentRecord &r) {
  return nlohmann::json{{"experiment", r.experiment}, {"manifold", r.manifold},
                        {"function", r.function},     {"point", r.point},
                        {"n", r.n},                   {"h", json_real(r.h)},
                        {"seed", r.seed},             {"estimate", json_real(r.estimate)},
                        {"target", json_real(r.target)},
                        {"error", json_real(r.error)},
                        {"scaled", r.has_scaled() ? json_real(r.scaled) : nullptr}};
}

inline nlohmann::json records_json(std::span<const ExperimentRecord> records) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto &r : records)
    arr.push_back(to_json(r));
  return arr;
}

class IoError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Writes records to `path` as CSV (header, one row per record) or as a JSON
/// array of objects with the CSV field names. Throws IoError.
inline void emit_records(std::span<const ExperimentRecord> records,
                         OutputFormat format, const std::string &path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os)
    throw IoError("cannot open '" + path + "' for writing");
  if (format == OutputFormat::csv)
    write_csv(os, records);
  else
    os << records_json(records).dump(2) << '\n';
  os.flush();
  if (!os)
    throw IoError("write to '" + path + "' failed");
}

/// Splits one CSV line, honouring quotes.
inline std::vector<std::string> split_csv_line(const std::string &line) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        fields.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        fields.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else {
      fields.back() += c;
    }
  }
  return fields;
}

} // namespace graphlap::cli
