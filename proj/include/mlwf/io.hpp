#pragma once

#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "mlwf/common.hpp"

namespace mlwf {

using json = nlohmann::ordered_json;

/// 17-significant-digit decimal form (round-trips doubles exactly).
std::string format_double(double v);

/// Serialize with insertion key order and every number printed through
/// format_double, so identical runs emit identical bytes.
std::string dump_json(const json& j, int indent = 2);

void write_text_file(const std::string& path, const std::string& content);

/// RFC-4180-style writer: fields containing separators or quotes get quoted,
/// numbers go through format_double.
class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& out) : out_(out) {}
  void row(const std::vector<std::string>& fields);
  void comment(const std::string& text);  // '#'-prefixed non-data line

  static std::string field(double v) { return format_double(v); }
  static std::string field(int v) { return std::to_string(v); }
  static std::string field(const std::string& v) { return v; }

 private:
  std::ostream& out_;
};

}  // namespace mlwf
