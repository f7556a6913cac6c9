#pragma once

// Strict reader over a parsed JSON object: every key must be consumed before
// finish(), so misspelled or stray keys surface as ValidationError.

#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "sldisp/errors.hpp"

namespace sldisp::detail {

nlohmann::json parse_json(const std::string& text);

class FieldReader {
 public:
  // A null `node` is an absent optional object.
  FieldReader(const nlohmann::json* node, std::string path);
  FieldReader(const nlohmann::json& node, std::string path) : FieldReader(&node, std::move(path)) {}

  bool present() const { return node_ != nullptr; }
  bool has(const std::string& key) const;

  double number(const std::string& key);
  double number(const std::string& key, double fallback);
  int integer(const std::string& key);
  int integer(const std::string& key, int fallback);
  std::uint64_t unsigned_integer(const std::string& key, std::uint64_t fallback);
  std::string string(const std::string& key);
  std::vector<double> number_list(const std::string& key);
  std::vector<int> integer_list(const std::string& key);

  FieldReader object(const std::string& key, bool required);

  /// Throws ValidationError for the first key that was never read.
  void finish() const;

 private:
  const nlohmann::json& require(const std::string& key);
  std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  const nlohmann::json* node_;
  std::string path_;
  std::set<std::string> consumed_;
};

}  // namespace sldisp::detail
