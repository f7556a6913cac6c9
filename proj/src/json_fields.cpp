#include "json_fields.hpp"

#include <cmath>
#include <limits>

namespace sldisp::detail {

nlohmann::json parse_json(const std::string& text) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    // Byte offset of the failure -> 1-based line and column.
    const std::size_t offset = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    std::size_t line = 1, column = 1;
    for (std::size_t i = 0; i < offset; ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw Error(ErrorCode::ParseError, "invalid JSON at line " + std::to_string(line) +
                                           ", column " + std::to_string(column));
  }
}

FieldReader::FieldReader(const nlohmann::json* node, std::string path)
    : node_(node), path_(std::move(path)) {
  if (node_ != nullptr && !node_->is_object()) {
    throw Error(ErrorCode::ValidationError,
                (path_.empty() ? std::string("document") : path_) + " must be an object");
  }
}

bool FieldReader::has(const std::string& key) const {
  return node_ != nullptr && node_->contains(key);
}

const nlohmann::json& FieldReader::require(const std::string& key) {
  if (!has(key)) throw Error(ErrorCode::ValidationError, field(key) + " is required");
  consumed_.insert(key);
  return node_->at(key);
}

double FieldReader::number(const std::string& key) {
  const nlohmann::json& v = require(key);
  if (!v.is_number()) throw Error(ErrorCode::ValidationError, field(key) + " must be a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw Error(ErrorCode::ValidationError, field(key) + " must be finite");
  return d;
}

double FieldReader::number(const std::string& key, double fallback) {
  return has(key) ? number(key) : fallback;
}

int FieldReader::integer(const std::string& key) {
  const nlohmann::json& v = require(key);
  if (!v.is_number_integer()) {
    throw Error(ErrorCode::ValidationError, field(key) + " must be an integer");
  }
  const auto i = v.get<long long>();
  if (i < std::numeric_limits<int>::min() || i > std::numeric_limits<int>::max()) {
    throw Error(ErrorCode::ValidationError, field(key) + " is out of range");
  }
  return static_cast<int>(i);
}

int FieldReader::integer(const std::string& key, int fallback) {
  return has(key) ? integer(key) : fallback;
}

std::uint64_t FieldReader::unsigned_integer(const std::string& key, std::uint64_t fallback) {
  if (!has(key)) return fallback;
  const nlohmann::json& v = require(key);
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  throw Error(ErrorCode::ValidationError, field(key) + " must be a non-negative integer");
}

std::string FieldReader::string(const std::string& key) {
  const nlohmann::json& v = require(key);
  if (!v.is_string()) throw Error(ErrorCode::ValidationError, field(key) + " must be a string");
  return v.get<std::string>();
}

std::vector<double> FieldReader::number_list(const std::string& key) {
  const nlohmann::json& v = require(key);
  if (!v.is_array()) throw Error(ErrorCode::ValidationError, field(key) + " must be an array");
  std::vector<double> out;
  for (const auto& item : v) {
    if (!item.is_number() || !std::isfinite(item.get<double>())) {
      throw Error(ErrorCode::ValidationError, field(key) + " must contain finite numbers");
    }
    out.push_back(item.get<double>());
  }
  return out;
}

std::vector<int> FieldReader::integer_list(const std::string& key) {
  const nlohmann::json& v = require(key);
  if (!v.is_array()) throw Error(ErrorCode::ValidationError, field(key) + " must be an array");
  std::vector<int> out;
  for (const auto& item : v) {
    if (!item.is_number_integer()) {
      throw Error(ErrorCode::ValidationError, field(key) + " must contain integers");
    }
    out.push_back(item.get<int>());
  }
  return out;
}

FieldReader FieldReader::object(const std::string& key, bool required) {
  if (!has(key)) {
    if (required) throw Error(ErrorCode::ValidationError, field(key) + " is required");
    return FieldReader(nullptr, field(key));
  }
  return FieldReader(&require(key), field(key));
}

void FieldReader::finish() const {
  if (node_ == nullptr) return;
  for (const auto& item : node_->items()) {
    if (!consumed_.count(item.key())) {
      throw Error(ErrorCode::ValidationError, "unknown key '" + field(item.key()) + "'");
    }
  }
}

}  // namespace sldisp::detail
