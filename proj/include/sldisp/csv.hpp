#pragma once

// Locale-independent CSV: '.' decimal separator, ',' field separator, LF line
// endings. Numbers are written with a fixed number of decimals so output is
// byte-stable.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "sldisp/camera_geometry.hpp"

namespace sldisp {

std::string format_fixed(double value, int decimals);

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);

  void add_row(std::vector<std::string> row);  // must match the header width

  const std::vector<std::string>& header() const { return header_; }
  const std::vector<std::vector<std::string>>& rows() const { return rows_; }

  std::string str() const;
  void write(std::ostream& out) const;
  void write(const std::filesystem::path& path) const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

/// Parses a numeric CSV with a header row. Throws ParseError with the line
/// number on malformed input.
struct NumericCsv {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  std::size_t column(const std::string& name) const;  // throws ValidationError
};

NumericCsv parse_numeric_csv(const std::string& text);
NumericCsv read_numeric_csv(const std::filesystem::path& path);

/// Spot table with header index,u,v and rows 1..4 in laser order.
CsvTable spot_table(const SpotQuad& quad);
SpotQuad read_spot_table(const std::filesystem::path& path);

}  // namespace sldisp
