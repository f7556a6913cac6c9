#include "sldisp/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

namespace sldisp {

std::string format_fixed(double value, int decimals) {
  if (!std::isfinite(value)) return std::isnan(value) ? "nan" : (value > 0 ? "inf" : "-inf");
  if (value == 0.0) value = 0.0;  // no "-0.000000"
  char buffer[64];
  auto [end, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value, std::chars_format::fixed,
                                 decimals);
  if (ec != std::errc()) throw Error(ErrorCode::InvalidArgument, "number too large to format");
  std::string out(buffer, end);
  // Rounding can still produce "-0.00" for tiny negatives.
  if (out.front() == '-' && out.find_first_not_of("-0.") == std::string::npos) out.erase(0, 1);
  return out;
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

void CsvTable::add_row(std::vector<std::string> row) {
  if (row.size() != header_.size()) {
    throw Error(ErrorCode::InvalidArgument, "CSV row width does not match the header");
  }
  rows_.push_back(std::move(row));
}

namespace {

void write_line(std::ostream& out, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out << ',';
    out << fields[i];
  }
  out << '\n';
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace

void CsvTable::write(std::ostream& out) const {
  write_line(out, header_);
  for (const auto& row : rows_) write_line(out, row);
}

std::string CsvTable::str() const {
  std::ostringstream out;
  write(out);
  return out.str();
}

void CsvTable::write(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  write(out);
  if (!out) throw Error(ErrorCode::IoError, "failed while writing " + path.string());
}

std::size_t NumericCsv::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  throw Error(ErrorCode::ValidationError, "CSV has no column '" + name + "'");
}

NumericCsv parse_numeric_csv(const std::string& text) {
  NumericCsv csv;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = line.find(',', start);
      fields.push_back(line.substr(start, comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (csv.header.empty()) {
      csv.header = std::move(fields);
      continue;
    }
    if (fields.size() != csv.header.size()) {
      throw Error(ErrorCode::ParseError,
                  "CSV line " + std::to_string(line_no) + " has the wrong number of fields");
    }
    std::vector<double> row;
    for (const std::string& f : fields) {
      double value = 0.0;
      auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), value);
      if (ec != std::errc() || ptr != f.data() + f.size()) {
        throw Error(ErrorCode::ParseError,
                    "CSV line " + std::to_string(line_no) + ": '" + f + "' is not a number");
      }
      row.push_back(value);
    }
    csv.rows.push_back(std::move(row));
  }
  if (csv.header.empty()) throw Error(ErrorCode::ParseError, "CSV is empty");
  return csv;
}

NumericCsv read_numeric_csv(const std::filesystem::path& path) {
  try {
    return parse_numeric_csv(read_text(path));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ParseError) {
      throw Error(ErrorCode::ParseError, path.string() + ": " + e.what());
    }
    throw;
  }
}

CsvTable spot_table(const SpotQuad& quad) {
  CsvTable table({"index", "u", "v"});
  for (int i = 0; i < 4; ++i) {
    table.add_row({std::to_string(i + 1), format_fixed(quad(0, i), 6), format_fixed(quad(1, i), 6)});
  }
  return table;
}

SpotQuad read_spot_table(const std::filesystem::path& path) {
  const NumericCsv csv = read_numeric_csv(path);
  const std::size_t index = csv.column("index"), u = csv.column("u"), v = csv.column("v");
  if (csv.rows.size() != 4) {
    throw Error(ErrorCode::ValidationError, path.string() + " must list exactly four spots");
  }
  SpotQuad quad;
  std::array<bool, 4> seen{};
  for (const auto& row : csv.rows) {
    const double k = row[index];
    if (k != std::floor(k) || k < 1 || k > 4 || seen[static_cast<std::size_t>(k - 1)]) {
      throw Error(ErrorCode::ValidationError, path.string() + ": spot indices must be 1..4");
    }
    seen[static_cast<std::size_t>(k - 1)] = true;
    quad(0, static_cast<int>(k) - 1) = row[u];
    quad(1, static_cast<int>(k) - 1) = row[v];
  }
  return quad;
}

}  // namespace sldisp
