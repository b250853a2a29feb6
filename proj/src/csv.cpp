#include "ctpt/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "ctpt/errors.hpp"

namespace ctpt {

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(field);
      field.clear();
    } else if (c != '\r') {
      field.push_back(c);
    }
  }
  fields.push_back(field);
  return fields;
}

std::string trimmed(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_number(const std::string& field, std::size_t line_no, const std::string& column) {
  const std::string t = trimmed(field);
  double value = 0.0;
  const auto* begin = t.data();
  const auto* end = t.data() + t.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end) {
    throw ValidationError("csv: line " + std::to_string(line_no) + ", column '" + column +
                          "': not a number: '" + t + "'");
  }
  return value;
}

}  // namespace

Eigen::Index CsvTable::column_index(const std::string& name) const {
  for (std::size_t j = 0; j < headers.size(); ++j) {
    if (headers[j] == name) return static_cast<Eigen::Index>(j);
  }
  throw ValidationError("csv: no column named '" + name + "'");
}

Eigen::VectorXd CsvTable::column(const std::string& name) const {
  return values.col(column_index(name));
}

CsvTable parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw ValidationError("csv: empty input, header row required");
  // Strip a UTF-8 BOM if present.
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);

  CsvTable table;
  for (const std::string& h : split_line(line)) {
    const std::string name = trimmed(h);
    if (name.empty()) throw ValidationError("csv: empty header name");
    table.headers.push_back(name);
  }
  const std::size_t cols = table.headers.size();

  std::vector<double> data;
  std::size_t rows = 0;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trimmed(line).empty()) continue;
    const std::vector<std::string> fields = split_line(line);
    if (fields.size() != cols) {
      throw ValidationError("csv: line " + std::to_string(line_no) + " has " +
                            std::to_string(fields.size()) + " fields, expected " +
                            std::to_string(cols));
    }
    for (std::size_t j = 0; j < cols; ++j) {
      data.push_back(parse_number(fields[j], line_no, table.headers[j]));
    }
    ++rows;
  }
  if (rows == 0) throw ValidationError("csv: no data rows");
  table.values.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      table.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = data[i * cols + j];
    }
  }
  return table;
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_csv(buffer.str());
}

}  // namespace ctpt
