#include "invobs/trace_csv.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include "invobs/errors.hpp"

namespace invobs {

std::size_t CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i] == name) return i;
  throw ValidationError("trace: missing column '" + name + "'");
}

std::vector<double> CsvTable::series(const std::string& name) const {
  const std::size_t j = column(name);
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r[j]);
  return out;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

std::string write_csv(const CsvTable& t) {
  std::string out;
  out.reserve(64 + t.rows.size() * t.columns.size() * 24);
  out += "# ";
  out += t.header;
  out += '\n';
  for (std::size_t j = 0; j < t.columns.size(); ++j) {
    if (j) out += ',';
    out += t.columns[j];
  }
  out += '\n';
  for (const auto& r : t.rows) {
    for (std::size_t j = 0; j < r.size(); ++j) {
      if (j) out += ',';
      out += format_double(r[j]);
    }
    out += '\n';
  }
  if (!t.diagnostic.empty()) {
    out += "# diagnostic=";
    out += t.diagnostic;
    out += '\n';
  }
  return out;
}

namespace {

double parse_number(const std::string& s) {
  if (s == "nan") return std::nan("");
  if (s == "inf") return INFINITY;
  if (s == "-inf") return -INFINITY;
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw ValidationError("trace: bad number '" + s + "'");
  return v;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(line);
  while (std::getline(is, cur, ',')) out.push_back(cur);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

CsvTable parse_csv(const std::string& text) {
  CsvTable t;
  std::istringstream is(text);
  std::string line;
  bool have_columns = false;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (line.rfind("# diagnostic=", 0) == 0) {
      t.diagnostic = line.substr(13);
    } else if (line.rfind("# ", 0) == 0) {
      if (have_columns) throw ValidationError("trace: comment line inside the data block");
      t.header = line.substr(2);
    } else if (!have_columns) {
      t.columns = split(line);
      have_columns = true;
    } else {
      const auto cells = split(line);
      if (cells.size() != t.columns.size()) throw ValidationError("trace: row width does not match the columns");
      std::vector<double> row;
      row.reserve(cells.size());
      for (const auto& c : cells) row.push_back(parse_number(c));
      t.rows.push_back(std::move(row));
    }
  }
  if (!have_columns) throw ValidationError("trace: no column row");
  return t;
}

}  // namespace invobs
