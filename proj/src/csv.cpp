#include "hemo/csv.hpp"

#include <algorithm>
#include <cmath>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace hemo {

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

bool is_missing_marker(const std::string& s) {
  if (s.empty()) return true;
  std::string lower(s);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return lower == "na" || lower == "nan" || lower == "null";
}

std::optional<double> parse_cell(const std::string& raw, std::size_t row,
                                 const std::string& column) {
  const std::string s = trim(raw);
  if (is_missing_marker(s)) return std::nullopt;
  double value = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) {
    throw std::runtime_error("csv: unparseable numeric cell '" + s +
                             "' in column '" + column + "', data row " +
                             std::to_string(row));
  }
  return value;
}

}  // namespace

std::size_t RawTable::label_index() const {
  for (std::size_t i = 0; i < column_names.size(); ++i) {
    if (column_names[i] == label_column) return i;
  }
  throw std::runtime_error("csv: label column '" + label_column +
                           "' not present");
}

std::size_t RawTable::count_label(int value) const {
  const std::size_t li = label_index();
  std::size_t n = 0;
  for (const auto& row : rows) {
    if (row[li] && static_cast<int>(*row[li]) == value) ++n;
  }
  return n;
}

RawTable load_csv(const std::string& path, const std::string& label_column) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("csv: cannot open '" + path + "'");

  std::string line;
  if (!std::getline(in, line)) {
    throw std::runtime_error("csv: '" + path + "' is empty (no header row)");
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();

  RawTable table;
  for (const auto& name : split_line(line)) table.column_names.push_back(trim(name));
  table.label_column = label_column;
  const std::size_t label_idx = table.label_index();
  const std::size_t arity = table.column_names.size();

  std::size_t row_number = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    ++row_number;
    if (trim(line).empty()) continue;

    auto cells = split_line(line);
    if (cells.size() != arity) {
      throw std::runtime_error(
          "csv: data row " + std::to_string(row_number) + " has " +
          std::to_string(cells.size()) + " cells, expected " +
          std::to_string(arity));
    }
    std::vector<std::optional<double>> row(arity);
    for (std::size_t c = 0; c < arity; ++c) {
      row[c] = parse_cell(cells[c], row_number, table.column_names[c]);
    }
    const auto& label = row[label_idx];
    if (!label || (*label != 0.0 && *label != 1.0)) {
      throw std::runtime_error("csv: non-binary label in data row " +
                               std::to_string(row_number));
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

RawTable select_columns(const RawTable& table,
                        const std::vector<std::string>& names) {
  if (names.empty()) {
    throw std::runtime_error("select_columns: empty feature selection");
  }
  std::set<std::string> seen;
  for (const auto& name : names) {
    if (!seen.insert(name).second) {
      throw std::runtime_error("select_columns: duplicate column '" + name +
                               "'");
    }
  }

  std::vector<std::size_t> indices;
  indices.reserve(names.size() + 1);
  for (const auto& name : names) {
    const auto it = std::find(table.column_names.begin(),
                              table.column_names.end(), name);
    if (it == table.column_names.end()) {
      throw std::runtime_error("select_columns: unknown column '" + name + "'");
    }
    indices.push_back(
        static_cast<std::size_t>(it - table.column_names.begin()));
  }
  const std::size_t label_idx = table.label_index();
  if (std::find(names.begin(), names.end(), table.label_column) == names.end()) {
    indices.push_back(label_idx);
  }

  RawTable out;
  out.label_column = table.label_column;
  for (const std::size_t i : indices) out.column_names.push_back(table.column_names[i]);
  out.rows.reserve(table.rows.size());
  for (const auto& row : table.rows) {
    std::vector<std::optional<double>> projected;
    projected.reserve(indices.size());
    for (const std::size_t i : indices) projected.push_back(row[i]);
    out.rows.push_back(std::move(projected));
  }
  return out;
}

const std::vector<std::string>& analyte_columns() {
  static const std::vector<std::string> columns = {
      "ALT",      "AST",      "LDH",        "Urea",     "WBC",
      "RBC",      "Platelet", "Monocyte",   "Lymphocyte", "Neutrophil"};
  return columns;
}

void save_csv(const RawTable& table, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("csv: cannot write '" + path + "'");
  for (std::size_t c = 0; c < table.column_names.size(); ++c) {
    if (c) out << ',';
    out << table.column_names[c];
  }
  out << '\n';
  std::ostringstream cell;
  cell.precision(17);
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out << ',';
      if (row[c]) {
        cell.str("");
        cell << *row[c];
        out << cell.str();
      }
    }
    out << '\n';
  }
  if (!out) throw std::runtime_error("csv: write failure on '" + path + "'");
}

}  // namespace hemo
