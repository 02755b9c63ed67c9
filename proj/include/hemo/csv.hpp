#pragma once

#include <optional>
#include <string>
#include <vector>

namespace hemo {

/// A parsed CSV: all cells are optional reals, one column carries the
/// binary class label. Empty cells (and NA/NaN/null markers) are absent.
struct RawTable {
  std::vector<std::string> column_names;
  std::vector<std::vector<std::optional<double>>> rows;
  std::string label_column;

  std::size_t n_rows() const { return rows.size(); }
  std::size_t n_columns() const { return column_names.size(); }
  /// Index of label_column within column_names.
  std::size_t label_index() const;
  /// Rows carrying label 1 (the label cell is guaranteed present and binary).
  std::size_t count_label(int value) const;
};

/// Loads a comma-delimited UTF-8 file with a header row. Missing cells are
/// preserved as absent values; label cells must be 0 or 1.
/// Throws std::runtime_error on I/O failure, malformed row arity (the error
/// names the offending 1-based data row), unparseable numeric cells, or a
/// non-binary label.
RawTable load_csv(const std::string& path, const std::string& label_column);

/// Projects the table onto the named feature columns (plus the label).
/// Throws on unknown names, duplicates, or an empty selection.
RawTable select_columns(const RawTable& table,
                        const std::vector<std::string>& names);

/// The ten analytes the blood workbench trains on, in canonical order.
const std::vector<std::string>& analyte_columns();

/// Writes the table back out as CSV (header + rows, absent cells empty).
void save_csv(const RawTable& table, const std::string& path);

}  // namespace hemo
