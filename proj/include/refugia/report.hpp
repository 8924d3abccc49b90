#pragma once
/** @file report.hpp
 *  @brief Result artifacts: CSV tables, polyline SVG charts and a hashed manifest.
 */

#include <filesystem>
#include <string>
#include <variant>
#include <vector>

namespace refugia {

/// One CSV cell; doubles print with 17 significant digits.
class Cell {
 public:
  Cell(double v) : value_(v) {}
  Cell(int v) : value_(static_cast<long long>(v)) {}
  Cell(long long v) : value_(v) {}
  Cell(std::size_t v) : value_(static_cast<long long>(v)) {}
  Cell(bool v) : value_(std::string(v ? "true" : "false")) {}
  Cell(std::string v) : value_(std::move(v)) {}
  Cell(const char* v) : value_(std::string(v)) {}

  std::string text() const;

 private:
  std::variant<double, long long, std::string> value_;
};

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> columns);
  /// Throws std::invalid_argument when the row width differs from the header.
  void add_row(std::vector<Cell> row);
  const std::vector<std::string>& columns() const noexcept { return columns_; }
  std::size_t rows() const noexcept { return rows_.size(); }
  /// Header plus rows, comma separated, LF line endings.
  std::string str() const;

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<std::string>> rows_;
};

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct ChartSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  bool log_y = false;
};

/// Self-contained SVG document with one polyline per series.
std::string render_svg(const ChartSpec& chart, const std::vector<Series>& series);

/// Lowercase hex SHA-256 of a byte string.
std::string sha256_hex(const std::string& bytes);

/// Writes files under one root and remembers each relative path with its hash.
class ArtifactWriter {
 public:
  explicit ArtifactWriter(std::filesystem::path root);

  const std::filesystem::path& root() const noexcept { return root_; }
  void write_text(const std::string& relative, const std::string& content);
  void write_csv(const std::string& relative, const CsvTable& table) { write_text(relative, table.str()); }
  /// "hash path" lines in write order; written to `relative` and not listed in itself.
  void write_manifest(const std::string& relative = "manifest.txt");
  const std::vector<std::pair<std::string, std::string>>& entries() const noexcept { return entries_; }

 private:
  std::filesystem::path root_;
  std::vector<std::pair<std::string, std::string>> entries_;  ///< (hash, relative path)
};

}  // namespace refugia
