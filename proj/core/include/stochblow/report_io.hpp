#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace stochblow {

/// Round-trip decimal form (%.17g); "nan" / "inf" / "-inf" for non-finite values.
std::string format_number(double x);

/// CSV writer: a leading "# config_hash=...,schema_version=..." line, then
/// the header row, then comma-separated rows.
class CsvTable {
 public:
  CsvTable(std::string config_hash, std::vector<std::string> columns);

  void add_row(const std::vector<std::string>& cells);
  void add_numbers(const std::vector<double>& values);
  std::size_t rows() const { return rows_.size(); }
  std::string str() const;

 private:
  std::string hash_;
  std::vector<std::string> columns_;
  std::vector<std::string> rows_;
};

/// Writes `content` to `path`, creating parent directories.
void write_text(const std::filesystem::path& path, const std::string& content);

struct SvgSeries {
  std::string title;
  std::string y_label;
  std::vector<double> times;
  std::vector<double> mean;
  std::vector<double> lower;  // band, same length as mean (may be empty)
  std::vector<double> upper;
  std::optional<double> marker;  // vertical line, e.g. a blow-up time bound
  std::string marker_label;
  bool log_scale = true;
};

/// Static line plot with an optional shaded band and a vertical marker.
std::string render_svg(const SvgSeries& series);

}  // namespace stochblow
