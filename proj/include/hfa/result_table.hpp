#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace hfa {

inline constexpr const char* kArtifactVersion = "0.1.0";

struct Column {
  std::string name;
  std::string unit;
  std::string description;
};

/// Rectangular table of reals with a declared column schema and ordered
/// key/value metadata.
class ResultTable {
 public:
  ResultTable() = default;
  explicit ResultTable(std::vector<Column> columns);

  const std::vector<Column>& columns() const { return columns_; }
  const std::vector<std::vector<double>>& rows() const { return rows_; }
  const std::vector<std::pair<std::string, std::string>>& metadata() const { return metadata_; }

  /// Throws InvalidArgument unless the row width matches the schema.
  void add_row(std::vector<double> row);
  /// Replaces an existing key in place, otherwise appends.
  void set_metadata(const std::string& key, std::string value);
  void set_metadata(const std::string& key, double value);
  std::optional<std::string> metadata_value(std::string_view key) const;

  std::vector<double> column(std::string_view name) const;
  bool has_column(std::string_view name) const;

  /// `# key: value` metadata lines, the header row, then data rows; LF line
  /// endings, reals with 17 significant digits. The timestamp, when given, is
  /// the last metadata line and the only run-dependent one.
  std::string to_csv(const std::optional<std::string>& timestamp = std::nullopt) const;
  std::string to_json(const std::optional<std::string>& timestamp = std::nullopt) const;

  /// Parses to_csv() output; column units and descriptions are recovered from
  /// the `column.<name>` metadata lines.
  static ResultTable from_csv(std::string_view text);

 private:
  std::vector<Column> columns_;
  std::vector<std::vector<double>> rows_;
  std::vector<std::pair<std::string, std::string>> metadata_;
};

/// General format with 17 significant digits, lossless for doubles.
std::string format_real(double value);
/// Locale-independent parse; throws InvalidArgument on trailing garbage.
double parse_real(std::string_view text);

/// CSV lines that are neither blank nor the timestamp metadata line.
std::vector<std::string> deterministic_lines(std::string_view csv);

/// 64-bit FNV-1a of the text, as 16 hex digits.
std::string fnv1a_hex(std::string_view text);

}  // namespace hfa
