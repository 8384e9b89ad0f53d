#include "hfa/result_table.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <sstream>

#include <json.hpp>

#include "hfa/errors.hpp"

namespace hfa {
namespace {

constexpr std::string_view kTimestampKey = "timestamp";
constexpr std::string_view kColumnPrefix = "column.";

std::string single_line(std::string value) {
  std::replace(value.begin(), value.end(), '\n', ' ');
  std::replace(value.begin(), value.end(), '\r', ' ');
  return value;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      parts.push_back(s.substr(start));
      return parts;
    }
    parts.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

std::vector<std::string_view> lines_of(std::string_view text) {
  auto lines = split(text, '\n');
  if (!lines.empty() && lines.back().empty()) lines.pop_back();
  return lines;
}

}  // namespace

ResultTable::ResultTable(std::vector<Column> columns) : columns_(std::move(columns)) {
  if (columns_.empty()) throw InvalidArgument("a result table needs at least one column");
}

void ResultTable::add_row(std::vector<double> row) {
  if (row.size() != columns_.size()) {
    throw InvalidArgument("row has " + std::to_string(row.size()) + " values, schema has " +
                          std::to_string(columns_.size()) + " columns");
  }
  rows_.push_back(std::move(row));
}

void ResultTable::set_metadata(const std::string& key, std::string value) {
  value = single_line(std::move(value));
  for (auto& [k, v] : metadata_) {
    if (k == key) {
      v = std::move(value);
      return;
    }
  }
  metadata_.emplace_back(key, std::move(value));
}

void ResultTable::set_metadata(const std::string& key, double value) {
  set_metadata(key, format_real(value));
}

std::optional<std::string> ResultTable::metadata_value(std::string_view key) const {
  for (const auto& [k, v] : metadata_) {
    if (k == key) return v;
  }
  return std::nullopt;
}

bool ResultTable::has_column(std::string_view name) const {
  return std::any_of(columns_.begin(), columns_.end(), [&](const Column& c) { return c.name == name; });
}

std::vector<double> ResultTable::column(std::string_view name) const {
  const auto it = std::find_if(columns_.begin(), columns_.end(),
                               [&](const Column& c) { return c.name == name; });
  if (it == columns_.end()) throw InvalidArgument("no column named " + std::string(name));
  const auto k = static_cast<std::size_t>(it - columns_.begin());
  std::vector<double> out;
  out.reserve(rows_.size());
  for (const auto& row : rows_) out.push_back(row[k]);
  return out;
}

std::string ResultTable::to_csv(const std::optional<std::string>& timestamp) const {
  std::string out;
  for (const auto& [key, value] : metadata_) out += "# " + key + ": " + value + "\n";
  for (const auto& c : columns_) {
    out += "# " + std::string(kColumnPrefix) + c.name + ": " + single_line(c.unit) + "; " +
           single_line(c.description) + "\n";
  }
  if (timestamp) out += "# " + std::string(kTimestampKey) + ": " + single_line(*timestamp) + "\n";
  for (std::size_t k = 0; k < columns_.size(); ++k) {
    if (k) out += ',';
    out += columns_[k].name;
  }
  out += '\n';
  for (const auto& row : rows_) {
    for (std::size_t k = 0; k < row.size(); ++k) {
      if (k) out += ',';
      out += format_real(row[k]);
    }
    out += '\n';
  }
  return out;
}

std::string ResultTable::to_json(const std::optional<std::string>& timestamp) const {
  nlohmann::ordered_json doc;
  doc["metadata"] = nlohmann::ordered_json::object();
  for (const auto& [key, value] : metadata_) doc["metadata"][key] = value;
  if (timestamp) doc["metadata"][std::string(kTimestampKey)] = *timestamp;
  doc["columns"] = nlohmann::ordered_json::array();
  for (const auto& c : columns_) {
    doc["columns"].push_back({{"name", c.name}, {"unit", c.unit}, {"description", c.description}});
  }
  doc["rows"] = nlohmann::ordered_json::array();
  for (const auto& row : rows_) {
    auto values = nlohmann::ordered_json::array();
    for (double v : row) {
      if (std::isfinite(v)) {
        values.push_back(v);
      } else {
        values.push_back(format_real(v));
      }
    }
    doc["rows"].push_back(std::move(values));
  }
  return doc.dump(2) + "\n";
}

ResultTable ResultTable::from_csv(std::string_view text) {
  std::vector<std::pair<std::string, std::string>> metadata;
  std::vector<std::pair<std::string, Column>> described;
  std::vector<std::string_view> body;
  for (auto line : lines_of(text)) {
    if (line.empty()) continue;
    if (line.front() == '#') {
      line = trim(line.substr(1));
      const auto colon = line.find(':');
      const auto key = std::string(trim(line.substr(0, colon)));
      const auto value =
          colon == std::string_view::npos ? std::string() : std::string(trim(line.substr(colon + 1)));
      if (key.rfind(kColumnPrefix, 0) == 0) {
        const auto semi = value.find(';');
        Column c{key.substr(kColumnPrefix.size()), std::string(trim(std::string_view(value).substr(0, semi))),
                 semi == std::string::npos ? std::string()
                                           : std::string(trim(std::string_view(value).substr(semi + 1)))};
        described.emplace_back(c.name, c);
      } else if (key != kTimestampKey) {
        metadata.emplace_back(key, value);
      }
      continue;
    }
    body.push_back(line);
  }
  if (body.empty()) throw InvalidArgument("CSV has no header row");

  std::vector<Column> columns;
  for (auto name : split(body.front(), ',')) {
    Column c{std::string(trim(name)), "", ""};
    for (const auto& [n, d] : described) {
      if (n == c.name) c = d;
    }
    columns.push_back(std::move(c));
  }
  ResultTable table(std::move(columns));
  for (std::size_t i = 1; i < body.size(); ++i) {
    std::vector<double> row;
    for (auto cell : split(body[i], ',')) row.push_back(parse_real(trim(cell)));
    table.add_row(std::move(row));
  }
  for (auto& [k, v] : metadata) table.set_metadata(k, std::move(v));
  return table;
}

std::string format_real(double value) {
  char buffer[64];
  const auto result = std::to_chars(buffer, buffer + sizeof buffer, value, std::chars_format::general, 17);
  return std::string(buffer, result.ptr);
}

double parse_real(std::string_view text) {
  double value = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (first != last && *first == '+') ++first;
  const auto result = std::from_chars(first, last, value);
  if (result.ec != std::errc() || result.ptr != last) {
    throw InvalidArgument("not a real number: '" + std::string(text) + "'");
  }
  return value;
}

std::vector<std::string> deterministic_lines(std::string_view csv) {
  const std::string prefix = "# " + std::string(kTimestampKey) + ":";
  std::vector<std::string> out;
  for (auto line : lines_of(csv)) {
    if (line.empty() || line.rfind(prefix, 0) == 0) continue;
    out.emplace_back(line);
  }
  return out;
}

std::string fnv1a_hex(std::string_view text) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  char buffer[17];
  std::snprintf(buffer, sizeof buffer, "%016llx", static_cast<unsigned long long>(hash));
  return buffer;
}

}  // namespace hfa
