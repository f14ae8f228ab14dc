#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace transitsim::csv {

// RFC-4180 table: quoted fields may contain commas, doubled quotes and
// line breaks. A leading UTF-8 BOM is dropped.
class Table {
 public:
  static Table parse(std::string_view text, const std::string& source_name);
  static Table read_file(const std::filesystem::path& path);

  const std::string& source() const { return source_; }
  const std::vector<std::string>& header() const { return header_; }
  std::size_t size() const { return rows_.size(); }

  bool has_column(std::string_view name) const;
  // Throws ParseError naming the file when the column is absent.
  std::size_t column(std::string_view name) const;
  std::optional<std::size_t> find_column(std::string_view name) const;

  const std::string& at(std::size_t row, std::size_t col) const;
  const std::vector<std::string>& row(std::size_t i) const { return rows_[i]; }

 private:
  std::string source_;
  std::vector<std::string> header_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<std::vector<std::string>> rows_;
};

std::vector<std::vector<std::string>> parse_records(std::string_view text);

// Quotes only when the field needs it.
std::string escape(std::string_view field);

void write_row(std::ostream& out, const std::vector<std::string>& fields);

double to_double(const std::string& field, const Table& t, std::string_view what);
long long to_int(const std::string& field, const Table& t, std::string_view what);

// Shortest round-trippable decimal rendering ("%.17g" trimmed).
std::string fmt_double(double v);

}  // namespace transitsim::csv
