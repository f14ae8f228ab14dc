#include "transitsim/csv.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "transitsim/common.hpp"

namespace transitsim {

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string format_hms(Seconds t) {
  const long s = std::lround(t);
  char buf[32];
  std::snprintf(buf, sizeof buf, "%02ld:%02ld:%02ld", s / 3600, (s / 60) % 60, s % 60);
  return buf;
}

namespace csv {

std::vector<std::vector<std::string>> parse_records(std::string_view text) {
  if (text.size() >= 3 && static_cast<unsigned char>(text[0]) == 0xEF &&
      static_cast<unsigned char>(text[1]) == 0xBB &&
      static_cast<unsigned char>(text[2]) == 0xBF) {
    text.remove_prefix(3);
  }
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> current;
  std::string field;
  bool quoted = false;
  bool field_started = false;
  auto end_field = [&] {
    current.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_record = [&] {
    end_field();
    // Skip blank lines.
    if (!(current.size() == 1 && current[0].empty())) records.push_back(std::move(current));
    current.clear();
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    switch (c) {
      case '"':
        if (!field_started || field.empty()) quoted = true;
        else field += c;
        field_started = true;
        break;
      case ',':
        end_field();
        break;
      case '\r':
        break;
      case '\n':
        end_record();
        break;
      default:
        field += c;
        field_started = true;
    }
  }
  if (field_started || !field.empty() || !current.empty()) end_record();
  return records;
}

Table Table::parse(std::string_view text, const std::string& source_name) {
  Table t;
  t.source_ = source_name;
  auto records = parse_records(text);
  if (records.empty()) throw ParseError(source_name + ": missing header row");
  t.header_ = std::move(records.front());
  for (auto& h : t.header_) {
    while (!h.empty() && (h.back() == ' ' || h.back() == '\t')) h.pop_back();
    while (!h.empty() && (h.front() == ' ' || h.front() == '\t')) h.erase(h.begin());
  }
  for (std::size_t i = 0; i < t.header_.size(); ++i) t.index_.emplace(t.header_[i], i);
  t.rows_.assign(std::make_move_iterator(records.begin() + 1),
                 std::make_move_iterator(records.end()));
  for (auto& r : t.rows_) r.resize(t.header_.size());
  return t;
}

Table Table::read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open required file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path.filename().string());
}

bool Table::has_column(std::string_view name) const {
  return index_.find(std::string(name)) != index_.end();
}

std::optional<std::size_t> Table::find_column(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t Table::column(std::string_view name) const {
  auto c = find_column(name);
  if (!c) throw ParseError(source_ + ": missing column '" + std::string(name) + "'");
  return *c;
}

const std::string& Table::at(std::size_t row, std::size_t col) const { return rows_[row][col]; }

std::string escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

void write_row(std::ostream& out, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out << ',';
    out << escape(fields[i]);
  }
  out << '\n';
}

double to_double(const std::string& field, const Table& t, std::string_view what) {
  double v = 0.0;
  const char* b = field.data();
  const char* e = b + field.size();
  while (b < e && *b == ' ') ++b;
  auto [p, ec] = std::from_chars(b, e, v);
  if (ec != std::errc() || p == b)
    throw ParseError(t.source() + ": bad number for " + std::string(what) + ": '" + field + "'");
  return v;
}

long long to_int(const std::string& field, const Table& t, std::string_view what) {
  long long v = 0;
  const char* b = field.data();
  const char* e = b + field.size();
  while (b < e && *b == ' ') ++b;
  auto [p, ec] = std::from_chars(b, e, v);
  if (ec != std::errc() || p == b)
    throw ParseError(t.source() + ": bad integer for " + std::string(what) + ": '" + field + "'");
  return v;
}

std::string fmt_double(double v) {
  if (v == 0.0) return "0";
  char buf[40];
  for (int prec = 6; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

}  // namespace csv
}  // namespace transitsim
