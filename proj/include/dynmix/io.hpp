#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "dynmix/errors.hpp"

namespace dynmix {

// Shortest-faithful decimal rendering: 17 significant digits round-trip
// any double exactly.
inline std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

// FNV-1a 64-bit hash, used to fingerprint input data files.
inline std::uint64_t fnv1a64(std::span<const char> bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string fnv1a64_hex(std::span<const char> bytes) {
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(bytes)));
  return buf;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Write-then-rename so readers never observe a partial file.
inline void write_file_atomic(const std::string& path,
                              const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write file: " + tmp);
    out << content;
    if (!out) throw Error("write failed: " + tmp);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error("rename failed for " + path + ": " + ec.message());
}

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> columns;
  long rows = 0;

  int column_index(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return static_cast<int>(i);
    }
    return -1;
  }

  const std::vector<double>& column(const std::string& name) const {
    const int i = column_index(name);
    if (i < 0) throw DataError("missing column: " + name);
    return columns[static_cast<std::size_t>(i)];
  }
};

// Strict numeric CSV: one header line, comma-separated doubles, identical
// field count per row. Errors carry the 1-based line number.
inline CsvTable parse_csv(const std::string& text, const std::string& origin) {
  CsvTable table;
  std::istringstream in(text);
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    lineno += 1;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::size_t start = 0;
    for (;;) {
      const std::size_t comma = line.find(',', start);
      if (comma == std::string::npos) {
        fields.push_back(line.substr(start));
        break;
      }
      fields.push_back(line.substr(start, comma - start));
      start = comma + 1;
    }
    if (lineno == 1) {
      table.header = fields;
      table.columns.resize(fields.size());
      continue;
    }
    if (fields.size() != table.header.size()) {
      throw DataError(origin + ": line " + std::to_string(lineno) +
                      ": expected " + std::to_string(table.header.size()) +
                      " fields, got " + std::to_string(fields.size()));
    }
    for (std::size_t i = 0; i < fields.size(); ++i) {
      std::size_t used = 0;
      double value = 0.0;
      try {
        value = std::stod(fields[i], &used);
      } catch (const std::exception&) {
        throw DataError(origin + ": line " + std::to_string(lineno) +
                        ": not a number: '" + fields[i] + "'");
      }
      if (used != fields[i].size()) {
        throw DataError(origin + ": line " + std::to_string(lineno) +
                        ": trailing garbage in '" + fields[i] + "'");
      }
      table.columns[i].push_back(value);
    }
    table.rows += 1;
  }
  if (table.header.empty()) throw DataError(origin + ": empty file");
  return table;
}

inline CsvTable read_csv(const std::string& path) {
  return parse_csv(read_file(path), path);
}

inline std::vector<int> to_int_column(const std::vector<double>& col,
                                      const std::string& name) {
  std::vector<int> out(col.size());
  for (std::size_t i = 0; i < col.size(); ++i) {
    const double v = col[i];
    if (v != static_cast<double>(static_cast<long long>(v))) {
      throw DataError("column " + name + ": non-integer value at row " +
                      std::to_string(i + 1));
    }
    out[i] = static_cast<int>(v);
  }
  return out;
}

// Incremental CSV writer with full-precision doubles.
class CsvBuilder {
 public:
  explicit CsvBuilder(std::span<const std::string> header) {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (i) body_ += ',';
      body_ += header[i];
    }
    body_ += '\n';
    width_ = header.size();
  }

  void row(std::span<const double> values) {
    if (values.size() != width_) {
      throw DimensionError("CsvBuilder: row width mismatch");
    }
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (i) body_ += ',';
      body_ += format_double(values[i]);
    }
    body_ += '\n';
  }

  // Row with a leading label field followed by numeric fields.
  void labeled_row(const std::string& label, std::span<const double> values) {
    if (values.size() + 1 != width_) {
      throw DimensionError("CsvBuilder: row width mismatch");
    }
    body_ += label;
    for (double v : values) {
      body_ += ',';
      body_ += format_double(v);
    }
    body_ += '\n';
  }

  const std::string& str() const { return body_; }

 private:
  std::string body_;
  std::size_t width_ = 0;
};

// Flat key-value prior specification: one `key value` (or `key = value`)
// pair per line, '#' starts a comment. Returns the pairs in file order;
// interpretation against a model order happens in the CLI layer.
inline std::vector<std::pair<std::string, double>> parse_priors_file(
    const std::string& text, const std::string& origin) {
  std::vector<std::pair<std::string, double>> out;
  std::istringstream in(text);
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    lineno += 1;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string key;
    if (!(ls >> key)) continue;
    std::string rest;
    std::getline(ls, rest);
    std::size_t pos = rest.find_first_not_of(" \t");
    if (pos != std::string::npos && rest[pos] == '=') {
      rest.erase(0, pos + 1);
    }
    std::istringstream vs(rest);
    double value = 0.0;
    std::string extra;
    if (!(vs >> value) || (vs >> extra)) {
      throw DataError(origin + ": line " + std::to_string(lineno) +
                      ": expected 'key value'");
    }
    out.emplace_back(key, value);
  }
  return out;
}

}  // namespace dynmix
