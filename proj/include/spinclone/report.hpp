#pragma once

// Tabular output (CSV / JSON) and run manifests.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

namespace spinclone::report {

inline constexpr const char* kVersion = "1.0.0";

using Cell = std::variant<double, long long, std::string>;

inline std::string format_real(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", x);
  return buf;
}

inline std::string format_cell(const Cell& cell) {
  if (const auto* d = std::get_if<double>(&cell)) return format_real(*d);
  if (const auto* i = std::get_if<long long>(&cell)) return std::to_string(*i);
  return std::get<std::string>(cell);
}

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<Cell>> rows;

  void add(std::vector<Cell> row) { rows.push_back(std::move(row)); }

  std::string to_csv() const {
    std::string out;
    for (std::size_t c = 0; c < header.size(); ++c) out += (c ? "," : "") + header[c];
    out += '\n';
    for (const auto& row : rows) {
      for (std::size_t c = 0; c < row.size(); ++c) out += (c ? "," : "") + format_cell(row[c]);
      out += '\n';
    }
    return out;
  }

  // Reals are rounded through the CSV text so both formats carry the same values.
  nlohmann::json to_json() const {
    auto rows_json = nlohmann::json::array();
    for (const auto& row : rows) {
      nlohmann::json obj = nlohmann::json::object();
      for (std::size_t c = 0; c < row.size() && c < header.size(); ++c) {
        if (const auto* d = std::get_if<double>(&row[c])) {
          if (std::isfinite(*d)) {
            obj[header[c]] = std::stod(format_real(*d));
          } else {
            obj[header[c]] = format_real(*d);
          }
        } else if (const auto* i = std::get_if<long long>(&row[c])) {
          obj[header[c]] = *i;
        } else {
          obj[header[c]] = std::get<std::string>(row[c]);
        }
      }
      rows_json.push_back(std::move(obj));
    }
    return {{"columns", header}, {"rows", rows_json}};
  }
};

enum class Format { csv, json };

/// key=value text sidecar describing how an output was produced.
struct RunManifest {
  std::string command;
  std::vector<std::pair<std::string, std::string>> parameters;
  unsigned long long seed = 0;
  std::string version = kVersion;
  std::vector<std::string> outputs;
  double wall_seconds = 0.0;

  std::string to_text() const {
    std::string out = "command=" + command + "\n";
    out += "version=" + version + "\n";
    out += "seed=" + std::to_string(seed) + "\n";
    for (const auto& [k, v] : parameters) out += "param." + k + "=" + v + "\n";
    for (const auto& o : outputs) out += "output=" + o + "\n";
    out += "wall_seconds=" + format_real(wall_seconds) + "\n";
    return out;
  }
};

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << text;
}

/// Writes `stem`.csv or `stem`.json under dir; returns the path written.
inline std::filesystem::path write_table(const std::filesystem::path& dir, const std::string& stem, const Table& table,
                                         Format format) {
  const auto path = dir / (stem + (format == Format::csv ? ".csv" : ".json"));
  write_text(path, format == Format::csv ? table.to_csv() : table.to_json().dump(2) + "\n");
  return path;
}

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

}  // namespace spinclone::report
